"""Derived sections over open regions via nerve cochain complexes.

For an open region ``U`` the chains of length ``p`` are composable strings
of ``p`` incidences starting in ``U``: cells (``p = 0``), incidences
(``p = 1``) and ``v > r > s`` (``p = 2``).  ``C^p(F^q)`` is the sum over
chains of the stalk of ``F^q`` at the last cell and

    d x(c0 .. c_{p+1}) = sum_{i <= p} (-1)^i x(.. c_i omitted ..)
                         + (-1)^{p+1} F(c_p -> c_{p+1}) x(c0 .. c_p).

The total complex has ``D = d_nerve + (-1)^p d_F``.  Restricting to a
smaller open region is the projection onto chains starting there.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from ..complexes import ChainMap, CochainComplex
from ..exactlin import Matrix, assemble
from .cells import FanError
from .complex import FanComplex

__all__ = ["GlobalSections", "NerveComplex", "global_sections", "nerve"]


class NerveComplex:
    """Total nerve complex of ``F`` over an open region, with its coordinate layout."""

    def __init__(self, f: FanComplex, region: Iterable[str]):
        fan = f.fan
        self.source = f
        self.region = fan.check_region(region)
        reg = self.region
        inc = fan.incidence
        chains = {
            0: [(c, c) for c in fan.cells if c in reg],
            1: [(x.key, x.target) for x in fan.incidences if x.source in reg],
            2: [((a, b), inc[b].target) for a, b, _ in fan.composites if inc[a].source in reg],
        }
        self.chains = chains
        layout: dict[int, dict[tuple, tuple[int, int]]] = {}
        for q in f.degrees:
            for p in (0, 1, 2):
                k = p + q
                slots = layout.setdefault(k, {})
                off = sum(size for _, size in slots.values())
                for ch, end in chains[p]:
                    size = f.stalk(q, end)
                    slots[(p, q, ch)] = (off, size)
                    off += size
        self.layout = layout
        dims = {k: sum(size for _, size in slots.values()) for k, slots in layout.items()}
        diffs = {k: self._differential(k) for k in layout if k + 1 in layout}
        self.complex = CochainComplex(dims, diffs)

    def dim(self, k: int) -> int:
        return self.complex.dim(k)

    def _differential(self, k: int) -> Matrix:
        f, fan = self.source, self.source.fan
        inc = fan.incidence
        rows, cols = self.layout[k + 1], self.layout[k]
        pieces = []

        def put(target, col_off, m):
            slot = rows.get(target)
            if slot is not None:
                pieces.append((slot[0], col_off, m))

        comp_of = {(a, b): c for a, b, c in fan.composites}
        for (p, q, ch), (off, size) in cols.items():
            if not size:
                continue
            end = ch if p == 0 else (inc[ch].target if p == 1 else inc[ch[1]].target)
            if q + 1 in f.stalks:
                d = f.diff(q, end)
                put((p, q + 1, ch), off, d if p % 2 == 0 else -d)
            eye = Matrix.identity(size)
            if p == 0:
                for x in fan.incidences:
                    if x.source == ch:
                        put((1, q, x.key), off, -f.map(q, x.key))
                    if x.target == ch and x.source in self.region:
                        put((1, q, x.key), off, eye)
            elif p == 1:
                for (a, b), c in comp_of.items():
                    if inc[a].source not in self.region:
                        continue
                    if b == ch:
                        put((2, q, (a, b)), off, eye)
                    if c == ch:
                        put((2, q, (a, b)), off, -eye)
                    if a == ch:
                        put((2, q, (a, b)), off, f.map(q, b))
        r = sum(s for _, s in rows.values())
        c = sum(s for _, s in cols.values())
        return assemble(r, c, pieces)

    def restriction(self, sub: "NerveComplex") -> ChainMap:
        """Chain map ``A(self.region) -> A(sub.region)`` for an open ``sub`` inside."""
        if not sub.region <= self.region:
            raise FanError("restriction target must be a subregion")
        maps = {}
        for k, slots in sub.layout.items():
            pieces = [
                (off, self.layout[k][key][0], Matrix.identity(size))
                for key, (off, size) in slots.items()
                if size
            ]
            maps[k] = assemble(sub.dim(k), self.dim(k), pieces)
        return ChainMap(self.complex, sub.complex, maps)

    def extension(self, sub: "NerveComplex") -> ChainMap:
        """Extension by zero ``A(sub) -> A(self)``; ``sub`` must be a union of components."""
        fan = self.source.fan
        for x in fan.incidences:
            if x.source in self.region and (x.source in sub.region) != (x.target in sub.region):
                raise FanError("extension by zero needs a union of connected components")
        r = self.restriction(sub)
        return ChainMap(sub.complex, self.complex, {k: m.T for k, m in r.maps.items()})

    def vector(self, k: int, values: dict[tuple, Matrix]) -> Matrix:
        """Cochain of degree ``k`` from ``{(p, q, chain): column}`` blocks."""
        slots = self.layout[k]
        pieces = [(slots[key][0], 0, v) for key, v in values.items() if key in slots]
        width = next(iter(values.values())).cols if values else 1
        return assemble(self.dim(k), width, pieces)


def nerve(f: FanComplex, region: Iterable[str] | None = None) -> NerveComplex:
    """Cached :class:`NerveComplex` of ``f`` over ``region`` (default: the whole disk)."""
    region = frozenset(f.fan.cells if region is None else region)
    cache = f._cache.setdefault("nerve", {})
    if region not in cache:
        cache[region] = NerveComplex(f, region)
    return cache[region]


@dataclass(frozen=True)
class GlobalSections:
    dims: dict[int, int]
    representatives: dict[int, Matrix]


def global_sections(f: FanComplex, region: Iterable[str] | None = None) -> GlobalSections:
    """``H^k`` of derived sections over an open region, with cocycle representatives."""
    a = nerve(f, region)
    dims, reps = {}, {}
    for k in sorted(a.layout):
        h = a.complex.cohomology(k)
        dims[k] = h.dim
        reps[k] = h.representatives
    return GlobalSections(dims, reps)
