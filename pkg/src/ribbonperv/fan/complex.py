"""Bounded complexes of cellular sheaves on a fan, and their builders."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from ..exactlin import Matrix, assemble, block, parse_scalar
from ..quiverrep import DoubleRep, corolla_half_edges, validate_object
from .cells import VERTEX, FanDecomposition, FanError

__all__ = ["FanComplex", "constant_sheaf", "cousin_complex", "refine"]


@dataclass(frozen=True, eq=False)
class FanComplex:
    """``stalks[q][cell]`` dims, ``maps[q][incidence key]`` and ``diffs[q][cell]: F^q -> F^{q+1}``.

    Missing maps are zero.  Construction checks shapes, functoriality on
    every length-two chain, that differentials commute with generalization,
    and ``d o d = 0``.
    """

    fan: FanDecomposition
    stalks: Mapping[int, Mapping[str, int]]
    maps: Mapping[int, Mapping[str, Matrix]] = field(default_factory=dict)
    diffs: Mapping[int, Mapping[str, Matrix]] = field(default_factory=dict)
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        fan = self.fan
        cells = set(fan.cells)
        degrees = sorted(int(q) for q in self.stalks)
        stalks, maps, diffs = {}, {}, {}
        for q in degrees:
            given = self.stalks[q]
            unknown = set(given) - cells
            if unknown:
                raise FanError(f"degree {q}: unknown cells {sorted(unknown)}")
            stalks[q] = {c: int(given.get(c, 0)) for c in fan.cells}
            if any(d < 0 for d in stalks[q].values()):
                raise FanError(f"degree {q}: negative stalk dimension")
        for q in set(self.maps) | set(self.diffs):
            if q not in stalks:
                raise FanError(f"maps given in degree {q} with no stalks")
        for q in degrees:
            s = stalks[q]
            given = self.maps.get(q, {})
            unknown = set(given) - set(fan.incidence)
            if unknown:
                raise FanError(f"degree {q}: unknown incidences {sorted(unknown)}")
            maps[q] = {}
            for f in fan.incidences:
                want = (s[f.target], s[f.source])
                m = given.get(f.key, Matrix.zeros(*want))
                if m.shape != want:
                    raise FanError(f"degree {q}: map {f.key} has shape {m.shape}, expected {want}")
                maps[q][f.key] = m
            nxt = stalks.get(q + 1)
            given = self.diffs.get(q, {})
            unknown = set(given) - cells
            if unknown:
                raise FanError(f"degree {q}: differentials on unknown cells {sorted(unknown)}")
            if nxt is None and any(not m.is_zero() for m in given.values()):
                raise FanError(f"degree {q}: differential into a missing degree")
            diffs[q] = {}
            for c in fan.cells:
                want = ((nxt or {}).get(c, 0), s[c])
                m = given.get(c, Matrix.zeros(*want))
                if m.shape != want:
                    raise FanError(f"degree {q}: differential at {c} has shape {m.shape}, expected {want}")
                diffs[q][c] = m
        object.__setattr__(self, "stalks", stalks)
        object.__setattr__(self, "maps", maps)
        object.__setattr__(self, "diffs", diffs)
        problems = self.defects()
        if problems:
            raise FanError("; ".join(problems))

    def defects(self) -> list[str]:
        fan, out = self.fan, []
        for q in self.degrees:
            m = self.maps[q]
            for first, second, comp in fan.composites:
                if m[second] @ m[first] != m[comp]:
                    out.append(f"degree {q}: {comp} is not {second} o {first}")
            if q + 1 in self.stalks:
                for f in fan.incidences:
                    lhs = self.maps[q + 1][f.key] @ self.diffs[q][f.source]
                    if lhs != self.diffs[q][f.target] @ m[f.key]:
                        out.append(f"degree {q}: differential does not commute with {f.key}")
            if q + 2 in self.stalks:
                for c in fan.cells:
                    if not (self.diffs[q + 1][c] @ self.diffs[q][c]).is_zero():
                        out.append(f"degree {q}: d o d != 0 at {c}")
        return out

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(sorted(self.stalks))

    def stalk(self, q: int, cell: str) -> int:
        s = self.stalks.get(q)
        return 0 if s is None else s[cell]

    def map(self, q: int, key: str) -> Matrix:
        return self.maps[q][key]

    def diff(self, q: int, cell: str) -> Matrix:
        d = self.diffs.get(q)
        if d is None:
            return Matrix.zeros(self.stalk(q + 1, cell), self.stalk(q, cell))
        return d[cell]

    # -- serialization ---------------------------------------------------

    def to_json(self) -> dict:
        return {
            "fan": self.fan.to_json(),
            "degrees": list(self.degrees),
            "stalks": {str(q): dict(s) for q, s in self.stalks.items()},
            "maps": {str(q): {k: m.to_json() for k, m in ms.items()} for q, ms in self.maps.items()},
            "differentials": {
                str(q): {c: m.to_json() for c, m in ds.items()} for q, ds in self.diffs.items()
            },
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "FanComplex":
        try:
            fan = FanDecomposition.from_json(data["fan"])
            stalks = {int(q): {str(c): int(n) for c, n in s.items()} for q, s in data["stalks"].items()}
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise FanError(f"malformed fan complex JSON: {exc}") from None
        full = {q: {c: s.get(c, 0) for c in fan.cells} for q, s in stalks.items()}
        maps, diffs = {}, {}
        try:
            for q, ms in data.get("maps", {}).items():
                q = int(q)
                maps[q] = {}
                for k, m in ms.items():
                    f = fan.incidence[k]
                    maps[q][k] = Matrix.from_json(m, (full[q][f.target], full[q][f.source]))
            for q, ds in data.get("differentials", {}).items():
                q = int(q)
                nxt = full.get(q + 1, {})
                diffs[q] = {c: Matrix.from_json(m, (nxt.get(c, 0), full[q][c])) for c, m in ds.items()}
        except (KeyError, TypeError, ValueError) as exc:
            raise FanError(f"malformed fan complex JSON: {exc}") from None
        return cls(fan, stalks, maps, diffs)


def constant_sheaf(fan: FanDecomposition | int, dim: int = 1, degree: int = 0) -> FanComplex:
    """``k^dim`` on every cell with identity generalizations, placed in one degree."""
    if isinstance(fan, int):
        fan = FanDecomposition.equidistant(fan)
    eye = Matrix.identity(dim)
    return FanComplex(
        fan,
        {degree: {c: dim for c in fan.cells}},
        {degree: {f.key: eye for f in fan.incidences}},
    )


def _projection(dims: list[int], pick: list[int]) -> Matrix:
    """Coordinate projection from ``sum(dims)`` onto the summands listed in ``pick``."""
    offsets = [sum(dims[:i]) for i in range(len(dims))]
    pieces, row = [], 0
    for i in pick:
        pieces.append((row, offsets[i], Matrix.identity(dims[i])))
        row += dims[i]
    return assemble(row, sum(dims), pieces)


def cousin_complex(q: DoubleRep, fan: FanDecomposition | None = None, *, check: bool = True) -> FanComplex:
    """Two-term complex realizing a valid corolla object on a fan with one ray per leg.

    Degree 0 is the sum of the constant sheaves ``E_nu`` on the closed
    sectors; degree 1 is the sheaf with stalk ``E_0`` at the vertex,
    ``E_nu`` on ray ``nu`` and generalizations ``gamma_nu``.  The
    differential is ``sum delta_nu`` at the vertex and
    ``(Id, gamma_nu delta_{nu-1})`` on ray ``nu``, i.e. ``(Id, -T_{nu-1})``.

    ``check=False`` skips validation of ``q``; it exists to build
    deliberately broken complexes for the perversity checker.
    """
    hs = corolla_half_edges(q)
    n = len(hs)
    if n < 2:
        raise FanError("Cousin complexes need n >= 2; transport corolla(1) objects from a larger corolla")
    if check:
        verdict = validate_object(q)
        if not verdict:
            raise FanError("object is not valid: " + "; ".join(map(str, verdict.violations)))
    fan = fan or FanDecomposition.equidistant(n)
    if fan.n != n:
        raise FanError(f"fan has {fan.n} rays but the object has {n} legs")
    center = q.graph.vertex_ids[0]
    e = [q.dim(h) for h in hs]
    e0 = q.dim(center)

    s0 = {VERTEX: sum(e)}
    s1 = {VERTEX: e0}
    m0, m1, d0 = {}, {}, {}
    for i in range(n):
        j = (i - 1) % n
        r, s = fan.ray(i), fan.sector(i)
        s0[r] = e[i] + e[j]
        s0[s] = e[i]
        s1[r] = e[i]
        m0[f"v>{r}"] = _projection(e, [i, j])
        m0[f"v>{s}"] = _projection(e, [i])
        m0[f"{r}>{s}:ccw"] = _projection([e[i], e[j]], [0])
        m0[f"{r}>{fan.sector(j)}:cw"] = _projection([e[i], e[j]], [1])
        m1[f"v>{r}"] = q.gamma[hs[i]]
        d0[r] = block(
            [[Matrix.identity(e[i]), q.gamma[hs[i]] @ q.delta[hs[j]]]],
            [e[i]],
            [e[i], e[j]],
        )
    d0[VERTEX] = block([[q.delta[h] for h in hs]], [e0], e)
    return FanComplex(fan, {0: s0, 1: s1}, {0: m0, 1: m1}, {0: d0})


def _parent_cells(old: FanDecomposition, new: FanDecomposition) -> dict[str, str]:
    """Old cell containing each new cell."""
    parent = {VERTEX: VERTEX}
    for i, a in enumerate(new.angles):
        if a in old.angles:
            parent[new.ray(i)] = old.ray(old.angles.index(a))
        else:
            parent[new.ray(i)] = old.sector(_sector_containing(old, a))
    for i, a in enumerate(new.angles):
        # a point just counterclockwise of ray i lies in new sector i
        k = old.angles.index(a) if a in old.angles else _sector_containing(old, a)
        parent[new.sector(i)] = old.sector(k)
    return parent


def _sector_containing(fan: FanDecomposition, angle: Fraction) -> int:
    """Index of the sector whose interior contains ``angle`` (or starts at it)."""
    below = [i for i, a in enumerate(fan.angles) if a <= angle]
    return below[-1] if below else fan.n - 1


def refine(f: FanComplex, extra_rays: Iterable) -> FanComplex:
    """Subdivide sectors by new rays; hypercohomology is unchanged.

    A new ray inherits the stalk of the sector it cuts, with identity
    generalizations into both halves.
    """
    extra = [parse_scalar(a) for a in extra_rays]
    if not extra:
        return f
    if len(set(extra)) != len(extra) or set(extra) & set(f.fan.angles):
        raise FanError("refinement rays must be new and distinct")
    old = f.fan
    new = FanDecomposition(tuple(sorted(old.angles + tuple(extra))))
    parent = _parent_cells(old, new)

    def old_key(inc) -> str | None:
        pa, pb = parent[inc.source], parent[inc.target]
        if pa == pb:
            return None
        if pa == VERTEX:
            return f"v>{pb}"
        side = inc.key.rsplit(":", 1)[1]
        return f"{pa}>{pb}:{side}"

    stalks, maps, diffs = {}, {}, {}
    for q in f.degrees:
        stalks[q] = {c: f.stalk(q, parent[c]) for c in new.cells}
        maps[q] = {}
        for inc in new.incidences:
            k = old_key(inc)
            maps[q][inc.key] = Matrix.identity(stalks[q][inc.source]) if k is None else f.map(q, k)
        diffs[q] = {c: f.diff(q, parent[c]) for c in new.cells} if q + 1 in f.stalks else {}
    return FanComplex(new, stalks, maps, diffs)
