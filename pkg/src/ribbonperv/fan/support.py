"""Cohomology with supports on a skeleton, and the perversity check.

For a closed set ``Z`` inside an open region ``V`` the complex
``S = Cone(A(V) -> A(V - Z))[-1]`` computes cohomology of ``V`` with
supports in ``Z``.  Its connecting map sends a section ``b`` over ``V - Z``
to the class of ``(0, b)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from ..complexes import ChainMap, CochainComplex, Cohomology, shifted_cone
from ..exactlin import Matrix, block_diag, inverse, is_invertible, vstack
from .cells import VERTEX, FanError
from .complex import FanComplex, refine
from .nerve import NerveComplex, nerve

__all__ = [
    "PerversityVerdict",
    "SupportCohomology",
    "check_perversity",
    "support_cohomology",
]


class SupportCone:
    """``S(V, Z)`` together with the nerve complexes it is built from."""

    def __init__(self, f: FanComplex, region: frozenset[str], support: frozenset[str]):
        self.a_v = nerve(f, region)
        self.a_w = nerve(f, region - support)
        self.region, self.support = region, support
        self.complex = shifted_cone(self.a_v.restriction(self.a_w))

    def h(self, k: int) -> Cohomology:
        return self.complex.cohomology(k)

    def dims(self) -> dict[int, int]:
        return {k: self.h(k).dim for k in sorted(self.complex.dims)}

    def connecting(self, cocycles: Matrix) -> Matrix:
        """``H^0(V - Z) -> H^1(S)`` on degree-0 cocycles of ``A(V - Z)``, in H^1 coordinates."""
        lift = vstack([Matrix.zeros(self.a_v.dim(1), cocycles.cols), cocycles])
        return self.h(1).coordinates(lift)

    def map_to(self, other: "SupportCone") -> ChainMap:
        """Restriction ``S(V, Z) -> S(V', Z')`` for ``V' in V`` and ``V' - Z' in V - Z``."""
        rv = self.a_v.restriction(other.a_v)
        rw = self.a_w.restriction(other.a_w)
        maps = {
            k: block_diag([rv.at(k), rw.at(k - 1)])
            for k in other.complex.dims
            if k in self.complex.dims
        }
        return ChainMap(self.complex, other.complex, maps)


def support_cone(f: FanComplex, region: Iterable[str], support: Iterable[str]) -> SupportCone:
    region, support = frozenset(region), frozenset(support)
    if not support <= region:
        raise FanError("support must lie inside the region")
    cache = f._cache.setdefault("cone", {})
    key = (region, support)
    if key not in cache:
        cache[key] = SupportCone(f, region, support)
    return cache[key]


def h0(f: FanComplex, region: Iterable[str]) -> tuple[NerveComplex, Cohomology]:
    a = nerve(f, region)
    return a, a.complex.cohomology(0)


def restrict_h0(f: FanComplex, big: Iterable[str], small: Iterable[str]) -> Matrix:
    """``H^0(big) -> H^0(small)`` in representative coordinates."""
    a, h = h0(f, big)
    b, hb = h0(f, small)
    return hb.coordinates(a.restriction(b).at(0) @ h.representatives)


def ray_cone(f: FanComplex, i: int) -> SupportCone:
    """Support cone of ray ``i`` inside its star."""
    fan = f.fan
    r = fan.ray(i)
    return support_cone(f, fan.star(r), [r])


def sector_to_ray(f: FanComplex, i: int, side: str) -> Matrix:
    """Connecting map ``H^0(adjacent sector) -> H^1_{r_i}(star)``."""
    fan = f.fan
    s = fan.ccw_sector(i) if side == "ccw" else fan.cw_sector(i)
    cone = ray_cone(f, i)
    a, h = h0(f, [s])
    ext = cone.a_w.extension(a)
    return cone.connecting(ext.at(0) @ h.representatives)


def with_two_rays(f: FanComplex, skeleton: Iterable[int]) -> tuple[FanComplex, tuple[int, ...]]:
    """Refine a one-ray fan so each ray has two distinct adjacent sectors."""
    skeleton = tuple(sorted(set(skeleton)))
    if any(not 0 <= k < f.fan.n for k in skeleton):
        raise FanError("skeleton ray index out of range")
    if f.fan.n > 1:
        return f, skeleton
    g = f._cache.get("two-rays")
    if g is None:
        g = f._cache["two-rays"] = refine(f, [(f.fan.angles[0] + Fraction(1, 2)) % 1])
    return g, tuple(g.fan.ray_at(f.fan.angles[k]) for k in skeleton)


@dataclass(frozen=True)
class SupportCohomology:
    """Cohomology with supports in a skeleton ``K`` (the vertex and some rays).

    ``vertex[i]`` is ``dim H^i_K(D)`` and ``rays[k][i]`` is the same for ray
    ``k`` inside its star.  ``generalizations[k]`` maps ``H^1_K`` to
    ``H^1`` at ray ``k``; ``connecting[nu]`` maps sections over the
    ``nu``-th complementary sector to ``H^1_K``.  ``ray_components[k]``
    is the pair (ccw, cw) of sector-to-ray connecting maps normalized so
    the ccw part is the identity (``None`` when that part is singular).
    All matrices use representative coordinates of the complex passed in
    (refined first if it had a single ray).
    """

    skeleton: tuple[int, ...]
    vertex: dict[int, int]
    rays: dict[int, dict[int, int]]
    generalizations: dict[int, Matrix]
    connecting: dict[int, Matrix]
    ray_components: dict[int, tuple[Matrix, Matrix] | None]
    complex: FanComplex = field(repr=False, compare=False)

    @property
    def pure(self) -> bool:
        tables = [self.vertex] + list(self.rays.values())
        return all(d == 0 for t in tables for k, d in t.items() if k != 1)


def skeleton_cells(f: FanComplex, skeleton: Iterable[int]) -> frozenset[str]:
    return frozenset([VERTEX] + [f.fan.ray(k) for k in skeleton])


def support_cohomology(f: FanComplex, skeleton: Iterable[int] | None = None) -> SupportCohomology:
    if skeleton is None:
        skeleton = range(f.fan.n)
    skeleton = tuple(skeleton)
    if not skeleton:
        raise FanError("skeleton needs at least one ray")
    g, ks = with_two_rays(f, skeleton)
    fan = g.fan
    cone = support_cone(g, fan.cells, skeleton_cells(g, ks))
    rays, gens, comps = {}, {}, {}
    for k in ks:
        rc = ray_cone(g, k)
        rays[k] = rc.dims()
        gens[k] = cone.map_to(rc).induced(1)
        ccw, cw = sector_to_ray(g, k, "ccw"), sector_to_ray(g, k, "cw")
        if is_invertible(ccw):
            inv = inverse(ccw)
            comps[k] = (inv @ ccw, inv @ cw)
        else:
            comps[k] = None
    conn = {}
    m = len(ks)
    for nu in range(m):
        a, h = h0(g, fan.between(ks[nu], ks[(nu + 1) % m]))
        conn[nu] = cone.connecting(cone.a_w.extension(a).at(0) @ h.representatives)
    return SupportCohomology(ks, cone.dims(), rays, gens, conn, comps, g)


# -- perversity ------------------------------------------------------------------


@dataclass(frozen=True)
class PerversityVerdict:
    perverse: bool
    failures: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.perverse

    def to_json(self) -> dict:
        return {"status": "perverse" if self.perverse else "not perverse", "failures": list(self.failures)}


def stalk_complex(f: FanComplex, cell: str) -> CochainComplex:
    return CochainComplex(
        {q: f.stalk(q, cell) for q in f.degrees},
        {q: f.diff(q, cell) for q in f.degrees if q + 1 in f.stalks},
    )


def check_perversity(f: FanComplex) -> PerversityVerdict:
    """Constructibility and the perversity conditions for the stratification {0}, D - {0}.

    Off the vertex: (a) degree-0 cohomology sheaf is locally constant (every
    ray-to-sector generalization is an isomorphism) and (b) all other
    cohomology sheaves vanish.  At the vertex: (c) stalk cohomology vanishes
    above degree 1 and (d) cohomology with support in the vertex vanishes
    below degree 1.
    """
    fan = f.fan
    out = []
    stalks = {c: stalk_complex(f, c) for c in fan.cells}
    for c in fan.rays + fan.sectors:
        for i, d in stalks[c].betti_numbers().items():
            if i != 0 and d:
                out.append(f"(b) H^{i} stalk at {c} has dimension {d}")
    for x in fan.incidences:
        if x.source == VERTEX:
            continue
        hs = stalks[x.source].cohomology(0)
        ht = stalks[x.target].cohomology(0)
        g = ht.coordinates(f.map(0, x.key) @ hs.representatives) if 0 in f.stalks else Matrix.zeros(ht.dim, hs.dim)
        if not is_invertible(g):
            out.append(f"(a) H^0 generalization {x.key} is not an isomorphism")
    for i, d in stalks[VERTEX].betti_numbers().items():
        if i > 1 and d:
            out.append(f"(c) H^{i} stalk at the vertex has dimension {d}")
    cone = support_cone(f, fan.cells, [VERTEX])
    for i, d in cone.dims().items():
        if i < 1 and d:
            out.append(f"(d) H^{i} with support in the vertex has dimension {d}")
    return PerversityVerdict(not out, tuple(out))
