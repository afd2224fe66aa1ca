"""Reading corolla objects off perverse fan complexes, transport and rotation.

Over a skeleton ``K`` (the vertex and rays ``K_1 < ... < K_m``):

* ``E_0 = H^1_K(D)``;
* ``E_nu = H^0(U_nu)`` for the region ``U_nu`` strictly between ``K_nu`` and
  ``K_{nu+1}``, identified with ``H^1`` at ray ``K_nu`` by
  ``alpha_nu``: restrict to the sector just counterclockwise of the ray
  and apply the connecting map of its star;
* ``gamma_nu = alpha_nu^{-1} o`` (restriction ``H^1_K(D) -> H^1_{K_nu}(star)``);
* ``delta_nu`` = connecting map of ``H^0(D - K)``, restricted to ``U_nu``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from ..complexes import Cohomology
from ..exactlin import Matrix, NotInvertibleError, inverse, vstack
from ..quiverrep import (
    DoubleRep,
    RepMorphism,
    corolla_half_edges,
    corolla_object,
    fractional_monodromies,
    rotate,
    rotate_morphism,
    standardize_corolla,
)
from .cells import VERTEX, FanDecomposition, FanError
from .complex import FanComplex, cousin_complex, refine
from .nerve import NerveComplex
from .support import (
    SupportCone,
    check_perversity,
    h0,
    ray_cone,
    restrict_h0,
    sector_to_ray,
    skeleton_cells,
    support_cone,
    with_two_rays,
)

__all__ = [
    "EngineConsistencyError",
    "Extraction",
    "beta_one",
    "beta_power",
    "cousin_identification",
    "extract",
    "extract_quiver",
    "monodromy_endomorphism",
    "skeleton_rotation",
    "transport",
]


class EngineConsistencyError(RuntimeError):
    """An engine result failed its own exact verification."""


@dataclass(frozen=True, eq=False)
class Extraction:
    complex: FanComplex
    skeleton: tuple[int, ...]
    rep: DoubleRep
    cone: SupportCone
    sectors: tuple[frozenset[str], ...]

    @property
    def h1(self) -> Cohomology:
        return self.cone.h(1)

    def sector_h0(self, nu: int) -> tuple[NerveComplex, Cohomology]:
        return h0(self.complex, self.sectors[nu])


def extract(f: FanComplex, skeleton: Iterable[int] | None = None, *, check: bool = True) -> Extraction:
    """Full extraction record (see module docstring); cached per skeleton."""
    if skeleton is None:
        skeleton = range(f.fan.n)
    g, ks = with_two_rays(f, skeleton)
    if not ks:
        raise FanError("skeleton needs at least one ray")
    cache = g._cache.setdefault("extract", {})
    if ks in cache:
        return cache[ks]
    if check:
        verdict = check_perversity(g)
        if not verdict:
            raise FanError("complex is not perverse: " + "; ".join(verdict.failures))
    fan = g.fan
    cone = support_cone(g, fan.cells, skeleton_cells(g, ks))
    h1 = cone.h(1)
    m = len(ks)
    sectors, gammas, deltas = [], [], []
    for nu, k in enumerate(ks):
        region = fan.between(k, ks[(nu + 1) % m])
        sectors.append(region)
        a, h = h0(g, region)
        deltas.append(cone.connecting(cone.a_w.extension(a).at(0) @ h.representatives))
        alpha = sector_to_ray(g, k, "ccw") @ restrict_h0(g, region, [fan.ccw_sector(k)])
        try:
            alpha_inv = inverse(alpha)
        except NotInvertibleError:
            raise FanError(f"sections near ray {k} do not identify with its stalk") from None
        gammas.append(alpha_inv @ cone.map_to(ray_cone(g, k)).induced(1))
    rep = corolla_object(gammas, deltas, vertex_dim=h1.dim)
    out = Extraction(g, ks, rep, cone, tuple(sectors))
    cache[ks] = out
    return out


def extract_quiver(f: FanComplex, skeleton: Iterable[int] | None = None) -> DoubleRep:
    """Corolla object of a perverse complex over the given rays (default: all)."""
    return extract(f, skeleton).rep


def cousin_identification(q: DoubleRep, ext: Extraction) -> RepMorphism:
    """Canonical isomorphism ``q -> ext.rep`` when ``ext`` reads a (refined) Cousin complex
    of ``q`` over the original rays.

    A vertex vector ``e`` goes to the class of the global section
    ``c -> F^1(v -> c) e`` of the degree-1 term; a leg vector goes to the
    constant section over its sector.
    """
    q = standardize_corolla(q)
    g, fan = ext.complex, ext.complex.fan
    a_d = ext.cone.a_v
    e0 = q.dim("0")
    sigma = {(0, 1, c): (Matrix.identity(e0) if c == VERTEX else g.map(1, f"v>{c}")) for c in fan.cells}
    vec = a_d.vector(1, sigma) if e0 else Matrix.zeros(a_d.dim(1), 0)
    lift = Matrix.zeros(ext.cone.a_w.dim(0), e0)
    comps = {"0": ext.h1.coordinates(vstack([vec, lift]))}
    for nu, region in enumerate(ext.sectors):
        leg = str(nu + 1)
        d = q.dim(leg)
        a, h = ext.sector_h0(nu)
        for c in region:
            if g.stalk(0, c) != d:
                raise EngineConsistencyError("complex does not look like a refined Cousin complex")
        section = a.vector(0, {(0, 0, c): Matrix.identity(d) for c in region}) if d else Matrix.zeros(a.dim(0), 0)
        comps[leg] = h.coordinates(section)
    phi = RepMorphism(q, ext.rep, comps)
    if not (phi.is_morphism() and phi.is_isomorphism()):
        raise EngineConsistencyError("canonical identification failed verification")
    return phi


def _target_fan(target) -> FanDecomposition:
    if isinstance(target, FanDecomposition):
        return target
    if isinstance(target, int):
        return FanDecomposition.equidistant(target)
    return FanDecomposition(tuple(target))


def transport(q: DoubleRep, target) -> DoubleRep:
    """Re-express a corolla(n) object (n >= 2) over another fan.

    ``target`` is a ray count ``m`` (equidistant rays), a list of angles or a
    :class:`FanDecomposition`.  The Cousin complex on the equidistant fan is
    refined by the target rays and read off over them.
    """
    fan = _target_fan(target)
    f = cousin_complex(standardize_corolla(q))
    g = refine(f, [a for a in fan.angles if a not in f.fan.angles])
    return extract(g, [g.fan.ray_at(a) for a in fan.angles]).rep


def skeleton_rotation(f: FanComplex, k1: Sequence[int], k2: Sequence[int]) -> RepMorphism:
    """Isomorphism obtained by sliding skeleton ``k1`` counterclockwise onto ``k2``.

    Each ray of ``k1`` must be followed by exactly one ray of ``k2`` before
    the next ray of ``k1``.  The result goes from ``extract(f, k1).rep`` to
    ``rotate(extract(f, k2).rep, shift)`` so that leg ``nu`` lands on leg ``nu``.
    The vertex part passes through cohomology supported on the union of both
    skeletons and the thin sectors between them; legs go through the
    overlap of the two complementary sectors.
    """
    x1, x2 = extract(f, k1), extract(f, k2)
    g = x1.complex
    if x2.complex is not g:
        raise FanError("both skeletons must live on a fan with at least two rays")
    fan, n = g.fan, g.fan.n
    a, b = x1.skeleton, x2.skeleton
    m = len(a)
    if len(b) != m:
        raise FanError("skeletons have different sizes")
    succ = []
    for nu, k in enumerate(a):
        nxt = (a[(nu + 1) % m] - k) % n or n
        hits = [j for j, t in enumerate(b) if 0 < (t - k) % n < nxt]
        if len(hits) != 1:
            raise FanError("skeletons do not interleave")
        succ.append(hits[0])
    shift = succ[0]
    if any(s != (nu + shift) % m for nu, s in enumerate(succ)):
        raise FanError("skeletons do not interleave")
    overlaps = [fan.between(b[succ[nu]], a[(nu + 1) % m]) for nu in range(m)]
    w_cells = frozenset(fan.cells).difference(*overlaps)
    cone_w = support_cone(g, fan.cells, w_cells)
    phi = x1.cone.map_to(cone_w).induced(1)
    psi = x2.cone.map_to(cone_w).induced(1)
    try:
        vertex = inverse(psi) @ phi
    except NotInvertibleError:
        raise EngineConsistencyError("supports do not retract onto the skeleton") from None
    comps = {"0": vertex}
    for nu, k in enumerate(a):
        r1 = restrict_h0(g, x1.sectors[nu], overlaps[nu])
        r2 = restrict_h0(g, x2.sectors[succ[nu]], overlaps[nu])
        comps[str(nu + 1)] = inverse(r2) @ r1
    out = RepMorphism(x1.rep, rotate(x2.rep, shift), comps)
    if not out.is_morphism():
        raise EngineConsistencyError("skeleton rotation is not a morphism")
    return out


def _closed_form_beta(q: DoubleRep) -> dict[str, Matrix]:
    (h,) = corolla_half_edges(q)
    center = q.graph.vertex_ids[0]
    gd = q.gamma[h] @ q.delta[h]
    dg = q.delta[h] @ q.gamma[h]
    return {center: Matrix.identity(dg.rows) - dg, h: Matrix.identity(gd.rows) - gd}


def beta_one(q: DoubleRep) -> RepMorphism:
    """The natural isomorphism ``q -> rotate(q, 1)``.

    Leg components are the fractional monodromies.  For ``n >= 2`` the
    vertex component comes from rotating the skeleton of the Cousin complex
    by one sector in two half steps; for ``n = 1`` it is ``Id - delta gamma``.
    """
    hs = corolla_half_edges(q)
    n = len(hs)
    if n == 1:
        out = RepMorphism(q, rotate(q, 1), _closed_form_beta(q))
    else:
        std = standardize_corolla(q)
        f = cousin_complex(std)
        g = refine(f, [a + Fraction(1, 2 * n) for a in f.fan.angles])
        k = tuple(range(0, 2 * n, 2))
        k2 = tuple(range(1, 2 * n, 2))
        half1 = skeleton_rotation(g, k, k2)
        half2 = skeleton_rotation(g, k2, k)
        phi = cousin_identification(std, extract(g, k))
        b = rotate_morphism(phi, 1).inverse() @ (half2 @ half1) @ phi
        center = q.graph.vertex_ids[0]
        comps = {center: b["0"], **{h: b[str(i + 1)] for i, h in enumerate(hs)}}
        out = RepMorphism(q, rotate(q, 1), comps)
    if not (out.is_morphism() and out.is_isomorphism()):
        raise EngineConsistencyError("beta_1 failed verification")
    ts = fractional_monodromies(q)
    if any(out[h] != t for h, t in zip(hs, ts)):
        raise EngineConsistencyError("beta_1 leg components are not the fractional monodromies")
    return out


def beta_power(q: DoubleRep, k: int) -> RepMorphism:
    """``beta_k = rotate(beta_1, k-1) o ... o rotate(beta_1, 1) o beta_1`` for ``k >= 0``."""
    if k < 0:
        raise ValueError("beta_power needs k >= 0")
    b1 = beta_one(q)
    out = RepMorphism.identity(q)
    for j in range(k):
        out = rotate_morphism(b1, j) @ out
    return out


def monodromy_endomorphism(q: DoubleRep) -> RepMorphism:
    """``beta_n``: the total monodromy as an automorphism of ``q``."""
    return beta_power(q, len(corolla_half_edges(q)))
