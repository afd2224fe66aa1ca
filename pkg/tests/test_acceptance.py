"""Acceptance criteria, one test each, with a PASS/FAIL line per criterion.

Run alone with ``pytest tests/test_acceptance.py -s`` or
``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import itertools
import random
import time
from functools import lru_cache

from ribbonperv.exactlin import Matrix, char_poly, inverse
from ribbonperv.fan import (
    beta_one,
    beta_power,
    constant_sheaf,
    cousin_complex,
    cousin_identification,
    extract,
    monodromy_endomorphism,
    support_cohomology,
    transport,
)
from ribbonperv.generate import random_invertible, random_matrix, random_object
from ribbonperv.quiverrep import (
    DoubleRep,
    Polarization,
    check_polarized,
    corolla_object,
    dual_object,
    fractional_monodromies,
    hom_basis,
    is_isomorphic,
    left_adjoint,
    right_adjoint,
    rotate_morphism,
    standardize_corolla,
    total_monodromy,
    validate_object,
)
from ribbonperv.ribbon import build_ribbon_graph, corolla, surface_invariants
from ribbonperv.suite import random_hom_element

from criteria import criterion
from oracles import char_poly_cofactor, face_count, to_rows

MAX_DIM = 4


@lru_cache(maxsize=None)
def objects(count: int, max_dim: int = MAX_DIM, tag: str = "accept") -> tuple[DoubleRep, ...]:
    """``count`` valid objects cycling through n = 2, 3, 4, 5."""
    return tuple(random_object(2 + i % 4, max_dim, f"{tag}/{i}") for i in range(count))


@criterion(1, "vanishing-cycles dimension law, constant sheaf, n = 2..8")
def test_criterion_1_vanishing_cycles():
    slowest = 0.0
    for n in range(2, 9):
        start = time.perf_counter()
        sc = support_cohomology(constant_sheaf(n))
        elapsed = time.perf_counter() - start
        slowest = max(slowest, elapsed)
        assert sc.vertex.get(1, 0) == n - 1, n
        assert sc.vertex.get(0, 0) == 0, n
        assert elapsed < 1.0, f"n = {n} took {elapsed:.2f}s"
    return f"slowest n took {slowest:.2f}s"


@criterion(2, "purity on every sub-skeleton, 100 objects")
def test_criterion_2_purity():
    start = time.perf_counter()
    skeletons = 0
    for q in objects(100):
        f = cousin_complex(q)
        n = f.fan.n
        for size in range(1, n + 1):
            for sk in itertools.combinations(range(n), size):
                sc = support_cohomology(f, sk)
                assert sc.pure, (q, sk, sc.vertex, sc.rays)
                skeletons += 1
    elapsed = time.perf_counter() - start
    assert elapsed < 60, f"took {elapsed:.1f}s"
    return f"{skeletons} skeletons"


@criterion(3, "calibration: stalk components (Id, -T)")
def test_criterion_3_calibration():
    for q in objects(100):
        ts = fractional_monodromies(q)
        n = len(ts)
        sc = support_cohomology(cousin_complex(q))
        for k, pair in sc.ray_components.items():
            assert pair is not None, (q, k)
            ccw, cw = pair
            assert ccw == Matrix.identity(ccw.rows)
            assert cw == -ts[(k - 1) % n]
    return "100 objects"


@criterion(4, "round trip with exact certificates, 100 objects")
def test_criterion_4_round_trip():
    quick = 0
    for i, q in enumerate(objects(100)):
        ext = extract(cousin_complex(q))
        phi = cousin_identification(q, ext)
        assert phi.is_morphism() and phi.is_isomorphism()
        res = is_isomorphic(q, ext.rep, trials=3, seed=i)
        if res:
            assert res.certificate.is_morphism() and res.certificate.is_isomorphism()
            quick += res.trials_used <= 3
    assert quick >= 99, f"only {quick} searches succeeded within 3 trials"
    return f"{quick}/100 searches within 3 trials"


@criterion(5, "duality commutes with extraction, 50 objects")
def test_criterion_5_duality():
    for i, q in enumerate(objects(50)):
        lhs = extract(cousin_complex(standardize_corolla(dual_object(q)))).rep
        rhs = standardize_corolla(dual_object(extract(cousin_complex(q)).rep))
        res = is_isomorphic(lhs, rhs, seed=i)
        assert res, (i, res.status)
        assert res.certificate.is_morphism() and res.certificate.is_isomorphism()
    return "50 objects"


@criterion(6, "transport n -> m keeps char_poly(T), 2 <= n, m <= 5")
def test_criterion_6_transport():
    pairs = 0
    for n in range(2, 6):
        for i in range(20):
            q = random_object(n, MAX_DIM, f"transport/{n}/{i}")
            # cofactor oracle on the source, library on the targets
            reference = char_poly_cofactor(to_rows(total_monodromy(q)))
            assert char_poly(total_monodromy(q)) == reference
            for m in range(2, 6):
                t = transport(q, m)
                assert validate_object(t)
                assert char_poly(total_monodromy(t)) == reference, (n, m, i)
                pairs += 1
            assert is_isomorphic(transport(q, n), q, seed=i)
    return f"{pairs} transports"


@criterion(7, "transport to one ray satisfies (C); (1;1,1) -> (0;1)")
def test_criterion_7_one_leg():
    for q in objects(40):
        t = transport(q, 1)
        v = validate_object(t)
        assert v, [str(x) for x in v.violations]
        assert char_poly(total_monodromy(t)) == char_poly(total_monodromy(q))
    one = [[1]]
    t = transport(corolla_object([one, one], [one, one]), 1)
    assert (t.dim("0"), t.dim("1")) == (0, 1)
    assert total_monodromy(t) == Matrix.identity(1)
    return "40 objects"


@criterion(8, "beta_1 verified, beta_n = T central, 50 naturality squares")
def test_criterion_8_beta():
    squares = 0
    for i in range(50):
        n = 1 + i % 5
        q = random_object(n, 3, f"beta/{i}")
        rng = random.Random(f"beta-square/{i}")
        b = beta_one(q)
        assert b.is_morphism() and b.is_isomorphism()
        assert [b[h] for h in q.graph.legs] == fractional_monodromies(q)
        t = monodromy_endomorphism(q)
        assert t == beta_power(q, n)
        for k, h in enumerate(q.graph.legs):
            assert t[h] == total_monodromy(q, start=k + 1)
        for f in hom_basis(q, q):
            assert t @ f == f @ t
        q2 = q.conjugate({c: random_invertible(rng, q.dim(c)) for c in q.graph.cells})
        f = random_hom_element(rng, q, q2)
        assert f.is_morphism()
        assert rotate_morphism(f, 1) @ b == beta_one(q2) @ f
        squares += 1
    assert squares == 50
    return f"{squares} squares"


@criterion(9, "ribbon invariants: corollas and two-loop roses")
def test_criterion_9_ribbon():
    for n in range(1, 9):
        s = surface_invariants(corolla(n))
        assert (s.genus, s.boundary_components) == (0, 1)
    pairs = [("a", "a'"), ("b", "b'")]
    expected = {("a", "b", "a'", "b'"): (1, 1), ("a", "a'", "b", "b'"): (0, 3)}
    for order, gb in expected.items():
        s = surface_invariants(build_ribbon_graph([("x", list(order))], pairs))
        b = face_count({"x": list(order)}, pairs)
        chi = 1 - 2
        assert (s.genus, s.boundary_components) == gb
        assert b == gb[1] and chi == 2 - 2 * gb[0] - b == s.euler_characteristic
    return None


def _unit(d: int, i: int) -> Matrix:
    return Matrix.column_vector([int(j == i) for j in range(d)])


@criterion(10, "polarization checks and adjoint identities")
def test_criterion_10_polarization():
    rng = random.Random("polarization")
    for i in range(20):
        q = random_object(2 + i % 4, 3, f"polar/{i}")
        # a delta = gamma^T object on the same graph and dimensions
        sym = DoubleRep(q.graph, q.dims, q.gamma, {h: m.T for h, m in q.gamma.items()})
        ident = Polarization.standard(sym)
        assert check_polarized(sym, ident, "left") and check_polarized(sym, ident, "right")
        h = next((h for h in q.graph.half_edges if sym.delta[h].rows * sym.delta[h].cols), None)
        if h is not None:
            bumped = dict(sym.delta)
            m = bumped[h].tolist()
            m[0][0] += 1
            bumped[h] = Matrix(m)
            off = DoubleRep(q.graph, q.dims, sym.gamma, bumped)
            assert not check_polarized(off, ident, "left")
            assert not check_polarized(off, ident, "right")
        # adjoint identities against random nonsymmetric forms, on all basis pairs
        for h, gamma in q.gamma.items():
            dv, de = gamma.cols, gamma.rows
            g, g2 = random_invertible(rng, dv), random_invertible(rng, de)
            lft, rgt = left_adjoint(gamma, g, g2), right_adjoint(gamma, g, g2)
            for a in range(dv):
                for b in range(de):
                    x, y = _unit(dv, a), _unit(de, b)
                    # <gamma x, y>' = <x, R y>   and   <y, gamma x>' = <L y, x>
                    assert (gamma @ x).T @ g2 @ y == x.T @ g @ (rgt @ y)
                    assert y.T @ g2 @ (gamma @ x) == (lft @ y).T @ g @ x
    return "20 objects"


if __name__ == "__main__":
    failures = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except Exception:
                failures += 1
    raise SystemExit(1 if failures else 0)
