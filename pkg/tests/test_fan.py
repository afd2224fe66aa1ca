from __future__ import annotations

import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ribbonperv.exactlin import Matrix, char_poly, hstack
from ribbonperv.fan import (
    VERTEX,
    FanComplex,
    FanDecomposition,
    FanError,
    beta_one,
    beta_power,
    check_perversity,
    constant_sheaf,
    cousin_complex,
    cousin_identification,
    extract,
    global_sections,
    monodromy_endomorphism,
    refine,
    skeleton_rotation,
    support_cohomology,
    transport,
)
from ribbonperv.fan.support import support_cone
from ribbonperv.generate import random_object
from ribbonperv.quiverrep import (
    RepMorphism,
    corolla_object,
    fractional_monodromies,
    hom_basis,
    is_isomorphic,
    rotate,
    rotate_morphism,
    skyscraper,
    total_monodromy,
    validate_object,
)

seeds = st.integers(min_value=0, max_value=10**6)


def nonzero(dims: dict[int, int]) -> dict[int, int]:
    return {k: d for k, d in dims.items() if d}


def ones(n: int):
    one = [[1]]
    return corolla_object([one] * n, [one] * n)


class TestCells:
    def test_equidistant(self):
        f = FanDecomposition.equidistant(4)
        assert f.angles == (0, Fraction(1, 4), Fraction(1, 2), Fraction(3, 4))
        assert f.cells == ("v", "r0", "r1", "r2", "r3", "s0", "s1", "s2", "s3")

    def test_incidence_keys(self):
        f = FanDecomposition.equidistant(3)
        keys = set(f.incidence)
        assert {"v>r0", "v>s2", "r0>s0:ccw", "r0>s2:cw", "r1>s0:cw"} <= keys
        assert len(keys) == 4 * 3

    def test_star_and_open(self):
        f = FanDecomposition.equidistant(3)
        assert f.star("r1") == {"r1", "s1", "s0"}
        assert f.star("s0") == {"s0"}
        assert f.is_open(f.star("v"))
        assert not f.is_open({"r0"})
        with pytest.raises(FanError, match="not open"):
            f.check_region({"r0", "s0"})

    def test_between(self):
        f = FanDecomposition.equidistant(4)
        assert f.between(0, 2) == {"s0", "r1", "s1"}
        assert f.between(3, 1) == {"s3", "r0", "s0"}
        assert f.between(1, 1) == set(f.cells) - {"v", "r1"}

    @pytest.mark.parametrize("angles", [[], ["1"], ["1/2", "1/4"], ["0", "0"], ["x"]])
    def test_bad_angles(self, angles):
        with pytest.raises(FanError):
            FanDecomposition(tuple(angles))

    def test_json(self):
        f = FanDecomposition(("0", "1/3", "5/6"))
        assert f.to_json() == ["0", "1/3", "5/6"]
        assert FanDecomposition.from_json(f.to_json()) == f


class TestGlobalSections:
    @pytest.mark.parametrize("n", [1, 2, 5])
    def test_disk(self, n):
        assert global_sections(constant_sheaf(n)).dims == {0: 1, 1: 0, 2: 0}

    def test_open_sectors(self):
        f = constant_sheaf(4)
        assert global_sections(f, f.fan.sectors).dims[0] == 4

    @pytest.mark.parametrize("n", [1, 3])
    def test_punctured_disk_is_a_circle(self, n):
        f = constant_sheaf(n, dim=2)
        dims = global_sections(f, set(f.fan.cells) - {VERTEX}).dims
        assert dims[0] == 2 and dims[1] == 2 and dims.get(2, 0) == 0

    def test_shift(self):
        assert global_sections(constant_sheaf(3, degree=1)).dims == {1: 1, 2: 0, 3: 0}

    def test_cousin_of_skyscraper(self):
        assert nonzero(global_sections(cousin_complex(skyscraper(3, 2))).dims) == {1: 2}

    def test_not_open(self):
        with pytest.raises(FanError):
            global_sections(constant_sheaf(2), ["r0"])

    @settings(max_examples=10, deadline=None)
    @given(st.integers(2, 4), seeds)
    def test_refinement_invariance(self, n, seed):
        f = cousin_complex(random_object(n, 3, seed))
        g = refine(f, [a + Fraction(1, 3 * n) for a in f.fan.angles])
        assert g.fan.n == 2 * n
        assert not g.defects()
        assert global_sections(g).dims == global_sections(f).dims

    def test_empty_refinement(self):
        f = constant_sheaf(2)
        assert refine(f, []) is f

    def test_refine_rejects_existing_ray(self):
        with pytest.raises(FanError):
            refine(constant_sheaf(2), ["1/2"])


class TestFanComplex:
    def test_json_round_trip(self):
        f = cousin_complex(random_object(3, 3, 7))
        g = FanComplex.from_json(f.to_json())
        assert (g.fan, g.stalks, g.maps, g.diffs) == (f.fan, f.stalks, f.maps, f.diffs)
        assert g.to_json() == f.to_json()

    def test_defects_found(self):
        f = constant_sheaf(2)
        data = f.to_json()
        data["maps"]["0"]["r0>s0:ccw"] = [["2"]]
        with pytest.raises(FanError):
            FanComplex.from_json(data)

    @pytest.mark.parametrize(
        "data",
        [
            {},
            {"fan": ["0"], "stalks": {"0": {"v": "one"}}},
            {"fan": ["0", "1/2"], "stalks": {"0": {"q": 1}}},
            {"fan": ["0"], "stalks": {"0": {"v": 1}}, "maps": {"0": {"v>r0": [["1", "2"]]}}},
        ],
    )
    def test_malformed(self, data):
        with pytest.raises(FanError):
            FanComplex.from_json(data)


class TestCousin:
    def test_one_one_one(self):
        f = cousin_complex(ones(2))
        assert f.diff(0, VERTEX) == Matrix([[1, 1]])
        for r in f.fan.rays:
            assert f.diff(0, r) == Matrix([[1, 1]])
        assert fractional_monodromies(ones(2)) == [Matrix([[-1]])] * 2

    @settings(max_examples=10, deadline=None)
    @given(st.integers(2, 5), seeds)
    def test_shapes(self, n, seed):
        q = random_object(n, 3, seed)
        f = cousin_complex(q)
        assert not f.defects()
        ts = fractional_monodromies(q)
        for i in range(n):
            e_i, e_j = q.dim(str(i + 1)), q.dim(str((i - 1) % n + 1))
            assert f.stalk(0, f.fan.ray(i)) == e_i + e_j
            assert f.stalk(1, f.fan.ray(i)) == e_i
            d = f.diff(0, f.fan.ray(i))
            assert d == hstack([Matrix.identity(e_i), -ts[(i - 1) % n]])

    def test_needs_two_legs(self):
        with pytest.raises(FanError, match="transport"):
            cousin_complex(skyscraper(1, 1))

    def test_invalid_object_rejected(self):
        with pytest.raises(FanError, match="not valid"):
            cousin_complex(ones(3))


class TestSupportCohomology:
    @pytest.mark.parametrize("n", [2, 3, 5])
    def test_constant_sheaf(self, n):
        sc = support_cohomology(constant_sheaf(n))
        assert nonzero(sc.vertex) == {1: n - 1}
        assert all(nonzero(d) == {1: 1} for d in sc.rays.values())
        assert sc.pure

    def test_skyscraper(self):
        sc = support_cohomology(cousin_complex(skyscraper(3, 2)))
        assert nonzero(sc.vertex) == {1: 2}
        assert all(not nonzero(d) for d in sc.rays.values())

    @settings(max_examples=8, deadline=None)
    @given(st.integers(2, 4), seeds)
    def test_purity_on_every_skeleton(self, n, seed):
        f = cousin_complex(random_object(n, 3, seed))
        for size in range(1, n + 1):
            for sk in itertools.combinations(range(n), size):
                assert support_cohomology(f, sk).pure

    @settings(max_examples=10, deadline=None)
    @given(st.integers(2, 5), seeds)
    def test_calibration(self, n, seed):
        q = random_object(n, 3, seed)
        ts = fractional_monodromies(q)
        sc = support_cohomology(cousin_complex(q))
        for k, (ccw, cw) in sc.ray_components.items():
            assert ccw.is_identity()
            assert cw == -ts[(k - 1) % n]

    def test_empty_skeleton(self):
        with pytest.raises(FanError):
            support_cohomology(constant_sheaf(2), [])


class TestPerversity:
    @settings(max_examples=10, deadline=None)
    @given(st.integers(2, 5), seeds)
    def test_cousin_is_perverse(self, n, seed):
        assert check_perversity(cousin_complex(random_object(n, 3, seed)))

    def test_constant_sheaf_in_degree_zero(self):
        # stalks live in degree 0; cohomology supported at the vertex sits in degree 2
        assert check_perversity(constant_sheaf(3)).perverse
        assert support_cone(constant_sheaf(3), FanDecomposition.equidistant(3).cells, [VERTEX]).dims() == {0: 0, 1: 0, 2: 1}

    def test_constant_sheaf_in_degree_one(self):
        v = check_perversity(constant_sheaf(3, degree=1))
        assert not v
        assert any(x.startswith("(b)") for x in v.failures)

    def test_vanishing_monodromy_pieces(self):
        # gamma_2 delta_1 = 0: the ray stalks stop generalizing isomorphically
        q = corolla_object([[[1, 0]], [[0, 1]]], [[[1], [0]], [[0], [1]]])
        assert not validate_object(q)
        v = check_perversity(cousin_complex(q, check=False))
        assert not v
        assert any(x[:3] in ("(a)", "(b)") for x in v.failures)
        assert v.to_json()["status"] == "not perverse"

    def test_extract_refuses(self):
        with pytest.raises(FanError, match="not perverse"):
            extract(constant_sheaf(3, degree=1))


class TestExtraction:
    def test_constant_sheaf(self):
        q = extract(constant_sheaf(3)).rep
        assert q.dim("0") == 2
        assert [q.dim(h) for h in "123"] == [1, 1, 1]
        assert validate_object(q)

    def test_skyscraper(self):
        q = extract(cousin_complex(skyscraper(4, 3))).rep
        assert q.dim("0") == 3 and all(q.dim(str(i)) == 0 for i in range(1, 5))

    @settings(max_examples=10, deadline=None)
    @given(st.integers(2, 5), seeds)
    def test_round_trip_certificate(self, n, seed):
        q = random_object(n, 3, seed)
        ext = extract(cousin_complex(q))
        phi = cousin_identification(q, ext)
        assert phi.is_morphism() and phi.is_isomorphism()
        assert is_isomorphic(q, ext.rep)

    def test_sub_skeleton_of_constant_sheaf(self):
        q = extract(constant_sheaf(4), [0, 2]).rep
        assert q.dim("0") == 1 and q.dim("1") == q.dim("2") == 1


class TestTransport:
    @settings(max_examples=8, deadline=None)
    @given(st.integers(2, 4), seeds)
    def test_same_fan(self, n, seed):
        q = random_object(n, 3, seed)
        assert is_isomorphic(transport(q, n), q)

    def test_one_one_one_to_one_leg(self):
        t = transport(ones(2), 1)
        assert t.dim("0") == 0 and t.dim("1") == 1
        assert total_monodromy(t) == Matrix.identity(1)
        assert validate_object(t)

    @settings(max_examples=8, deadline=None)
    @given(st.integers(2, 4), st.integers(1, 5), seeds)
    def test_char_poly_invariant(self, n, m, seed):
        q = random_object(n, 3, seed)
        t = transport(q, m)
        assert validate_object(t)
        assert char_poly(total_monodromy(t)) == char_poly(total_monodromy(q))

    def test_uneven_angles(self):
        t = transport(random_object(3, 3, 2), ["0", "1/10", "1/2"])
        assert validate_object(t)
        assert len(t.graph.legs) == 3


class TestBeta:
    def test_skyscraper(self):
        b = beta_one(skyscraper(3, 2))
        assert b["0"] == Matrix.identity(2)

    @settings(max_examples=10, deadline=None)
    @given(st.integers(1, 5), seeds)
    def test_components(self, n, seed):
        q = random_object(n, 3, seed)
        b = beta_one(q)
        assert b.is_morphism() and b.is_isomorphism()
        assert [b[h] for h in q.graph.legs] == fractional_monodromies(q)

    @settings(max_examples=8, deadline=None)
    @given(st.integers(1, 4), seeds)
    def test_beta_n_is_central_monodromy(self, n, seed):
        q = random_object(n, 3, seed)
        t = monodromy_endomorphism(q)
        assert t.target == q
        for i, h in enumerate(q.graph.legs):
            assert t[h] == total_monodromy(q, start=i + 1)
        for f in hom_basis(q, q):
            assert t @ f == f @ t

    def test_power_zero(self):
        q = random_object(3, 2, 1)
        assert beta_power(q, 0) == RepMorphism.identity(q)
        with pytest.raises(ValueError):
            beta_power(q, -1)

    @settings(max_examples=6, deadline=None)
    @given(st.integers(2, 4), seeds)
    def test_rotation_equivariance(self, n, seed):
        q = random_object(n, 3, seed)
        assert rotate_morphism(beta_one(q), 1) == beta_one(rotate(q, 1))

    @pytest.mark.parametrize("seed", range(6))
    def test_one_leg_engine_matches_closed_form(self, seed):
        # a corolla(1) object read off a two-ray Cousin complex, rotated once around
        g = cousin_complex(random_object(2, 3, seed))
        x = extract(g, [0])
        full_turn = skeleton_rotation(g, [1], [0]) @ skeleton_rotation(g, [0], [1])
        assert full_turn == beta_one(x.rep)

    def test_rotation_rejects_non_interleaving(self):
        g = refine(cousin_complex(ones(2)), ["1/4", "3/4"])
        with pytest.raises(FanError, match="interleave"):
            skeleton_rotation(g, [0, 1], [2, 3])
