from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ribbonperv.exactlin import (
    Matrix,
    NotInvertibleError,
    assemble,
    block,
    char_poly,
    inverse,
    is_invertible,
    kernel_basis,
    kron,
    parse_scalar,
    rank,
    scalar_str,
    solve,
)

from oracles import apply, char_poly_cofactor, det, rank as oracle_rank, to_rows

small = st.integers(min_value=-4, max_value=4)


@st.composite
def matrices(draw, max_rows=5, max_cols=5, rows=None, cols=None):
    r = rows if rows is not None else draw(st.integers(0, max_rows))
    c = cols if cols is not None else draw(st.integers(0, max_cols))
    entries = draw(st.lists(small, min_size=r * c, max_size=r * c))
    return Matrix.from_flat(r, c, entries)


def spans_equal(a: list[Matrix], b: list[Matrix], n: int) -> bool:
    """Mutual containment of spans, via ranks."""
    ra = oracle_rank([[v[i, 0] for v in a] for i in range(n)]) if a else 0
    rb = oracle_rank([[v[i, 0] for v in b] for i in range(n)]) if b else 0
    both = a + b
    rab = oracle_rank([[v[i, 0] for v in both] for i in range(n)]) if both else 0
    return ra == rb == rab


class TestScalars:
    def test_parse_and_print(self):
        assert parse_scalar("3/6") == Fraction(1, 2)
        assert scalar_str(Fraction(4, 2)) == "2"
        assert scalar_str("-2/4") == "-1/2"

    def test_rejects_bool(self):
        with pytest.raises(TypeError):
            parse_scalar(True)


class TestRank:
    def test_identity(self):
        assert rank(Matrix.identity(2)) == 2

    def test_dependent_rows(self):
        m = Matrix([[1, 2], [2, 4]])
        assert rank(m) == oracle_rank([[1, 2], [2, 4]]) == 1

    def test_zero(self):
        assert rank(Matrix.zeros(3, 2)) == 0

    @given(matrices())
    def test_matches_oracle(self, m):
        assert rank(m) == oracle_rank(m)


class TestKernel:
    def test_identity_has_trivial_kernel(self):
        assert kernel_basis(Matrix.identity(2)) == []

    def test_rank_one(self):
        m = Matrix([[1, 2], [2, 4]])
        ker = kernel_basis(m)
        assert len(ker) == 1
        assert (m @ ker[0]).is_zero()
        assert spans_equal(ker, [Matrix([[2], [-1]])], 2)

    def test_tall_full_rank(self):
        assert kernel_basis(Matrix([[1, 0], [0, 1], [1, 1]])) == []

    @given(matrices())
    def test_rank_nullity(self, m):
        ker = kernel_basis(m)
        assert rank(m) + len(ker) == m.cols
        for v in ker:
            assert (m @ v).is_zero()
        if ker:
            assert oracle_rank([[v[i, 0] for v in ker] for i in range(m.cols)]) == len(ker)


class TestSolve:
    def test_identity(self):
        sol = solve(Matrix.identity(2), Matrix([[3], [5]]))
        assert sol.particular == Matrix([[3], [5]])
        assert sol.kernel == []

    def test_underdetermined(self):
        a = Matrix([[1, 2], [2, 4]])
        sol = solve(a, Matrix([[1], [2]]))
        assert sol.particular == Matrix([[1], [0]])
        assert a @ sol.particular == Matrix([[1], [2]])
        assert spans_equal(sol.kernel, [Matrix([[2], [-1]])], 2)

    def test_inconsistent(self):
        assert solve(Matrix([[1], [1]]), Matrix([[0], [1]])) is None

    @given(matrices(), st.data())
    def test_substitution(self, a, data):
        x = data.draw(matrices(rows=a.cols, cols=1))
        b = a @ x
        sol = solve(a, b)
        assert sol is not None
        assert apply(a, [sol.particular[i, 0] for i in range(a.cols)]) == [b[i, 0] for i in range(a.rows)]


class TestInverse:
    def test_identity(self):
        assert inverse(Matrix.identity(3)) == Matrix.identity(3)

    def test_unipotent(self):
        m = Matrix([[1, 1], [0, 1]])
        inv = inverse(m)
        assert inv == Matrix([[1, -1], [0, 1]])
        assert m @ inv == Matrix.identity(2) == inv @ m

    def test_singular(self):
        with pytest.raises(NotInvertibleError):
            inverse(Matrix([[1, 2], [2, 4]]))

    def test_empty_is_invertible(self):
        assert is_invertible(Matrix.zeros(0, 0))

    @given(matrices(rows=3, cols=3))
    def test_inverse_when_det_nonzero(self, m):
        if det(m) == 0:
            assert not is_invertible(m)
        else:
            inv = inverse(m)
            assert m @ inv == Matrix.identity(3)
            assert inv @ m == Matrix.identity(3)


class TestCharPoly:
    def test_scalar(self):
        assert char_poly(Matrix([[7]])) == [1, -7]

    def test_identity(self):
        assert char_poly(Matrix.identity(2)) == [1, -2, 1]

    def test_rotation(self):
        m = Matrix([[0, -1], [1, 0]])
        assert char_poly(m) == char_poly_cofactor(m) == [1, 0, 1]

    def test_nonsquare(self):
        with pytest.raises(ValueError):
            char_poly(Matrix.zeros(2, 3))

    @given(st.integers(1, 4).flatmap(lambda n: matrices(rows=n, cols=n)))
    def test_matches_cofactor_oracle(self, m):
        assert char_poly(m) == char_poly_cofactor(m)

    @settings(max_examples=40)
    @given(st.integers(1, 4).flatmap(lambda n: st.tuples(matrices(rows=n, cols=n), matrices(rows=n, cols=n))))
    def test_similarity_invariant(self, pair):
        m, p = pair
        if not is_invertible(p):
            return
        assert char_poly(p @ m @ inverse(p)) == char_poly(m)


class TestAssembly:
    def test_block_and_kron(self):
        a = Matrix([[1, 2]])
        b = Matrix([[0, 1], [1, 0]])
        k = kron(a, b)
        assert to_rows(k) == [[0, 1, 0, 2], [1, 0, 2, 0]]
        m = block([[a, None], [None, b]], [1, 2], [2, 2])
        assert m.shape == (3, 4)
        assert m[0, 1] == 2 and m[2, 2] == 1 and m[0, 3] == 0

    def test_assemble_adds_overlaps(self):
        m = assemble(2, 2, [(0, 0, Matrix.identity(2)), (0, 0, Matrix([[1]]))])
        assert to_rows(m) == [[2, 0], [0, 1]]

    def test_json_round_trip(self):
        m = Matrix([[Fraction(1, 2), -3]])
        assert m.to_json() == [["1/2", "-3"]]
        assert Matrix.from_json(m.to_json()) == m
        assert Matrix.from_json([], (0, 3)).shape == (0, 3)
