"""Exact linear algebra over the rationals.

Scalars are :class:`fractions.Fraction`.  :class:`Matrix` is an immutable
wrapper around a FLINT ``fmpq_mat`` so row reduction stays fast for the
few-hundred-dimensional cochain complexes built by the fan engine.

Maps act on column vectors from the left, so ``g o f`` is ``G @ F``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

import flint

__all__ = [
    "Matrix",
    "assemble",
    "NotInvertibleError",
    "Solution",
    "block",
    "block_diag",
    "char_poly",
    "complement_basis",
    "hstack",
    "inverse",
    "is_invertible",
    "kernel_basis",
    "kernel_matrix",
    "kron",
    "parse_scalar",
    "rank",
    "rref",
    "scalar_str",
    "solve",
    "solve_unique",
    "vstack",
]


class NotInvertibleError(ValueError):
    """Raised when a singular or non-square matrix is inverted."""


def parse_scalar(value) -> Fraction:
    """Coerce an int, Fraction, FLINT rational or ``"p/q"`` string to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, flint.fmpq):
        return Fraction(int(value.p), int(value.q))
    if isinstance(value, flint.fmpz):
        return Fraction(int(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def scalar_str(value) -> str:
    """Canonical ``"p/q"`` form, with ``q`` omitted when it is 1."""
    x = parse_scalar(value)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def _fmpq(value) -> flint.fmpq:
    if isinstance(value, flint.fmpq):
        return value
    x = parse_scalar(value)
    return flint.fmpq(x.numerator, x.denominator)


def _to_fraction(q: flint.fmpq) -> Fraction:
    return Fraction(int(q.p), int(q.q))


class Matrix:
    """Immutable rows x cols matrix of exact rationals."""

    __slots__ = ("_m",)

    def __init__(self, rows: Sequence[Sequence] = (), shape: tuple[int, int] | None = None):
        rows = [list(r) for r in rows]
        if shape is None:
            if not rows:
                raise ValueError("shape is required for a matrix without rows")
            shape = (len(rows), len(rows[0]))
        r, c = shape
        if len(rows) != r or any(len(row) != c for row in rows):
            raise ValueError(f"entries do not match shape {shape}")
        flat = [_fmpq(x) for row in rows for x in row]
        self._m = flint.fmpq_mat(r, c, flat) if r * c else flint.fmpq_mat(r, c)

    @classmethod
    def _wrap(cls, m: flint.fmpq_mat) -> "Matrix":
        obj = cls.__new__(cls)
        obj._m = m
        return obj

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Matrix":
        return cls._wrap(flint.fmpq_mat(rows, cols))

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        m = flint.fmpq_mat(n, n)
        for i in range(n):
            m[i, i] = 1
        return cls._wrap(m)

    @classmethod
    def from_flat(cls, rows: int, cols: int, entries: Sequence) -> "Matrix":
        if len(entries) != rows * cols:
            raise ValueError("flat entry count does not match shape")
        if rows * cols == 0:
            return cls.zeros(rows, cols)
        return cls._wrap(flint.fmpq_mat(rows, cols, [_fmpq(x) for x in entries]))

    @classmethod
    def from_columns(cls, columns: Sequence["Matrix"], rows: int) -> "Matrix":
        """Stack column vectors (each ``rows x 1``) side by side."""
        if not columns:
            return cls.zeros(rows, 0)
        return hstack(columns)

    @classmethod
    def column_vector(cls, values: Sequence) -> "Matrix":
        return cls.from_flat(len(values), 1, list(values))

    @classmethod
    def scalar(cls, value) -> "Matrix":
        return cls.from_flat(1, 1, [value])

    # -- shape -----------------------------------------------------------

    @property
    def rows(self) -> int:
        return self._m.nrows()

    @property
    def cols(self) -> int:
        return self._m.ncols()

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    # -- access ----------------------------------------------------------

    def __getitem__(self, key) -> Fraction:
        i, j = key
        return _to_fraction(self._m[i, j])

    def tolist(self) -> list[list[Fraction]]:
        flat = [_to_fraction(x) for x in self._m.entries()]
        c = self.cols
        return [flat[i * c:(i + 1) * c] for i in range(self.rows)]

    def flat(self) -> list:
        """Row-major FLINT entries (internal fast path)."""
        return self._m.entries()

    def column(self, j: int) -> "Matrix":
        return self.submatrix(range(self.rows), [j])

    def columns(self) -> list["Matrix"]:
        return [self.column(j) for j in range(self.cols)]

    def submatrix(self, rows: Iterable[int], cols: Iterable[int]) -> "Matrix":
        rows, cols = list(rows), list(cols)
        if not rows or not cols:
            return Matrix.zeros(len(rows), len(cols))
        src = self._m.entries()
        c = self.cols
        return Matrix._wrap(
            flint.fmpq_mat(len(rows), len(cols), [src[i * c + j] for i in rows for j in cols])
        )

    # -- algebra ---------------------------------------------------------

    @property
    def T(self) -> "Matrix":
        return Matrix._wrap(self._m.transpose())

    def transpose(self) -> "Matrix":
        return self.T

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if not isinstance(other, Matrix):
            return NotImplemented
        if self.cols != other.rows:
            raise ValueError(f"cannot compose {self.shape} with {other.shape}")
        return Matrix._wrap(self._m * other._m)

    def __add__(self, other: "Matrix") -> "Matrix":
        if not isinstance(other, Matrix):
            return NotImplemented
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        return Matrix._wrap(self._m + other._m)

    def __sub__(self, other: "Matrix") -> "Matrix":
        if not isinstance(other, Matrix):
            return NotImplemented
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        return Matrix._wrap(self._m - other._m)

    def __neg__(self) -> "Matrix":
        return Matrix._wrap(-self._m)

    def __mul__(self, scalar) -> "Matrix":
        if isinstance(scalar, Matrix):
            return NotImplemented
        return Matrix._wrap(self._m * _fmpq(scalar))

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return all(x == 0 for x in self._m.entries())

    def is_identity(self) -> bool:
        return self.is_square and self == Matrix.identity(self.rows)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self._m == other._m

    def __hash__(self) -> int:
        return hash((self.shape, tuple(str(x) for x in self._m.entries())))

    def __repr__(self) -> str:
        body = ", ".join("[" + ", ".join(scalar_str(x) for x in row) + "]" for row in self.tolist())
        return f"Matrix([{body}], shape={self.shape})"

    # -- serialization ---------------------------------------------------

    def to_json(self) -> list[list[str]]:
        return [[scalar_str(x) for x in row] for row in self.tolist()]

    @classmethod
    def from_json(cls, data, shape: tuple[int, int] | None = None) -> "Matrix":
        """Parse nested row arrays; ``shape`` disambiguates empty matrices."""
        rows = [list(r) for r in data]
        if shape is None:
            if not rows:
                raise ValueError("empty matrix needs an explicit shape")
            shape = (len(rows), len(rows[0]))
        if shape[0] * shape[1] == 0:
            if any(len(r) for r in rows) or (rows and len(rows) != shape[0]):
                raise ValueError(f"entries do not match shape {shape}")
            return cls.zeros(*shape)
        return cls(rows, shape)


# -- stacking helpers ------------------------------------------------------


def hstack(blocks: Sequence[Matrix]) -> Matrix:
    if not blocks:
        raise ValueError("nothing to stack")
    r = blocks[0].rows
    if any(b.rows != r for b in blocks):
        raise ValueError("hstack needs equal row counts")
    c = sum(b.cols for b in blocks)
    if r * c == 0:
        return Matrix.zeros(r, c)
    flats = [(b.flat(), b.cols) for b in blocks]
    out = []
    for i in range(r):
        for f, bc in flats:
            out.extend(f[i * bc:(i + 1) * bc])
    return Matrix._wrap(flint.fmpq_mat(r, c, out))


def vstack(blocks: Sequence[Matrix]) -> Matrix:
    if not blocks:
        raise ValueError("nothing to stack")
    c = blocks[0].cols
    if any(b.cols != c for b in blocks):
        raise ValueError("vstack needs equal column counts")
    r = sum(b.rows for b in blocks)
    if r * c == 0:
        return Matrix.zeros(r, c)
    out = []
    for b in blocks:
        out.extend(b.flat())
    return Matrix._wrap(flint.fmpq_mat(r, c, out))


def block(grid: Sequence[Sequence[Matrix | None]], row_sizes: Sequence[int], col_sizes: Sequence[int]) -> Matrix:
    """Assemble a block matrix; ``None`` entries are zero blocks."""
    rows = []
    for i, grid_row in enumerate(grid):
        parts = []
        for j, b in enumerate(grid_row):
            if b is None:
                b = Matrix.zeros(row_sizes[i], col_sizes[j])
            elif b.shape != (row_sizes[i], col_sizes[j]):
                raise ValueError(f"block ({i},{j}) has shape {b.shape}")
            parts.append(b)
        rows.append(hstack(parts) if parts else Matrix.zeros(row_sizes[i], 0))
    if not rows:
        return Matrix.zeros(0, sum(col_sizes))
    return vstack(rows)


def assemble(rows: int, cols: int, pieces: Iterable[tuple[int, int, Matrix]]) -> Matrix:
    """Zero ``rows x cols`` matrix plus each block added at its ``(row, col)`` offset."""
    out = flint.fmpq_mat(rows, cols)
    for r0, c0, b in pieces:
        br, bc = b.shape
        if br * bc == 0:
            continue
        f = b._m.entries()
        for i in range(br):
            for j in range(bc):
                x = f[i * bc + j]
                if x != 0:
                    out[r0 + i, c0 + j] += x
    return Matrix._wrap(out)


def block_diag(blocks: Sequence[Matrix]) -> Matrix:
    rs = [b.rows for b in blocks]
    cs = [b.cols for b in blocks]
    grid = [[b if i == j else None for j in range(len(blocks))] for i, b in enumerate(blocks)]
    return block(grid, rs, cs)


def kron(a: Matrix, b: Matrix) -> Matrix:
    ar, ac = a.shape
    br, bc = b.shape
    fa, fb = a.flat(), b.flat()
    out = [flint.fmpq(0)] * (ar * br * ac * bc)
    width = ac * bc
    for i in range(ar):
        for j in range(ac):
            x = fa[i * ac + j]
            if x == 0:
                continue
            for k in range(br):
                row = (i * br + k) * width + j * bc
                for m in range(bc):
                    y = fb[k * bc + m]
                    if y != 0:
                        out[row + m] = x * y
    return Matrix.from_flat(ar * br, ac * bc, out)


# -- row reduction -----------------------------------------------------------


def rref(m: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and the list of pivot columns."""
    if m.rows * m.cols == 0:
        return m, []
    r, rk = m._m.rref()
    flat = r.entries()
    c = m.cols
    pivots = []
    for i in range(rk):
        row = flat[i * c:(i + 1) * c]
        pivots.append(next(j for j, x in enumerate(row) if x != 0))
    return Matrix._wrap(r), pivots


def rank(m: Matrix) -> int:
    if m.rows * m.cols == 0:
        return 0
    return m._m.rank()


def kernel_matrix(m: Matrix) -> Matrix:
    """Columns form the canonical (rref-derived) basis of ``ker m``."""
    n = m.cols
    r, pivots = rref(m)
    free = [j for j in range(n) if j not in set(pivots)]
    if not free:
        return Matrix.zeros(n, 0)
    flat = r.flat()
    out = [flint.fmpq(0)] * (n * len(free))
    for k, j in enumerate(free):
        out[j * len(free) + k] = flint.fmpq(1)
        for i, p in enumerate(pivots):
            out[p * len(free) + k] = -flat[i * n + j]
    return Matrix.from_flat(n, len(free), out)


def kernel_basis(m: Matrix) -> list[Matrix]:
    """Canonical basis of ``ker m`` as a list of column vectors."""
    return kernel_matrix(m).columns()


def column_space(m: Matrix) -> Matrix:
    """Independent columns of ``m`` spanning its image (pivot columns)."""
    _, pivots = rref(m)
    return m.submatrix(range(m.rows), pivots)


def complement_basis(sub: Matrix, ambient: Matrix) -> Matrix:
    """Columns of ``ambient`` extending the span of ``sub`` to span both.

    Used to pick cohomology representatives: ``sub`` spans the boundaries and
    ``ambient`` the cocycles.
    """
    both = hstack([sub, ambient])
    _, pivots = rref(both)
    picked = [p - sub.cols for p in pivots if p >= sub.cols]
    return ambient.submatrix(range(ambient.rows), picked)


@dataclass(frozen=True)
class Solution:
    particular: Matrix
    kernel: list[Matrix]


def solve(a: Matrix, b: Matrix) -> Solution | None:
    """All solutions of ``a x = b`` for a column ``b``; ``None`` if inconsistent."""
    if b.rows != a.rows:
        raise ValueError("right-hand side length must equal the row count")
    n = a.cols
    r, pivots = rref(hstack([a, b]))
    if n in pivots:
        return None
    flat = r.flat()
    x = [flint.fmpq(0)] * n
    for i, p in enumerate(pivots):
        x[p] = flat[i * (n + 1) + n]
    return Solution(Matrix.from_flat(n, 1, x), kernel_basis(a))


def solve_unique(a: Matrix, b: Matrix) -> Matrix:
    """The unique ``x`` with ``a x = b`` (``a`` injective); raises if none."""
    n = a.cols
    if rank(a) != n:
        raise ValueError("solve_unique needs a matrix of full column rank")
    if b.cols == 0 or n == 0:
        if n == 0 and not b.is_zero():
            raise ValueError("system has no solution")
        return Matrix.zeros(n, b.cols)
    r, pivots = rref(hstack([a, b]))
    if any(p >= n for p in pivots):
        raise ValueError("system has no solution")
    return r.submatrix(range(n), range(n, n + b.cols))


def is_invertible(m: Matrix) -> bool:
    return m.is_square and rank(m) == m.rows


def inverse(m: Matrix) -> Matrix:
    if not m.is_square:
        raise NotInvertibleError(f"non-square matrix {m.shape} is not invertible")
    if m.rows == 0:
        return m
    try:
        return Matrix._wrap(m._m.inv())
    except ZeroDivisionError:
        raise NotInvertibleError("matrix is singular") from None


def det(m: Matrix) -> Fraction:
    if not m.is_square:
        raise ValueError("determinant of a non-square matrix")
    if m.rows == 0:
        return Fraction(1)
    return _to_fraction(m._m.det())


def char_poly(m: Matrix) -> list[Fraction]:
    """Monic characteristic polynomial ``det(x I - m)``, highest degree first."""
    if not m.is_square:
        raise ValueError(f"characteristic polynomial of non-square {m.shape}")
    if m.rows == 0:
        return [Fraction(1)]
    coeffs = [_to_fraction(c) for c in m._m.charpoly().coeffs()]
    coeffs += [Fraction(0)] * (m.rows + 1 - len(coeffs))
    return coeffs[::-1]
