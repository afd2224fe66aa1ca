"""Bounded cochain complexes of finite-dimensional rational vector spaces."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

from .exactlin import (
    Matrix,
    block,
    column_space,
    complement_basis,
    hstack,
    kernel_matrix,
    rank,
    solve_unique,
)

__all__ = ["Cohomology", "CochainComplex", "ChainMap", "shifted_cone"]


@dataclass(frozen=True)
class Cohomology:
    """``H^k`` with explicit cocycle representatives.

    ``boundaries`` spans ``im d^{k-1}``; ``representatives`` completes it to a
    basis of ``ker d^k``.
    """

    degree: int
    boundaries: Matrix
    representatives: Matrix

    @property
    def dim(self) -> int:
        return self.representatives.cols

    @cached_property
    def _frame(self) -> Matrix:
        return hstack([self.boundaries, self.representatives])

    def coordinates(self, cocycles: Matrix) -> Matrix:
        """Express cocycle columns in the representative basis."""
        if self.dim == 0:
            return Matrix.zeros(0, cocycles.cols)
        x = solve_unique(self._frame, cocycles)
        nb = self.boundaries.cols
        return x.submatrix(range(nb, nb + self.dim), range(cocycles.cols))


@dataclass
class CochainComplex:
    """``dims[k]`` is ``dim C^k``; ``diffs[k]`` maps ``C^k -> C^{k+1}``."""

    dims: dict[int, int]
    diffs: dict[int, Matrix] = field(default_factory=dict)

    def dim(self, k: int) -> int:
        return self.dims.get(k, 0)

    def d(self, k: int) -> Matrix:
        m = self.diffs.get(k)
        if m is None:
            return Matrix.zeros(self.dim(k + 1), self.dim(k))
        return m

    @property
    def degrees(self) -> range:
        ks = [k for k, v in self.dims.items() if v]
        if not ks:
            return range(0)
        return range(min(ks), max(ks) + 1)

    def check(self) -> None:
        for k in self.degrees:
            d = self.d(k)
            if d.shape != (self.dim(k + 1), self.dim(k)):
                raise ValueError(f"differential in degree {k} has shape {d.shape}")
            if not (self.d(k + 1) @ d).is_zero():
                raise ValueError(f"d o d != 0 starting in degree {k}")

    def betti(self, k: int) -> int:
        return self.dim(k) - rank(self.d(k)) - rank(self.d(k - 1))

    def betti_numbers(self) -> dict[int, int]:
        return {k: self.betti(k) for k in self.degrees}

    def cohomology(self, k: int) -> Cohomology:
        cache = self.__dict__.setdefault("_h", {})
        if k not in cache:
            z = kernel_matrix(self.d(k))
            b = column_space(self.d(k - 1))
            cache[k] = Cohomology(k, b, complement_basis(b, z))
        return cache[k]


@dataclass
class ChainMap:
    source: CochainComplex
    target: CochainComplex
    maps: dict[int, Matrix]

    def at(self, k: int) -> Matrix:
        m = self.maps.get(k)
        if m is None:
            return Matrix.zeros(self.target.dim(k), self.source.dim(k))
        return m

    def induced(self, k: int) -> Matrix:
        """Matrix of ``H^k(source) -> H^k(target)`` in the chosen bases."""
        hs = self.source.cohomology(k)
        ht = self.target.cohomology(k)
        return ht.coordinates(self.at(k) @ hs.representatives)


def shifted_cone(phi: ChainMap) -> CochainComplex:
    """``Cone(phi)[-1]``: degree ``k`` is ``A^k + B^{k-1}``.

    ``d(a, b) = (d a, -phi(a) - d b)``.  With this sign the connecting map
    ``H^k(B) -> H^{k+1}`` sends ``[b]`` to ``[(0, b)]``; the round trip
    through the Cousin complex fixes the choice.
    """
    a, b = phi.source, phi.target
    ks = set(a.degrees) | {k + 1 for k in b.degrees}
    dims = {k: a.dim(k) + b.dim(k - 1) for k in ks}
    diffs = {}
    for k in ks:
        diffs[k] = block(
            [[a.d(k), None], [-phi.at(k), -b.d(k - 1)]],
            [a.dim(k + 1), b.dim(k)],
            [a.dim(k), b.dim(k - 1)],
        )
    return CochainComplex(dims, diffs)
