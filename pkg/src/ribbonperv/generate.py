"""Seeded random valid corolla objects.

Objects are sampled on corolla(2), where (C3) is vacuous, and moved to
corolla(n) by the fan engine.  For a target with generic rank ``r`` and
vanishing-cycle dimension ``p`` the vertex space on corolla(n) has dimension
``p + (n - 1) r``, so both are drawn to keep every space within ``max_dim``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .exactlin import Matrix, inverse, is_invertible, rank
from .quiverrep import DoubleRep, corolla_object, direct_sum, skyscraper, validate_object

__all__ = ["GenerationError", "RunConfig", "random_invertible", "random_matrix", "random_object"]

_SEED_LIMIT = 2**64


class GenerationError(RuntimeError):
    """Rejection sampling gave up (should not happen over the rationals)."""


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    max_n: int = 5
    max_dim: int = 4
    trials: int = 100

    def __post_init__(self):
        if not -_SEED_LIMIT < self.seed < _SEED_LIMIT:
            raise ValueError("seed must fit in 64 bits")
        if self.max_n < 2:
            raise ValueError("max_n must be at least 2")
        if self.max_dim < 1:
            raise ValueError("max_dim must be at least 1")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")


def _rng(seed) -> random.Random:
    return seed if isinstance(seed, random.Random) else random.Random(seed)


def random_matrix(rng: random.Random, rows: int, cols: int, bound: int = 2) -> Matrix:
    return Matrix.from_flat(rows, cols, [rng.randint(-bound, bound) for _ in range(rows * cols)])


def random_invertible(rng: random.Random, d: int, bound: int = 2) -> Matrix:
    while True:
        m = random_matrix(rng, d, d, bound)
        if is_invertible(m):
            return m


def _injective(rng: random.Random, rows: int, cols: int) -> Matrix:
    while True:
        m = random_matrix(rng, rows, cols)
        if rank(m) == cols:
            return m


def _section_of(rng: random.Random, delta: Matrix) -> Matrix:
    """Random ``gamma`` with ``gamma delta = Id``: ``X + (Id - X delta) P`` for a left inverse ``P``."""
    r, e0 = delta.cols, delta.rows
    p = inverse(delta.T @ delta) @ delta.T
    x = random_matrix(rng, r, e0)
    return x + (Matrix.identity(r) - x @ delta) @ p


def _corolla2(rng: random.Random, e0: int, r: int, max_tries: int) -> DoubleRep:
    for _ in range(max_tries):
        d1, d2 = _injective(rng, e0, r), _injective(rng, e0, r)
        g1, g2 = _section_of(rng, d1), _section_of(rng, d2)
        if is_invertible(g2 @ d1) and is_invertible(g1 @ d2):
            return corolla_object([g1, g2], [d1, d2], vertex_dim=e0)
    raise GenerationError(f"no valid corolla(2) object after {max_tries} draws")


def _scramble(rng: random.Random, q: DoubleRep) -> DoubleRep:
    return q.conjugate({c: random_invertible(rng, q.dim(c)) for c in q.graph.cells})


def random_object(n: int, max_dim: int, seed=0, *, max_tries: int = 200) -> DoubleRep:
    """A valid object on corolla(n) with every space of dimension at most ``max_dim``.

    ``seed`` is anything :class:`random.Random` accepts, or a ``Random``.
    """
    from .fan import transport

    if n < 1:
        raise ValueError("n must be at least 1")
    if max_dim < 1:
        raise ValueError("max_dim must be at least 1")
    rng = _rng(seed)
    # E_0 of the result is (n - 1) r + vanishing, so both are capped by max_dim.
    # Leg-free objects and skyscraper summands are drawn only occasionally.
    r_max = max_dim // max(n - 1, 1)
    r = rng.randint(1, r_max) if r_max and rng.random() < 0.85 else 0
    vanishing = rng.randint(0 if r else 1, max_dim - (n - 1) * r)
    sky = rng.randint(1, vanishing) if vanishing and rng.random() < 0.25 else 0
    q = _corolla2(rng, r + vanishing - sky, r, max_tries)
    if sky:
        q = direct_sum(q, skyscraper(q.graph, sky))
    q = _scramble(rng, q)
    if n != 2:
        q = _scramble(rng, transport(q, n))
    if not validate_object(q):
        raise GenerationError("generated object failed validation")
    return q
