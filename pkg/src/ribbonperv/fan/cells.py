"""Fan decompositions of the disk: the vertex, rays and open sectors.

Cells are named ``"v"``, ``"r{i}"`` and ``"s{i}"``; sector ``s{i}`` runs
counterclockwise from ray ``r{i}`` to ray ``r{i+1}``.  Incidences point from
a cell to a cell in its star (the generalization direction):

* ``v>r{i}`` and ``v>s{i}``,
* ``r{i}>s{i}:ccw`` (the sector counterclockwise of the ray),
* ``r{i}>s{i-1}:cw`` (the sector clockwise of it).

With a single ray both ray incidences land in ``s0``; the side tag keeps them
apart.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from ..exactlin import parse_scalar, scalar_str

__all__ = ["FanDecomposition", "FanError", "Incidence", "VERTEX"]

VERTEX = "v"


class FanError(ValueError):
    """Malformed fan, region or fan complex."""


@dataclass(frozen=True)
class Incidence:
    key: str
    source: str
    target: str


@dataclass(frozen=True)
class FanDecomposition:
    angles: tuple[Fraction, ...]

    def __post_init__(self):
        try:
            angles = tuple(parse_scalar(a) for a in self.angles)
        except (TypeError, ValueError) as exc:
            raise FanError(f"bad ray angle: {exc}") from None
        if not angles:
            raise FanError("a fan needs at least one ray")
        if any(not 0 <= a < 1 for a in angles):
            raise FanError("ray angles are turns in [0, 1)")
        if any(b <= a for a, b in zip(angles, angles[1:])):
            raise FanError("ray angles must be strictly increasing")
        object.__setattr__(self, "angles", angles)

    @classmethod
    def equidistant(cls, n: int) -> "FanDecomposition":
        """Rays at turns ``0, 1/n, ..., (n-1)/n``."""
        if n < 1:
            raise FanError("a fan needs at least one ray")
        return cls(tuple(Fraction(i, n) for i in range(n)))

    @property
    def n(self) -> int:
        return len(self.angles)

    @staticmethod
    def ray(i: int) -> str:
        return f"r{i}"

    @staticmethod
    def sector(i: int) -> str:
        return f"s{i}"

    def ray_at(self, angle) -> int:
        a = parse_scalar(angle)
        try:
            return self.angles.index(a)
        except ValueError:
            raise FanError(f"no ray at angle {scalar_str(a)}") from None

    @cached_property
    def rays(self) -> tuple[str, ...]:
        return tuple(self.ray(i) for i in range(self.n))

    @cached_property
    def sectors(self) -> tuple[str, ...]:
        return tuple(self.sector(i) for i in range(self.n))

    @cached_property
    def cells(self) -> tuple[str, ...]:
        return (VERTEX,) + self.rays + self.sectors

    @cached_property
    def incidences(self) -> tuple[Incidence, ...]:
        n = self.n
        out = [Incidence(f"v>r{i}", VERTEX, f"r{i}") for i in range(n)]
        out += [Incidence(f"v>s{i}", VERTEX, f"s{i}") for i in range(n)]
        for i in range(n):
            out.append(Incidence(f"r{i}>s{i}:ccw", f"r{i}", f"s{i}"))
            out.append(Incidence(f"r{i}>s{(i - 1) % n}:cw", f"r{i}", f"s{(i - 1) % n}"))
        return tuple(out)

    @cached_property
    def incidence(self) -> dict[str, Incidence]:
        return {f.key: f for f in self.incidences}

    @cached_property
    def composites(self) -> tuple[tuple[str, str, str], ...]:
        """Length-two chains ``(v>r, r>s, v>s)``: first, second, composite."""
        n = self.n
        out = []
        for i in range(n):
            out.append((f"v>r{i}", f"r{i}>s{i}:ccw", f"v>s{i}"))
            j = (i - 1) % n
            out.append((f"v>r{i}", f"r{i}>s{j}:cw", f"v>s{j}"))
        return tuple(out)

    def ccw_sector(self, i: int) -> str:
        return self.sector(i)

    def cw_sector(self, i: int) -> str:
        return self.sector((i - 1) % self.n)

    def star(self, cell: str) -> frozenset[str]:
        """Smallest open region containing ``cell``."""
        return frozenset([cell] + [f.target for f in self.incidences if f.source == cell])

    def is_open(self, region: Iterable[str]) -> bool:
        region = set(region)
        return all(f.target in region for f in self.incidences if f.source in region)

    def check_region(self, region: Iterable[str]) -> frozenset[str]:
        region = frozenset(region)
        unknown = region - set(self.cells)
        if unknown:
            raise FanError(f"unknown cells {sorted(unknown)}")
        if not self.is_open(region):
            raise FanError("region is not open (it must contain the star of each of its cells)")
        return region

    def between(self, i: int, j: int) -> frozenset[str]:
        """Open region strictly between ray ``i`` and the next ray ``j`` counterclockwise.

        ``i == j`` means the full turn: everything except the vertex and ``r{i}``.
        """
        n = self.n
        steps = (j - i) % n or n
        cells = [self.sector((i + k) % n) for k in range(steps)]
        cells += [self.ray((i + k) % n) for k in range(1, steps)]
        return frozenset(cells)

    def to_json(self) -> list[str]:
        return [scalar_str(a) for a in self.angles]

    @classmethod
    def from_json(cls, data: Sequence) -> "FanDecomposition":
        return cls(tuple(data))
