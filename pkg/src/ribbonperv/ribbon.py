"""Ribbon graphs as half-edge combinatorial maps.

A graph is a set of half-edges, a cyclic order of the half-edges around each
vertex, and a partial fixed-point-free involution pairing half-edges into
edges.  Unpaired half-edges are legs: edges with a free end.  Loops, legs,
1-valent and 2-valent vertices are all allowed.

Cell ids: a vertex keeps its own id, a leg is named after its half-edge and a
paired edge after the first half-edge listed in its pair.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

__all__ = [
    "CellHom",
    "RibbonGraph",
    "RibbonGraphError",
    "SurfaceInvariants",
    "build_ribbon_graph",
    "cell_homs",
    "corolla",
    "surface_invariants",
]


class RibbonGraphError(ValueError):
    """Malformed ribbon graph input; ``problems`` lists every defect found."""

    def __init__(self, problems: Sequence[str]):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


@dataclass(frozen=True)
class CellHom:
    """A morphism ``source -> target`` of the cell category, witnessed by a half-edge."""

    source: str
    target: str
    witness: str


@dataclass(frozen=True)
class SurfaceInvariants:
    euler_characteristic: int
    boundary_components: int
    genus: int


@dataclass(frozen=True)
class RibbonGraph:
    vertices: tuple[tuple[str, tuple[str, ...]], ...]
    pairs: tuple[tuple[str, str], ...]
    legs: tuple[str, ...]
    _index: dict = field(default=None, compare=False, repr=False, hash=False)

    def __post_init__(self):
        problems = []
        seen: dict[str, str] = {}
        vids = [v for v, _ in self.vertices]
        if len(set(vids)) != len(vids):
            problems.append("duplicate vertex ids")
        for v, cycle in self.vertices:
            for h in cycle:
                if h in seen:
                    problems.append(f"half-edge {h!r} appears in cycles of {seen[h]!r} and {v!r}")
                seen[h] = v
        partner: dict[str, str] = {}
        for a, b in self.pairs:
            if a == b:
                problems.append(f"pairing has fixed point {a!r}")
                continue
            for h, other in ((a, b), (b, a)):
                if h in partner:
                    problems.append(f"half-edge {h!r} is paired twice")
                partner[h] = other
        for h in self.legs:
            if h in partner:
                problems.append(f"half-edge {h!r} is both a leg and paired")
        mentioned = set(partner) | set(self.legs)
        for h in sorted(mentioned - set(seen)):
            problems.append(f"half-edge {h!r} is not in any vertex cycle")
        for h in sorted(set(seen) - mentioned):
            problems.append(f"half-edge {h!r} is neither paired nor a leg")
        if len(self.legs) != len(set(self.legs)):
            problems.append("duplicate legs")
        edge_ids = [a for a, _ in self.pairs] + list(self.legs)
        clash = set(edge_ids) & set(vids)
        if clash:
            problems.append(f"ids used for both a vertex and an edge: {sorted(clash)}")
        if problems:
            raise RibbonGraphError(problems)

        succ, vert = {}, {}
        for v, cycle in self.vertices:
            for i, h in enumerate(cycle):
                succ[h] = cycle[(i + 1) % len(cycle)]
                vert[h] = v
        edge_of = {h: h for h in self.legs}
        for a, b in self.pairs:
            edge_of[a] = edge_of[b] = a
        index = {"succ": succ, "vertex": vert, "partner": partner, "edge": edge_of}
        object.__setattr__(self, "_index", index)

    # -- basic structure --------------------------------------------------

    @cached_property
    def vertex_ids(self) -> tuple[str, ...]:
        return tuple(v for v, _ in self.vertices)

    @cached_property
    def edges(self) -> dict[str, tuple[str, ...]]:
        """Edge id -> its half-edges (one for a leg, two for a pair)."""
        out = {a: (a, b) for a, b in self.pairs}
        out.update({h: (h,) for h in self.legs})
        return out

    @property
    def edge_ids(self) -> tuple[str, ...]:
        return tuple(self.edges)

    @property
    def cells(self) -> tuple[str, ...]:
        return self.vertex_ids + self.edge_ids

    @property
    def half_edges(self) -> tuple[str, ...]:
        return tuple(h for _, cycle in self.vertices for h in cycle)

    def cycle(self, v: str) -> tuple[str, ...]:
        return dict(self.vertices)[v]

    def valency(self, v: str) -> int:
        return len(self.cycle(v))

    def succ(self, h: str) -> str:
        """Cyclic successor of ``h`` around its vertex."""
        return self._index["succ"][h]

    def vertex_of(self, h: str) -> str:
        return self._index["vertex"][h]

    def edge_of(self, h: str) -> str:
        return self._index["edge"][h]

    def partner(self, h: str) -> str | None:
        return self._index["partner"].get(h)

    def is_vertex(self, cell: str) -> bool:
        return cell in self.vertex_ids

    @property
    def is_corolla(self) -> bool:
        """One vertex, every half-edge a leg."""
        return len(self.vertices) == 1 and not self.pairs and len(self.legs) >= 1

    def mirror(self) -> "RibbonGraph":
        """Same graph with every cyclic order reversed (opposite orientation)."""
        verts = tuple((v, (c[:1] + tuple(reversed(c[1:]))) if c else c) for v, c in self.vertices)
        return RibbonGraph(verts, self.pairs, self.legs)

    def relabel(self, mapping: Mapping[str, str]) -> "RibbonGraph":
        """Rename half-edges (edge ids follow their half-edges)."""
        m = lambda h: mapping.get(h, h)  # noqa: E731
        return RibbonGraph(
            tuple((v, tuple(m(h) for h in c)) for v, c in self.vertices),
            tuple((m(a), m(b)) for a, b in self.pairs),
            tuple(m(h) for h in self.legs),
        )

    # -- connectivity and surfaces -----------------------------------------

    def components(self) -> list["RibbonGraph"]:
        parent = {v: v for v in self.vertex_ids}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in self.pairs:
            ra, rb = find(self.vertex_of(a)), find(self.vertex_of(b))
            parent[ra] = rb
        groups: dict[str, list[str]] = {}
        for v in self.vertex_ids:
            groups.setdefault(find(v), []).append(v)
        out = []
        for members in groups.values():
            keep = set(members)
            verts = tuple((v, c) for v, c in self.vertices if v in keep)
            hs = {h for _, c in verts for h in c}
            out.append(
                RibbonGraph(
                    verts,
                    tuple(p for p in self.pairs if p[0] in hs),
                    tuple(h for h in self.legs if h in hs),
                )
            )
        return out

    def boundary_cycles(self) -> list[tuple[str, ...]]:
        """Face-tracing walks: next half-edge is the cyclic successor of the partner.

        A leg is its own partner, so the walk turns around at its free end.
        """
        seen = set()
        cycles = []
        for h0 in self.half_edges:
            if h0 in seen:
                continue
            walk = []
            h = h0
            while h not in seen:
                seen.add(h)
                walk.append(h)
                p = self.partner(h)
                h = self.succ(h if p is None else p)
            cycles.append(tuple(walk))
        return cycles

    # -- serialization ---------------------------------------------------

    def to_json(self) -> dict:
        return {
            "vertices": [{"id": v, "cycle": list(c)} for v, c in self.vertices],
            "pairs": [list(p) for p in self.pairs],
            "legs": list(self.legs),
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "RibbonGraph":
        try:
            verts = [(str(v["id"]), [str(h) for h in v.get("cycle", [])]) for v in data["vertices"]]
            pairs = [tuple(str(h) for h in p) for p in data.get("pairs", [])]
            legs = [str(h) for h in data.get("legs", [])]
        except (KeyError, TypeError) as exc:
            raise RibbonGraphError([f"malformed graph JSON: {exc}"]) from None
        if any(len(p) != 2 for p in pairs):
            raise RibbonGraphError(["every pair must list exactly two half-edges"])
        return build_ribbon_graph(verts, pairs, legs)


def build_ribbon_graph(
    vertices: Iterable[tuple[str, Sequence[str]]],
    pairs: Iterable[Sequence[str]] = (),
    legs: Iterable[str] | None = None,
) -> RibbonGraph:
    """Validate and build a ribbon graph.

    ``legs`` defaults to every half-edge not mentioned in ``pairs``.
    """
    verts = tuple((str(v), tuple(str(h) for h in cycle)) for v, cycle in vertices)
    prs = tuple((str(p[0]), str(p[1])) for p in pairs)
    if legs is None:
        paired = {h for p in prs for h in p}
        legs = [h for _, c in verts for h in c if h not in paired]
    return RibbonGraph(verts, prs, tuple(str(h) for h in legs))


def corolla(n: int) -> RibbonGraph:
    """Star with vertex ``"0"`` and legs ``"1"..."n"`` in counterclockwise order."""
    if n < 1:
        raise RibbonGraphError([f"a corolla needs at least one leg, got n={n}"])
    hs = tuple(str(i) for i in range(1, n + 1))
    return RibbonGraph((("0", hs),), (), hs)


def cell_homs(graph: RibbonGraph, x: str, e: str) -> list[CellHom]:
    """``Hom(x, e)`` in the cell category: half-edges at ``x`` lying in ``e``."""
    if x not in graph.vertex_ids:
        raise KeyError(f"unknown vertex {x!r}")
    if e not in graph.edges:
        raise KeyError(f"unknown edge {e!r}")
    return [CellHom(x, e, h) for h in graph.edges[e] if graph.vertex_of(h) == x]


def surface_invariants(graph: RibbonGraph) -> SurfaceInvariants:
    """Euler characteristic, boundary count and genus of the thickening.

    Legs retract onto their vertex, so only paired edges enter the Euler
    characteristic.  An isolated vertex thickens to a disk.
    """
    if not graph.vertices:
        raise RibbonGraphError(["the empty graph has no thickening"])
    comps = graph.components()
    if len(comps) > 1:
        raise RibbonGraphError(
            [f"graph has {len(comps)} components; call surface_invariants on each of graph.components()"]
        )
    chi = len(graph.vertices) - len(graph.pairs)
    b = len(graph.boundary_cycles()) or 1
    twice_genus = 2 - chi - b
    if twice_genus < 0 or twice_genus % 2:
        raise AssertionError(f"inconsistent face count: chi={chi}, b={b}")
    return SurfaceInvariants(chi, b, twice_genus // 2)
