"""Double representations of the cell category of a ribbon graph.

An object assigns a space ``E_c`` to every vertex and edge and, to every
half-edge ``h`` from vertex ``x`` into edge ``e``, a pair of maps
``gamma_h: E_x -> E_e`` and ``delta_h: E_e -> E_x``.  :func:`validate_object`
decides membership in the abelian category cut out by conditions (C), (C1),
(C2) and (C3).

Monodromy sign convention.  The fractional monodromy ``T_i`` is the
counterclockwise continuation of sections from sector ``i`` to sector
``i + 1`` of the perverse sheaf realized by the Cousin complex.  That is
``T_i = -gamma_{i+1} delta_i`` for ``n >= 2`` and ``T = Id - gamma_1 delta_1``
for ``n = 1``.  With this sign the total monodromy ``T_n ... T_1`` is the
geometric one for every ``n``, so its characteristic polynomial does not
depend on the chosen corolla.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .exactlin import (
    Matrix,
    NotInvertibleError,
    block,
    block_diag,
    inverse,
    is_invertible,
    kernel_matrix,
    kron,
)
from .ribbon import RibbonGraph, corolla

__all__ = [
    "DoubleRep",
    "IsoResult",
    "Polarization",
    "PolarizationError",
    "RepMorphism",
    "RepShapeError",
    "Verdict",
    "Violation",
    "check_polarized",
    "corolla_half_edges",
    "corolla_object",
    "direct_sum",
    "dual_object",
    "fractional_monodromies",
    "helix",
    "hom_basis",
    "is_isomorphic",
    "left_adjoint",
    "polarized_delta",
    "right_adjoint",
    "rotate",
    "rotate_morphism",
    "skyscraper",
    "standardize_corolla",
    "total_monodromy",
    "validate_object",
]


class RepShapeError(ValueError):
    """A map whose shape disagrees with the dimensions at its ends."""


class PolarizationError(ValueError):
    """A missing, misshapen or degenerate bilinear form."""


@dataclass(frozen=True, eq=False)
class DoubleRep:
    graph: RibbonGraph
    dims: Mapping[str, int]
    gamma: Mapping[str, Matrix]
    delta: Mapping[str, Matrix]

    def __post_init__(self):
        g = self.graph
        dims = {c: int(self.dims.get(c, 0)) for c in g.cells}
        unknown = set(self.dims) - set(g.cells)
        if unknown:
            raise RepShapeError(f"dimensions given for unknown cells {sorted(unknown)}")
        if any(d < 0 for d in dims.values()):
            raise RepShapeError("negative dimension")
        gamma, delta = {}, {}
        for h in g.half_edges:
            x, e = g.vertex_of(h), g.edge_of(h)
            want_g, want_d = (dims[e], dims[x]), (dims[x], dims[e])
            gm = self.gamma.get(h, Matrix.zeros(*want_g))
            dm = self.delta.get(h, Matrix.zeros(*want_d))
            if gm.shape != want_g:
                raise RepShapeError(f"gamma[{h}] has shape {gm.shape}, expected {want_g}")
            if dm.shape != want_d:
                raise RepShapeError(f"delta[{h}] has shape {dm.shape}, expected {want_d}")
            gamma[h], delta[h] = gm, dm
        extra = (set(self.gamma) | set(self.delta)) - set(g.half_edges)
        if extra:
            raise RepShapeError(f"maps given for unknown half-edges {sorted(extra)}")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "delta", delta)

    def dim(self, cell: str) -> int:
        return self.dims[cell]

    def __eq__(self, other) -> bool:
        if not isinstance(other, DoubleRep):
            return NotImplemented
        return (
            self.graph == other.graph
            and self.dims == other.dims
            and self.gamma == other.gamma
            and self.delta == other.delta
        )

    def __repr__(self) -> str:
        return f"DoubleRep(dims={self.dims})"

    def conjugate(self, change: Mapping[str, Matrix]) -> "DoubleRep":
        """Base change by invertible ``change[c]`` on each cell (new = P old P^-1)."""
        g = self.graph
        inv = {c: inverse(change[c]) for c in g.cells}
        gamma, delta = {}, {}
        for h in g.half_edges:
            x, e = g.vertex_of(h), g.edge_of(h)
            gamma[h] = change[e] @ self.gamma[h] @ inv[x]
            delta[h] = change[x] @ self.delta[h] @ inv[e]
        return DoubleRep(g, self.dims, gamma, delta)

    # -- serialization ---------------------------------------------------

    def to_json(self) -> dict:
        return {
            "graph": self.graph.to_json(),
            "dims": dict(self.dims),
            "gamma": {h: m.to_json() for h, m in self.gamma.items()},
            "delta": {h: m.to_json() for h, m in self.delta.items()},
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "DoubleRep":
        graph = RibbonGraph.from_json(data["graph"])
        dims = {str(c): int(n) for c, n in data.get("dims", {}).items()}
        full = {c: dims.get(c, 0) for c in graph.cells}

        def load(key, shape_of):
            out = {}
            for h, m in data.get(key, {}).items():
                h = str(h)
                if h not in graph.half_edges:
                    raise RepShapeError(f"{key} given for unknown half-edge {h!r}")
                try:
                    out[h] = Matrix.from_json(m, shape_of(h))
                except ValueError as exc:
                    raise RepShapeError(f"{key}[{h}]: {exc}") from None
            return out

        gamma = load("gamma", lambda h: (full[graph.edge_of(h)], full[graph.vertex_of(h)]))
        delta = load("delta", lambda h: (full[graph.vertex_of(h)], full[graph.edge_of(h)]))
        return cls(graph, dims, gamma, delta)


def corolla_half_edges(q_or_graph) -> tuple[str, ...]:
    """Half-edges of a corolla in counterclockwise order."""
    g = q_or_graph.graph if isinstance(q_or_graph, DoubleRep) else q_or_graph
    if not g.is_corolla:
        raise ValueError("operation needs an object on a corolla (one vertex, only legs)")
    return g.vertices[0][1]


def _center(q: DoubleRep) -> str:
    corolla_half_edges(q)
    return q.graph.vertex_ids[0]


def corolla_object(gamma: Sequence, delta: Sequence, vertex_dim: int | None = None) -> DoubleRep:
    """Object on ``corolla(n)`` from lists ``gamma[i]: E_0 -> E_i``, ``delta[i]: E_i -> E_0``."""
    gamma = [m if isinstance(m, Matrix) else Matrix(m) for m in gamma]
    delta = [m if isinstance(m, Matrix) else Matrix(m) for m in delta]
    if len(gamma) != len(delta):
        raise RepShapeError("need one gamma and one delta per leg")
    n = len(gamma)
    g = corolla(n)
    e0 = vertex_dim if vertex_dim is not None else gamma[0].cols
    dims = {"0": e0}
    for i, m in enumerate(gamma, start=1):
        dims[str(i)] = m.rows
    return DoubleRep(
        g,
        dims,
        {str(i): m for i, m in enumerate(gamma, start=1)},
        {str(i): m for i, m in enumerate(delta, start=1)},
    )


def skyscraper(graph: RibbonGraph | int, dim: int, vertex: str | None = None) -> DoubleRep:
    """``E_x = k^dim`` at one vertex, zero elsewhere."""
    if isinstance(graph, int):
        graph = corolla(graph)
    vertex = vertex if vertex is not None else graph.vertex_ids[0]
    return DoubleRep(graph, {vertex: dim}, {}, {})


# -- membership ----------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    condition: str
    vertex: str
    half_edges: tuple[str, ...]
    detail: str

    def __str__(self) -> str:
        hs = ",".join(self.half_edges)
        return f"{self.condition} at vertex {self.vertex} [{hs}]: {self.detail}"


@dataclass(frozen=True)
class Verdict:
    accepted: bool
    violations: tuple = ()

    def __bool__(self) -> bool:
        return self.accepted

    def to_json(self) -> dict:
        return {
            "status": "accepted" if self.accepted else "rejected",
            "violations": [str(v) for v in self.violations],
        }


def validate_object(q: DoubleRep) -> Verdict:
    g = q.graph
    out = []
    for x, cycle in g.vertices:
        if len(cycle) == 1:
            h = cycle[0]
            e = g.edge_of(h)
            t = Matrix.identity(q.dim(e)) - q.gamma[h] @ q.delta[h]
            if not is_invertible(t):
                out.append(Violation("(C)", x, (h,), "Id - gamma delta is not invertible"))
            continue
        for h in cycle:
            e = g.edge_of(h)
            if not (q.gamma[h] @ q.delta[h]).is_identity():
                out.append(Violation("(C1)", x, (h,), "gamma delta != Id"))
            for h2 in cycle:
                if h2 == h:
                    continue
                comp = q.gamma[h2] @ q.delta[h]
                if h2 == g.succ(h):
                    if not is_invertible(comp):
                        out.append(Violation("(C2)", x, (h, h2), "gamma' delta is not an isomorphism"))
                elif not comp.is_zero():
                    out.append(Violation("(C3)", x, (h, h2), "gamma' delta != 0"))
    return Verdict(not out, tuple(out))


# -- morphisms ---------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class RepMorphism:
    source: DoubleRep
    target: DoubleRep
    components: Mapping[str, Matrix]

    def __post_init__(self):
        if self.source.graph != self.target.graph:
            raise ValueError("morphism between objects on different graphs")
        comps = {}
        for c in self.source.graph.cells:
            want = (self.target.dim(c), self.source.dim(c))
            m = self.components.get(c, Matrix.zeros(*want))
            if m.shape != want:
                raise RepShapeError(f"component {c} has shape {m.shape}, expected {want}")
            comps[c] = m
        object.__setattr__(self, "components", comps)

    def __getitem__(self, cell: str) -> Matrix:
        return self.components[cell]

    def __eq__(self, other) -> bool:
        if not isinstance(other, RepMorphism):
            return NotImplemented
        return self.components == other.components and self.source == other.source and self.target == other.target

    def defects(self) -> list[str]:
        """Half-edges where a commutation square fails."""
        s, t, f = self.source, self.target, self.components
        g = s.graph
        bad = []
        for h in g.half_edges:
            x, e = g.vertex_of(h), g.edge_of(h)
            if f[e] @ s.gamma[h] != t.gamma[h] @ f[x]:
                bad.append(f"gamma[{h}]")
            if f[x] @ s.delta[h] != t.delta[h] @ f[e]:
                bad.append(f"delta[{h}]")
        return bad

    def is_morphism(self) -> bool:
        return not self.defects()

    def is_isomorphism(self) -> bool:
        return all(is_invertible(m) for m in self.components.values())

    def __matmul__(self, other: "RepMorphism") -> "RepMorphism":
        """``self o other``."""
        if other.target != self.source:
            raise ValueError("morphisms are not composable")
        return RepMorphism(other.source, self.target, {c: self[c] @ other[c] for c in self.components})

    def __add__(self, other: "RepMorphism") -> "RepMorphism":
        return RepMorphism(self.source, self.target, {c: self[c] + other[c] for c in self.components})

    def __sub__(self, other: "RepMorphism") -> "RepMorphism":
        return RepMorphism(self.source, self.target, {c: self[c] - other[c] for c in self.components})

    def scale(self, a) -> "RepMorphism":
        return RepMorphism(self.source, self.target, {c: m * a for c, m in self.components.items()})

    def inverse(self) -> "RepMorphism":
        return RepMorphism(self.target, self.source, {c: inverse(m) for c, m in self.components.items()})

    @classmethod
    def identity(cls, q: DoubleRep) -> "RepMorphism":
        return cls(q, q, {c: Matrix.identity(q.dim(c)) for c in q.graph.cells})

    def to_json(self) -> dict:
        return {"components": {c: m.to_json() for c, m in self.components.items()}}


def _hom_system(q: DoubleRep, q2: DoubleRep) -> tuple[Matrix, list[tuple[str, int, int, int]]]:
    g = q.graph
    layout, offset = [], 0
    for c in g.cells:
        t, s = q2.dim(c), q.dim(c)
        layout.append((c, offset, t, s))
        offset += t * s
    col = {c: (o, t, s) for c, o, t, s in layout}
    col_sizes = [t * s for _, _, t, s in layout]
    index = {c: i for i, (c, *_) in enumerate(layout)}
    rows, row_sizes = [], []
    for h in g.half_edges:
        x, e = g.vertex_of(h), g.edge_of(h)
        _, te, se = col[e]
        _, tx, sx = col[x]
        # f_e gamma - gamma' f_x = 0
        r = [None] * len(layout)
        r[index[e]] = kron(Matrix.identity(te), q.gamma[h].T)
        term = kron(q2.gamma[h], Matrix.identity(sx))
        r[index[x]] = term * -1 if r[index[x]] is None else r[index[x]] - term
        rows.append(r)
        row_sizes.append(te * sx)
        # f_x delta - delta' f_e = 0
        r = [None] * len(layout)
        r[index[x]] = kron(Matrix.identity(tx), q.delta[h].T)
        term = kron(q2.delta[h], Matrix.identity(se))
        r[index[e]] = term * -1 if r[index[e]] is None else r[index[e]] - term
        rows.append(r)
        row_sizes.append(tx * se)
    return block(rows, row_sizes, col_sizes), layout


def _unpack(q, q2, layout, vec) -> RepMorphism:
    flat = vec.flat()
    comps = {}
    for c, o, t, s in layout:
        comps[c] = Matrix.from_flat(t, s, flat[o:o + t * s])
    return RepMorphism(q, q2, comps)


def _hom_kernel(q: DoubleRep, q2: DoubleRep):
    if q.graph != q2.graph:
        raise ValueError("Hom between objects on different graphs")
    system, layout = _hom_system(q, q2)
    return kernel_matrix(system), layout


def hom_basis(q: DoubleRep, q2: DoubleRep) -> list[RepMorphism]:
    """Basis of ``Hom(q, q2)``: morphisms commuting with every gamma and delta."""
    k, layout = _hom_kernel(q, q2)
    return [_unpack(q, q2, layout, k.column(j)) for j in range(k.cols)]


@dataclass(frozen=True)
class IsoResult:
    """Outcome of :func:`is_isomorphic`.

    ``status`` is ``"isomorphic"`` (with a verified ``certificate``),
    ``"dims differ"`` or ``"probably not"``.
    """

    status: str
    certificate: RepMorphism | None = None
    hom_dimension: int | None = None
    trials_used: int = 0

    def __bool__(self) -> bool:
        return self.status == "isomorphic"


def is_isomorphic(q: DoubleRep, q2: DoubleRep, trials: int = 8, seed: int = 0) -> IsoResult:
    """Randomized isomorphism search; a returned certificate is always exact.

    A generic element of ``Hom(q, q2)`` is invertible iff the objects are
    isomorphic, so we try random integer combinations of a Hom basis.
    """
    if q.graph != q2.graph:
        raise ValueError("objects live on different graphs")
    if q.dims != q2.dims:
        return IsoResult("dims differ")
    k, layout = _hom_kernel(q, q2)
    rng = random.Random(seed)
    for trial in range(1, trials + 1):
        coeffs = Matrix.column_vector([rng.randint(-(2**15), 2**15) for _ in range(k.cols)])
        f = _unpack(q, q2, layout, k @ coeffs)
        if f.is_isomorphism() and f.is_morphism():
            return IsoResult("isomorphic", f, k.cols, trial)
        if k.cols == 0:
            break
    return IsoResult("probably not", None, k.cols, trials)


# -- constructions ---------------------------------------------------------------


def direct_sum(q: DoubleRep, q2: DoubleRep) -> DoubleRep:
    if q.graph != q2.graph:
        raise ValueError("direct sum of objects on different graphs")
    g = q.graph
    return DoubleRep(
        g,
        {c: q.dim(c) + q2.dim(c) for c in g.cells},
        {h: block_diag([q.gamma[h], q2.gamma[h]]) for h in g.half_edges},
        {h: block_diag([q.delta[h], q2.delta[h]]) for h in g.half_edges},
    )


def dual_object(q: DoubleRep) -> DoubleRep:
    """Dual spaces with ``gamma*_h = delta_h^T`` and ``delta*_h = gamma_h^T``.

    The result lives on the mirror graph: transposition reverses which
    neighbour a half-edge talks to, so (C2) only survives with the cyclic
    orders reversed.  For valency <= 2 the mirror is the same graph.
    """
    g = q.graph.mirror()
    return DoubleRep(
        g,
        q.dims,
        {h: m.T for h, m in q.delta.items()},
        {h: m.T for h, m in q.gamma.items()},
    )


def standardize_corolla(q: DoubleRep) -> DoubleRep:
    """Relabel an object on a one-vertex, all-leg graph onto ``corolla(n)``.

    The first half-edge of the cycle becomes leg ``"1"``.
    """
    hs = corolla_half_edges(q)
    v = _center(q)
    names = {h: str(i) for i, h in enumerate(hs, start=1)}
    return DoubleRep(
        corolla(len(hs)),
        {"0": q.dim(v), **{names[h]: q.dim(h) for h in hs}},
        {names[h]: q.gamma[h] for h in hs},
        {names[h]: q.delta[h] for h in hs},
    )


def fractional_monodromies(q: DoubleRep) -> list[Matrix]:
    """``[T_1, ..., T_n]`` with ``T_i: E_i -> E_{i+1}`` (indices mod n)."""
    hs = corolla_half_edges(q)
    n = len(hs)
    if n == 1:
        h = hs[0]
        return [Matrix.identity(q.dim(h)) - q.gamma[h] @ q.delta[h]]
    return [-(q.gamma[hs[(i + 1) % n]] @ q.delta[hs[i]]) for i in range(n)]


def total_monodromy(q: DoubleRep, start: int = 1) -> Matrix:
    """``T_{start-1} ... T_{start}`` on ``E_start`` (full counterclockwise turn)."""
    ts = fractional_monodromies(q)
    n = len(ts)
    hs = corolla_half_edges(q)
    out = Matrix.identity(q.dim(hs[(start - 1) % n]))
    for step in range(n):
        out = ts[(start - 1 + step) % n] @ out
    return out


def rotate(q: DoubleRep, k: int) -> DoubleRep:
    """Rotation by ``k`` sectors: leg ``i`` of the result carries the data of leg ``i + k``."""
    hs = corolla_half_edges(q)
    n = len(hs)
    v = _center(q)
    src = {hs[i]: hs[(i + k) % n] for i in range(n)}
    return DoubleRep(
        q.graph,
        {v: q.dim(v), **{h: q.dim(src[h]) for h in hs}},
        {h: q.gamma[src[h]] for h in hs},
        {h: q.delta[src[h]] for h in hs},
    )


def rotate_morphism(f: RepMorphism, k: int) -> RepMorphism:
    hs = corolla_half_edges(f.source)
    n = len(hs)
    v = _center(f.source)
    comps = {v: f[v], **{hs[i]: f[hs[(i + k) % n]] for i in range(n)}}
    return RepMorphism(rotate(f.source, k), rotate(f.target, k), comps)


def helix(q: DoubleRep, start: int, stop: int) -> list[DoubleRep]:
    """Orbit ``[rotate(q, k) for k = start..stop]`` (inclusive)."""
    return [rotate(q, k) for k in range(start, stop + 1)]


# -- polarizations ----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Polarization:
    """A nondegenerate (not necessarily symmetric) Gram matrix per cell."""

    forms: Mapping[str, Matrix] = field(default_factory=dict)

    def __post_init__(self):
        for c, m in self.forms.items():
            if not m.is_square:
                raise PolarizationError(f"form on {c} is not square")
            if not is_invertible(m):
                raise PolarizationError(f"form on {c} is degenerate")

    def check_dims(self, q: DoubleRep) -> None:
        for c in q.graph.cells:
            m = self.forms.get(c)
            if m is None:
                if q.dim(c):
                    raise PolarizationError(f"no form on cell {c}")
                continue
            if m.rows != q.dim(c):
                raise PolarizationError(f"form on {c} has size {m.rows}, space has dim {q.dim(c)}")

    def form(self, cell: str, dim: int = 0) -> Matrix:
        return self.forms.get(cell, Matrix.identity(0) if dim == 0 else None)

    @classmethod
    def standard(cls, q: DoubleRep) -> "Polarization":
        return cls({c: Matrix.identity(q.dim(c)) for c in q.graph.cells})

    def to_json(self) -> dict:
        return {"forms": {c: m.to_json() for c, m in self.forms.items()}}

    @classmethod
    def from_json(cls, data: Mapping) -> "Polarization":
        forms = {}
        for c, m in data.get("forms", {}).items():
            rows = list(m)
            forms[str(c)] = Matrix.from_json(rows, (len(rows), len(rows)))
        return cls(forms)


def _gram(m: Matrix) -> Matrix:
    if not m.is_square:
        raise PolarizationError("Gram matrix must be square")
    try:
        return inverse(m)
    except NotInvertibleError:
        raise PolarizationError("Gram matrix is singular") from None


def left_adjoint(f: Matrix, gram_src: Matrix, gram_tgt: Matrix) -> Matrix:
    """``L: E' -> E`` with ``<L y, x> = <y, f x>'`` for ``f: E -> E'`` and forms ``<u, v> = u^T G v``."""
    g_inv = _gram(gram_src)
    _gram(gram_tgt)
    if f.shape != (gram_tgt.rows, gram_src.rows):
        raise PolarizationError("map does not match the forms")
    return (gram_tgt @ f @ g_inv).T


def right_adjoint(f: Matrix, gram_src: Matrix, gram_tgt: Matrix) -> Matrix:
    """``R: E' -> E`` with ``<f x, y>' = <x, R y>``."""
    g_inv = _gram(gram_src)
    _gram(gram_tgt)
    if f.shape != (gram_tgt.rows, gram_src.rows):
        raise PolarizationError("map does not match the forms")
    return g_inv @ f.T @ gram_tgt


_ADJOINT = {"left": left_adjoint, "right": right_adjoint}


def _forms(q: DoubleRep, p: Polarization, h: str) -> tuple[Matrix, Matrix]:
    g = q.graph
    x, e = g.vertex_of(h), g.edge_of(h)
    gx = p.forms.get(x, Matrix.identity(0))
    ge = p.forms.get(e, Matrix.identity(0))
    return gx, ge


def polarized_delta(q: DoubleRep, p: Polarization, side: str) -> dict[str, Matrix]:
    """The deltas forced by the gammas: their left or right adjoints."""
    if side not in _ADJOINT:
        raise ValueError("side must be 'left' or 'right'")
    p.check_dims(q)
    adj = _ADJOINT[side]
    return {h: adj(q.gamma[h], *_forms(q, p, h)) for h in q.graph.half_edges}


def check_polarized(q: DoubleRep, p: Polarization, side: str = "left") -> Verdict:
    forced = polarized_delta(q, p, side)
    g = q.graph
    bad = [
        Violation(f"polarized-{side}", g.vertex_of(h), (h,), "delta is not the adjoint of gamma")
        for h in g.half_edges
        if forced[h] != q.delta[h]
    ]
    return Verdict(not bad, tuple(bad))
