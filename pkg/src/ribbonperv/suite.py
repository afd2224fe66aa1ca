"""Reproducible property suite over generated objects.

Trial ``i`` draws everything from ``random.Random(f"{seed}/{i}")``, so any
single trial can be replayed in isolation.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Callable

from .exactlin import Matrix, char_poly, scalar_str
from .fan import (
    EngineConsistencyError,
    FanError,
    beta_one,
    check_perversity,
    cousin_complex,
    extract,
    monodromy_endomorphism,
    support_cohomology,
    transport,
)
from .generate import RunConfig, random_invertible, random_object
from .quiverrep import (
    DoubleRep,
    RepMorphism,
    dual_object,
    fractional_monodromies,
    hom_basis,
    is_isomorphic,
    rotate_morphism,
    standardize_corolla,
    total_monodromy,
    validate_object,
)

__all__ = ["PROPERTIES", "SuiteReport", "random_hom_element", "run_suite", "trial_rng"]


def trial_rng(seed: int, index: int) -> random.Random:
    return random.Random(f"{seed}/{index}")


def random_hom_element(rng: random.Random, q: DoubleRep, q2: DoubleRep, bound: int = 5) -> RepMorphism:
    basis = hom_basis(q, q2)
    out = RepMorphism(q, q2, {})
    for b in basis:
        out = out + b.scale(rng.randint(-bound, bound))
    return out


def round_trip(q, rng, cfg) -> str | None:
    x = extract(cousin_complex(q)).rep
    res = is_isomorphic(q, x, trials=cfg.trials_iso, seed=rng.getrandbits(32))
    return None if res else f"round trip: {res.status}"


def calibration(q, rng, cfg) -> str | None:
    sc = support_cohomology(cousin_complex(q))
    ts = fractional_monodromies(q)
    n = len(ts)
    for k, pair in sc.ray_components.items():
        if pair is None:
            return f"ray {k}: sector identification is singular"
        ccw, cw = pair
        if not ccw.is_identity() or cw != -ts[(k - 1) % n]:
            return f"ray {k}: components differ from (Id, -T)"
    return None


def purity(q, rng, cfg) -> str | None:
    f = cousin_complex(q)
    n = f.fan.n
    for size in range(1, n + 1):
        for sk in itertools.combinations(range(n), size):
            if not support_cohomology(f, sk).pure:
                return f"impure on skeleton {sk}"
    return None


def perversity(q, rng, cfg) -> str | None:
    v = check_perversity(cousin_complex(q))
    return None if v else "; ".join(v.failures)


def duality(q, rng, cfg) -> str | None:
    lhs = extract(cousin_complex(standardize_corolla(dual_object(q)))).rep
    rhs = standardize_corolla(dual_object(extract(cousin_complex(q)).rep))
    res = is_isomorphic(lhs, rhs, trials=cfg.trials_iso, seed=rng.getrandbits(32))
    return None if res else f"duality: {res.status}"


def transport_invariance(q, rng, cfg) -> str | None:
    m = rng.randint(1, cfg.max_n)
    t = transport(q, m)
    if not validate_object(t):
        return f"transport to {m} is invalid"
    if char_poly(total_monodromy(t)) != char_poly(total_monodromy(q)):
        return f"characteristic polynomial changed under transport to {m}"
    return None


def beta(q, rng, cfg) -> str | None:
    try:
        b = beta_one(q)
        t = monodromy_endomorphism(q)
    except EngineConsistencyError as exc:
        return str(exc)
    hs = q.graph.vertices[0][1]
    if any(t[h] != total_monodromy(q, start=i + 1) for i, h in enumerate(hs)):
        return "beta_n differs from the total monodromy"
    for f in hom_basis(q, q):
        if t @ f != f @ t:
            return "beta_n is not central"
    q2 = q.conjugate({c: random_invertible(rng, q.dim(c)) for c in q.graph.cells})
    b2 = beta_one(q2)
    f = random_hom_element(rng, q, q2)
    if rotate_morphism(f, 1) @ b != b2 @ f:
        return "naturality square fails"
    return None


def validity(q, rng, cfg) -> str | None:
    v = validate_object(q)
    return None if v else "; ".join(map(str, v.violations))


PROPERTIES: dict[str, tuple[Callable, int]] = {
    # name -> (check, minimal n)
    "validate": (validity, 1),
    "perversity": (perversity, 2),
    "purity": (purity, 2),
    "calibration": (calibration, 2),
    "round_trip": (round_trip, 2),
    "duality": (duality, 2),
    "transport": (transport_invariance, 2),
    "beta": (beta, 1),
}


@dataclass
class SuiteReport:
    config: RunConfig
    counts: dict[str, dict[str, int]] = field(default_factory=dict)
    failures: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {
            "config": {
                "seed": self.config.seed,
                "max_n": self.config.max_n,
                "max_dim": self.config.max_dim,
                "trials": self.config.trials,
            },
            "properties": self.counts,
            "failures": self.failures,
            "status": "pass" if self.ok else "fail",
        }


@dataclass(frozen=True)
class _Cfg:
    max_n: int
    trials_iso: int = 8


def run_suite(config: RunConfig) -> SuiteReport:
    report = SuiteReport(config, {p: {"passed": 0, "failed": 0, "skipped": 0} for p in PROPERTIES})
    cfg = _Cfg(config.max_n)
    for i in range(config.trials):
        rng = trial_rng(config.seed, i)
        n = rng.randint(1, config.max_n)
        q = random_object(n, config.max_dim, rng)
        for name, (check, min_n) in PROPERTIES.items():
            row = report.counts[name]
            if n < min_n:
                row["skipped"] += 1
                continue
            try:
                problem = check(q, rng, cfg)
            except (FanError, EngineConsistencyError, ValueError) as exc:
                problem = f"{type(exc).__name__}: {exc}"
            if problem is None:
                row["passed"] += 1
            else:
                row["failed"] += 1
                report.failures.append({"trial": i, "n": n, "property": name, "detail": problem})
    return report
