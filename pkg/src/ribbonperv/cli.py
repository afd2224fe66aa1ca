"""Command-line front end.

Every subcommand prints one canonical JSON report (sorted keys, rationals as
``"p/q"`` strings).  Exit codes: 0 success or accepted, 1 mathematical
rejection (violated condition, not perverse, probably not isomorphic),
2 malformed input or usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from .exactlin import char_poly, scalar_str
from .fan import (
    FanComplex,
    FanError,
    beta_power,
    check_perversity,
    cousin_complex,
    extract_quiver,
    transport,
)
from .fan.cells import FanDecomposition
from .generate import RunConfig, random_object
from .quiverrep import (
    DoubleRep,
    Polarization,
    PolarizationError,
    RepShapeError,
    check_polarized,
    corolla_half_edges,
    direct_sum,
    dual_object,
    fractional_monodromies,
    helix,
    hom_basis,
    is_isomorphic,
    rotate,
    total_monodromy,
    validate_object,
)
from .ribbon import RibbonGraph, RibbonGraphError, surface_invariants
from .suite import run_suite

__all__ = ["main", "build_parser"]


class InputError(Exception):
    """Bad input: exit code 2."""


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False)


def _load_json(path: str):
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
        return json.loads(text)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None


def _rep(path: str) -> DoubleRep:
    data = _load_json(path)
    if not isinstance(data, dict):
        raise InputError(f"{path}: expected a representation object")
    return DoubleRep.from_json(data)


def _graph(path: str) -> RibbonGraph:
    data = _load_json(path)
    if isinstance(data, dict) and "graph" in data and "vertices" not in data:
        data = data["graph"]
    return RibbonGraph.from_json(data)


def _angles(text: str | None):
    if text is None:
        return None
    return [a for a in text.split(",") if a.strip()]


def _verdict(v) -> tuple[dict, int]:
    out = v.to_json()
    return out, 0 if v else 1


# -- subcommands --------------------------------------------------------------


def cmd_validate(args):
    return _verdict(validate_object(_rep(args.rep)))


def cmd_hom(args):
    basis = hom_basis(_rep(args.source), _rep(args.target))
    return {"dimension": len(basis), "basis": [b.to_json() for b in basis]}, 0


def cmd_iso(args):
    res = is_isomorphic(_rep(args.source), _rep(args.target), trials=args.trials, seed=args.seed)
    out = {"status": res.status, "hom_dimension": res.hom_dimension, "trials_used": res.trials_used}
    if res.certificate is not None:
        out["certificate"] = res.certificate.to_json()
    return out, 0 if res else 1


def cmd_dual(args):
    return dual_object(_rep(args.rep)).to_json(), 0


def cmd_sum(args):
    return direct_sum(_rep(args.first), _rep(args.second)).to_json(), 0


def _corolla_rep(path: str) -> DoubleRep:
    q = _rep(path)
    try:
        corolla_half_edges(q)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    return q


def cmd_monodromy(args):
    q = _corolla_rep(args.rep)
    total = total_monodromy(q)
    return {
        "fractional": [t.to_json() for t in fractional_monodromies(q)],
        "total": total.to_json(),
        "char_poly": [scalar_str(c) for c in char_poly(total)],
    }, 0


def cmd_rotate(args):
    return rotate(_corolla_rep(args.rep), args.k).to_json(), 0


def cmd_helix(args):
    seq = helix(_corolla_rep(args.rep), args.start, args.stop)
    return {"objects": [x.to_json() for x in seq]}, 0


def cmd_polarize_check(args):
    q = _rep(args.rep)
    pol = _load_json(args.polarization)
    if not isinstance(pol, dict):
        raise InputError("polarization file must hold an object with a 'forms' map")
    p = Polarization.from_json(pol)
    sides = ["left", "right"] if args.side == "both" else [args.side]
    report, code = {}, 0
    for side in sides:
        v = check_polarized(q, p, side)
        report[side] = v.to_json()
        code = code or (0 if v else 1)
    return report, code


def cmd_surf(args):
    g = _graph(args.graph)
    comps = g.components()
    rows = []
    for c in comps:
        s = surface_invariants(c)
        rows.append(
            {
                "vertices": list(c.vertex_ids),
                "euler_characteristic": s.euler_characteristic,
                "genus": s.genus,
                "boundary_components": s.boundary_components,
            }
        )
    if len(rows) == 1:
        out = dict(rows[0], connected=True)
        del out["vertices"]
        return out, 0
    return {"connected": False, "components": rows}, 0


def cmd_cousin(args):
    q = _corolla_rep(args.rep)
    v = validate_object(q)
    if not v:
        out, _ = _verdict(v)
        return out, 1
    angles = _angles(args.angles)
    fan = FanDecomposition(tuple(angles)) if angles else None
    return cousin_complex(q, fan).to_json(), 0


def _fan_complex(path: str) -> FanComplex:
    data = _load_json(path)
    if not isinstance(data, dict):
        raise InputError(f"{path}: expected a fan complex object")
    return FanComplex.from_json(data)


def cmd_perversity(args):
    return _verdict(check_perversity(_fan_complex(args.complex)))


def cmd_extract(args):
    f = _fan_complex(args.complex)
    v = check_perversity(f)
    if not v:
        out, _ = _verdict(v)
        return out, 1
    skeleton = [int(k) for k in args.skeleton.split(",")] if args.skeleton else None
    return extract_quiver(f, skeleton).to_json(), 0


def cmd_transport(args):
    q = _corolla_rep(args.rep)
    v = validate_object(q)
    if not v:
        out, _ = _verdict(v)
        return out, 1
    target = _angles(args.angles) or args.m
    if target is None:
        raise InputError("give --m or --angles")
    return transport(q, target).to_json(), 0


def cmd_beta(args):
    q = _corolla_rep(args.rep)
    v = validate_object(q)
    if not v:
        out, _ = _verdict(v)
        return out, 1
    return beta_power(q, args.power).to_json(), 0


def cmd_suite(args):
    cfg = RunConfig(seed=args.seed, max_n=args.max_n, max_dim=args.max_dim, trials=args.trials)
    report = run_suite(cfg)
    return report.to_json(), 0 if report.ok else 1


def cmd_gen(args):
    return random_object(args.n, args.max_dim, args.seed).to_json(), 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ribbonperv", description=__doc__.splitlines()[0])
    p.add_argument("--out", help="also write the JSON report to this path")
    sub = p.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    def add(name, func, help_text, *files):
        sp = sub.add_parser(name, help=help_text)
        for f in files:
            sp.add_argument(f)
        sp.add_argument("--out", default=argparse.SUPPRESS, help="also write the JSON report to this path")
        sp.set_defaults(func=func)
        return sp

    add("validate", cmd_validate, "check the category conditions", "rep")
    add("hom", cmd_hom, "basis of Hom(source, target)", "source", "target")
    sp = add("iso", cmd_iso, "randomized isomorphism search", "source", "target")
    sp.add_argument("--trials", type=int, default=8)
    sp.add_argument("--seed", type=int, default=0)
    add("dual", cmd_dual, "dual object (on the mirror graph)", "rep")
    add("sum", cmd_sum, "direct sum", "first", "second")
    add("monodromy", cmd_monodromy, "fractional and total monodromy", "rep")
    sp = add("rotate", cmd_rotate, "rotate a corolla object by k sectors", "rep")
    sp.add_argument("--k", type=int, default=1)
    sp = add("helix", cmd_helix, "rotation orbit from START to STOP", "rep")
    sp.add_argument("--from", dest="start", type=int, default=0)
    sp.add_argument("--to", dest="stop", type=int, required=True)
    sp = add("polarize-check", cmd_polarize_check, "check delta against adjoints of gamma", "rep", "polarization")
    sp.add_argument("--side", choices=["left", "right", "both"], default="both")
    add("surf", cmd_surf, "Euler characteristic, genus and boundary of the thickening", "graph")
    sp = add("cousin", cmd_cousin, "Cousin complex of a corolla object", "rep")
    sp.add_argument("--angles", help="comma-separated ray angles in turns, e.g. 0,1/3,2/3")
    add("perversity", cmd_perversity, "perversity check of a fan complex", "complex")
    sp = add("extract", cmd_extract, "corolla object of a perverse fan complex", "complex")
    sp.add_argument("--skeleton", help="comma-separated ray indices (default: all rays)")
    sp = add("transport", cmd_transport, "move a corolla object to another fan", "rep")
    sp.add_argument("--m", type=int)
    sp.add_argument("--angles")
    sp = add("beta", cmd_beta, "the isomorphism beta_k: Q -> rotate(Q, k)", "rep")
    sp.add_argument("--power", type=int, default=1)
    sp = add("suite", cmd_suite, "run the property suite")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--max-n", type=int, default=5)
    sp.add_argument("--max-dim", type=int, default=4)
    sp.add_argument("--trials", type=int, default=100)
    sp = add("gen", cmd_gen, "random valid corolla object")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--max-dim", type=int, default=3)
    sp.add_argument("--seed", type=int, default=0)
    return p


_INPUT_ERRORS = (
    InputError,
    RibbonGraphError,
    RepShapeError,
    PolarizationError,
    FanError,
    KeyError,
    TypeError,
    ValueError,
)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        report, code = args.func(args)
    except _INPUT_ERRORS as exc:
        report, code = {"status": "error", "error": f"{type(exc).__name__}: {exc}"}, 2
    text = dumps(report)
    print(text)
    if getattr(args, "out", None):
        Path(args.out).write_text(text + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
