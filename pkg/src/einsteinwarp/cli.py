"""Command-line front end.

    einsteinwarp list
    einsteinwarp verify ex1 [--grid a:b:n] [--tol T] [--literal-prop2]
    einsteinwarp construct spec.json
    einsteinwarp classify --preset ricci --steady --fiber-scalar 1
    einsteinwarp estimate ex1-lich --R 4
    einsteinwarp export ex2 --grid 0.1:10:400

Exit codes: 0 pass, 2 fail, 1 usage or input error, 3 blow-up, 4 fiber mismatch.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import analysis, catalog, serialize, system
from .errors import BlowUp, EinsteinWarpError, FiberMismatch
from .solver import construct

EXIT_PASS, EXIT_ERROR, EXIT_FAIL, EXIT_BLOWUP, EXIT_FIBER = 0, 1, 2, 3, 4


def exit_code(verdict: str) -> int:
    """Exit status of a report verdict."""
    return {"pass": EXIT_PASS, "fail": EXIT_FAIL}[verdict]


def _emit(text: str, out):
    if not text.endswith("\n"):
        text += "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _dims(args) -> dict:
    kw = {}
    if getattr(args, "n", None) is not None:
        kw["n"] = args.n
    if getattr(args, "m", None) is not None:
        kw["m"] = args.m
    return kw


def _load_ansatz(source: str, args):
    """Catalog id or JSON file -> (ansatz, grid)."""
    path = Path(source)
    if source.endswith(".json") or path.exists():
        a, g = serialize.ansatz_from_dict(serialize.load_json(path))
        return a, (system.Grid(*g) if g else None)
    e = catalog.get(source, **_dims(args))
    return e.ansatz, e.grid


def _grid(args, default):
    if args.grid:
        return system.Grid.parse(args.grid)
    return default if default is not None else system.Grid(-1.0, 1.0, 401)


def cmd_list(args) -> int:
    rows = []
    for i in catalog.ids():
        e = catalog.get(i)
        rows.append({
            "id": i,
            "provenance": e.provenance,
            "completeness": e.completeness_note,
            "degeneracy": e.expected_degeneracy.value,
            "expected": e.expected_verdict,
            "grid": [e.grid.lo, e.grid.hi, e.grid.count],
        })
    if args.format == "json":
        _emit(serialize.dumps(rows), args.out)
    else:
        _emit("\n".join(f"{r['id']:<12} {r['degeneracy']:<14} {r['expected']:<5} {r['provenance']}"
                        for r in rows), args.out)
    return EXIT_PASS


def _run_verify(args):
    a, g = _load_ansatz(args.input, args)
    tol = args.tol if args.tol is not None else system.DEFAULT_TOL
    return system.verify(a, _grid(args, g), tol=tol, fiber_in_scalar=not args.literal_prop2)


def cmd_verify(args) -> int:
    r = _run_verify(args)
    _emit(r.to_csv() if args.format == "csv" else r.to_json(), args.out)
    return exit_code(r.verdict)


def cmd_export(args) -> int:
    r = _run_verify(args)
    _emit(r.to_json() if args.format == "json" else r.to_csv(), args.out)
    return EXIT_PASS


def cmd_construct(args) -> int:
    spec, fiber = serialize.spec_from_dict(serialize.load_json(args.spec))
    tol = args.tol if args.tol is not None else 1e-6
    try:
        a, r = construct(spec, fiber, tol=tol, fiber_in_scalar=not args.literal_prop2,
                         name=Path(args.spec).stem)
    except BlowUp as exc:
        _emit(serialize.dumps({"error": "BlowUp", "message": str(exc), "last_xi": exc.last_xi}), args.out)
        return EXIT_BLOWUP
    except FiberMismatch as exc:
        _emit(serialize.dumps({"error": "FiberMismatch", "message": str(exc),
                               "implied_theta": exc.implied_theta, "fiber_theta": exc.fiber_theta}), args.out)
        return EXIT_FIBER
    lo, hi, count = spec.grid
    doc = {"ansatz": serialize.ansatz_to_dict(a, (lo, hi, count)), "report": r.to_dict()}
    _emit(serialize.dumps(doc), args.out)
    return exit_code(r.verdict)


def _hypotheses(args):
    """(preset or None, hypotheses) from a file, preset flags or explicit signs."""
    if args.hypotheses:
        d = serialize.load_json(args.hypotheses)
        if not isinstance(d, dict):
            raise EinsteinWarpError("hypotheses file must hold a JSON object")
        known = set(analysis.RigidityHypotheses.__dataclass_fields__)
        return None, analysis.RigidityHypotheses(**{k: v for k, v in d.items() if k in known})
    side = "asserted" if args.ricci_w_nonneg else None
    if args.preset:
        preset = analysis.soliton_presets(args.preset, args.n or 3, args.m or 2)
        lam = args.lam
        if lam is None and args.regime:
            lam = {"steady": 0.0, "expanding": -1.0, "shrinking": 1.0}[args.regime]
        h = analysis.preset_hypotheses(preset, args.m or 2, lam, args.fiber_scalar, args.base_scalar,
                                       ricci_w_nonneg=side or "asserted",
                                       growth_ok=args.growth or "asserted",
                                       gradient_decay=args.gradient_decay or "asserted")
        over = {k: v for k, v in (("sign_sigma", args.sign_sigma), ("sign_A", args.sign_A),
                                  ("sign_BF", args.sign_BF)) if v is not None}
        if over:
            from dataclasses import replace
            h = replace(h, **over)
        return preset, h
    return None, analysis.RigidityHypotheses(
        args.sign_sigma, args.sign_A, args.sign_BF,
        ricci_w_nonneg=side or "unknown",
        growth_ok=args.growth or "unknown",
        gradient_decay=args.gradient_decay or "unknown",
    )


def cmd_classify(args) -> int:
    preset, h = _hypotheses(args)
    v = analysis.classify_rigidity(h) if preset is None else analysis.classify_preset(preset, h)
    _emit(serialize.dumps(v.to_dict()), args.out)
    return EXIT_PASS


def cmd_estimate(args) -> int:
    source = args.input[:-5] if args.input.endswith("-lich") else args.input
    a, _ = _load_ansatz(source, args)
    cfg = analysis.EstimateConfig(R=args.R, x0=args.x0, p=args.p, q=args.q, delta=args.delta,
                                  count=args.count)
    res = analysis.lichnerowicz_estimate(a, cfg)
    _emit(serialize.dumps(res.to_dict()) if args.format == "json" else res.to_csv(), args.out)
    return EXIT_PASS


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write output to this file instead of stdout")
    common.add_argument("--grid", help="evaluation grid a:b:n")
    common.add_argument("--tol", type=float, help="pass/fail tolerance")
    common.add_argument("--literal-prop2", action="store_true",
                        help="leave the fiber scalar curvature out of R in the reduced equations")
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="format", action="store_const", const="json")
    fmt.add_argument("--csv", dest="format", action="store_const", const="csv")
    common.add_argument("--n", type=int, help="base dimension for catalog entries")
    common.add_argument("--m", type=int, help="fiber dimension for catalog entries")

    p = argparse.ArgumentParser(prog="einsteinwarp", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="verb", required=True)

    s = sub.add_parser("list", parents=[common], help="list catalog entries")
    s.set_defaults(func=cmd_list)

    s = sub.add_parser("verify", parents=[common], help="check the reduced system")
    s.add_argument("input", help="catalog id or ansatz JSON file")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("export", parents=[common], help="residual traces as CSV")
    s.add_argument("input", help="catalog id or ansatz JSON file")
    s.set_defaults(func=cmd_export)

    s = sub.add_parser("construct", parents=[common], help="integrate the potential ODE from a spec")
    s.add_argument("spec", help="construction spec JSON file")
    s.set_defaults(func=cmd_construct)

    s = sub.add_parser("classify", parents=[common], help="rigidity / nonexistence verdict")
    s.add_argument("--hypotheses", help="JSON file with sign_sigma, sign_A, sign_BF and side conditions")
    s.add_argument("--preset", choices=analysis.PRESET_NAMES)
    regime = s.add_mutually_exclusive_group()
    for name in ("steady", "expanding", "shrinking"):
        regime.add_argument(f"--{name}", dest="regime", action="store_const", const=name)
    s.add_argument("--lambda", dest="lam", type=float, help="constant soliton function")
    s.add_argument("--fiber-scalar", type=float, help="scalar curvature of the fiber")
    s.add_argument("--base-scalar", type=float, help="scalar curvature of the base (needed when rho != 0)")
    s.add_argument("--sign-sigma", choices=("+", "-"))
    s.add_argument("--sign-A", dest="sign_A", choices=analysis.SIGNS)
    s.add_argument("--sign-BF", dest="sign_BF", choices=analysis.SIGNS)
    s.add_argument("--ricci-w-nonneg", action="store_true", help="assert the Bakry-Emery Ricci lower bound")
    s.add_argument("--growth", choices=analysis.SIDE_STATES)
    s.add_argument("--gradient-decay", choices=analysis.SIDE_STATES)
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("estimate", parents=[common], help="gradient-estimate probe table")
    s.add_argument("input", help="catalog id (an optional -lich suffix is accepted) or ansatz JSON file")
    s.add_argument("--R", type=float, default=4.0)
    s.add_argument("--x0", type=float, default=0.0)
    s.add_argument("--p", type=float, default=1.0)
    s.add_argument("--q", type=float, default=None)
    s.add_argument("--delta", type=float, default=1.0)
    s.add_argument("--count", type=int, default=401)
    s.set_defaults(func=cmd_estimate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (EinsteinWarpError, KeyError, ValueError) as exc:
        name = type(exc).__name__
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else str(exc)
        print(f"error: {name}: {msg}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
