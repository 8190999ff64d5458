"""Command-line surface: gen | metric | select | verify | semigroup | dmember.

Exit codes: 0 success or true verdict, 1 false verdict or violations,
2 usage error, 3 numerical failure.  Outputs contain no timestamps and all
iteration orders are fixed, so identical invocations produce byte-identical
files and streams.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from . import bundle as bundle_mod
from . import families, fluid, metric, selection
from .trajectory import trajectory_from_dict, trajectory_to_dict

EXIT_OK = 0
EXIT_FALSE = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3


def _read_json(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _parse_floats(text: str) -> list[float]:
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        out.append(math.inf if tok in ("inf", "Inf", "INF") else float(tok))
    return out


def _selection_config(args: argparse.Namespace) -> selection.SelectionConfig:
    return selection.SelectionConfig(
        max_iters=args.max_iters,
        quad_tol=args.quad_tol,
        tie_tol=args.tie_tol,
        seed_order=args.seed_order,
    )


def _cmd_gen(args: argparse.Namespace) -> int:
    if args.family == "sqrt-ode":
        family = families.SqrtOdeFamily(
            alpha=args.alpha,
            rate=args.rate,
            waiting_times=tuple(_parse_floats(args.waiting_times)),
            horizon=args.horizon,
            samples_per_unit=args.samples_per_unit,
            time_grid=tuple(_parse_floats(args.time_grid)),
            quantum=args.quantum,
            closure=args.closure,
        )
        result = families.gen_sqrt_ode_bundle(family)
    else:
        if args.levels:
            groups = [_parse_floats(chunk) for chunk in args.levels.split(";")]
        else:
            import random

            rng = random.Random(args.rng_seed)
            groups = []
            for _ in range(args.count):
                n_jumps = rng.randint(1, 3)
                levels = sorted(
                    (rng.randrange(-8, 9) / 4.0 for _ in range(n_jumps + 1)), reverse=True
                )
                groups.append(levels)
        jumps = _parse_floats(args.jumps) if args.jumps else []
        trajectories = []
        for levels in groups:
            js = jumps[: len(levels) - 1]
            if len(js) != len(levels) - 1:
                js = [args.horizon * (i + 1) / len(levels) for i in range(len(levels) - 1)]
            trajectories.append(families.step_trajectory(levels, js, args.horizon))
        result = bundle_mod.Bundle.from_groups(
            dim=1,
            quantum=args.quantum,
            time_grid=tuple(_parse_floats(args.time_grid)),
            groups=[(t.initial_value, [t]) for t in trajectories],
            horizon=args.horizon,
        )
    payload = json.dumps(bundle_mod.bundle_to_dict(result), indent=None)
    if args.out:
        _write_text(args.out, payload + "\n")
    else:
        print(payload)
    return EXIT_OK


def _cmd_metric(args: argparse.Namespace) -> int:
    a = trajectory_from_dict(_read_json(args.first))
    b = trajectory_from_dict(_read_json(args.second))
    report = metric.trajectory_distance(
        a, b, truncation=args.trunc_N, resolution=args.resolution, tol=args.tol
    )
    print(json.dumps(report.to_dict()))
    return EXIT_OK


def _cmd_select(args: argparse.Namespace) -> int:
    data = bundle_mod.bundle_from_dict(_read_json(args.bundle))
    config = _selection_config(args)
    point = _parse_floats(args.point)
    if args.energy_first:
        outcome = selection.energy_first_select(data, point, config)
    else:
        outcome = selection.select(data, point, config)
    trace_text = "\n".join(json.dumps(step.to_dict()) for step in outcome.trace)
    print(json.dumps(trajectory_to_dict(outcome.trajectory)))
    if trace_text:
        print(trace_text)
    if args.trace_out:
        _write_text(args.trace_out, trace_text + ("\n" if trace_text else ""))
    return EXIT_OK


def _cmd_verify(args: argparse.Namespace) -> int:
    data = bundle_mod.bundle_from_dict(_read_json(args.bundle))
    violations = bundle_mod.verify_P4(data, args.tol) + bundle_mod.verify_P5(data, args.tol)
    for violation in violations:
        print(json.dumps(violation.to_dict()))
    return EXIT_FALSE if violations else EXIT_OK


def _cmd_semigroup(args: argparse.Namespace) -> int:
    data = bundle_mod.bundle_from_dict(_read_json(args.bundle))
    config = _selection_config(args)

    def select_fn(b, point):
        return selection.select(b, point, config)

    point = _parse_floats(args.point)
    pairs = (
        [(args.t1, args.t2)]
        if args.t1 is not None and args.t2 is not None
        else [(t1, t2) for t1 in data.time_grid for t2 in data.time_grid]
    )
    all_passed = True
    for t1, t2 in pairs:
        try:
            verdict = selection.semigroup_check(select_fn, data, point, t1, t2, args.tol)
        except bundle_mod.UnknownInitialPoint as exc:
            print(json.dumps({"t1": t1, "t2": t2, "passed": False, "error": str(exc)}))
            all_passed = False
            continue
        print(
            json.dumps(
                {
                    "t1": verdict.t1,
                    "t2": verdict.t2,
                    "passed": verdict.passed,
                    "discrepancy": verdict.discrepancy,
                }
            )
        )
        all_passed = all_passed and verdict.passed
    return EXIT_OK if all_passed else EXIT_FALSE


def _cmd_dmember(args: argparse.Namespace) -> int:
    state, law = fluid.fluid_state_from_dict(_read_json(args.state))
    member = fluid.state_in_initial_set(state, law)
    print("member" if member else "non-member")
    return EXIT_OK if member else EXIT_FALSE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="semiflow",
        description="Trajectory bundles: generation, distances, selection, verification.",
    )
    parser.add_argument("--rng-seed", type=int, default=0, help="seed for generated fixtures")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="write a bundle file")
    gen.add_argument("--family", choices=["sqrt-ode", "steps"], required=True)
    gen.add_argument("--out", default=None)
    gen.add_argument("--alpha", type=float, default=0.5)
    gen.add_argument("--rate", type=float, default=1.0)
    gen.add_argument("--waiting-times", default="0,1,2,inf")
    gen.add_argument("--horizon", type=float, default=8.0)
    gen.add_argument("--samples-per-unit", type=int, default=8)
    gen.add_argument("--time-grid", default="0.5,1,1.5,2")
    gen.add_argument("--quantum", type=float, default=bundle_mod.DEFAULT_QUANTUM)
    gen.add_argument("--closure", choices=["shift", "full", "none"], default="shift")
    gen.add_argument("--levels", default=None, help="semicolon-separated level lists")
    gen.add_argument("--jumps", default=None, help="comma-separated jump times")
    gen.add_argument("--count", type=int, default=4, help="random profiles when no levels")
    gen.set_defaults(func=_cmd_gen)

    met = sub.add_parser("metric", help="distance report between two trajectory files")
    met.add_argument("first")
    met.add_argument("second")
    met.add_argument("--trunc-N", type=int, default=metric.DEFAULT_TRUNCATION)
    met.add_argument("--resolution", type=int, default=metric.DEFAULT_RESOLUTION)
    met.add_argument("--tol", type=float, default=metric.DEFAULT_DM_TOL)
    met.set_defaults(func=_cmd_metric)

    sel = sub.add_parser("select", help="reduce a bundle entry to one trajectory")
    sel.add_argument("bundle")
    sel.add_argument("--point", required=True)
    sel.add_argument("--tie-tol", type=float, default=None)
    sel.add_argument("--quad-tol", type=float, default=1e-9)
    sel.add_argument("--max-iters", type=int, default=64)
    sel.add_argument("--energy-first", action="store_true")
    sel.add_argument("--seed-order", choices=["asc", "desc"], default="asc")
    sel.add_argument("--trace-out", default=None)
    sel.set_defaults(func=_cmd_select)

    ver = sub.add_parser("verify", help="report shift/continuation violations")
    ver.add_argument("bundle")
    ver.add_argument("--tol", type=float, default=0.0)
    ver.set_defaults(func=_cmd_verify)

    semi = sub.add_parser("semigroup", help="semigroup verdicts over the time grid")
    semi.add_argument("bundle")
    semi.add_argument("--point", required=True)
    semi.add_argument("--t1", type=float, default=None)
    semi.add_argument("--t2", type=float, default=None)
    semi.add_argument("--tol", type=float, default=1e-9)
    semi.add_argument("--tie-tol", type=float, default=None)
    semi.add_argument("--quad-tol", type=float, default=1e-9)
    semi.add_argument("--max-iters", type=int, default=64)
    semi.add_argument("--seed-order", choices=["asc", "desc"], default="asc")
    semi.set_defaults(func=_cmd_semigroup)

    dmem = sub.add_parser("dmember", help="initial-data membership of a fluid state")
    dmem.add_argument("state")
    dmem.set_defaults(func=_cmd_dmember)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (FileNotFoundError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except bundle_mod.UnknownInitialPoint as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except selection.NonSingletonSelection as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FALSE
    except (
        selection.QuadratureBudgetError,
        metric.MetricRefinementError,
        bundle_mod.ClosureBudgetError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    raise SystemExit(main())
