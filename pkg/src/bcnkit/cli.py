"""Command line interface.

Exit codes: 0 success, 2 input or validation error, 3 analysis
undetermined at its cap, 4 fault detected (so scripts can branch on
`fault detect`).  Diagnostics go to stderr; machine-readable output
(`--json`) goes to stdout only.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import avalanche, formats, reporting
from .faults import CONTEXT, FUNCTIONAL, FaultSpec, detect, inject_stuck_fault
from .network import Bcn, Cascade
from .observability import (
    indistinguishable_pairs,
    is_reconstructible,
    is_weakly_observable,
)
from .reachability import attractors, attractivity_horizon, equilibria

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_UNDETERMINED = 3
EXIT_FAULT = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bcnkit",
        description="Analysis toolkit for control networks in semi-tensor-product form",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate bundled models")
    gen_sub = gen.add_subparsers(dest="what", required=True)
    gen_av = gen_sub.add_parser("avalanche", help="write the avalanche alert system")
    gen_av.add_argument("--ctx-threshold", type=int, default=4)
    gen_av.add_argument("--acc-threshold", type=int, default=2)
    gen_av.add_argument(
        "--reset-policy",
        choices=[avalanche.RESET_TO_ZERO, avalanche.DECREMENT],
        default=avalanche.RESET_TO_ZERO,
    )
    gen_av.add_argument("--out", required=True, help="output directory")

    eq = sub.add_parser("equilibria", help="equilibria of constant inputs")
    eq.add_argument("--model", required=True)
    group = eq.add_mutually_exclusive_group(required=True)
    group.add_argument("--input", type=int)
    group.add_argument("--all", action="store_true")

    at = sub.add_parser("attractors", help="cycle decomposition for one input")
    at.add_argument("--model", required=True)
    at.add_argument("--input", type=int, required=True)

    ob = sub.add_parser("observability", help="(weak) observability analysis")
    ob.add_argument("--model", required=True)
    ob.add_argument("--weak", action="store_true")
    ob.add_argument("--max-horizon", type=int, default=16)

    rc = sub.add_parser("reconstructibility", help="final-state identifiability")
    rc_src = rc.add_mutually_exclusive_group(required=True)
    rc_src.add_argument("--model")
    rc_src.add_argument("--cascade")
    rc.add_argument("--max-horizon", type=int, default=16)

    sim = sub.add_parser("simulate", help="run a cascade on a trace of inputs")
    sim.add_argument("--cascade", required=True)
    sim.add_argument("--trace", required=True)
    sim.add_argument("--c0", type=int, default=1, help="initial upstream state")
    sim.add_argument("--a0", type=int, default=1, help="initial downstream state")
    sim.add_argument("--out", help="output CSV path (default: stdout)")

    fault = sub.add_parser("fault", help="stuck-at fault tooling")
    fault_sub = fault.add_subparsers(dest="action", required=True)
    inj = fault_sub.add_parser("inject", help="simulate with an injected fault")
    inj.add_argument("--cascade", required=True)
    inj.add_argument("--trace", required=True)
    inj.add_argument("--component", choices=[CONTEXT, FUNCTIONAL], required=True)
    inj.add_argument("--onset", type=int, required=True)
    inj.add_argument("--value", type=int, help="force this state (default: freeze)")
    inj.add_argument("--c0", type=int, default=1)
    inj.add_argument("--a0", type=int, default=1)
    inj.add_argument("--out", required=True)
    det = fault_sub.add_parser("detect", help="check a logged trace for faults")
    det.add_argument("--cascade", required=True)
    det.add_argument("--trace", required=True)
    det.add_argument("--c0", type=int, help="known initial upstream state")
    det.add_argument("--a0", type=int, help="known initial downstream state")

    rep = sub.add_parser("report", help="full equilibrium/observability report")
    rep.add_argument("--cascade", required=True)
    rep.add_argument("--json", action="store_true")
    rep.add_argument("--max-horizon", type=int, default=16)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _dispatch(args)
    except (formats.FormatError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def _dispatch(args: argparse.Namespace) -> int:
    if args.command == "gen":
        return _cmd_gen(args)
    if args.command == "equilibria":
        return _cmd_equilibria(args)
    if args.command == "attractors":
        return _cmd_attractors(args)
    if args.command == "observability":
        return _cmd_observability(args)
    if args.command == "reconstructibility":
        return _cmd_reconstructibility(args)
    if args.command == "simulate":
        return _cmd_simulate(args)
    if args.command == "fault":
        return _cmd_inject(args) if args.action == "inject" else _cmd_detect(args)
    if args.command == "report":
        return _cmd_report(args)
    raise AssertionError(f"unhandled command {args.command}")


def _cmd_gen(args: argparse.Namespace) -> int:
    params = avalanche.AvalancheParams(
        ctx_threshold=args.ctx_threshold,
        acc_threshold=args.acc_threshold,
        reset_policy=args.reset_policy,
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    cascade = avalanche.build_cascade(params)
    (out / "context.bcn").write_text(formats.print_model(cascade.upstream))
    (out / "functional.bcn").write_text(formats.print_model(cascade.downstream))
    (out / "system.cascade").write_text(
        formats.print_cascade(
            "context.bcn",
            "functional.bcn",
            cascade.upstream_factors,
            cascade.downstream_factors,
        )
    )
    print(f"wrote context.bcn, functional.bcn, system.cascade to {out}")
    return EXIT_OK


def _cmd_equilibria(args: argparse.Namespace) -> int:
    model = formats.load_model(args.model)
    inputs = range(1, model.n_inputs + 1) if args.all else [args.input]
    for k in inputs:
        states = equilibria(model, k)
        if not states:
            print(f"input {k}: no equilibria")
            continue
        notes = []
        for e in states:
            horizon = attractivity_horizon(model, k, e)
            notes.append(
                f"{e} (globally attractive, settles within {horizon} steps)"
                if horizon is not None
                else f"{e}"
            )
        print(f"input {k}: " + "; ".join(notes))
    return EXIT_OK


def _cmd_attractors(args: argparse.Namespace) -> int:
    model = formats.load_model(args.model)
    report = attractors(model, args.input)
    for cyc, size, attractive in zip(
        report.cycles, report.basin_sizes, report.globally_attractive
    ):
        kind = "fixed point" if len(cyc) == 1 else f"cycle of length {len(cyc)}"
        extra = ", globally attractive" if attractive else ""
        print(f"{kind} {cyc}: basin size {size}{extra}")
    return EXIT_OK


def _cmd_observability(args: argparse.Namespace) -> int:
    model = formats.load_model(args.model)
    result = indistinguishable_pairs(model)
    if result.observable:
        print("observable: yes")
    else:
        pairs = " ".join(f"({i},{j})" for i, j in sorted(result.pairs))
        print(f"observable: no, indistinguishable pairs {pairs}")
        w = result.witness
        if w is not None:
            print(
                f"witness: states {w.pair}, inputs {list(w.inputs)}, "
                f"common outputs {list(w.outputs)}"
            )
    if args.weak:
        weak = is_weakly_observable(model, args.max_horizon)
        if weak.weakly_observable is None:
            print(f"weakly observable: undetermined at cap {args.max_horizon}")
            return EXIT_UNDETERMINED
        if weak.weakly_observable:
            print("weakly observable: yes")
        else:
            pairs = " ".join(f"({i},{j})" for i, j in sorted(weak.undistinguished))
            print(f"weakly observable: no, inseparable pairs {pairs}")
    return EXIT_OK


def _cmd_reconstructibility(args: argparse.Namespace) -> int:
    if args.model:
        model = formats.load_model(args.model)
    else:
        model = formats.load_cascade(args.cascade).flatten()
    verdict = is_reconstructible(model, args.max_horizon)
    if not verdict.reconstructible:
        pairs = " ".join(f"({i},{j})" for i, j in sorted(verdict.indistinct_pairs))
        print(f"not reconstructible, confusable pairs {pairs}")
        return EXIT_OK
    if verdict.horizon is None:
        print(f"reconstructible, horizon undetermined at cap {args.max_horizon}")
        return EXIT_UNDETERMINED
    print(f"reconstructible, horizon <= {verdict.horizon}")
    return EXIT_OK


def _cmd_simulate(args: argparse.Namespace) -> int:
    cascade = formats.load_cascade(args.cascade)
    data = formats.read_trace_csv(Path(args.trace).read_text(), cascade)
    trace = cascade.simulate(data.external, x0_up=args.c0, x0_down=args.a0)
    rendered = formats.write_trace_csv(trace)
    if args.out:
        Path(args.out).write_text(rendered)
        print(f"wrote {trace.length} steps to {args.out}")
    else:
        sys.stdout.write(rendered)
    return EXIT_OK


def _cmd_inject(args: argparse.Namespace) -> int:
    cascade = formats.load_cascade(args.cascade)
    data = formats.read_trace_csv(Path(args.trace).read_text(), cascade)
    spec = FaultSpec(args.component, args.onset, args.value)
    trace = inject_stuck_fault(
        cascade, data.external, spec, x0_up=args.c0, x0_down=args.a0
    )
    Path(args.out).write_text(formats.write_trace_csv(trace))
    print(f"wrote faulted trace ({trace.length} steps) to {args.out}")
    return EXIT_OK


def _cmd_detect(args: argparse.Namespace) -> int:
    cascade = formats.load_cascade(args.cascade)
    data = formats.read_trace_csv(Path(args.trace).read_text(), cascade)
    if data.observed is None:
        print("error: trace has no observed-output column", file=sys.stderr)
        return EXIT_INPUT
    verdict = detect(
        cascade, data.external, data.observed, x0_up=args.c0, x0_down=args.a0
    )
    if not verdict.fault_detected:
        print("consistent: no fault detected")
        return EXIT_OK
    print(
        f"fault detected at t={verdict.detection_time}, "
        f"component: {verdict.identified_component}"
    )
    return EXIT_FAULT


def _cmd_report(args: argparse.Namespace) -> int:
    cascade = formats.load_cascade(args.cascade)
    report = reporting.build_report(cascade, max_horizon=args.max_horizon)
    if args.json:
        print(json.dumps(report, indent=2))
    else:
        sys.stdout.write(reporting.render_report(report))
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
