"""Command-line front end.

Exit codes: 0 when everything checked out, 1 when a campaign found a
violation, 2 for usage, parse or I/O errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .correlations import (
    concurrence,
    fully_entangled_fraction_x,
    is_steerable_3setting,
    n_value,
    steering_observable,
)
from .states import RandomSource
from .statefile import ParsedState, load_state
from .teleport import (
    avg_fidelity_standard,
    fidelity_bounds_concurrence,
    fidelity_upper_bound_steering,
    optimal_strategy,
    restricted_strategy_x,
    simulate_teleportation,
    standard_strategy,
    unitary_optimal_fidelity,
    x_restricted_fidelity,
)
from .tripartite import PAIRS, complementarity_sums, tripartite_profile
from .verify import THEOREMS, DEFAULT_MC_INPUTS, run_campaign, sweep_mems, sweep_saturating_family

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _fmt(v: float) -> str:
    return f"{float(v) + 0.0:.6f}"  # + 0.0 folds -0.0 into 0.0


def _yes(flag: bool) -> str:
    return "yes" if flag else "no"


def analyze_lines(state: ParsedState) -> list[str]:
    lines = [f"type = {state.kind}"]
    if state.three is not None:
        prof = tripartite_profile(state.three)
        lines += [f"S{p} = {_fmt(prof.S[p])}" for p in PAIRS]
        lines += [f"tau{p} = {_fmt(prof.tau[p])}" for p in PAIRS]
        lines += [f"f{p} = {_fmt(prof.f[p])}" for p in PAIRS]
        lines += [f"{k} = {_fmt(v)}" for k, v in complementarity_sums(state.three).items()]
        return lines
    rho = state.rho
    s = steering_observable(rho)
    c = concurrence(rho)
    lower, upper = fidelity_bounds_concurrence(c)
    lines += [
        f"S = {_fmt(s)}",
        f"steerable = {_yes(is_steerable_3setting(rho))}",
        f"N = {_fmt(n_value(rho))}",
        f"f = {_fmt(avg_fidelity_standard(rho))}",
        f"f_unitary_optimal = {_fmt(unitary_optimal_fidelity(rho))}",
        f"C = {_fmt(c)}",
        f"steering_bound = {_fmt(fidelity_upper_bound_steering(s))}",
        f"concurrence_lower = {_fmt(lower)}",
        f"concurrence_upper = {_fmt(upper)}",
    ]
    if state.x is not None:
        f_ent, *chis = fully_entangled_fraction_x(state.x)
        lines += [f"chi{k} = {_fmt(v)}" for k, v in enumerate(chis)]
        lines += [f"F = {_fmt(f_ent)}", f"f_restricted = {_fmt(x_restricted_fidelity(state.x))}"]
    return lines


def cmd_analyze(args) -> int:
    print("\n".join(analyze_lines(load_state(args.file))))
    return EXIT_OK


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from exc


def cmd_sweep(args) -> int:
    if args.steps < 1:
        raise UsageError("--steps must be >= 1")
    if args.steps == 1 and args.start != args.stop:
        raise UsageError("--steps 1 needs --from equal to --to")
    if args.steps > 1 and not args.start < args.stop:
        raise UsageError("--from must be below --to")
    grid = np.linspace(args.start, args.stop, args.steps)
    try:
        if args.family == "saturating":
            table = sweep_saturating_family(grid)
        else:
            table = sweep_mems(int(args.family[-1]), grid)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    _write(args.out, table.to_csv())
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.samples < 1:
        raise UsageError("--samples must be >= 1")
    if args.tol is not None and not args.tol >= 0:
        raise UsageError("--tol must be >= 0")
    if args.inputs < 2:
        raise UsageError("--inputs must be >= 2")
    if args.workers is not None and args.workers < 1:
        raise UsageError("--workers must be >= 1")
    report = run_campaign(
        args.theorem, args.samples, args.seed, args.tol, workers=args.workers, mc_inputs=args.inputs
    )
    _write(args.out, report.to_json())
    return EXIT_OK if report.violations == 0 else EXIT_VIOLATION


def cmd_simulate(args) -> int:
    state = load_state(args.state)
    if state.rho is None:
        raise UsageError("simulate needs a two-qubit state")
    if args.inputs < 2:
        raise UsageError("--inputs must be >= 2")
    reference = None
    if args.strategy == "optimal":
        strategy, reference = optimal_strategy(state.rho), avg_fidelity_standard(state.rho)
    elif args.strategy == "restricted-pauli":
        if state.x is None:
            raise UsageError("restricted-pauli applies to X-shaped states only")
        strategy, reference = restricted_strategy_x(state.x), x_restricted_fidelity(state.x)
    else:
        strategy = standard_strategy()
    est = simulate_teleportation(state.rho, strategy, args.inputs, RandomSource(args.seed, 0, 1))
    lines = [
        f"strategy = {args.strategy}",
        f"mean = {est.mean:.6f}",
        f"std_error = {est.std_error:.6f}",
        f"samples = {est.samples}",
    ]
    if reference is None:
        lines.append("reference = none")
    else:
        lines += [f"reference = {_fmt(reference)}", f"within_3sigma = {_yes(est.agrees_with(reference))}"]
    print("\n".join(lines))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="steerport", description="EPR steering and teleportation fidelity toolkit"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="print the analysis of a state file")
    p.add_argument("file")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("sweep", help="write a parameter sweep as CSV")
    p.add_argument("--family", required=True, choices=("mems2", "mems3", "saturating"))
    p.add_argument("--from", dest="start", type=float, required=True)
    p.add_argument("--to", dest="stop", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--out", default=None, help="output path (default: stdout)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="run a randomized verification campaign")
    p.add_argument("--theorem", required=True, choices=THEOREMS)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=None, help="default depends on the theorem")
    p.add_argument("--out", default=None, help="report path (default: stdout)")
    p.add_argument("--inputs", type=int, default=DEFAULT_MC_INPUTS, help="teleportation inputs per state (MC_*)")
    p.add_argument("--workers", type=int, default=None, help="worker processes (default: STEERPORT_THREADS or 1)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("simulate", help="Monte Carlo teleportation with a two-qubit resource")
    p.add_argument("--state", required=True)
    p.add_argument("--strategy", required=True, choices=("optimal", "restricted-pauli", "standard"))
    p.add_argument("--inputs", type=int, default=DEFAULT_MC_INPUTS)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (UsageError, ValueError) as exc:
        # StateFileError is a ValueError; so are argument values the library rejects
        print(f"steerport: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
