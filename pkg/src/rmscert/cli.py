"""Command line front end: run / verify / sweep.

Exit codes: 0 success, 2 config error, 3 precondition (inadmissible
parameters), 4 divergence guard, 5 verification failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import certificate, config, lyapunov
from .core import DivergenceError, PreconditionError
from .engine import run as run_trajectory
from .schedules import Constant

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PRECONDITION = 3
EXIT_DIVERGENCE = 4
EXIT_VERIFICATION = 5


def _steps_to_tolerance(trace, gap_tol: float):
    hit = np.flatnonzero(trace.f_gap <= gap_tol)
    return int(hit[0]) if hit.size else None


def _summarize(trace, exp, spec):
    final = trace.final()
    v_final = lyapunov.value(spec, exp.objective, final.x, final.s)
    return {
        "config": exp.resolved,
        "steps": len(trace) - 1,
        "final_resid_inf": final.resid_inf,
        "max_resid_inf": float(np.max(trace.resid_inf)),
        "final_f_gap": final.f_gap,
        "V_final": v_final,
        "steps_to_tolerance": _steps_to_tolerance(trace, exp.gap_tolerance),
        "gap_tolerance": exp.gap_tolerance,
    }


def cmd_run(exp: config.ExperimentConfig, out_dir: str, quiet: bool) -> int:
    spec = lyapunov.make_spec(exp.params, exp.objective.L, exp.objective.d)
    comment = "config: " + config.to_json(exp.resolved)
    try:
        trace = run_trajectory(exp.params, exp.objective, exp.init,
                               exp.schedule, exp.steps)
    except DivergenceError as e:
        if e.trace is not None:
            e.trace.write_csv(os.path.join(out_dir, "trace.csv"), comment)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DIVERGENCE
    trace.write_csv(os.path.join(out_dir, "trace.csv"), comment)
    summary = _summarize(trace, exp, spec)
    with open(os.path.join(out_dir, "summary.json"), "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    if not quiet:
        print(f"final resid_inf = {summary['final_resid_inf']:.6e}  "
              f"max resid_inf = {summary['max_resid_inf']:.6e}  "
              f"V(T) = {summary['V_final']:.6e}")
    return EXIT_OK


def cmd_verify(exp: config.ExperimentConfig, out_dir: str, quiet: bool) -> int:
    spec = lyapunov.make_spec(exp.params, exp.objective.L, exp.objective.d)
    report = certificate.verify_suite(spec, exp.objective, exp.params,
                                      exp.sampler, q=exp.q)
    payload = report.to_dict()
    payload["config"] = exp.resolved
    with open(os.path.join(out_dir, "report.json"), "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    if not quiet:
        print(report.table())
    return EXIT_OK if report.passed else EXIT_VERIFICATION


def cmd_sweep(exp: config.ExperimentConfig, out_dir: str, quiet: bool) -> int:
    """Constant-input sweep: burn-in speed vs asymptotic error floor.

    For each level u the trajectory runs exp.steps steps; the table records
    the first step with f_gap <= gap_tolerance and the max of resid_inf over
    the trailing 10% of records.
    """
    rows = []
    for u in exp.u_levels:
        sched = Constant(float(u))
        trace = run_trajectory(exp.params, exp.objective, exp.init, sched,
                               exp.steps)
        steps = _steps_to_tolerance(trace, exp.gap_tolerance)
        tail = max(1, (len(trace) + 9) // 10)
        floor = float(np.max(trace.resid_inf[-tail:]))
        rows.append((float(u), steps, floor))
    path = os.path.join(out_dir, "sweep.csv")
    with open(path, "w") as fh:
        fh.write("# config: " + config.to_json(exp.resolved) + "\n")
        fh.write("u,steps_to_tolerance,error_floor\n")
        for u, steps, floor in rows:
            s = "" if steps is None else str(steps)
            fh.write(f"{u:.17g},{s},{floor:.17g}\n")
    if not quiet:
        for u, steps, floor in rows:
            print(f"u = {u:g}: steps_to_tol = {steps}, floor = {floor:.6e}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="rmscert",
        description="Adaptive-gradient trajectories with a numerically "
                    "verified decrease certificate.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, doc in (("run", "run one trajectory and write trace.csv + summary.json"),
                      ("verify", "run the certificate suite and write report.json"),
                      ("sweep", "constant-input sweep; writes sweep.csv")):
        sp = sub.add_parser(name, help=doc)
        sp.add_argument("--config", required=True, help="path to config JSON")
        sp.add_argument("--out", default=".", help="output directory")
        sp.add_argument("--seed", type=int, default=None,
                        help="override the top-level seed")
        sp.add_argument("--tol", type=float, default=None,
                        help="override the inequality tolerance")
        sp.add_argument("--quiet", action="store_true")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        exp = config.load(args.config, seed_override=args.seed,
                          tol_override=args.tol)
    except config.ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        os.makedirs(args.out, exist_ok=True)
    except OSError as e:
        print(f"config error: cannot create output dir: {e}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if args.command == "run":
            return cmd_run(exp, args.out, args.quiet)
        if args.command == "verify":
            return cmd_verify(exp, args.out, args.quiet)
        if args.command == "sweep":
            return cmd_sweep(exp, args.out, args.quiet)
    except PreconditionError as e:
        print(f"precondition failure: {e}", file=sys.stderr)
        return EXIT_PRECONDITION
    except DivergenceError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DIVERGENCE
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
