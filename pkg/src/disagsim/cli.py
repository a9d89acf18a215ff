"""Command-line front end: single runs, sweeps, baseline calibration.

Exit codes are part of the contract: 0 on success, 1 for any
configuration or usage problem, 2 when a run aborts on the deadlock
guard.  List-valued flags accept comma lists and inclusive ranges, e.g.
``--seeds 1..5`` or ``--endpoints 1,2,4,8``.
"""

from __future__ import annotations

import argparse
import sys

from .config import ConfigError, bundled_platform, load_platform
from .engine import DEFAULT_DEADLOCK_WINDOW, DeadlockError
from .metrics import write_points_csv, write_summary_csv
from .simulator import simulate
from .sweep import SweepSpec, default_jobs, run_sweep
from .workload import CalibrationError, calibrate_baseline, load_profile, save_profile

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DEADLOCK = 2


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; 2 is reserved for deadlocks here
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def parse_int_list(text: str) -> tuple[int, ...]:
    """'1,2,4' and '1..5' (inclusive), possibly mixed: '1,3..5'."""
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ".." in part:
            lo_s, hi_s = part.split("..", 1)
            lo, hi = int(lo_s), int(hi_s)
            if hi < lo:
                raise ConfigError(f"empty range {part!r}")
            out.extend(range(lo, hi + 1))
        else:
            out.append(int(part))
    if not out:
        raise ConfigError(f"empty list {text!r}")
    return tuple(out)


def parse_float_list(text: str) -> tuple[float, ...]:
    vals = tuple(float(p) for p in text.split(",") if p.strip())
    if not vals:
        raise ConfigError(f"empty list {text!r}")
    return vals


def _load_inputs(args):
    platform = load_platform(args.platform) if args.platform else bundled_platform()
    profile = load_profile(args.profile)
    return platform, profile


def _cmd_simulate(args) -> int:
    platform, profile = _load_inputs(args)
    report = simulate(platform, profile, seed=args.seed,
                      max_instructions=args.max_instructions,
                      deadlock_window=args.deadlock_window)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(report.to_json())
    print(f"IPC: {report.ipc:.6f}")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    platform, profile = _load_inputs(args)
    spec = SweepSpec(endpoints=parse_int_list(args.endpoints),
                     latency_scales=parse_float_list(args.latency_scale),
                     seeds=parse_int_list(args.seeds),
                     max_instructions=args.max_instructions,
                     baseline=args.baseline)
    try:
        result = run_sweep(platform, profile, spec, jobs=args.jobs)
    except ValueError as exc:
        raise ConfigError(str(exc))
    write_points_csv(args.out, result.point_rows())
    if args.summary_out:
        write_summary_csv(args.summary_out, result.summary_rows())
    print(result.format_summary_table())
    return EXIT_OK


def _cmd_calibrate(args) -> int:
    platform, profile = _load_inputs(args)
    result = calibrate_baseline(profile, platform, target_ipc=args.target_ipc,
                                tol=args.tol, max_iter=args.max_iter,
                                instructions=args.instructions,
                                seeds=parse_int_list(args.seeds))
    if args.out:
        save_profile(result.profile, args.out)
    status = "converged" if result.converged else "NOT CONVERGED"
    print(f"dep_prob: {result.profile.dep_prob:.6f}")
    print(f"achieved IPC: {result.achieved_ipc:.6f} "
          f"(target {args.target_ipc}, {status} in {result.iterations} iterations)")
    return EXIT_OK if result.converged else EXIT_CONFIG


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="disagsim",
                     description="Queue-model simulator for disaggregated-memory platforms")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--platform", help="platform JSON (default: bundled Xeon platform)")
        p.add_argument("--profile", required=True, help="workload profile JSON")

    p_sim = sub.add_parser("simulate", help="run one simulation and write its report")
    add_common(p_sim)
    p_sim.add_argument("--seed", type=int, default=1)
    p_sim.add_argument("--max-instructions", type=int, default=1_000_000)
    p_sim.add_argument("--deadlock-window", type=int, default=DEFAULT_DEADLOCK_WINDOW)
    p_sim.add_argument("--out", help="write the report JSON here")
    p_sim.set_defaults(func=_cmd_simulate)

    p_sweep = sub.add_parser("sweep", help="endpoint x latency-scale grid, CSV out")
    add_common(p_sweep)
    p_sweep.add_argument("--endpoints", default="1,2,4,8")
    p_sweep.add_argument("--latency-scale", default="1.0,0.5")
    p_sweep.add_argument("--seeds", default="1..5")
    p_sweep.add_argument("--max-instructions", type=int, default=1_000_000)
    p_sweep.add_argument("--baseline", action="store_true",
                         help="also run the remote-free baseline once per seed")
    p_sweep.add_argument("--jobs", type=int, default=None,
                         help=f"parallel worker processes (default: $DISAGSIM_JOBS or 1)")
    p_sweep.add_argument("--out", required=True, help="per-point CSV path")
    p_sweep.add_argument("--summary-out", help="mean-over-seeds summary CSV path")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_cal = sub.add_parser("calibrate", help="tune dep_prob to hit a baseline IPC")
    add_common(p_cal)
    p_cal.add_argument("--target-ipc", type=float, required=True)
    p_cal.add_argument("--tol", type=float, default=0.045,
                       help="relative IPC tolerance (default 0.045)")
    p_cal.add_argument("--max-iter", type=int, default=30)
    p_cal.add_argument("--instructions", type=int, default=80_000,
                       help="instructions per calibration run")
    p_cal.add_argument("--seeds", default="11..15")
    p_cal.add_argument("--out", help="write the calibrated profile JSON here")
    p_cal.set_defaults(func=_cmd_calibrate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (ConfigError, CalibrationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        name = getattr(exc, "filename", None)
        print(f"error: {exc.strerror or exc}: {name}" if name else f"error: {exc}",
              file=sys.stderr)
        return EXIT_CONFIG
    except DeadlockError as exc:
        print(f"deadlock: {exc}", file=sys.stderr)
        return EXIT_DEADLOCK


if __name__ == "__main__":
    sys.exit(main())
