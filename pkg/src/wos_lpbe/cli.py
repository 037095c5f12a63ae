"""Command-line interface: ``solve``, ``profile``, ``bench`` and ``survival-curve``.

Exit codes: 0 success, 2 usage or configuration error, 3 numeric failure
(more than 0.1% of walks hit the step limit).
"""
from __future__ import annotations

import argparse
import csv
import io
import os
import sys

import numpy as np

from .analytic import analytic_profile
from .engine import max_threads
from .errors import WosError
from .estimator import estimate, laboriousness
from .geometry import GEOMETRIES, Vec3, make_domain, profile_point
from .walker import DEFAULT_MAX_STEPS, Method, SolverConfig, survival_probability

SEED_ENV = "WOS_LPBE_SEED"
TRUNCATION_LIMIT = 1e-3
EXIT_USAGE = 2
EXIT_NUMERIC = 3

_DEFAULT_R_MAX = {"half_space": 5.0, "slab": None, "cylinder": 4.0, "sphere": 4.0}


class UsageError(Exception):
    pass


def fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, str):
        return value
    return f"{float(value):.9g}"


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV}={raw!r} is not an integer") from None


def _point(text: str) -> Vec3:
    try:
        return Vec3.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_geometry(p: argparse.ArgumentParser, default: str = "slab") -> None:
    g = p.add_argument_group("geometry")
    g.add_argument("--geometry", choices=GEOMETRIES, default=default)
    g.add_argument("--L", type=float, default=1.0, help="slab half-width (default 1)")
    g.add_argument("--R", type=float, default=1.0, help="cylinder/sphere radius (default 1)")


def _add_solver(p: argparse.ArgumentParser, threads: bool = True) -> None:
    s = p.add_argument_group("solver")
    s.add_argument("--kappa", type=float, default=1.0, help="inverse Debye length (default 1)")
    s.add_argument("--n", type=int, default=100_000, help="walkers per estimate (default 1e5)")
    s.add_argument("--delta", type=float, default=1e-4, help="absorption layer thickness (default 1e-4)")
    s.add_argument("--seed", type=int, default=None,
                   help=f"master seed (default: ${SEED_ENV}, else 0)")
    s.add_argument("--max-steps", type=int, default=DEFAULT_MAX_STEPS)
    if threads:
        s.add_argument("--threads", type=int, default=1,
                       help="worker threads for the walks (default 1; output does not depend on it)")


def _add_method(p: argparse.ArgumentParser) -> None:
    p.add_argument("--method", choices=[m.value for m in Method], default="new")
    p.add_argument("--cutoff", type=float, default=None,
                   help="weighted method on open domains: distance beyond which walkers score 0")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wos-lpbe",
        description="Walk-on-spheres Monte Carlo for the linearized Poisson-Boltzmann equation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="estimate the potential at one point")
    _add_geometry(p)
    _add_solver(p)
    _add_method(p)
    p.add_argument("--point", type=_point, required=True, help="x,y,z (use --point=-1,0,0 for negatives)")
    p.add_argument("--csv", metavar="PATH", help="also write the result as a one-row CSV")

    p = sub.add_parser("profile", help="Monte Carlo and analytic potential along the benchmark coordinate")
    _add_geometry(p)
    _add_solver(p)
    _add_method(p)
    p.add_argument("--r-min", type=float, default=0.0)
    p.add_argument("--r-max", type=float, default=None,
                   help="default: 5 (half_space), L (slab), 4 (cylinder, sphere)")
    p.add_argument("--r-steps", type=int, default=21, help="number of sweep points (default 21)")
    p.add_argument("--output", metavar="PATH", help="write CSV here instead of stdout")

    p = sub.add_parser("bench", help="time consumption of both methods (single threaded)")
    _add_geometry(p)
    _add_solver(p, threads=False)
    p.add_argument("--cutoff", type=float, default=None, help="weighted-method cutoff (open domains)")
    p.add_argument("--point", type=_point, default=None,
                   help="x,y,z (default: r=0 profile point, the mid-plane for the slab)")
    p.add_argument("--runs", type=int, default=100, help="independent runs per method (default 100)")
    p.add_argument("--csv", metavar="PATH", help="also write the table as CSV")

    p = sub.add_parser("survival-curve", help="tabulate the survival probability d*kappa/sinh(d*kappa)")
    p.add_argument("--kappa", type=float, default=1.0)
    p.add_argument("--d-max", type=float, default=5.0)
    p.add_argument("--steps", type=int, default=100, help="rows, at d = d_max * i / steps, i = 1..steps")
    p.add_argument("--output", metavar="PATH", help="write CSV here instead of stdout")
    return parser


def _config(args, method: str | None = None) -> SolverConfig:
    seed = _default_seed() if args.seed is None else args.seed
    return SolverConfig(
        kappa=args.kappa,
        delta=args.delta,
        n_walkers=args.n,
        seed=seed,
        method=Method(method or args.method),
        max_steps=args.max_steps,
        cutoff_distance=args.cutoff,
    )


def _threads(args) -> int:
    if args.threads < 1:
        raise UsageError("--threads must be >= 1")
    if args.threads > max_threads():
        print(f"note: {args.threads} threads requested, numba allows {max_threads()}; "
              "set NUMBA_NUM_THREADS to raise the limit", file=sys.stderr)
    return args.threads


def _write_csv(rows: list[list], header: list[str], path: str | None, stdout) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    if path is None:
        stdout.write(buf.getvalue())
    else:
        with open(path, "w", newline="") as fh:
            fh.write(buf.getvalue())


def _truncation_failure(n_truncated: int, n: int) -> bool:
    return n_truncated > TRUNCATION_LIMIT * n


def cmd_solve(args, stdout) -> int:
    domain = make_domain(args.geometry, L=args.L, R=args.R)
    cfg = _config(args)
    est = estimate(domain, cfg, args.point, threads=_threads(args))
    fields = [
        ("geometry", args.geometry), ("point", f"{fmt(args.point.x)},{fmt(args.point.y)},{fmt(args.point.z)}"),
        ("kappa", cfg.kappa), ("delta", cfg.delta), ("method", cfg.method.value), ("seed", cfg.seed),
        ("mean", est.mean), ("std_error", est.std_error), ("n", est.n_total),
        ("n_survived", est.n_survived), ("n_truncated", est.n_truncated),
    ]
    for name, value in fields:
        stdout.write(f"{name:<12}{fmt(value)}\n")
    # timing goes to stderr so stdout is reproducible
    print(f"wall_time   {est.wall_time:.3f} s", file=sys.stderr)
    if args.csv:
        header = ["geometry", "x", "y", "z", "kappa", "delta", "n", "seed", "method",
                  "mean", "std_error", "n_survived", "n_truncated"]
        row = [args.geometry, *args.point, cfg.kappa, cfg.delta, est.n_total, cfg.seed,
               cfg.method.value, est.mean, est.std_error, est.n_survived, est.n_truncated]
        _write_csv([row], header, args.csv, stdout)
    if _truncation_failure(est.n_truncated, est.n_total):
        print(f"error: {est.n_truncated} of {est.n_total} walks hit max_steps", file=sys.stderr)
        return EXIT_NUMERIC
    return 0


def profile_radii(geometry: str, L: float, r_min: float, r_max: float | None, steps: int) -> np.ndarray:
    if r_max is None:
        r_max = L if geometry == "slab" else _DEFAULT_R_MAX[geometry]
    if steps < 1:
        raise UsageError("--r-steps must be >= 1")
    if r_max < r_min:
        raise UsageError("--r-max must not be below --r-min")
    lo = -L if geometry == "slab" else 0.0
    hi = L if geometry == "slab" else np.inf
    if r_min < lo or r_max > hi:
        raise UsageError(f"sweep [{r_min}, {r_max}] leaves the {geometry} domain")
    return np.linspace(r_min, r_max, steps) if steps > 1 else np.array([r_min])


def cmd_profile(args, stdout) -> int:
    domain = make_domain(args.geometry, L=args.L, R=args.R)
    cfg = _config(args)
    threads = _threads(args)
    radii = profile_radii(args.geometry, args.L, args.r_min, args.r_max, args.r_steps)
    rows = []
    truncated = 0
    for i, r in enumerate(radii):
        r = float(r)
        # disjoint walker indices per sweep point
        est = estimate(domain, cfg, profile_point(domain, r), threads=threads, first_index=i * cfg.n_walkers)
        truncated = max(truncated, est.n_truncated)
        exact = analytic_profile(args.geometry, r, cfg.kappa, L=args.L, R=args.R)
        rows.append([r, est.mean, est.std_error, exact, est.n_total, cfg.delta, cfg.seed])
    header = ["r", "mc_mean", "mc_std_error", "analytic", "n", "delta", "seed"]
    _write_csv(rows, header, args.output, stdout)
    if _truncation_failure(truncated, cfg.n_walkers):
        print(f"error: up to {truncated} walks per point hit max_steps", file=sys.stderr)
        return EXIT_NUMERIC
    return 0


def cmd_bench(args, stdout) -> int:
    if args.runs < 2:
        raise UsageError("--runs must be >= 2")
    domain = make_domain(args.geometry, L=args.L, R=args.R)
    point = args.point if args.point is not None else profile_point(domain, 0.0 if args.geometry == "slab" else 1.0)
    cfg_new = _config(args, "new").with_(cutoff_distance=None)
    cfg_old = _config(args, "old")
    report = laboriousness(domain, cfg_new, cfg_old, point, runs=args.runs)
    stdout.write(f"{'method':<12}{'CPU time per run (secs)':>26}{'variance':>18}{'time consumption':>20}\n")
    for rec in report.records:
        stdout.write(f"{rec.method.value + ' method':<12}{fmt(rec.cpu_time_per_run):>26}"
                     f"{fmt(rec.variance):>18}{fmt(rec.laboriousness):>20}\n")
    stdout.write(f"geometry={args.geometry} L={fmt(args.L)} R={fmt(args.R)} "
                 f"point={fmt(point.x)},{fmt(point.y)},{fmt(point.z)} kappa={fmt(report.kappa)} "
                 f"delta={fmt(report.delta)} n={report.n_walkers} runs={report.runs}\n")
    if args.csv:
        header = ["method", "cpu_time_per_run", "variance", "time_consumption", "mean",
                  "runs", "n", "delta", "kappa", "geometry", "L", "R"]
        rows = [[r.method.value, r.cpu_time_per_run, r.variance, r.laboriousness, r.mean,
                 report.runs, report.n_walkers, report.delta, report.kappa, args.geometry, args.L, args.R]
                for r in report.records]
        _write_csv(rows, header, args.csv, stdout)
    return 0


def cmd_survival_curve(args, stdout) -> int:
    if not args.d_max > 0:
        raise UsageError("--d-max must be positive")
    if args.steps < 1:
        raise UsageError("--steps must be >= 1")
    if not args.kappa >= 0:
        raise UsageError("--kappa must be >= 0")
    rows = []
    for i in range(1, args.steps + 1):
        d = args.d_max * i / args.steps
        rows.append([d, survival_probability(d, args.kappa)])
    _write_csv(rows, ["d", "p"], args.output, stdout)
    return 0


COMMANDS = {
    "solve": cmd_solve,
    "profile": cmd_profile,
    "bench": cmd_bench,
    "survival-curve": cmd_survival_curve,
}


def main(argv: list[str] | None = None, stdout=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args, stdout)
    except (UsageError, WosError, ValueError) as exc:
        print(f"{parser.prog} {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
