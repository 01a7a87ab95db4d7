"""Command-line front end.

Subcommands: ``run`` (one configured experiment), ``suite`` (acceptance or
figures), ``ode`` (integrate the high-resolution equation and certify the
continuous bound), ``scan`` (step-size monotonicity scan).  Relative
outputs land under $ACCELCERT_OUT (default: current directory).  Exit
codes: 0 pass, 1 certificate failure, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import analysis
from .harness import (ConfigError, OUTPUT_ROOT_ENV, _output_root, fmt,
                      load_config, execute, suite, write_ode_csv,
                      write_scan_csv, write_summary)
from .hires_ode import check_continuous_bound, integrate
from .objectives import SpectrumSpec, make_quadratic, make_reg_logistic, resolve_minimizer


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="accelcert",
        description="Momentum-method convergence certificates at desk scale.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute one experiment config (JSON)")
    p_run.add_argument("--config", required=True, help="path to the config document")
    p_run.add_argument("--out", default=None,
                       help=f"output root (default: ${OUTPUT_ROOT_ENV} or .)")

    p_suite = sub.add_parser("suite", help="run a predefined experiment suite")
    p_suite.add_argument("name", choices=("acceptance", "figures"))
    p_suite.add_argument("--out", default=None)

    p_ode = sub.add_parser("ode", help="integrate the high-resolution equation")
    p_ode.add_argument("--objective", default="quad",
                       choices=("quad", "quad-rot", "reg-logistic"))
    p_ode.add_argument("--spectrum", type=_floats, default=[1.0, 4.0],
                       help="comma-separated eigenvalues (quad objectives)")
    p_ode.add_argument("--rotation-seed", type=int, default=None)
    p_ode.add_argument("--data-seed", type=int, default=3)
    p_ode.add_argument("--n-samples", type=int, default=50)
    p_ode.add_argument("--dim", type=int, default=2)
    p_ode.add_argument("--reg", type=float, default=0.1)
    p_ode.add_argument("--s", type=float, required=True)
    p_ode.add_argument("--T", type=float, required=True)
    p_ode.add_argument("--h", type=float, required=True)
    p_ode.add_argument("--which", choices=("simplified", "original"),
                       default="simplified")
    p_ode.add_argument("--x0", type=_floats, default=None,
                       help="comma-separated start (default: ones)")
    p_ode.add_argument("--out", default=None)
    p_ode.add_argument("--output-path", default="ode.csv")

    p_scan = sub.add_parser("scan", help="monotonicity scan over step sizes")
    p_scan.add_argument("--mu", type=float, required=True)
    p_scan.add_argument("--spectrum", type=_floats, required=True)
    p_scan.add_argument("--s-grid", type=_floats, required=True)
    p_scan.add_argument("--K", type=int, default=500)
    p_scan.add_argument("--x0", type=_floats, default=None)
    p_scan.add_argument("--seed", type=int, default=0)
    p_scan.add_argument("--out", default=None)
    p_scan.add_argument("--output-path", default="scan.csv")
    return parser


def _cmd_run(args) -> int:
    config = load_config(args.config)
    result = execute(config, out_root=args.out)
    for key, value in result.summary.items():
        print(f"{key}: {value}")
    return 0 if result.ok else 1


def _cmd_ode(args) -> int:
    if args.objective == "quad":
        f = make_quadratic(SpectrumSpec(args.spectrum))
    elif args.objective == "quad-rot":
        f = make_quadratic(SpectrumSpec(args.spectrum),
                           rotation_seed=args.rotation_seed or 0)
    else:
        f = make_reg_logistic(args.data_seed, args.n_samples, args.dim, args.reg)
    f = resolve_minimizer(f)
    x0 = np.ones(f.dim) if args.x0 is None else np.asarray(args.x0, float)
    if x0.shape != (f.dim,):
        raise ConfigError(f"x0: length {len(x0)} does not match dimension {f.dim}")
    solution = integrate(f, x0, args.s, args.T, args.h, which=args.which)
    root = _output_root(args.out)
    csv_path = root / args.output_path
    write_ode_csv(solution, f, args.s, f.mu, csv_path)
    summary = {
        "objective": f.name, "equation": args.which, "s": fmt(args.s),
        "T": fmt(args.T), "h": fmt(args.h), "samples": len(solution),
    }
    status = 0
    if args.which == "simplified":
        report = check_continuous_bound(solution, f, args.s, f.mu)
        summary["bound_violations"] = report.n_failed
        summary["bound_worst_margin"] = fmt(report.worst_margin)
        summary["worst_energy_ratio"] = fmt(report.details["worst_energy_ratio"])
        status = 0 if report.passed else 1
    base = csv_path.with_suffix("")
    write_summary(summary, base.parent / (base.name + ".summary.txt"))
    for key, value in summary.items():
        print(f"{key}: {value}")
    return status


def _cmd_scan(args) -> int:
    report = analysis.monotonicity_scan(args.mu, args.spectrum, args.s_grid,
                                        K=args.K, x0=args.x0,
                                        x0_seed=args.seed)
    root = _output_root(args.out)
    write_scan_csv(report, root / args.output_path)
    for s, (pred, obs) in report.per_s.items():
        print(f"s={s:g}: predicted_monotone={str(pred).lower()} "
              f"observed_monotone={str(obs).lower()}")
    print(f"agreement: {str(report.agreement).lower()}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "suite":
            return suite(args.name, out_root=args.out)
        if args.command == "ode":
            return _cmd_ode(args)
        return _cmd_scan(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
