"""Experiment configuration, execution, and flat-file persistence.

A run is described by a single JSON document (the only config format; the
schema is documented in the README and in :func:`parse_config`).  Outputs
are CSV files with full double precision via shortest round-trip
formatting, plus a machine-parsable ``key: value`` summary and an echo of
the resolved config for provenance.  Relative output paths resolve under
the directory named by the ``ACCELCERT_OUT`` environment variable (default:
current directory).
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import analysis, lyapunov
from .hires_ode import OdeState, probe_point
from .lyapunov import lyap_ode
from .objectives import (Objective, SpectrumSpec, make_quadratic,
                         make_reg_logistic, resolve_minimizer, sample_in_ball)
from .optimizers import METHODS, NonFiniteIterateError, Trajectory, run
from .report import CertReport

OUTPUT_ROOT_ENV = "ACCELCERT_OUT"

OBJECTIVE_IDS = ("quad", "quad-rot", "reg-logistic")

#: Flat config keys that parameterize each objective id.
_OBJECTIVE_PARAMS = {
    "quad": ("spectrum",),
    "quad-rot": ("spectrum", "rotation_seed"),
    "reg-logistic": ("data_seed", "n_samples", "dim", "reg"),
}

_S_SYMBOLS = ("1/L", "1/(2L)", "1/(4mu)")


class ConfigError(ValueError):
    """A config document failed validation; the message names the field."""


def fmt(x) -> str:
    """Shortest round-trip decimal form of a float (RFC-4180 safe)."""
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return ""
        return repr(x)
    return str(x)


@dataclass
class ExperimentConfig:
    """Declarative description of one experiment run."""

    objective: str
    objective_params: dict
    method: str
    s: float | str
    K: int
    seed: int
    x0: object = None               # explicit list or {"random_ball": {...}}
    lyapunov: Optional[str] = None  # "gc" | "iv"
    bound: Optional[str] = None     # theorem id
    output_path: Optional[str] = None

    def to_dict(self) -> dict:
        doc = {"objective": self.objective, **self.objective_params,
               "method": self.method, "s": self.s, "K": self.K,
               "seed": self.seed}
        if self.x0 is not None:
            doc["x0"] = self.x0
        if self.lyapunov is not None:
            doc["lyapunov"] = self.lyapunov
        if self.bound is not None:
            doc["bound"] = self.bound
        if self.output_path is not None:
            doc["output_path"] = self.output_path
        return doc


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate a JSON config document.

    Required fields: ``objective`` (one of quad, quad-rot, reg-logistic,
    plus its parameters as flat keys), ``method``, ``s`` (number or one of
    "1/L", "1/(2L)", "1/(4mu)"), ``K``, ``seed``.  Optional: ``x0``
    (explicit array, or {"random_ball": {"radius": r}} drawn from ``seed``;
    defaults to a radius-1 ball point), ``lyapunov`` ("gc"/"iv"),
    ``bound`` (theorem id), ``output_path``.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")

    def require(key):
        if key not in doc:
            raise ConfigError(f"missing required field: {key}")
        return doc[key]

    objective = require("objective")
    if objective not in OBJECTIVE_IDS:
        raise ConfigError(
            f"objective: unknown id {objective!r}; expected one of {OBJECTIVE_IDS}")
    params = {}
    for key in _OBJECTIVE_PARAMS[objective]:
        if key not in doc:
            raise ConfigError(f"{key}: required by objective {objective!r}")
        params[key] = doc[key]

    method = require("method")
    if method not in METHODS:
        raise ConfigError(f"method: unknown id {method!r}; expected one of {METHODS}")

    s = require("s")
    if isinstance(s, str):
        if s not in _S_SYMBOLS:
            raise ConfigError(f"s: unknown symbolic value {s!r}; "
                              f"expected a number or one of {_S_SYMBOLS}")
    elif isinstance(s, (int, float)):
        if not s > 0:
            raise ConfigError("s: must be positive")
        s = float(s)
    else:
        raise ConfigError("s: must be a number or a symbolic string")

    K = require("K")
    if not isinstance(K, int) or K < 0:
        raise ConfigError("K: must be a nonnegative integer")
    seed = require("seed")
    if not isinstance(seed, int):
        raise ConfigError("seed: must be an integer")

    x0 = doc.get("x0")
    if x0 is not None and not isinstance(x0, (list, dict)):
        raise ConfigError("x0: must be an array or a random_ball object")
    if isinstance(x0, dict):
        if set(x0) != {"random_ball"} or "radius" not in x0["random_ball"]:
            raise ConfigError('x0: object form must be {"random_ball": {"radius": r}}')

    lyap_form = doc.get("lyapunov")
    if lyap_form is not None and lyap_form not in lyapunov.FORM_METHODS:
        raise ConfigError(f"lyapunov: unknown form {lyap_form!r}")
    if lyap_form is not None and method not in lyapunov.FORM_METHODS[lyap_form]:
        raise ConfigError(
            f"lyapunov: form {lyap_form!r} is incompatible with method {method!r}")
    bound = doc.get("bound")
    if bound is not None:
        if bound not in analysis.THEOREM_METHODS:
            raise ConfigError(f"bound: unknown theorem {bound!r}")
        if method not in analysis.THEOREM_METHODS[bound][0]:
            raise ConfigError(
                f"bound: theorem {bound!r} is incompatible with method {method!r}")

    output_path = doc.get("output_path")
    if output_path is not None and not isinstance(output_path, str):
        raise ConfigError("output_path: must be a string")

    return ExperimentConfig(objective=objective, objective_params=params,
                            method=method, s=s, K=K, seed=seed, x0=x0,
                            lyapunov=lyap_form, bound=bound,
                            output_path=output_path)


def load_config(path: str | Path) -> ExperimentConfig:
    return parse_config(Path(path).read_text())


def build_objective(config: ExperimentConfig) -> Objective:
    """Instantiate the configured objective with its minimizer resolved."""
    p = config.objective_params
    if config.objective == "quad":
        f = make_quadratic(SpectrumSpec(p["spectrum"]))
    elif config.objective == "quad-rot":
        f = make_quadratic(SpectrumSpec(p["spectrum"]), rotation_seed=p["rotation_seed"])
    else:
        f = make_reg_logistic(p["data_seed"], p["n_samples"], p["dim"], p["reg"])
    return resolve_minimizer(f)


def resolve_s(spec: float | str, f: Objective) -> float:
    if isinstance(spec, str):
        if spec == "1/L":
            return 1.0 / f.lipschitz
        if spec == "1/(2L)":
            return 1.0 / (2.0 * f.lipschitz)
        if spec == "1/(4mu)":
            return 1.0 / (4.0 * f.mu)
        raise ConfigError(f"s: unknown symbolic value {spec!r}")
    return float(spec)


def resolve_x0(config: ExperimentConfig, f: Objective) -> np.ndarray:
    if config.x0 is None:
        spec = {"random_ball": {"radius": 1.0}}
    else:
        spec = config.x0
    if isinstance(spec, dict):
        rng = np.random.default_rng(config.seed)
        return sample_in_ball(rng, f.dim, float(spec["random_ball"]["radius"]))
    x0 = np.asarray(spec, dtype=float)
    if x0.shape != (f.dim,):
        raise ConfigError(f"x0: length {x0.shape} does not match dimension {f.dim}")
    return x0


@dataclass
class ExecutionResult:
    config: ExperimentConfig
    ok: bool
    summary: dict
    csv_path: Optional[Path] = None
    summary_path: Optional[Path] = None
    echo_path: Optional[Path] = None
    reports: list = field(default_factory=list)
    trajectory: Optional[Trajectory] = None


def _output_root(out_root: Optional[str | Path]) -> Path:
    if out_root is not None:
        root = Path(out_root)
    else:
        root = Path(os.environ.get(OUTPUT_ROOT_ENV, "."))
    root.mkdir(parents=True, exist_ok=True)
    return root


def write_trajectory_csv(traj: Trajectory, path: Path):
    """Schema: k,f_gap,grad_norm[,lyapunov][,bound]."""
    header = ["k", "f_gap", "grad_norm"]
    if traj.lyapunov is not None:
        header.append("lyapunov")
    if traj.bound is not None:
        header.append("bound")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for k in range(len(traj)):
            row = [str(k), fmt(float(traj.f_gap[k])), fmt(float(traj.grad_norm[k]))]
            if traj.lyapunov is not None:
                row.append(fmt(float(traj.lyapunov[k])))
            if traj.bound is not None:
                row.append(fmt(float(traj.bound[k])))
            writer.writerow(row)


def write_ode_csv(solution: list[OdeState], f: Objective, s: float, mu: float,
                  path: Path):
    """Schema: t,X0..X{d-1},Xdot0..Xdot{d-1},f_gap,lyapunov (gap and energy
    at the probe point / along the solution)."""
    d = f.dim
    header = (["t"] + [f"X{i}" for i in range(d)]
              + [f"Xdot{i}" for i in range(d)] + ["f_gap", "lyapunov"])
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for st in solution:
            gap = f.gap(probe_point(st.X, st.Xdot, s, mu))
            energy = lyap_ode(f, st.X, st.Xdot, s, mu, t=st.t).energy
            row = ([fmt(st.t)] + [fmt(float(v)) for v in st.X]
                   + [fmt(float(v)) for v in st.Xdot]
                   + [fmt(float(gap)), fmt(float(energy))])
            writer.writerow(row)


def write_scan_csv(report: analysis.ScanReport, path: Path):
    """Schema: s,lambda,discriminant,root1_re,root1_im,root2_re,root2_im,
    predicted_monotone,observed_monotone."""
    header = ["s", "lambda", "discriminant", "root1_re", "root1_im",
              "root2_re", "root2_im", "predicted_monotone", "observed_monotone"]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in report.rows:
            r1, r2 = row.roots
            writer.writerow([
                fmt(row.s), fmt(row.lam), fmt(row.discriminant),
                fmt(r1.real), fmt(r1.imag), fmt(r2.real), fmt(r2.imag),
                "true" if row.predicted_monotone else "false",
                "true" if row.observed_monotone else "false",
            ])


def write_summary(summary: dict, path: Path):
    with open(path, "w") as fh:
        for key, value in summary.items():
            fh.write(f"{key}: {value}\n")


def execute(config: ExperimentConfig,
            out_root: Optional[str | Path] = None) -> ExecutionResult:
    """Run one configured experiment and persist its artifacts.

    Writes the trajectory CSV, a ``key: value`` certificate summary, and an
    echo of the fully resolved config (symbolic step size and seeded x0
    made explicit) whose execution reproduces the run byte for byte.
    A non-finite iterate aborts the run; the summary then records the
    failing iteration and the result is marked failed.
    """
    root = _output_root(out_root)
    f = build_objective(config)
    s = resolve_s(config.s, f)
    x0 = resolve_x0(config, f)

    stem = config.output_path or f"{config.objective}_{config.method}_K{config.K}.csv"
    csv_path = root / stem
    csv_path.parent.mkdir(parents=True, exist_ok=True)
    base = csv_path.with_suffix("")
    summary_path = base.parent / (base.name + ".summary.txt")
    echo_path = base.parent / (base.name + ".config.json")

    resolved = ExperimentConfig(
        objective=config.objective,
        objective_params=dict(config.objective_params),
        method=config.method, s=s, K=config.K, seed=config.seed,
        x0=[float(v) for v in x0], lyapunov=config.lyapunov,
        bound=config.bound, output_path=stem)
    echo_path.write_text(json.dumps(resolved.to_dict(), sort_keys=True, indent=2) + "\n")

    guaranteed = s <= 1.0 / f.lipschitz * (1.0 + 1e-12)
    summary = {
        "objective": f.name,
        "method": config.method,
        "dim": f.dim,
        "mu": fmt(f.mu),
        "L": fmt(f.lipschitz),
        "s": fmt(s),
        "K": config.K,
        "seed": config.seed,
        "bound_guaranteed": "true" if guaranteed else "false",
    }
    reports: list[CertReport] = []
    ok = True
    traj = None
    try:
        traj = run(f, config.method, x0, s, config.K,
                   lyapunov=config.lyapunov, bound=config.bound)
    except NonFiniteIterateError as exc:
        summary["status"] = "nonfinite"
        summary["failed_at_k"] = exc.k
        write_summary(summary, summary_path)
        return ExecutionResult(config=resolved, ok=False, summary=summary,
                               summary_path=summary_path, echo_path=echo_path)

    summary["status"] = "ok"
    summary["final_f_gap"] = fmt(float(traj.f_gap[-1]))
    summary["final_grad_norm"] = fmt(float(traj.grad_norm[-1]))

    if config.bound is not None:
        report = analysis.check_bound(traj, config.bound)
        reports.append(report)
        summary["bound"] = config.bound
        summary["bound_violations"] = report.n_failed
        summary["bound_worst_margin"] = fmt(report.worst_margin)
        # above 1/L the bound is informational and does not fail the run
        if guaranteed and not report.passed:
            ok = False
    if config.lyapunov is not None:
        report = lyapunov.certify_contraction(traj, config.lyapunov)
        reports.append(report)
        summary["lyapunov"] = config.lyapunov
        summary["lyapunov_contraction_violations"] = report.n_failed
        summary["lyapunov_worst_margin"] = fmt(report.worst_margin)
        summary["contraction_rho"] = fmt(report.details["rho"])
        if guaranteed and not report.passed:
            ok = False

    write_trajectory_csv(traj, csv_path)
    write_summary(summary, summary_path)
    return ExecutionResult(config=resolved, ok=ok, summary=summary,
                           csv_path=csv_path, summary_path=summary_path,
                           echo_path=echo_path, reports=reports, trajectory=traj)


def figures_suite(out_root: Optional[str | Path] = None) -> int:
    """Gap-vs-iteration CSVs for each method on the condition-100 quadratic."""
    root = _output_root(out_root)
    for method in ("gd", "heavy-ball", "nag-classic", "nag-modified", "iv-phase"):
        config = ExperimentConfig(
            objective="quad", objective_params={"spectrum": [1, 100]},
            method=method, s="1/L", K=400, seed=1, x0=[1.0, 1.0],
            output_path=f"fig_gap_{method}.csv")
        execute(config, out_root=root)
    return 0


def suite(name: str, out_root: Optional[str | Path] = None) -> int:
    """Run a predefined experiment suite; nonzero on certificate failure."""
    if name == "acceptance":
        from .acceptance import run_all
        return run_all(out_root=_output_root(out_root))
    if name == "figures":
        return figures_suite(out_root=out_root)
    raise ConfigError(f"unknown suite {name!r}; expected 'acceptance' or 'figures'")
