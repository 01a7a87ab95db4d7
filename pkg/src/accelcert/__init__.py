"""accelcert: momentum-method convergence certificates at desk scale.

A numpy library for strongly convex first-order optimization that pairs
every scheme with its Lyapunov energy, its theoretical gap bound, and the
high-resolution differential equation it discretizes, then verifies all of
them numerically.
"""

from .report import CertReport
from .objectives import (GENERATOR, Objective, SpectrumSpec, certify_class,
                         make_quadratic, make_reg_logistic,
                         reg_logistic_from_data, resolve_minimizer,
                         sample_in_ball)
from .optimizers import (METHODS, NAG_FAMILY, OptimizerState, Trajectory,
                         default_heavy_ball_beta, gc_modified_step,
                         gc_phase_step, gd_step, heavy_ball_step,
                         initial_state, iv_phase_step, momentum_denominator,
                         nag_classic_step, nag_modified_step, run)
from .lyapunov import (LyapunovRecord, certify_contraction, energies,
                       initial_energy, lyap_gc, lyap_iv, lyap_ode)
from .hires_ode import (OdeState, check_continuous_bound, integrate,
                        probe_point, rhs_original, rhs_simplified)
from .analysis import (RootPair, ScanReport, bound_curve, characteristic_roots,
                       check_bound, empirical_rate, max_reality_threshold,
                       monotonic_window, monotonicity_scan, reality_threshold)
from .harness import (ExperimentConfig, ConfigError, execute, load_config,
                      parse_config, suite)

__version__ = "0.1.0"

__all__ = [
    "CertReport", "GENERATOR", "Objective", "SpectrumSpec", "certify_class",
    "make_quadratic", "make_reg_logistic", "reg_logistic_from_data",
    "resolve_minimizer",
    "sample_in_ball", "METHODS", "NAG_FAMILY", "OptimizerState", "Trajectory",
    "default_heavy_ball_beta", "gc_modified_step", "gc_phase_step", "gd_step",
    "heavy_ball_step", "initial_state", "iv_phase_step",
    "momentum_denominator", "nag_classic_step", "nag_modified_step", "run",
    "LyapunovRecord", "certify_contraction", "energies", "initial_energy",
    "lyap_gc", "lyap_iv", "lyap_ode", "OdeState", "check_continuous_bound",
    "integrate", "probe_point", "rhs_original", "rhs_simplified",
    "RootPair", "ScanReport",
    "bound_curve", "characteristic_roots", "check_bound", "empirical_rate",
    "max_reality_threshold", "monotonic_window", "monotonicity_scan",
    "reality_threshold", "ExperimentConfig", "ConfigError", "execute",
    "load_config", "parse_config", "suite",
]
