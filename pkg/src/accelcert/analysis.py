"""Quantitative analysis: convergence-bound curves and checkers, empirical
rate estimation, and the step-size monotonicity analysis for quadratics.

On a quadratic with Hessian eigenvalues lambda_i, the gradient-correction
scheme decouples per eigencoordinate into the linear three-term recursion

    (1 + 2 sqrt(mu s)) y_{k+1} - 2 (1 - lambda s + sqrt(mu s)) y_k
        + (1 - lambda s) y_{k-1} = 0,

whose characteristic polynomial

    (1 + 2 sqrt(mu s)) a^2 - 2 (1 - lambda s + sqrt(mu s)) a + (1 - lambda s)

has real roots exactly when s >= (lambda - mu) / lambda^2.  (Sanity check:
at lambda = 0 a constant sequence solves the recursion, and indeed a = 1 is
then a root.)  Real roots for every eigenvalue mean the objective value
decreases monotonically; since max_lambda (lambda - mu) / lambda^2
= 1 / (4 mu), attained at lambda = 2 mu, monotone accelerated convergence
is available for s in [1/(4 mu), 1/L] whenever L <= 4 mu.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .objectives import SpectrumSpec, make_quadratic, sample_in_ball
from .optimizers import Trajectory, run
from .report import CertReport

THEOREMS = ("rate-gc", "rate-iv", "rate-iv-x", "gd", "classic")

#: Trajectory methods each bound theorem applies to, and the sequence
#: (x_k or y_k) whose objective gap the theorem bounds.
THEOREM_METHODS = {
    "rate-iv": (("iv-phase", "nag-modified"), "y"),
    "rate-iv-x": (("iv-phase", "nag-modified"), "x"),
    "rate-gc": (("gc-phase", "gc-modified"), "x"),
    "gd": (("gd",), "x"),
    "classic": (("nag-classic",), "x"),
}


@dataclass
class RootPair:
    """Roots of one characteristic polynomial, with the discriminant of the
    monic-normalized quadratic and the maximum root modulus."""

    discriminant: float
    roots: tuple
    modulus_max: float

    @property
    def real(self) -> bool:
        return max(abs(r.imag) for r in self.roots) < 1e-12


def characteristic_roots(lam: float, mu: float, s: float) -> RootPair:
    """Roots of (1+2 sqrt(mu s)) a^2 - 2(1-lam s+sqrt(mu s)) a + (1-lam s).

    Solved with the sign-aware quadratic formula to avoid cancellation when
    one root is small.
    """
    if not (lam > 0 and mu > 0 and s > 0):
        raise ValueError("lam, mu and s must all be positive")
    a = 1.0 + 2.0 * math.sqrt(mu * s)
    b = 2.0 * (1.0 - lam * s + math.sqrt(mu * s))
    c = 1.0 - lam * s
    disc = b * b - 4.0 * a * c
    if disc >= 0.0:
        sq = math.sqrt(disc)
        if b == 0.0 and sq == 0.0:
            r1 = r2 = complex(0.0)
        elif b == 0.0:
            r1, r2 = complex(sq / (2 * a)), complex(-sq / (2 * a))
        else:
            q = 0.5 * (b + math.copysign(sq, b))
            r1, r2 = complex(q / a), complex(c / q)
    else:
        sq = math.sqrt(-disc)
        r1 = complex(b / (2 * a), sq / (2 * a))
        r2 = r1.conjugate()
    return RootPair(discriminant=disc, roots=(r1, r2),
                    modulus_max=max(abs(r1), abs(r2)))


def reality_threshold(lam: float, mu: float) -> float:
    """Smallest step size with real characteristic roots: (lam - mu)/lam^2."""
    return (lam - mu) / (lam * lam)


def max_reality_threshold(mu: float, n_grid: int = 512) -> tuple[float, float]:
    """Maximize (lam - mu) / lam^2 over lam by grid search plus ternary
    refinement; returns (argmax, max).  Closed form: 1/(4 mu) at lam = 2 mu,
    which this serves as an independent check of.
    """
    lams = np.linspace(mu, 4.0 * mu, n_grid)
    vals = (lams - mu) / lams**2
    i = int(np.argmax(vals))
    lo = lams[max(i - 1, 0)]
    hi = lams[min(i + 1, n_grid - 1)]
    while hi - lo > 1e-12 * mu:
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        if reality_threshold(m1, mu) < reality_threshold(m2, mu):
            lo = m1
        else:
            hi = m2
    lam_star = 0.5 * (lo + hi)
    return lam_star, reality_threshold(lam_star, mu)


def monotonic_window(mu: float, L: float) -> Optional[tuple[float, float]]:
    """Step-size interval [1/(4 mu), 1/L] with monotone accelerated
    convergence on quadratics; None when empty (L > 4 mu)."""
    if not (mu > 0 and L >= mu):
        raise ValueError("need L >= mu > 0")
    if L > 4.0 * mu:
        return None
    return (1.0 / (4.0 * mu), 1.0 / L)


def bound_curve(theorem: str, f_x0_gap: float, dist0_sq: float, mu: float,
                L: float, s: float, K: int) -> np.ndarray:
    """Theoretical objective-gap bound evaluated at k = 0..K.

    * ``rate-iv``:   4 L ||x0 - x*||^2 / (1 + sqrt(mu s)/4)^k
    * ``rate-gc``:   2 (f(x0) - f* + mu ||x0 - x*||^2) / (1 + sqrt(mu s)/4)^k
    * ``rate-iv-x``: (2 (f(x0) - f*) + mu ||x0 - x*||^2)
                     / (1 + sqrt(mu/L)/4)^k   (stated at s = 1/L)
    * ``gd``:        (f(x0) - f*) (1 - mu s)^k
    * ``classic``:   (f(x0) - f* + (mu/2) ||x0 - x*||^2) (1 - sqrt(mu s))^k

    The momentum bounds are guaranteed for 0 < s <= 1/L; larger steps get a
    warning and the curve is still evaluated.
    """
    if theorem not in THEOREMS:
        raise ValueError(f"unknown theorem {theorem!r}; expected one of {THEOREMS}")
    if f_x0_gap < 0 or dist0_sq < 0 or K < 0:
        raise ValueError("f_x0_gap, dist0_sq and K must be nonnegative")
    if s > 1.0 / L * (1.0 + 1e-12):
        warnings.warn(f"s={s:.6g} exceeds 1/L={1.0 / L:.6g}; the bound is "
                      "not guaranteed", stacklevel=2)
    k = np.arange(K + 1)
    if theorem == "rate-iv":
        return 4.0 * L * dist0_sq / (1.0 + math.sqrt(mu * s) / 4.0) ** k
    if theorem == "rate-gc":
        return 2.0 * (f_x0_gap + mu * dist0_sq) / (1.0 + math.sqrt(mu * s) / 4.0) ** k
    if theorem == "rate-iv-x":
        return (2.0 * f_x0_gap + mu * dist0_sq) / (1.0 + 0.25 * math.sqrt(mu / L)) ** k
    if theorem == "gd":
        return f_x0_gap * (1.0 - mu * s) ** k
    return (f_x0_gap + 0.5 * mu * dist0_sq) * (1.0 - math.sqrt(mu * s)) ** k


def _theorem_gaps(trajectory: Trajectory, theorem: str,
                  allow_mismatch: bool = False) -> np.ndarray:
    methods, ref = THEOREM_METHODS[theorem]
    f = trajectory.objective
    if f is None:
        raise ValueError("trajectory carries no objective reference")
    if trajectory.method_id not in methods:
        if not allow_mismatch:
            raise ValueError(
                f"theorem {theorem!r} applies to methods {methods}, "
                f"not {trajectory.method_id!r}")
        # cross-method comparison: use the method's own reference sequence
        points = trajectory.reference_points()
    else:
        points = trajectory.xs if ref == "x" else trajectory.ys
    return np.array([f.gap(p) for p in points])


def _curve_for(trajectory: Trajectory, theorem: str) -> np.ndarray:
    f = trajectory.objective
    x0 = trajectory.xs[0]
    return bound_curve(theorem, f.gap(x0), float(np.sum((x0 - f.minimizer) ** 2)),
                       trajectory.mu, f.lipschitz, trajectory.s, trajectory.K)


def attach_bound(trajectory: Trajectory, theorem: str) -> np.ndarray:
    """Fill the trajectory's ``bound`` column with the theorem curve."""
    trajectory.bound = _curve_for(trajectory, theorem)
    return trajectory.bound


def check_bound(trajectory: Trajectory, theorem: str,
                slack_scale: float = 1e-10,
                allow_mismatch: bool = False) -> CertReport:
    """Check the theorem's gap bound at every recorded iteration.

    Pass/fail per k with absolute slack ``slack_scale * max(1, bound(0))``.
    Incompatible trajectory/theorem pairings are rejected unless
    ``allow_mismatch`` is set, which compares the method's own reference
    gaps against the curve (a baseline need not satisfy an accelerated
    bound; the report then locates its first failure).
    """
    gaps = _theorem_gaps(trajectory, theorem, allow_mismatch=allow_mismatch)
    curve = _curve_for(trajectory, theorem)
    slack = slack_scale * max(1.0, curve[0])
    margins = curve - gaps
    failures = np.flatnonzero(margins < -slack)
    return CertReport(
        name=f"bound_{theorem}",
        n_checked=len(gaps),
        n_failed=int(len(failures)),
        worst_margin=float(margins.min()),
        first_failure=int(failures[0]) if len(failures) else None,
        details={"slack": slack, "bound_at_0": float(curve[0])},
    )


def empirical_rate(trajectory: Trajectory,
                   tail_fraction: float = 0.5) -> Optional[float]:
    """Per-iteration contraction factor fitted to the gap sequence.

    Log-linear least squares of f_gap over the trailing ``tail_fraction``
    of the records that still resolve above 1e-14; returns the factor r
    with f_gap(k) ~ C r^k, or None when fewer than 10 usable records
    remain (the gap underflowed or the run started at the optimum).
    """
    if not 0.0 < tail_fraction <= 1.0:
        raise ValueError("tail_fraction must lie in (0, 1]")
    gaps = trajectory.f_gap
    usable = np.flatnonzero(np.isfinite(gaps) & (gaps > 1e-14))
    n_tail = math.ceil(tail_fraction * len(usable))
    tail = usable[len(usable) - n_tail:]
    if len(tail) < 10:
        return None
    slope = np.polyfit(tail.astype(float), np.log(gaps[tail]), 1)[0]
    return float(np.exp(slope))


@dataclass
class ScanRow:
    """One (step size, eigenvalue) cell of a monotonicity scan."""

    s: float
    lam: float
    discriminant: float
    roots: tuple
    predicted_monotone: bool
    observed_monotone: bool


@dataclass
class ScanReport:
    rows: list
    per_s: dict
    agreement: bool


def observed_monotone(f_gap: np.ndarray, tol_scale: float = 1e-12) -> bool:
    """True when the gap sequence never strictly increases beyond
    ``tol_scale * max(1, f_gap[0])`` (rounding noise near convergence must
    not flag false oscillation)."""
    tol = tol_scale * max(1.0, float(f_gap[0]))
    return bool(np.all(np.diff(f_gap) <= tol))


def monotonicity_scan(mu: float, spectrum: SpectrumSpec | Sequence[float],
                      s_grid: Sequence[float], K: int,
                      x0: Optional[Sequence[float]] = None,
                      x0_seed: int = 0, x0_radius: float = 2.0) -> ScanReport:
    """Compare predicted and observed monotonicity of the gradient-correction
    scheme on a quadratic, across a grid of step sizes.

    For each s the prediction is "all characteristic roots real" across the
    spectrum; the observation runs gc-phase for K steps from ``x0`` (or a
    seeded random ball point) and applies strict-increase detection to the
    objective gap.  The report keeps per-eigenvalue root data, so alignment
    effects can be inspected per component rather than assuming a universal
    equivalence.
    """
    if not isinstance(spectrum, SpectrumSpec):
        spectrum = SpectrumSpec(spectrum)
    if mu > spectrum.mu + 1e-12:
        raise ValueError("mu may not exceed the smallest eigenvalue")
    f = make_quadratic(spectrum)
    if mu != f.mu:
        f = replace(f, mu=mu)  # weaker declared modulus is still valid
    if x0 is None:
        rng = np.random.default_rng(x0_seed)
        x0 = sample_in_ball(rng, spectrum.dim, x0_radius)
    x0 = np.asarray(x0, dtype=float)

    rows = []
    per_s = {}
    for s in s_grid:
        if not s > 0:
            raise ValueError("step sizes must be positive")
        pairs = [characteristic_roots(lam, mu, s) for lam in spectrum.eigenvalues]
        predicted = all(p.real for p in pairs)
        traj = run(f, "gc-phase", x0, s, K)
        observed = observed_monotone(traj.f_gap)
        per_s[float(s)] = (predicted, observed)
        for lam, pair in zip(spectrum.eigenvalues, pairs):
            rows.append(ScanRow(s=float(s), lam=float(lam),
                                discriminant=pair.discriminant,
                                roots=pair.roots,
                                predicted_monotone=predicted,
                                observed_monotone=observed))
    agreement = all(p == o for p, o in per_s.values())
    return ScanReport(rows=rows, per_s=per_s, agreement=agreement)
