"""The implicit-velocity high-resolution differential equation.

Two right-hand sides are provided for the second-order dynamics in
(position X, velocity X'):

* ``simplified``:  X'' + 2 sqrt(mu) X' + grad f(X + sqrt(s) X' / c) = 0
* ``original``:    (1 + sqrt(mu s)) X'' + 2 sqrt(mu) X'
                   + c * grad f(X + sqrt(s) X' / c) = 0

with c = 1 + 2 sqrt(mu s), both started from X(0) = x_0, X'(0) = 0.  The
two agree to O(sqrt(s)).  The continuous convergence theorem is stated for
the simplified equation and is verified sample-wise by
:func:`check_continuous_bound`.

Integration is fixed-step classical Runge-Kutta 4 on the first-order
system: the dynamics are smooth and non-stiff for the problems treated
here, and a fixed step keeps runs bit-deterministic for regression tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .objectives import Objective, Vector
from .optimizers import momentum_denominator
from .lyapunov import lyap_ode
from .report import CertReport


@dataclass
class OdeState:
    """Continuous-time state: position X(t) and velocity X'(t)."""

    t: float
    X: Vector
    Xdot: Vector


class NonFiniteSolutionError(RuntimeError):
    """Integration produced a non-finite state; ``t`` is the failing time."""

    def __init__(self, t: float):
        super().__init__(f"integration produced a non-finite state at t={t:.6g}")
        self.t = t


def probe_point(X: Vector, Xdot: Vector, s: float, mu: float) -> Vector:
    """The velocity-corrected point X + sqrt(s) X' / (1 + 2 sqrt(mu s)) at
    which the dynamics evaluate the gradient."""
    return X + math.sqrt(s) * Xdot / momentum_denominator(mu, s)


def rhs_simplified(f: Objective, state: OdeState, s: float,
                   mu: float) -> tuple[Vector, Vector]:
    """(dX, dX') for X'' = -2 sqrt(mu) X' - grad f(probe)."""
    g = f.grad(probe_point(state.X, state.Xdot, s, mu))
    return state.Xdot, -2.0 * math.sqrt(mu) * state.Xdot - g


def rhs_original(f: Objective, state: OdeState, s: float,
                 mu: float) -> tuple[Vector, Vector]:
    """(dX, dX') for the un-simplified equation, solved for X''."""
    c = momentum_denominator(mu, s)
    g = f.grad(probe_point(state.X, state.Xdot, s, mu))
    dv = (-2.0 * math.sqrt(mu) * state.Xdot - c * g) / (1.0 + math.sqrt(mu * s))
    return state.Xdot, dv


_RHS = {"simplified": rhs_simplified, "original": rhs_original}


def default_step(s: float) -> float:
    """Default integration step: fine enough to resolve the sqrt(s)-scale
    correction term (and 1e-3 in the s -> 0 limit)."""
    if s <= 0.0:
        return 1e-3
    return min(1e-3, math.sqrt(s) / 10.0)


def integrate(f: Objective, x0: Vector, s: float, T: float,
              h: float | None = None, which: str = "simplified") -> list[OdeState]:
    """RK4 solution states at t = 0, h, 2h, ..., T from (x0, 0).

    T should be an integer multiple of h; the step count is rounded to the
    nearest integer.  Deterministic for fixed inputs.
    """
    if which not in _RHS:
        raise ValueError(f"unknown equation {which!r}; expected one of {tuple(_RHS)}")
    if h is None:
        h = default_step(s)
    if not h > 0:
        raise ValueError("step size h must be positive")
    if T < 0:
        raise ValueError("horizon T must be nonnegative")
    rhs = _RHS[which]
    mu = f.mu
    X = np.asarray(x0, dtype=float).copy()
    V = np.zeros_like(X)
    n = int(round(T / h)) if T > 0 else 0
    if n > 0 and abs(n * h - T) > 1e-9 * max(1.0, T):
        raise ValueError(f"T={T} is not an integer multiple of h={h}")
    out = [OdeState(t=0.0, X=X.copy(), Xdot=V.copy())]
    for i in range(n):
        k1x, k1v = rhs(f, OdeState(0.0, X, V), s, mu)
        k2x, k2v = rhs(f, OdeState(0.0, X + 0.5 * h * k1x, V + 0.5 * h * k1v), s, mu)
        k3x, k3v = rhs(f, OdeState(0.0, X + 0.5 * h * k2x, V + 0.5 * h * k2v), s, mu)
        k4x, k4v = rhs(f, OdeState(0.0, X + h * k3x, V + h * k3v), s, mu)
        X = X + (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        V = V + (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        t = (i + 1) * h
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(V))):
            raise NonFiniteSolutionError(t)
        out.append(OdeState(t=t, X=X.copy(), Xdot=V.copy()))
    return out


def check_continuous_bound(solution: list[OdeState], f: Objective, s: float,
                           mu: float, bound_tol: float = 1e-6,
                           decay_tol: float = 1e-8) -> CertReport:
    """Verify the continuous convergence theorem along a solution.

    Checks, at every sample of a ``simplified``-equation solution started
    from rest at x_0:

    * the objective-gap bound
      ``f(probe(t)) - f* <= (f(x_0) - f* + mu ||x_0 - x*||^2) / 2
                            * exp(-sqrt(mu) t / 4)``
      with absolute slack ``bound_tol * max(1, RHS(0))``;
    * the energy decay ``E(t+h) / E(t) <= exp(-sqrt(mu) h / 4) + decay_tol``
      for consecutive samples, via :func:`accelcert.lyapunov.lyap_ode`.
    """
    if not solution:
        raise ValueError("empty solution")
    x0 = solution[0].X
    gap0 = f.gap(x0)
    dist0_sq = float(np.sum((x0 - f.minimizer) ** 2))
    numerator = 0.5 * (gap0 + mu * dist0_sq)
    slack = bound_tol * max(1.0, numerator)

    n_failed = 0
    first_failure = None
    worst_margin = np.inf
    energies = np.empty(len(solution))
    for i, state in enumerate(solution):
        lhs = f.gap(probe_point(state.X, state.Xdot, s, mu))
        rhs_val = numerator * math.exp(-math.sqrt(mu) * state.t / 4.0)
        margin = rhs_val - lhs
        worst_margin = min(worst_margin, margin)
        if margin < -slack:
            n_failed += 1
            if first_failure is None:
                first_failure = i
        energies[i] = lyap_ode(f, state.X, state.Xdot, s, mu, t=state.t).energy

    decay_failed = 0
    decay_first = None
    worst_ratio = 0.0
    floor = 1e-14 * max(1.0, energies[0])
    for i in range(len(solution) - 1):
        h = solution[i + 1].t - solution[i].t
        limit = math.exp(-math.sqrt(mu) * h / 4.0) + decay_tol
        if energies[i] <= floor:
            continue  # both energies at rounding level
        ratio = energies[i + 1] / energies[i]
        worst_ratio = max(worst_ratio, ratio)
        if ratio > limit:
            decay_failed += 1
            if decay_first is None:
                decay_first = i
    return CertReport(
        name="continuous_bound",
        n_checked=len(solution),
        n_failed=n_failed + decay_failed,
        worst_margin=float(worst_margin),
        first_failure=first_failure if first_failure is not None else decay_first,
        details={
            "bound_failures": n_failed,
            "decay_failures": decay_failed,
            "worst_energy_ratio": worst_ratio,
            "numerator": numerator,
        },
    )
