"""Iteration schemes: plain and momentum gradient methods with a uniform
single-step interface, plus a full-run driver that records diagnostics.

Two families of momentum scheme are implemented in two algebraically
equivalent representations each, so that the rewritings can be checked
against one another:

* the two-sequence scheme
      x_{k+1} = y_k - s * grad f(y_k)
      y_{k+1} = x_{k+1} + (x_{k+1} - x_k) / (1 + 2 sqrt(mu s))
  and its phase-space form ``iv-phase`` with velocity
  v_k = (x_k - x_{k-1}) / sqrt(s), where the gradient is taken at the
  extrapolated probe point x_k + sqrt(s) v_k / (1 + 2 sqrt(mu s)) = y_k;

* the single-sequence scheme ``gc-modified``
      y_{k+1} = y_k + (y_k - y_{k-1}) / c - (s/c) grad f(y_k)
               - (s/c) (grad f(y_k) - grad f(y_{k-1})),   c = 1 + 2 sqrt(mu s)
  whose last term is the gradient correction, and its phase-space form
  ``gc-phase`` with velocity v_k = (y_{k+1} - y_k) / sqrt(s).

Every scheme evaluates exactly one gradient per iteration; the previous
gradient needed by the gc family is carried in the state, never recomputed.
"""

from __future__ import annotations

import math
import warnings
from collections import namedtuple
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .objectives import Objective, Vector

METHODS = (
    "gd",
    "heavy-ball",
    "nag-classic",
    "nag-modified",
    "gc-modified",
    "gc-phase",
    "iv-phase",
)

#: Methods whose natural reference point for the objective gap is y_k.
NAG_FAMILY = ("nag-classic", "nag-modified", "gc-modified", "gc-phase", "iv-phase")

#: Supported conventions for the first velocity iterate of ``iv-phase``
#: (``scheme`` follows v_0 = 0 through the recursion; the others override
#: v_1 and exist only to probe the bound conventions empirically).
FIRST_VELOCITY_CONVENTIONS = ("scheme", "zero", "corollary")


def momentum_denominator(mu: float, s: float) -> float:
    """The coefficient 1 + 2 sqrt(mu s) shared by all modified schemes."""
    return 1.0 + 2.0 * math.sqrt(mu * s)


@dataclass
class OptimizerState:
    """Per-iteration variables of one scheme.

    The meaning of ``v`` is method-specific: displacement / sqrt(s) for the
    momentum schemes, the raw previous displacement for heavy-ball, and
    unused (zero) for plain gradient descent.  ``grad_prev`` caches the
    gradient at the previous reference point for the gc family.
    """

    x: Vector
    y: Vector
    v: Vector
    k: int
    s: float
    grad_prev: Optional[Vector] = None

    def __post_init__(self):
        if not self.s > 0:
            raise ValueError("step size s must be positive")


def gd_step(f: Objective, state: OptimizerState) -> OptimizerState:
    """Vanilla gradient descent x_{k+1} = x_k - s grad f(x_k).

    y and v are copied through unchanged.
    """
    x1 = state.x - state.s * f.grad(state.x)
    return replace(state, x=x1, k=state.k + 1)


def default_heavy_ball_beta(mu: float, s: float) -> float:
    """Locally optimal quadratic tuning ((1 - sqrt(mu s)) / (1 + sqrt(mu s)))^2."""
    r = math.sqrt(mu * s)
    return ((1.0 - r) / (1.0 + r)) ** 2


def heavy_ball_step(f: Objective, state: OptimizerState,
                    beta: float) -> OptimizerState:
    """Momentum baseline x_{k+1} = x_k - s grad f(x_k) + beta (x_k - x_{k-1}).

    The previous displacement x_k - x_{k-1} is carried in ``v``.
    """
    x1 = state.x - state.s * f.grad(state.x) + beta * state.v
    return replace(state, x=x1, v=x1 - state.x, k=state.k + 1)


def nag_classic_step(f: Objective, state: OptimizerState) -> OptimizerState:
    """Accelerated scheme with momentum (1 - sqrt(mu s)) / (1 + sqrt(mu s))."""
    s = state.s
    r = math.sqrt(f.mu * s)
    x1 = state.y - s * f.grad(state.y)
    y1 = x1 + ((1.0 - r) / (1.0 + r)) * (x1 - state.x)
    return replace(state, x=x1, y=y1, v=(x1 - state.x) / math.sqrt(s),
                   k=state.k + 1)


def nag_modified_step(f: Objective, state: OptimizerState) -> OptimizerState:
    """Accelerated scheme with momentum 1 / (1 + 2 sqrt(mu s)).

    v is maintained as (x_{k+1} - x_k) / sqrt(s) for diagnostics.
    """
    s = state.s
    x1 = state.y - s * f.grad(state.y)
    y1 = x1 + (x1 - state.x) / momentum_denominator(f.mu, s)
    return replace(state, x=x1, y=y1, v=(x1 - state.x) / math.sqrt(s),
                   k=state.k + 1)


def gc_modified_step(f: Objective, y_curr: Vector, y_prev: Vector,
                     grad_prev: Vector, s: float,
                     mu: float) -> tuple[Vector, Vector]:
    """One step of the single-sequence gradient-correction scheme.

    ``grad_prev`` must be grad f(y_prev) as supplied by the caller; the
    gradient at y_curr is evaluated once and returned for reuse.
    """
    c = momentum_denominator(mu, s)
    g = f.grad(y_curr)
    y_next = (y_curr + (y_curr - y_prev) / c - (s / c) * g
              - (s / c) * (g - grad_prev))
    return y_next, g


def gc_phase_step(f: Objective, state: OptimizerState) -> OptimizerState:
    """Phase-space form of the gradient-correction scheme.

    The state carries y_k in ``y``, v_{k-1} in ``v`` and grad f(y_{k-1}) in
    ``grad_prev``.  The velocity relation
        v_k - v_{k-1} = -2 sqrt(mu s) v_k
                        - sqrt(s) (grad f(y_k) - grad f(y_{k-1}))
                        - sqrt(s) grad f(y_k)
    is implicit in v_k; solving it in closed form gives
        v_k = (v_{k-1} - sqrt(s) (2 grad f(y_k) - grad f(y_{k-1}))) / c.
    The successor carries (y_{k+1}, v_k, grad f(y_k)); its ``x`` is the
    gradient-step image x_{k+1} = y_k - s grad f(y_k), the sequence whose
    objective gap the convergence theorem for this scheme bounds.
    """
    if state.grad_prev is None:
        raise ValueError("gc-phase state must carry the cached previous gradient")
    s = state.s
    c = momentum_denominator(f.mu, s)
    g = f.grad(state.y)
    v1 = (state.v - math.sqrt(s) * (2.0 * g - state.grad_prev)) / c
    y1 = state.y + math.sqrt(s) * v1
    x1 = state.y - s * g
    return OptimizerState(x=x1, y=y1, v=v1, k=state.k + 1, s=s, grad_prev=g)


def iv_phase_step(f: Objective, state: OptimizerState) -> OptimizerState:
    """Phase-space form of the implicit-velocity scheme.

    Computes v_{k+1} first (the update is explicit),
        v_{k+1} = v_k - 2 sqrt(mu s) v_k / c - sqrt(s) grad f(probe),
    then x_{k+1} = x_k + sqrt(s) v_{k+1}.  The probe point
    x_k + sqrt(s) v_k / c is exactly the y_k of the two-sequence scheme,
    and the successor's ``y`` is kept consistent with that identity:
    y_{k+1} = x_{k+1} + sqrt(s) v_{k+1} / c.
    """
    s = state.s
    c = momentum_denominator(f.mu, s)
    probe = state.x + math.sqrt(s) * state.v / c
    g = f.grad(probe)
    v1 = state.v - 2.0 * math.sqrt(f.mu * s) * state.v / c - math.sqrt(s) * g
    x1 = state.x + math.sqrt(s) * v1
    y1 = x1 + math.sqrt(s) * v1 / c
    return replace(state, x=x1, y=y1, v=v1, k=state.k + 1)


def initial_state(f: Objective, method: str, x0: Vector, s: float) -> OptimizerState:
    """State at k = 0 for the given method.

    For the gc family the phase recursion is seeded with a virtual
    v_{-1} = 0 and grad f(y_{-1}) = grad f(y_0), which reproduces the
    scheme's initial velocity v_0 = -sqrt(s) grad f(x_0) / c after the
    first step (and hence y_1 = x_0 - s grad f(x_0) / c).
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (f.dim,):
        raise ValueError(f"x0 has shape {x0.shape}, objective dimension is {f.dim}")
    zero = np.zeros(f.dim)
    if method in ("gc-phase", "gc-modified"):
        return OptimizerState(x=x0.copy(), y=x0.copy(), v=zero, k=0, s=s,
                              grad_prev=f.grad(x0))
    return OptimizerState(x=x0.copy(), y=x0.copy(), v=zero, k=0, s=s)


class NonFiniteIterateError(RuntimeError):
    """A run produced a non-finite iterate; ``k`` is the failing step."""

    def __init__(self, method: str, k: int):
        super().__init__(f"{method} produced a non-finite iterate at step {k}")
        self.k = k


@dataclass
class Trajectory:
    """Ordered per-iteration records of one run, stored column-wise.

    Row k holds the state after k steps: iterate ``xs[k]``, reference point
    ``ys[k]``, velocity ``vs[k]``, the objective gap ``f_gap[k]`` and
    gradient norm at the method's natural reference point (y_k for the
    momentum family, x_k for gd and heavy-ball).  ``lyapunov`` and
    ``bound`` are optional diagnostic columns (NaN where undefined).
    """

    method_id: str
    objective_id: str
    s: float
    mu: float
    xs: np.ndarray
    ys: np.ndarray
    vs: np.ndarray
    f_gap: np.ndarray
    grad_norm: np.ndarray
    lyapunov: Optional[np.ndarray] = None
    bound: Optional[np.ndarray] = None
    objective: Optional[Objective] = field(default=None, repr=False)

    def __len__(self) -> int:
        return self.xs.shape[0]

    @property
    def K(self) -> int:
        """Number of steps taken (records run k = 0..K)."""
        return self.xs.shape[0] - 1

    def record(self, k: int) -> "TrajectoryRecord":
        return TrajectoryRecord(
            k=k, x=self.xs[k], y=self.ys[k], v=self.vs[k],
            f_gap=float(self.f_gap[k]), grad_norm=float(self.grad_norm[k]),
            lyapunov=float(self.lyapunov[k]) if self.lyapunov is not None else None,
            bound=float(self.bound[k]) if self.bound is not None else None)

    @property
    def records(self) -> list:
        return [self.record(k) for k in range(len(self))]

    def reference_points(self) -> np.ndarray:
        return self.ys if self.method_id in NAG_FAMILY else self.xs


TrajectoryRecord = namedtuple(
    "TrajectoryRecord", "k x y v f_gap grad_norm lyapunov bound")


def _reference(method: str, state: OptimizerState) -> Vector:
    return state.y if method in NAG_FAMILY else state.x


def run(f: Objective, method: str, x0: Vector, s: float, K: int, *,
        lyapunov: Optional[str] = None, bound: Optional[str] = None,
        heavy_ball_beta: Optional[float] = None,
        first_velocity: str = "scheme") -> Trajectory:
    """Execute K steps of ``method`` on ``f`` and record diagnostics.

    ``lyapunov`` requests an energy column ("gc" or "iv"); ``bound``
    requests a theoretical bound column by theorem id (see
    :mod:`accelcert.analysis`).  ``first_velocity`` selects the convention
    for the first velocity iterate of iv-phase; anything but "scheme"
    deliberately overrides the recursion at k = 0 and exists to probe the
    initial-energy conventions.
    """
    if K < 0:
        raise ValueError("K must be nonnegative")
    if first_velocity not in FIRST_VELOCITY_CONVENTIONS:
        raise ValueError(f"unknown first_velocity {first_velocity!r}")
    if s > 1.0 / f.lipschitz * (1.0 + 1e-12):
        warnings.warn(
            f"step size s={s:.6g} exceeds 1/L={1.0 / f.lipschitz:.6g}; "
            "convergence bounds are not guaranteed", stacklevel=2)
    if method == "nag-classic" and f.mu * s > 1.0 + 1e-12:
        warnings.warn("nag-classic run with mu*s > 1; momentum coefficient "
                      "is negative", stacklevel=2)

    state = initial_state(f, method, x0, s)
    beta = heavy_ball_beta
    if method == "heavy-ball" and beta is None:
        beta = default_heavy_ball_beta(f.mu, s)
    y_prev = state.y.copy()  # virtual y_{-1} = y_0 for gc-modified

    xs = np.empty((K + 1, f.dim))
    ys = np.empty((K + 1, f.dim))
    vs = np.empty((K + 1, f.dim))
    f_gap = np.empty(K + 1)
    grad_norm = np.empty(K + 1)
    have_min = f.min_value is not None

    def record(i: int, st: OptimizerState):
        xs[i] = st.x
        ys[i] = st.y
        vs[i] = st.v
        ref = _reference(method, st)
        f_gap[i] = f.value(ref) - f.min_value if have_min else np.nan
        grad_norm[i] = np.linalg.norm(f.grad(ref))

    record(0, state)
    for k in range(K):
        if method == "gd":
            state = gd_step(f, state)
        elif method == "heavy-ball":
            state = heavy_ball_step(f, state, beta)
        elif method == "nag-classic":
            state = nag_classic_step(f, state)
        elif method == "nag-modified":
            state = nag_modified_step(f, state)
        elif method == "gc-phase":
            state = gc_phase_step(f, state)
        elif method == "gc-modified":
            # single-sequence recursion; x is the gradient-step image of y
            y1, g = gc_modified_step(f, state.y, y_prev, state.grad_prev, s, f.mu)
            v1 = (y1 - state.y) / math.sqrt(s)
            x1 = state.y - s * g
            y_prev = state.y
            state = OptimizerState(x=x1, y=y1, v=v1, k=state.k + 1, s=s,
                                   grad_prev=g)
        elif method == "iv-phase":
            if k == 0 and first_velocity != "scheme":
                c = momentum_denominator(f.mu, s)
                g0 = f.grad(state.x)
                if first_velocity == "zero":
                    v1 = np.zeros(f.dim)
                else:  # "corollary": v_1 = 2 sqrt(mu s) grad f(y_0)
                    v1 = 2.0 * math.sqrt(f.mu * s) * g0
                x1 = state.x + math.sqrt(s) * v1
                state = replace(state, x=x1, y=x1 + math.sqrt(s) * v1 / c,
                                v=v1, k=1)
            else:
                state = iv_phase_step(f, state)
        if not np.all(np.isfinite(state.x)):
            raise NonFiniteIterateError(method, state.k)
        record(k + 1, state)

    traj = Trajectory(
        method_id=method,
        objective_id=f.name,
        s=s,
        mu=f.mu,
        xs=xs,
        ys=ys,
        vs=vs,
        f_gap=f_gap,
        grad_norm=grad_norm,
        objective=f,
    )
    if lyapunov is not None:
        from .lyapunov import attach_energies
        attach_energies(traj, lyapunov)
    if bound is not None:
        from .analysis import attach_bound
        attach_bound(traj, bound)
    return traj
