"""Strongly convex, smooth test objectives and class-membership certification.

Every objective carries its strong-convexity modulus ``mu`` and gradient
Lipschitz constant ``lipschitz`` (written L below), and, when known, its
minimizer and minimum value.  All randomness flows through explicit 64-bit
seeds fed to numpy's PCG64 generator (``numpy.random.default_rng``), so
construction and sampling are reproducible bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.special import expit

from .report import CertReport

Vector = np.ndarray

#: Generator family used for every seeded draw in the library.
GENERATOR = "numpy.random.default_rng (PCG64)"

#: Gradient norm allowed at a declared minimizer.
MINIMIZER_GRAD_TOL = 1e-10

#: Central-difference step used for every finite-difference check.
FD_STEP = 1e-6


class MinimizerUnknownError(ValueError):
    """Raised when an operation needs ``minimizer``/``min_value`` but the
    objective does not carry them."""


@dataclass
class Objective:
    """A mu-strongly convex, L-smooth function with value/gradient oracles.

    ``value_fn`` and ``grad_fn`` must be deterministic: identical inputs
    yield bit-identical outputs.  ``hessian`` is populated for quadratics
    and used by tests as an independent oracle.
    """

    dim: int
    mu: float
    lipschitz: float
    value_fn: Callable[[Vector], float]
    grad_fn: Callable[[Vector], Vector]
    minimizer: Optional[Vector] = None
    min_value: Optional[float] = None
    name: str = "custom"
    hessian: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be a positive integer")
        if not self.mu > 0:
            raise ValueError("mu must be positive")
        if self.lipschitz < self.mu:
            raise ValueError("lipschitz must be at least mu")
        if self.minimizer is not None:
            self.minimizer = np.asarray(self.minimizer, dtype=float)
            gnorm = float(np.linalg.norm(self.grad_fn(self.minimizer)))
            if gnorm > MINIMIZER_GRAD_TOL:
                raise ValueError(
                    f"gradient norm {gnorm:.3e} at declared minimizer exceeds "
                    f"{MINIMIZER_GRAD_TOL:.0e}"
                )

    def value(self, x: Vector) -> float:
        return float(self.value_fn(np.asarray(x, dtype=float)))

    def grad(self, x: Vector) -> Vector:
        return np.asarray(self.grad_fn(np.asarray(x, dtype=float)), dtype=float)

    def gap(self, x: Vector) -> float:
        """f(x) - f(x*); requires a known minimum value."""
        if self.min_value is None:
            raise MinimizerUnknownError(f"objective {self.name!r} has no known minimum")
        return self.value(x) - self.min_value

    @property
    def kappa(self) -> float:
        return self.lipschitz / self.mu


@dataclass(frozen=True)
class SpectrumSpec:
    """Ascending positive eigenvalues of a quadratic's Hessian."""

    eigenvalues: tuple

    def __init__(self, eigenvalues: Sequence[float]):
        lams = tuple(float(v) for v in eigenvalues)
        if len(lams) == 0:
            raise ValueError("spectrum must be nonempty")
        if any(v <= 0 for v in lams):
            raise ValueError("all eigenvalues must be positive")
        object.__setattr__(self, "eigenvalues", tuple(sorted(lams)))

    @property
    def mu(self) -> float:
        return self.eigenvalues[0]

    @property
    def lipschitz(self) -> float:
        return self.eigenvalues[-1]

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)


def _orthogonal_matrix(dim: int, seed: int) -> np.ndarray:
    """Seeded random orthogonal matrix (QR of a Gaussian, sign-fixed)."""
    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
    return q * np.sign(np.diag(r))


def _spectrum_label(spec: SpectrumSpec) -> str:
    if spec.dim <= 4:
        return "[" + ",".join(f"{v:g}" for v in spec.eigenvalues) + "]"
    return f"[d={spec.dim},mu={spec.mu:g},L={spec.lipschitz:g}]"


def make_quadratic(spec: SpectrumSpec | Sequence[float],
                   rotation_seed: Optional[int] = None) -> Objective:
    """Quadratic objective ``f(x) = 0.5 x^T A x`` with prescribed spectrum.

    Without ``rotation_seed`` the Hessian A is exactly ``diag(spec)``;
    with it, A is conjugated by a seeded random orthogonal matrix, which
    keeps the spectrum (hence mu and L) unchanged.  The minimizer is the
    origin with minimum value 0.
    """
    if not isinstance(spec, SpectrumSpec):
        spec = SpectrumSpec(spec)
    lams = np.array(spec.eigenvalues, dtype=float)
    if rotation_seed is None:
        hessian = np.diag(lams)
        name = f"quad{_spectrum_label(spec)}"
    else:
        q = _orthogonal_matrix(spec.dim, rotation_seed)
        hessian = q @ np.diag(lams) @ q.T
        hessian = 0.5 * (hessian + hessian.T)  # exact symmetry
        name = f"quad-rot{_spectrum_label(spec)}#{rotation_seed}"

    def value_fn(x: Vector) -> float:
        return 0.5 * float(x @ hessian @ x)

    def grad_fn(x: Vector) -> Vector:
        return hessian @ x

    return Objective(
        dim=spec.dim,
        mu=spec.mu,
        lipschitz=spec.lipschitz,
        value_fn=value_fn,
        grad_fn=grad_fn,
        minimizer=np.zeros(spec.dim),
        min_value=0.0,
        name=name,
        hessian=hessian,
    )


def reg_logistic_from_data(features: np.ndarray, labels: np.ndarray,
                           reg: float, name: str = "reg-logistic") -> Objective:
    """L2-regularized logistic loss on explicit data.

    f(x) = mean_i log(1 + exp(-b_i <a_i, x>)) + (reg/2) ||x||^2.
    mu = reg; L = reg + sum_i ||a_i||^2 / (4 n), the standard curvature
    bound for the averaged logistic loss.
    """
    if not reg > 0:
        raise ValueError("reg must be positive")
    features = np.asarray(features, dtype=float)
    labels = np.asarray(labels, dtype=float)
    n_samples, dim = features.shape
    lipschitz = reg + float(np.sum(features * features)) / (4.0 * n_samples)

    def value_fn(x: Vector) -> float:
        margins = labels * (features @ x)
        return float(np.mean(np.logaddexp(0.0, -margins)) + 0.5 * reg * (x @ x))

    def grad_fn(x: Vector) -> Vector:
        margins = labels * (features @ x)
        weights = expit(-margins)  # sigma(-b_i <a_i, x>)
        return -(features.T @ (labels * weights)) / n_samples + reg * x

    return Objective(dim=dim, mu=reg, lipschitz=lipschitz, value_fn=value_fn,
                     grad_fn=grad_fn, name=name)


def make_reg_logistic(data_seed: int, n_samples: int, dim: int,
                      reg: float) -> Objective:
    """Regularized logistic loss on seeded Gaussian data.

    Features a_i ~ N(0, I) and Rademacher labels b_i are both drawn from
    ``data_seed``.  The minimizer is not declared; resolve it on demand
    with :func:`resolve_minimizer`.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    rng = np.random.default_rng(data_seed)
    features = rng.standard_normal((n_samples, dim))
    labels = rng.choice(np.array([-1.0, 1.0]), size=n_samples)
    return reg_logistic_from_data(
        features, labels, reg,
        name=f"reg-logistic(seed={data_seed},n={n_samples},d={dim},reg={reg})")


def resolve_minimizer(f: Objective, grad_tol: float = 1e-12,
                      max_iters: int = 500_000) -> Objective:
    """Return a copy of ``f`` with ``minimizer``/``min_value`` filled in.

    Objectives that already know their minimizer are returned unchanged.
    Otherwise the minimizer is located by the library's own momentum scheme
    (run at s = 1/L until the gradient norm drops below ``grad_tol``), which
    avoids any external solver dependency.
    """
    if f.minimizer is not None and f.min_value is not None:
        return f
    from .optimizers import OptimizerState, nag_modified_step

    s = 1.0 / f.lipschitz
    x0 = np.zeros(f.dim)
    state = OptimizerState(x=x0, y=x0.copy(), v=np.zeros(f.dim), k=0, s=s)
    for _ in range(max_iters):
        if np.linalg.norm(f.grad(state.x)) <= grad_tol:
            break
        state = nag_modified_step(f, state)
    else:
        raise RuntimeError(
            f"minimizer search did not reach gradient norm {grad_tol:.0e} "
            f"within {max_iters} iterations"
        )
    xstar = state.x.copy()
    return replace(f, minimizer=xstar, min_value=f.value(xstar))


def sample_in_ball(rng: np.random.Generator, dim: int, radius: float) -> Vector:
    """Uniform-direction point with uniform radius in the given ball."""
    direction = rng.standard_normal(dim)
    direction /= np.linalg.norm(direction)
    return direction * rng.uniform(0.0, radius)


def certify_class(f: Objective, n_pairs: int, sample_seed: int,
                  radius: float = 10.0, rel_slack: float = 1e-9) -> CertReport:
    """Sampled check that ``f`` belongs to the declared (mu, L) class.

    For seeded random pairs (x, y) in the ball of the given radius around
    the minimizer (or the origin when unknown), verifies the strong
    convexity inequality
    ``f(y) >= f(x) + <grad f(x), y - x> + (mu/2) ||y - x||^2``
    and gradient Lipschitz continuity
    ``||grad f(y) - grad f(x)|| <= L ||y - x||``,
    each with relative slack ``rel_slack``.  Failures are counted, never
    raised; the report carries the worst margins of both inequalities.
    """
    if n_pairs < 1:
        raise ValueError("n_pairs must be at least 1")
    center = f.minimizer if f.minimizer is not None else np.zeros(f.dim)
    rng = np.random.default_rng(sample_seed)
    n_failed = 0
    first_failure = None
    worst_sc = np.inf
    worst_smooth = np.inf
    for i in range(n_pairs):
        x = center + sample_in_ball(rng, f.dim, radius)
        y = center + sample_in_ball(rng, f.dim, radius)
        fx, fy = f.value(x), f.value(y)
        gx = f.grad(x)
        diff = y - x
        sc_margin = fy - fx - float(gx @ diff) - 0.5 * f.mu * float(diff @ diff)
        sc_scale = max(1.0, abs(fx), abs(fy))
        dist = float(np.linalg.norm(diff))
        smooth_margin = f.lipschitz * dist - float(np.linalg.norm(f.grad(y) - gx))
        smooth_scale = max(1.0, f.lipschitz * dist)
        worst_sc = min(worst_sc, sc_margin)
        worst_smooth = min(worst_smooth, smooth_margin)
        ok = (sc_margin >= -rel_slack * sc_scale
              and smooth_margin >= -rel_slack * smooth_scale)
        if not ok:
            n_failed += 1
            if first_failure is None:
                first_failure = i
    return CertReport(
        name="class",
        n_checked=n_pairs,
        n_failed=n_failed,
        worst_margin=min(worst_sc, worst_smooth),
        first_failure=first_failure,
        details={
            "worst_strong_convexity_margin": worst_sc,
            "worst_smoothness_margin": worst_smooth,
            "radius": radius,
        },
    )
