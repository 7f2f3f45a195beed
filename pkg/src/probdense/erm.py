"""Regularized empirical risk minimization in kernel span.

Solvers return representer expansions over the training inputs: a direct
kernel ridge solve, a subgradient method for convex Lipschitz losses, and
gradient descent for the smooth pairwise ranking objective.  Clipping and
the empirical risk functional round out the toolkit.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .kernels import gram_matrix
from .rkhs import RkhsFunction
from .util import NumericalError, as_points

__all__ = [
    "Dataset",
    "SquaredLoss",
    "AbsoluteLoss",
    "PinballLoss",
    "RankingSquaredLoss",
    "FitConfig",
    "FitInfo",
    "fit_kernel_ridge",
    "fit_erm",
    "fit_pairwise",
    "clip",
    "ClippedFunction",
    "empirical_risk",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Dataset:
    """Supervised sample: inputs (n, d), real outputs (n,)."""

    inputs: np.ndarray
    outputs: np.ndarray

    def __post_init__(self):
        X = as_points(self.inputs, "inputs")
        y = np.asarray(self.outputs, dtype=float)
        if y.shape != (X.shape[0],):
            raise ValueError(f"outputs must have shape ({X.shape[0]},), got {y.shape}")
        if not np.all(np.isfinite(y)):
            raise ValueError("outputs must be finite")
        object.__setattr__(self, "inputs", X)
        object.__setattr__(self, "outputs", y)

    @property
    def n(self) -> int:
        return self.inputs.shape[0]


@dataclass(frozen=True)
class SquaredLoss:
    """L(y, t) = (y - t)^2.

    Lipschitz only on bounded output ranges; if a range-restricted constant
    is known it can be stored, otherwise lipschitz_constant stays None and
    Lipschitz-based bounds do not apply.
    """

    lipschitz_constant: float | None = None

    def values(self, y, t):
        r = y - t
        return r * r

    def subgradient(self, y, t):
        return 2.0 * (t - y)


@dataclass(frozen=True)
class AbsoluteLoss:
    """L(y, t) = |y - t|, Lipschitz constant 1."""

    @property
    def lipschitz_constant(self) -> float:
        return 1.0

    def values(self, y, t):
        return np.abs(y - t)

    def subgradient(self, y, t):
        # subgradient choice 0 at residual 0
        return -np.sign(y - t)


@dataclass(frozen=True)
class PinballLoss:
    """Quantile loss: tau * r for residual r = y - t >= 0, (tau - 1) * r below.

    At residual exactly 0 the subgradient uses the (tau - 1) branch, a
    deterministic tie-break.  PinballLoss(0.5) equals AbsoluteLoss / 2.
    """

    tau: float

    def __post_init__(self):
        if not (np.isfinite(self.tau) and 0.0 < self.tau < 1.0):
            raise ValueError(f"tau must lie strictly in (0, 1), got {self.tau!r}")

    @property
    def lipschitz_constant(self) -> float:
        return max(self.tau, 1.0 - self.tau)

    def values(self, y, t):
        r = np.asarray(y - t, dtype=float)
        return np.where(r >= 0.0, self.tau * r, (self.tau - 1.0) * r)

    def subgradient(self, y, t):
        r = np.asarray(y - t, dtype=float)
        return np.where(r > 0.0, -self.tau, 1.0 - self.tau)


@dataclass(frozen=True)
class RankingSquaredLoss:
    """Pairwise loss ((y_i - y_j) - (t_i - t_j))^2 averaged over all pairs."""

    def pair_values(self, dy, dt):
        r = dy - dt
        return r * r


@dataclass(frozen=True)
class FitConfig:
    """Iterative solver knobs: penalty weight, budget, step seed, tolerance."""

    lam: float
    max_iters: int = 1000
    step_size0: float = 1.0
    tol: float = 1e-8
    seed: int = 0

    def __post_init__(self):
        if not (np.isfinite(self.lam) and self.lam > 0.0):
            raise ValueError(f"lam must be positive, got {self.lam!r}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        if not (np.isfinite(self.step_size0) and self.step_size0 > 0.0):
            raise ValueError(f"step_size0 must be positive, got {self.step_size0!r}")
        if not (np.isfinite(self.tol) and self.tol >= 0.0):
            raise ValueError(f"tol must be >= 0, got {self.tol!r}")


@dataclass(frozen=True)
class FitInfo:
    """Diagnostics for an iterative fit: best objective, iterations, exit state."""

    objective: float
    objective_at_zero: float
    n_iters: int
    grad_norm: float
    converged: bool


def fit_kernel_ridge(data: Dataset, kernel, lam: float) -> RkhsFunction:
    """Solve (K + n * lam * I) alpha = y and return the representer expansion.

    Cholesky with escalating jitter: on factorization failure, add
    1e-12 * trace(K) / n to the diagonal and retry with 10x the jitter,
    at most three times, then raise NumericalError.
    """
    if not (np.isfinite(lam) and lam > 0.0):
        raise ValueError(f"lam must be positive, got {lam!r}")
    K = gram_matrix(kernel, data.inputs)
    n = data.n
    A = K + (n * lam) * np.eye(n)
    jitter = 1e-12 * float(np.trace(K)) / n
    attempt = 0
    while True:
        try:
            factor = cho_factor(A, lower=True, check_finite=False)
            break
        except np.linalg.LinAlgError:
            if attempt >= 3:
                raise NumericalError(
                    f"Cholesky failed after {attempt} jitter escalations (n={n}, lam={lam!r})"
                ) from None
            A = A + jitter * np.eye(n)
            jitter *= 10.0
            attempt += 1
    alpha = cho_solve(factor, data.outputs, check_finite=False)
    return RkhsFunction(kernel, data.inputs, alpha)


def fit_erm(
    data: Dataset, kernel, loss, cfg: FitConfig, return_info: bool = False
) -> RkhsFunction | tuple[RkhsFunction, FitInfo]:
    """Subgradient descent for (1/n) sum L(y_i, f(x_i)) + lam * ||f||_H^2.

    Steps follow step_size0 / sqrt(t); the best iterate by objective is
    returned, starting the comparison at alpha = 0, so the result never
    exceeds the objective of the zero function.
    """
    K = gram_matrix(kernel, data.inputs)
    y = data.outputs
    n = data.n
    alpha = np.zeros(n)
    fvals = np.zeros(n)

    def objective(a, fv):
        # overflow here is handled by the explicit finiteness check below
        with np.errstate(over="ignore", invalid="ignore"):
            return float(np.mean(loss.values(y, fv)) + cfg.lam * (a @ (K @ a)))

    best_alpha = alpha
    best_obj = obj_zero = objective(alpha, fvals)
    grad_norm = np.inf
    iters_run = 0
    for t in range(1, cfg.max_iters + 1):
        with np.errstate(over="ignore", invalid="ignore"):
            grad = (K @ loss.subgradient(y, fvals)) / n + (2.0 * cfg.lam) * (K @ alpha)
            grad_norm = float(np.linalg.norm(grad))
            if grad_norm <= cfg.tol:
                break
            step = cfg.step_size0 / np.sqrt(t)
            alpha = alpha - step * grad
            fvals = K @ alpha
        obj = objective(alpha, fvals)
        if not np.isfinite(obj):
            raise NumericalError(
                f"objective became non-finite at iteration {t} (step {float(step):g}); "
                "reduce step_size0"
            )
        if obj < best_obj:
            best_obj = obj
            best_alpha = alpha
        iters_run = t
    result = RkhsFunction(kernel, data.inputs, best_alpha)
    if not return_info:
        return result
    return result, FitInfo(best_obj, obj_zero, iters_run, grad_norm, grad_norm <= cfg.tol)


def fit_pairwise(
    data: Dataset, kernel, loss: RankingSquaredLoss, cfg: FitConfig, return_info: bool = False
) -> RkhsFunction | tuple[RkhsFunction, FitInfo]:
    """Gradient descent for the mean pairwise ranking objective.

    (1/n^2) sum_ij ((y_i - y_j) - (f(x_i) - f(x_j)))^2 + lam * ||f||_H^2,
    smooth in alpha.  Each step starts from step_size0 and Armijo-backtracks
    until the objective decreases, so divergence cannot occur; stops when the
    gradient norm falls below tol or the iteration budget runs out.
    """
    if not isinstance(loss, RankingSquaredLoss):
        raise TypeError("fit_pairwise requires RankingSquaredLoss")
    if data.n < 2:
        raise ValueError("pairwise fitting needs at least 2 observations")
    K = gram_matrix(kernel, data.inputs)
    y = data.outputs
    n = data.n

    def objective_parts(a):
        # overflow produces inf/nan, rejected by the finiteness checks below
        with np.errstate(over="ignore", invalid="ignore"):
            fv = K @ a
            r = (y[:, None] - y[None, :]) - (fv[:, None] - fv[None, :])
            obj = float((r * r).sum() / (n * n) + cfg.lam * (a @ (K @ a)))
            grad_f = (-4.0 / (n * n)) * r.sum(axis=1)
            grad = K @ (grad_f + 2.0 * cfg.lam * a)
        return obj, grad

    alpha = np.zeros(n)
    obj, grad = objective_parts(alpha)
    if not np.isfinite(obj):
        raise NumericalError("objective non-finite at alpha = 0")
    obj_zero = obj
    best_alpha, best_obj = alpha, obj
    grad_norm = float(np.linalg.norm(grad))
    iters_run = 0
    converged = grad_norm <= cfg.tol
    for t in range(1, cfg.max_iters + 1):
        if converged:
            break
        step = cfg.step_size0
        for _ in range(40):
            trial = alpha - step * grad
            trial_obj, trial_grad = objective_parts(trial)
            if np.isfinite(trial_obj) and trial_obj <= obj - 1e-4 * step * grad_norm**2:
                break
            step *= 0.5
        else:
            # no decrease found at any step: numerically stationary
            break
        alpha, obj, grad = trial, trial_obj, trial_grad
        grad_norm = float(np.linalg.norm(grad))
        iters_run = t
        if obj < best_obj:
            best_alpha, best_obj = alpha, obj
        converged = grad_norm <= cfg.tol
    if not converged:
        log.debug("fit_pairwise stopped at iteration %d with grad norm %.3e", iters_run, grad_norm)
    result = RkhsFunction(kernel, data.inputs, best_alpha)
    if not return_info:
        return result
    return result, FitInfo(best_obj, obj_zero, iters_run, grad_norm, converged)


@dataclass(frozen=True, eq=False)
class ClippedFunction:
    """Pointwise clamp of a function into [-bound, bound]."""

    inner: object
    bound: float

    def __call__(self, x):
        values = self.inner(x)
        if np.isscalar(values) or np.ndim(values) == 0:
            return float(min(self.bound, max(-self.bound, float(values))))
        return np.clip(values, -self.bound, self.bound)


def clip(f, bound: float) -> ClippedFunction:
    """Clamp predictions into [-bound, bound]; idempotent, 1-Lipschitz in values."""
    if not (np.isfinite(bound) and bound > 0.0):
        raise ValueError(f"bound must be positive, got {bound!r}")
    return ClippedFunction(f, float(bound))


def empirical_risk(f, data: Dataset, loss) -> float:
    """Mean loss of f over the dataset: (1/n) sum L(y_i, f(x_i))."""
    values = np.asarray(f(data.inputs), dtype=float)
    return float(np.mean(loss.values(data.outputs, values)))
