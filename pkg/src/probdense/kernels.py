"""Bounded positive definite kernels on R^d and on empirical measures.

Point-level kernels (Gaussian RBF, compactly supported Wendland C^2) are
evaluated through a shared squared-distance path so that k(x, y) == k(y, x)
bitwise and Gram entries agree bitwise with pairwise evaluation.  On top of
them sits a measure-level Gaussian kernel: a Gaussian of the maximum mean
discrepancy between two empirical measures.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .util import NumericalError, as_points, as_weights

__all__ = [
    "GaussianRBF",
    "WendlandC2",
    "MeasureGaussian",
    "EmpiricalMeasure",
    "eval_kernel",
    "gram_matrix",
    "sup_kernel_norm",
    "mmd_squared",
    "eval_measure_kernel",
    "measure_gram_matrix",
    "mmd_clamp_count",
    "reset_mmd_clamp_count",
]

# Row-chunk budget for pairwise evaluation, in scalar temporaries.  Keeps the
# (rows, m, d) difference tensor near 128 MB; chunking is row-wise only, so
# results are bitwise identical to the unchunked computation.
_CHUNK_BUDGET = 1 << 24


@dataclass(frozen=True)
class GaussianRBF:
    """Gaussian radial kernel exp(-||x - y||^2 / gamma^2)."""

    gamma: float = 1.0

    def __post_init__(self):
        if not (np.isfinite(self.gamma) and self.gamma > 0.0):
            raise ValueError(f"gamma must be a positive finite real, got {self.gamma!r}")

    def _from_sqdist(self, d2: np.ndarray) -> np.ndarray:
        return np.exp(-d2 / (self.gamma * self.gamma))


@dataclass(frozen=True)
class WendlandC2:
    """Compactly supported Wendland kernel (1 - r)_+^4 (4r + 1).

    r is the Euclidean distance divided by ``support_radius``; the kernel is
    exactly zero for r >= 1, C^2 smooth, and takes values in [0, 1].
    """

    support_radius: float = 1.0

    def __post_init__(self):
        if not (np.isfinite(self.support_radius) and self.support_radius > 0.0):
            raise ValueError(
                f"support_radius must be a positive finite real, got {self.support_radius!r}"
            )

    def _from_sqdist(self, d2: np.ndarray) -> np.ndarray:
        r = np.sqrt(d2) / self.support_radius
        base = np.maximum(0.0, 1.0 - r)
        return base ** 4 * (4.0 * r + 1.0)


_POINT_KERNELS = (GaussianRBF, WendlandC2)


@dataclass(frozen=True)
class MeasureGaussian:
    """Gaussian kernel on empirical measures: exp(-mmd^2(base; P, Q) / gamma^2).

    ``gamma`` is an outer bandwidth, independent of any bandwidth the base
    point kernel carries.
    """

    base: GaussianRBF | WendlandC2
    gamma: float = 1.0

    def __post_init__(self):
        if not isinstance(self.base, _POINT_KERNELS):
            raise TypeError("base of a measure-level kernel must be a point-level kernel")
        if not (np.isfinite(self.gamma) and self.gamma > 0.0):
            raise ValueError(f"gamma must be a positive finite real, got {self.gamma!r}")


@dataclass(frozen=True, eq=False)
class EmpiricalMeasure:
    """Weighted atoms sum(w_i * delta_{x_i}) with w_i >= 0, sum w_i = 1."""

    atoms: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        atoms = as_points(self.atoms, "atoms")
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "weights", as_weights(self.weights, atoms.shape[0]))

    @property
    def dim(self) -> int:
        return self.atoms.shape[1]


def _require_point_kernel(k) -> None:
    if isinstance(k, MeasureGaussian):
        raise TypeError("point-level kernel required, got a measure-level kernel")
    if not isinstance(k, _POINT_KERNELS):
        raise TypeError(f"unknown kernel type {type(k).__name__}")


def pairwise(k, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Matrix of k(X[i], Y[j]) for a point-level kernel.

    Entries are computed from explicit coordinate differences (never the
    expanded dot-product identity), which makes the result exactly symmetric
    when X is Y and bitwise consistent with single-pair evaluation.
    """
    _require_point_kernel(k)
    X = as_points(X, "X")
    Y = as_points(Y, "Y")
    if X.shape[1] != Y.shape[1]:
        raise ValueError(f"dimension mismatch: {X.shape[1]} vs {Y.shape[1]}")
    n, m = X.shape[0], Y.shape[0]
    out = np.empty((n, m), dtype=float)
    rows = max(1, _CHUNK_BUDGET // max(1, m * X.shape[1]))
    for start in range(0, n, rows):
        stop = min(n, start + rows)
        diff = X[start:stop, None, :] - Y[None, :, :]
        out[start:stop] = k._from_sqdist((diff * diff).sum(axis=-1))
    return out


def eval_kernel(k, x, y) -> float:
    """Single kernel evaluation k(x, y) for a point-level kernel.

    Delegates to pairwise on 1x1 inputs, so the value agrees bitwise with
    the corresponding Gram entry.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    y = np.asarray(y, dtype=float).reshape(-1)
    return float(pairwise(k, x[None, :], y[None, :])[0, 0])


def gram_matrix(k, pts) -> np.ndarray:
    """Gram matrix K[i, j] = k(pts[i], pts[j]); exactly symmetric."""
    X = as_points(pts, "pts")
    return pairwise(k, X, X)


def sup_kernel_norm(k, probe) -> float:
    """Largest sqrt(k(x, x)) over a finite probe set.

    For a measure-level kernel the probe is a sequence of empirical measures
    and the result is 1 (the kernel of a measure with itself is exp(0)).
    """
    if isinstance(k, MeasureGaussian):
        measures = list(probe)
        if not measures:
            raise ValueError("probe must be nonempty")
        return max(np.sqrt(eval_measure_kernel(k, p, p)) for p in measures)
    _require_point_kernel(k)
    X = as_points(probe, "probe")
    diag = k._from_sqdist(np.zeros(X.shape[0]))
    return float(np.sqrt(diag).max())


_mmd_clamp_count = 0


def mmd_clamp_count() -> int:
    """How many times mmd_squared clamped a small negative value to 0."""
    return _mmd_clamp_count


def reset_mmd_clamp_count() -> None:
    global _mmd_clamp_count
    _mmd_clamp_count = 0


def _quad(w: np.ndarray, K: np.ndarray, v: np.ndarray) -> float:
    return float(np.dot(np.dot(w, K), v))


def mmd_squared(base, p: EmpiricalMeasure, q: EmpiricalMeasure) -> float:
    """Squared maximum mean discrepancy between two empirical measures.

    sum_ij w_i w_j k(x_i, x_j) + sum_ij v_i v_j k(y_i, y_j)
        - 2 sum_ij w_i v_j k(x_i, y_j)

    Nonnegative up to roundoff; tiny negative values are clamped to 0 and
    counted, magnitudes below -1e-8 raise NumericalError.  When p and q hold
    identical arrays all three terms share one arithmetic path, so the result
    is exactly 0.
    """
    global _mmd_clamp_count
    _require_point_kernel(base)
    if p.dim != q.dim:
        raise ValueError(f"dimension mismatch: {p.dim} vs {q.dim}")
    kxx = _quad(p.weights, pairwise(base, p.atoms, p.atoms), p.weights)
    kyy = _quad(q.weights, pairwise(base, q.atoms, q.atoms), q.weights)
    kxy = _quad(p.weights, pairwise(base, p.atoms, q.atoms), q.weights)
    value = (kxx + kyy) - 2.0 * kxy
    if value < 0.0:
        if value < -1e-8:
            raise NumericalError(f"mmd_squared produced {value!r}, below the -1e-8 bug threshold")
        _mmd_clamp_count += 1
        value = 0.0
    return value


def eval_measure_kernel(k: MeasureGaussian, p: EmpiricalMeasure, q: EmpiricalMeasure) -> float:
    """Measure-level kernel value exp(-mmd^2(base; p, q) / gamma^2), in (0, 1]."""
    if not isinstance(k, MeasureGaussian):
        raise TypeError("measure-level kernel required, got a point-level kernel")
    return float(np.exp(-mmd_squared(k.base, p, q) / (k.gamma * k.gamma)))


def measure_gram_matrix(k: MeasureGaussian, measures) -> np.ndarray:
    """Gram matrix of the measure-level kernel over a list of measures."""
    ms = list(measures)
    if not ms:
        raise ValueError("measures must be nonempty")
    n = len(ms)
    K = np.empty((n, n), dtype=float)
    for i in range(n):
        K[i, i] = eval_measure_kernel(k, ms[i], ms[i])
        for j in range(i + 1, n):
            K[i, j] = K[j, i] = eval_measure_kernel(k, ms[i], ms[j])
    return K
