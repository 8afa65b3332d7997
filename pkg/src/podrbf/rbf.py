"""Radial basis function interpolation over the parameter domain.

Two kernels: linear spline g(r) = r and cubic spline g(r) = r^3. The
coefficient matrix solves G D^T = A^T where G is the kernel Gram matrix of
the training centers. No polynomial tail is appended, so the interpolant
is the bare kernel expansion y ~ D g(b); the Gram system is guarded by a
condition-number warning instead.

G has a zero diagonal and is not positive definite, so the solve uses a
pivoted LU factorization rather than Cholesky.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import lu_factor, lu_solve
from scipy.spatial.distance import cdist

from .errors import (ConfigurationError, DimensionMismatch, DuplicateCenters,
                     IllConditionedGram, NegativeRadius, SingularGram)

LINEAR = "linear-spline"
CUBIC = "cubic-spline"
KERNELS = (LINEAR, CUBIC)

_ALIASES = {"linear": LINEAR, "cubic": CUBIC, LINEAR: LINEAR, CUBIC: CUBIC}

COND_WARN_THRESHOLD = 1e12
DUPLICATE_RTOL = 1e-12


def normalize_kernel(kind: str) -> str:
    try:
        return _ALIASES[kind]
    except KeyError:
        raise ConfigurationError(
            f"unknown kernel {kind!r}; choose from {KERNELS}") from None


def kernel_eval(kind: str, r):
    """g(r) for scalar or array radii; radii must be nonnegative."""
    kind = normalize_kernel(kind)
    r = np.asarray(r, float)
    if np.any(r < 0):
        raise NegativeRadius("kernel radius must be >= 0")
    out = r if kind == LINEAR else r**3
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class RbfCoefficients:
    """Interpolation coefficients D (k x n_s) over the training centers."""

    D: np.ndarray
    centers: np.ndarray     # (n_s, n)
    kind: str


def gram_matrix(centers: np.ndarray, kind: str) -> np.ndarray:
    """G[i, j] = g(||b_i - b_j||); symmetric with zero diagonal.

    Coincident centers (distance <= 1e-12 times the center-set diameter)
    make G structurally singular and are rejected up front.
    """
    kind = normalize_kernel(kind)
    centers = np.atleast_2d(np.asarray(centers, float))
    dist = cdist(centers, centers)
    n = centers.shape[0]
    if n > 1:
        diameter = float(np.linalg.norm(centers.max(axis=0) - centers.min(axis=0)))
        off = dist + np.eye(n) * (diameter + 1.0)
        i, j = np.unravel_index(np.argmin(off), off.shape)
        if off[i, j] <= DUPLICATE_RTOL * diameter:
            raise DuplicateCenters(
                f"centers {i} and {j} coincide (distance {dist[i, j]:.3e})")
    G = kernel_eval(kind, dist)
    # enforce exact symmetry; cdist can differ in the last ulp across the diagonal
    return (G + G.T) / 2.0


def fit_coefficients(G: np.ndarray, A: np.ndarray, centers: np.ndarray,
                     kind: str) -> RbfCoefficients:
    """Solve G x = a for every amplitude row via pivoted LU.

    Warns IllConditionedGram above a 1e12 condition estimate and verifies
    the post-solve residual ||G x - a|| <= 1e-8 ||a|| per row.
    """
    kind = normalize_kernel(kind)
    G = np.asarray(G, float)
    A = np.atleast_2d(np.asarray(A, float))
    centers = np.atleast_2d(np.asarray(centers, float))
    if G.shape[0] != G.shape[1]:
        raise DimensionMismatch(f"Gram matrix is {G.shape}, expected square")
    if A.shape[1] != G.shape[0]:
        raise DimensionMismatch(
            f"amplitudes have {A.shape[1]} columns, Gram is {G.shape[0]}x{G.shape[0]}")
    if A.shape[0] == 0:
        return RbfCoefficients(np.empty((0, G.shape[0])), centers, kind)
    cond = np.linalg.cond(G)
    if not np.isfinite(cond):
        raise SingularGram("Gram matrix is singular")
    if cond > COND_WARN_THRESHOLD:
        warnings.warn(f"Gram condition estimate {cond:.3e} exceeds 1e12",
                      IllConditionedGram, stacklevel=2)
    try:
        lu, piv = lu_factor(G)
        D = lu_solve((lu, piv), A.T).T
    except (np.linalg.LinAlgError, ValueError) as e:
        raise SingularGram(f"Gram solve failed: {e}") from e
    residual = np.abs(G @ D.T - A.T).max()
    scale = max(np.abs(A).max(), 1e-300)
    if residual > 1e-8 * scale:
        raise SingularGram(
            f"interpolation residual {residual:.3e} exceeds 1e-8 * ||A||")
    return RbfCoefficients(D, centers, kind)


def g_vector(b: np.ndarray, centers: np.ndarray, kind: str) -> np.ndarray:
    """Kernel evaluation vector: entry j = g(||b - b_j||)."""
    b = np.asarray(b, float)
    centers = np.atleast_2d(np.asarray(centers, float))
    if b.ndim != 1 or b.size != centers.shape[1]:
        raise DimensionMismatch(
            f"query point has dimension {b.size}, centers have {centers.shape[1]}")
    return kernel_eval(kind, np.linalg.norm(centers - b, axis=1))
