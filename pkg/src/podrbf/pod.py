"""Proper orthogonal decomposition of snapshot matrices.

The POD basis is the set of left singular vectors of Y; truncating it at
rank k gives the best k-dimensional least-squares subspace for the
snapshot columns (Eckart-Young). Rank selection keeps the smallest k whose
cumulative squared-singular-value energy reaches 1 - eps_pod^2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AllZeroSpectrum, ConfigurationError, DimensionMismatch, NumericalFailure


@dataclass(frozen=True)
class PodBasis:
    """Orthonormal basis phi (m x k) with its full spectrum and energies."""

    phi: np.ndarray
    sigma: np.ndarray
    k: int
    energy: np.ndarray      # E(1..d), nondecreasing, E(d) = 1


def compute_svd(Y: np.ndarray):
    """Thin SVD: Y = U diag(sigma) V^T with sigma nonincreasing."""
    Y = np.asarray(Y, float)
    if Y.size == 0:
        raise DimensionMismatch("empty snapshot matrix")
    if not np.all(np.isfinite(Y)):
        raise DimensionMismatch("snapshot matrix has non-finite entries")
    try:
        U, sigma, Vt = np.linalg.svd(Y, full_matrices=False)
    except np.linalg.LinAlgError as e:
        raise NumericalFailure(f"SVD did not converge: {e}") from e
    return U, sigma, Vt


def cumulative_energy(sigma: np.ndarray) -> np.ndarray:
    """E(k) = sum_{i<=k} sigma_i^2 / sum_i sigma_i^2."""
    sigma = np.asarray(sigma, float)
    total = float(np.sum(sigma**2))
    if total == 0.0:
        raise AllZeroSpectrum("all singular values are zero")
    return np.cumsum(sigma**2) / total


def select_rank(sigma: np.ndarray, eps_pod: float) -> int:
    """Smallest k with E(k) >= 1 - eps_pod^2 (falls back to d, though
    E(d) = 1 makes that unreachable)."""
    if not 0.0 < eps_pod < 1.0:
        raise ConfigurationError(f"eps_pod must be in (0, 1), got {eps_pod}")
    energy = cumulative_energy(sigma)
    threshold = 1.0 - eps_pod**2
    hits = np.nonzero(energy >= threshold)[0]
    return int(hits[0]) + 1 if hits.size else len(energy)


def project_amplitudes(phi: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Amplitude matrix A = phi^T Y (k x n_s projection coefficients)."""
    phi, Y = np.asarray(phi, float), np.asarray(Y, float)
    if phi.shape[0] != Y.shape[0]:
        raise DimensionMismatch(
            f"basis has {phi.shape[0]} rows, snapshots have {Y.shape[0]}")
    return phi.T @ Y


def pod_basis(Y: np.ndarray, eps_pod: float) -> tuple:
    """Full pipeline: SVD, rank selection, truncation, projection.

    Returns (PodBasis, A) where A is the k x n_s amplitude matrix.
    """
    U, sigma, _ = compute_svd(Y)
    k = select_rank(sigma, eps_pod)
    basis = PodBasis(U[:, :k].copy(), sigma, k, cumulative_energy(sigma))
    return basis, project_amplitudes(basis.phi, Y)
