"""The combined POD-RBF surrogate: train on a snapshot matrix, predict
stacked trajectories at new parameter points, and score accuracy.

Prediction is phi @ (D @ g(b)) — two matrix-vector products plus n_s
kernel evaluations. It never touches the ODE integrator; that asymmetry is
the entire point of the construction and is asserted in tests.
"""

from __future__ import annotations

import io
import json
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DimensionMismatch, ExtrapolationWarning
from .integrator import DEFAULT_ATOL, DEFAULT_RTOL, TimeGrid, default_grid, integrate
from .pod import cumulative_energy, pod_basis
from .problem import Box, ProblemDef
from .rbf import RbfCoefficients, fit_coefficients, g_vector, gram_matrix, normalize_kernel
from .sampling import SampleSet, sample
from .snapshot import SnapshotMatrix, build_snapshots, stack, unstack

DEFAULT_EPS_POD = 0.01
DEFAULT_N_G = 10


@dataclass(frozen=True)
class Surrogate:
    """Immutable trained model; predict is pure and thread-safe."""

    phi: np.ndarray             # (m, k)
    coeffs: RbfCoefficients     # D (k, n_s) over training centers
    grid: TimeGrid
    n_y: int
    box: Box                    # training domain
    eps_pod: float
    sigma: np.ndarray           # full spectrum of the training snapshots
    stacking: str = "time-major"

    @property
    def k(self) -> int:
        return self.phi.shape[1]

    @property
    def m(self) -> int:
        return self.phi.shape[0]

    @property
    def energy(self) -> np.ndarray:
        return cumulative_energy(self.sigma)

    def predict(self, b: np.ndarray) -> np.ndarray:
        """Stacked trajectory estimate of length m; no ODE solve."""
        b = np.asarray(b, float)
        if b.ndim != 1 or b.size != self.box.dim:
            raise DimensionMismatch(
                f"point has dimension {b.size}, surrogate expects {self.box.dim}")
        if not self.box.contains(b, atol=1e-12):
            warnings.warn(f"predicting outside the training box at b={b}",
                          ExtrapolationWarning, stacklevel=2)
        g = g_vector(b, self.coeffs.centers, self.coeffs.kind)
        return self.phi @ (self.coeffs.D @ g)

    def predict_states(self, b: np.ndarray) -> np.ndarray:
        """(n_t, n_y) state matrix form of predict."""
        return unstack(self.predict(b), self.n_y)


def train(snap: SnapshotMatrix, eps_pod: float = DEFAULT_EPS_POD,
          kind: str = "cubic-spline") -> Surrogate:
    """SVD -> rank selection -> amplitude projection -> RBF coefficient fit."""
    kind = normalize_kernel(kind)
    basis, A = pod_basis(snap.Y, eps_pod)
    centers = snap.samples.points
    G = gram_matrix(centers, kind)
    coeffs = fit_coefficients(G, A, centers, kind)
    return Surrogate(basis.phi, coeffs, snap.grid, snap.n_y, snap.samples.box,
                     eps_pod, basis.sigma, snap.stacking)


# -- error metrics ------------------------------------------------------------

@dataclass(frozen=True)
class ErrorReport:
    """Four accuracy metrics over a test snapshot matrix.

    worst_point is the test-column index containing the entry that attains
    the RMAE maximum.
    """

    r2: float
    mae: float
    mxae: float
    rmae: float
    n_g: int
    worst_point: int

    def to_dict(self) -> dict:
        return {"r2": self.r2, "mae": self.mae, "mxae": self.mxae,
                "rmae": self.rmae, "n_g": self.n_g, "worst_point": self.worst_point}


def error_report(Y_test: np.ndarray, Yhat_test: np.ndarray) -> ErrorReport:
    """MAE and MXAE average/maximize |y - yhat| over all m*n_g entries.

    R^2 keeps the absolute-deviation form 1 - sum|y - yhat| / sum|y - ybar|
    with ybar the per-entry mean over test columns. RMAE divides each
    absolute error by max(|y_ji|, 1e-8 * max|Y_test|) so it stays total on
    vanishing entries, then takes the maximum.
    """
    Y = np.atleast_2d(np.asarray(Y_test, float))
    Yh = np.atleast_2d(np.asarray(Yhat_test, float))
    if Y.shape != Yh.shape:
        raise DimensionMismatch(f"shape mismatch {Y.shape} vs {Yh.shape}")
    if Y.shape[1] < 1:
        raise DimensionMismatch("need at least one test point")
    err = np.abs(Y - Yh)
    mae = float(err.mean())
    mxae = float(err.max())
    ybar = Y.mean(axis=1, keepdims=True)
    den = float(np.abs(Y - ybar).sum())
    r2 = 1.0 - float(err.sum()) / max(den, 1e-300)
    scale = float(np.abs(Y).max())
    rel = err / np.maximum(np.abs(Y), max(1e-8 * scale, 1e-300))
    flat = int(np.argmax(rel))
    worst = flat % Y.shape[1]
    return ErrorReport(r2, mae, mxae, float(rel.max()), Y.shape[1], worst)


# -- one-call design evaluation ------------------------------------------------

@dataclass(frozen=True)
class DesignEvaluation:
    """Everything produced while scoring one sampling/kernel/n_s design."""

    surrogate: Surrogate
    report: ErrorReport
    test_samples: SampleSet
    Y_test: np.ndarray
    Yhat_test: np.ndarray


def evaluate_design(p: ProblemDef, strategy: str, n_s: int, kind: str, seed: int,
                    n_g: int = DEFAULT_N_G, eps_pod: float = DEFAULT_EPS_POD,
                    grid: TimeGrid | None = None, rtol: float = DEFAULT_RTOL,
                    atol: float = DEFAULT_ATOL, jobs: int | None = 1) -> DesignEvaluation:
    """Train on n_s points and score on n_g fresh points.

    Test points use the same strategy with seed + 1, so they never
    coincide with the training design.
    """
    if n_g < 1:
        raise ConfigurationError("n_g must be >= 1")
    if grid is None:
        grid = default_grid(p)
    train_set = sample(strategy, n_s, p.box, seed)
    snap = build_snapshots(p, train_set, grid, rtol, atol, jobs=jobs)
    surr = train(snap, eps_pod, kind)
    test_set = sample(strategy, n_g, p.box, seed + 1)
    test_snap = build_snapshots(p, test_set, grid, rtol, atol, jobs=jobs)
    Yhat = np.column_stack([surr.predict(bp) for bp in test_set.points])
    return DesignEvaluation(surr, error_report(test_snap.Y, Yhat), test_set,
                            test_snap.Y, Yhat)


# -- serialization --------------------------------------------------------------

def save(surr: Surrogate, path) -> None:
    """Binary dump (npz container): phi, D, centers, spectrum, metadata."""
    meta = {"eps_pod": surr.eps_pod, "kind": surr.coeffs.kind, "n_y": surr.n_y,
            "t0": surr.grid.t0, "T": surr.grid.T, "n_t": surr.grid.n_t,
            "stacking": surr.stacking}
    with open(path, "wb") as f:
        np.savez(f, phi=surr.phi, D=surr.coeffs.D, centers=surr.coeffs.centers,
                 sigma=surr.sigma, box_lower=surr.box.lower, box_upper=surr.box.upper,
                 meta=np.frombuffer(json.dumps(meta, sort_keys=True).encode(), dtype=np.uint8))


def load(path) -> Surrogate:
    with np.load(path) as z:
        meta = json.loads(bytes(z["meta"]).decode())
        coeffs = RbfCoefficients(z["D"], z["centers"], meta["kind"])
        grid = TimeGrid(meta["t0"], meta["T"], meta["n_t"])
        box = Box(z["box_lower"], z["box_upper"])
        return Surrogate(z["phi"], coeffs, grid, meta["n_y"], box,
                         meta["eps_pod"], z["sigma"], meta["stacking"])
