"""Snapshot matrix assembly: evaluate the full-order model over a sample
set and stack each trajectory into one column.

Stacking is time-major: the n_y state values at t_1, then at t_2, and so
on, giving column length m = n_y * n_t. The stacking descriptor is stored
with the matrix so downstream consumers agree on the index <-> (t_i, y_j)
mapping.
"""

from __future__ import annotations

import csv
import io
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DimensionMismatch, NonFiniteState
from .integrator import (DEFAULT_ATOL, DEFAULT_RTOL, TimeGrid, Trajectory,
                         default_grid, integrate)
from .problem import ProblemDef
from .sampling import SampleSet

TIME_MAJOR = "time-major"

_MAGIC = b"SNAP"
_HEADER = struct.Struct("<4sIII")   # magic, m, n_s, reserved; 16 bytes


def stack(traj: Trajectory) -> np.ndarray:
    """Stack a trajectory's states into a length n_y*n_t column."""
    return traj.states.reshape(-1).copy()


def unstack(vec: np.ndarray, n_y: int) -> np.ndarray:
    """Inverse of stack: recover the (n_t, n_y) state matrix."""
    vec = np.asarray(vec, float)
    if vec.size % n_y != 0:
        raise DimensionMismatch(f"vector length {vec.size} not divisible by n_y={n_y}")
    return vec.reshape(-1, n_y)


@dataclass(frozen=True)
class SnapshotMatrix:
    """m x n_s matrix whose column i is the stacked solve at sample i."""

    Y: np.ndarray
    grid: TimeGrid
    samples: SampleSet
    stacking: str = TIME_MAJOR

    @property
    def m(self) -> int:
        return self.Y.shape[0]

    @property
    def n_s(self) -> int:
        return self.Y.shape[1]

    @property
    def n_y(self) -> int:
        return self.m // self.grid.n_t


def build_snapshots(p: ProblemDef, samples: SampleSet, grid: TimeGrid | None = None,
                    rtol: float = DEFAULT_RTOL, atol: float = DEFAULT_ATOL,
                    jobs: int | None = 1) -> SnapshotMatrix:
    """Integrate every sample and assemble columns in sample order.

    Evaluations are independent and may run on ``jobs`` worker threads
    (None means one per CPU); assembly preserves the input ordering, so
    parallel and serial builds are elementwise identical. A failed
    integration aborts the whole build — a hole in Y would invalidate the
    SVD downstream.
    """
    if samples.n_s < 1:
        raise ConfigurationError("sample set is empty")
    if grid is None:
        grid = default_grid(p)

    def column(i: int) -> np.ndarray:
        try:
            return stack(integrate(p, samples.points[i], grid, rtol, atol))
        except Exception as e:
            raise type(e)(f"sample {i} at b={samples.points[i]}: {e}") from e

    if jobs == 1:
        cols = [column(i) for i in range(samples.n_s)]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            cols = list(pool.map(column, range(samples.n_s)))
    Y = np.column_stack(cols)
    if not np.all(np.isfinite(Y)):
        raise NonFiniteState("snapshot matrix has non-finite entries")
    return SnapshotMatrix(Y, grid, samples)


# -- serialization -----------------------------------------------------------

def to_binary(snap: SnapshotMatrix) -> bytes:
    """Compact dump: 16-byte header (magic "SNAP", u32 m, u32 n_s,
    u32 reserved) then row-major float64, little-endian."""
    header = _HEADER.pack(_MAGIC, snap.m, snap.n_s, 0)
    return header + np.ascontiguousarray(snap.Y, dtype="<f8").tobytes()


def matrix_from_binary(blob: bytes) -> np.ndarray:
    if len(blob) < _HEADER.size:
        raise ConfigurationError("snapshot blob shorter than its header")
    magic, m, n_s, _ = _HEADER.unpack_from(blob)
    if magic != _MAGIC:
        raise ConfigurationError(f"bad snapshot magic {magic!r}")
    expected = _HEADER.size + 8 * m * n_s
    if len(blob) != expected:
        raise ConfigurationError(
            f"snapshot blob has {len(blob)} bytes, header implies {expected}")
    return np.frombuffer(blob, dtype="<f8", offset=_HEADER.size).reshape(m, n_s).copy()


def save_binary(snap: SnapshotMatrix, path) -> None:
    with open(path, "wb") as f:
        f.write(to_binary(snap))


def load_binary(path) -> np.ndarray:
    with open(path, "rb") as f:
        return matrix_from_binary(f.read())


def to_csv(snap: SnapshotMatrix) -> str:
    """Rows = stacked entries, columns = samples."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"s{j + 1}" for j in range(snap.n_s)])
    for row in snap.Y:
        w.writerow([repr(float(v)) for v in row])
    return buf.getvalue()


def save_csv(snap: SnapshotMatrix, path) -> None:
    with open(path, "w") as f:
        f.write(to_csv(snap))
