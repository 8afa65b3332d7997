import struct

import numpy as np
import pytest

from podrbf import (SampleSet, TimeGrid, Trajectory, build_snapshots,
                    integrate, sample, stack, unstack)
from podrbf.errors import NumericalError
from podrbf.snapshot import (load_binary, matrix_from_binary, save_binary,
                             to_binary, to_csv)

from conftest import make_zero_dynamics


def subset(samples, rows):
    return SampleSet(points=samples.points[rows], strategy=samples.strategy,
                     seed=samples.seed, box=samples.box)


class TestStacking:
    def test_time_major_order(self):
        grid = TimeGrid(0.0, 1.0, 2)
        traj = Trajectory(grid, np.array([[1.0, 2.0], [3.0, 4.0]]),
                          np.zeros((2, 1)))
        assert np.array_equal(stack(traj), [1.0, 2.0, 3.0, 4.0])

    def test_round_trip(self):
        rng = np.random.default_rng(0)
        states = rng.normal(size=(7, 3))
        grid = TimeGrid(0.0, 1.0, 7)
        traj = Trajectory(grid, states, np.zeros((7, 1)))
        assert np.array_equal(unstack(stack(traj), 3), states)


class TestBuild:
    def test_single_sample_column(self, sp, sp_grid):
        s = subset(sample("LHS", 5, sp.box, seed=2), [0])
        snap = build_snapshots(sp, s, sp_grid)
        expected = stack(integrate(sp, s.points[0], sp_grid))
        assert snap.Y.shape == (200, 1)
        assert np.array_equal(snap.Y[:, 0], expected)

    def test_model1_shape(self, sp, sp_grid):
        s = sample("SLHS", 40, sp.box, seed=1)
        snap = build_snapshots(sp, s, sp_grid)
        assert snap.Y.shape == (2 * 100, 40)
        assert snap.m == 200 and snap.n_s == 40
        assert np.all(np.isfinite(snap.Y))

    def test_parallel_matches_serial(self, sp, sp_grid):
        s = sample("LHS", 12, sp.box, seed=3)
        serial = build_snapshots(sp, s, sp_grid, jobs=1)
        parallel = build_snapshots(sp, s, sp_grid, jobs=4)
        assert np.array_equal(serial.Y, parallel.Y)

    def test_permuting_samples_permutes_columns(self, sp, sp_grid):
        s = sample("LHS", 6, sp.box, seed=4)
        perm = np.array([3, 0, 5, 1, 4, 2])
        base = build_snapshots(sp, s, sp_grid)
        shuffled = build_snapshots(sp, subset(s, perm), sp_grid)
        assert np.array_equal(shuffled.Y, base.Y[:, perm])

    def test_failing_sample_names_its_index(self):
        from dataclasses import replace
        p = replace(make_zero_dynamics(),
                    rhs=lambda t, y, u: y * y * 1e8 + u[0])
        s = sample("LHS", 3, p.box, seed=5)
        grid = TimeGrid(0.0, 15.0, 20)
        with pytest.raises(NumericalError, match="sample"):
            build_snapshots(p, s, grid)


class TestBinaryFormat:
    def test_header_layout(self, sp, sp_grid):
        s = sample("LHS", 4, sp.box, seed=6)
        snap = build_snapshots(sp, s, sp_grid)
        blob = to_binary(snap)
        magic, m, n_s, reserved = struct.unpack("<4sIII", blob[:16])
        assert magic == b"SNAP"
        assert (m, n_s, reserved) == (200, 4, 0)
        assert len(blob) == 16 + 200 * 4 * 8

    def test_round_trip(self, sp, sp_grid):
        s = sample("LHS", 4, sp.box, seed=6)
        snap = build_snapshots(sp, s, sp_grid)
        assert np.array_equal(matrix_from_binary(to_binary(snap)), snap.Y)

    def test_file_round_trip(self, sp, sp_grid, tmp_path):
        s = sample("LHS", 4, sp.box, seed=6)
        snap = build_snapshots(sp, s, sp_grid)
        path = tmp_path / "snap.bin"
        save_binary(snap, path)
        assert np.array_equal(load_binary(path), snap.Y)

    def test_truncated_blob_rejected(self, sp, sp_grid):
        s = sample("LHS", 4, sp.box, seed=6)
        blob = to_binary(build_snapshots(sp, s, sp_grid))
        with pytest.raises(Exception):
            matrix_from_binary(blob[:-8])


def test_csv_has_one_row_per_snapshot_entry(sp, sp_grid):
    s = sample("LHS", 3, sp.box, seed=7)
    snap = build_snapshots(sp, s, sp_grid)
    lines = [ln for ln in to_csv(snap).splitlines() if not ln.startswith("#")]
    assert len(lines) == 1 + snap.m  # header + one row per stacked entry
