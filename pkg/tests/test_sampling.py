import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from podrbf import (Box, lhs_sample, make_problem, random_sample, sample,
                    slhs_sample)
from podrbf.errors import ConfigurationError
from podrbf.sampling import from_csv, to_csv

UNIT = Box([0.0], [1.0])
UNIT2 = Box([0.0, 0.0], [1.0, 1.0])
STRATEGIES = ("RS", "LHS", "SLHS")


def stratum_counts(points, box, n_s):
    """Per-dimension histogram of stratum indices, n_s bins each."""
    unit = (points - box.lower) / box.widths
    idx = np.minimum((unit * n_s).astype(int), n_s - 1)
    return np.stack([np.bincount(idx[:, j], minlength=n_s)
                     for j in range(box.dim)])


class TestCommon:
    @pytest.mark.parametrize("strategy", STRATEGIES)
    def test_single_point_in_box(self, strategy):
        s = sample(strategy, 1, UNIT, seed=3)
        assert s.points.shape == (1, 1)
        assert UNIT.contains(s.points[0])

    @pytest.mark.parametrize("strategy", STRATEGIES)
    def test_deterministic_under_seed(self, strategy):
        a = sample(strategy, 12, UNIT2, seed=5).points
        b = sample(strategy, 12, UNIT2, seed=5).points
        assert np.array_equal(a, b)

    @pytest.mark.parametrize("strategy", STRATEGIES)
    def test_distinct_seeds_differ(self, strategy):
        a = sample(strategy, 12, UNIT2, seed=5).points
        b = sample(strategy, 12, UNIT2, seed=6).points
        assert not np.array_equal(a, b)

    def test_unknown_strategy_rejected(self):
        with pytest.raises(ConfigurationError):
            sample("halton", 4, UNIT, seed=0)

    @pytest.mark.parametrize("n_s", [0, -3])
    def test_nonpositive_size_rejected(self, n_s):
        with pytest.raises(ConfigurationError):
            sample("LHS", n_s, UNIT, seed=0)


class TestRandom:
    def test_mean_converges_to_box_center(self):
        s = random_sample(1000, UNIT, seed=7)
        assert abs(s.points.mean() - 0.5) < 0.05


class TestLhs:
    def test_one_point_per_quarter(self):
        s = lhs_sample(4, UNIT, seed=11)
        counts = stratum_counts(s.points, UNIT, 4)
        assert np.all(counts == 1)

    def test_two_points_split_each_dimension(self):
        s = lhs_sample(2, UNIT2, seed=2)
        for j in range(2):
            col = np.sort(s.points[:, j])
            assert col[0] < 0.5 <= col[1]

    def test_model2_box_forty_points_stratified(self):
        box = make_problem("population-dynamics").box
        s = lhs_sample(40, box, seed=1)
        assert np.all(stratum_counts(s.points, box, 40) == 1)


class TestSlhs:
    def test_two_points_are_a_mirror_pair(self):
        s = slhs_sample(2, UNIT, seed=4)
        x = s.points[:, 0]
        assert np.isclose(x[0], 1.0 - x[1], atol=1e-12)

    def test_reflection_present_for_every_point(self):
        s = slhs_sample(4, UNIT2, seed=9)
        for p in s.points:
            mirror = 1.0 - p
            assert np.min(np.abs(s.points - mirror).max(axis=1)) < 1e-12

    def test_model2_box_mirror_closure(self):
        box = make_problem("population-dynamics").box
        s = slhs_sample(40, box, seed=1)
        reflected = box.lower + box.upper - s.points
        for p in reflected:
            assert np.min(np.abs(s.points - p).max(axis=1)) < 1e-12

    def test_slhs_is_also_stratified(self):
        box = make_problem("population-dynamics").box
        s = slhs_sample(40, box, seed=1)
        assert np.all(stratum_counts(s.points, box, 40) == 1)

    def test_odd_size_includes_center(self):
        s = slhs_sample(5, UNIT2, seed=3)
        d = np.abs(s.points - 0.5).max(axis=1)
        assert d.min() < 1e-12


@settings(max_examples=40, deadline=None)
@given(strategy=st.sampled_from(STRATEGIES),
       n_s=st.integers(1, 24),
       dim=st.integers(1, 4),
       seed=st.integers(0, 10_000))
def test_points_inside_box_any_design(strategy, n_s, dim, seed):
    box = Box(-np.arange(1.0, dim + 1.0), np.arange(1.0, dim + 1.0) ** 2)
    s = sample(strategy, n_s, box, seed)
    assert s.points.shape == (n_s, dim)
    assert all(box.contains(p) for p in s.points)


@settings(max_examples=40, deadline=None)
@given(n_s=st.integers(2, 24), dim=st.integers(1, 4), seed=st.integers(0, 10_000))
def test_lhs_stratification_property(n_s, dim, seed):
    box = Box(np.zeros(dim), np.full(dim, 2.0))
    s = lhs_sample(n_s, box, seed)
    assert np.all(stratum_counts(s.points, box, n_s) == 1)


@settings(max_examples=40, deadline=None)
@given(n_s=st.integers(2, 24), dim=st.integers(1, 4), seed=st.integers(0, 10_000))
def test_slhs_mirror_closure_property(n_s, dim, seed):
    box = Box(np.full(dim, -1.0), np.full(dim, 3.0))
    s = slhs_sample(n_s, box, seed)
    reflected = box.lower + box.upper - s.points
    for p in reflected:
        assert np.min(np.abs(s.points - p).max(axis=1)) < 1e-9


def test_csv_round_trip():
    box = Box([0.0, -1.0], [2.0, 1.0])
    s = sample("SLHS", 7, box, seed=13)
    back = from_csv(to_csv(s))
    assert np.allclose(back.points, s.points)
    assert back.strategy == s.strategy
    assert back.seed == s.seed
    assert np.allclose(back.box.lower, box.lower)
    assert np.allclose(back.box.upper, box.upper)
