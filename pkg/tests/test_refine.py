import numpy as np
import pytest

from podrbf import RefineConfig, refine_optimize
from podrbf.errors import ConfigurationError

from conftest import make_zero_dynamics


def affine_problem():
    """Trajectory is constant in b, criterion integrates u(t) directly.

    The modal amplitudes are then constant in b and the control part of
    the criterion is evaluated exactly on both paths, so surrogate and
    original criteria agree to the last bit.
    """
    return make_zero_dynamics(integrand=lambda t, y, u: u[:, 0])


class TestConvergence:
    def test_affine_problem_converges_immediately(self):
        cfg = RefineConfig(strategy="LHS", n_s=8, kernel="linear", tol=0.01,
                           seed=3, max_iters=5)
        res = refine_optimize(affine_problem(), cfg)
        assert res.converged
        assert len(res.iterations) == 1
        assert res.iterations[0].eps == 0.0

    def test_trace_records_surrogate_and_original_values(self):
        cfg = RefineConfig(strategy="LHS", n_s=8, kernel="linear", tol=0.01,
                           seed=3)
        res = refine_optimize(affine_problem(), cfg)
        it = res.iterations[0]
        assert it.psi0 == pytest.approx(it.psi0_hat, abs=1e-12)
        assert it.k >= 1
        assert res.b_star.shape == (2,)


@pytest.fixture(scope="module")
def sp_refine(sp):
    # tiny tolerance forces several shrink steps for geometry checks
    cfg = RefineConfig(strategy="LHS", n_s=12, kernel="linear", tol=1e-12,
                       seed=1, max_iters=4)
    return refine_optimize(sp, cfg), sp.box


class TestGeometry:
    def test_bounds_nested_in_global_box(self, sp_refine):
        res, box = sp_refine
        for it in res.iterations:
            assert np.all(it.bounds.lower >= box.lower - 1e-15)
            assert np.all(it.bounds.upper <= box.upper + 1e-15)
            assert np.all(it.training_bounds.lower >= box.lower - 1e-15)
            assert np.all(it.training_bounds.upper <= box.upper + 1e-15)

    def test_training_bounds_contain_optimization_bounds(self, sp_refine):
        res, _ = sp_refine
        for it in res.iterations:
            assert np.all(it.training_bounds.lower <= it.bounds.lower + 1e-15)
            assert np.all(it.training_bounds.upper >= it.bounds.upper - 1e-15)

    def test_geometric_width_decay_where_unclipped(self, sp_refine):
        res, box = sp_refine
        shrink = 0.5
        for i, it in enumerate(res.iterations):
            expected = box.widths * shrink ** i
            unclipped = ((it.bounds.lower > box.lower + 1e-15)
                         & (it.bounds.upper < box.upper - 1e-15))
            widths = it.bounds.upper - it.bounds.lower
            assert np.allclose(widths[unclipped], expected[unclipped],
                               rtol=1e-12)
            assert np.all(widths <= expected + 1e-12)

    def test_bounds_center_on_previous_incumbent(self, sp_refine):
        res, box = sp_refine
        for prev, it in zip(res.iterations, res.iterations[1:]):
            mid = 0.5 * (it.bounds.lower + it.bounds.upper)
            unclipped = ((it.bounds.lower > box.lower + 1e-15)
                         & (it.bounds.upper < box.upper - 1e-15))
            assert np.allclose(mid[unclipped],
                               prev.opt.b_star[unclipped], atol=1e-12)

    def test_fresh_samples_each_iteration(self, sp_refine):
        res, _ = sp_refine
        assert len({it.opt.b_star.tobytes() for it in res.iterations}) > 1


class TestIncumbentSelection:
    def test_best_index_tracks_original_criterion(self, pd_prob):
        cfg = RefineConfig(strategy="SLHS", n_s=16, kernel="cubic", tol=1e-12,
                           seed=1, max_iters=3)
        res = refine_optimize(pd_prob, cfg)
        vals = [it.psi0 for it in res.iterations]
        assert res.best_index == int(np.argmin(vals))
        assert vals[res.best_index] <= vals[0]
        assert np.array_equal(res.b_star,
                              res.iterations[res.best_index].opt.b_star)

    def test_compare_original_attaches_reference_solve(self):
        cfg = RefineConfig(strategy="LHS", n_s=8, kernel="linear", tol=0.01,
                           seed=3, compare_original=True)
        res = refine_optimize(affine_problem(), cfg)
        assert res.original_opt is not None
        assert res.original_opt.b_star.shape == (2,)


class TestValidation:
    @pytest.mark.parametrize("bad", [dict(shrink=0.0), dict(shrink=1.0),
                                     dict(tol=0.0), dict(widen=0.9),
                                     dict(max_iters=0)])
    def test_rejects_bad_knobs(self, bad):
        with pytest.raises(ConfigurationError):
            RefineConfig(**bad).validate()

    def test_width0_must_match_dimension(self, sp):
        cfg = RefineConfig(n_s=8, width0=np.array([0.1, 0.1, 0.1]))
        with pytest.raises(ConfigurationError):
            refine_optimize(sp, cfg)

    def test_trace_serializes(self):
        cfg = RefineConfig(strategy="LHS", n_s=8, kernel="linear", tol=0.01,
                           seed=3)
        res = refine_optimize(affine_problem(), cfg)
        import json
        json.dumps(res.to_dict())
