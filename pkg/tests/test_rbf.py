import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from podrbf import (Box, build_snapshots, fit_coefficients, gram_matrix,
                    kernel_eval, normalize_kernel, pod_basis, sample)
from podrbf.errors import (ConfigurationError, DuplicateCenters,
                           IllConditionedGram, NegativeRadius)
from podrbf.rbf import CUBIC, LINEAR, g_vector


class TestKernel:
    def test_linear_at_zero(self):
        assert kernel_eval(LINEAR, 0.0) == 0.0

    def test_cubic_values(self):
        assert kernel_eval(CUBIC, 2.0) == 8.0
        assert kernel_eval(CUBIC, 0.5) == 0.125

    def test_aliases_normalize(self):
        assert normalize_kernel("linear") == LINEAR
        assert normalize_kernel("cubic") == CUBIC
        assert normalize_kernel(CUBIC) == CUBIC

    def test_unknown_kind_rejected(self):
        with pytest.raises(ConfigurationError):
            normalize_kernel("gaussian")

    def test_negative_radius_rejected(self):
        with pytest.raises(NegativeRadius):
            kernel_eval(LINEAR, -1.0)

    @given(st.floats(1e-6, 1e3), st.floats(1e-6, 1e3))
    def test_strictly_increasing(self, r1, dr):
        for kind in (LINEAR, CUBIC):
            assert kernel_eval(kind, r1 + dr) > kernel_eval(kind, r1)

    def test_vectorized(self):
        r = np.array([0.0, 1.0, 2.0])
        assert np.allclose(kernel_eval(CUBIC, r), [0.0, 1.0, 8.0])


class TestGram:
    def test_two_centers_linear(self):
        G = gram_matrix(np.array([[0.0], [1.0]]), LINEAR)
        assert np.array_equal(G, [[0.0, 1.0], [1.0, 0.0]])

    def test_three_centers_cubic(self):
        G = gram_matrix(np.array([[0.0], [1.0], [3.0]]), CUBIC)
        assert np.allclose(G, [[0.0, 1.0, 27.0], [1.0, 0.0, 8.0], [27.0, 8.0, 0.0]])

    def test_symmetry_exact(self):
        rng = np.random.default_rng(3)
        centers = rng.normal(size=(15, 4))
        for kind in (LINEAR, CUBIC):
            G = gram_matrix(centers, kind)
            assert np.array_equal(G, G.T)

    def test_duplicate_centers_rejected(self):
        centers = np.array([[0.2, 0.2], [0.7, 0.1], [0.2, 0.2]])
        with pytest.raises(DuplicateCenters):
            gram_matrix(centers, LINEAR)


class TestFit:
    def test_two_by_two_solve(self):
        G = np.array([[0.0, 1.0], [1.0, 0.0]])
        A = np.array([[1.0, 2.0]])
        coeffs = fit_coefficients(G, A, np.zeros((2, 1)), LINEAR)
        assert np.allclose(coeffs.D, [[2.0, 1.0]])

    def test_empty_amplitudes(self):
        G = np.array([[0.0, 1.0], [1.0, 0.0]])
        coeffs = fit_coefficients(G, np.empty((0, 2)), np.zeros((2, 1)), LINEAR)
        assert coeffs.D.shape == (0, 2)

    def test_interpolation_conditions_on_model1(self, sp, sp_grid):
        s = sample("LHS", 40, sp.box, seed=1)
        Y = build_snapshots(sp, s, sp_grid).Y
        basis, A = pod_basis(Y, 0.01)
        G = gram_matrix(s.points, LINEAR)
        coeffs = fit_coefficients(G, A, s.points, LINEAR)
        resid = np.abs(coeffs.D @ G - A).max()
        assert resid <= 1e-8 * np.linalg.norm(A)

    def test_near_duplicates_warn_ill_conditioned(self):
        centers = np.array([[0.0], [0.5], [1.0], [1.0 + 1e-7]])
        A = np.array([[1.0, 1.5, 2.0, 2.0]])
        with pytest.warns(IllConditionedGram):
            G = gram_matrix(centers, CUBIC)
            fit_coefficients(G, A, centers, CUBIC)


class TestGVector:
    def test_at_center_matches_gram_row(self):
        rng = np.random.default_rng(4)
        centers = rng.uniform(size=(9, 3))
        G = gram_matrix(centers, CUBIC)
        for j in (0, 4, 8):
            assert np.allclose(g_vector(centers[j], centers, CUBIC), G[j])

    def test_midpoint_values(self):
        centers = np.array([[0.0], [1.0]])
        assert np.allclose(g_vector([0.5], centers, LINEAR), [0.5, 0.5])
        assert np.allclose(g_vector([0.5], centers, CUBIC), [0.125, 0.125])

    def test_translation_invariance(self):
        rng = np.random.default_rng(5)
        centers = rng.normal(size=(7, 2))
        b = rng.normal(size=2)
        shift = np.array([13.7, -4.2])
        for kind in (LINEAR, CUBIC):
            g0 = g_vector(b, centers, kind)
            g1 = g_vector(b + shift, centers + shift, kind)
            assert np.abs(g1 - g0).max() <= 1e-12 * max(1.0, np.abs(g0).max())


def test_node_exactness_through_full_stack(sp, sp_grid):
    # interpolation at training nodes survives the POD round trip
    s = sample("LHS", 30, sp.box, seed=8)
    Y = build_snapshots(sp, s, sp_grid).Y
    basis, A = pod_basis(Y, 0.01)
    G = gram_matrix(s.points, CUBIC)
    coeffs = fit_coefficients(G, A, s.points, CUBIC)
    for j in (0, 11, 29):
        a_hat = coeffs.D @ g_vector(s.points[j], s.points, CUBIC)
        assert np.abs(a_hat - A[:, j]).max() <= 1e-7 * np.linalg.norm(A)
