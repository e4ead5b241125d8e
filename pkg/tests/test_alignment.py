import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kedm.alignment import (
    AnchorObservations,
    TranslationModel,
    align_known_factor,
    localize,
    procrustes,
    registered_snapshots,
    spectral_factorize,
)
from kedm.exceptions import AnchorError, DegenerateConfigurationWarning
from kedm.gramian import BasisGramians, embed, kappa_inverse, squared_distances
from kedm.measurement import SamplingScheme, full_mask, measure, random_masks, sample_times
from kedm.sdr import SdrConfig, SdrResult, SolverStatus, kedm_at, solve_sdr
from kedm.trajectory import (
    GaugeTransform,
    TrajectoryModel,
    TrajectoryParams,
    apply_gauge,
    random_orthogonal,
    random_params,
)

POLY1 = TrajectoryModel.polynomial(1)


def exact_result(params, d=None):
    basis = BasisGramians.from_trajectory(params)
    basis = BasisGramians(basis.model, basis.nodes, basis.mats, d or params.d).rank_projected()
    return SdrResult(basis, 0.0, np.zeros(0), SolverStatus.CONVERGED)


def anchor_times(model, window=(-1.0, 1.0)):
    return sample_times(SamplingScheme("equispaced", window, model.basis_size))


def max_rel_error(true, est, t):
    X, Xh = true.evaluate(t), est.evaluate(t)
    return float(np.max(np.linalg.norm(X - Xh, axis=(1, 2)) / np.linalg.norm(X, axis=(1, 2))))


def rotation(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


class TestProcrustes:
    def test_identity(self):
        X = np.random.default_rng(0).standard_normal((2, 5))
        R, c = procrustes(X, X)
        np.testing.assert_allclose(R, np.eye(2), atol=1e-12)
        np.testing.assert_allclose(c, 0, atol=1e-12)

    @pytest.mark.parametrize("d", [2, 3])
    def test_exact_fit(self, d):
        rng = np.random.default_rng(d)
        X = rng.standard_normal((d, 6))
        Q = random_orthogonal(d, rng)
        c = rng.standard_normal(d)
        R, t = procrustes(X, Q @ X + c[:, None])
        assert np.linalg.norm(R - Q) <= 1e-10
        np.testing.assert_allclose(t, c, atol=1e-10)

    def test_reflection_allowed(self):
        X = np.random.default_rng(1).standard_normal((2, 4))
        F = np.diag([1.0, -1.0])
        R, _ = procrustes(X, F @ X)
        np.testing.assert_allclose(R, F, atol=1e-10)
        assert np.linalg.det(R) == pytest.approx(-1.0)

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_grid_search(self, seed):
        rng = np.random.default_rng(seed)
        X = rng.standard_normal((2, 5))
        Y = rotation(rng.uniform(0, 2 * np.pi)) @ X + rng.standard_normal((2, 1)) \
            + 0.3 * rng.standard_normal((2, 5))
        R, c = procrustes(X, Y)
        best = np.linalg.norm(R @ X + c[:, None] - Y)
        Xc, Yc = X - X.mean(1, keepdims=True), Y - Y.mean(1, keepdims=True)
        grid = np.arange(0, 2 * np.pi, 1e-3)
        search = min(np.linalg.norm(F @ rotation(th) @ Xc - Yc)
                     for F in (np.eye(2), np.diag([1.0, -1.0])) for th in grid)
        assert best <= search + 1e-12
        assert search - best <= 1e-4 * search

    @settings(max_examples=300, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(1, 4), st.integers(1, 8))
    def test_orthogonal(self, seed, d, n):
        rng = np.random.default_rng(seed)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", DegenerateConfigurationWarning)
            R, _ = procrustes(rng.standard_normal((d, n)), rng.standard_normal((d, n)))
        assert np.linalg.norm(R.T @ R - np.eye(d)) <= 1e-10

    def test_degenerate_warns(self):
        X = np.outer([1.0, 2.0, 3.0], [0.0, 1.0, 2.0, 3.0])  # collinear in 3-D
        with pytest.warns(DegenerateConfigurationWarning):
            R, _ = procrustes(X, X)
        assert np.linalg.norm(R.T @ R - np.eye(3)) <= 1e-10

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            procrustes(np.zeros((2, 3)), np.zeros((2, 4)))


class TestAnchorObservations:
    def test_json_round_trip(self):
        params = random_params(POLY1, 2, 5, seed=0)
        anchors = AnchorObservations.from_trajectory(params, [0.0, 1.0], [[0, 1, 2], [1, 3, 4]])
        back = AnchorObservations.from_json(anchors.to_json())
        assert back.index_sets == ((0, 1, 2), (1, 3, 4))
        for a, b in zip(back.positions, anchors.positions):
            np.testing.assert_array_equal(a, b)
        np.testing.assert_allclose(back.positions[1], params.evaluate(1.0)[:, [1, 3, 4]])

    def test_validation(self):
        with pytest.raises(ValueError):
            AnchorObservations([0.0], [[0, 1]], [np.zeros((2, 3))])
        with pytest.raises(ValueError):
            AnchorObservations([0.0], [[0, 0]], [np.zeros((2, 2))])
        with pytest.raises(ValueError):
            AnchorObservations([0.0, 1.0], [[0, 1]], [np.zeros((2, 2))])


class TestTranslationModel:
    def test_evaluate(self):
        M = np.array([[1.0, 2.0], [0.0, -1.0]])
        tm = TranslationModel(M, POLY1)
        np.testing.assert_allclose(tm.evaluate(3.0), [7.0, -3.0])
        np.testing.assert_allclose(tm.as_params().evaluate(3.0)[:, 0], [7.0, -3.0])


class TestSpectralFactorize:
    @pytest.mark.parametrize("model", [POLY1, TrajectoryModel.polynomial(2),
                                       TrajectoryModel.bandlimited(1, np.pi)])
    def test_exact_kedm_reproduces_trajectory(self, model):
        params = random_params(model, 2, 6, seed=1)
        anchors = AnchorObservations.from_trajectory(params, anchor_times(model), [0, 1, 2])
        result = exact_result(params)
        snaps = registered_snapshots(result, anchors)
        np.testing.assert_allclose(snaps, params.evaluate(anchors.times), atol=1e-8)
        est = spectral_factorize(result, anchors)
        assert max_rel_error(params, est, np.linspace(-1, 1, 101)) <= 1e-8

    def test_noiseless_pipeline(self):
        params = random_params(POLY1, 2, 6, seed=2, centered=True)
        times = sample_times(SamplingScheme("equispaced", (-1, 1), 3))
        ms = measure(params, times, np.stack([full_mask(6)] * 3))
        anchors = AnchorObservations.from_trajectory(params, anchor_times(POLY1), [0, 1, 2])
        est = localize(ms, anchors, POLY1, 2, SdrConfig(lam=0.0))
        assert max_rel_error(params, est, np.linspace(-1, 1, 201)) <= 1e-3

    def test_gauge_pinned_by_anchors(self):
        model = TrajectoryModel.polynomial(2)
        params = random_params(model, 2, 5, seed=3)
        rng = np.random.default_rng(4)
        g = GaugeTransform(random_orthogonal(2, rng),
                           TrajectoryParams(model, rng.standard_normal((3, 2, 1))))
        moved = apply_gauge(params, g)
        anchors = AnchorObservations.from_trajectory(moved, anchor_times(model), [1, 2, 4])
        est = spectral_factorize(exact_result(params), anchors)
        for t, idx, pos in zip(anchors.times, anchors.index_sets, anchors.positions):
            np.testing.assert_allclose(est.evaluate(t)[:, list(idx)], pos, atol=1e-6)
        assert max_rel_error(moved, est, np.linspace(-1, 1, 51)) <= 1e-8

    def test_static_matches_mds_plus_procrustes(self):
        model = TrajectoryModel.polynomial(0)
        rng = np.random.default_rng(5)
        X = rng.standard_normal((2, 7))
        D = squared_distances(X) * np.exp(0.05 * rng.standard_normal((7, 7)))
        D = np.triu(D, 1) + np.triu(D, 1).T  # perturbed, not an EDM
        ms = measure(TrajectoryParams(model, [X]), [0.0], full_mask(7)[None])
        ms = type(ms)(ms.times, D[None], ms.masks)
        anchors = AnchorObservations([0.0], [[0, 3, 5]], [X[:, [0, 3, 5]]])
        result = solve_sdr(ms, model, 2, SdrConfig(lam=0.0))
        est = spectral_factorize(result, anchors)
        # direct static reconstruction from the same Gramian
        Xh = embed(kappa_inverse(kedm_at(result, 0.0)), 2)
        R, c = procrustes(Xh[:, [0, 3, 5]], X[:, [0, 3, 5]])
        np.testing.assert_allclose(est.evaluate(0.0), R @ Xh + c[:, None], atol=1e-6)


class TestAlignKnownFactor:
    def test_recovers_truth(self):
        model = TrajectoryModel.bandlimited(1, 2.0)
        params = random_params(model, 2, 5, seed=6)
        rng = np.random.default_rng(7)
        g = GaugeTransform(random_orthogonal(2, rng),
                           TrajectoryParams(model, rng.standard_normal((3, 2, 1))))
        factor = apply_gauge(params, g)
        times = [-0.7, 0.1, 0.9]
        anchors = AnchorObservations.from_trajectory(params, times, [[0, 1, 2], [3], [4, 0]])
        est = align_known_factor(factor, anchors)
        np.testing.assert_allclose(est.coeffs, params.coeffs, atol=1e-8)

    def test_needs_one_full_anchor_time(self):
        params = random_params(POLY1, 2, 4, seed=0)
        anchors = AnchorObservations.from_trajectory(params, [0.0, 1.0], [[0, 1], [2, 3]])
        with pytest.raises(AnchorError):
            align_known_factor(params, anchors)


class TestAnchorErrors:
    def setup_method(self):
        self.params = random_params(POLY1, 2, 5, seed=0)
        self.ms = measure(self.params, [-1.0, 0.0, 1.0], np.stack([full_mask(5)] * 3))

    def test_too_few_anchor_points(self):
        anchors = AnchorObservations.from_trajectory(self.params, [-1.0, 1.0], [[0, 1, 2], [0, 1]])
        with pytest.raises(AnchorError):
            localize(self.ms, anchors, POLY1, 2)

    def test_too_few_anchor_times(self):
        anchors = AnchorObservations.from_trajectory(self.params, [0.0], [[0, 1, 2]])
        with pytest.raises(AnchorError):
            localize(self.ms, anchors, POLY1, 2)

    def test_wrong_dimension(self):
        anchors = AnchorObservations([-1.0, 1.0], [[0, 1, 2, 3]] * 2, [np.zeros((3, 4))] * 2)
        with pytest.raises(AnchorError):
            localize(self.ms, anchors, POLY1, 2)

    def test_index_out_of_range(self):
        anchors = AnchorObservations([-1.0, 1.0], [[0, 1, 9]] * 2, [np.zeros((2, 3))] * 2)
        with pytest.raises(AnchorError):
            spectral_factorize(exact_result(self.params), anchors)


class TestGaugeInvariance:
    def test_distance_functions_agree(self):
        model = TrajectoryModel.polynomial(1)
        params = random_params(model, 2, 7, seed=10)
        rng = np.random.default_rng(11)
        g = GaugeTransform(random_orthogonal(2, rng),
                           TrajectoryParams(model, rng.standard_normal((2, 2, 1))))
        moved = apply_gauge(params, g)
        times = sample_times(SamplingScheme("equispaced", (-1, 1), 5))
        masks = random_masks(5, 7, 6, seed=12)
        at = anchor_times(model)
        estimates = []
        for p in (params, moved):
            ms = measure(p, times, masks, sigma=0.05, seed=13)
            anchors = AnchorObservations.from_trajectory(p, at, [0, 1, 2])
            estimates.append(localize(ms, anchors, model, 2))
        grid = np.linspace(-1, 1, 41)
        D0, D1 = (squared_distances(e.evaluate(grid)) for e in estimates)
        np.testing.assert_allclose(D0, D1, atol=1e-6 * np.abs(D0).max())
