"""Acceptance criteria, one test per criterion.

Each test prints a ``[PASS]``/``[FAIL]`` line (collected again in the terminal
summary) and asserts the criterion with its pinned tolerance. Experiment-scale
criteria are marked ``slow``; deselect them with ``-m "not slow"``.
"""

import itertools
import time
import warnings

import numpy as np
import pytest

from kedm.alignment import AnchorObservations, localize, procrustes, spectral_factorize
from kedm.exceptions import DegenerateConfigurationWarning
from kedm.experiments import (
    ExperimentConfig,
    run_sampling_study,
    run_satellite,
    run_sparsity_table,
)
from kedm.gramian import (
    basis_weights,
    default_nodes,
    embed,
    kappa,
    kappa_inverse,
    rank_project,
    squared_distances,
)
from kedm.measurement import SamplingScheme, measure, random_masks, sample_times
from kedm.metrics import edm_error_series, trajectory_mismatch
from kedm.sdr import LAMBDA_REL_DEFAULT, SdrConfig, kedm_at, solve_sdr
from kedm.trajectory import (
    GaugeTransform,
    TrajectoryModel,
    TrajectoryParams,
    apply_gauge,
    random_orthogonal,
    random_params,
)

cvxpy = pytest.importorskip("cvxpy")

EXACT = SdrConfig(lam=0.0)
# Monte-Carlo sweeps: looser solver, still far below the success threshold
SWEEP = SdrConfig(solver_tol=1e-5, max_iter=5000)
POLY_WINDOW, BL_WINDOW = (-1.0, 1.0), (0.0, 1.0)


def make_model(kind, P):
    return TrajectoryModel.polynomial(P) if kind == "polynomial" else \
        TrajectoryModel.bandlimited(P, 2 * np.pi)


def window_for(model):
    return POLY_WINDOW if model.is_polynomial else BL_WINDOW


# -- criteria 1 and 2: noiseless recovery ---------------------------------

CASES = list(itertools.product((5, 8), (1, 2), ("polynomial", "bandlimited")))
N_TRIALS = 20


def noiseless_trial(k):
    """Worst ``e_D`` over the grid, solve time, and ``e_X`` with ``d + 1`` anchors."""
    N, P, kind = CASES[k % len(CASES)]
    model = make_model(kind, P)
    window = window_for(model)
    params = random_params(model, 2, N, seed=1000 + k, centered=True)
    T = model.gram_degree + 1
    start = time.perf_counter()
    times = sample_times(SamplingScheme("equispaced", window, T))
    ms = measure(params, times, random_masks(T, N, 0, seed=k))
    result = solve_sdr(ms, model, 2, EXACT)
    grid = np.linspace(*window, 201)
    e_D = edm_error_series(squared_distances(params.evaluate(grid)), kedm_at(result, grid))
    elapsed = time.perf_counter() - start
    anchor_times = sample_times(SamplingScheme("equispaced", window, model.basis_size))
    anchors = AnchorObservations.from_trajectory(params, anchor_times, [0, 1, 2])
    est = spectral_factorize(result, anchors)
    return float(e_D.max()), elapsed, trajectory_mismatch(params, est, window, 201)


@pytest.fixture(scope="module")
def noiseless_runs():
    return [noiseless_trial(k) for k in range(N_TRIALS)]


def test_criterion_1_noiseless_exact_recovery(noiseless_runs, report):
    runs = noiseless_runs
    worst = max(e for e, _, _ in runs)
    elapsed = sum(t for _, t, _ in runs)
    ok = worst <= 1e-3 and elapsed <= 120
    report(1, "noiseless exact recovery", ok,
           f"max_t e_D over {N_TRIALS} trials = {worst:.2e} (<= 1e-3), {elapsed:.0f} s (<= 120 s)")
    assert ok


def test_criterion_2_trajectory_recovery(noiseless_runs, report):
    runs = noiseless_runs
    good = sum(e_X <= 1e-3 for _, _, e_X in runs)
    ok = good >= 19
    report(2, "end-to-end trajectory recovery", ok,
           f"{good}/{N_TRIALS} trials with e_X <= 1e-3 (need >= 19); "
           f"max e_X = {max(e for _, _, e in runs):.2e}")
    assert ok


# -- criterion 3: interpolation identities --------------------------------

def test_criterion_3_interpolation_identities(report):
    rng = np.random.default_rng(3)
    models = [TrajectoryModel.polynomial(P) for P in range(7)] + \
        [TrajectoryModel.bandlimited(P, 2 * np.pi) for P in range(1, 4)]
    worst_delta = worst_sum = 0.0
    for model in models:
        assert model.gram_degree <= 12
        window = window_for(model)
        nodes = default_nodes(model, window)
        W = basis_weights(model, nodes, nodes)
        worst_delta = max(worst_delta, np.abs(W - np.eye(len(nodes))).max())
        t = rng.uniform(*window, 1000)
        worst_sum = max(worst_sum, np.abs(basis_weights(model, nodes, t).sum(axis=-1) - 1).max())
    ok = worst_delta <= 1e-9 and worst_sum <= 1e-9
    report(3, "interpolation identities", ok,
           f"max |w_j(tau_k) - delta_jk| = {worst_delta:.1e}, max |sum_k w_k(t) - 1| = "
           f"{worst_sum:.1e} (<= 1e-9, K <= 12, both models)")
    assert ok


# -- criterion 4: static reduction ----------------------------------------

def static_reference_positions(D, W, lam, anchors_idx, anchor_pos, d):
    """Independent static EDM SDP over the N x N Gram, then MDS and Procrustes."""
    N = len(D)
    G = cvxpy.Variable((N, N), symmetric=True)
    iu, ju = np.nonzero(np.triu(W, 1))
    resid = cvxpy.hstack([D[i, j] - (G[i, i] + G[j, j] - 2 * G[i, j]) for i, j in zip(iu, ju)])
    prob = cvxpy.Problem(cvxpy.Minimize(2 * cvxpy.sum_squares(resid) - lam * cvxpy.trace(G)),
                         [G >> 0, G @ np.ones(N) == 0])
    prob.solve(solver=cvxpy.SCS, eps=1e-10, max_iters=200_000)
    X = embed(G.value, d)
    R, c = procrustes(X[:, anchors_idx], anchor_pos)
    return R @ X + c[:, None]


def test_criterion_4_static_reduction(report):
    model = TrajectoryModel.polynomial(0)
    rng = np.random.default_rng(4)
    worst = 0.0
    for k in range(10):
        N = int(rng.integers(5, 9))
        params = random_params(model, 2, N, seed=rng)
        times = np.array([0.0])
        masks = random_masks(1, N, int(rng.integers(0, 4)), seed=k)
        ms = measure(params, times, masks, sigma=0.1, seed=k)
        idx = [0, 1, 2]
        anchors = AnchorObservations.from_trajectory(params, times, idx)
        est = localize(ms, anchors, model, 2, SdrConfig())
        lam = LAMBDA_REL_DEFAULT * ms.mean_measured()
        ref = static_reference_positions(ms.edms[0], ms.masks[0], lam, idx,
                                         anchors.positions[0], 2)
        worst = max(worst, np.abs(est.evaluate(0.0) - ref).max())
    ok = worst <= 1e-4
    report(4, "static reduction", ok,
           f"max position difference vs static SDP + MDS + Procrustes = {worst:.1e} (<= 1e-4)")
    assert ok


# -- criterion 5: polynomial sparsity-table spot checks -------------------

BUDGET_S = 30 * 60


@pytest.mark.slow
@pytest.mark.parametrize("P, N, target", [(1, 10, 0.46), (2, 10, 0.46), (3, 15, 0.62)])
def test_criterion_5_table_spot_checks(P, N, target, report):
    cfg = ExperimentConfig("sparsity", model="polynomial", P_values=(P,), N_values=(N,), d=2,
                           M=50, delta=0.99, q=0.9, sdr=SWEEP)
    cell = run_sparsity_table(cfg).summary["cells"][0]
    tol, note = 0.1, ""
    if cell["seconds"] > BUDGET_S:
        # documented fallback for cells over budget
        cell = run_sparsity_table(cfg.with_overrides(M=20)).summary["cells"][0]
        tol, note = 0.15, f"; budget exceeded, reran with M=20 ({cell['seconds']:.0f} s)"
    ok = abs(cell["S_hat"] - target) <= tol
    report(5, f"polynomial sparsity table P={P}, N={N}", ok,
           f"S_hat = {cell['S_hat']:.3f} (m_bar = {cell['m_bar']}, T = {cell['T']}, "
           f"M = {cell['M']}), target {target} +/- {tol}, {cell['seconds']:.0f} s{note}")
    assert ok


# -- criterion 6: sampling-scheme ordering --------------------------------

@pytest.mark.slow
@pytest.mark.parametrize("kind", ["polynomial", "bandlimited"])
def test_criterion_6_sampling_ordering(kind, report):
    cfg = ExperimentConfig("sampling", model=kind, P=3, N=10, d=2, sigma=1.0, M=50, sdr=SWEEP)
    summary = run_sampling_study(cfg).summary
    e = {s: summary[s]["time_averaged_mean_eD"] for s in ("random", "chebyshev", "equispaced")}
    ok = e["equispaced"] <= 1.2 * e["chebyshev"] and \
        max(e["equispaced"], e["chebyshev"]) <= 0.8 * e["random"]
    report(6, f"sampling ordering ({kind})", ok,
           f"time-averaged mean e_D: equispaced {e['equispaced']:.4f}, Chebyshev "
           f"{e['chebyshev']:.4f}, random {e['random']:.4f}; need eq <= 1.2 cheb and "
           f"both <= 0.8 random (= {0.8 * e['random']:.4f})")
    assert ok


# -- criterion 7: satellite scenario --------------------------------------

@pytest.mark.slow
@pytest.mark.parametrize("N, frequencies, m_missing, bound", [
    (8, (1,) * 8, 25, 0.03),          # 3 of 28 distances per time
    (5, (1, 2, 1, 2, 1), 8, 0.09),    # 2 of 10 distances per time
])
def test_criterion_7_satellite(N, frequencies, m_missing, bound, report):
    cfg = ExperimentConfig("satellite", model="bandlimited", P=max(frequencies), d=3, N=N,
                           T=30, m_missing=m_missing, sigma=0.05, frequencies=frequencies)
    summary = run_satellite(cfg).summary
    ok = summary["mean_eD"] <= bound
    report(7, f"satellite N={N}", ok,
           f"mean e_D = {summary['mean_eD']:.4f} (<= {bound}), sparsity "
           f"{summary['sparsity']:.2f}, solver {summary['solver_status']}")
    assert ok


# -- criterion 8: property suites ------------------------------------------

CASES_PER_PROPERTY = 1000


def random_model(rng):
    P = int(rng.integers(0, 4))
    if P == 0 or rng.random() < 0.5:
        return TrajectoryModel.polynomial(P)
    return TrajectoryModel.bandlimited(P, float(rng.uniform(0.5, 7.0)))


def gauge_invariance(rng):
    model = random_model(rng)
    d, N = int(rng.integers(1, 4)), int(rng.integers(2, 9))
    params = random_params(model, d, N, seed=rng)
    c = TrajectoryParams(model, rng.standard_normal((model.basis_size, d, 1)))
    moved = apply_gauge(params, GaugeTransform(random_orthogonal(d, rng), c))
    t = rng.uniform(-2, 2, 5)
    D, Dg = squared_distances(params.evaluate(t)), squared_distances(moved.evaluate(t))
    return np.abs(D - Dg).max() <= 1e-9 * max(1.0, np.abs(D).max())


def centering_equivalence(rng):
    model = random_model(rng)
    centered = bool(rng.random() < 0.5)
    params = random_params(model, int(rng.integers(1, 4)), int(rng.integers(2, 9)), seed=rng,
                           centered=centered)
    t = rng.uniform(-2, 2, 100)
    vanishes = np.linalg.norm(params.evaluate(t).sum(axis=-1), axis=-1).max() <= 1e-10
    return params.is_centered() == vanishes == centered


def kappa_round_trip(rng):
    N, d = int(rng.integers(2, 16)), int(rng.integers(1, 5))
    X = rng.standard_normal((d, N))
    X -= X.mean(axis=1, keepdims=True)
    G = X.T @ X
    return np.abs(kappa_inverse(kappa(G)) - G).max() <= 1e-10 * max(1.0, np.abs(G).max())


def rank_project_props(rng):
    N, d = int(rng.integers(2, 16)), int(rng.integers(1, 5))
    A = rng.standard_normal((N, N))
    G = rank_project(A + A.T, d)
    lam = np.linalg.eigvalsh(G)
    scale = max(1.0, np.abs(lam).max())
    return (np.abs(rank_project(G, d) - G).max() <= 1e-10 * scale
            and lam.min() >= -1e-10 * scale
            and np.sum(lam > 1e-9 * scale) <= d)


def procrustes_props(rng):
    d, n = int(rng.integers(1, 4)), int(rng.integers(2, 12))
    n = max(n, d + 1)
    src = rng.standard_normal((d, n))
    R_true, c_true = random_orthogonal(d, rng), rng.standard_normal(d)
    dst = R_true @ src + c_true[:, None]
    R, c = procrustes(src, dst)
    orthogonal = np.abs(R.T @ R - np.eye(d)).max() <= 1e-10
    exact = np.abs(R @ src + c[:, None] - dst).max() <= 1e-9
    return orthogonal and exact and np.abs(R - R_true).max() <= 1e-8


PROPERTIES = {
    "gauge invariance of distances": gauge_invariance,
    "centering equivalence": centering_equivalence,
    "kappa round trip": kappa_round_trip,
    "rank_project idempotent and PSD": rank_project_props,
    "Procrustes orthogonality and exact fit": procrustes_props,
}


def test_criterion_8_property_suites(report):
    rng = np.random.default_rng(8)
    start = time.perf_counter()
    failures = {}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateConfigurationWarning)
        for name, prop in PROPERTIES.items():
            failures[name] = sum(not prop(rng) for _ in range(CASES_PER_PROPERTY))
    elapsed = time.perf_counter() - start
    ok = not any(failures.values()) and elapsed <= 60
    report(8, "property suites", ok,
           f"{CASES_PER_PROPERTY} cases x {len(PROPERTIES)} properties, failures "
           f"{failures}, {elapsed:.1f} s (<= 60 s)")
    assert ok
