"""Randomized end-to-end localization trials.

Every trial is keyed by ``(seed, m_missing, trial)``; the key seeds one
``SeedSequence`` which is split into independent streams for the trajectory,
the sampling times, the masks and the noise.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .alignment import AnchorObservations, spectral_factorize
from .gramian import squared_distances
from .measurement import SamplingKind, SamplingScheme, measure, random_masks, sample_times
from .sdr import SdrConfig, SolverStatus, kedm_at, solve_sdr
from .trajectory import TrajectoryModel, TrajectoryParams, random_params


@dataclass(frozen=True)
class Scenario:
    """Everything needed to simulate and solve one localization problem."""

    model: TrajectoryModel
    d: int = 2
    N: int = 10
    T: int = 7
    window: tuple[float, float] = (-1.0, 1.0)
    sigma: float = 0.0
    sampling: SamplingKind = SamplingKind.EQUISPACED
    n_anchors: int | None = None
    centered: bool = False
    grid_points: int = 201
    sdr: SdrConfig = field(default_factory=SdrConfig)

    def __post_init__(self):
        object.__setattr__(self, "sampling", SamplingKind(self.sampling))
        object.__setattr__(self, "window", tuple(float(w) for w in self.window))
        if self.N < self.d + 1:
            raise ValueError("need N >= d + 1")
        if self.anchor_count > self.N:
            raise ValueError("more anchors than points")

    @property
    def anchor_count(self) -> int:
        return self.d + 1 if self.n_anchors is None else self.n_anchors

    def anchor_times(self) -> np.ndarray:
        return sample_times(SamplingScheme(SamplingKind.EQUISPACED, self.window,
                                           self.model.basis_size))

    def anchors_for(self, params: TrajectoryParams) -> AnchorObservations:
        return AnchorObservations.from_trajectory(params, self.anchor_times(),
                                                  list(range(self.anchor_count)))

    def grid(self) -> np.ndarray:
        return np.linspace(*self.window, self.grid_points)


@dataclass(frozen=True)
class TrialResult:
    e_X: float
    mean_e_D: float
    status: SolverStatus
    estimate: TrajectoryParams | None = field(default=None, repr=False)


def trial_streams(seed: int, m_missing: int, trial: int) -> list[np.random.SeedSequence]:
    return np.random.SeedSequence([int(seed), int(m_missing), int(trial)]).spawn(4)


def run_trial(scenario: Scenario, m_missing: int, seed: int, trial: int = 0,
              params: TrajectoryParams | None = None, keep_estimate: bool = False) -> TrialResult:
    """Simulate measurements with ``m_missing`` unmeasured pairs per time and localize."""
    from .metrics import edm_error_series, trajectory_mismatch

    s_params, s_times, s_masks, s_noise = trial_streams(seed, m_missing, trial)
    if params is None:
        params = random_params(scenario.model, scenario.d, scenario.N,
                               np.random.default_rng(s_params), centered=scenario.centered)
    times = sample_times(SamplingScheme(scenario.sampling, scenario.window, scenario.T),
                         np.random.default_rng(s_times))
    masks = random_masks(scenario.T, scenario.N, m_missing, int(s_masks.generate_state(1)[0]))
    ms = measure(params, times, masks, scenario.sigma, int(s_noise.generate_state(1)[0]))
    result = solve_sdr(ms, scenario.model, scenario.d, scenario.sdr)
    estimate = spectral_factorize(result, scenario.anchors_for(params))
    grid = scenario.grid()
    e_X = trajectory_mismatch(params, estimate, scenario.window, scenario.grid_points)
    e_D = edm_error_series(squared_distances(params.evaluate(grid)), kedm_at(result, grid))
    return TrialResult(e_X, float(np.mean(e_D)), result.solver_status,
                       estimate if keep_estimate else None)
