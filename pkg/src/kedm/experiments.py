"""Experiment configuration and runners behind the command-line interface.

Each runner takes an :class:`ExperimentConfig` and returns an
:class:`ExperimentOutput` holding CSV tables, JSON artifacts and a summary.
All randomness derives from ``cfg.seed`` through ``SeedSequence`` keys, so a
(config, seed) pair reproduces its outputs exactly, independent of ``jobs``.
"""

from __future__ import annotations

import csv
import dataclasses
import enum
import hashlib
import io
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from math import comb
from pathlib import Path

import numpy as np

from .alignment import AnchorObservations, localize, spectral_factorize
from .gramian import squared_distances
from .measurement import (
    MeasurementSet,
    SamplingKind,
    SamplingScheme,
    measure,
    random_masks,
    sample_times,
)
from .metrics import (
    edm_error_series,
    estimate_max_missing,
    sparsity_csv,
    sparsity_level,
    trajectory_mismatch,
)
from .sdr import SdrConfig, kedm_at, solve_sdr
from .simulation import Scenario
from .trajectory import TrajectoryModel, TrajectoryParams, random_orthogonal, random_params

logger = logging.getLogger(__name__)


class ConfigError(ValueError):
    """Inconsistent or invalid experiment configuration."""


class ExperimentKind(str, enum.Enum):
    SAMPLING = "sampling"
    SPARSITY = "sparsity"
    NOISE = "noise"
    SATELLITE = "satellite"
    LOCALIZE = "localize"
    SIMULATE = "simulate"


@dataclass(frozen=True)
class ExperimentConfig:
    """Flat experiment description; unset sizes fall back to per-experiment defaults."""

    experiment: ExperimentKind
    model: str = "polynomial"
    P: int = 1
    omega: float | None = None
    d: int = 2
    N: int = 10
    T: int | None = None
    window: tuple[float, float] | None = None
    sigma: float = 0.0
    m_missing: int | None = None
    sparsity: float | None = None
    n_anchors: int | None = None
    M: int = 50
    seed: int = 0
    grid_points: int = 201
    sdr: SdrConfig = field(default_factory=SdrConfig)
    # sampling study
    schemes: tuple[str, ...] = ("random", "chebyshev", "equispaced")
    # sparsity table
    P_values: tuple[int, ...] = ()
    N_values: tuple[int, ...] = ()
    delta: float = 0.99
    q: float = 0.9
    step: int | None = None
    patience: int = 3
    # noise study
    sigmas: tuple[float, ...] = (0.01, 0.1, 1.0)
    T_values: tuple[int, ...] = ()
    # satellite scenario: orbit frequency multiples p_n of omega
    frequencies: tuple[int, ...] = ()
    # localize: input files
    measurements: str | None = None
    anchors: str | None = None

    def __post_init__(self):
        try:
            object.__setattr__(self, "experiment", ExperimentKind(self.experiment))
        except ValueError as exc:
            raise ConfigError(f"unknown experiment {self.experiment!r}") from exc
        if isinstance(self.sdr, dict):
            object.__setattr__(self, "sdr", _sdr_from_dict(self.sdr))
        for name in ("schemes", "P_values", "N_values", "sigmas", "T_values", "frequencies"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if self.window is not None:
            object.__setattr__(self, "window", tuple(float(w) for w in self.window))

    # -- derived quantities ---------------------------------------------
    def trajectory_model(self, P: int | None = None) -> TrajectoryModel:
        P = self.P if P is None else P
        if self.model == "polynomial":
            return TrajectoryModel.polynomial(P)
        return TrajectoryModel.bandlimited(P, 2 * np.pi if self.omega is None else self.omega)

    def time_window(self) -> tuple[float, float]:
        if self.window is not None:
            return self.window
        return (-1.0, 1.0) if self.model == "polynomial" else (0.0, 1.0)

    def missing_for(self, N: int) -> int:
        if self.m_missing is not None:
            return self.m_missing
        if self.sparsity is not None:
            return int(round(self.sparsity * comb(N, 2)))
        return 0

    def scaled_T(self, model: TrajectoryModel) -> int:
        """``T = K + 1`` (polynomial) or ``2K + 1`` (bandlimited) unless ``T`` is set."""
        if self.T is not None:
            return self.T
        K = model.gram_degree
        return K + 1 if model.is_polynomial else 2 * K + 1

    # -- validation -----------------------------------------------------
    def validate(self) -> ExperimentConfig:
        def need(cond, msg):
            if not cond:
                raise ConfigError(msg)

        need(self.model in ("polynomial", "bandlimited"), f"unknown model {self.model!r}")
        need(self.P >= 0 and all(p >= 0 for p in self.P_values), "degrees must be nonnegative")
        need(self.model == "polynomial" or self.P >= 1, "bandlimited models need P >= 1")
        need(self.omega is None or self.omega > 0, "omega must be positive")
        need(self.d >= 1, "d must be positive")
        need(self.N >= self.d + 1, "need N >= d + 1")
        need(self.T is None or self.T >= 1, "T must be positive")
        need(self.window is None or (len(self.window) == 2 and self.window[0] < self.window[1]),
             "window must be [T1, T2] with T1 < T2")
        need(self.sigma >= 0 and all(s >= 0 for s in self.sigmas), "noise levels must be >= 0")
        need(self.m_missing is None or self.sparsity is None,
             "give either m_missing or sparsity, not both")
        need(self.sparsity is None or 0 <= self.sparsity <= 1, "sparsity must lie in [0, 1]")
        need(self.m_missing is None or 0 <= self.m_missing <= comb(self.N, 2),
             "m_missing out of range")
        need(self.M >= 1, "M must be positive")
        need(self.grid_points >= 2, "grid_points must be at least 2")
        need(self.n_anchors is None or self.d + 1 <= self.n_anchors <= self.N,
             "n_anchors must lie in [d + 1, N]")
        kind = self.experiment
        if kind is ExperimentKind.SAMPLING:
            need(len(self.schemes) > 0, "sampling study needs schemes")
            for s in self.schemes:
                need(s in {k.value for k in SamplingKind}, f"unknown sampling scheme {s!r}")
        if kind is ExperimentKind.SPARSITY:
            need(self.delta > 0 and 0 <= self.q < 1, "need delta > 0 and 0 <= q < 1")
            need(all(n >= self.d + 1 for n in self.N_values), "N_values must be >= d + 1")
            need(self.step is None or self.step >= 1, "step must be positive")
        if kind is ExperimentKind.NOISE:
            need(len(self.sigmas) > 0, "noise study needs sigmas")
            need(all(t >= 1 for t in self.T_values), "T_values must be positive")
        if kind is ExperimentKind.SATELLITE:
            need(self.model == "bandlimited", "satellite orbits use the bandlimited model")
            need(all(f >= 1 for f in self.frequencies), "orbit frequencies must be >= 1")
            need(not self.frequencies or len(self.frequencies) == self.N,
                 "need one orbit frequency per satellite")
            need(not self.frequencies or max(self.frequencies) == self.P,
                 "P must equal the largest orbit frequency")
        if kind is ExperimentKind.LOCALIZE:
            need(self.measurements is not None and self.anchors is not None,
                 "localize needs 'measurements' and 'anchors' input files")
        return self

    # -- serialization --------------------------------------------------
    def to_dict(self) -> dict:
        out = {}
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if isinstance(v, enum.Enum):
                v = v.value
            elif isinstance(v, SdrConfig):
                v = v.to_dict()
            elif isinstance(v, tuple):
                v = list(v)
            out[f.name] = v
        return out

    @classmethod
    def from_dict(cls, data: dict) -> ExperimentConfig:
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "experiment" not in data:
            raise ConfigError("config must name an experiment")
        try:
            return cls(**data)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_json(cls, text: str) -> ExperimentConfig:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_dict(data)

    def with_overrides(self, **changes) -> ExperimentConfig:
        data = self.to_dict()
        data.update(changes)
        return ExperimentConfig.from_dict(data)

    def config_hash(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()[:16]


def _sdr_from_dict(data: dict) -> SdrConfig:
    try:
        return SdrConfig.from_dict(data)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid sdr config: {exc}") from exc


@dataclass
class ExperimentOutput:
    """CSV tables and JSON artifacts keyed by file stem, plus a JSON-able summary."""

    tables: dict[str, str] = field(default_factory=dict)
    artifacts: dict[str, str] = field(default_factory=dict)
    summary: dict = field(default_factory=dict)

    def write(self, out_dir: Path) -> list[Path]:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        written = []
        for stem, text in self.tables.items():
            written.append(out_dir / f"{stem}.csv")
            written[-1].write_text(text)
        for stem, text in self.artifacts.items():
            written.append(out_dir / f"{stem}.json")
            written[-1].write_text(text)
        written.append(out_dir / "summary.json")
        written[-1].write_text(json.dumps(self.summary, indent=2, sort_keys=True))
        return written


def csv_table(cfg: ExperimentConfig, header: list[str], rows, units: str) -> str:
    """CSV text whose first row is a comment naming units and the config hash."""
    buf = io.StringIO()
    buf.write(f"# kedm {cfg.experiment.value} config_hash={cfg.config_hash()} "
              f"seed={cfg.seed} units: {units}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _map(fn, args: list, jobs: int) -> list:
    if jobs > 1 and len(args) > 1:
        with ProcessPoolExecutor(min(jobs, len(args))) as pool:
            return list(pool.map(fn, args))
    return [fn(a) for a in args]


def _streams(seed: int, *key: int, n: int = 3) -> list[np.random.Generator]:
    return [np.random.default_rng(s)
            for s in np.random.SeedSequence([int(seed), *map(int, key)]).spawn(n)]


def _subseed(rng: np.random.Generator) -> int:
    return int(rng.integers(2**62))


# -- sampling study -------------------------------------------------------

def _sampling_trial(args) -> dict[str, np.ndarray]:
    cfg, trial = args
    model = cfg.trajectory_model()
    window = cfg.time_window()
    T = _sampling_T(cfg, model)
    g_params, g_times, g_noise = _streams(cfg.seed, 1, trial)
    params = random_params(model, cfg.d, cfg.N, g_params)
    noise_seed, times_seed = _subseed(g_noise), _subseed(g_times)
    grid = np.linspace(*window, cfg.grid_points)
    truth = squared_distances(params.evaluate(grid))
    out = {}
    for scheme in cfg.schemes:
        times = sample_times(SamplingScheme(scheme, window, T), times_seed)
        masks = random_masks(T, cfg.N, cfg.missing_for(cfg.N), noise_seed)
        ms = measure(params, times, masks, cfg.sigma, noise_seed)
        result = solve_sdr(ms, model, cfg.d, cfg.sdr)
        out[scheme] = edm_error_series(truth, kedm_at(result, grid))
    return out


def _sampling_T(cfg: ExperimentConfig, model: TrajectoryModel) -> int:
    # twice the minimal count, so noise rather than interpolation dominates
    return cfg.T if cfg.T is not None else 2 * model.gram_degree + 1


def run_sampling_study(cfg: ExperimentConfig, jobs: int = 1) -> ExperimentOutput:
    """Mean ``e_D(t)`` over ``M`` trials for each sampling scheme, full window grid."""
    cfg = cfg.validate()
    grid = np.linspace(*cfg.time_window(), cfg.grid_points)
    per_trial = _map(_sampling_trial, [(cfg, m) for m in range(cfg.M)], jobs)
    rows, summary = [], {}
    for scheme in cfg.schemes:
        mean = np.mean([res[scheme] for res in per_trial], axis=0)
        summary[scheme] = {"time_averaged_mean_eD": float(mean.mean()),
                           "max_mean_eD": float(mean.max())}
        rows.extend([scheme, repr(float(t)), repr(float(e))] for t, e in zip(grid, mean))
    model = cfg.trajectory_model()
    summary.update(T=_sampling_T(cfg, model), M=cfg.M,
                   config_hash=cfg.config_hash())
    table = csv_table(cfg, ["scheme", "t", "mean_eD"], rows,
                      "t in time units; mean_eD relative Frobenius error (dimensionless)")
    return ExperimentOutput({"sampling": table}, {}, summary)


# -- sparsity table -------------------------------------------------------

def run_sparsity_table(cfg: ExperimentConfig, jobs: int = 1) -> ExperimentOutput:
    """Estimated maximal sparsity ``S_hat`` over a grid of degrees and point counts."""
    cfg = cfg.validate()
    P_values = cfg.P_values or (cfg.P,)
    N_values = cfg.N_values or (cfg.N,)
    rows, cells = [], []
    for P in P_values:
        model = cfg.trajectory_model(P)
        T = cfg.scaled_T(model)
        for N in N_values:
            scenario = Scenario(model, cfg.d, N, T, cfg.time_window(), cfg.sigma,
                                SamplingKind.EQUISPACED, cfg.n_anchors, False,
                                cfg.grid_points, cfg.sdr)
            step = cfg.step or max(1, round(0.05 * comb(N, 2)))
            start = time.perf_counter()
            est = estimate_max_missing(scenario, cfg.delta, cfg.q, cfg.M, cfg.seed,
                                       step=step, patience=cfg.patience, jobs=jobs)
            elapsed = time.perf_counter() - start
            logger.info("P=%d N=%d: m_bar=%d S_hat=%.3f (%.0f s)", P, N, est.m_bar,
                        est.S_hat, elapsed)
            rows.append(dict(P=P, N=N, T=T, **est.to_row()))
            cells.append({"P": P, "N": N, "T": T, "m_bar": est.m_bar, "S_hat": est.S_hat,
                          "M": cfg.M, "seconds": elapsed,
                          "sweep": {str(m): list(v) for m, v in sorted(est.sweep.items())}})
    header = (f"kedm sparsity config_hash={cfg.config_hash()} seed={cfg.seed} "
              f"units: m_bar pairs per time; S_hat fraction of C(N,2)")
    return ExperimentOutput({"sparsity": sparsity_csv(rows, header)}, {},
                            {"cells": cells, "config_hash": cfg.config_hash()})


# -- noise study ----------------------------------------------------------

def _noise_trial(args):
    cfg, params, sigma, T, trial = args
    model = params.model
    window = cfg.time_window()
    _, g_masks, g_noise = _streams(cfg.seed, 3, int(round(sigma * 1e9)), T, trial)
    times = sample_times(SamplingScheme("equispaced", window, T))
    masks = random_masks(T, cfg.N, cfg.missing_for(cfg.N), _subseed(g_masks))
    ms = measure(params, times, masks, sigma, _subseed(g_noise))
    anchors = _anchors(cfg, params, model)
    est = localize(ms, anchors, model, cfg.d, cfg.sdr)
    return est, trajectory_mismatch(params, est, window, cfg.grid_points)


def _anchors(cfg: ExperimentConfig, params: TrajectoryParams,
             model: TrajectoryModel) -> AnchorObservations:
    n = cfg.d + 1 if cfg.n_anchors is None else cfg.n_anchors
    times = sample_times(SamplingScheme("equispaced", cfg.time_window(), model.basis_size))
    return AnchorObservations.from_trajectory(params, times, list(range(n)))


def run_noise_study(cfg: ExperimentConfig, jobs: int = 1) -> ExperimentOutput:
    """Fixed trajectory, ``M`` noisy realizations per ``(sigma, T)`` cell."""
    cfg = cfg.validate()
    model = cfg.trajectory_model()
    params = random_params(model, cfg.d, cfg.N, _streams(cfg.seed, 2)[0])
    K1 = model.gram_degree + 1
    T_values = cfg.T_values or ((cfg.T,) if cfg.T is not None else (K1, 2 * K1, 4 * K1))
    cells = [(s, T) for s in cfg.sigmas for T in T_values]
    args = [(cfg, params, s, T, m) for s, T in cells for m in range(cfg.M)]
    results = _map(_noise_trial, args, jobs)
    grid = np.linspace(*cfg.time_window(), cfg.grid_points)
    coord_names = [f"x{i}_{k}" for i in range(cfg.N) for k in range(cfg.d)]
    traj_rows, summary_rows, summary = [], [], []
    for c, (sigma, T) in enumerate(cells):
        chunk = results[c * cfg.M:(c + 1) * cfg.M]
        for m, (est, _) in enumerate(chunk):
            X = est.evaluate(grid)  # (G, d, N)
            flat = np.swapaxes(X, 1, 2).reshape(len(grid), -1)
            traj_rows.extend([sigma, T, m, repr(float(t)), *map(repr, map(float, row))]
                             for t, row in zip(grid, flat))
        mean_eX = float(np.mean([e for _, e in chunk]))
        summary_rows.append([sigma, T, cfg.M, repr(mean_eX)])
        summary.append({"sigma": sigma, "T": T, "M": cfg.M, "mean_eX": mean_eX})
    X = params.evaluate(grid)
    truth_rows = [[repr(float(t)), *map(repr, map(float, row))]
                  for t, row in zip(grid, np.swapaxes(X, 1, 2).reshape(len(grid), -1))]
    tables = {
        "noise_trajectories": csv_table(cfg, ["sigma", "T", "realization", "t", *coord_names],
                                        traj_rows, "t in time units; x coordinates in "
                                        "distance units"),
        "noise_mismatch": csv_table(cfg, ["sigma", "T", "M", "mean_eX"], summary_rows,
                                    "sigma in distance units; mean_eX integrated relative "
                                    "mismatch (time units)"),
        "noise_truth": csv_table(cfg, ["t", *coord_names], truth_rows,
                                 "t in time units; x coordinates in distance units"),
    }
    return ExperimentOutput(tables, {"truth": params.to_json()},
                            {"cells": summary, "config_hash": cfg.config_hash()})


# -- satellite scenario ---------------------------------------------------

def satellite_orbits(N: int, frequencies, omega0: float, rng) -> TrajectoryParams:
    """Elliptical orbits ``R (a cos(p w t), b sin(p w t), 0)`` as a bandlimited trajectory.

    Semi-axes ``a ~ U[1, 3]`` and ``b = a U[0.5, 1]``; ``R`` uniform on O(3).
    """
    frequencies = [int(p) for p in frequencies]
    P = max(frequencies)
    model = TrajectoryModel.bandlimited(P, omega0)
    coeffs = np.zeros((model.basis_size, 3, N))
    for n, p in enumerate(frequencies):
        a = rng.uniform(1.0, 3.0)
        b = a * rng.uniform(0.5, 1.0)
        R = random_orthogonal(3, rng)
        # coefficient order [B0, A1, B1, ...]: A_p multiplies sin, B_p multiplies cos
        coeffs[2 * p - 1, :, n] = b * R[:, 1]
        coeffs[2 * p, :, n] = a * R[:, 0]
    return TrajectoryParams(model, coeffs)


def run_satellite(cfg: ExperimentConfig, jobs: int = 1) -> ExperimentOutput:
    """Sparse, noisy distances between orbiting satellites; mean ``e_D`` at the sampling times."""
    cfg = cfg.validate()
    omega0 = 2 * np.pi if cfg.omega is None else cfg.omega
    frequencies = cfg.frequencies or (1,) * cfg.N
    g_orbits, g_masks, g_noise = _streams(cfg.seed, 4)
    params = satellite_orbits(cfg.N, frequencies, omega0, g_orbits)
    model = params.model
    window = cfg.time_window()
    T = cfg.T if cfg.T is not None else 30
    times = sample_times(SamplingScheme("equispaced", window, T))
    masks = random_masks(T, cfg.N, cfg.missing_for(cfg.N), _subseed(g_masks))
    ms = measure(params, times, masks, cfg.sigma, _subseed(g_noise))
    result = solve_sdr(ms, model, cfg.d, cfg.sdr)
    e_D = edm_error_series(squared_distances(params.evaluate(times)), kedm_at(result, times))
    anchors = _anchors(cfg, params, model)
    est = spectral_factorize(result, anchors)
    grid = np.linspace(*window, cfg.grid_points)
    X, Xh = params.evaluate(grid), est.evaluate(grid)
    rows = [[kind, n, repr(float(t)), *map(repr, map(float, P[:, n]))]
            for kind, Y in (("true", X), ("estimate", Xh))
            for n in range(cfg.N) for t, P in zip(grid, Y)]
    coords = [f"x{k}" for k in range(3)]
    summary = {
        "mean_eD": float(e_D.mean()),
        "max_eD": float(e_D.max()),
        "e_X": trajectory_mismatch(params, est, window, cfg.grid_points),
        "sparsity": sparsity_level(masks),
        "measured_per_time": int(comb(cfg.N, 2) - cfg.missing_for(cfg.N)),
        "T": T, "frequencies": list(frequencies), "solver_status": result.solver_status.value,
        "config_hash": cfg.config_hash(),
    }
    tables = {
        "satellite_trajectories": csv_table(cfg, ["kind", "point", "t", *coords], rows,
                                            "t in time units; x in distance units"),
        "satellite_eD": csv_table(cfg, ["t", "eD"],
                                  [[repr(float(t)), repr(float(e))] for t, e in zip(times, e_D)],
                                  "t in time units; eD relative (dimensionless)"),
    }
    return ExperimentOutput(tables, {"truth": params.to_json(), "estimate": est.to_json()},
                            summary)


# -- localize from files --------------------------------------------------

def run_localize(cfg: ExperimentConfig, jobs: int = 1, base: Path | None = None) -> ExperimentOutput:
    """Estimate a trajectory from measurement and anchor JSON files."""
    cfg = cfg.validate()
    base = Path(base or ".")
    try:
        ms = MeasurementSet.from_json((base / cfg.measurements).read_text())
        anchors = AnchorObservations.from_json((base / cfg.anchors).read_text())
    except (OSError, KeyError, ValueError) as exc:
        raise ConfigError(f"cannot read inputs: {exc}") from exc
    if ms.N != cfg.N:
        raise ConfigError(f"measurements have N={ms.N}, config says N={cfg.N}")
    model = cfg.trajectory_model()
    result = solve_sdr(ms, model, cfg.d, cfg.sdr)
    est = spectral_factorize(result, anchors)
    grid = np.linspace(*(cfg.window or ms.window), cfg.grid_points)
    X = est.evaluate(grid)
    coords = [f"x{i}_{k}" for i in range(cfg.N) for k in range(cfg.d)]
    rows = [[repr(float(t)), *map(repr, map(float, row))]
            for t, row in zip(grid, np.swapaxes(X, 1, 2).reshape(len(grid), -1))]
    table = csv_table(cfg, ["t", *coords], rows, "t in time units; x in distance units")
    summary = {"objective": result.objective, "solver_status": result.solver_status.value,
               "iterations": result.iterations, "config_hash": cfg.config_hash()}
    return ExperimentOutput({"trajectory": table},
                            {"trajectory": est.to_json(), "sdr": result.to_json()}, summary)


def simulate(cfg: ExperimentConfig) -> ExperimentOutput:
    """Synthetic inputs for :func:`run_localize`: truth, measurements and anchors."""
    cfg = cfg.validate()
    model = cfg.trajectory_model()
    g_params, g_masks, g_noise = _streams(cfg.seed, 5)
    params = random_params(model, cfg.d, cfg.N, g_params)
    T = cfg.scaled_T(model)
    times = sample_times(SamplingScheme("equispaced", cfg.time_window(), T))
    masks = random_masks(T, cfg.N, cfg.missing_for(cfg.N), _subseed(g_masks))
    ms = measure(params, times, masks, cfg.sigma, _subseed(g_noise))
    anchors = _anchors(cfg, params, model)
    header = (f"# kedm simulate config_hash={cfg.config_hash()} seed={cfg.seed} "
              f"units: t in time units; d2 squared distance units\n")
    return ExperimentOutput({"measurements": header + ms.to_csv()},
                            {"truth": params.to_json(), "measurements": ms.to_json(),
                             "anchors": anchors.to_json()},
                            {"T": T, "N": cfg.N, "config_hash": cfg.config_hash()})


def run_simulate(cfg: ExperimentConfig, jobs: int = 1) -> ExperimentOutput:
    return simulate(cfg)


RUNNERS = {
    ExperimentKind.SAMPLING: run_sampling_study,
    ExperimentKind.SPARSITY: run_sparsity_table,
    ExperimentKind.NOISE: run_noise_study,
    ExperimentKind.SATELLITE: run_satellite,
    ExperimentKind.LOCALIZE: run_localize,
    ExperimentKind.SIMULATE: run_simulate,
}

