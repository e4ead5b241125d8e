"""Anchor-based alignment: Procrustes registration and trajectory factorization."""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .exceptions import AnchorError, DegenerateConfigurationWarning
from .gramian import embed, kappa_inverse
from .measurement import MeasurementSet
from .sdr import SdrConfig, SdrResult, kedm_at, solve_sdr
from .trajectory import (GaugeTransform, TrajectoryModel, TrajectoryParams, apply_gauge,
                         fit_least_squares)


def procrustes(source, target) -> tuple[np.ndarray, np.ndarray]:
    """Orthogonal ``R`` and translation ``c`` minimizing ``||R source + c 1^T - target||_F``.

    Reflections are allowed. Both inputs are ``(d, n)`` column sets.
    """
    source = np.asarray(source, dtype=float)
    target = np.asarray(target, dtype=float)
    if source.shape != target.shape or source.ndim != 2:
        raise ValueError("source and target must be (d, n) arrays of the same shape")
    d = source.shape[0]
    xs = source.mean(axis=1)
    yt = target.mean(axis=1)
    U, s, Vt = np.linalg.svd((source - xs[:, None]) @ (target - yt[:, None]).T)
    if np.sum(s > 1e-10 * max(s.max(initial=0.0), 1e-300)) < d - 1:
        warnings.warn("anchor configuration is degenerate; rotation is not unique",
                      DegenerateConfigurationWarning, stacklevel=2)
    R = Vt.T @ U.T
    return R, yt - R @ xs


@dataclass(frozen=True, eq=False)
class AnchorObservations:
    """Known positions ``positions[l]`` (``(d, |I_l|)``) of points ``index_sets[l]`` at ``times[l]``."""

    times: np.ndarray
    index_sets: tuple[tuple[int, ...], ...]
    positions: tuple[np.ndarray, ...] = field(repr=False)

    def __post_init__(self):
        times = np.array(self.times, dtype=float).ravel()
        index_sets = tuple(tuple(int(i) for i in idx) for idx in self.index_sets)
        positions = tuple(np.array(p, dtype=float) for p in self.positions)
        if not len(times) == len(index_sets) == len(positions):
            raise ValueError("times, index_sets and positions must have equal length")
        for idx, pos in zip(index_sets, positions):
            if pos.ndim != 2 or pos.shape[1] != len(idx):
                raise ValueError("positions[l] must be (d, len(index_sets[l]))")
            if len(set(idx)) != len(idx):
                raise ValueError("anchor indices must be distinct within a time")
        if len({p.shape[0] for p in positions}) > 1:
            raise ValueError("anchor positions disagree on the dimension")
        for p in positions:
            p.flags.writeable = False
        times.flags.writeable = False
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "index_sets", index_sets)
        object.__setattr__(self, "positions", positions)

    @property
    def L(self) -> int:
        return len(self.times)

    @classmethod
    def from_trajectory(cls, params: TrajectoryParams, times: Sequence[float],
                        index_sets) -> AnchorObservations:
        """Exact anchor positions read off a known trajectory."""
        times = np.asarray(times, dtype=float).ravel()
        if index_sets and np.isscalar(index_sets[0]):
            index_sets = [list(index_sets)] * len(times)
        positions = [params.evaluate(t)[:, list(idx)] for t, idx in zip(times, index_sets)]
        return cls(times, index_sets, positions)

    def to_dict(self) -> dict:
        return {
            "times": self.times.tolist(),
            "index_sets": [list(i) for i in self.index_sets],
            "positions": [p.tolist() for p in self.positions],
        }

    @classmethod
    def from_dict(cls, data: dict) -> AnchorObservations:
        return cls(data["times"], data["index_sets"], data["positions"])

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_json(cls, text: str) -> AnchorObservations:
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True, eq=False)
class TranslationModel:
    """Model-conforming translation ``x(t) = M z(t)``; ``M`` is ``(d, L)``."""

    M: np.ndarray
    model: TrajectoryModel

    def evaluate(self, t) -> np.ndarray:
        return self.model.basis(t) @ self.M.T

    def as_params(self) -> TrajectoryParams:
        return TrajectoryParams(self.model, self.M.T[:, :, None])


def _check_anchors(anchors: AnchorObservations, model: TrajectoryModel, d: int, N: int) -> None:
    if anchors.L < model.basis_size:
        raise AnchorError(f"need anchors at >= {model.basis_size} times, got {anchors.L}")
    for t, idx, pos in zip(anchors.times, anchors.index_sets, anchors.positions):
        if len(idx) < d + 1:
            raise AnchorError(f"need >= {d + 1} anchors at every anchor time; "
                              f"got {len(idx)} at t={t:g}")
        if pos.shape[0] != d:
            raise AnchorError(f"anchor positions are {pos.shape[0]}-dimensional, expected {d}")
        if max(idx) >= N or min(idx) < 0:
            raise AnchorError("anchor index out of range")


def align_known_factor(factor: TrajectoryParams, anchors: AnchorObservations) -> TrajectoryParams:
    """Absolute trajectory from one spectral factor ``Xbar(t)`` of the Gramian.

    The rotation is fixed at the anchor time with the most anchors (at least
    ``d + 1``); the translation ``M z(t)`` is then a linear least-squares fit
    of the per-time anchor centroid offsets.
    """
    d, model = factor.d, factor.model
    if anchors.L < model.basis_size:
        raise AnchorError(f"need anchors at >= {model.basis_size} times, got {anchors.L}")
    best = int(np.argmax([len(i) for i in anchors.index_sets]))
    if len(anchors.index_sets[best]) < d + 1:
        raise AnchorError(f"need one anchor time with >= {d + 1} anchors")
    Xbar = factor.evaluate(anchors.times)
    idx = list(anchors.index_sets[best])
    U, _ = procrustes(Xbar[best][:, idx], anchors.positions[best])
    offsets = np.stack([(pos - U @ Xb[:, list(ix)]).mean(axis=1)
                        for Xb, ix, pos in zip(Xbar, anchors.index_sets, anchors.positions)])
    translation = fit_least_squares(model, anchors.times, offsets[:, :, None])
    return apply_gauge(factor, GaugeTransform(U, translation))


def registered_snapshots(result: SdrResult, anchors: AnchorObservations) -> np.ndarray:
    """Per-anchor-time positions ``U_l Xbar(tau_l) + x(tau_l) 1^T``; shape ``(L, d, N)``."""
    d = result.basis.d
    snaps = []
    for t, idx, pos in zip(anchors.times, anchors.index_sets, anchors.positions):
        Xbar = embed(kappa_inverse(kedm_at(result, t)), d)
        R, c = procrustes(Xbar[:, list(idx)], pos)
        snaps.append(R @ Xbar + c[:, None])
    return np.stack(snaps)


def spectral_factorize(result: SdrResult, anchors: AnchorObservations) -> TrajectoryParams:
    """Trajectory through anchor-registered snapshots of the estimated KEDM."""
    basis = result.basis
    _check_anchors(anchors, basis.model, basis.d, basis.N)
    return fit_least_squares(basis.model, anchors.times, registered_snapshots(result, anchors))


def localize(ms: MeasurementSet, anchors: AnchorObservations, model: TrajectoryModel, d: int,
             cfg: SdrConfig | None = None) -> TrajectoryParams:
    """End-to-end estimate: relaxation, then anchor-based factorization."""
    _check_anchors(anchors, model, d, ms.N)
    return spectral_factorize(solve_sdr(ms, model, d, cfg), anchors)
