"""Simulated distance measurements of moving points.

Random streams: the noise at time index ``i`` is drawn from
``np.random.default_rng([seed, i])``, one standard normal per unordered pair
in ``np.triu_indices(N, 1)`` order. Masks follow the same rule with an extra
stream tag, so per-time generation can be split freely.
"""

from __future__ import annotations

import csv
import enum
import io
import json
from dataclasses import dataclass, field
from math import comb
from typing import Callable, Sequence

import numpy as np

from .gramian import squared_distances
from .trajectory import TrajectoryParams

_MASK_STREAM = 0x6D61736B


class SamplingKind(str, enum.Enum):
    RANDOM = "random"
    CHEBYSHEV = "chebyshev"
    EQUISPACED = "equispaced"


@dataclass(frozen=True)
class SamplingScheme:
    kind: SamplingKind
    window: tuple[float, float]
    count: int

    def __post_init__(self):
        object.__setattr__(self, "kind", SamplingKind(self.kind))
        T1, T2 = map(float, self.window)
        if not T1 < T2:
            raise ValueError("sampling window must satisfy T1 < T2")
        if self.count < 1:
            raise ValueError("need at least one sampling time")
        object.__setattr__(self, "window", (T1, T2))


def sample_times(scheme: SamplingScheme, seed=None) -> np.ndarray:
    T1, T2 = scheme.window
    T = scheme.count
    i = np.arange(1, T + 1)
    if scheme.kind is SamplingKind.RANDOM:
        return np.random.default_rng(seed).uniform(T1, T2, size=T)
    if scheme.kind is SamplingKind.CHEBYSHEV:
        return 0.5 * (T1 + T2) + 0.5 * (T2 - T1) * np.cos((2 * i - 1) * np.pi / (2 * T))
    return T1 + (T2 - T1) * i / T


def random_mask(N: int, m_missing: int, seed=None) -> np.ndarray:
    """Symmetric 0/1 mask with exactly ``m_missing`` unmeasured pairs, chosen uniformly."""
    n_pairs = comb(N, 2)
    if not 0 <= m_missing <= n_pairs:
        raise ValueError(f"m_missing must lie in [0, {n_pairs}], got {m_missing}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    keep = np.ones(n_pairs)
    keep[rng.choice(n_pairs, size=m_missing, replace=False)] = 0.0
    W = np.zeros((N, N))
    iu = np.triu_indices(N, 1)
    W[iu] = keep
    return W + W.T


def full_mask(N: int) -> np.ndarray:
    return np.ones((N, N)) - np.eye(N)


def random_masks(T: int, N: int, m_missing: int, seed=None) -> np.ndarray:
    """Independent uniform masks per time, stream ``[seed, tag, i]`` for time ``i``."""
    seed = _entropy(seed)
    return np.stack([random_mask(N, m_missing, np.random.default_rng([seed, _MASK_STREAM, i]))
                     for i in range(T)])


def _entropy(seed) -> int:
    if seed is None:
        return int(np.random.SeedSequence().entropy % 2**63)
    return int(seed)


@dataclass(frozen=True, eq=False)
class MeasurementSet:
    """Noisy squared-distance snapshots ``edms[i]`` at ``times[i]`` with masks and weights."""

    times: np.ndarray
    edms: np.ndarray = field(repr=False)
    masks: np.ndarray = field(repr=False)
    weights: np.ndarray | None = None

    def __post_init__(self):
        times = np.array(self.times, dtype=float).ravel()
        edms = np.array(self.edms, dtype=float)
        masks = np.array(self.masks, dtype=float)
        T = len(times)
        weights = np.ones(T) if self.weights is None else np.array(self.weights, dtype=float).ravel()
        if edms.ndim != 3 or edms.shape[0] != T or masks.shape != edms.shape or weights.shape != (T,):
            raise ValueError("times, edms, masks and weights must have matching lengths")
        if edms.shape[1] != edms.shape[2]:
            raise ValueError("distance matrices must be square")
        if not np.all((masks == 0) | (masks == 1)):
            raise ValueError("masks must be binary")
        if not np.array_equal(masks, np.swapaxes(masks, 1, 2)):
            raise ValueError("masks must be symmetric")
        if np.any(np.diagonal(masks, axis1=1, axis2=2)):
            raise ValueError("masks must have zero diagonal")
        if np.any(weights < 0):
            raise ValueError("weights must be nonnegative")
        edms = edms * masks
        for a in (times, edms, masks, weights):
            a.flags.writeable = False
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "edms", edms)
        object.__setattr__(self, "masks", masks)
        object.__setattr__(self, "weights", weights)

    @property
    def T(self) -> int:
        return len(self.times)

    @property
    def N(self) -> int:
        return self.edms.shape[1]

    @property
    def window(self) -> tuple[float, float]:
        return float(self.times.min()), float(self.times.max())

    def mean_measured(self) -> float:
        """Mean measured squared distance (0 when nothing is measured)."""
        n = self.masks.sum()
        return float(self.edms.sum() / n) if n else 0.0

    def to_dict(self) -> dict:
        return {
            "times": self.times.tolist(),
            "edms": self.edms.tolist(),
            "masks": self.masks.astype(int).tolist(),
            "weights": self.weights.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> MeasurementSet:
        return cls(data["times"], data["edms"], data["masks"], data.get("weights"))

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_json(cls, text: str) -> MeasurementSet:
        return cls.from_dict(json.loads(text))

    def to_csv(self) -> str:
        """Measured pairs only, one row ``t, i, j, d2`` per pair with ``i < j``."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["t", "i", "j", "d2"])
        iu, ju = np.triu_indices(self.N, 1)
        for t, D, W in zip(self.times, self.edms, self.masks):
            for i, j in zip(iu, ju):
                if W[i, j]:
                    writer.writerow([repr(float(t)), int(i), int(j), repr(float(D[i, j]))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, N: int) -> MeasurementSet:
        lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
        rows = list(csv.DictReader(lines))
        times = sorted({float(r["t"]) for r in rows})
        index = {t: k for k, t in enumerate(times)}
        edms = np.zeros((len(times), N, N))
        masks = np.zeros_like(edms)
        for r in rows:
            k, i, j = index[float(r["t"])], int(r["i"]), int(r["j"])
            edms[k, i, j] = edms[k, j, i] = float(r["d2"])
            masks[k, i, j] = masks[k, j, i] = 1.0
        return cls(times, edms, masks)


def pair_noise(seed: int, time_index: int, N: int) -> np.ndarray:
    """Standard normal draws for the unordered pairs of one snapshot."""
    return np.random.default_rng([seed, time_index]).standard_normal(comb(N, 2))


def measure(params: TrajectoryParams, times: Sequence[float], masks, sigma: float = 0.0,
            seed=None, weights=None) -> MeasurementSet:
    """Noisy masked squared distances ``max(0, d_ij + n_ij)^2`` with ``n_ij ~ N(0, sigma^2)``."""
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    times = np.asarray(times, dtype=float).ravel()
    masks = np.asarray(masks, dtype=float)
    N = params.N
    if masks.shape != (len(times), N, N):
        raise ValueError(f"masks must have shape {(len(times), N, N)}, got {masks.shape}")
    seed = _entropy(seed)
    iu = np.triu_indices(N, 1)
    edms = np.zeros((len(times), N, N))
    for k, t in enumerate(times):
        dist = np.sqrt(np.maximum(squared_distances(params.evaluate(t))[iu], 0.0))
        if sigma > 0:
            dist = np.maximum(dist + sigma * pair_noise(seed, k, N), 0.0)
        edms[k][iu] = dist ** 2
        edms[k] += edms[k].T
    return MeasurementSet(times, edms * masks, masks, weights)


MaskFactory = Callable[[int, int, int], np.ndarray]
"""Hook signature ``(T, N, seed) -> masks`` for structured mask generators."""

