"""Evaluation quantities: EDM error, trajectory mismatch, sparsity, success sweeps."""

from __future__ import annotations

import csv
import io
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from math import comb

import numpy as np

from .trajectory import TrajectoryParams

logger = logging.getLogger(__name__)

_trapezoid = getattr(np, "trapezoid", None) or np.trapz


def edm_error(true_edm, est_edm) -> float:
    """Relative Frobenius error ``||D - Dhat||_F / ||D||_F``."""
    true_edm = np.asarray(true_edm, dtype=float)
    est_edm = np.asarray(est_edm, dtype=float)
    if true_edm.shape != est_edm.shape:
        raise ValueError("EDMs must have the same shape")
    denom = np.linalg.norm(true_edm)
    if denom == 0:
        raise ZeroDivisionError("true EDM is zero")
    return float(np.linalg.norm(true_edm - est_edm) / denom)


def edm_error_series(true_edms, est_edms) -> np.ndarray:
    """:func:`edm_error` for stacks of EDMs, one value per leading index."""
    true_edms = np.asarray(true_edms, dtype=float)
    denom = np.linalg.norm(true_edms, axis=(-2, -1))
    if np.any(denom == 0):
        raise ZeroDivisionError("true EDM is zero at some time")
    return np.linalg.norm(true_edms - np.asarray(est_edms), axis=(-2, -1)) / denom


def trajectory_mismatch(true_params: TrajectoryParams, est_params: TrajectoryParams,
                        window: tuple[float, float], grid_points: int = 201) -> float:
    """Trapezoidal ``int_window ||X(t) - Xhat(t)||_F / ||X(t)||_F dt``.

    Not normalized by the window length.
    """
    if grid_points < 2:
        raise ValueError("grid_points must be at least 2")
    t = np.linspace(window[0], window[1], grid_points)
    X = true_params.evaluate(t)
    denom = np.linalg.norm(X, axis=(-2, -1))
    if np.any(denom == 0):
        raise ZeroDivisionError("true trajectory vanishes on the grid")
    ratio = np.linalg.norm(X - est_params.evaluate(t), axis=(-2, -1)) / denom
    return float(_trapezoid(ratio, t))


def sparsity_level(masks) -> float:
    """Average fraction of unmeasured pairs per time."""
    masks = np.asarray(masks)
    if masks.ndim == 2:
        masks = masks[None]
    if len(masks) == 0:
        raise ValueError("need at least one mask")
    N = masks.shape[-1]
    iu = np.triu_indices(N, 1)
    missing = (masks[:, iu[0], iu[1]] == 0).sum(axis=1)
    return float(missing.mean() / comb(N, 2))


@dataclass(frozen=True)
class SparsityEstimate:
    m_bar: int
    S_hat: float
    delta: float
    q: float
    trials: int
    N: int
    # m -> (successes, trials actually run)
    sweep: dict = field(default_factory=dict, repr=False)

    def to_row(self) -> dict:
        return {"m_bar": self.m_bar, "S_hat": self.S_hat, "delta": self.delta, "q": self.q,
                "M": self.trials}


def _trial_ok(args) -> bool:
    from .sdr import SolverError
    from .simulation import run_trial

    scenario, m, seed, trial, delta = args
    try:
        res = run_trial(scenario, m, seed, trial)
    except (np.linalg.LinAlgError, ZeroDivisionError, ValueError, SolverError) as exc:
        logger.debug("trial (m=%d, %d) failed: %s", m, trial, exc)
        return False
    return bool(np.isfinite(res.e_X) and res.e_X < delta)


def success_count(scenario, m: int, delta: float, q: float, M: int, seed: int = 0,
                  jobs: int = 1) -> tuple[int, int]:
    """Successful trials at ``m`` missing pairs; stops once ``p_hat >= q`` is decided."""
    need = int(np.ceil(q * M - 1e-12))
    ok = run = 0
    batch = max(1, jobs)
    pool = ProcessPoolExecutor(jobs) if jobs > 1 else None
    try:
        while run < M:
            k = min(batch, M - run)
            args = [(scenario, m, seed, run + i, delta) for i in range(k)]
            outcomes = list(pool.map(_trial_ok, args)) if pool else [_trial_ok(a) for a in args]
            ok += sum(outcomes)
            run += k
            if ok >= need or ok + (M - run) < need:
                break
    finally:
        if pool is not None:
            pool.shutdown()
    return ok, run


def estimate_max_missing(scenario, delta: float = 0.99, q: float = 0.9, M: int = 50,
                         seed: int = 0, m_start: int = 0, step: int = 1,
                         patience: int = 3, jobs: int = 1) -> SparsityEstimate:
    """Largest ``m`` with empirical success rate ``>= q`` over an upward sweep.

    A trial succeeds iff its trajectory mismatch is below ``delta``. The sweep
    over ``m = m_start, m_start + step, ...`` stops after ``patience``
    consecutive values that miss the target rate. With ``step > 1`` the gap
    between the last passing and the next failing value is then bisected,
    which assumes the success rate is monotone in ``m`` near the threshold.
    Per-``m`` sampling stops as soon as the comparison ``M_1 / M >= q`` is
    decided.
    """
    if delta <= 0 or not 0 <= q < 1 or M < 1:
        raise ValueError("need delta > 0, 0 <= q < 1, M >= 1")
    if step < 1 or patience < 1:
        raise ValueError("need step >= 1 and patience >= 1")
    n_pairs = comb(scenario.N, 2)
    need = int(np.ceil(q * M - 1e-12))
    sweep = {}

    def passes(m: int) -> bool:
        ok, run = success_count(scenario, m, delta, q, M, seed, jobs)
        sweep[m] = (ok, run)
        logger.info("m=%d: %d/%d successes", m, ok, run)
        return ok >= need

    best, misses, first_miss = None, 0, None
    for m in range(m_start, n_pairs + 1, step):
        if passes(m):
            best, misses, first_miss = m, 0, None
        else:
            first_miss = m if first_miss is None else first_miss
            misses += 1
            if misses >= patience:
                break
    if best is not None and first_miss is not None:
        lo, hi = best, first_miss
        while hi - lo > 1:
            mid = (lo + hi) // 2
            lo, hi = (mid, hi) if passes(mid) else (lo, mid)
        best = lo
    best = 0 if best is None else best
    return SparsityEstimate(best, best / n_pairs, delta, q, M, scenario.N, sweep)


def sparsity_csv(rows: list[dict], header_comment: str | None = None) -> str:
    buf = io.StringIO()
    if header_comment:
        buf.write(f"# {header_comment}\n")
    writer = csv.DictWriter(buf, ["P", "N", "T", "delta", "q", "M", "m_bar", "S_hat"],
                            lineterminator="\n", extrasaction="ignore")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()
