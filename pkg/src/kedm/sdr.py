"""Semidefinite relaxation for the basis Gramians of a kinetic EDM.

The program solved is::

    minimize    sum_i a_i ||W_i o (D_i - K(sum_k w_k(t_i) G_k))||_F^2 - lam sum_k tr(G_k)
    subject to  G_k >= 0,  G_k 1 = 0                     k = 0..K
                sum_k w_k(s) G_k >= 0                    s in psd_times

Centering is built into the parametrization ``G_k = V Y_k V^T`` where the
columns of ``V`` are an orthonormal basis of ``1^perp``; ``G_k >= 0`` is then
``Y_k >= 0``. The default backend is an ADMM splitting: a quadratic step
(a cached inverse, refreshed when the penalty changes) alternating with
per-constraint PSD projections by symmetric eigendecomposition.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import logging
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg

from .gramian import BasisGramians, basis_weights, default_nodes, gramian_at, kappa
from .measurement import MeasurementSet
from .trajectory import TrajectoryModel

logger = logging.getLogger(__name__)

LAMBDA_REL_DEFAULT = 1e-2


class SolverStatus(str, enum.Enum):
    CONVERGED = "converged"
    MAX_ITER = "max_iter"
    INFEASIBLE = "infeasible"


class SolverError(RuntimeError):
    """The conic solver failed (numerical breakdown or backend error)."""


@dataclass(frozen=True)
class SdrConfig:
    """Options for :func:`solve_sdr`.

    ``lam=None`` selects ``1e-2`` times the mean measured squared distance;
    ``psd_times=None`` selects ``3(K+1)`` equispaced times over the measurement
    window stretched 1.5x about its center; ``basis_nodes=None`` selects
    :func:`kedm.gramian.default_nodes` on the measurement window.
    """

    lam: float | None = None
    psd_times: tuple[float, ...] | None = None
    solver_tol: float = 1e-8
    max_iter: int = 50_000
    basis_nodes: tuple[float, ...] | None = None
    solver: str = "admm"
    rho: float | None = None
    record_trace: bool = False

    def __post_init__(self):
        if self.lam is not None and self.lam < 0:
            raise ValueError("lam must be nonnegative")
        if not self.solver_tol > 0:
            raise ValueError("solver_tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be positive")
        if self.solver not in SOLVERS:
            raise ValueError(f"unknown solver {self.solver!r}; choose from {sorted(SOLVERS)}")
        for name in ("psd_times", "basis_nodes"):
            value = getattr(self, name)
            if value is not None:
                object.__setattr__(self, name, tuple(float(v) for v in np.ravel(value)))

    def to_dict(self) -> dict:
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in self.__dict__.items()}

    @classmethod
    def from_dict(cls, data: dict) -> SdrConfig:
        return cls(**data)


@dataclass(frozen=True, eq=False)
class SdrResult:
    basis: BasisGramians
    objective: float
    residual_per_time: np.ndarray
    solver_status: SolverStatus
    iterations: int = 0
    lam: float = 0.0
    psd_times: np.ndarray = field(default_factory=lambda: np.empty(0))
    trace: list = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {
            "basis": self.basis.to_dict(),
            "objective": self.objective,
            "residual_per_time": np.asarray(self.residual_per_time).tolist(),
            "solver_status": self.solver_status.value,
            "iterations": self.iterations,
            "lam": self.lam,
            "psd_times": np.asarray(self.psd_times).tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> SdrResult:
        return cls(
            basis=BasisGramians.from_dict(data["basis"]),
            objective=float(data["objective"]),
            residual_per_time=np.asarray(data["residual_per_time"], dtype=float),
            solver_status=SolverStatus(data["solver_status"]),
            iterations=int(data.get("iterations", 0)),
            lam=float(data.get("lam", 0.0)),
            psd_times=np.asarray(data.get("psd_times", []), dtype=float),
        )

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_json(cls, text: str) -> SdrResult:
        return cls.from_dict(json.loads(text))

    def trace_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["iter", "objective", "infeasibility"])
        writer.writerows(self.trace)
        return buf.getvalue()


def default_psd_times(model: TrajectoryModel, window: tuple[float, float]) -> np.ndarray:
    K = model.gram_degree
    if K == 0:
        return np.empty(0)
    T1, T2 = window
    center, half = 0.5 * (T1 + T2), 0.75 * (T2 - T1)
    if half <= 0:
        half = 1.0
    return np.linspace(center - half, center + half, 3 * (K + 1))


def centered_basis(N: int) -> np.ndarray:
    """Orthonormal ``(N, N-1)`` basis of the complement of the all-ones vector."""
    return scipy.linalg.null_space(np.ones((1, N)))


class _Svec:
    """Isometric vectorization of symmetric ``n x n`` matrices."""

    def __init__(self, n: int):
        self.n = n
        self.iu = np.triu_indices(n)
        self.scale = np.where(self.iu[0] == self.iu[1], 1.0, np.sqrt(2.0))
        self.dim = len(self.scale)

    def vec(self, X: np.ndarray) -> np.ndarray:
        return X[..., self.iu[0], self.iu[1]] * self.scale

    def mat(self, v: np.ndarray) -> np.ndarray:
        out = np.zeros(v.shape[:-1] + (self.n, self.n))
        vals = v / self.scale
        out[..., self.iu[0], self.iu[1]] = vals
        out[..., self.iu[1], self.iu[0]] = vals
        return out


@dataclass
class _Problem:
    """Quadratic data term ``y^T H y - 2 q^T y + c0`` in reduced coordinates, scaled data."""

    model: TrajectoryModel
    nodes: np.ndarray
    psd_times: np.ndarray
    V: np.ndarray
    sv: _Svec
    A: np.ndarray
    H: np.ndarray
    q: np.ndarray
    c0: float
    tr: np.ndarray
    lam: float
    scale: float

    @property
    def n_basis(self) -> int:
        return len(self.nodes)

    def objective(self, y: np.ndarray) -> float:
        """Objective in original units for reduced, scaled variables ``y``."""
        val = y @ (self.H @ y) - 2 * self.q @ y + self.c0 - self.lam * self.tr @ y
        return float(val * self.scale ** 2)

    def gramians(self, y: np.ndarray) -> np.ndarray:
        Y = self.sv.mat(y.reshape(self.n_basis, self.sv.dim))
        return self.scale * (self.V @ Y @ self.V.T)


def _assemble(ms: MeasurementSet, model: TrajectoryModel, cfg: SdrConfig) -> _Problem:
    N = ms.N
    nodes = (np.asarray(cfg.basis_nodes) if cfg.basis_nodes is not None
             else default_nodes(model, ms.window))
    K1 = model.gram_degree + 1
    if len(nodes) != K1:
        raise ValueError(f"need {K1} basis nodes, got {len(nodes)}")
    psd_times = (np.asarray(cfg.psd_times, dtype=float) if cfg.psd_times is not None
                 else default_psd_times(model, ms.window))
    Wt = basis_weights(model, nodes, ms.times)  # (T, K+1)
    A = np.vstack([np.eye(K1), basis_weights(model, nodes, psd_times).reshape(-1, K1)])

    mean = ms.mean_measured()
    scale = mean if mean > 0 else 1.0
    lam = LAMBDA_REL_DEFAULT * mean if cfg.lam is None else cfg.lam

    V = centered_basis(N)
    sv = _Svec(N - 1)
    m = sv.dim
    H = np.zeros((K1 * m, K1 * m))
    q = np.zeros(K1 * m)
    c0 = 0.0
    iu = np.triu_indices(N, 1)
    for i in range(ms.T):
        sel = ms.masks[i][iu] > 0
        if not sel.any() or ms.weights[i] == 0:
            continue
        a, b = iu[0][sel], iu[1][sel]
        U = V[a] - V[b]  # rows: V^T (e_a - e_b)
        S = sv.vec(U[:, :, None] * U[:, None, :])  # (n_meas, m)
        dvals = ms.edms[i][a, b] / scale
        # off-diagonal pairs appear twice in the Frobenius norm
        ai = 2.0 * ms.weights[i]
        w = Wt[i]
        H += ai * np.kron(np.outer(w, w), S.T @ S)
        q += ai * np.kron(w, S.T @ dvals)
        c0 += ai * float(dvals @ dvals)
    tr = np.tile(sv.vec(np.eye(N - 1)), K1)
    return _Problem(model, np.asarray(nodes, float), psd_times, V, sv, A, H, q, c0, tr,
                    lam / scale, scale)


def _psd_project(sv: _Svec, v: np.ndarray) -> np.ndarray:
    lam, U = np.linalg.eigh(sv.mat(v))
    lam = np.maximum(lam, 0.0)
    return sv.vec((U * lam[..., None, :]) @ np.swapaxes(U, -1, -2))


# iterates are in units of the mean measured squared distance; growth far
# beyond that means the trace reward is unbounded along some direction
_DIVERGED = 1e10


def _solve_admm(prob: _Problem, cfg: SdrConfig):
    K1, m = prob.n_basis, prob.sv.dim
    p = K1 * m
    # Scaling a block row by a positive constant leaves its PSD constraint
    # unchanged; unit rows keep extrapolated weights from dominating.
    A = prob.A / np.linalg.norm(prob.A, axis=1, keepdims=True)
    AtA = A.T @ A
    C = len(A)
    eps = cfg.solver_tol
    alpha = 1.6  # over-relaxation

    diag_h = np.trace(prob.H) / p
    rho = cfg.rho if cfg.rho is not None else (2.0 * diag_h if diag_h > 0 else 1.0)
    eyem = np.eye(m)

    def factor(rho):
        # explicit inverse: one dense mat-vec per iteration beats two triangular solves
        chol = scipy.linalg.cho_factor(2.0 * prob.H + rho * np.kron(AtA, eyem), check_finite=False)
        return scipy.linalg.cho_solve(chol, np.eye(p), check_finite=False)

    inv = factor(rho)
    lin = 2.0 * prob.q + prob.lam * prob.tr
    y = np.zeros(p)
    z = np.zeros((C, m))
    u = np.zeros((C, m))
    status = SolverStatus.MAX_ITER
    trace = []
    obj_prev = np.inf
    it = 0
    for it in range(1, cfg.max_iter + 1):
        rhs = lin + rho * (A.T @ (z - u)).ravel()
        y = inv @ rhs
        Ay = A @ y.reshape(K1, m)
        Ay_hat = alpha * Ay + (1 - alpha) * z
        z_old = z
        z = _psd_project(prob.sv, Ay_hat + u)
        u = u + Ay_hat - z

        if it % 10 and it != cfg.max_iter:
            continue
        r = np.linalg.norm(Ay - z)
        s = rho * np.linalg.norm(A.T @ (z - z_old))
        if not (np.isfinite(r) and np.isfinite(s)) or np.abs(z).max() > _DIVERGED:
            status = SolverStatus.INFEASIBLE
            break
        obj = prob.objective(z[:K1].ravel())
        if cfg.record_trace:
            trace.append((it, obj, float(r)))
        scale_pri = max(np.linalg.norm(Ay), np.linalg.norm(z), 1e-300)
        scale_dual = max(rho * np.linalg.norm(A.T @ u), 1e-300)
        eps_pri = eps * (np.sqrt(C * m) + scale_pri)
        eps_dual = eps * (np.sqrt(p) + scale_dual)
        obj_change = abs(obj - obj_prev) / max(1.0, abs(obj), prob.c0 * prob.scale ** 2)
        obj_prev = obj
        if r <= eps_pri and s <= eps_dual and obj_change <= cfg.solver_tol:
            status = SolverStatus.CONVERGED
            break
        # adaptive penalty from normalized residuals
        if it % 50 == 0 and it <= 20_000:
            ratio = np.sqrt((r / scale_pri) / max(s / scale_dual, 1e-300))
            if 0.2 < ratio < 5.0:
                continue
            rho_new = rho * float(np.clip(ratio, 1e-3, 1e3))
            u *= rho / rho_new
            rho = rho_new
            inv = factor(rho)
    return z[:K1].ravel(), status, it, trace


def _solve_cvxpy(prob: _Problem, cfg: SdrConfig):
    import cvxpy as cp
    import scipy.sparse as sp

    K1, n, m = prob.n_basis, prob.sv.n, prob.sv.dim
    iu, ju = prob.sv.iu
    # column-major vec(Y) -> svec(Y)
    select = sp.csr_matrix((prob.sv.scale, (np.arange(m), ju * n + iu)), shape=(m, n * n))
    Ys = [cp.Variable((n, n), PSD=True) for _ in range(K1)]
    yvec = cp.hstack([select @ cp.vec(Y, order="F") for Y in Ys])
    Lh = _psd_factor(prob.H)
    obj = cp.sum_squares(Lh @ yvec) - 2 * prob.q @ yvec + prob.c0 - prob.lam * prob.tr @ yvec
    cons = [sum(a * Y for a, Y in zip(row, Ys)) >> 0 for row in prob.A[K1:]]
    problem = cp.Problem(cp.Minimize(obj), cons)
    tol = cfg.solver_tol
    try:
        problem.solve(solver=cp.CLARABEL, tol_gap_abs=tol, tol_gap_rel=tol, tol_feas=tol,
                      max_iter=min(cfg.max_iter, 500))
    except cp.error.SolverError as exc:
        raise SolverError(str(exc)) from exc
    if problem.status in ("infeasible", "unbounded", "infeasible_inaccurate", None):
        return np.zeros(K1 * m), SolverStatus.INFEASIBLE, 0, []
    status = SolverStatus.CONVERGED if problem.status == "optimal" else SolverStatus.MAX_ITER
    y = np.concatenate([prob.sv.vec(np.asarray(Y.value)) for Y in Ys])
    return y, status, int(problem.solver_stats.num_iters or 0), []


def _psd_factor(H: np.ndarray) -> np.ndarray:
    lam, U = np.linalg.eigh(0.5 * (H + H.T))
    keep = lam > 1e-12 * max(lam.max(initial=0.0), 1e-300)
    return (U[:, keep] * np.sqrt(lam[keep])).T


SOLVERS = {"admm": _solve_admm, "cvxpy": _solve_cvxpy}


def solve_sdr(ms: MeasurementSet, model: TrajectoryModel, d: int,
              cfg: SdrConfig | None = None) -> SdrResult:
    """Estimate rank-projected basis Gramians from distance snapshots."""
    cfg = cfg or SdrConfig()
    if ms.T < 1:
        raise ValueError("need at least one measurement time")
    if ms.N < d + 1:
        raise ValueError(f"need N >= d + 1 points, got N={ms.N}, d={d}")
    prob = _assemble(ms, model, cfg)
    y, status, iters, trace = SOLVERS[cfg.solver](prob, cfg)
    if status is SolverStatus.INFEASIBLE or not np.all(np.isfinite(y)):
        raise SolverError("solver diverged; with lam > 0 the relaxation is unbounded when some "
                          "point is never linked to the others by a measured distance")
    objective = prob.objective(y)
    raw = BasisGramians(model, prob.nodes, prob.gramians(y), d)
    basis = raw.rank_projected()
    G_t = gramian_at(basis, ms.times)
    resid = np.linalg.norm(ms.masks * (ms.edms - kappa(G_t)), axis=(1, 2))
    logger.debug("sdr: status=%s iters=%d objective=%.6g", status.value, iters, objective)
    return SdrResult(basis, objective, resid, status, iters, prob.lam * prob.scale,
                     prob.psd_times, [tuple(row) for row in trace])


def sdr_objective(ms: MeasurementSet, basis: BasisGramians, lam: float) -> float:
    """Objective of the relaxation evaluated at arbitrary basis Gramians."""
    G_t = gramian_at(basis, ms.times)
    data = np.sum(ms.weights * np.sum((ms.masks * (ms.edms - kappa(G_t))) ** 2, axis=(1, 2)))
    return float(data - lam * np.trace(basis.mats, axis1=1, axis2=2).sum())


def kedm_at(result: SdrResult, t) -> np.ndarray:
    """Estimated squared-distance matrix at time(s) ``t``, clamped at zero."""
    return np.maximum(kappa(gramian_at(result.basis, t)), 0.0)


def psd_violation(basis: BasisGramians, t) -> float:
    """Largest relative negative eigenvalue ``max(0, -min lambda / max lambda)`` of ``G(t)`` over ``t``.

    The positivity constraint is imposed only at ``psd_times`` and rank
    projection acts on each basis Gramian separately, so ``G(t)`` can dip
    slightly below zero in between; this reports by how much.
    """
    lam = np.linalg.eigvalsh(gramian_at(basis, np.atleast_1d(np.asarray(t, dtype=float))))
    top = lam.max()
    if top <= 0:
        return 0.0 if lam.min() >= 0 else float("inf")
    return float(max(0.0, -lam.min() / top))


def with_options(cfg: SdrConfig, **changes) -> SdrConfig:
    return replace(cfg, **changes)
