"""EDM/Gram algebra and basis Gramians of time-varying point sets."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.linalg

from .exceptions import ModelMismatchError, SingularSystemError
from .trajectory import TrajectoryModel, TrajectoryParams

EIG_CLAMP_RTOL = 1e-9


def centering_matrix(N: int) -> np.ndarray:
    return np.eye(N) - np.full((N, N), 1.0 / N)


def kappa(G) -> np.ndarray:
    """Squared-distance matrix ``diag(G) 1^T - 2G + 1 diag(G)^T`` of a Gram matrix.

    Works on a single ``(N, N)`` matrix or on a stack ``(..., N, N)``.
    """
    G = np.asarray(G, dtype=float)
    g = np.diagonal(G, axis1=-2, axis2=-1)
    return g[..., :, None] - 2.0 * G + g[..., None, :]


def kappa_inverse(D) -> np.ndarray:
    """Centered Gram matrix ``-1/2 J D J`` of a (squared) distance matrix."""
    D = np.asarray(D, dtype=float)
    # -1/2 J D J without forming J: double centering.
    Dc = D - D.mean(axis=-1, keepdims=True)
    Dc = Dc - Dc.mean(axis=-2, keepdims=True)
    G = -0.5 * Dc
    return 0.5 * (G + np.swapaxes(G, -1, -2))


def squared_distances(X) -> np.ndarray:
    """EDM of the columns of ``X`` (shape ``(..., d, N)``)."""
    X = np.asarray(X, dtype=float)
    return kappa(np.swapaxes(X, -1, -2) @ X)


def default_nodes(model: TrajectoryModel, window: tuple[float, float]) -> np.ndarray:
    """Basis-Gramian node times for a measurement window.

    Polynomial: Chebyshev points of the first kind mapped into the window.
    Bandlimited: equispaced over the window, or over one period if the window
    is longer, so nodes stay distinct modulo the period.
    """
    K = model.gram_degree
    T1, T2 = float(window[0]), float(window[1])
    k = np.arange(K + 1)
    if model.is_polynomial:
        half = 0.5 * (T2 - T1) if T2 > T1 else 1.0
        return 0.5 * (T1 + T2) + half * np.cos((2 * k + 1) * np.pi / (2 * (K + 1)))[::-1]
    span = min(T2 - T1, model.period) if T2 > T1 else model.period
    return T1 + span * (k + 0.5) / (K + 1)


def _node_factors(model: TrajectoryModel, nodes: np.ndarray, t: np.ndarray):
    """Per-node factors whose products give the Lagrange cardinal functions.

    Polynomial: ``(t - tau_k)`` on affinely rescaled times. Bandlimited (odd
    node count ``4P + 1``): ``sin(omega (t - tau_k) / 2)``; a product of ``4P``
    such half-angle sines is a trigonometric polynomial of degree ``2P``.
    """
    if model.is_polynomial:
        half = 0.5 * (nodes.max() - nodes.min()) or 1.0
        return (t[..., None] - nodes) / half
    return np.sin(0.5 * model.omega * (t[..., None] - nodes))


@lru_cache(maxsize=256)
def _denominators(model: TrajectoryModel, nodes: tuple[float, ...]) -> np.ndarray:
    nodes = np.asarray(nodes)
    K = model.gram_degree
    if len(nodes) != K + 1:
        raise ValueError(f"need {K + 1} basis nodes for K = {K}, got {len(nodes)}")
    F = _node_factors(model, nodes, nodes)
    np.fill_diagonal(F, 1.0)
    if np.abs(F).min() < 1e-12:
        what = "modulo the period" if not model.is_polynomial else ""
        raise SingularSystemError(f"basis nodes must be distinct {what}".strip())
    return F.prod(axis=1)


def basis_weights(model: TrajectoryModel, nodes, t) -> np.ndarray:
    """Interpolation weights ``w(t)`` with ``G(t) = sum_k w_k(t) G(tau_k)``.

    ``w`` solves the (trigonometric) Vandermonde system ``M w = zbar(t)``; it
    is evaluated through the equivalent cardinal-function products, which stay
    accurate when that system is badly conditioned. Shape ``(K + 1,)`` for
    scalar ``t``, ``t.shape + (K + 1,)`` otherwise.
    """
    nodes = np.asarray(nodes, dtype=float).ravel()
    denom = _denominators(model, tuple(nodes))
    t = np.asarray(t, dtype=float)
    F = _node_factors(model, nodes, t)
    w = np.empty(F.shape)
    for j in range(len(nodes)):
        w[..., j] = np.prod(np.delete(F, j, axis=-1), axis=-1) / denom[j]
    return w


def basis_weights_vandermonde(model: TrajectoryModel, nodes, t) -> np.ndarray:
    """Same weights by an LU solve of the moment system; a cross-check for :func:`basis_weights`."""
    nodes = np.asarray(nodes, dtype=float).ravel()
    _denominators(model, tuple(nodes))
    if model.is_polynomial:
        center = 0.5 * (nodes.max() + nodes.min())
        half = 0.5 * (nodes.max() - nodes.min()) or 1.0
    else:
        center, half = 0.0, 1.0
    M = model.gram_basis((nodes - center) / half).T  # rows: moment functions, cols: nodes
    t = np.asarray(t, dtype=float)
    z = model.gram_basis((t - center) / half)
    w = scipy.linalg.lu_solve(scipy.linalg.lu_factor(M), z.reshape(-1, z.shape[-1]).T)
    return w.T.reshape(z.shape)


@dataclass(frozen=True, eq=False)
class BasisGramians:
    """Gramians ``G_k = G(tau_k)`` at ``K + 1`` node times; ``mats`` is ``(K+1, N, N)``."""

    model: TrajectoryModel
    nodes: np.ndarray
    mats: np.ndarray = field(repr=False)
    d: int

    def __post_init__(self):
        nodes = np.array(self.nodes, dtype=float).ravel()
        mats = np.array(self.mats, dtype=float)
        K = self.model.gram_degree
        if len(nodes) != K + 1 or mats.ndim != 3 or mats.shape[0] != K + 1:
            raise ValueError(f"expected {K + 1} nodes and matrices, got {len(nodes)}, {mats.shape}")
        if mats.shape[1] != mats.shape[2]:
            raise ValueError("basis Gramians must be square")
        nodes.flags.writeable = False
        mats.flags.writeable = False
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "mats", mats)
        object.__setattr__(self, "d", int(self.d))

    @property
    def N(self) -> int:
        return self.mats.shape[1]

    @classmethod
    def from_trajectory(cls, params: TrajectoryParams, nodes=None, window=(-1.0, 1.0)) -> BasisGramians:
        """``G_k = J X(tau_k)^T X(tau_k) J``; the centered Gramian of a known trajectory."""
        nodes = default_nodes(params.model, window) if nodes is None else np.asarray(nodes, float)
        X = params.evaluate(nodes)
        X = X - X.mean(axis=-1, keepdims=True)
        return cls(params.model, nodes, np.swapaxes(X, -1, -2) @ X, params.d)

    def weights(self, t) -> np.ndarray:
        return basis_weights(self.model, self.nodes, t)

    def rank_projected(self) -> BasisGramians:
        return BasisGramians(self.model, self.nodes, rank_project(self.mats, self.d), self.d)

    def to_dict(self) -> dict:
        return {
            "model": self.model.to_dict(),
            "nodes": self.nodes.tolist(),
            "mats": self.mats.tolist(),
            "d": self.d,
        }

    @classmethod
    def from_dict(cls, data: dict) -> BasisGramians:
        return cls(TrajectoryModel.from_dict(data["model"]), data["nodes"], data["mats"], data["d"])

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_json(cls, text: str) -> BasisGramians:
        return cls.from_dict(json.loads(text))


def gramian_at(basis: BasisGramians, t) -> np.ndarray:
    """``G(t) = sum_k w_k(t) G_k``; shape ``(N, N)`` or ``t.shape + (N, N)``."""
    return np.tensordot(basis.weights(t), basis.mats, axes=(-1, 0))


def rank_project(G, d: int) -> np.ndarray:
    """Nearest PSD matrix of rank at most ``d``: keep the ``d`` largest eigenvalues, clamped at 0.

    Accepts a stack of matrices.
    """
    G = np.asarray(G, dtype=float)
    G = 0.5 * (G + np.swapaxes(G, -1, -2))
    lam, U = np.linalg.eigh(G)
    lam = lam.copy()
    N = G.shape[-1]
    if d < N:
        lam[..., : N - d] = 0.0
    top = lam.max(axis=-1, keepdims=True)
    lam[lam < EIG_CLAMP_RTOL * np.maximum(top, 0.0)] = 0.0
    out = (U * lam[..., None, :]) @ np.swapaxes(U, -1, -2)
    return 0.5 * (out + np.swapaxes(out, -1, -2))


def embed(G, d: int) -> np.ndarray:
    """Point coordinates ``(d, N)`` whose Gram matrix is ``rank_project(G, d)``."""
    G = np.asarray(G, dtype=float)
    lam, U = np.linalg.eigh(0.5 * (G + G.T))
    order = np.argsort(lam)[::-1][:d]
    lam = lam[order]
    lam = np.where(lam < EIG_CLAMP_RTOL * max(lam.max(initial=0.0), 0.0), 0.0, lam)
    X = np.sqrt(lam)[:, None] * U[:, order].T
    if X.shape[0] < d:
        X = np.vstack([X, np.zeros((d - X.shape[0], X.shape[1]))])
    return X


def check_compatible(a: TrajectoryModel, b: TrajectoryModel) -> None:
    if a != b:
        raise ModelMismatchError(f"model mismatch: {a} vs {b}")
