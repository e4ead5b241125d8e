"""Polynomial and bandlimited trajectory ensembles.

A trajectory of ``N`` points in ``R^d`` is stored as a stack of ``L``
coefficient matrices of shape ``(d, N)``, multiplied by the scalar basis
functions of the model:

* polynomial of degree ``P``: ``1, t, ..., t^P`` (``L = P + 1``);
* bandlimited of degree ``P``: ``1, sin(wt), cos(wt), ..., sin(Pwt), cos(Pwt)``
  (``L = 2P + 1``), i.e. coefficients ``[B_0, A_1, B_1, ..., A_P, B_P]`` where
  ``A_p`` multiplies the sine and ``B_p`` the cosine.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .exceptions import ModelMismatchError, SingularSystemError


class ModelKind(str, enum.Enum):
    POLYNOMIAL = "polynomial"
    BANDLIMITED = "bandlimited"


@dataclass(frozen=True)
class TrajectoryModel:
    """Trajectory class: kind, degree ``P`` and (bandlimited only) ``omega``."""

    kind: ModelKind
    degree: int
    omega: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", ModelKind(self.kind))
        if int(self.degree) != self.degree or self.degree < 0:
            raise ValueError(f"degree must be a non-negative integer, got {self.degree}")
        object.__setattr__(self, "degree", int(self.degree))
        if self.kind is ModelKind.BANDLIMITED:
            if self.omega is None or not np.isfinite(self.omega) or self.omega <= 0:
                raise ValueError("bandlimited model requires omega > 0")
            object.__setattr__(self, "omega", float(self.omega))
        elif self.omega is not None:
            raise ValueError("omega is only meaningful for the bandlimited model")

    @classmethod
    def polynomial(cls, degree: int) -> TrajectoryModel:
        return cls(ModelKind.POLYNOMIAL, degree)

    @classmethod
    def bandlimited(cls, degree: int, omega: float) -> TrajectoryModel:
        return cls(ModelKind.BANDLIMITED, degree, omega)

    @property
    def is_polynomial(self) -> bool:
        return self.kind is ModelKind.POLYNOMIAL

    @property
    def basis_size(self) -> int:
        """Number of coefficient matrices ``L``."""
        return self.degree + 1 if self.is_polynomial else 2 * self.degree + 1

    @property
    def gram_degree(self) -> int:
        """``K``; the Gramian lives in a space spanned by ``K + 1`` functions."""
        return 2 * self.degree if self.is_polynomial else 4 * self.degree

    @property
    def period(self) -> float | None:
        return None if self.is_polynomial else 2 * np.pi / self.omega

    def basis(self, t) -> np.ndarray:
        """Evaluate the ``L`` basis functions; shape ``t.shape + (L,)``."""
        return _basis(self.kind, self.degree, self.omega, t)

    def gram_basis(self, t) -> np.ndarray:
        """Evaluate the ``K + 1`` basis functions of the Gramian's entries.

        Products of two degree-``P`` basis functions span the same family at
        degree ``2P``, for both models.
        """
        return _basis(self.kind, 2 * self.degree, self.omega, t)

    def to_dict(self) -> dict:
        out = {"kind": self.kind.value, "P": self.degree}
        if self.omega is not None:
            out["omega"] = self.omega
        return out

    @classmethod
    def from_dict(cls, data: dict) -> TrajectoryModel:
        return cls(ModelKind(data["kind"]), int(data["P"]), data.get("omega"))


def _basis(kind: ModelKind, degree: int, omega: float | None, t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if kind is ModelKind.POLYNOMIAL:
        return t[..., None] ** np.arange(degree + 1)
    p = np.arange(1, degree + 1)
    phase = omega * t[..., None] * p
    out = np.empty(t.shape + (2 * degree + 1,))
    out[..., 0] = 1.0
    out[..., 1::2] = np.sin(phase)
    out[..., 2::2] = np.cos(phase)
    return out


@dataclass(frozen=True, eq=False)
class TrajectoryParams:
    """Coefficients of one trajectory ensemble; ``coeffs`` has shape ``(L, d, N)``."""

    model: TrajectoryModel
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        coeffs = np.array(self.coeffs, dtype=float)
        if coeffs.ndim != 3:
            raise ValueError(f"coeffs must have shape (L, d, N), got {coeffs.shape}")
        if coeffs.shape[0] != self.model.basis_size:
            raise ValueError(
                f"{self.model.kind.value} model of degree {self.model.degree} needs "
                f"{self.model.basis_size} coefficient matrices, got {coeffs.shape[0]}"
            )
        coeffs.flags.writeable = False
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def d(self) -> int:
        return self.coeffs.shape[1]

    @property
    def N(self) -> int:
        return self.coeffs.shape[2]

    def evaluate(self, t) -> np.ndarray:
        """Positions ``X(t)``: shape ``(d, N)`` for scalar ``t``, else ``t.shape + (d, N)``."""
        z = self.model.basis(t)
        return np.tensordot(z, self.coeffs, axes=(-1, 0))

    __call__ = evaluate

    def is_centered(self, atol: float = 1e-10) -> bool:
        scale = max(1.0, float(np.abs(self.coeffs).max(initial=0.0)))
        return bool(np.all(np.abs(self.coeffs.sum(axis=2)) <= atol * scale * self.N))

    def centered(self) -> TrajectoryParams:
        """Remove the (time-varying) centroid: every coefficient matrix times ``J_N``."""
        return TrajectoryParams(self.model, self.coeffs - self.coeffs.mean(axis=2, keepdims=True))

    def __add__(self, other: TrajectoryParams) -> TrajectoryParams:
        if not isinstance(other, TrajectoryParams):
            return NotImplemented
        if other.model != self.model:
            raise ModelMismatchError("cannot add trajectories of different models")
        return TrajectoryParams(self.model, self.coeffs + other.coeffs)

    def __mul__(self, alpha: float) -> TrajectoryParams:
        return TrajectoryParams(self.model, float(alpha) * self.coeffs)

    __rmul__ = __mul__

    def __sub__(self, other: TrajectoryParams) -> TrajectoryParams:
        return self + (-1.0) * other

    def to_dict(self) -> dict:
        out = self.model.to_dict()
        out.update(d=self.d, N=self.N, coeffs=self.coeffs.tolist())
        return out

    @classmethod
    def from_dict(cls, data: dict) -> TrajectoryParams:
        params = cls(TrajectoryModel.from_dict(data), np.asarray(data["coeffs"], dtype=float))
        if params.d != data.get("d", params.d) or params.N != data.get("N", params.N):
            raise ValueError("declared (d, N) do not match coefficient shapes")
        return params

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_json(cls, text: str) -> TrajectoryParams:
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True, eq=False)
class GaugeTransform:
    """Distance-preserving map ``X(t) -> U X(t) + c(t) 1^T`` with constant orthogonal ``U``."""

    U: np.ndarray
    translation: TrajectoryParams

    def __post_init__(self):
        U = np.array(self.U, dtype=float)
        if U.ndim != 2 or U.shape[0] != U.shape[1]:
            raise ValueError("U must be square")
        if not np.allclose(U.T @ U, np.eye(len(U)), atol=1e-12, rtol=0):
            raise ValueError("U must be orthogonal")
        if self.translation.N != 1 or self.translation.d != len(U):
            raise ValueError("translation must be a single d-dimensional trajectory")
        U.flags.writeable = False
        object.__setattr__(self, "U", U)

    @classmethod
    def identity(cls, model: TrajectoryModel, d: int) -> GaugeTransform:
        return cls(np.eye(d), TrajectoryParams(model, np.zeros((model.basis_size, d, 1))))

    def compose(self, inner: GaugeTransform) -> GaugeTransform:
        """``self ∘ inner``: apply ``inner`` first."""
        if inner.translation.model != self.translation.model:
            raise ModelMismatchError("gauge transforms belong to different models")
        c = np.einsum("ij,ljk->lik", self.U, inner.translation.coeffs) + self.translation.coeffs
        return GaugeTransform(self.U @ inner.U, TrajectoryParams(self.translation.model, c))


def random_params(model: TrajectoryModel, d: int, N: int, seed=None,
                  centered: bool = False) -> TrajectoryParams:
    """Draw iid standard-normal coefficient matrices."""
    if d < 1 or N < 1:
        raise ValueError("d and N must be positive")
    rng = np.random.default_rng(seed)
    params = TrajectoryParams(model, rng.standard_normal((model.basis_size, d, N)))
    return params.centered() if centered else params


def random_orthogonal(d: int, seed=None) -> np.ndarray:
    """Haar-distributed orthogonal matrix (QR of a Gaussian matrix, sign-fixed)."""
    rng = np.random.default_rng(seed)
    Q, R = np.linalg.qr(rng.standard_normal((d, d)))
    return Q * np.sign(np.diag(R))


def apply_gauge(params: TrajectoryParams, g: GaugeTransform) -> TrajectoryParams:
    if g.translation.model != params.model:
        raise ModelMismatchError("gauge translation and trajectory use different models")
    if g.U.shape[0] != params.d:
        raise ValueError("gauge dimension does not match trajectory dimension")
    coeffs = np.einsum("ij,ljn->lin", g.U, params.coeffs) + g.translation.coeffs
    return TrajectoryParams(params.model, coeffs)


def design_matrix(model: TrajectoryModel, times) -> np.ndarray:
    return model.basis(np.asarray(times, dtype=float).ravel())


def fit_least_squares(model: TrajectoryModel, times: Sequence[float], targets,
                      return_residual: bool = False):
    """Least-squares trajectory through position snapshots ``targets[l] ≈ X(times[l])``.

    The problem separates over coordinates; it is solved with a single QR
    factorization of the ``(n_times, L)`` design matrix.

    Returns
    -------
    params : TrajectoryParams
    residual : float
        ``sqrt(sum_l ||X(times[l]) - targets[l]||_F^2)``, only if
        ``return_residual``.
    """
    times = np.asarray(times, dtype=float).ravel()
    targets = np.asarray(targets, dtype=float)
    if targets.ndim != 3 or targets.shape[0] != len(times):
        raise ValueError("targets must have shape (len(times), d, N)")
    L = model.basis_size
    if len(times) < L:
        raise SingularSystemError(f"need at least {L} sample times, got {len(times)}")
    _, d, N = targets.shape
    Z = design_matrix(model, times)
    Q, R = np.linalg.qr(Z)
    diag = np.abs(np.diag(R))
    if diag.min() <= 1e-12 * max(diag.max(), 1.0):
        raise SingularSystemError("design matrix is rank deficient (coincident sample times?)")
    Y = targets.reshape(len(times), d * N)
    C = np.linalg.solve(R, Q.T @ Y)
    params = TrajectoryParams(model, C.reshape(L, d, N))
    if return_residual:
        return params, float(np.linalg.norm(Z @ C - Y))
    return params
