"""Localization of moving points from sparse, noisy distances via kinetic EDMs."""

from .alignment import AnchorObservations, localize, procrustes, spectral_factorize
from .exceptions import (
    AnchorError,
    DegenerateConfigurationWarning,
    KedmError,
    ModelMismatchError,
    SingularSystemError,
)
from .gramian import BasisGramians, basis_weights, kappa, kappa_inverse, rank_project
from .measurement import MeasurementSet, SamplingKind, SamplingScheme, measure, sample_times
from .metrics import edm_error, estimate_max_missing, sparsity_level, trajectory_mismatch
from .sdr import SdrConfig, SdrResult, SolverError, kedm_at, solve_sdr
from .trajectory import TrajectoryModel, TrajectoryParams, random_params

__version__ = "0.1.0"

__all__ = [
    "AnchorError", "AnchorObservations", "BasisGramians", "DegenerateConfigurationWarning",
    "KedmError", "MeasurementSet", "ModelMismatchError", "SamplingKind", "SamplingScheme",
    "SdrConfig", "SdrResult", "SingularSystemError", "SolverError", "TrajectoryModel",
    "TrajectoryParams", "basis_weights", "edm_error", "estimate_max_missing", "kappa",
    "kappa_inverse", "kedm_at", "localize", "measure", "procrustes", "random_params",
    "rank_project", "sample_times", "solve_sdr", "sparsity_level", "spectral_factorize",
    "trajectory_mismatch",
]
