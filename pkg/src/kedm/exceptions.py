"""Exception types raised by :mod:`kedm`."""

import numpy as np


class KedmError(Exception):
    """Base class for all kedm errors."""


class SingularSystemError(KedmError, np.linalg.LinAlgError):
    """A Vandermonde-type or design matrix is (numerically) rank deficient."""


class ModelMismatchError(KedmError, ValueError):
    """Two objects built for different trajectory models were combined."""


class AnchorError(KedmError, ValueError):
    """Anchor observations are insufficient to pin the gauge."""


class DegenerateConfigurationWarning(UserWarning):
    """Point configuration too degenerate for a unique rigid alignment."""
