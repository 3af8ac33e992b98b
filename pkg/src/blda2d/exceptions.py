"""Exception types for numerical failure modes.

Input misuse (bad shapes, empty data, out-of-range parameters) raises plain
ValueError. The classes below mark numerical conditions a caller may want to
catch and react to, for example by refitting with a larger ridge.
"""

import numpy as np


class ConvergenceError(np.linalg.LinAlgError):
    """Eigensolver sweep cap reached before the off-diagonal target."""


class FactorizationError(np.linalg.LinAlgError):
    """Cholesky factorization failed; the regularization is too small."""


class RankDeficientError(np.linalg.LinAlgError):
    """Fewer nonzero eigenvalues available than requested components."""


class SingularCovarianceError(np.linalg.LinAlgError):
    """Projected covariance is numerically singular."""


class DegenerateDataError(np.linalg.LinAlgError):
    """No sampled direction produced an invertible projected covariance."""
