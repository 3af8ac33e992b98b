"""Matrix-variate Bhattacharyya-bound discriminant analysis.

Estimators (:class:`TwoDBLDA`, :class:`TwoDLDA`, :class:`TwoDPCA`,
:class:`L2BLDA`) follow the scikit-learn fit/transform protocol over
stacks of matrix samples. Supporting modules cover the symmetric
eigensolvers, class statistics and scatter matrices, a numerical verifier
of the Bhattacharyya error bound, nearest-neighbor and reconstruction
metrics, seeded image corruption, dataset I/O and a command line
interface.
"""

from .bound import (
    BoundReport,
    DirectionCheck,
    ProjectedGaussianModel,
    bhattacharyya_error,
    bound_report,
    chord_coefficient,
    direction_sweep,
    projected_model,
    verify_bound,
)
from .corruption import (
    RNG_ALGORITHM,
    CorruptionSpec,
    block_occlusion,
    corrupt_dataset,
    gaussian_patch,
    inject_dummies,
    patch_shape,
)
from .dataio import (
    MatrixDataset,
    canonicalize_labels,
    load_dataset,
    read_matrix_csv,
    read_pgm,
    save_dataset,
    split_dataset,
    split_indices,
    write_matrix_csv,
    write_pgm,
)
from .estimators import (
    L2BLDA,
    METHODS,
    TwoDBLDA,
    TwoDLDA,
    TwoDPCA,
    load_projector,
    make_estimator,
    save_projector,
)
from .evaluation import (
    ExperimentReport,
    accuracy,
    average_reconstruction_error,
    metric_curve,
    nearest_neighbor_label,
    report_csv,
)
from .exceptions import (
    ConvergenceError,
    DegenerateDataError,
    FactorizationError,
    RankDeficientError,
    SingularCovarianceError,
)
from .linalg import EigenPairs, frobenius_norm, gen_sym_eig, sym_eig
from .scatter import (
    ClassStatistics,
    ScatterMatrices,
    adaptive_weight,
    class_statistics,
    scatter_matrices,
    total_scatter,
)

__all__ = [
    "BoundReport",
    "ClassStatistics",
    "ConvergenceError",
    "CorruptionSpec",
    "DegenerateDataError",
    "DirectionCheck",
    "EigenPairs",
    "ExperimentReport",
    "FactorizationError",
    "L2BLDA",
    "METHODS",
    "MatrixDataset",
    "ProjectedGaussianModel",
    "RNG_ALGORITHM",
    "RankDeficientError",
    "ScatterMatrices",
    "SingularCovarianceError",
    "TwoDBLDA",
    "TwoDLDA",
    "TwoDPCA",
    "accuracy",
    "adaptive_weight",
    "average_reconstruction_error",
    "bhattacharyya_error",
    "block_occlusion",
    "bound_report",
    "canonicalize_labels",
    "chord_coefficient",
    "class_statistics",
    "corrupt_dataset",
    "direction_sweep",
    "frobenius_norm",
    "gaussian_patch",
    "gen_sym_eig",
    "inject_dummies",
    "load_dataset",
    "load_projector",
    "make_estimator",
    "metric_curve",
    "nearest_neighbor_label",
    "patch_shape",
    "projected_model",
    "read_matrix_csv",
    "read_pgm",
    "report_csv",
    "save_dataset",
    "save_projector",
    "scatter_matrices",
    "split_dataset",
    "split_indices",
    "sym_eig",
    "total_scatter",
    "verify_bound",
    "write_matrix_csv",
    "write_pgm",
]
