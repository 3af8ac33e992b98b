"""Estimators for matrix-variate discriminant and component analysis.

All estimators follow the scikit-learn protocol: hyperparameters are set in
``__init__`` (so ``get_params`` / ``set_params`` / ``clone`` work), fitting
populates trailing-underscore attributes, and ``transform`` projects new
samples. Matrix-input estimators consume stacks of shape
(n_samples, d1, d2) and map each sample X to ``W.T @ X`` of shape
(n_components, d2); the vector-input ``L2BLDA`` consumes ordinary
(n_samples, n_features) arrays.

Fitted projections can be round-tripped through a small text format with a
``method,d1,d2,r`` header followed by the projection matrix in row-major
CSV, written as shortest round-trip decimals so the reload is bit-exact.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .exceptions import RankDeficientError
from .linalg import frobenius_norm, gen_sym_eig, sym_eig
from .scatter import adaptive_weight, class_statistics, scatter_matrices, total_scatter
from .validation import as_matrix_stack, as_vector_stack, check_labels

NONZERO_RTOL = 1e-10

_AUTO_RIDGE_SCALE = 1e-6
_SINGULARITY_RTOL = 1e-12


def _check_components(n_components, limit):
    if isinstance(n_components, bool) or not isinstance(
        n_components, (int, np.integer)
    ):
        raise ValueError(f"n_components must be an integer, got {n_components!r}")
    r = int(n_components)
    if r < 1 or r > limit:
        raise ValueError(f"n_components must be in [1, {limit}], got {r}")
    return r


def _select_components(values, vectors, n_components, largest):
    """Drop near-zero eigenvalues, then pick ``n_components`` of the rest.

    Near-zero means magnitude at most ``NONZERO_RTOL`` times the largest
    magnitude in the spectrum. Ties are broken by the solver's output
    order, which is deterministic.
    """
    cutoff = NONZERO_RTOL * float(np.max(np.abs(values)))
    keep = np.flatnonzero(np.abs(values) > cutoff)
    if keep.size < n_components:
        raise RankDeficientError(
            f"only {keep.size} nonzero eigenvalues available, "
            f"need {n_components}"
        )
    key = -values[keep] if largest else values[keep]
    order = keep[np.argsort(key, kind="stable")]
    picked = order[:n_components]
    selected_values = values[picked].copy()
    selected_vectors = vectors[:, picked].copy()
    selected_values.setflags(write=False)
    selected_vectors.setflags(write=False)
    return selected_values, selected_vectors


class _MatrixProjectionMixin:
    """Shared projection plumbing for matrix-input estimators."""

    def _require_fitted(self):
        if not hasattr(self, "components_"):
            raise NotFittedError(
                f"this {type(self).__name__} instance is not fitted yet"
            )

    def _coerce_samples(self, X):
        arr = np.asarray(X, dtype=np.float64)
        single = arr.ndim == 2
        if single:
            arr = arr[np.newaxis, ...]
        arr = as_matrix_stack(arr)
        if arr.shape[1:] != self.input_shape_:
            raise ValueError(
                f"samples of shape {arr.shape[1:]} do not match the fitted "
                f"input shape {self.input_shape_}"
            )
        return arr, single

    def transform(self, X):
        """Project samples; a (d1, d2) matrix maps to (n_components, d2)."""
        self._require_fitted()
        arr, single = self._coerce_samples(X)
        out = np.einsum("dr,ndc->nrc", self.components_, arr)
        return out[0] if single else out

    def reconstruct(self, X):
        """Map samples onto the fitted subspace and back (``W W.T X``).

        Only defined for orthonormal projections, so 2DLDA refuses.
        """
        self._require_fitted()
        if not self._orthonormal_components:
            raise ValueError(
                f"{type(self).__name__} components are not orthonormal; "
                "reconstruction is undefined"
            )
        arr, single = self._coerce_samples(X)
        w = self.components_
        projected = np.einsum("dr,ndc->nrc", w, arr)
        out = np.einsum("dr,nrc->ndc", w, projected)
        return out[0] if single else out


class TwoDBLDA(_MatrixProjectionMixin, TransformerMixin, BaseEstimator):
    """Supervised row projection minimizing a Bhattacharyya error bound.

    The fitted directions are eigenvectors of a criterion matrix that
    subtracts the prior-weighted pairwise separation of class means from
    the within-class spread scaled by a data-determined constant, taken at
    its algebraically smallest nonzero eigenvalues. Because the criterion
    is solved as a plain symmetric eigenproblem, no scatter matrix has to
    be inverted and small sample sizes are not a problem.

    Parameters
    ----------
    n_components : int
        Number of projection directions, between 1 and d1.

    Attributes
    ----------
    components_ : ndarray of shape (d1, n_components)
        Orthonormal projection columns, most negative eigenvalue first.
    eigenvalues_ : ndarray of shape (n_components,)
        Selected eigenvalues in ascending order.
    adaptive_weight_ : float
        The data-determined between/within trade-off constant.
    input_shape_ : tuple
        (d1, d2) of the training samples.
    classes_ : ndarray
        Sorted distinct training labels.
    """

    method_id = "2dblda"
    _orthonormal_components = True

    def __init__(self, n_components=1):
        self.n_components = n_components

    def fit(self, X, y):
        X = as_matrix_stack(X)
        y = check_labels(y, X.shape[0])
        stats = class_statistics(X, y)
        if stats.n_classes < 2:
            raise ValueError("at least two classes are required")
        r = _check_components(self.n_components, X.shape[1])
        scat = scatter_matrices(X, y, stats)
        pairs = sym_eig(scat.criterion)
        values, vectors = _select_components(pairs.values, pairs.vectors, r, largest=False)
        self.components_ = vectors
        self.eigenvalues_ = values
        self.adaptive_weight_ = adaptive_weight(stats)
        self.input_shape_ = X.shape[1:]
        self.classes_ = stats.classes
        return self


class TwoDLDA(_MatrixProjectionMixin, TransformerMixin, BaseEstimator):
    """Classic matrix-variate discriminant projection (trace-ratio form).

    Solves the generalized eigenproblem of the between-class scatter
    against the (possibly regularized) within-class scatter and keeps the
    eigenvectors of the largest nonzero eigenvalues. Columns are unit-norm
    but not mutually orthogonal, so reconstruction is unavailable.

    Parameters
    ----------
    n_components : int
        Number of projection directions, between 1 and d1.
    ridge : float or None
        Diagonal loading added to the within-class scatter. ``None``
        applies ``1e-6 * trace / d1`` automatically when the within-class
        scatter is numerically singular, else no loading.

    Attributes
    ----------
    components_ : ndarray of shape (d1, n_components)
        Unit-norm columns, largest eigenvalue first.
    eigenvalues_ : ndarray of shape (n_components,)
        Selected generalized eigenvalues in descending order.
    ridge_ : float
        The diagonal loading actually applied.
    """

    method_id = "2dlda"
    _orthonormal_components = False

    def __init__(self, n_components=1, ridge=None):
        self.n_components = n_components
        self.ridge = ridge

    def fit(self, X, y):
        X = as_matrix_stack(X)
        y = check_labels(y, X.shape[0])
        stats = class_statistics(X, y)
        if stats.n_classes < 2:
            raise ValueError("at least two classes are required")
        d1 = X.shape[1]
        r = _check_components(self.n_components, d1)
        scat = scatter_matrices(X, y, stats)
        within = scat.within_class
        if self.ridge is None:
            smallest = float(sym_eig(within).values[0])
            if smallest <= _SINGULARITY_RTOL * frobenius_norm(within):
                ridge = _AUTO_RIDGE_SCALE * float(np.trace(within)) / d1
            else:
                ridge = 0.0
        else:
            ridge = float(self.ridge)
            if ridge < 0.0:
                raise ValueError(f"ridge must be non-negative, got {ridge!r}")
        pairs = gen_sym_eig(scat.between_class, within, ridge=ridge)
        values, vectors = _select_components(pairs.values, pairs.vectors, r, largest=True)
        self.components_ = vectors
        self.eigenvalues_ = values
        self.ridge_ = ridge
        self.input_shape_ = X.shape[1:]
        self.classes_ = stats.classes
        return self


class TwoDPCA(_MatrixProjectionMixin, TransformerMixin, BaseEstimator):
    """Unsupervised row projection onto the top total-scatter eigenvectors.

    Uses the left-projection convention ``W.T @ X`` so it shares
    transform and reconstruct with the supervised methods here.

    Parameters
    ----------
    n_components : int
        Number of projection directions, between 1 and d1.
    """

    method_id = "2dpca"
    _orthonormal_components = True

    def __init__(self, n_components=1):
        self.n_components = n_components

    def fit(self, X, y=None):
        X = as_matrix_stack(X)
        if X.shape[0] < 2:
            raise ValueError("at least two samples are required")
        r = _check_components(self.n_components, X.shape[1])
        pairs = sym_eig(total_scatter(X))
        values, vectors = _select_components(pairs.values, pairs.vectors, r, largest=True)
        self.components_ = vectors
        self.eigenvalues_ = values
        self.input_shape_ = X.shape[1:]
        return self


class L2BLDA(TransformerMixin, BaseEstimator):
    """Vector-input variant of the Bhattacharyya-bound projection.

    Identical pipeline to :class:`TwoDBLDA` with each sample treated as a
    single-column matrix, so the criterion matrix is
    n_features x n_features and samples project to length-r vectors.
    """

    method_id = "l2blda"
    _orthonormal_components = True

    def __init__(self, n_components=1):
        self.n_components = n_components

    def fit(self, X, y):
        X = as_vector_stack(X)
        y = check_labels(y, X.shape[0])
        stack = X[:, :, np.newaxis]
        stats = class_statistics(stack, y)
        if stats.n_classes < 2:
            raise ValueError("at least two classes are required")
        r = _check_components(self.n_components, X.shape[1])
        scat = scatter_matrices(stack, y, stats)
        pairs = sym_eig(scat.criterion)
        values, vectors = _select_components(pairs.values, pairs.vectors, r, largest=False)
        self.components_ = vectors
        self.eigenvalues_ = values
        self.adaptive_weight_ = adaptive_weight(stats)
        self.input_shape_ = (X.shape[1],)
        self.classes_ = stats.classes
        return self

    def _require_fitted(self):
        if not hasattr(self, "components_"):
            raise NotFittedError(
                f"this {type(self).__name__} instance is not fitted yet"
            )

    def _coerce_samples(self, X):
        arr = np.asarray(X, dtype=np.float64)
        single = arr.ndim == 1
        if single:
            arr = arr[np.newaxis, :]
        arr = as_vector_stack(arr)
        if arr.shape[1] != self.input_shape_[0]:
            raise ValueError(
                f"samples with {arr.shape[1]} features do not match the "
                f"fitted input length {self.input_shape_[0]}"
            )
        return arr, single

    def transform(self, X):
        """Project samples; a length-n vector maps to length n_components."""
        self._require_fitted()
        arr, single = self._coerce_samples(X)
        out = arr @ self.components_
        return out[0] if single else out

    def reconstruct(self, X):
        """Map samples onto the fitted subspace and back (``W W.T x``)."""
        self._require_fitted()
        arr, single = self._coerce_samples(X)
        out = (arr @ self.components_) @ self.components_.T
        return out[0] if single else out


METHODS = {
    cls.method_id: cls for cls in (TwoDBLDA, TwoDLDA, TwoDPCA, L2BLDA)
}


def make_estimator(method, n_components, ridge=None):
    """Instantiate a registered estimator by its method identifier."""
    if method not in METHODS:
        raise ValueError(
            f"unknown method {method!r}; choose from {sorted(METHODS)}"
        )
    if method == "2dlda":
        return TwoDLDA(n_components=n_components, ridge=ridge)
    return METHODS[method](n_components=n_components)


def projector_text(estimator) -> str:
    """Serialize a fitted estimator's projection to the text format."""
    estimator._require_fitted()
    w = estimator.components_
    if len(estimator.input_shape_) == 1:
        d1, d2 = estimator.input_shape_[0], 1
    else:
        d1, d2 = estimator.input_shape_
    lines = [f"{estimator.method_id},{d1},{d2},{w.shape[1]}"]
    for row in w:
        lines.append(",".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def save_projector(estimator, path):
    """Write a fitted projection to ``path`` in the text format."""
    text = projector_text(estimator)
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(text)


def load_projector(path):
    """Reload a projection saved by :func:`save_projector`.

    The returned estimator supports transform and reconstruct; fit-time
    diagnostics such as eigenvalues are not part of the format.
    """
    with open(path, "r", encoding="utf-8") as handle:
        lines = [line.rstrip("\n") for line in handle]
    lines = [line for line in lines if line]
    if not lines:
        raise ValueError(f"projector file {path} is empty")
    header = lines[0].split(",")
    if len(header) != 4:
        raise ValueError(f"malformed projector header {lines[0]!r}")
    method, rest = header[0], header[1:]
    if method not in METHODS:
        raise ValueError(f"unknown projector method {method!r}")
    try:
        d1, d2, r = (int(v) for v in rest)
    except ValueError as exc:
        raise ValueError(f"malformed projector header {lines[0]!r}") from exc
    if method == "l2blda" and d2 != 1:
        raise ValueError("vector projectors must declare d2 = 1")
    if len(lines) - 1 != d1:
        raise ValueError(
            f"projector body has {len(lines) - 1} rows, header promises {d1}"
        )
    rows = []
    for line in lines[1:]:
        rows.append([float(v) for v in line.split(",")])
    w = np.asarray(rows, dtype=np.float64)
    if w.shape != (d1, r):
        raise ValueError(
            f"projector body has shape {w.shape}, header promises {(d1, r)}"
        )
    if not np.all(np.isfinite(w)):
        raise ValueError("projector contains non-finite entries")
    estimator = make_estimator(method, n_components=r)
    w.setflags(write=False)
    estimator.components_ = w
    estimator.input_shape_ = (d1,) if method == "l2blda" else (d1, d2)
    return estimator
