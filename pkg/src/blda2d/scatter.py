"""Per-class statistics and scatter matrices for matrix-variate samples.

Scatter matrices act on the row space: each d1 x d2 sample contributes
outer products of shape d1 x d1. The ``criterion`` matrix pairs a negative
prior-weighted between-class term with a within-class term scaled by a
constant computed from the data itself, so the resulting projection has no
tuning parameter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .validation import as_matrix_stack, check_labels


@dataclass(frozen=True)
class ClassStatistics:
    """Per-class counts, priors and means plus the overall mean.

    ``classes`` holds the sorted distinct labels; arrays are indexed in
    that order. ``class_means`` has shape (c, d1, d2).
    """

    classes: np.ndarray
    counts: np.ndarray
    priors: np.ndarray
    class_means: np.ndarray
    overall_mean: np.ndarray

    @property
    def n_classes(self) -> int:
        return int(self.classes.size)

    @property
    def n_samples(self) -> int:
        return int(self.counts.sum())


@dataclass(frozen=True)
class ScatterMatrices:
    """Row-space scatter matrices of a labeled stack, all d1 x d1.

    ``between_class`` and ``within_class`` carry the usual 1/N factor.
    ``criterion`` combines the prior-weighted pairwise between-class term
    (negated, 1/N factor) with the unnormalized within-class sum scaled by
    the adaptive weight; its algebraically smallest nonzero eigenvalues
    drive the Bhattacharyya-bound projection. The normalized and
    unnormalized within sums are distinct quantities, hence both appear.
    """

    between_class: np.ndarray
    within_class: np.ndarray
    criterion: np.ndarray


def _freeze(*arrays):
    for arr in arrays:
        arr.setflags(write=False)


def class_statistics(X, y) -> ClassStatistics:
    """Counts, priors, class means and the overall mean of a labeled stack."""
    X = as_matrix_stack(X)
    y = check_labels(y, X.shape[0])
    classes, counts = np.unique(y, return_counts=True)
    priors = counts / y.shape[0]
    class_means = np.stack([X[y == cls].mean(axis=0) for cls in classes])
    overall_mean = X.mean(axis=0)
    _freeze(classes, counts, priors, class_means, overall_mean)
    return ClassStatistics(
        classes=classes,
        counts=counts,
        priors=priors,
        class_means=class_means,
        overall_mean=overall_mean,
    )


def adaptive_weight(stats: ClassStatistics) -> float:
    """Data-determined constant trading class separation against spread.

    One quarter of the prior-weighted sum, over unordered class pairs, of
    squared Frobenius distances between class means. Zero when there is a
    single class or all class means coincide.
    """
    c = stats.n_classes
    acc = 0.0
    for i in range(c):
        for j in range(i + 1, c):
            diff = stats.class_means[i] - stats.class_means[j]
            acc += math.sqrt(stats.priors[i] * stats.priors[j]) * float(
                np.sum(diff * diff)
            )
    return 0.25 * acc


def scatter_matrices(X, y, stats: ClassStatistics | None = None) -> ScatterMatrices:
    """Between-class, within-class and criterion scatter matrices.

    All three are symmetrized with ``(M + M.T) / 2`` to absorb round-off.
    A single-class input is legal here and yields a zero criterion; the
    estimators reject it downstream.
    """
    X = as_matrix_stack(X)
    y = check_labels(y, X.shape[0])
    if stats is None:
        stats = class_statistics(X, y)
    n = X.shape[0]
    d1 = X.shape[1]
    c = stats.n_classes

    between = np.zeros((d1, d1))
    for k in range(c):
        diff = stats.class_means[k] - stats.overall_mean
        between += stats.counts[k] * (diff @ diff.T)
    between /= n

    pair_between = np.zeros((d1, d1))
    for i in range(c):
        for j in range(i + 1, c):
            diff = stats.class_means[i] - stats.class_means[j]
            pair_between += math.sqrt(stats.counts[i] * stats.counts[j]) * (
                diff @ diff.T
            )
    pair_between /= n

    within_sum = np.zeros((d1, d1))
    for k in range(c):
        mean = stats.class_means[k]
        for idx in np.flatnonzero(y == stats.classes[k]):
            dev = X[idx] - mean
            within_sum += dev @ dev.T

    weight = adaptive_weight(stats)
    within = within_sum / n
    criterion = weight * within_sum - pair_between

    between = (between + between.T) / 2.0
    within = (within + within.T) / 2.0
    criterion = (criterion + criterion.T) / 2.0
    _freeze(between, within, criterion)
    return ScatterMatrices(
        between_class=between, within_class=within, criterion=criterion
    )


def total_scatter(X) -> np.ndarray:
    """Total row-space scatter ``(1/N) sum (X_l - mean)(X_l - mean)^T``."""
    X = as_matrix_stack(X)
    d1 = X.shape[1]
    mean = X.mean(axis=0)
    acc = np.zeros((d1, d1))
    for sample in X:
        dev = sample - mean
        acc += dev @ dev.T
    acc /= X.shape[0]
    acc = (acc + acc.T) / 2.0
    acc.setflags(write=False)
    return acc
