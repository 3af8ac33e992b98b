"""Recognition and reconstruction measurement over fitted projections.

Recognition uses a 1-nearest-neighbor rule under Frobenius distance, the
norm every projection here is built on. Reconstruction quality is the mean
Frobenius residual of mapping samples through the fitted subspace and
back. ``metric_curve`` sweeps the reduced dimension and reports one value
per dimension; curves are emitted as CSV with the fixed header
``method,r,metric,value,seed``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .estimators import METHODS, make_estimator

VALID_METRICS = ("accuracy", "are")


def nearest_neighbor_label(train, labels, query):
    """Label of the training sample nearest to the query.

    Distance is Frobenius (Euclidean for vectors); exact ties resolve to
    the lowest training index.
    """
    train = np.asarray(train, dtype=np.float64)
    if train.ndim < 2 or train.shape[0] < 1:
        raise ValueError("training set must be a non-empty stack of samples")
    labels = np.asarray(labels)
    if labels.shape != (train.shape[0],):
        raise ValueError(
            f"labels shape {labels.shape} does not match {train.shape[0]} samples"
        )
    query = np.asarray(query, dtype=np.float64)
    if query.shape != train.shape[1:]:
        raise ValueError(
            f"query shape {query.shape} does not match sample shape {train.shape[1:]}"
        )
    tail_axes = tuple(range(1, train.ndim))
    distances = np.sum((train - query) ** 2, axis=tail_axes)
    return labels[int(np.argmin(distances))]


def accuracy(predictions, truth) -> float:
    """Fraction of matching entries."""
    predictions = np.asarray(predictions)
    truth = np.asarray(truth)
    if predictions.shape != truth.shape:
        raise ValueError(
            f"length mismatch: {predictions.shape} versus {truth.shape}"
        )
    if predictions.size == 0:
        raise ValueError("cannot score an empty prediction list")
    return float(np.mean(predictions == truth))


def average_reconstruction_error(estimator, X) -> float:
    """Mean Frobenius residual of mapping samples through the subspace.

    Requires an orthonormal projection, so 2DLDA estimators are refused by
    their own reconstruct method.
    """
    X = np.asarray(X, dtype=np.float64)
    reconstructed = estimator.reconstruct(X)
    residual = X - reconstructed
    tail_axes = tuple(range(1, residual.ndim))
    per_sample = np.sqrt(np.sum(residual**2, axis=tail_axes))
    return float(np.mean(per_sample))


@dataclass(frozen=True)
class ExperimentReport:
    """Metric values of one method across reduced dimensions."""

    method: str
    metric: str
    rows: tuple
    seed: int = 0
    dataset_id: str = ""

    def __post_init__(self):
        if self.metric not in VALID_METRICS:
            raise ValueError(f"metric must be one of {VALID_METRICS}")
        previous = None
        for r, value in self.rows:
            if previous is not None and r <= previous:
                raise ValueError("reduced dimensions must be strictly increasing")
            previous = r
            if self.metric == "accuracy" and not 0.0 <= value <= 1.0:
                raise ValueError(f"accuracy {value!r} outside [0, 1]")
            if self.metric == "are" and value < 0.0:
                raise ValueError(f"reconstruction error {value!r} is negative")


def _as_method_input(images, method):
    if method == "l2blda":
        flat = np.asarray(images, dtype=np.float64)
        return flat.reshape(flat.shape[0], -1)
    return images


def metric_curve(
    train_images,
    train_labels,
    test_images,
    test_labels,
    method,
    r_values,
    metric,
    ridge=None,
    seed=0,
    dataset_id="",
) -> ExperimentReport:
    """Fit once per reduced dimension and score the chosen metric.

    Accuracy is 1-nearest-neighbor on the projected test set; the
    reconstruction error is evaluated on the training images themselves.
    Dimensions are deduplicated and swept in ascending order.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {sorted(METHODS)}")
    if metric not in VALID_METRICS:
        raise ValueError(f"metric must be one of {VALID_METRICS}")
    r_list = sorted({int(r) for r in r_values})
    train_in = _as_method_input(train_images, method)
    test_in = _as_method_input(test_images, method)
    train_labels = np.asarray(train_labels)
    test_labels = np.asarray(test_labels)

    rows = []
    for r in r_list:
        estimator = make_estimator(method, n_components=r, ridge=ridge)
        estimator.fit(train_in, train_labels)
        if metric == "accuracy":
            projected_train = estimator.transform(train_in)
            projected_test = estimator.transform(test_in)
            predictions = [
                nearest_neighbor_label(projected_train, train_labels, sample)
                for sample in projected_test
            ]
            value = accuracy(predictions, test_labels)
        else:
            value = average_reconstruction_error(estimator, train_in)
        rows.append((r, value))
    return ExperimentReport(
        method=method,
        metric=metric,
        rows=tuple(rows),
        seed=seed,
        dataset_id=dataset_id,
    )


def report_csv(reports) -> str:
    """Render reports as CSV with one row per (method, r).

    Rows are sorted canonically and floats printed as shortest round-trip
    decimals, so identical inputs produce byte-identical output.
    """
    entries = []
    for report in reports:
        for r, value in report.rows:
            entries.append((report.method, report.metric, r, report.seed, value))
    entries.sort(key=lambda e: (e[0], e[1], e[2], e[3]))
    lines = ["method,r,metric,value,seed"]
    for method, metric, r, seed, value in entries:
        lines.append(f"{method},{r},{metric},{repr(float(value))},{seed}")
    return "\n".join(lines) + "\n"
