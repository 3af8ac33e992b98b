"""Bhattacharyya error of one projection direction and its upper bound.

For a unit direction w, each d1 x d2 sample projects to the row vector
``w.T @ X`` in R^{d2}. Modeling the projected classes as Gaussians with a
shared covariance, the pairwise Bhattacharyya coefficients have the closed
form ``exp(-z_ij)`` with ``z_ij = (1/8) (m_i - m_j) Cov^{-1} (m_i - m_j)^T``
over projected class means m_i. Replacing each ``exp(-z)`` by the chord
``1 - a z`` (valid on [0, b] for ``a = (1 - exp(-b)) / b`` because exp(-z)
is convex), bounding the whitened mean gaps through the covariance trace,
and collecting terms yields an upper bound that is affine in the projected
between-class and within-class sums. :func:`verify_bound` samples random
unit directions and checks both the final bound and the two intermediate
per-pair inequalities numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DegenerateDataError, SingularCovarianceError
from .linalg import sym_eig
from .scatter import ClassStatistics, adaptive_weight, class_statistics
from .validation import as_matrix_stack, check_labels, unit_direction

_INVERTIBILITY_RTOL = 1e-12
DEFAULT_SLACK = 1e-9


@dataclass(frozen=True)
class ProjectedGaussianModel:
    """Shared-covariance Gaussian summary of data projected on a direction.

    ``covariance`` is the pooled sum of outer products of projected
    within-class deviations, without a 1/N factor, so its trace equals the
    projected within-class sum exactly.
    """

    class_means: np.ndarray
    covariance: np.ndarray
    priors: np.ndarray
    direction: np.ndarray


@dataclass(frozen=True)
class BoundReport:
    """Both sides of the error bound for one direction.

    ``chord_coefficient`` is ``(1 - exp(-exponent_cap)) / exponent_cap``,
    always in (0, 1]; ``margin`` is ``bound - error``.
    """

    error: float
    bound: float
    chord_coefficient: float
    exponent_cap: float
    margin: float


def projected_model(X, y, direction, stats: ClassStatistics | None = None):
    """Project a labeled stack onto a unit direction and summarize it."""
    X = as_matrix_stack(X)
    y = check_labels(y, X.shape[0])
    w = unit_direction(direction, X.shape[1])
    if stats is None:
        stats = class_statistics(X, y)
    class_means = np.einsum("d,kde->ke", w, stats.class_means)
    positions = np.searchsorted(stats.classes, y)
    deviations = np.einsum("d,nde->ne", w, X - stats.class_means[positions])
    covariance = deviations.T @ deviations
    covariance = (covariance + covariance.T) / 2.0
    for arr in (class_means, covariance, w):
        arr.setflags(write=False)
    return ProjectedGaussianModel(
        class_means=class_means,
        covariance=covariance,
        priors=stats.priors,
        direction=w,
    )


def _pair_exponents(model: ProjectedGaussianModel):
    """Per-pair prior weights and Mahalanobis exponents of the model.

    Raises :class:`SingularCovarianceError` when the covariance falls
    below the invertibility floor; the closed form assumes invertibility,
    so no pseudo-inverse is attempted.
    """
    trace = float(np.trace(model.covariance))
    pairs = sym_eig(model.covariance)
    if float(pairs.values[0]) <= _INVERTIBILITY_RTOL * trace:
        raise SingularCovarianceError(
            "projected covariance is numerically singular"
        )
    c = model.class_means.shape[0]
    weights = []
    exponents = []
    for i in range(c):
        for j in range(i + 1, c):
            diff = model.class_means[i] - model.class_means[j]
            coords = diff @ pairs.vectors
            z = 0.125 * float(np.sum(coords * coords / pairs.values))
            weights.append(math.sqrt(model.priors[i] * model.priors[j]))
            exponents.append(z)
    return np.asarray(weights), np.asarray(exponents)


def bhattacharyya_error(model: ProjectedGaussianModel) -> float:
    """Closed-form pairwise Gaussian overlap error of the projected model."""
    weights, exponents = _pair_exponents(model)
    return float(np.sum(weights * np.exp(-exponents)))


def chord_coefficient(exponent_cap) -> float:
    """Slope ``(1 - exp(-b)) / b`` of the chord bounding exp(-z) on [0, b].

    Tends to 1 as the cap tends to 0; that limit is returned for a cap of
    exactly zero.
    """
    b = float(exponent_cap)
    if not math.isfinite(b) or b < 0.0:
        raise ValueError(f"exponent cap must be non-negative, got {b!r}")
    if b == 0.0:
        return 1.0
    return float(-np.expm1(-b) / b)


def bound_report(
    X, y, direction, exponent_cap, stats: ClassStatistics | None = None
) -> BoundReport:
    """Evaluate the error and its upper bound for one direction.

    The bound is
    ``-(a/8) * sum_ij sqrt(P_i P_j) gap_ij + (a/8) * weight * within
    + sum_ij sqrt(P_i P_j)`` with ``gap_ij`` the squared projected
    class-mean distances, ``within`` the projected within-class sum and
    ``weight`` the adaptive constant; ``a`` is the chord coefficient of
    ``exponent_cap``.
    """
    X = as_matrix_stack(X)
    y = check_labels(y, X.shape[0])
    if stats is None:
        stats = class_statistics(X, y)
    model = projected_model(X, y, direction, stats)
    weights, exponents = _pair_exponents(model)
    error = float(np.sum(weights * np.exp(-exponents)))

    a = chord_coefficient(exponent_cap)
    c = stats.n_classes
    between = 0.0
    for i in range(c):
        for j in range(i + 1, c):
            gap = model.class_means[i] - model.class_means[j]
            between += math.sqrt(stats.priors[i] * stats.priors[j]) * float(
                np.sum(gap * gap)
            )
    within = float(np.trace(model.covariance))
    prior_sum = float(np.sum(weights))
    bound = -(a / 8.0) * between + (a / 8.0) * adaptive_weight(stats) * within + prior_sum
    return BoundReport(
        error=error,
        bound=bound,
        chord_coefficient=a,
        exponent_cap=float(exponent_cap),
        margin=bound - error,
    )


@dataclass(frozen=True)
class DirectionCheck:
    """Outcome of one random-direction trial of :func:`direction_sweep`."""

    trial: int
    degenerate: bool
    report: BoundReport | None
    chain_ok: bool


def _chain_ok(stats: ClassStatistics, model: ProjectedGaussianModel, slack):
    """Check the per-pair inequalities the final bound rests on.

    With t the trace of the projected covariance, g the squared projected
    mean gap and f the squared Frobenius mean gap before projection:
    ``g <= f`` (Cauchy-Schwarz for a unit direction),
    ``g * (1/t) * (1 - 1/t) <= f / 4``, and the rearranged trade
    ``-g / t <= -g + (f / 4) * t``.
    """
    t = float(np.trace(model.covariance))
    c = stats.n_classes
    for i in range(c):
        for j in range(i + 1, c):
            full_diff = stats.class_means[i] - stats.class_means[j]
            f = float(np.sum(full_diff * full_diff))
            gap = model.class_means[i] - model.class_means[j]
            g = float(np.sum(gap * gap))
            if g > f * (1.0 + 1e-12) + slack:
                return False
            if g * (1.0 / t) * (1.0 - 1.0 / t) > 0.25 * f + slack:
                return False
            if -g / t > -g + 0.25 * f * t + slack:
                return False
    return True


def direction_sweep(X, y, trials, seed=0, slack=DEFAULT_SLACK):
    """Evaluate the bound on seeded uniform random unit directions.

    Each trial draws its own child stream of the seed, so results do not
    depend on evaluation order. The exponent cap of each trial is the
    largest pair exponent observed for that direction, the tightest cap
    for which the chord inequality covers the data. Directions whose
    projected covariance is singular are marked degenerate.
    """
    X = as_matrix_stack(X)
    y = check_labels(y, X.shape[0])
    if not isinstance(trials, (int, np.integer)) or isinstance(trials, bool):
        raise ValueError(f"trials must be an integer, got {trials!r}")
    if trials < 0:
        raise ValueError(f"trials must be non-negative, got {trials}")
    stats = class_statistics(X, y)
    d1 = X.shape[1]
    children = np.random.SeedSequence(seed).spawn(trials) if trials else []
    checks = []
    for index in range(trials):
        rng = np.random.default_rng(children[index])
        raw = rng.standard_normal(d1)
        norm = float(np.linalg.norm(raw))
        while norm == 0.0:
            raw = rng.standard_normal(d1)
            norm = float(np.linalg.norm(raw))
        w = raw / norm
        model = projected_model(X, y, w, stats)
        try:
            _, exponents = _pair_exponents(model)
        except SingularCovarianceError:
            checks.append(
                DirectionCheck(trial=index, degenerate=True, report=None, chain_ok=False)
            )
            continue
        cap = float(np.max(exponents)) if exponents.size else 0.0
        report = bound_report(X, y, w, cap, stats)
        checks.append(
            DirectionCheck(
                trial=index,
                degenerate=False,
                report=report,
                chain_ok=_chain_ok(stats, model, slack),
            )
        )
    return checks


def verify_bound(X, y, trials, seed=0, slack=DEFAULT_SLACK) -> float:
    """Fraction of sampled directions on which the bound chain holds.

    A trial succeeds when the bound margin is at least ``-slack`` and the
    intermediate inequalities hold pairwise. Degenerate directions are
    excluded; if every direction is degenerate the dataset cannot support
    the check and :class:`DegenerateDataError` is raised. Zero trials
    return 1.0 vacuously.
    """
    if trials == 0:
        return 1.0
    checks = direction_sweep(X, y, trials, seed=seed, slack=slack)
    valid = [c for c in checks if not c.degenerate]
    if not valid:
        raise DegenerateDataError(
            "no sampled direction produced an invertible projected covariance"
        )
    successes = sum(
        1 for c in valid if c.chain_ok and c.report.margin >= -slack
    )
    return successes / len(valid)
