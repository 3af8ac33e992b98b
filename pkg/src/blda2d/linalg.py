"""Dense symmetric and generalized-symmetric eigensolvers.

Every projection method in this package reduces to the full spectrum of a
small symmetric matrix, so these solvers are the numerical core: a cyclic
Jacobi iteration for the symmetric problem and a Cholesky whitening
reduction for the generalized one. Matrices up to a few hundred rows are
the intended regime.

All functions are pure and the returned arrays are marked read-only, so
results can be shared freely across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .exceptions import ConvergenceError, FactorizationError
from .validation import as_matrix

_EPS = float(np.finfo(np.float64).eps)
_MAX_SWEEPS = 100
_SYMMETRY_RTOL = 1e-12


@dataclass(frozen=True)
class EigenPairs:
    """Full spectrum of a symmetric (or whitened generalized) problem.

    ``values`` are sorted ascending and ``vectors[:, k]`` belongs to
    ``values[k]``. Each column has unit Euclidean norm and its
    largest-magnitude entry is non-negative, which pins the sign
    deterministically. Columns from :func:`sym_eig` are mutually
    orthonormal; columns from :func:`gen_sym_eig` are only unit-norm
    because they are orthogonal in the metric of the regularized
    right-hand matrix instead.
    """

    values: np.ndarray
    vectors: np.ndarray
    residual_tol: float


def frobenius_norm(a) -> float:
    """Square root of the sum of squared entries."""
    arr = as_matrix(a, "a")
    return math.sqrt(float(np.sum(arr * arr)))


def _off_diagonal_norm(a):
    off = a.copy()
    np.fill_diagonal(off, 0.0)
    return math.sqrt(float(np.sum(off * off)))


def _rotate(a, v, p, q):
    """Apply one two-sided Jacobi rotation annihilating a[p, q]."""
    apq = float(a[p, q])
    tau = (float(a[q, q]) - float(a[p, p])) / (2.0 * apq)
    if abs(tau) > 1e150:
        t = 1.0 / (2.0 * tau)
    elif tau >= 0.0:
        t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
    else:
        t = 1.0 / (tau - math.sqrt(1.0 + tau * tau))
    c = 1.0 / math.sqrt(1.0 + t * t)
    s = t * c

    col_p = a[:, p].copy()
    col_q = a[:, q].copy()
    a[:, p] = c * col_p - s * col_q
    a[:, q] = s * col_p + c * col_q
    row_p = a[p, :].copy()
    row_q = a[q, :].copy()
    a[p, :] = c * row_p - s * row_q
    a[q, :] = s * row_p + c * row_q
    a[p, q] = 0.0
    a[q, p] = 0.0

    vec_p = v[:, p].copy()
    vec_q = v[:, q].copy()
    v[:, p] = c * vec_p - s * vec_q
    v[:, q] = s * vec_p + c * vec_q


def _fix_signs(vectors):
    """Flip columns so the first largest-magnitude entry is non-negative."""
    for k in range(vectors.shape[1]):
        col = vectors[:, k]
        if col[int(np.argmax(np.abs(col)))] < 0.0:
            vectors[:, k] = -col
    return vectors


def _check_symmetric(arr, name):
    fro = math.sqrt(float(np.sum(arr * arr)))
    asym = math.sqrt(float(np.sum((arr - arr.T) ** 2)))
    if asym > _SYMMETRY_RTOL * fro:
        raise ValueError(
            f"{name} is not symmetric: asymmetry {asym:.3e} exceeds "
            f"{_SYMMETRY_RTOL:g} * {fro:.3e}"
        )
    return fro


def sym_eig(s, tol=1e-10) -> EigenPairs:
    """Full spectrum of a symmetric matrix by cyclic Jacobi rotations.

    Sweeps run row by row until the off-diagonal Frobenius norm drops to
    the machine-precision floor, with a hard cap of 100 sweeps. If the cap
    is hit while the off-diagonal norm still exceeds ``tol`` times the
    Frobenius norm of the input, :class:`ConvergenceError` is raised.

    Parameters
    ----------
    s : array-like, shape (n, n)
        Symmetric matrix. Callers accumulate round-off; symmetrize with
        ``(s + s.T) / 2`` first. Asymmetry beyond 1e-12 relative is
        rejected to catch logic bugs.
    tol : float
        Residual tolerance recorded on the result; each pair satisfies
        ``norm(s @ v - lam * v) <= tol * (1 + abs(lam))``.

    Returns
    -------
    EigenPairs
        Ascending eigenvalues with orthonormal, sign-fixed eigenvectors.
    """
    arr = as_matrix(s, "s")
    n, m = arr.shape
    if n != m:
        raise ValueError(f"s must be square, got shape {arr.shape}")
    fro = _check_symmetric(arr, "s")

    a = arr.copy()
    v = np.eye(n)
    floor = n * _EPS * fro
    converged = _off_diagonal_norm(a) <= floor
    for _ in range(_MAX_SWEEPS):
        if converged:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if a[p, q] != 0.0:
                    _rotate(a, v, p, q)
        converged = _off_diagonal_norm(a) <= floor
    if not converged and _off_diagonal_norm(a) > tol * fro:
        raise ConvergenceError(
            f"Jacobi iteration did not reach the off-diagonal target within "
            f"{_MAX_SWEEPS} sweeps"
        )

    raw_values = np.diag(a).copy()
    order = np.argsort(raw_values, kind="stable")
    values = raw_values[order]
    vectors = _fix_signs(v[:, order])
    values.setflags(write=False)
    vectors.setflags(write=False)
    return EigenPairs(values=values, vectors=vectors, residual_tol=float(tol))


def gen_sym_eig(a, b, ridge=0.0, tol=1e-10) -> EigenPairs:
    """Solve ``a @ w = lam * (b + ridge * I) @ w`` for symmetric a, b.

    The regularized right-hand matrix is Cholesky-factored, the problem is
    whitened into a standard symmetric one, solved with :func:`sym_eig`,
    and back-transformed. Returned columns are normalized to unit
    Euclidean norm (they are orthogonal in the ``b + ridge * I`` metric,
    not mutually orthogonal in general).

    Raises
    ------
    FactorizationError
        If the regularized right-hand matrix is not positive definite,
        which signals that ``ridge`` is too small.
    """
    a_arr = as_matrix(a, "a")
    b_arr = as_matrix(b, "b")
    if a_arr.shape[0] != a_arr.shape[1]:
        raise ValueError(f"a must be square, got shape {a_arr.shape}")
    if b_arr.shape != a_arr.shape:
        raise ValueError(
            f"a and b must have identical shapes, got {a_arr.shape} and {b_arr.shape}"
        )
    _check_symmetric(a_arr, "a")
    _check_symmetric(b_arr, "b")
    ridge = float(ridge)
    if not math.isfinite(ridge) or ridge < 0.0:
        raise ValueError(f"ridge must be a non-negative finite value, got {ridge!r}")

    n = a_arr.shape[0]
    regularized = b_arr + ridge * np.eye(n)
    try:
        chol = np.linalg.cholesky(regularized)
    except np.linalg.LinAlgError as exc:
        raise FactorizationError(
            "regularized right-hand matrix is not positive definite; "
            "increase the ridge"
        ) from exc

    half = solve_triangular(chol, a_arr, lower=True)
    whitened = solve_triangular(chol, half.T, lower=True).T
    whitened = (whitened + whitened.T) / 2.0
    pairs = sym_eig(whitened, tol=tol)

    vectors = solve_triangular(chol.T, pairs.vectors, lower=False)
    vectors /= np.linalg.norm(vectors, axis=0, keepdims=True)
    vectors = _fix_signs(vectors)
    values = pairs.values.copy()
    values.setflags(write=False)
    vectors.setflags(write=False)
    return EigenPairs(values=values, vectors=vectors, residual_tol=float(tol))
