"""Independent reference computations the library is tested against.

Nothing here shares code with the package under test: eigenvalues come
from explicit characteristic-polynomial root formulas, eigenvectors from
SVD null spaces, and the projection objective is evaluated directly from
class means and deviations.
"""

import math

import numpy as np
from scipy.linalg import subspace_angles


def charpoly_symmetric_eig(s):
    """Eigenpairs of a symmetric 2x2 or 3x3 via characteristic roots.

    Roots come from the quadratic formula or the trigonometric solution of
    the depressed cubic; each eigenvector is the SVD null vector of
    ``s - lam * I``, sign-fixed like the library convention.
    """
    s = np.asarray(s, dtype=np.float64)
    n = s.shape[0]
    if n == 2:
        a, b, d = s[0, 0], s[0, 1], s[1, 1]
        half_trace = (a + d) / 2.0
        radius = math.sqrt(((a - d) / 2.0) ** 2 + b * b)
        values = np.array([half_trace - radius, half_trace + radius])
    elif n == 3:
        p1 = s[0, 1] ** 2 + s[0, 2] ** 2 + s[1, 2] ** 2
        q = float(np.trace(s)) / 3.0
        if p1 == 0.0:
            values = np.sort(np.diag(s))
        else:
            p2 = sum((s[i, i] - q) ** 2 for i in range(3)) + 2.0 * p1
            p = math.sqrt(p2 / 6.0)
            b_mat = (s - q * np.eye(3)) / p
            r = float(np.linalg.det(b_mat)) / 2.0
            r = min(1.0, max(-1.0, r))
            phi = math.acos(r) / 3.0
            lam_hi = q + 2.0 * p * math.cos(phi)
            lam_lo = q + 2.0 * p * math.cos(phi + 2.0 * math.pi / 3.0)
            values = np.sort([lam_lo, 3.0 * q - lam_hi - lam_lo, lam_hi])
    else:
        raise ValueError("oracle only handles 2x2 and 3x3 matrices")

    vectors = []
    for lam in values:
        _, _, vt = np.linalg.svd(s - lam * np.eye(n))
        vec = vt[-1]
        if vec[int(np.argmax(np.abs(vec)))] < 0.0:
            vec = -vec
        vectors.append(vec)
    return np.asarray(values), np.column_stack(vectors)


def bhattacharyya_objective(images, labels, w):
    """Direct evaluation of the projection criterion at W.

    Recomputes class means from scratch and sums projected Frobenius
    norms, so it is independent of the library's scatter-matrix path.
    """
    images = np.asarray(images, dtype=np.float64)
    labels = np.asarray(labels)
    w = np.asarray(w, dtype=np.float64)
    if w.ndim == 1:
        w = w[:, np.newaxis]
    n = images.shape[0]
    classes = np.unique(labels)
    means = {c: images[labels == c].mean(axis=0) for c in classes}
    priors = {c: np.sum(labels == c) / n for c in classes}
    counts = {c: int(np.sum(labels == c)) for c in classes}

    weight = 0.0
    for a in range(classes.size):
        for b in range(a + 1, classes.size):
            ca, cb = classes[a], classes[b]
            diff = means[ca] - means[cb]
            weight += math.sqrt(priors[ca] * priors[cb]) * float(np.sum(diff * diff))
    weight *= 0.25

    between = 0.0
    for a in range(classes.size):
        for b in range(a + 1, classes.size):
            ca, cb = classes[a], classes[b]
            proj = w.T @ (means[ca] - means[cb])
            between += math.sqrt(counts[ca] * counts[cb]) * float(np.sum(proj * proj))
    between /= n

    within = 0.0
    for c in classes:
        for sample in images[labels == c]:
            proj = w.T @ (sample - means[c])
            within += float(np.sum(proj * proj))

    return -between + weight * within


def max_principal_angle(a, b):
    """Largest canonical angle between the column spans of a and b."""
    a = np.atleast_2d(np.asarray(a, dtype=np.float64))
    b = np.atleast_2d(np.asarray(b, dtype=np.float64))
    if a.shape[0] == 1:
        a = a.T
    if b.shape[0] == 1:
        b = b.T
    angles = subspace_angles(a, b)
    return float(np.max(angles)) if angles.size else 0.0
