"""Seeded image corruption: block occlusion, Gaussian patches, dummy images.

Every draw comes from an explicit numpy ``Generator`` so outputs are
exactly reproducible, and the draw order is part of the contract:

* rectangle corruptions draw the top-left row index, then the column
  index (both uniform over valid placements), then, for the Gaussian
  patch, the noise field row by row; nothing is drawn when the rectangle
  is empty;
* dummy injection draws each dummy image row by row followed by its label.

Seeds expand through numpy's ``SeedSequence`` into the PCG64 bit
generator; reports created by the CLI record that identifier.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .dataio import MatrixDataset
from .validation import as_matrix

RNG_ALGORITHM = "pcg64"

KINDS = ("block", "gaussian", "dummies")


@dataclass(frozen=True)
class CorruptionSpec:
    """Parameters of one corruption pass over a dataset."""

    kind: str
    area_ratio: float = 0.0
    noise_mean: float = 0.0
    noise_variance: float = 0.0
    count: int = 0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if not 0.0 <= self.area_ratio <= 1.0:
            raise ValueError(f"area_ratio {self.area_ratio!r} outside [0, 1]")
        if self.noise_variance < 0.0:
            raise ValueError(f"noise_variance {self.noise_variance!r} is negative")
        if self.count < 0:
            raise ValueError(f"count {self.count!r} is negative")

    def to_json_dict(self):
        record = asdict(self)
        record["rng"] = RNG_ALGORITHM
        return record


def patch_shape(image_shape, ratio):
    """Rectangle covering ``ratio`` of the image area.

    Each side is scaled by the square root of the ratio and rounded to the
    nearest integer (half to even), preserving the image aspect.
    """
    if not 0.0 <= ratio <= 1.0:
        raise ValueError(f"ratio {ratio!r} outside [0, 1]")
    d1, d2 = image_shape
    side = math.sqrt(ratio)
    return int(np.rint(d1 * side)), int(np.rint(d2 * side))


def _draw_corner(rng, image_shape, block):
    d1, d2 = image_shape
    h, w = block
    row = int(rng.integers(0, d1 - h + 1))
    col = int(rng.integers(0, d2 - w + 1))
    return row, col


def block_occlusion(image, ratio, rng) -> np.ndarray:
    """Zero out a rectangle of the given area ratio at a random position.

    Pixels outside the rectangle are untouched; a zero-area rectangle
    returns the image unchanged without consuming random draws.
    """
    image = as_matrix(image, "image")
    out = image.copy()
    h, w = patch_shape(image.shape, ratio)
    if h == 0 or w == 0:
        return out
    row, col = _draw_corner(rng, image.shape, (h, w))
    out[row : row + h, col : col + w] = 0.0
    return out


def gaussian_patch(image, ratio, mean, variance, rng) -> np.ndarray:
    """Add Gaussian noise inside a random rectangle, then clamp to [0, 1].

    The rectangle geometry and placement match :func:`block_occlusion`;
    each covered pixel receives an independent draw with the given mean
    and variance. The clamp keeps the result a valid image.
    """
    image = as_matrix(image, "image")
    if variance < 0.0:
        raise ValueError(f"variance {variance!r} is negative")
    out = image.copy()
    h, w = patch_shape(image.shape, ratio)
    if h == 0 or w == 0:
        return out
    row, col = _draw_corner(rng, image.shape, (h, w))
    noise = rng.normal(mean, math.sqrt(variance), size=(h, w))
    out[row : row + h, col : col + w] += noise
    np.clip(out, 0.0, 1.0, out=out)
    return out


def inject_dummies(dataset: MatrixDataset, count, rng) -> MatrixDataset:
    """Append uniform-noise images with labels drawn from existing classes.

    Original samples are unchanged and keep their positions; each dummy
    has independent Uniform[0, 1] pixels and a label uniform over 1..c.
    """
    if not isinstance(count, (int, np.integer)) or isinstance(count, bool):
        raise ValueError(f"count must be an integer, got {count!r}")
    if count < 0:
        raise ValueError(f"count {count!r} is negative")
    if count == 0:
        return dataset
    d1, d2 = dataset.image_shape
    c = dataset.n_classes
    images = []
    labels = []
    for _ in range(count):
        images.append(rng.random((d1, d2)))
        labels.append(int(rng.integers(1, c + 1)))
    return MatrixDataset(
        np.concatenate([dataset.images, np.stack(images)]),
        np.concatenate([dataset.labels, np.asarray(labels, dtype=np.int64)]),
    )


def corrupt_dataset(dataset: MatrixDataset, spec: CorruptionSpec) -> MatrixDataset:
    """Apply a corruption spec to a whole dataset, deterministically.

    Rectangle corruptions give every image its own child stream of the
    seed (one spawn per image, in order), so the result is independent of
    evaluation order; dummy injection uses a single root stream.
    """
    if spec.kind == "dummies":
        rng = np.random.default_rng(np.random.SeedSequence(spec.seed))
        return inject_dummies(dataset, spec.count, rng)
    children = np.random.SeedSequence(spec.seed).spawn(dataset.n_samples)
    images = []
    for index in range(dataset.n_samples):
        rng = np.random.default_rng(children[index])
        if spec.kind == "block":
            images.append(block_occlusion(dataset.images[index], spec.area_ratio, rng))
        else:
            images.append(
                gaussian_patch(
                    dataset.images[index],
                    spec.area_ratio,
                    spec.noise_mean,
                    spec.noise_variance,
                    rng,
                )
            )
    return MatrixDataset(np.stack(images), dataset.labels)
