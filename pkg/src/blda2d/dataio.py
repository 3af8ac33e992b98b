"""Dataset container, on-disk formats, manifests and deterministic splits.

Supported image formats are grayscale PGM (binary P5 or ASCII P2, maxval
up to 65535, pixels normalized by the header maxval) and a matrix-CSV
format (one image per file, one row per line, shortest round-trip
decimals) whose save/load round trip reproduces values exactly. Manifests
are UTF-8 text with one ``path,label`` pair per line; ``#`` starts a
comment and blank lines are ignored. Paths are relative to the manifest
location. Labels are canonicalized to 1..c in order of first appearance.
"""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .validation import as_matrix, as_matrix_stack, check_labels

IMAGE_EXTENSIONS = (".pgm", ".csv")


@dataclass(frozen=True)
class MatrixDataset:
    """Labeled stack of equally sized matrices.

    ``labels`` must form the contiguous range 1..c with every class
    present; use :meth:`from_raw_labels` to canonicalize arbitrary integer
    labels first.
    """

    images: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        images = as_matrix_stack(self.images, "images").copy()
        labels = check_labels(self.labels, images.shape[0], "labels")
        present = np.unique(labels)
        expected = np.arange(1, present.size + 1)
        if not np.array_equal(present, expected):
            raise ValueError(
                "labels must form the contiguous range 1..c with every class "
                f"present, got {present.tolist()}"
            )
        images.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "images", images)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_raw_labels(cls, images, raw_labels):
        return cls(images, canonicalize_labels(raw_labels))

    @property
    def n_samples(self) -> int:
        return int(self.images.shape[0])

    @property
    def image_shape(self):
        return self.images.shape[1:]

    @property
    def n_classes(self) -> int:
        return int(self.labels.max())


def canonicalize_labels(raw_labels) -> np.ndarray:
    """Map arbitrary integer labels to 1..c in order of first appearance."""
    mapping = {}
    out = []
    for label in raw_labels:
        key = int(label)
        if key not in mapping:
            mapping[key] = len(mapping) + 1
        out.append(mapping[key])
    return np.asarray(out, dtype=np.int64)


def write_text(path, text):
    """Write text atomically: a temp file in the same directory is renamed
    into place, so failures never leave a truncated file."""
    path = Path(path)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise


def read_manifest(path):
    """Parse a manifest into (relative path, raw integer label) entries."""
    entries = []
    with open(path, "r", encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            stripped = line.split("#", 1)[0].strip()
            if not stripped:
                continue
            parts = stripped.rsplit(",", 1)
            if len(parts) != 2:
                raise ValueError(
                    f"{path}:{line_number}: expected 'path,label', got {line!r}"
                )
            rel_path, label_text = parts[0].strip(), parts[1].strip()
            try:
                label = int(label_text)
            except ValueError as exc:
                raise ValueError(
                    f"{path}:{line_number}: label {label_text!r} is not an integer"
                ) from exc
            entries.append((rel_path, label))
    return entries


def _header_tokens(data, count, path):
    """Read `count` whitespace-separated header tokens, honoring comments.

    Returns the tokens and the byte offset just past the single whitespace
    that terminates the final token.
    """
    tokens = []
    pos = 0
    while len(tokens) < count:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ValueError(f"{path}: truncated header")
        tokens.append(data[start:pos])
    if pos >= len(data):
        raise ValueError(f"{path}: truncated header")
    return tokens, pos + 1


def read_pgm(path) -> np.ndarray:
    """Decode a P2 or P5 PGM into floats in [0, 1] (divided by maxval)."""
    with open(path, "rb") as handle:
        data = handle.read()
    if data[:2] not in (b"P2", b"P5"):
        raise ValueError(f"{path}: not a P2/P5 PGM file")
    magic = data[:2]
    try:
        tokens, offset = _header_tokens(data[2:], 3, path)
    except ValueError:
        raise ValueError(f"{path}: truncated PGM header") from None
    offset += 2
    width, height, maxval = (int(t) for t in tokens)
    if width < 1 or height < 1:
        raise ValueError(f"{path}: invalid dimensions {width}x{height}")
    if not 1 <= maxval <= 65535:
        raise ValueError(f"{path}: maxval {maxval} outside [1, 65535]")
    count = width * height
    if magic == b"P5":
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype(np.uint8)
        needed = count * dtype.itemsize
        raster = data[offset : offset + needed]
        if len(raster) < needed:
            raise ValueError(f"{path}: truncated PGM raster")
        pixels = np.frombuffer(raster, dtype=dtype).astype(np.float64)
    else:
        try:
            values = [int(t) for t in data[offset:].split()]
        except ValueError as exc:
            raise ValueError(f"{path}: malformed ASCII raster") from exc
        if len(values) < count:
            raise ValueError(f"{path}: truncated PGM raster")
        pixels = np.asarray(values[:count], dtype=np.float64)
    if pixels.max(initial=0.0) > maxval:
        raise ValueError(f"{path}: pixel value exceeds maxval {maxval}")
    return pixels.reshape(height, width) / maxval


def write_pgm(path, image, maxval=255, ascii_format=False):
    """Quantize floats in [0, 1] to a PGM file (P5, or P2 when ascii)."""
    image = as_matrix(image, "image")
    if not 1 <= int(maxval) <= 65535:
        raise ValueError(f"maxval {maxval} outside [1, 65535]")
    maxval = int(maxval)
    quantized = np.clip(np.rint(image * maxval), 0, maxval)
    height, width = image.shape
    header = f"{'P2' if ascii_format else 'P5'}\n{width} {height}\n{maxval}\n"
    if ascii_format:
        body = "\n".join(
            " ".join(str(int(v)) for v in row) for row in quantized
        )
        Path(path).write_bytes((header + body + "\n").encode("ascii"))
    else:
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype(np.uint8)
        Path(path).write_bytes(header.encode("ascii") + quantized.astype(dtype).tobytes())


def read_matrix_csv(path) -> np.ndarray:
    """Read one matrix from comma-separated rows of plain decimals."""
    rows = []
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            stripped = line.strip()
            if not stripped:
                continue
            try:
                rows.append([float(v) for v in stripped.split(",")])
            except ValueError as exc:
                raise ValueError(f"{path}: malformed CSV row {line!r}") from exc
    if not rows:
        raise ValueError(f"{path}: empty matrix file")
    widths = {len(row) for row in rows}
    if len(widths) != 1:
        raise ValueError(f"{path}: ragged CSV rows")
    return np.asarray(rows, dtype=np.float64)


def write_matrix_csv(path, matrix):
    """Write one matrix as comma-separated shortest round-trip decimals."""
    matrix = as_matrix(matrix, "matrix")
    lines = [",".join(repr(float(v)) for v in row) for row in matrix]
    write_text(path, "\n".join(lines) + "\n")


def _read_image(path):
    suffix = Path(path).suffix.lower()
    if suffix == ".pgm":
        return read_pgm(path)
    if suffix == ".csv":
        return read_matrix_csv(path)
    raise ValueError(f"{path}: unsupported image extension {suffix!r}")


def load_dataset(manifest_path) -> MatrixDataset:
    """Load every manifest entry, in manifest order, into one dataset."""
    manifest_path = Path(manifest_path)
    entries = read_manifest(manifest_path)
    if not entries:
        raise ValueError(f"{manifest_path}: manifest has no entries")
    base = manifest_path.parent
    images = []
    raw_labels = []
    shape = None
    for rel_path, label in entries:
        file_path = base / rel_path
        if not file_path.exists():
            raise FileNotFoundError(f"missing image file {file_path}")
        image = _read_image(file_path)
        if shape is None:
            shape = image.shape
        elif image.shape != shape:
            raise ValueError(
                f"{file_path}: image shape {image.shape} does not match {shape}"
            )
        images.append(image)
        raw_labels.append(label)
    return MatrixDataset.from_raw_labels(np.stack(images), raw_labels)


def save_dataset(dataset: MatrixDataset, out_dir, prefix="sample") -> Path:
    """Write a dataset as matrix-CSV files plus a manifest; returns the
    manifest path. The round trip through :func:`load_dataset` is exact."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    lines = []
    for index in range(dataset.n_samples):
        name = f"{prefix}_{index:05d}.csv"
        write_matrix_csv(out_dir / name, dataset.images[index])
        lines.append(f"{name},{int(dataset.labels[index])}")
    manifest_path = out_dir / "manifest.txt"
    write_text(manifest_path, "\n".join(lines) + "\n")
    return manifest_path


def split_indices(labels, per_class_train, seed):
    """Choose ``per_class_train`` training indices per class, seeded.

    Classes are visited in ascending label order; within each class the
    choice is uniform without replacement over the class's dataset
    positions. Both returned index arrays are sorted, so sample order
    follows dataset order.
    """
    labels = np.asarray(labels)
    if not isinstance(per_class_train, (int, np.integer)) or isinstance(
        per_class_train, bool
    ):
        raise ValueError(f"per_class_train must be an integer, got {per_class_train!r}")
    if per_class_train < 1:
        raise ValueError(f"per_class_train must be at least 1, got {per_class_train}")
    rng = np.random.default_rng(seed)
    train = []
    for cls in np.unique(labels):
        positions = np.flatnonzero(labels == cls)
        if positions.size <= per_class_train:
            raise ValueError(
                f"class {int(cls)} has {positions.size} samples; "
                f"need more than {per_class_train}"
            )
        chosen = rng.choice(positions.size, size=per_class_train, replace=False)
        train.append(positions[np.sort(chosen)])
    train_idx = np.sort(np.concatenate(train))
    mask = np.ones(labels.shape[0], dtype=bool)
    mask[train_idx] = False
    return train_idx, np.flatnonzero(mask)


def split_dataset(dataset: MatrixDataset, per_class_train, seed):
    """Split into disjoint, exhaustive train and test datasets."""
    train_idx, test_idx = split_indices(dataset.labels, per_class_train, seed)
    train = MatrixDataset(dataset.images[train_idx], dataset.labels[train_idx])
    test = MatrixDataset(dataset.images[test_idx], dataset.labels[test_idx])
    return train, test
