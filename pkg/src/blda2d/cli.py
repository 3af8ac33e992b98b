"""Command line front door.

Subcommands: ``fit``, ``project``, ``reconstruct``, ``curve``, ``corrupt``,
``bound-check`` and ``split``. All randomness flows from a single
``--seed`` flag that defaults to 0, never the clock, so identical command
lines over identical files produce byte-identical outputs. Report files
are written atomically. Exit status is 0 on success, 1 on runtime
failure (one-line diagnostic on stderr) and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .bound import direction_sweep
from .corruption import RNG_ALGORITHM, CorruptionSpec, corrupt_dataset
from .dataio import (
    MatrixDataset,
    canonicalize_labels,
    load_dataset,
    read_manifest,
    save_dataset,
    split_indices,
    write_text,
)
from .estimators import METHODS, load_projector, projector_text
from .evaluation import VALID_METRICS, metric_curve, report_csv
from .exceptions import DegenerateDataError
from .scatter import adaptive_weight, class_statistics


class UsageError(Exception):
    """Invalid flag combination detected after parsing."""


def _existing_file(value):
    path = Path(value)
    if not path.is_file():
        raise argparse.ArgumentTypeError(f"file {value!r} does not exist")
    return path


def _positive_int(value):
    try:
        number = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{value!r} is not an integer") from None
    if number < 1:
        raise argparse.ArgumentTypeError(f"{value!r} must be at least 1")
    return number


def _non_negative_int(value):
    try:
        number = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{value!r} is not an integer") from None
    if number < 0:
        raise argparse.ArgumentTypeError(f"{value!r} must be non-negative")
    return number


def _ratio(value):
    try:
        number = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{value!r} is not a number") from None
    if not 0.0 <= number <= 1.0:
        raise argparse.ArgumentTypeError(f"{value!r} must lie in [0, 1]")
    return number


def _r_list(value):
    """Parse '1,2,5' and '1:4' (inclusive) dimension lists."""
    out = []
    for item in value.split(","):
        item = item.strip()
        if ":" in item:
            lo_text, hi_text = item.split(":", 1)
            try:
                lo, hi = int(lo_text), int(hi_text)
            except ValueError:
                raise argparse.ArgumentTypeError(
                    f"{item!r} is not a valid range"
                ) from None
            if lo < 1 or hi < lo:
                raise argparse.ArgumentTypeError(f"{item!r} is not a valid range")
            out.extend(range(lo, hi + 1))
        else:
            try:
                number = int(item)
            except ValueError:
                raise argparse.ArgumentTypeError(
                    f"{item!r} is not an integer"
                ) from None
            if number < 1:
                raise argparse.ArgumentTypeError(f"{item!r} must be at least 1")
            out.append(number)
    if not out:
        raise argparse.ArgumentTypeError("empty dimension list")
    return sorted(set(out))


def _method_list(value):
    methods = [item.strip() for item in value.split(",") if item.strip()]
    for method in methods:
        if method not in METHODS:
            raise argparse.ArgumentTypeError(
                f"unknown method {method!r}; choose from {sorted(METHODS)}"
            )
    if not methods:
        raise argparse.ArgumentTypeError("empty method list")
    return methods


def _dataset_arrays(dataset: MatrixDataset, method):
    if method == "l2blda":
        flat = dataset.images.reshape(dataset.n_samples, -1)
        return flat, dataset.labels
    return dataset.images, dataset.labels


def _fit_estimator(dataset, method, r, ridge):
    from .estimators import make_estimator

    X, y = _dataset_arrays(dataset, method)
    estimator = make_estimator(method, n_components=r, ridge=ridge)
    estimator.fit(X, y)
    return estimator


def cmd_fit(args):
    dataset = load_dataset(args.manifest)
    estimator = _fit_estimator(dataset, args.method, args.r, args.ridge)
    if args.method == "2dlda" and args.ridge is None and estimator.ridge_ > 0.0:
        print(
            f"warning: within-class scatter is singular; "
            f"applied ridge {estimator.ridge_!r}",
            file=sys.stderr,
        )
    write_text(args.output, projector_text(estimator))
    stats = class_statistics(dataset.images, dataset.labels)
    eigenvalues = ",".join(repr(float(v)) for v in estimator.eigenvalues_)
    print(
        f"method={args.method} r={args.r} eigenvalues=[{eigenvalues}] "
        f"adaptive_weight={repr(adaptive_weight(stats))}"
    )
    return 0


def _transformed_dataset(args, transform_name):
    dataset = load_dataset(args.manifest)
    estimator = load_projector(args.projector)
    X, y = _dataset_arrays(dataset, estimator.method_id)
    result = getattr(estimator, transform_name)(X)
    if result.ndim == 2:
        result = result[:, :, np.newaxis]
    return MatrixDataset(result, y)


def cmd_project(args):
    projected = _transformed_dataset(args, "transform")
    manifest = save_dataset(projected, args.output_dir)
    print(f"wrote {projected.n_samples} projected samples to {manifest}")
    return 0


def cmd_reconstruct(args):
    reconstructed = _transformed_dataset(args, "reconstruct")
    manifest = save_dataset(reconstructed, args.output_dir)
    print(f"wrote {reconstructed.n_samples} reconstructed samples to {manifest}")
    return 0


def cmd_curve(args):
    have_pair = args.train_manifest is not None and args.test_manifest is not None
    have_split = args.manifest is not None and args.per_class_train is not None
    if have_pair == have_split:
        raise UsageError(
            "provide either --train-manifest with --test-manifest, or "
            "--manifest with --per-class-train"
        )
    if have_pair:
        train = load_dataset(args.train_manifest)
        test = load_dataset(args.test_manifest)
        dataset_id = str(args.train_manifest)
    else:
        full = load_dataset(args.manifest)
        train_idx, test_idx = split_indices(full.labels, args.per_class_train, args.seed)
        train = MatrixDataset(full.images[train_idx], full.labels[train_idx])
        test = MatrixDataset(full.images[test_idx], full.labels[test_idx])
        dataset_id = str(args.manifest)
    if train.image_shape != test.image_shape:
        raise ValueError("train and test image shapes differ")

    if args.corrupt_kind is not None:
        spec = CorruptionSpec(
            kind=args.corrupt_kind,
            area_ratio=args.corrupt_ratio,
            noise_mean=args.noise_mean,
            noise_variance=args.noise_variance,
            seed=args.seed,
        )
        train = corrupt_dataset(train, spec)

    reports = [
        metric_curve(
            train.images,
            train.labels,
            test.images,
            test.labels,
            method,
            args.r_list,
            args.metric,
            ridge=args.ridge,
            seed=args.seed,
            dataset_id=dataset_id,
        )
        for method in args.methods
    ]
    write_text(args.output, report_csv(reports))
    print(f"wrote {sum(len(r.rows) for r in reports)} rows to {args.output}")
    return 0


def cmd_corrupt(args):
    dataset = load_dataset(args.manifest)
    if args.kind in ("block", "gaussian") and args.ratio is None:
        raise UsageError(f"--ratio is required for kind {args.kind!r}")
    spec = CorruptionSpec(
        kind=args.kind,
        area_ratio=args.ratio if args.ratio is not None else 0.0,
        noise_mean=args.noise_mean,
        noise_variance=args.noise_variance,
        count=args.count,
        seed=args.seed,
    )
    corrupted = corrupt_dataset(dataset, spec)
    manifest = save_dataset(corrupted, args.output_dir)
    sidecar = Path(args.output_dir) / "corruption.json"
    write_text(sidecar, json.dumps(spec.to_json_dict(), indent=2, sort_keys=True) + "\n")
    print(f"wrote {corrupted.n_samples} samples to {manifest} (spec in {sidecar})")
    return 0


def cmd_bound_check(args):
    dataset = load_dataset(args.manifest)
    checks = direction_sweep(dataset.images, dataset.labels, args.trials, seed=args.seed)
    lines = ["trial,epsilon_b,rhs,margin,b_cap"]
    valid = [c for c in checks if not c.degenerate]
    if args.trials > 0 and not valid:
        raise DegenerateDataError(
            "no sampled direction produced an invertible projected covariance"
        )
    successes = 0
    for check in valid:
        report = check.report
        if check.chain_ok and report.margin >= -1e-9:
            successes += 1
        lines.append(
            f"{check.trial},{repr(report.error)},{repr(report.bound)},"
            f"{repr(report.margin)},{repr(report.exponent_cap)}"
        )
    write_text(args.output, "\n".join(lines) + "\n")
    fraction = successes / len(valid) if valid else 1.0
    print(
        f"success_fraction={repr(fraction)} trials={args.trials} rng={RNG_ALGORITHM}"
    )
    return 0


def cmd_split(args):
    entries = read_manifest(args.manifest)
    if not entries:
        raise ValueError(f"{args.manifest}: manifest has no entries")
    labels = canonicalize_labels([label for _, label in entries])
    train_idx, test_idx = split_indices(labels, args.per_class_train, args.seed)
    base = Path(args.manifest).parent

    def render(indices, out_path):
        out_dir = Path(out_path).parent
        out_dir.mkdir(parents=True, exist_ok=True)
        lines = []
        for index in indices:
            rel_path, label = entries[index]
            absolute = (base / rel_path).resolve()
            lines.append(f"{os.path.relpath(absolute, out_dir.resolve())},{label}")
        write_text(out_path, "\n".join(lines) + "\n")

    render(train_idx, args.train_output)
    render(test_idx, args.test_output)
    print(
        f"split {len(entries)} entries into {len(train_idx)} train / "
        f"{len(test_idx)} test"
    )
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="blda2d",
        description="Matrix-variate discriminant analysis pipelines",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit", help="fit a projector and save it")
    fit.add_argument("--manifest", type=_existing_file, required=True)
    fit.add_argument("--method", choices=sorted(METHODS), required=True)
    fit.add_argument("--r", type=_positive_int, required=True)
    fit.add_argument("--ridge", type=float, default=None)
    fit.add_argument("--output", required=True)
    fit.add_argument("--seed", type=int, default=0)
    fit.set_defaults(handler=cmd_fit)

    for name, handler in (("project", cmd_project), ("reconstruct", cmd_reconstruct)):
        cmd = sub.add_parser(name, help=f"{name} a dataset through a saved projector")
        cmd.add_argument("--manifest", type=_existing_file, required=True)
        cmd.add_argument("--projector", type=_existing_file, required=True)
        cmd.add_argument("--output-dir", required=True)
        cmd.add_argument("--seed", type=int, default=0)
        cmd.set_defaults(handler=handler)

    curve = sub.add_parser("curve", help="metric versus reduced dimension")
    curve.add_argument("--train-manifest", type=_existing_file)
    curve.add_argument("--test-manifest", type=_existing_file)
    curve.add_argument("--manifest", type=_existing_file)
    curve.add_argument("--per-class-train", type=_positive_int)
    curve.add_argument("--methods", type=_method_list, required=True)
    curve.add_argument("--r-list", type=_r_list, required=True)
    curve.add_argument("--metric", choices=VALID_METRICS, required=True)
    curve.add_argument("--ridge", type=float, default=None)
    curve.add_argument("--corrupt-kind", choices=("block", "gaussian"), default=None)
    curve.add_argument("--corrupt-ratio", type=_ratio, default=0.0)
    curve.add_argument("--noise-mean", type=float, default=0.0)
    curve.add_argument("--noise-variance", type=float, default=0.2)
    curve.add_argument("--output", required=True)
    curve.add_argument("--seed", type=int, default=0)
    curve.set_defaults(handler=cmd_curve)

    corrupt = sub.add_parser("corrupt", help="write a corrupted copy of a dataset")
    corrupt.add_argument("--manifest", type=_existing_file, required=True)
    corrupt.add_argument("--kind", choices=("block", "gaussian", "dummies"), required=True)
    corrupt.add_argument("--ratio", type=_ratio, default=None)
    corrupt.add_argument("--noise-mean", type=float, default=0.0)
    corrupt.add_argument("--noise-variance", type=float, default=0.2)
    corrupt.add_argument("--count", type=_non_negative_int, default=0)
    corrupt.add_argument("--output-dir", required=True)
    corrupt.add_argument("--seed", type=int, default=0)
    corrupt.set_defaults(handler=cmd_corrupt)

    bound = sub.add_parser("bound-check", help="verify the error bound numerically")
    bound.add_argument("--manifest", type=_existing_file, required=True)
    bound.add_argument("--trials", type=_non_negative_int, required=True)
    bound.add_argument("--output", required=True)
    bound.add_argument("--seed", type=int, default=0)
    bound.set_defaults(handler=cmd_bound_check)

    split = sub.add_parser("split", help="split a manifest into train and test")
    split.add_argument("--manifest", type=_existing_file, required=True)
    split.add_argument("--per-class-train", type=_positive_int, required=True)
    split.add_argument("--train-output", required=True)
    split.add_argument("--test-output", required=True)
    split.add_argument("--seed", type=int, default=0)
    split.set_defaults(handler=cmd_split)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
