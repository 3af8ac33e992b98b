import json

import numpy as np
import pytest

from blda2d import MatrixDataset, load_dataset, load_projector, save_dataset
from blda2d.cli import main

from conftest import separable_blobs


@pytest.fixture
def blob_manifest(tmp_path):
    train_images, train_labels, test_images, test_labels = separable_blobs()
    images = np.concatenate([train_images, test_images])
    labels = np.concatenate([train_labels, test_labels])
    dataset = MatrixDataset(images, labels)
    return save_dataset(dataset, tmp_path / "blobs")


@pytest.fixture
def singular_manifest(tmp_path):
    # within-class spread confined to the second row: singular S_w
    images = np.array(
        [
            [[1.0, 0.0], [0.0, 0.0]],
            [[1.0, 0.0], [0.0, 1.0]],
            [[0.0, 0.0], [0.0, 0.0]],
            [[0.0, 0.0], [0.0, 1.0]],
        ]
    )
    dataset = MatrixDataset(images, np.array([1, 1, 2, 2]))
    return save_dataset(dataset, tmp_path / "singular")


class TestFit:
    def test_writes_projector_and_summary(self, blob_manifest, tmp_path, capsys):
        out = tmp_path / "projector.txt"
        code = main(
            [
                "fit", "--manifest", str(blob_manifest), "--method", "2dblda",
                "--r", "3", "--output", str(out),
            ]
        )
        assert code == 0
        assert out.exists()
        stdout = capsys.readouterr().out
        assert "method=2dblda" in stdout
        assert "adaptive_weight=" in stdout
        loaded = load_projector(out)
        assert loaded.components_.shape == (8, 3)

    def test_zero_r_is_usage_error(self, blob_manifest, tmp_path):
        with pytest.raises(SystemExit) as excinfo:
            main(
                [
                    "fit", "--manifest", str(blob_manifest), "--method", "2dblda",
                    "--r", "0", "--output", str(tmp_path / "p.txt"),
                ]
            )
        assert excinfo.value.code == 2

    def test_auto_ridge_warning(self, singular_manifest, tmp_path, capsys):
        code = main(
            [
                "fit", "--manifest", str(singular_manifest), "--method", "2dlda",
                "--r", "1", "--output", str(tmp_path / "p.txt"),
            ]
        )
        assert code == 0
        assert "applied ridge" in capsys.readouterr().err

    def test_oversized_r_is_runtime_failure(self, blob_manifest, tmp_path, capsys):
        code = main(
            [
                "fit", "--manifest", str(blob_manifest), "--method", "2dblda",
                "--r", "99", "--output", str(tmp_path / "p.txt"),
            ]
        )
        assert code == 1
        assert "error:" in capsys.readouterr().err


class TestProjectReconstruct:
    def test_round_trip(self, blob_manifest, tmp_path, capsys):
        projector = tmp_path / "projector.txt"
        assert main(
            [
                "fit", "--manifest", str(blob_manifest), "--method", "2dblda",
                "--r", "2", "--output", str(projector),
            ]
        ) == 0
        assert main(
            [
                "project", "--manifest", str(blob_manifest),
                "--projector", str(projector),
                "--output-dir", str(tmp_path / "projected"),
            ]
        ) == 0
        projected = load_dataset(tmp_path / "projected" / "manifest.txt")
        assert projected.image_shape == (2, 6)
        assert main(
            [
                "reconstruct", "--manifest", str(blob_manifest),
                "--projector", str(projector),
                "--output-dir", str(tmp_path / "recon"),
            ]
        ) == 0
        recon = load_dataset(tmp_path / "recon" / "manifest.txt")
        assert recon.image_shape == (8, 6)

    def test_reconstruct_with_2dlda_fails_cleanly(self, blob_manifest, tmp_path, capsys):
        projector = tmp_path / "projector.txt"
        assert main(
            [
                "fit", "--manifest", str(blob_manifest), "--method", "2dlda",
                "--r", "1", "--output", str(projector),
            ]
        ) == 0
        code = main(
            [
                "reconstruct", "--manifest", str(blob_manifest),
                "--projector", str(projector),
                "--output-dir", str(tmp_path / "recon"),
            ]
        )
        assert code == 1
        assert "orthonormal" in capsys.readouterr().err


class TestCurve:
    def curve_args(self, manifest, output, extra=()):
        return [
            "curve", "--manifest", str(manifest), "--per-class-train", "10",
            "--methods", "2dblda,2dpca", "--r-list", "1:5",
            "--metric", "accuracy", "--output", str(output), "--seed", "7",
            *extra,
        ]

    def test_row_count_and_perfect_accuracy(self, blob_manifest, tmp_path, capsys):
        out = tmp_path / "curve.csv"
        assert main(self.curve_args(blob_manifest, out)) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "method,r,metric,value,seed"
        assert len(lines) == 11
        blda_rows = [line for line in lines if line.startswith("2dblda")]
        assert all(row.split(",")[3] == "1.0" for row in blda_rows)

    def test_byte_identical_reruns(self, blob_manifest, tmp_path):
        first = tmp_path / "first.csv"
        second = tmp_path / "second.csv"
        assert main(self.curve_args(blob_manifest, first)) == 0
        assert main(self.curve_args(blob_manifest, second)) == 0
        assert first.read_bytes() == second.read_bytes()

    def test_are_mode_monotone(self, blob_manifest, tmp_path):
        out = tmp_path / "are.csv"
        args = [
            "curve", "--manifest", str(blob_manifest), "--per-class-train", "10",
            "--methods", "2dblda", "--r-list", "1:8", "--metric", "are",
            "--output", str(out),
        ]
        assert main(args) == 0
        values = [float(line.split(",")[3]) for line in out.read_text().splitlines()[1:]]
        assert all(b <= a + 1e-9 for a, b in zip(values, values[1:]))

    def test_corrupted_training_curve_runs(self, blob_manifest, tmp_path):
        out = tmp_path / "corrupted.csv"
        args = self.curve_args(
            blob_manifest, out, extra=["--corrupt-kind", "block", "--corrupt-ratio", "0.4"]
        )
        assert main(args) == 0
        assert out.exists()

    def test_missing_manifest_is_usage_error(self, tmp_path):
        with pytest.raises(SystemExit) as excinfo:
            main(self.curve_args(tmp_path / "ghost.txt", tmp_path / "out.csv"))
        assert excinfo.value.code == 2
        assert not (tmp_path / "out.csv").exists()

    def test_conflicting_inputs_are_usage_error(self, blob_manifest, tmp_path, capsys):
        code = main(
            [
                "curve", "--methods", "2dblda", "--r-list", "1",
                "--metric", "accuracy", "--output", str(tmp_path / "out.csv"),
            ]
        )
        assert code == 2
        assert "usage error" in capsys.readouterr().err


class TestCorrupt:
    def test_writes_sidecar_and_is_deterministic(self, blob_manifest, tmp_path):
        first = tmp_path / "first"
        second = tmp_path / "second"
        for out_dir in (first, second):
            assert main(
                [
                    "corrupt", "--manifest", str(blob_manifest), "--kind", "block",
                    "--ratio", "0.25", "--output-dir", str(out_dir), "--seed", "5",
                ]
            ) == 0
        sidecar = json.loads((first / "corruption.json").read_text())
        assert sidecar["kind"] == "block"
        assert sidecar["rng"] == "pcg64"
        assert sidecar["seed"] == 5
        a = load_dataset(first / "manifest.txt")
        b = load_dataset(second / "manifest.txt")
        assert np.array_equal(a.images, b.images)

    def test_dummies_kind_appends(self, blob_manifest, tmp_path):
        out_dir = tmp_path / "dummies"
        assert main(
            [
                "corrupt", "--manifest", str(blob_manifest), "--kind", "dummies",
                "--count", "10", "--output-dir", str(out_dir),
            ]
        ) == 0
        grown = load_dataset(out_dir / "manifest.txt")
        assert grown.n_samples == 50

    def test_block_without_ratio_is_usage_error(self, blob_manifest, tmp_path, capsys):
        code = main(
            [
                "corrupt", "--manifest", str(blob_manifest), "--kind", "block",
                "--output-dir", str(tmp_path / "out"),
            ]
        )
        assert code == 2


class TestBoundCheck:
    def test_success_fraction_printed(self, blob_manifest, tmp_path, capsys):
        out = tmp_path / "bound.csv"
        code = main(
            [
                "bound-check", "--manifest", str(blob_manifest), "--trials", "20",
                "--output", str(out),
            ]
        )
        assert code == 0
        assert "success_fraction=1.0" in capsys.readouterr().out
        lines = out.read_text().splitlines()
        assert lines[0] == "trial,epsilon_b,rhs,margin,b_cap"
        assert len(lines) == 21

    def test_zero_trials_header_only(self, blob_manifest, tmp_path):
        out = tmp_path / "bound.csv"
        assert main(
            [
                "bound-check", "--manifest", str(blob_manifest), "--trials", "0",
                "--output", str(out),
            ]
        ) == 0
        assert out.read_text() == "trial,epsilon_b,rhs,margin,b_cap\n"

    def test_zero_spread_dataset_fails(self, tmp_path, capsys):
        images = np.array([[[1.0, 0.0]], [[0.0, 1.0]], [[1.0, 0.0]], [[0.0, 1.0]]])
        dataset = MatrixDataset(images, np.array([1, 2, 1, 2]))
        manifest = save_dataset(dataset, tmp_path / "flat")
        code = main(
            [
                "bound-check", "--manifest", str(manifest), "--trials", "5",
                "--output", str(tmp_path / "bound.csv"),
            ]
        )
        assert code == 1
        assert "error:" in capsys.readouterr().err


class TestSplit:
    def test_writes_loadable_manifests(self, tmp_path):
        rng = np.random.default_rng(8)
        dataset = MatrixDataset(
            rng.random((22, 4, 4)), np.repeat([1, 2], 11)
        )
        manifest = save_dataset(dataset, tmp_path / "full")
        train_out = tmp_path / "splits" / "train.txt"
        test_out = tmp_path / "splits" / "test.txt"
        assert main(
            [
                "split", "--manifest", str(manifest), "--per-class-train", "7",
                "--train-output", str(train_out), "--test-output", str(test_out),
            ]
        ) == 0
        train = load_dataset(train_out)
        test = load_dataset(test_out)
        assert train.n_samples == 14
        assert test.n_samples == 8
        for cls in (1, 2):
            assert int(np.sum(train.labels == cls)) == 7
            assert int(np.sum(test.labels == cls)) == 4
