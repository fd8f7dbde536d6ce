import json
import subprocess
import sys

from emogait import dataset_io
from emogait.cli import main

TINY = [
    "--n-joints", "7",
    "--fps", "40",
    "--duration", "1.5",
    "--subjects", "3",
    "--reps", "2",
]


def run_synth(tmp_path, seed=0, noise="0.0", extra=()):
    out = tmp_path / f"data_seed{seed}"
    status = main(
        ["synth", "--out", str(out), "--seed", str(seed), "--noise-sigma", noise]
        + TINY
        + list(extra)
    )
    assert status == 0
    return out / "manifest.json"


class TestSynthCommand:
    def test_writes_dataset(self, tmp_path, capsys):
        manifest_path = run_synth(tmp_path)
        captured = capsys.readouterr()
        assert str(manifest_path) in captured.out
        manifest = dataset_io.load_manifest(manifest_path)
        assert len(manifest.entries) == 3 * 5 * 2
        assert manifest.torso_joints == (0, 1, 2, 3)

    def test_byte_identical_reruns(self, tmp_path, capsys):
        m1 = run_synth(tmp_path, seed=7)
        sample = sorted(m1.parent.glob("*.csv"))[0]
        content1 = sample.read_bytes()
        manifest1 = m1.read_bytes()
        # same seed into a fresh directory
        out2 = tmp_path / "again"
        assert main(["synth", "--out", str(out2), "--seed", "7", "--noise-sigma", "0.0"] + TINY) == 0
        assert (out2 / sample.name).read_bytes() == content1
        assert (out2 / "manifest.json").read_bytes() == manifest1


class TestPipelineCommands:
    def test_extract_train_classify(self, tmp_path, capsys):
        manifest = run_synth(tmp_path)
        descs = tmp_path / "descriptors.json"
        assert main(["extract", "--manifest", str(manifest), "--out", str(descs)]) == 0
        loaded, labels, subjects = dataset_io.load_descriptors(descs)
        assert len(loaded) == 30

        model = tmp_path / "model.json"
        assert main(["train", "--descriptors", str(descs), "--out", str(model)]) == 0
        pems = dataset_io.load_model(model)
        assert pems.labels == ("anger", "fear", "joy", "neutral", "sadness")

        capsys.readouterr()
        assert main(["classify", "--model", str(model), "--manifest", str(manifest)]) == 0
        out_lines = capsys.readouterr().out.strip().splitlines()
        assert len(out_lines) == 30
        correct = 0
        for line in out_lines:
            name, label, distances = line.split("\t")
            true = name.split("_")[1]
            correct += label == true
            assert distances.count("=") == 5
        assert correct == 30  # noiseless training data classifies perfectly

    def test_train_from_manifest(self, tmp_path):
        manifest = run_synth(tmp_path)
        model = tmp_path / "model.json"
        assert main(["train", "--manifest", str(manifest), "--out", str(model)]) == 0
        assert model.exists()

    def test_crossval_text_and_json(self, tmp_path, capsys):
        manifest = run_synth(tmp_path)
        capsys.readouterr()
        report_path = tmp_path / "report.json"
        status = main(
            [
                "crossval",
                "--manifest", str(manifest),
                "--mode", "prototype",
                "--metric", "lerm",
                "--out", str(report_path),
            ]
        )
        assert status == 0
        out = capsys.readouterr().out
        header = out.splitlines()[0].split()
        assert header == ["Anger", "Fear", "Joy", "Neutral", "Sadness"]
        assert "Average accuracy" in out
        doc = json.loads(report_path.read_text())
        assert doc["config"] == {"mode": "prototype", "metric": "lerm", "k": 1}
        assert doc["average_accuracy"] == 1.0

    def test_crossval_knn_frobenius(self, tmp_path, capsys):
        manifest = run_synth(tmp_path)
        status = main(
            ["crossval", "--manifest", str(manifest), "--mode", "knn",
             "--k", "1", "--metric", "frobenius"]
        )
        assert status == 0

    def test_window_flags(self, tmp_path, capsys):
        manifest = run_synth(tmp_path)
        status = main(
            ["crossval", "--manifest", str(manifest),
             "--window-start", "5", "--window-len", "40"]
        )
        assert status == 0


class TestDeterminism:
    def test_reports_byte_identical_and_parallel_neutral(self, tmp_path, capsys):
        manifest = run_synth(tmp_path, noise="0.01")
        outputs = []
        for i, parallel in enumerate(("1", "1", "3")):
            path = tmp_path / f"report{i}.json"
            status = main(
                ["crossval", "--manifest", str(manifest), "--mode", "knn", "--k", "3",
                 "--metric", "lerm", "--parallel", parallel, "--out", str(path)]
            )
            assert status == 0
            outputs.append(path.read_bytes())
        assert outputs[0] == outputs[1] == outputs[2]


class TestExitStatus:
    def test_usage_errors_exit_1(self, tmp_path, capsys):
        manifest = run_synth(tmp_path)
        assert main(["crossval", "--manifest", str(manifest), "--mode", "prototype", "--k", "3"]) == 1
        assert main(["crossval", "--manifest", str(manifest), "--window-len", "1"]) == 1
        assert main(["train", "--out", str(tmp_path / "m.json")]) == 1
        assert main(["crossval"]) == 1  # missing --manifest
        assert main(["frobnicate"]) == 1  # unknown subcommand

    def test_data_errors_exit_2(self, tmp_path, capsys):
        assert main(["crossval", "--manifest", str(tmp_path / "missing.json")]) == 2
        bad = tmp_path / "bad.json"
        bad.write_text('{"format": "other", "version": 0}')
        assert main(["crossval", "--manifest", str(bad)]) == 2

    def test_numeric_errors_exit_3(self, tmp_path, capsys):
        manifest = run_synth(tmp_path)
        model = tmp_path / "model.json"
        doc = {
            "format": "emogait.prototypes",
            "version": 1,
            "metric_id": "lerm",
            "dim": 2,
            "labels": ["joy"],
            "prototypes": {"joy": [[1.0, 0.0], [0.0, -1.0]]},
        }
        model.write_text(json.dumps(doc))
        assert main(["classify", "--model", str(model), "--manifest", str(manifest)]) == 3


class TestEntryPoint:
    def test_module_invocation(self, tmp_path):
        out = tmp_path / "data"
        proc = subprocess.run(
            [sys.executable, "-m", "emogait", "synth", "--out", str(out),
             "--seed", "1", "--noise-sigma", "0.0"] + TINY,
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0, proc.stderr
        assert (out / "manifest.json").exists()
        assert "manifest.json" in proc.stdout

    def test_epsilon_env_override(self, tmp_path, monkeypatch, capsys):
        manifest = run_synth(tmp_path)
        monkeypatch.setenv("EMOGAIT_EPSILON", "1e-7")
        assert main(["crossval", "--manifest", str(manifest)]) == 0
        monkeypatch.setenv("EMOGAIT_EPSILON", "not-a-number")
        assert main(["crossval", "--manifest", str(manifest)]) == 2
