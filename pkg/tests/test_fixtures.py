"""The committed fixture files are the byte-level format contract.

Loading them must produce the exact values below, and re-serializing
through the library must reproduce the committed bytes, pinning the
formats against accidental drift.
"""

from pathlib import Path

import numpy as np
from numpy.testing import assert_allclose

from emogait import dataset_io
from emogait.classify import LabeledDescriptor
from emogait.evaluate import ClassifierConfig, run_crossval
from emogait.features import describe_all

FIXTURES = Path(__file__).parent / "fixtures"


def test_sequence_fixture_parses_exactly():
    seq = dataset_io.load_sequence(FIXTURES / "s01_joy.csv", fps=30.0, n_joints=3)
    assert seq.n_frames == 6
    assert_allclose(seq.frames[0], [0.0, 0.0, 1.0, 0.0, 0.3, 1.2, 0.0, -0.3, 1.2], atol=0)
    assert seq.frames[3, 0] == 0.1 * 3  # exact float written with repr()


def test_manifest_fixture_loads():
    manifest = dataset_io.load_manifest(FIXTURES / "manifest.json")
    assert manifest.label_set == ("anger", "joy")
    assert manifest.torso_joints == (0, 1, 2)
    assert len(manifest.entries) == 4
    assert all(e.n_joints == 3 and e.fps == 30.0 for e in manifest.entries)


def test_model_fixture_round_trips_bitwise(tmp_path):
    path = FIXTURES / "model.json"
    pems = dataset_io.load_model(path)
    assert pems.labels == ("anger", "joy")
    assert pems.prototypes["anger"].values[0, 1] == 1.0
    out = tmp_path / "model.json"
    dataset_io.save_model(pems, out)
    assert out.read_bytes() == path.read_bytes()


def test_report_fixture_reproduced_from_dataset(tmp_path):
    manifest = dataset_io.load_manifest(FIXTURES / "manifest.json")
    sequences = dataset_io.load_sequences(manifest)
    descriptors = describe_all(sequences, manifest.torso_joints, 1e-9)
    data = [
        LabeledDescriptor(descriptor=d, label=e.label, subject_id=e.subject_id)
        for d, e in zip(descriptors, manifest.entries)
    ]
    report = run_crossval(
        data, ClassifierConfig("prototype", "lerm"), labels=manifest.label_set
    )
    out = tmp_path / "report.json"
    dataset_io.save_report(report, out)
    assert out.read_bytes() == (FIXTURES / "report.json").read_bytes()
