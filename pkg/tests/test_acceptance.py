"""Acceptance suite: one test per release criterion.

Each test prints a single ``ACCEPTANCE <n> ...: PASS`` line on success
(run with ``pytest -s`` to see them); a failing criterion shows up as an
ordinary pytest failure.
"""

import json
import subprocess
import sys
import time

import numpy as np
import pytest

from emogait.classify import LabeledDescriptor, build_prototypes, classify_knn, classify_prototype
from emogait.evaluate import (
    ClassifierConfig,
    aggregate_confusions,
    macro_average_accuracy,
    plan_loso,
    render_report,
    run_crossval,
)
from emogait.features import (
    SkeletonSequence,
    describe_all,
    describe_sequence,
    extract_features,
    feature_covariance,
)
from emogait.geometry import (
    SpdMatrix,
    SymMatrix,
    karcher_objective,
    lerm_distance,
    log_euclidean_mean,
    spd_exp,
    spd_log,
)
from emogait.synth import DEFAULT_TORSO_JOINTS, default_gait_params, generate_dataset

from oracles import brute_confusion, random_symmetric, rotation_matrix, two_pass_covariance


def _pass(number, name):
    print(f"ACCEPTANCE {number} ({name}): PASS")


def _spd_sample(rng, n, max_cond=1e6):
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    q = q * np.sign(np.diag(r))
    cond = 10.0 ** rng.uniform(0.0, np.log10(max_cond))
    if n == 1:
        lam = np.array([rng.uniform(0.5, 2.0)])
    else:
        lam = np.exp(np.linspace(0.0, -np.log(cond), n)) * rng.uniform(0.5, 2.0)
    m = (q * lam) @ q.T
    return SpdMatrix(0.5 * (m + m.T))


@pytest.fixture(scope="module")
def spd_samples():
    """500 random SPD matrices over dims 2, 6 and 20, condition <= 1e6."""
    rng = np.random.default_rng(90125)
    samples = {}
    for dim, count in ((2, 167), (6, 167), (20, 166)):
        samples[dim] = [_spd_sample(rng, dim) for _ in range(count)]
    return samples


def test_criterion_1_metric_axioms(spd_samples):
    start = time.perf_counter()
    rng = np.random.default_rng(1)
    for dim, mats in spd_samples.items():
        n = len(mats)
        for m in mats:
            assert lerm_distance(m, m) <= 1e-10
        for _ in range(n):
            i, j, k = rng.integers(n, size=3)
            a, b, c = mats[i], mats[j], mats[k]
            assert lerm_distance(a, b) == lerm_distance(b, a)
            assert lerm_distance(a, c) <= (
                lerm_distance(a, b) + lerm_distance(b, c) + 1e-9
            )
    elapsed = time.perf_counter() - start
    assert elapsed < 10.0, f"metric axiom suite took {elapsed:.1f}s"
    _pass(1, "metric axioms")


def test_criterion_2_log_exp_round_trip(spd_samples):
    for mats in spd_samples.values():
        for m in mats:
            back = spd_exp(spd_log(m)).values
            rel = np.linalg.norm(back - m.values) / np.linalg.norm(m.values)
            assert rel <= 1e-9
    _pass(2, "log/exp round trip")


def test_criterion_3_mean_optimality():
    rng = np.random.default_rng(31337)
    deltas = (1e-3, 1e-2, 1e-1)
    violations = 0
    for _ in range(50):
        dim = int(rng.integers(2, 7))
        size = int(rng.integers(3, 11))
        mats = [_spd_sample(rng, dim, max_cond=1e3) for _ in range(size)]
        mean = log_euclidean_mean(mats)
        best = karcher_objective(mean, mats)
        mean_log = spd_log(mean).values
        for i in range(100):
            w = random_symmetric(rng, dim)
            w /= np.linalg.norm(w)
            delta = deltas[i % len(deltas)]
            candidate = spd_exp(SymMatrix(mean_log + delta * w))
            if best > karcher_objective(candidate, mats):
                violations += 1
    assert violations == 0
    _pass(3, "closed-form mean optimality")


def test_criterion_4_hand_covariance_oracle():
    seq = SkeletonSequence(
        n_joints=1,
        fps=100.0,
        frames=np.array([[0, 0, 0], [1, 0, 0], [2, 0, 0]], dtype=float),
    )
    feats = extract_features(seq)
    raw = feature_covariance(feats)
    oracle = two_pass_covariance(feats.vectors)
    assert np.array_equal(raw, oracle)
    assert raw[0, 0] == 1.0
    assert raw[0, 3] == 0.5 and raw[3, 0] == 0.5
    assert raw[3, 3] == pytest.approx(1.0 / 3.0, rel=1e-15)
    mask = np.ones((6, 6), dtype=bool)
    mask[np.ix_([0, 3], [0, 3])] = False
    assert (raw[mask] == 0).all()
    _pass(4, "hand covariance oracle")


def test_criterion_5_invariances():
    params = default_gait_params(seed=5, n_joints=43, fps=60.0, duration=2.0)
    seq = generate_dataset(params, 1, 1)[0]
    base = describe_sequence(seq, DEFAULT_TORSO_JOINTS, 1e-9)
    pos = seq.frames.reshape(seq.n_frames, seq.n_joints, 3)

    def moved(rotation, translation):
        frames = (pos @ np.asarray(rotation).T + translation).reshape(
            seq.n_frames, -1
        )
        return SkeletonSequence(n_joints=seq.n_joints, fps=seq.fps, frames=frames)

    shifted = describe_sequence(
        moved(np.eye(3), np.array([15.0, -4.0, 2.5])), DEFAULT_TORSO_JOINTS, 1e-9
    )
    assert np.abs(shifted.covariance.values - base.covariance.values).max() <= 1e-10

    rng = np.random.default_rng(55)
    for _ in range(5):
        rotation = rotation_matrix(rng.standard_normal(3), rng.uniform(0, 2 * np.pi))
        translation = rng.uniform(-10, 10, 3)
        rigid = describe_sequence(
            moved(rotation, translation), DEFAULT_TORSO_JOINTS, 1e-9
        )
        err = np.linalg.norm(rigid.covariance.values - base.covariance.values)
        assert err <= 1e-8
    _pass(5, "translation and rigid-motion invariance")


@pytest.fixture(scope="module")
def end_to_end_runs():
    """LOSO runs of all three classifier configs on five generator seeds."""
    runs = []
    start = time.perf_counter()
    for seed in range(5):
        params = default_gait_params(seed=seed)
        sequences = generate_dataset(params, 8, 4)
        descriptors = describe_all(sequences, DEFAULT_TORSO_JOINTS)
        data = [
            LabeledDescriptor(descriptor=d, label=s.label, subject_id=s.subject_id)
            for d, s in zip(descriptors, sequences)
        ]
        reports = {
            name: run_crossval(data, config)
            for name, config in (
                ("prototype_lerm", ClassifierConfig("prototype", "lerm")),
                ("knn_lerm", ClassifierConfig("knn", "lerm", 1)),
                ("knn_frobenius", ClassifierConfig("knn", "frobenius", 1)),
            )
        }
        runs.append((seed, data, reports))
    return runs, time.perf_counter() - start


def test_criterion_6_end_to_end_synthetic_loso(end_to_end_runs):
    runs, elapsed = end_to_end_runs
    assert len(runs) == 5
    for seed, _, reports in runs:
        proto = reports["prototype_lerm"].average_accuracy
        knn_lerm = reports["knn_lerm"].average_accuracy
        knn_fro = reports["knn_frobenius"].average_accuracy
        assert proto >= 0.90, f"seed {seed}: prototype accuracy {proto:.4f}"
        assert proto >= knn_lerm >= knn_fro, (
            f"seed {seed}: ordering violated "
            f"({proto:.4f} vs {knn_lerm:.4f} vs {knn_fro:.4f})"
        )
    assert elapsed < 120.0, f"end-to-end suite took {elapsed:.1f}s"
    _pass(6, f"end-to-end synthetic LOSO ({elapsed:.0f}s for 5 seeds)")


def test_criterion_7_aggregation_oracle(end_to_end_runs):
    runs, _ = end_to_end_runs
    for seed, data, reports in runs[:2]:
        for name, report in reports.items():
            config = report.config
            plan = plan_loso(data)
            pairs = []
            for fold in plan.folds:
                train = [data[i] for i in fold.train_ids]
                test = [data[i] for i in fold.test_ids]
                if config.mode == "prototype":
                    pems = build_prototypes(train)
                    preds = [
                        classify_prototype(
                            item.descriptor.covariance, pems, config.metric
                        )[0]
                        for item in test
                    ]
                else:
                    preds = [
                        classify_knn(
                            item.descriptor.covariance, train, config.k, config.metric
                        )
                        for item in test
                    ]
                pairs.extend(
                    (item.label, pred) for item, pred in zip(test, preds)
                )
            expected = brute_confusion(report.labels, pairs)
            assert np.array_equal(report.overall.counts, expected)
            pooled = aggregate_confusions(report.per_fold)
            assert np.array_equal(pooled.counts, report.overall.counts)
    _pass(7, "pooled aggregation equals concatenated predictions")


def test_criterion_8_cli_determinism(tmp_path):
    out = tmp_path / "data"
    synth_args = [
        sys.executable, "-m", "emogait", "synth",
        "--out", str(out), "--seed", "3",
        "--n-joints", "9", "--fps", "60", "--duration", "1.5",
        "--subjects", "3", "--reps", "2",
    ]
    proc = subprocess.run(synth_args, capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    manifest = out / "manifest.json"

    outputs = []
    stdouts = []
    for i, parallel in enumerate(("1", "1", "4")):
        report = tmp_path / f"report{i}.json"
        proc = subprocess.run(
            [
                sys.executable, "-m", "emogait", "crossval",
                "--manifest", str(manifest), "--mode", "prototype",
                "--metric", "lerm", "--parallel", parallel,
                "--out", str(report),
            ],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0, proc.stderr
        outputs.append(report.read_bytes())
        stdouts.append(proc.stdout)
    assert outputs[0] == outputs[1] == outputs[2]
    assert stdouts[0] == stdouts[1] == stdouts[2]
    _pass(8, "byte-identical crossval reports, parallel included")


def test_criterion_9_report_shape_and_averaging_convention(end_to_end_runs):
    runs, _ = end_to_end_runs
    report = runs[0][2]["prototype_lerm"]
    text = render_report(report)
    lines = text.splitlines()
    assert lines[0].split() == ["Anger", "Fear", "Joy", "Neutral", "Sadness"]
    for i, label in enumerate(("Anger", "Fear", "Joy", "Neutral", "Sadness")):
        row = lines[1 + i].split()
        assert row[0] == label
        assert sum(float(x) for x in row[1:]) == pytest.approx(100.0, abs=1e-6)

    reference_diagonal = [0.7931, 0.6786, 0.5806, 0.8182, 0.6857]
    macro = 100.0 * macro_average_accuracy(reference_diagonal)
    assert macro == pytest.approx(71.12, abs=0.01)
    _pass(9, "report shape and macro-averaging convention")
