"""Parsing and serialization of all on-disk artifacts.

Formats (all plain text except descriptor matrices):

frame file
    One frame per line, comma-separated x,y,z triples per joint.  Lines
    starting with ``#`` are comments; a first non-comment line that does
    not parse as numbers is treated as a column header.  Floats are
    written with shortest round-trip precision, so save/load is exact.
manifest (JSON)
    ``{"format": "emogait.manifest", "version": 1, "torso_joints": [...],
    "label_set": [...], "entries": [{"path", "subject_id", "label",
    "fps", "n_joints"}, ...]}``.  Entry paths are resolved relative to the
    manifest's directory.
prototype model (JSON)
    Label set, matrix dimension, metric identifier and one full-precision
    matrix per label.
descriptor set (JSON + .npy)
    A JSON index (ids, subjects, labels, windows) next to a single ``.npy``
    stack holding the matrices, which would be unwieldy as text.
report (JSON)
    Per-fold and pooled confusion counts, rates, accuracies, flags and the
    classifier configuration; keys are sorted so identical runs produce
    identical bytes.

Every loader validates a ``format``/``version`` pair and raises
:class:`SchemaVersionError` on anything it does not understand; malformed
content raises :class:`ParseError` (or a subclass) carrying the location.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .classify import PrototypeSet
from .errors import (
    JointCountMismatchError,
    NonFiniteValueError,
    ParseError,
    SchemaVersionError,
)
from .evaluate import EvalReport
from .features import MotionDescriptor, SkeletonSequence
from .geometry import SpdMatrix

MANIFEST_FORMAT = ("emogait.manifest", 1)
MODEL_FORMAT = ("emogait.prototypes", 1)
DESCRIPTORS_FORMAT = ("emogait.descriptors", 1)
REPORT_FORMAT = ("emogait.report", 1)


def _check_format(doc: dict, expected: tuple[str, int], path) -> None:
    fmt = doc.get("format")
    version = doc.get("version")
    if fmt != expected[0] or version != expected[1]:
        raise SchemaVersionError(
            f"{path}: expected format {expected[0]!r} version {expected[1]}, "
            f"found {fmt!r} version {version!r}"
        )


def _load_json(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"invalid JSON: {exc.msg}", path=path, line=exc.lineno, column=exc.colno
        ) from None


def _dump_json(doc: dict, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# Frame files


def load_sequence(
    path, fps: float, n_joints: int, subject_id: str = "", label: str | None = None
) -> SkeletonSequence:
    """Parse a frame file into a sequence.

    Raises
    ------
    ParseError
        On an unparseable token (with line and column).
    JointCountMismatchError
        When a line does not hold exactly ``3 * n_joints`` values.
    NonFiniteValueError
        When a parsed value is NaN or infinite.
    """
    rows = []
    expected = 3 * n_joints
    header_allowed = True
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            tokens = [tok.strip() for tok in text.split(",")]
            values = []
            bad_column = None
            for col, tok in enumerate(tokens, start=1):
                try:
                    values.append(float(tok))
                except ValueError:
                    bad_column = col
                    break
            if bad_column is not None:
                if header_allowed:
                    header_allowed = False  # one leading header line is fine
                    continue
                raise ParseError(
                    f"cannot parse {tokens[bad_column - 1]!r} as a number",
                    path=path,
                    line=lineno,
                    column=bad_column,
                )
            header_allowed = False
            if len(values) != expected:
                raise JointCountMismatchError(
                    f"expected {expected} coordinates "
                    f"(3 x {n_joints} joints), found {len(values)}",
                    path=path,
                    line=lineno,
                )
            for col, value in enumerate(values, start=1):
                if not math.isfinite(value):
                    raise NonFiniteValueError(
                        "coordinate is not finite", path=path, line=lineno, column=col
                    )
            rows.append(values)
    if len(rows) < 2:
        raise ParseError(
            f"sequence needs at least two frames, found {len(rows)}", path=path
        )
    return SkeletonSequence(
        n_joints=n_joints,
        fps=fps,
        frames=np.array(rows, dtype=np.float64),
        subject_id=subject_id,
        label=label,
    )


def save_sequence(seq: SkeletonSequence, path) -> None:
    """Write a frame file (shortest round-trip float formatting)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# emogait frames: n_joints={seq.n_joints} fps={seq.fps!r}\n")
        for row in seq.frames:
            fh.write(",".join(repr(float(v)) for v in row))
            fh.write("\n")


# ---------------------------------------------------------------------------
# Manifests


@dataclass(frozen=True)
class ManifestEntry:
    path: Path
    subject_id: str
    label: str
    fps: float
    n_joints: int


@dataclass(frozen=True)
class DatasetManifest:
    entries: tuple[ManifestEntry, ...]
    torso_joints: tuple[int, ...]
    label_set: tuple[str, ...]


def load_manifest(path) -> DatasetManifest:
    """Load and validate a dataset manifest.

    Raises
    ------
    ParseError
        On missing fields, unknown labels, inconsistent joint counts or
        unresolvable sequence paths.
    """
    doc = _load_json(path)
    _check_format(doc, MANIFEST_FORMAT, path)
    base = Path(path).resolve().parent
    try:
        label_set = tuple(doc["label_set"])
        torso_joints = tuple(int(j) for j in doc["torso_joints"])
        raw_entries = doc["entries"]
    except KeyError as exc:
        raise ParseError(f"missing manifest field {exc}", path=path) from None
    if not raw_entries:
        raise ParseError("manifest has no entries", path=path)
    entries = []
    joint_counts = set()
    for i, raw in enumerate(raw_entries):
        try:
            entry = ManifestEntry(
                path=base / raw["path"],
                subject_id=str(raw["subject_id"]),
                label=str(raw["label"]),
                fps=float(raw["fps"]),
                n_joints=int(raw["n_joints"]),
            )
        except KeyError as exc:
            raise ParseError(
                f"entry {i}: missing field {exc}", path=path
            ) from None
        if entry.label not in label_set:
            raise ParseError(
                f"entry {i} ({raw.get('path')}): label {entry.label!r} "
                f"is not in the manifest label_set",
                path=path,
            )
        if not entry.path.exists():
            raise ParseError(
                f"entry {i}: sequence file {entry.path} does not exist", path=path
            )
        joint_counts.add(entry.n_joints)
        entries.append(entry)
    if len(joint_counts) != 1:
        raise ParseError(
            f"entries disagree on n_joints: {sorted(joint_counts)}", path=path
        )
    n_joints = joint_counts.pop()
    if torso_joints and (min(torso_joints) < 0 or max(torso_joints) >= n_joints):
        raise ParseError("torso joint index out of range", path=path)
    return DatasetManifest(
        entries=tuple(entries),
        torso_joints=torso_joints,
        label_set=label_set,
    )


def save_manifest(manifest: DatasetManifest, path) -> None:
    """Write a manifest; entry paths are stored relative to it."""
    base = Path(path).resolve().parent
    entries = []
    for entry in manifest.entries:
        p = Path(entry.path)
        try:
            rel = p.resolve().relative_to(base)
        except ValueError:
            rel = p
        entries.append(
            {
                "path": rel.as_posix(),
                "subject_id": entry.subject_id,
                "label": entry.label,
                "fps": entry.fps,
                "n_joints": entry.n_joints,
            }
        )
    _dump_json(
        {
            "format": MANIFEST_FORMAT[0],
            "version": MANIFEST_FORMAT[1],
            "label_set": list(manifest.label_set),
            "torso_joints": list(manifest.torso_joints),
            "entries": entries,
        },
        path,
    )


def load_sequences(manifest: DatasetManifest) -> list[SkeletonSequence]:
    """Load every entry of a manifest, labels and subjects attached."""
    return [
        load_sequence(
            entry.path,
            fps=entry.fps,
            n_joints=entry.n_joints,
            subject_id=entry.subject_id,
            label=entry.label,
        )
        for entry in manifest.entries
    ]


# ---------------------------------------------------------------------------
# Prototype models


def save_model(pems: PrototypeSet, path) -> None:
    """Serialize a prototype set with full float precision."""
    _dump_json(
        {
            "format": MODEL_FORMAT[0],
            "version": MODEL_FORMAT[1],
            "metric_id": pems.metric_id,
            "dim": pems.dim,
            "labels": list(pems.labels),
            "prototypes": {
                label: pems.prototypes[label].values.tolist()
                for label in pems.labels
            },
        },
        path,
    )


def load_model(path) -> PrototypeSet:
    """Load a prototype set; inverse of :func:`save_model`."""
    doc = _load_json(path)
    _check_format(doc, MODEL_FORMAT, path)
    try:
        labels = list(doc["labels"])
        matrices = doc["prototypes"]
        dim = int(doc["dim"])
        metric_id = str(doc["metric_id"])
    except KeyError as exc:
        raise ParseError(f"missing model field {exc}", path=path) from None
    prototypes = {}
    for label in labels:
        if label not in matrices:
            raise ParseError(f"no matrix stored for label {label!r}", path=path)
        mat = np.array(matrices[label], dtype=np.float64)
        if mat.shape != (dim, dim):
            raise ParseError(
                f"label {label!r}: expected a {dim}x{dim} matrix, "
                f"got shape {mat.shape}",
                path=path,
            )
        prototypes[label] = SpdMatrix(mat)
    return PrototypeSet(prototypes=prototypes, metric_id=metric_id)


# ---------------------------------------------------------------------------
# Descriptor sets


def save_descriptors(descriptors, labels, subjects, path) -> None:
    """Write labeled descriptors as a JSON index plus a .npy matrix stack."""
    descriptors = list(descriptors)
    labels = list(labels)
    subjects = list(subjects)
    if not (len(descriptors) == len(labels) == len(subjects)):
        raise ValueError("descriptors, labels and subjects must align")
    if not descriptors:
        raise ValueError("nothing to save")
    path = Path(path)
    matrices_path = path.with_suffix(".npy")
    stack = np.stack([d.covariance.values for d in descriptors])
    np.save(matrices_path, stack)
    _dump_json(
        {
            "format": DESCRIPTORS_FORMAT[0],
            "version": DESCRIPTORS_FORMAT[1],
            "dim": int(stack.shape[1]),
            "matrices_path": matrices_path.name,
            "items": [
                {
                    "source_id": d.source_id,
                    "subject_id": subject,
                    "label": label,
                    "window": list(d.window),
                }
                for d, label, subject in zip(descriptors, labels, subjects)
            ],
        },
        path,
    )


def load_descriptors(path):
    """Load a descriptor set; returns (descriptors, labels, subjects)."""
    doc = _load_json(path)
    _check_format(doc, DESCRIPTORS_FORMAT, path)
    path = Path(path)
    try:
        items = doc["items"]
        dim = int(doc["dim"])
        matrices_path = path.parent / doc["matrices_path"]
    except KeyError as exc:
        raise ParseError(f"missing descriptor field {exc}", path=path) from None
    stack = np.load(matrices_path)
    if stack.shape != (len(items), dim, dim):
        raise ParseError(
            f"matrix stack shape {stack.shape} does not match index "
            f"({len(items)} items of dim {dim})",
            path=path,
        )
    descriptors, labels, subjects = [], [], []
    for item, mat in zip(items, stack):
        descriptors.append(
            MotionDescriptor(
                covariance=SpdMatrix(mat),
                source_id=str(item.get("source_id", "")),
                window=tuple(item.get("window", (0, 0))),
            )
        )
        labels.append(str(item["label"]))
        subjects.append(str(item["subject_id"]))
    return descriptors, labels, subjects


# ---------------------------------------------------------------------------
# Reports


def report_to_dict(report: EvalReport) -> dict:
    return {
        "format": REPORT_FORMAT[0],
        "version": REPORT_FORMAT[1],
        "labels": list(report.labels),
        "config": {
            "mode": report.config.mode,
            "metric": report.config.metric,
            "k": report.config.k,
        },
        "folds": [
            {
                "held_out_subject": subject,
                "counts": cm.counts.tolist(),
            }
            for subject, cm in zip(report.fold_subjects, report.per_fold)
        ],
        "overall_counts": report.overall.counts.tolist(),
        "overall_rates": report.overall.rates.tolist(),
        "average_accuracy": report.average_accuracy,
        "per_class_accuracy": {
            label: report.per_class_accuracy[label] for label in report.labels
        },
        "flagged_folds": [
            {
                "held_out_subject": flag.held_out_subject,
                "missing_labels": list(flag.missing_labels),
            }
            for flag in report.flagged_folds
        ],
    }


def save_report(report: EvalReport, path) -> None:
    """Write the machine-readable report (sorted keys, stable bytes)."""
    _dump_json(report_to_dict(report), path)
