"""Command-line interface wiring the full pipeline.

Subcommands: ``synth`` (generate a labeled synthetic dataset), ``extract``
(descriptors for a manifest), ``train`` (build prototypes), ``classify``
(label sequences against a model) and ``crossval`` (leave-one-subject-out
evaluation).

Exit status: 0 success, 1 usage error, 2 data error (unreadable or
inconsistent inputs), 3 numeric failure (non-convergence, loss of positive
definiteness, overflow).  Progress lines go to stderr; results go to
stdout and to files, so output is pipeable.  ``EMOGAIT_EPSILON`` overrides
the default regularization strength when ``--epsilon`` is not given.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import dataset_io
from .classify import (
    DEFAULT_LABELS,
    LabeledDescriptor,
    build_prototypes,
    classify_prototype,
)
from .errors import (
    EmogaitError,
    IterationFailure,
    NotPositiveDefiniteError,
)
from .evaluate import ClassifierConfig, render_report, run_crossval
from .features import describe_all
from .synth import DEFAULT_TORSO_JOINTS, default_gait_params, generate_dataset

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3

_NUMERIC_ERRORS = (NotPositiveDefiniteError, IterationFailure, OverflowError)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _log(message: str) -> None:
    print(message, file=sys.stderr)


def _resolve_epsilon(args) -> float | None:
    if args.epsilon is not None:
        return args.epsilon
    env = os.environ.get("EMOGAIT_EPSILON")
    return float(env) if env else None


def _window(args) -> tuple[int, int] | None:
    if args.window_len is None:
        if args.window_start:
            raise UsageError("--window-start requires --window-len")
        return None
    return (args.window_start, args.window_len)


def _load_labeled_descriptors(args):
    """Manifest -> labeled descriptors, honoring epsilon/window/parallel."""
    manifest = dataset_io.load_manifest(args.manifest)
    sequences = dataset_io.load_sequences(manifest)
    _log(f"loaded {len(sequences)} sequences from {args.manifest}")
    descriptors = describe_all(
        sequences,
        manifest.torso_joints,
        _resolve_epsilon(args),
        source_ids=[e.path.name for e in manifest.entries],
        window=_window(args),
        max_workers=getattr(args, "parallel", 1),
    )
    labeled = [
        LabeledDescriptor(descriptor=d, label=e.label, subject_id=e.subject_id)
        for d, e in zip(descriptors, manifest.entries)
    ]
    return manifest, labeled


def cmd_synth(args) -> int:
    params = default_gait_params(
        seed=args.seed,
        noise_sigma=args.noise_sigma,
        n_joints=args.n_joints,
        fps=args.fps,
        duration=args.duration,
    )
    sequences = generate_dataset(params, args.subjects, args.reps)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    entries = []
    counters: dict[tuple[str, str], int] = {}
    for seq in sequences:
        key = (seq.subject_id, seq.label)
        rep = counters.get(key, 0)
        counters[key] = rep + 1
        name = f"{seq.subject_id}_{seq.label}_r{rep}.csv"
        dataset_io.save_sequence(seq, out / name)
        entries.append(
            dataset_io.ManifestEntry(
                path=out / name,
                subject_id=seq.subject_id,
                label=seq.label,
                fps=params.fps,
                n_joints=params.n_joints,
            )
        )
    manifest = dataset_io.DatasetManifest(
        entries=tuple(entries),
        torso_joints=DEFAULT_TORSO_JOINTS,
        label_set=DEFAULT_LABELS,
    )
    manifest_path = out / "manifest.json"
    dataset_io.save_manifest(manifest, manifest_path)
    _log(f"wrote {len(sequences)} sequences and {manifest_path}")
    print(manifest_path)
    return EXIT_OK


def cmd_extract(args) -> int:
    _, labeled = _load_labeled_descriptors(args)
    dataset_io.save_descriptors(
        [item.descriptor for item in labeled],
        [item.label for item in labeled],
        [item.subject_id for item in labeled],
        args.out,
    )
    _log(f"wrote {len(labeled)} descriptors to {args.out}")
    return EXIT_OK


def cmd_train(args) -> int:
    if args.descriptors:
        descriptors, labels, subjects = dataset_io.load_descriptors(args.descriptors)
        labeled = [
            LabeledDescriptor(descriptor=d, label=l, subject_id=s)
            for d, l, s in zip(descriptors, labels, subjects)
        ]
    else:
        _, labeled = _load_labeled_descriptors(args)
    pems = build_prototypes(labeled)
    dataset_io.save_model(pems, args.out)
    _log(f"wrote prototypes for {len(pems.labels)} labels to {args.out}")
    return EXIT_OK


def cmd_classify(args) -> int:
    pems = dataset_io.load_model(args.model)
    manifest = dataset_io.load_manifest(args.manifest)
    sequences = dataset_io.load_sequences(manifest)
    descriptors = describe_all(
        sequences,
        manifest.torso_joints,
        _resolve_epsilon(args),
        source_ids=[e.path.name for e in manifest.entries],
        window=_window(args),
        max_workers=args.parallel,
    )
    results = []
    for entry, descriptor in zip(manifest.entries, descriptors):
        label, ranked = classify_prototype(
            descriptor.covariance, pems, args.metric
        )
        results.append((entry.path.name, label, ranked))
    for name, label, ranked in results:
        distances = " ".join(f"{l}={d:.9g}" for l, d in ranked)
        print(f"{name}\t{label}\t{distances}")
    return EXIT_OK


def cmd_crossval(args) -> int:
    manifest, labeled = _load_labeled_descriptors(args)
    config = ClassifierConfig(
        mode=args.mode, metric=args.metric, k=args.k if args.k else 1
    )
    report = run_crossval(
        labeled,
        config,
        labels=manifest.label_set,
        max_workers=args.parallel,
    )
    text = render_report(report)
    sys.stdout.write(text)
    if args.out:
        dataset_io.save_report(report, args.out)
        _log(f"wrote report to {args.out}")
    return EXIT_OK


def _add_epsilon_window(parser) -> None:
    parser.add_argument(
        "--epsilon",
        type=float,
        default=None,
        help="additive regularization strength (default: scale-aware auto, "
        "or EMOGAIT_EPSILON)",
    )
    parser.add_argument(
        "--window-start", type=int, default=0, help="first frame of the sub-window"
    )
    parser.add_argument(
        "--window-len",
        type=int,
        default=None,
        help="sub-window length in frames (default: whole sequence)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="emogait", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic labeled dataset")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--subjects", type=int, default=8)
    p.add_argument("--reps", type=int, default=4, help="repetitions per label")
    p.add_argument("--noise-sigma", type=float, default=0.01)
    p.add_argument("--n-joints", type=int, default=43)
    p.add_argument("--fps", type=float, default=120.0)
    p.add_argument("--duration", type=float, default=3.0, help="seconds per sequence")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("extract", help="compute descriptors for a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True, help="descriptor set path (.json)")
    p.add_argument("--parallel", type=int, default=1)
    _add_epsilon_window(p)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("train", help="build per-label prototype matrices")
    p.add_argument("--manifest", help="dataset manifest to train on")
    p.add_argument(
        "--descriptors", help="pre-extracted descriptor set (alternative input)"
    )
    p.add_argument("--out", required=True, help="model output path")
    p.add_argument("--parallel", type=int, default=1)
    _add_epsilon_window(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("classify", help="label sequences against a model")
    p.add_argument("--model", required=True)
    p.add_argument("--manifest", required=True, help="sequences to classify")
    p.add_argument("--metric", choices=["lerm", "frobenius"], default="lerm")
    p.add_argument("--parallel", type=int, default=1)
    _add_epsilon_window(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("crossval", help="leave-one-subject-out evaluation")
    p.add_argument("--manifest", required=True)
    p.add_argument("--mode", choices=["prototype", "knn"], default="prototype")
    p.add_argument("--metric", choices=["lerm", "frobenius"], default="lerm")
    p.add_argument("--k", type=int, default=None, help="neighbors (knn mode only)")
    p.add_argument("--out", help="write the JSON report here")
    p.add_argument("--parallel", type=int, default=1)
    _add_epsilon_window(p)
    p.set_defaults(func=cmd_crossval)

    return parser


def _validate(args) -> None:
    if getattr(args, "parallel", 1) < 1:
        raise UsageError("--parallel must be at least 1")
    if getattr(args, "k", None) is not None:
        if args.mode != "knn":
            raise UsageError("--k is only valid with --mode knn")
        if args.k < 1:
            raise UsageError("--k must be at least 1")
    if args.command == "train" and not (args.manifest or args.descriptors):
        raise UsageError("train needs --manifest or --descriptors")
    if getattr(args, "window_start", 0) < 0:
        raise UsageError("--window-start must be nonnegative")
    if getattr(args, "window_len", None) is not None and args.window_len < 2:
        raise UsageError("--window-len must be at least 2")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _validate(args)
        return args.func(args)
    except UsageError as exc:
        _log(f"usage error: {exc}")
        return EXIT_USAGE
    except _NUMERIC_ERRORS as exc:
        _log(f"numeric failure: {exc}")
        return EXIT_NUMERIC
    except (EmogaitError, OSError, ValueError) as exc:
        _log(f"data error: {exc}")
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
