"""Leave-one-subject-out cross-validation and confusion-matrix reporting.

Each fold holds out every sequence of one subject and trains on the rest.
Per-fold confusion matrices are aggregated by pooling raw counts and then
row-normalizing, which is exactly test-size-weighted averaging of the
per-fold rates.  The headline number is the macro average: the unweighted
mean of the diagonal rates of the pooled matrix.

A fold whose training half misses a label present in its test half is not
skipped; it runs against the remaining classes and is flagged on the
report.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .classify import (
    build_prototypes,
    classify_knn,
    classify_prototype,
    resolve_metric,
)
from .errors import LabelMismatchError, SingleSubjectError


@dataclass(frozen=True)
class Fold:
    held_out_subject: str
    test_ids: tuple[int, ...]
    train_ids: tuple[int, ...]


@dataclass(frozen=True)
class FoldPlan:
    folds: tuple[Fold, ...]


def plan_loso(dataset) -> FoldPlan:
    """One fold per distinct subject, in sorted subject order.

    Raises
    ------
    SingleSubjectError
        If the dataset holds fewer than two distinct subjects.
    """
    dataset = list(dataset)
    subjects = sorted({item.subject_id for item in dataset})
    if len(subjects) < 2:
        raise SingleSubjectError(
            "leave-one-subject-out needs at least two subjects"
        )
    folds = []
    for subject in subjects:
        test = tuple(
            i for i, item in enumerate(dataset) if item.subject_id == subject
        )
        train = tuple(
            i for i, item in enumerate(dataset) if item.subject_id != subject
        )
        folds.append(
            Fold(held_out_subject=subject, test_ids=test, train_ids=train)
        )
    return FoldPlan(folds=tuple(folds))


@dataclass(frozen=True)
class ConfusionMatrix:
    """Raw counts (rows = true, columns = predicted) plus row rates.

    ``rates`` rows sum to one except for labels with no test samples,
    which stay all-zero and are listed in :attr:`empty_rows`.
    """

    labels: tuple[str, ...]
    counts: np.ndarray

    def __post_init__(self):
        labels = tuple(self.labels)
        counts = np.ascontiguousarray(self.counts, dtype=np.int64)
        e = len(labels)
        if e == 0:
            raise ValueError("labels must be nonempty")
        if counts.shape != (e, e):
            raise ValueError(f"counts must have shape ({e}, {e})")
        if (counts < 0).any():
            raise ValueError("counts must be nonnegative")
        if counts.flags.writeable:
            counts = counts.copy()
            counts.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "counts", counts)

    @classmethod
    def from_pairs(cls, labels, pairs) -> "ConfusionMatrix":
        """Build from (true_label, predicted_label) pairs."""
        labels = tuple(labels)
        index = {label: i for i, label in enumerate(labels)}
        counts = np.zeros((len(labels), len(labels)), dtype=np.int64)
        for true, pred in pairs:
            counts[index[true], index[pred]] += 1
        return cls(labels=labels, counts=counts)

    @property
    def rates(self) -> np.ndarray:
        sums = self.counts.sum(axis=1, keepdims=True)
        out = np.zeros(self.counts.shape, dtype=np.float64)
        np.divide(self.counts, sums, out=out, where=sums > 0)
        return out

    @property
    def empty_rows(self) -> tuple[str, ...]:
        sums = self.counts.sum(axis=1)
        return tuple(
            label for label, s in zip(self.labels, sums) if s == 0
        )

    @property
    def n_samples(self) -> int:
        return int(self.counts.sum())


def aggregate_confusions(per_fold) -> ConfusionMatrix:
    """Pool raw counts across folds (test-size-weighted rate averaging).

    Raises
    ------
    LabelMismatchError
        If the folds do not share one label ordering.
    """
    mats = list(per_fold)
    if not mats:
        raise LabelMismatchError("no confusion matrices to aggregate")
    labels = mats[0].labels
    for m in mats[1:]:
        if m.labels != labels:
            raise LabelMismatchError(
                f"label order {m.labels} differs from {labels}"
            )
    total = np.zeros((len(labels), len(labels)), dtype=np.int64)
    for m in mats:
        total += m.counts
    return ConfusionMatrix(labels=labels, counts=total)


def macro_average_accuracy(diagonal_rates) -> float:
    """Unweighted mean of per-class positive rates (macro average)."""
    rates = [float(r) for r in diagonal_rates]
    if not rates:
        raise ValueError("no per-class rates to average")
    return sum(rates) / len(rates)


@dataclass(frozen=True)
class ClassifierConfig:
    """Cross-validation classifier selection."""

    mode: str = "prototype"
    metric: str = "lerm"
    k: int = 1

    def __post_init__(self):
        if self.mode not in ("prototype", "knn"):
            raise ValueError(f"unknown mode {self.mode!r}")
        resolve_metric(self.metric)
        if self.k < 1:
            raise ValueError("k must be at least 1")


@dataclass(frozen=True)
class FoldFlag:
    """A fold whose training half lacked labels present in its test half."""

    held_out_subject: str
    missing_labels: tuple[str, ...]


@dataclass(frozen=True)
class EvalReport:
    """Cross-validation outcome in the shape used for reporting."""

    labels: tuple[str, ...]
    per_fold: tuple[ConfusionMatrix, ...]
    fold_subjects: tuple[str, ...]
    overall: ConfusionMatrix
    average_accuracy: float
    per_class_accuracy: dict[str, float]
    config: ClassifierConfig
    flagged_folds: tuple[FoldFlag, ...] = field(default=())


def _run_fold(dataset, fold: Fold, config: ClassifierConfig, labels):
    train = [dataset[i] for i in fold.train_ids]
    test = [dataset[i] for i in fold.test_ids]
    train_subjects = {item.subject_id for item in train}
    test_subjects = {item.subject_id for item in test}
    if train_subjects & test_subjects:
        raise AssertionError("subject leaked between train and test")
    train_labels = {item.label for item in train}
    missing = tuple(
        sorted({item.label for item in test} - train_labels)
    )
    if config.mode == "prototype":
        pems = build_prototypes(train)
        preds = [
            classify_prototype(item.descriptor.covariance, pems, config.metric)[0]
            for item in test
        ]
    else:
        preds = [
            classify_knn(
                item.descriptor.covariance, train, config.k, config.metric
            )
            for item in test
        ]
    pairs = [(item.label, pred) for item, pred in zip(test, preds)]
    return ConfusionMatrix.from_pairs(labels, pairs), missing


def run_crossval(
    dataset,
    config: ClassifierConfig,
    labels=None,
    *,
    max_workers: int = 1,
) -> EvalReport:
    """Leave-one-subject-out evaluation of the configured classifier.

    ``labels`` fixes the confusion-matrix ordering; by default the sorted
    set of labels present in the dataset.  ``max_workers`` > 1 evaluates
    folds concurrently; results are aggregated in canonical fold order, so
    parallelism never changes any number.
    """
    dataset = list(dataset)
    if labels is None:
        labels = sorted({item.label for item in dataset})
    labels = tuple(labels)
    dataset_labels = {item.label for item in dataset}
    unknown = dataset_labels - set(labels)
    if unknown:
        raise LabelMismatchError(f"dataset labels {sorted(unknown)} not in label set")

    plan = plan_loso(dataset)

    def one(fold):
        return _run_fold(dataset, fold, config, labels)

    if max_workers > 1 and len(plan.folds) > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            results = list(pool.map(one, plan.folds))
    else:
        results = [one(fold) for fold in plan.folds]

    per_fold = tuple(cm for cm, _ in results)
    flagged = tuple(
        FoldFlag(held_out_subject=fold.held_out_subject, missing_labels=missing)
        for fold, (_, missing) in zip(plan.folds, results)
        if missing
    )
    overall = aggregate_confusions(per_fold)
    rates = overall.rates
    per_class = {
        label: float(rates[i, i]) for i, label in enumerate(labels)
    }
    return EvalReport(
        labels=labels,
        per_fold=per_fold,
        fold_subjects=tuple(f.held_out_subject for f in plan.folds),
        overall=overall,
        average_accuracy=macro_average_accuracy(rates.diagonal()),
        per_class_accuracy=per_class,
        config=config,
        flagged_folds=flagged,
    )


def render_report(report: EvalReport) -> str:
    """Human-readable row-stochastic confusion table plus summary lines."""
    labels = report.labels
    width = max(8, max(len(l) for l in labels) + 1)
    header = " " * width + "".join(f"{l.title():>{width}}" for l in labels)
    lines = [header]
    rates = report.overall.rates
    for i, label in enumerate(labels):
        cells = "".join(f"{100.0 * rates[i, j]:>{width}.2f}" for j in range(len(labels)))
        lines.append(f"{label.title():<{width}}" + cells)
    lines.append("")
    lines.append(
        f"Folds: {len(report.per_fold)} "
        f"(subjects: {', '.join(report.fold_subjects)})"
    )
    lines.append(f"Test samples: {report.overall.n_samples}")
    lines.append(
        f"Average accuracy (macro): {100.0 * report.average_accuracy:.2f}%"
    )
    for flag in report.flagged_folds:
        lines.append(
            f"WARNING: fold {flag.held_out_subject} had no training samples "
            f"for: {', '.join(flag.missing_labels)}"
        )
    return "\n".join(lines) + "\n"
