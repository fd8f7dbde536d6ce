"""Prototype and k-NN classification of covariance descriptors.

Each emotion class is summarized by a prototype matrix, the log-Euclidean
mean of that class's training descriptors.  Unknown descriptors are
assigned the label of the nearest prototype, or the majority label among
their k nearest training descriptors.  The distance is a closed choice
between the log-Euclidean metric and the Frobenius baseline.

Every tie is broken deterministically: distance ties lexicographically by
label (prototypes) or by training index (k-NN), vote ties by
lexicographically smallest label.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .errors import DimensionMismatchError, EmptyInputError, KTooLargeError
from .features import MotionDescriptor
from .geometry import (
    SpdMatrix,
    as_spd,
    frobenius_distance,
    lerm_distance,
    log_euclidean_mean,
)

DEFAULT_LABELS = ("anger", "fear", "joy", "neutral", "sadness")

METRICS = {"lerm": lerm_distance, "frobenius": frobenius_distance}


def resolve_metric(name: str):
    """Distance function for a metric name in the closed set {lerm, frobenius}."""
    try:
        return METRICS[name]
    except KeyError:
        raise ValueError(
            f"unknown metric {name!r}; expected one of {sorted(METRICS)}"
        ) from None


@dataclass(frozen=True)
class LabeledDescriptor:
    """A training or test descriptor with its emotion label and subject."""

    descriptor: MotionDescriptor
    label: str
    subject_id: str

    def __post_init__(self):
        if not self.label:
            raise ValueError("label must be nonempty")
        if not self.subject_id:
            raise ValueError("subject_id must be nonempty")


@dataclass(frozen=True)
class PrototypeSet:
    """One prototype matrix per emotion label."""

    prototypes: dict[str, SpdMatrix]
    metric_id: str = "lerm"

    def __post_init__(self):
        if not self.prototypes:
            raise EmptyInputError("a prototype set needs at least one label")
        dims = {p.dim for p in self.prototypes.values()}
        if len(dims) != 1:
            raise DimensionMismatchError(
                f"prototypes have mixed dimensions {sorted(dims)}"
            )

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(sorted(self.prototypes))

    @property
    def dim(self) -> int:
        return next(iter(self.prototypes.values())).dim


def build_prototypes(train) -> PrototypeSet:
    """Per-label log-Euclidean means of the training descriptors.

    Raises
    ------
    EmptyInputError
        If ``train`` is empty.
    DimensionMismatchError
        If descriptors do not share one dimension.
    """
    train = list(train)
    if not train:
        raise EmptyInputError("cannot build prototypes from an empty training set")
    groups: dict[str, list[SpdMatrix]] = {}
    for item in train:
        groups.setdefault(item.label, []).append(item.descriptor.covariance)
    prototypes = {
        label: log_euclidean_mean(groups[label]) for label in sorted(groups)
    }
    return PrototypeSet(prototypes=prototypes, metric_id="lerm")


def classify_prototype(
    c, pems: PrototypeSet, metric: str = "lerm"
) -> tuple[str, list[tuple[str, float]]]:
    """Label of the nearest prototype plus the full ranked distance list.

    The ranking sorts by distance, then label, so equidistant prototypes
    resolve to the lexicographically smaller label.
    """
    c = as_spd(c)
    if c.dim != pems.dim:
        raise DimensionMismatchError(
            f"descriptor dim {c.dim} does not match prototype dim {pems.dim}"
        )
    dist = resolve_metric(metric)
    ranked = sorted(
        ((dist(c, p), label) for label, p in pems.prototypes.items()),
        key=lambda t: (t[0], t[1]),
    )
    return ranked[0][1], [(label, d) for d, label in ranked]


def classify_knn(c, train, k: int = 1, metric: str = "lerm") -> str:
    """Majority label among the k nearest training descriptors.

    Distance ties are broken by training-set index, vote ties by
    lexicographically smallest label.

    Raises
    ------
    EmptyInputError
        If ``train`` is empty.
    KTooLargeError
        If ``k`` exceeds the training-set size.
    """
    train = list(train)
    if not train:
        raise EmptyInputError("k-NN needs a nonempty training set")
    if k < 1:
        raise ValueError("k must be at least 1")
    if k > len(train):
        raise KTooLargeError(f"k={k} exceeds {len(train)} training descriptors")
    c = as_spd(c)
    dist = resolve_metric(metric)
    scored = [
        (dist(c, item.descriptor.covariance), index, item.label)
        for index, item in enumerate(train)
    ]
    scored.sort(key=lambda t: (t[0], t[1]))
    votes = Counter(label for _, _, label in scored[:k])
    best = max(votes.values())
    return min(label for label, n in votes.items() if n == best)
