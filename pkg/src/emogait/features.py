"""From raw joint trajectories to covariance descriptors.

A skeleton sequence is turned into per-frame feature vectors by
concatenating normalized joint coordinates with per-frame displacement
(velocity) components, and summarized over the observation window by the
sample covariance of those vectors.  Coordinates are normalized into a
skeleton-centered frame derived from a PCA of the torso joints at the
first frame, which removes the global position and heading of the body.

Velocities are per-frame displacements (no multiplication by the frame
rate), with zero velocity at the first frame; the frame rate is kept as
metadata only.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateTorsoError,
    InvalidWindowError,
    TooFewFramesError,
)
from .geometry import SpdMatrix, SymMatrix, eigh_descending, regularize

# Relative variance below which a torso principal axis counts as collapsed.
_TORSO_RANK_RTOL = 1e-10

# Anchor projections smaller than this fraction of the anchor length give
# no usable sign and trigger the ambient fallback rule.
_SIGN_ANCHOR_RTOL = 1e-6

# Fallback regularization strength when the scale-aware default degenerates
# (an exactly constant sequence has zero covariance trace).
_EPSILON_FALLBACK = 1e-9


@dataclass(frozen=True)
class SkeletonSequence:
    """Time series of 3D joint coordinates.

    ``frames`` has one row per frame holding ``3 * n_joints`` coordinates
    in x,y,z order per joint (meters).  At least two frames are required
    so velocities and sample covariances are defined.
    """

    n_joints: int
    fps: float
    frames: np.ndarray
    subject_id: str = ""
    label: str | None = None

    def __post_init__(self):
        if self.n_joints < 1:
            raise ValueError("n_joints must be positive")
        if not self.fps > 0:
            raise ValueError("fps must be positive")
        frames = np.ascontiguousarray(self.frames, dtype=np.float64)
        if frames.ndim != 2 or frames.shape[1] != 3 * self.n_joints:
            raise ValueError(
                f"frames must have shape (n_frames, {3 * self.n_joints})"
            )
        if frames.shape[0] < 2:
            raise TooFewFramesError("a sequence needs at least two frames")
        if not np.isfinite(frames).all():
            raise ValueError("frame coordinates must be finite")
        if frames is self.frames and frames.flags.writeable:
            frames = frames.copy()
        if frames.flags.writeable:
            frames.setflags(write=False)
        object.__setattr__(self, "frames", frames)

    @property
    def n_frames(self) -> int:
        return self.frames.shape[0]


@dataclass(frozen=True)
class NormalizationFrame:
    """Skeleton-centered coordinate system: origin plus right-handed basis."""

    origin: np.ndarray
    basis: np.ndarray

    def __post_init__(self):
        origin = np.ascontiguousarray(self.origin, dtype=np.float64)
        basis = np.ascontiguousarray(self.basis, dtype=np.float64)
        if origin.shape != (3,) or basis.shape != (3, 3):
            raise ValueError("origin must be length 3 and basis 3x3")
        if float(np.abs(basis.T @ basis - np.eye(3)).max()) > 1e-10:
            raise ValueError("basis is not orthonormal")
        if float(np.linalg.det(basis)) < 0:
            raise ValueError("basis must be right-handed")
        origin.setflags(write=False)
        basis.setflags(write=False)
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "basis", basis)


@dataclass(frozen=True)
class FeatureSequence:
    """Per-frame concatenation of normalized coordinates and velocities.

    Row layout: the first ``3 * n_joints`` entries are coordinates, the
    last ``3 * n_joints`` are per-frame displacements; the first row's
    velocity block is zero.
    """

    n_joints: int
    vectors: np.ndarray

    def __post_init__(self):
        vectors = np.ascontiguousarray(self.vectors, dtype=np.float64)
        if vectors.ndim != 2 or vectors.shape[1] != 6 * self.n_joints:
            raise ValueError(f"vectors must have width {6 * self.n_joints}")
        half = 3 * self.n_joints
        if vectors.shape[0] and np.any(vectors[0, half:] != 0.0):
            raise ValueError("first frame must have a zero velocity block")
        if vectors is self.vectors and vectors.flags.writeable:
            vectors = vectors.copy()
        if vectors.flags.writeable:
            vectors.setflags(write=False)
        object.__setattr__(self, "vectors", vectors)

    @property
    def dim(self) -> int:
        return 6 * self.n_joints

    @property
    def n_frames(self) -> int:
        return self.vectors.shape[0]


@dataclass(frozen=True)
class MotionDescriptor:
    """Covariance descriptor of one sequence window."""

    covariance: SpdMatrix
    source_id: str = ""
    window: tuple[int, int] = field(default=(0, 0))

    @property
    def dim(self) -> int:
        return self.covariance.dim


def torso_frame(seq: SkeletonSequence, torso_joints) -> NormalizationFrame:
    """Skeleton-centered frame from a PCA of torso joints at frame 0.

    The origin is the torso centroid; basis columns are the principal axes
    of the torso point cloud ordered by descending variance, and the third
    axis is the cross product of the first two, forcing a right-handed
    basis.  Axis signs are fixed deterministically by the projection of
    the first torso joint (relative to the centroid) onto each axis; being
    a function of the cloud geometry alone, this keeps the basis
    equivariant under rigid motions, which an ambient-axis sign rule is
    not.  When that projection vanishes the sign falls back to making the
    axis's largest-magnitude component positive.

    Raises
    ------
    DegenerateTorsoError
        If the torso cloud at frame 0 spans less than a plane.
    """
    torso = list(torso_joints)
    if not torso:
        raise ValueError("torso_joints must be nonempty")
    if len(set(torso)) != len(torso):
        raise ValueError("torso_joints must be distinct")
    if min(torso) < 0 or max(torso) >= seq.n_joints:
        raise ValueError("torso joint index out of range")
    pts = seq.frames[0].reshape(seq.n_joints, 3)[torso]
    origin = pts.mean(axis=0)
    centered = pts - origin
    scatter = centered.T @ centered
    pair = eigh_descending(0.5 * (scatter + scatter.T))
    lam = np.maximum(pair.eigenvalues, 0.0)
    if lam[0] <= 0.0 or lam[1] <= _TORSO_RANK_RTOL * lam[0]:
        raise DegenerateTorsoError(
            "torso joints at frame 0 are coincident or collinear"
        )
    anchor = centered[0]
    anchor_norm = float(np.linalg.norm(anchor))
    axes = []
    for i in range(2):
        v = pair.eigenvectors[:, i]
        proj = float(anchor @ v)
        if abs(proj) > _SIGN_ANCHOR_RTOL * anchor_norm:
            if proj < 0:
                v = -v
        elif v[np.argmax(np.abs(v))] < 0:
            v = -v
        axes.append(v)
    axes.append(np.cross(axes[0], axes[1]))
    return NormalizationFrame(origin=origin, basis=np.column_stack(axes))


def extract_features(
    seq: SkeletonSequence, norm: NormalizationFrame | None = None
) -> FeatureSequence:
    """Posture/velocity feature vectors for every frame of a sequence.

    With ``norm`` given, each joint coordinate is mapped to
    ``basis.T @ (x - origin)``; otherwise raw coordinates are used.
    Velocities are finite differences of consecutive (normalized) frames,
    zero at the first frame.
    """
    if seq.n_frames < 2:
        raise TooFewFramesError("feature extraction needs at least two frames")
    pos = seq.frames.reshape(seq.n_frames, seq.n_joints, 3)
    if norm is not None:
        pos = (pos - norm.origin) @ norm.basis
    flat = pos.reshape(seq.n_frames, 3 * seq.n_joints)
    vel = np.zeros_like(flat)
    vel[1:] = flat[1:] - flat[:-1]
    return FeatureSequence(
        n_joints=seq.n_joints, vectors=np.hstack([flat, vel])
    )


def feature_covariance(feats: FeatureSequence) -> np.ndarray:
    """Raw sample covariance of the feature vectors (n-1 denominator).

    This is the descriptor before regularization; exposed separately so
    its exact values can be checked against independent oracles.
    """
    if feats.n_frames < 2:
        raise TooFewFramesError("covariance needs at least two feature vectors")
    x = feats.vectors
    centered = x - x.mean(axis=0)
    raw = (centered.T @ centered) / (x.shape[0] - 1)
    return 0.5 * (raw + raw.T)


def default_epsilon(raw_covariance: np.ndarray) -> float:
    """Scale-aware regularization default: ``1e-6 * trace / dim``.

    Falls back to a tiny absolute value when the trace vanishes (constant
    input), so the regularized matrix is still SPD.
    """
    dim = raw_covariance.shape[0]
    eps = 1e-6 * float(np.trace(raw_covariance)) / dim
    return eps if eps > 0.0 else _EPSILON_FALLBACK


def covariance_descriptor(
    feats: FeatureSequence,
    epsilon: float | None = None,
    *,
    source_id: str = "",
    window: tuple[int, int] | None = None,
) -> MotionDescriptor:
    """Covariance descriptor of a feature sequence, regularized to SPD.

    ``epsilon`` is the additive diagonal loading passed to
    :func:`emogait.geometry.regularize`; ``None`` selects the scale-aware
    default of :func:`default_epsilon`.
    """
    raw = feature_covariance(feats)
    eps = default_epsilon(raw) if epsilon is None else float(epsilon)
    spd = regularize(SymMatrix._wrap(raw), eps)
    if window is None:
        window = (0, feats.n_frames)
    return MotionDescriptor(covariance=spd, source_id=source_id, window=window)


def subsequence(seq: SkeletonSequence, start: int, length: int) -> SkeletonSequence:
    """Contiguous sub-window ``[start, start + length)`` of a sequence."""
    if start < 0 or length < 2 or start + length > seq.n_frames:
        raise InvalidWindowError(
            f"window [{start}, {start + length}) does not fit in "
            f"{seq.n_frames} frames (length must be >= 2)"
        )
    return SkeletonSequence(
        n_joints=seq.n_joints,
        fps=seq.fps,
        frames=seq.frames[start : start + length],
        subject_id=seq.subject_id,
        label=seq.label,
    )


def describe_sequence(
    seq: SkeletonSequence,
    torso_joints,
    epsilon: float | None = None,
    *,
    source_id: str | None = None,
    window: tuple[int, int] | None = None,
) -> MotionDescriptor:
    """Full pipeline for one sequence: torso frame, features, covariance.

    ``window`` is an optional ``(start, length)`` pair selecting a
    sub-window of frames; the torso frame is then taken at the window's
    first frame.
    """
    if window is not None:
        start, length = window
        seq = subsequence(seq, start, length)
        frame_range = (start, start + length)
    else:
        frame_range = (0, seq.n_frames)
    norm = torso_frame(seq, torso_joints)
    feats = extract_features(seq, norm)
    return covariance_descriptor(
        feats,
        epsilon,
        source_id=seq.subject_id if source_id is None else source_id,
        window=frame_range,
    )


def describe_all(
    seqs,
    torso_joints,
    epsilon: float | None = None,
    *,
    source_ids=None,
    window: tuple[int, int] | None = None,
    max_workers: int = 1,
) -> list[MotionDescriptor]:
    """Descriptors for many sequences, optionally in parallel.

    Results are returned in input order regardless of ``max_workers``, so
    parallelism never changes the output.
    """
    seqs = list(seqs)
    if source_ids is None:
        ids = [None] * len(seqs)
    else:
        ids = list(source_ids)
        if len(ids) != len(seqs):
            raise ValueError("source_ids must match sequences in length")

    def one(pair):
        seq, sid = pair
        return describe_sequence(
            seq, torso_joints, epsilon, source_id=sid, window=window
        )

    if max_workers <= 1 or len(seqs) <= 1:
        return [one(p) for p in zip(seqs, ids)]
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        return list(pool.map(one, zip(seqs, ids)))
