"""Emotion classification from 3D skeleton motion.

Sequences of joint coordinates are summarized by covariance descriptors of
posture/velocity features, treated as points on the manifold of symmetric
positive-definite matrices.  Classification compares descriptors to
per-class log-Euclidean mean prototypes (or to all training descriptors,
k-NN style) under the log-Euclidean or Frobenius distance, and a
leave-one-subject-out harness reports confusion matrices.
"""

from .classify import (
    DEFAULT_LABELS,
    LabeledDescriptor,
    PrototypeSet,
    build_prototypes,
    classify_knn,
    classify_prototype,
)
from .eigsolver import EigenPair, available_backends, get_backend, use_backend
from .evaluate import (
    ClassifierConfig,
    ConfusionMatrix,
    EvalReport,
    aggregate_confusions,
    macro_average_accuracy,
    plan_loso,
    render_report,
    run_crossval,
)
from .features import (
    FeatureSequence,
    MotionDescriptor,
    NormalizationFrame,
    SkeletonSequence,
    covariance_descriptor,
    describe_all,
    describe_sequence,
    extract_features,
    feature_covariance,
    torso_frame,
)
from .geometry import (
    SpdMatrix,
    SymMatrix,
    frobenius_distance,
    karcher_objective,
    lerm_distance,
    log_euclidean_mean,
    regularize,
    spd_exp,
    spd_log,
    sym_eig,
)
from .synth import (
    DEFAULT_TORSO_JOINTS,
    EmotionDynamics,
    GaitParams,
    default_gait_params,
    generate_dataset,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_LABELS",
    "DEFAULT_TORSO_JOINTS",
    "ClassifierConfig",
    "ConfusionMatrix",
    "EigenPair",
    "EmotionDynamics",
    "EvalReport",
    "FeatureSequence",
    "GaitParams",
    "LabeledDescriptor",
    "MotionDescriptor",
    "NormalizationFrame",
    "PrototypeSet",
    "SkeletonSequence",
    "SpdMatrix",
    "SymMatrix",
    "aggregate_confusions",
    "available_backends",
    "build_prototypes",
    "classify_knn",
    "classify_prototype",
    "covariance_descriptor",
    "default_gait_params",
    "describe_all",
    "describe_sequence",
    "extract_features",
    "feature_covariance",
    "frobenius_distance",
    "generate_dataset",
    "get_backend",
    "karcher_objective",
    "lerm_distance",
    "log_euclidean_mean",
    "macro_average_accuracy",
    "plan_loso",
    "regularize",
    "render_report",
    "run_crossval",
    "spd_exp",
    "spd_log",
    "sym_eig",
    "torso_frame",
    "use_backend",
]
