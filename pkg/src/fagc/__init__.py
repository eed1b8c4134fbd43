"""Feature augmentation on geodesic curves in pre-shape space.

Feature vectors are projected onto the pre-shape hypersphere (duplicate,
center, normalize); one great-circle arc is fitted per category; new
feature vectors are sampled uniformly along each arc and fed to small
classifiers through a gated composite loss.
"""

__version__ = "0.1.0"

from .augment import (
    AugmentConfig,
    AugmentResult,
    Category,
    LabeledDataset,
    augment_dataset,
    derive_subseed,
    sample_curve,
)
from .errors import (
    DegenerateFeature,
    DegenerateGeodesic,
    DimensionMismatch,
    EmptyTrainingSet,
    FagcError,
    InputFormatError,
    LabelMismatch,
    NonFinite,
    NoValidCandidate,
    NotUnitNorm,
    OddDimension,
    ParamOutOfRange,
    SeparationUnreachable,
    TooFewPoints,
)
from .evaluation import (
    LossConfig,
    SoftmaxModel,
    SynthSpec,
    TrainConfig,
    evaluate,
    fagc_loss,
    gate,
    knn_predict,
    synth_dataset,
    synth_split,
    train_softmax,
)
from .geodesic import (
    FitConfig,
    FitReport,
    GeodesicCurve,
    curve_between,
    curve_point,
    farthest_pair,
    fit_curve,
    init_v_star,
    point_to_curve_distance,
)
from .preshape import geodesic_distance, is_preshape, procrustes_distance, project

__all__ = [
    "AugmentConfig",
    "AugmentResult",
    "Category",
    "DegenerateFeature",
    "DegenerateGeodesic",
    "DimensionMismatch",
    "EmptyTrainingSet",
    "FagcError",
    "FitConfig",
    "FitReport",
    "GeodesicCurve",
    "InputFormatError",
    "LabeledDataset",
    "LabelMismatch",
    "LossConfig",
    "NonFinite",
    "NoValidCandidate",
    "NotUnitNorm",
    "OddDimension",
    "ParamOutOfRange",
    "SeparationUnreachable",
    "SoftmaxModel",
    "SynthSpec",
    "TooFewPoints",
    "TrainConfig",
    "augment_dataset",
    "curve_between",
    "curve_point",
    "derive_subseed",
    "evaluate",
    "fagc_loss",
    "farthest_pair",
    "fit_curve",
    "gate",
    "geodesic_distance",
    "init_v_star",
    "is_preshape",
    "knn_predict",
    "point_to_curve_distance",
    "procrustes_distance",
    "project",
    "sample_curve",
    "synth_dataset",
    "synth_split",
    "train_softmax",
]
