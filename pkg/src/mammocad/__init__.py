"""Mass classification pipeline: segmentation, features, subset search, scoring."""

from .errors import PipelineError
from .imaging import (
    BIRADS_LABELS,
    GrayImage,
    RoiRecord,
    crop_roi,
    equalize_histogram,
    load_png,
    save_png,
)
from .segmentation import (
    CandidateSet,
    MassMask,
    SelectionEntry,
    apply_selection,
    grow_region,
    threshold_sweep,
)
from .features import (
    FEATURE_COUNT,
    GlcmParams,
    MarginParams,
    NormalizationBounds,
    extract_features,
    feature_names,
)
from .neural import (
    Model,
    NetworkShape,
    TrainConfig,
    gradient_check,
    hidden_size,
    predict,
    train,
)
from .gafs import (
    GaConfig,
    SearchResult,
    full_search,
    kpoint_crossover,
    mutate,
    roulette_select,
)
from .evaluation import EvaluationReport, confusion, evaluate_matrix, evaluate_predictions
from .config import RunConfig, load_config, parse_config
from .manifest import DatasetManifest, ManifestEntry, assign_splits, load_manifest

__version__ = "0.1.0"

__all__ = [
    "BIRADS_LABELS",
    "CandidateSet",
    "DatasetManifest",
    "EvaluationReport",
    "FEATURE_COUNT",
    "GaConfig",
    "GlcmParams",
    "GrayImage",
    "ManifestEntry",
    "MarginParams",
    "MassMask",
    "Model",
    "NetworkShape",
    "NormalizationBounds",
    "PipelineError",
    "RoiRecord",
    "RunConfig",
    "SearchResult",
    "SelectionEntry",
    "TrainConfig",
    "apply_selection",
    "assign_splits",
    "confusion",
    "crop_roi",
    "equalize_histogram",
    "evaluate_matrix",
    "evaluate_predictions",
    "extract_features",
    "feature_names",
    "full_search",
    "gradient_check",
    "grow_region",
    "hidden_size",
    "kpoint_crossover",
    "load_config",
    "load_manifest",
    "load_png",
    "mutate",
    "parse_config",
    "predict",
    "roulette_select",
    "save_png",
    "threshold_sweep",
    "train",
]
