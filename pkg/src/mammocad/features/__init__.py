"""Mass feature extraction: 130 values per ROI.

Layout (1-based ids):
  1-9     shape features from the mask outline
  10-11   mass size (mm^2) and patient age
  12-32   margin waveform statistics (3 features x 7 statistics)
  33-130  grey-level co-occurrence texture (14 features x 7 statistics)
"""
from __future__ import annotations

import numpy as np

from ..errors import PipelineError
from ..imaging import RoiRecord
from ..segmentation import MassMask
from .contour import trace_contour
from .margin import MarginParams, margin_features
from .names import (
    ADDITIONAL_SLICE,
    FEATURE_COUNT,
    MARGIN_SLICE,
    SHAPE_SLICE,
    TEXTURE_SLICE,
    feature_names,
)
from .normalize import (
    NormalizationBounds,
    apply_bounds,
    fit_bounds,
    load_bounds,
    normalize_dataset,
    save_bounds,
)
from .shape import shape_features, variation_function
from .stats import stats7
from .texture import GlcmParams, glcm, haralick_features, texture_features


def extract_features(
    roi: RoiRecord,
    mask: MassMask,
    glcm_params: GlcmParams | None = None,
    margin_params: MarginParams | None = None,
) -> np.ndarray:
    """Compute the full 130-value raw feature vector for one reviewed ROI."""
    contour = trace_contour(mask.bits)
    shape = shape_features(mask.bits, contour)
    mass_size = mask.pixel_count * roi.image.spacing_mm**2
    margin = margin_features(roi.image, mask.bits, margin_params, contour=contour)
    texture = texture_features(roi.image, glcm_params or GlcmParams())
    vec = np.concatenate([shape, [mass_size, roi.patient_age], margin, texture])
    if vec.shape != (FEATURE_COUNT,):
        raise AssertionError(f"feature vector has {vec.shape} values")
    if not np.all(np.isfinite(vec)):
        bad = [feature_names()[i] for i in np.nonzero(~np.isfinite(vec))[0]]
        raise PipelineError("io", f"non-finite features for {roi.roi_id!r}: {bad}")
    return vec


__all__ = [
    "ADDITIONAL_SLICE",
    "FEATURE_COUNT",
    "GlcmParams",
    "MARGIN_SLICE",
    "SHAPE_SLICE",
    "TEXTURE_SLICE",
    "MarginParams",
    "NormalizationBounds",
    "apply_bounds",
    "extract_features",
    "feature_names",
    "fit_bounds",
    "glcm",
    "haralick_features",
    "load_bounds",
    "margin_features",
    "normalize_dataset",
    "save_bounds",
    "shape_features",
    "stats7",
    "texture_features",
    "trace_contour",
    "variation_function",
]
