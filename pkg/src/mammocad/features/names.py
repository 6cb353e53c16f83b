"""Canonical names and ordering of the 130 features."""
from __future__ import annotations

from .stats import STAT_NAMES

SHAPE_NAMES = (
    "continuity",
    "curvature",
    "irregularity",
    "difference_area",
    "mean_variation",
    "variance_variation",
    "skewness_variation",
    "kurtosis_variation",
    "entropy_variation",
)

# ids 10-11; raw copies also appear as metadata columns mass_size_mm2 and
# patient_age, hence the short canonical names here
ADDITIONAL_NAMES = ("mass_size", "age")

MARGIN_BASE_NAMES = ("margin_kurtosis", "margin_entropy", "margin_peak_index")

HARALICK_NAMES = (
    "angular_second_moment",
    "contrast",
    "correlation",
    "sum_of_squares_variance",
    "inverse_difference_moment",
    "sum_average",
    "sum_variance",
    "sum_entropy",
    "entropy",
    "difference_variance",
    "difference_entropy",
    "info_correlation_1",
    "info_correlation_2",
    "max_correlation_coefficient",
)

FEATURE_COUNT = 130

# 0-based starts of each block in the 130-vector
SHAPE_SLICE = slice(0, 9)
ADDITIONAL_SLICE = slice(9, 11)
MARGIN_SLICE = slice(11, 32)
TEXTURE_SLICE = slice(32, 130)


def feature_names() -> list[str]:
    """The 130 canonical feature names, in feature-id order.

    Pooled blocks are feature-major: all 7 statistics of one base feature
    appear together, suffixed with the statistic name (e.g. contrast_variance).
    """
    names = list(SHAPE_NAMES) + list(ADDITIONAL_NAMES)
    for base in MARGIN_BASE_NAMES:
        names += [f"{base}_{stat}" for stat in STAT_NAMES]
    for base in HARALICK_NAMES:
        names += [f"{base}_{stat}" for stat in STAT_NAMES]
    assert len(names) == FEATURE_COUNT and len(set(names)) == FEATURE_COUNT
    return names
