"""Seven summary statistics used to pool a sequence into fixed-size features."""
from __future__ import annotations

import numpy as np

from ..errors import PipelineError

STAT_NAMES = (
    "mean",
    "maximum",
    "minimum",
    "standard_deviation",
    "variance",
    "skewness",
    "kurtosis",
)


def central_moments(values: np.ndarray) -> tuple[float, float, float, float]:
    """Population mean and central moments m2, m3, m4."""
    mean = float(values.mean())
    d = values - mean
    return mean, float((d**2).mean()), float((d**3).mean()), float((d**4).mean())


def _effectively_constant(m2: float, values: np.ndarray) -> bool:
    # treat variance at rounding-noise level as zero so constant sequences
    # do not produce garbage moment ratios
    scale = max(1.0, float(np.abs(values).max()))
    return m2 <= (1e-12 * scale) ** 2


def stats7(values) -> np.ndarray:
    """(mean, max, min, std, variance, skewness, kurtosis) of a sequence.

    Moments are population moments; skewness is m3 / m2^1.5 and kurtosis is
    m4 / m2^2 (not excess). Both are defined as 0 for constant input. An empty
    sequence is a contract violation ("empty-stats").
    """
    values = np.asarray(values, dtype=float).ravel()
    if values.size == 0:
        raise PipelineError("empty-stats", "cannot summarize an empty sequence")
    mean, m2, m3, m4 = central_moments(values)
    if _effectively_constant(m2, values):
        skew = kurt = 0.0
        m2 = 0.0
    else:
        skew = m3 / m2**1.5
        kurt = m4 / m2**2
    return np.array(
        [mean, values.max(), values.min(), np.sqrt(m2), m2, skew, kurt], dtype=float
    )
