"""Grey-level co-occurrence texture features (ids 33-130).

For every pixel distance d the co-occurrence matrices of 8 directions are
averaged into one matrix, 14 classic features are computed from it, and each
feature's sequence over d is pooled with the 7 summary statistics, giving
14 x 7 = 98 values in feature-major order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import PipelineError
from ..imaging import GrayImage
from .names import HARALICK_NAMES
from .stats import stats7

# directions cover half a turn in pi/8 steps; the transpose added during
# symmetrization accounts for the opposite directions
ANGLES_8 = tuple(k * math.pi / 8 for k in range(8))


@dataclass
class GlcmParams:
    """Texture extraction knobs.

    distances of None means every integer distance 1..floor(side/2).
    """

    gray_bins: int = 64
    angles: tuple[float, ...] = ANGLES_8
    distances: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.gray_bins < 2:
            raise ValueError("gray_bins must be >= 2")
        if len(self.angles) == 0:
            raise ValueError("angles must be non-empty")
        if self.distances is not None:
            if len(self.distances) == 0 or any(d < 1 for d in self.distances):
                raise ValueError("distances must be positive")


def quantize_levels(levels: np.ndarray, bins: int) -> np.ndarray:
    """Equal-width binning of the image's own grey range into ``bins`` bins."""
    levels = np.asarray(levels, dtype=np.int64)
    lo = int(levels.min())
    span = int(levels.max()) - lo + 1
    return (levels - lo) * bins // span


def displacement(d: int, angle: float) -> tuple[int, int]:
    """(drow, dcol) offset for distance d at ``angle``, measured
    counterclockwise in the standard plane (image rows grow downward)."""
    return int(np.rint(-d * math.sin(angle))), int(np.rint(d * math.cos(angle)))


def _cooc_counts(bins_arr: np.ndarray, drow: int, dcol: int, n: int) -> np.ndarray:
    h, w = bins_arr.shape
    r0, r1 = max(0, -drow), min(h, h - drow)
    c0, c1 = max(0, -dcol), min(w, w - dcol)
    if r0 >= r1 or c0 >= c1:
        raise PipelineError(
            "displacement-too-large", f"offset ({drow}, {dcol}) leaves no pixel pairs"
        )
    a = bins_arr[r0:r1, c0:c1].ravel()
    b = bins_arr[r0 + drow : r1 + drow, c0 + dcol : c1 + dcol].ravel()
    return np.bincount(a * n + b, minlength=n * n).reshape(n, n).astype(float)


def glcm(img: GrayImage, d: int, angle: float, gray_bins: int = 64) -> np.ndarray:
    """Symmetric normalized co-occurrence matrix for one (distance, angle)."""
    if d < 1:
        raise ValueError("distance must be >= 1")
    bins_arr = quantize_levels(img.levels, gray_bins)
    counts = _cooc_counts(bins_arr, *displacement(d, angle), gray_bins)
    counts = counts + counts.T
    return counts / counts.sum()


def _masked_entropy(p: np.ndarray) -> float:
    nz = p[p > 0]
    return float(-(nz * np.log(nz)).sum())


def haralick_features(P: np.ndarray) -> np.ndarray:
    """The 14 co-occurrence features of a normalized matrix, with natural
    logarithms and the 0*log(0) = 0 convention.

    Order: angular second moment, contrast, correlation, sum-of-squares
    variance, inverse difference moment, sum average, sum variance, sum
    entropy, entropy, difference variance, difference entropy, two information
    measures of correlation, and the maximal correlation coefficient.
    """
    P = np.asarray(P, dtype=float)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise ValueError("P must be square")
    if P.min() < 0 or abs(P.sum() - 1.0) > 1e-9:
        raise PipelineError("unnormalized-glcm", "matrix must be a distribution")
    n = P.shape[0]
    idx = np.arange(1, n + 1, dtype=float)
    px = P.sum(axis=1)
    py = P.sum(axis=0)
    mu_x = float(idx @ px)
    mu_y = float(idx @ py)
    var_x = float(((idx - mu_x) ** 2) @ px)
    var_y = float(((idx - mu_y) ** 2) @ py)

    ii, jj = np.meshgrid(idx, idx, indexing="ij")
    ksum = np.arange(2, 2 * n + 1, dtype=float)
    p_sum = np.bincount(
        (ii + jj).astype(int).ravel(), weights=P.ravel(), minlength=2 * n + 1
    )[2:]
    kdiff = np.arange(n, dtype=float)
    p_diff = np.bincount(
        np.abs(ii - jj).astype(int).ravel(), weights=P.ravel(), minlength=n
    )

    asm = float((P**2).sum())
    contrast = float((kdiff**2) @ p_diff)
    if var_x > 0 and var_y > 0:
        correlation = (float((ii * jj * P).sum()) - mu_x * mu_y) / math.sqrt(var_x * var_y)
    else:
        correlation = 0.0
    variance = float(((ii - mu_x) ** 2 * P).sum())
    idm = float((P / (1.0 + (ii - jj) ** 2)).sum())
    sum_average = float(ksum @ p_sum)
    sum_variance = float(((ksum - sum_average) ** 2) @ p_sum)
    sum_entropy = _masked_entropy(p_sum)
    entropy = _masked_entropy(P)
    mu_diff = float(kdiff @ p_diff)
    diff_variance = float(((kdiff - mu_diff) ** 2) @ p_diff)
    diff_entropy = _masked_entropy(p_diff)

    hx = _masked_entropy(px)
    hy = _masked_entropy(py)
    marg = np.outer(px, py)
    nz = P > 0
    hxy1 = float(-(P[nz] * np.log(marg[nz])).sum())
    hxy2 = _masked_entropy(marg)
    imc1 = (entropy - hxy1) / max(hx, hy) if max(hx, hy) > 0 else 0.0
    imc2 = math.sqrt(max(0.0, 1.0 - math.exp(-2.0 * (hxy2 - entropy))))

    max_corr = _maximal_correlation_coefficient(P, px, py)

    return np.array(
        [
            asm,
            contrast,
            correlation,
            variance,
            idm,
            sum_average,
            sum_variance,
            sum_entropy,
            entropy,
            diff_variance,
            diff_entropy,
            imc1,
            imc2,
            max_corr,
        ]
    )


def _maximal_correlation_coefficient(P: np.ndarray, px: np.ndarray, py: np.ndarray) -> float:
    """Square root of the second largest eigenvalue of the chain matrix
    Q(i,j) = sum_k P(i,k) P(j,k) / (px(i) py(k)); 0 when degenerate."""
    si = px > 0
    sk = py > 0
    if si.sum() < 2 or sk.sum() < 2:
        return 0.0
    A = P[np.ix_(si, sk)] / np.sqrt(py[sk])
    M = A @ A.T
    inv_sqrt = 1.0 / np.sqrt(px[si])
    B = M * np.outer(inv_sqrt, inv_sqrt)  # symmetric, similar to Q
    eigs = np.linalg.eigvalsh(B)
    return float(math.sqrt(max(0.0, eigs[-2])))


def texture_features(img: GrayImage, params: GlcmParams | None = None) -> np.ndarray:
    """98 texture values for a square ROI: 14 features over the distance
    sweep, each pooled by the 7 statistics (feature-major)."""
    params = params or GlcmParams()
    h, w = img.levels.shape
    if h != w:
        raise ValueError("texture expects a square ROI")
    if h < 4:
        raise PipelineError("roi-too-small", f"side {h} leaves no distance sweep")
    distances = params.distances or tuple(range(1, h // 2 + 1))
    bins_arr = quantize_levels(img.levels, params.gray_bins)
    n = params.gray_bins
    per_distance = np.empty((len(distances), 14))
    for row, d in enumerate(distances):
        acc = np.zeros((n, n))
        for angle in params.angles:
            counts = _cooc_counts(bins_arr, *displacement(d, angle), n)
            counts = counts + counts.T
            acc += counts / counts.sum()
        acc /= acc.sum()
        per_distance[row] = haralick_features(acc)
    out = np.empty(98)
    for f in range(14):
        out[f * 7 : (f + 1) * 7] = stats7(per_distance[:, f])
    return out
