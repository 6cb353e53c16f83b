"""Margin sharpness features from edge-strength waveforms (ids 12-32).

Waveforms are intensity profiles sampled along rays from the mass centroid
through evenly spaced boundary points, half inside and half outside the
margin. The absolute intensity gradient along each waveform, normalized to a
probability distribution (EP), describes how the edge is spread: a crisp
margin concentrates EP at the margin sample, a blurred one smears it out.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..imaging import GrayImage
from .contour import trace_contour
from .stats import stats7


@dataclass
class MarginParams:
    waveforms: int = 32
    waveform_length: int = 64
    angle_step: float = math.pi / 16

    def __post_init__(self):
        if self.waveforms < 1:
            raise ValueError("waveforms must be >= 1")
        if self.waveform_length < 4 or self.waveform_length % 2:
            raise ValueError("waveform_length must be an even number >= 4")
        if not (self.angle_step > 0):
            raise ValueError("angle_step must be positive")


def margin_waveforms(
    img: GrayImage,
    mask: np.ndarray,
    params: MarginParams | None = None,
    contour: np.ndarray | None = None,
) -> dict[str, np.ndarray]:
    """Per-waveform edge profiles and their three scalar descriptors.

    Returns arrays keyed "ep" (waveforms x length), "kurtosis", "entropy" and
    "peak_index" (peak position relative to the margin sample, 0 on a crisp
    edge). Sample positions are rounded to the nearest pixel and clamped at
    the image border; a flat profile falls back to a uniform EP.
    """
    params = params or MarginParams()
    mask = np.asarray(mask, dtype=bool)
    if contour is None:
        contour = trace_contour(mask)
    h, w = img.levels.shape
    levels = img.levels.astype(float)
    rows, cols = np.nonzero(mask)
    c_row = rows.mean()
    c_col = cols.mean()

    # polar angle of each contour point about the centroid, y-up convention
    phi = np.mod(np.arctan2(-(contour[:, 0] - c_row), contour[:, 1] - c_col), 2 * math.pi)

    half = params.waveform_length // 2
    length = params.waveform_length
    ep = np.empty((params.waveforms, length))
    kurt = np.empty(params.waveforms)
    entropy = np.empty(params.waveforms)
    peak = np.empty(params.waveforms)
    k_pos = np.arange(length, dtype=float)

    for j in range(params.waveforms):
        theta = j * params.angle_step
        dist = np.abs(np.mod(phi - theta + math.pi, 2 * math.pi) - math.pi)
        p = contour[int(np.argmin(dist))].astype(float)
        norm = math.hypot(p[0] - c_row, p[1] - c_col)
        if norm > 1e-9:
            u = ((p[0] - c_row) / norm, (p[1] - c_col) / norm)
        else:
            u = (-math.sin(theta), math.cos(theta))

        # anchor the margin sample at the last in-mask pixel along the ray,
        # so a step edge lands its whole gradient on one EP entry
        t = 0
        limit = h + w
        while t < limit:
            rr = int(round(p[0] + (t + 1) * u[0]))
            cc = int(round(p[1] + (t + 1) * u[1]))
            if 0 <= rr < h and 0 <= cc < w and mask[rr, cc]:
                t += 1
            else:
                break

        offs = np.arange(length) - half + t
        rr = np.clip(np.rint(p[0] + offs * u[0]).astype(int), 0, h - 1)
        cc = np.clip(np.rint(p[1] + offs * u[1]).astype(int), 0, w - 1)
        s = levels[rr, cc]

        grad = np.abs(np.diff(s))
        profile = np.append(grad, 0.0)
        total = profile.sum()
        if total > 0:
            profile /= total
        else:
            profile.fill(1.0 / length)
        ep[j] = profile

        mu = float(k_pos @ profile)
        m2 = float(((k_pos - mu) ** 2) @ profile)
        if m2 <= 1e-18:
            kurt[j] = 0.0
        else:
            m4 = float(((k_pos - mu) ** 4) @ profile)
            kurt[j] = m4 / m2**2
        nz = profile[profile > 0]
        entropy[j] = float(-(nz * np.log(nz)).sum())
        peak[j] = float(int(np.argmax(profile)) - half)

    return {"ep": ep, "kurtosis": kurt, "entropy": entropy, "peak_index": peak}


def margin_features(
    img: GrayImage,
    mask: np.ndarray,
    params: MarginParams | None = None,
    contour: np.ndarray | None = None,
) -> np.ndarray:
    """21 margin values: the 7 statistics of EP kurtosis, EP entropy and EP
    peak index over all waveforms."""
    wf = margin_waveforms(img, mask, params, contour)
    return np.concatenate(
        [stats7(wf["kurtosis"]), stats7(wf["entropy"]), stats7(wf["peak_index"])]
    )
