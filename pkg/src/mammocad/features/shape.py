"""Shape features of the segmented mass (feature ids 1-9)."""
from __future__ import annotations

import math

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .contour import trace_contour
from .stats import central_moments

TURN_TOLERANCE_RAD = math.radians(10.0)
DEFAULT_ANGLE_SAMPLES = 180


def variation_function(mask: np.ndarray, angle_samples: int = DEFAULT_ANGLE_SAMPLES) -> np.ndarray:
    """Projection extent of the mask at evenly spaced angles over half a turn.

    At angle theta_k = k*pi/angle_samples the extent is the spread
    (max - min) of pixel projections onto the axis (cos theta, sin theta).
    """
    mask = np.asarray(mask, dtype=bool)
    if int(mask.sum()) < 2:
        raise ValueError("variation function needs at least 2 mask pixels")
    rows, cols = np.nonzero(mask)
    thetas = np.arange(angle_samples) * (math.pi / angle_samples)
    proj = np.outer(np.cos(thetas), cols) + np.outer(np.sin(thetas), rows)
    return proj.max(axis=1) - proj.min(axis=1)


def convex_hull_pixel_count(mask: np.ndarray) -> int:
    """Number of pixels whose centres lie inside or on the mask's convex hull."""
    rows, cols = np.nonzero(np.asarray(mask, dtype=bool))
    pts = np.column_stack([cols, rows]).astype(float)
    if len(pts) == 1:
        return 1
    try:
        hull = ConvexHull(pts)
    except QhullError:
        # collinear mask: lattice points on the extreme segment
        direction = pts[-1] - pts[0]
        t = pts @ direction
        a = pts[int(np.argmin(t))]
        b = pts[int(np.argmax(t))]
        dx, dy = int(abs(b[0] - a[0])), int(abs(b[1] - a[1]))
        return math.gcd(dx, dy) + 1
    verts = pts[hull.vertices]  # counterclockwise in the (x, y) input frame
    x0, y0 = np.floor(verts.min(axis=0)).astype(int)
    x1, y1 = np.ceil(verts.max(axis=0)).astype(int)
    xs, ys = np.meshgrid(np.arange(x0, x1 + 1), np.arange(y0, y1 + 1))
    inside = np.ones(xs.shape, dtype=bool)
    eps = 1e-9
    for i in range(len(verts)):
        ax, ay = verts[i]
        bx, by = verts[(i + 1) % len(verts)]
        cross = (bx - ax) * (ys - ay) - (by - ay) * (xs - ax)
        inside &= cross >= -eps
    return int(inside.sum())


def _turning_angles(contour: np.ndarray) -> np.ndarray:
    """Signed turning angle at every contour vertex (cyclic)."""
    pts = contour.astype(float)
    prev = np.roll(pts, 1, axis=0)
    nxt = np.roll(pts, -1, axis=0)
    v1 = pts - prev
    v2 = nxt - pts
    # x = col, y = row; the sign convention cancels out in the change count
    cross = v1[:, 1] * v2[:, 0] - v1[:, 0] * v2[:, 1]
    dot = (v1 * v2).sum(axis=1)
    return np.arctan2(cross, dot)


def count_direction_changes(contour: np.ndarray, tolerance: float = TURN_TOLERANCE_RAD) -> int:
    """Number of sign flips in the contour's turning direction.

    Turns with magnitude at or below ``tolerance`` are treated as pixel-grid
    jitter and skipped before counting flips around the closed walk.
    """
    angles = _turning_angles(contour)
    signs = np.sign(angles[np.abs(angles) > tolerance])
    if signs.size < 2:
        return 0
    return int((signs != np.roll(signs, 1)).sum())


def shape_features(mask: np.ndarray, contour: np.ndarray | None = None) -> np.ndarray:
    """The 9 shape features: continuity, curvature, irregularity, difference
    area, and mean/variance/skewness/kurtosis/entropy of the variation
    function."""
    mask = np.asarray(mask, dtype=bool)
    if contour is None:
        contour = trace_contour(mask)
    pts = contour.astype(float)

    seg = pts - np.roll(pts, 1, axis=0)
    seg_len = np.hypot(seg[:, 0], seg[:, 1])
    continuity = float(np.abs(seg_len - seg_len.mean()).mean())

    second = np.roll(pts, 1, axis=0) - 2 * pts + np.roll(pts, -1, axis=0)
    curvature = float(np.hypot(second[:, 0], second[:, 1]).mean())

    irregularity = float(count_direction_changes(contour))

    difference_area = float(convex_hull_pixel_count(mask) - int(mask.sum()))

    variation = variation_function(mask)
    mean, m2, m3, m4 = central_moments(variation)
    if m2 <= (1e-12 * max(1.0, variation.max())) ** 2:
        m2 = 0.0
        skew = kurt = 0.0
    else:
        skew = m3 / m2**1.5
        kurt = m4 / m2**2
    total = variation.sum()
    if total > 0:
        q = variation[variation > 0] / total
        entropy = float(-(q * np.log(q)).sum())
    else:
        entropy = 0.0

    return np.array(
        [continuity, curvature, irregularity, difference_area, mean, m2, skew, kurt, entropy]
    )
