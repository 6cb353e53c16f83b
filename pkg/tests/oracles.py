"""Independent reference implementations used to cross-check the package.

Everything here is written the slow, obvious way (plain loops, collections)
on purpose: these are second opinions, not fast paths, so they must not share
code or vectorization tricks with the library.
"""
from __future__ import annotations

import math
from collections import deque

import numpy as np


# --- basic statistics -------------------------------------------------------

def moments_reference(xs) -> tuple[float, float, float, float]:
    """Population mean and 2nd..4th central moments via explicit loops."""
    xs = [float(v) for v in xs]
    n = len(xs)
    mean = sum(xs) / n
    m2 = sum((v - mean) ** 2 for v in xs) / n
    m3 = sum((v - mean) ** 3 for v in xs) / n
    m4 = sum((v - mean) ** 4 for v in xs) / n
    return mean, m2, m3, m4


def stats7_reference(xs) -> list[float]:
    mean, m2, m3, m4 = moments_reference(xs)
    xs = [float(v) for v in xs]
    # same degeneracy convention as the implementation: variance at rounding
    # noise relative to max(1, data scale) counts as constant
    scale = max(1.0, max(abs(v) for v in xs))
    if m2 <= (1e-12 * scale) ** 2:
        return [mean, max(xs), min(xs), 0.0, 0.0, 0.0, 0.0]
    return [
        mean,
        max(xs),
        min(xs),
        math.sqrt(m2),
        m2,
        m3 / m2**1.5,
        m4 / m2**2,
    ]


def entropy_reference(p) -> float:
    """Shannon entropy in nats, skipping zero cells."""
    total = 0.0
    for v in np.asarray(p, dtype=float).ravel():
        if v > 0:
            total -= v * math.log(v)
    return total


# --- region growing ---------------------------------------------------------

def grow_reference(levels: np.ndarray, seed: tuple[int, int], threshold: float) -> np.ndarray:
    """Breadth-first flood fill admitting |value - seed value| <= threshold."""
    levels = np.asarray(levels, dtype=np.int64)
    h, w = levels.shape
    sr, sc = seed
    target = levels[sr, sc]
    out = np.zeros((h, w), dtype=bool)
    out[sr, sc] = True
    queue = deque([(sr, sc)])
    while queue:
        r, c = queue.popleft()
        for dr in (-1, 0, 1):
            for dc in (-1, 0, 1):
                rr, cc = r + dr, c + dc
                if 0 <= rr < h and 0 <= cc < w and not out[rr, cc]:
                    if abs(int(levels[rr, cc]) - int(target)) <= threshold:
                        out[rr, cc] = True
                        queue.append((rr, cc))
    return out


# --- co-occurrence ----------------------------------------------------------

def glcm_reference(bins: np.ndarray, d: int, angle: float, n: int) -> np.ndarray:
    """Symmetric normalized co-occurrence matrix by walking every pixel."""
    bins = np.asarray(bins)
    h, w = bins.shape
    dr = int(np.rint(-d * math.sin(angle)))
    dc = int(np.rint(d * math.cos(angle)))
    counts = np.zeros((n, n), dtype=float)
    for r in range(h):
        for c in range(w):
            rr, cc = r + dr, c + dc
            if 0 <= rr < h and 0 <= cc < w:
                counts[bins[r, c], bins[rr, cc]] += 1
                counts[bins[rr, cc], bins[r, c]] += 1
    s = counts.sum()
    return counts / s if s else counts


def haralick_reference(P: np.ndarray) -> list[float]:
    """The 14 co-occurrence statistics, transcribed with explicit sums.

    Indices are 1-based, logarithms natural, empty cells skipped.
    """
    P = np.asarray(P, dtype=float)
    n = P.shape[0]
    px = [sum(P[i, j] for j in range(n)) for i in range(n)]
    py = [sum(P[i, j] for i in range(n)) for j in range(n)]
    mu_x = sum((i + 1) * px[i] for i in range(n))
    mu_y = sum((j + 1) * py[j] for j in range(n))
    var_x = sum((i + 1 - mu_x) ** 2 * px[i] for i in range(n))
    var_y = sum((j + 1 - mu_y) ** 2 * py[j] for j in range(n))

    p_sum = {k: 0.0 for k in range(2, 2 * n + 1)}
    p_diff = {k: 0.0 for k in range(n)}
    for i in range(n):
        for j in range(n):
            p_sum[i + j + 2] += P[i, j]
            p_diff[abs(i - j)] += P[i, j]

    f1 = sum(P[i, j] ** 2 for i in range(n) for j in range(n))
    f2 = sum(k**2 * v for k, v in p_diff.items())
    if var_x > 0 and var_y > 0:
        f3 = (
            sum((i + 1) * (j + 1) * P[i, j] for i in range(n) for j in range(n))
            - mu_x * mu_y
        ) / math.sqrt(var_x * var_y)
    else:
        f3 = 0.0
    f4 = sum((i + 1 - mu_x) ** 2 * P[i, j] for i in range(n) for j in range(n))
    f5 = sum(P[i, j] / (1 + (i - j) ** 2) for i in range(n) for j in range(n))
    f6 = sum(k * v for k, v in p_sum.items())
    f7 = sum((k - f6) ** 2 * v for k, v in p_sum.items())
    f8 = entropy_reference(list(p_sum.values()))
    f9 = entropy_reference(P)
    mu_d = sum(k * v for k, v in p_diff.items())
    f10 = sum((k - mu_d) ** 2 * v for k, v in p_diff.items())
    f11 = entropy_reference(list(p_diff.values()))

    hx = entropy_reference(px)
    hy = entropy_reference(py)
    hxy1 = 0.0
    hxy2 = 0.0
    for i in range(n):
        for j in range(n):
            marg = px[i] * py[j]
            if marg > 0:
                hxy2 -= marg * math.log(marg)
                if P[i, j] > 0:
                    hxy1 -= P[i, j] * math.log(marg)
    f12 = (f9 - hxy1) / max(hx, hy) if max(hx, hy) > 0 else 0.0
    f13 = math.sqrt(max(0.0, 1.0 - math.exp(-2.0 * (hxy2 - f9))))
    f14 = _mcc_reference(P, px, py)
    return [f1, f2, f3, f4, f5, f6, f7, f8, f9, f10, f11, f12, f13, f14]


def _mcc_reference(P: np.ndarray, px, py) -> float:
    """Second largest eigenvalue of the chain matrix Q, via plain eigvals on
    the support sub-matrix."""
    rows = [i for i in range(P.shape[0]) if px[i] > 0]
    cols = [k for k in range(P.shape[0]) if py[k] > 0]
    if len(rows) < 2 or len(cols) < 2:
        return 0.0
    q = np.zeros((len(rows), len(rows)))
    for a, i in enumerate(rows):
        for b, j in enumerate(rows):
            q[a, b] = sum(P[i, k] * P[j, k] / (px[i] * py[k]) for k in cols)
    eigs = sorted(np.linalg.eigvals(q).real)
    return math.sqrt(max(0.0, eigs[-2]))


# --- geometry ---------------------------------------------------------------

def hull_pixel_count_reference(mask: np.ndarray) -> int:
    """Pixels inside or on the convex hull of the mask's pixel centres,
    hull built with Andrew's monotone chain."""
    pts = sorted((int(c), int(r)) for r, c in zip(*np.nonzero(mask)))
    if len(pts) == 1:
        return 1

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list[tuple[int, int]] = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[tuple[int, int]] = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]

    if len(hull) < 3:
        # collinear: count lattice points on the segment between the extremes
        (x0, y0), (x1, y1) = pts[0], pts[-1]
        return math.gcd(abs(x1 - x0), abs(y1 - y0)) + 1

    rows, cols = np.nonzero(mask)
    count = 0
    for y in range(rows.min(), rows.max() + 1):
        for x in range(cols.min(), cols.max() + 1):
            inside = True
            for a in range(len(hull)):
                b = (a + 1) % len(hull)
                if cross(hull[a], hull[b], (x, y)) < -1e-9:
                    inside = False
                    break
            if inside:
                count += 1
    return count


def variation_reference(mask: np.ndarray, n_angles: int) -> list[float]:
    """Projection extent per angle via an explicit loop over mask pixels."""
    pts = [(int(r), int(c)) for r, c in zip(*np.nonzero(mask))]
    out = []
    for k in range(n_angles):
        theta = k * math.pi / n_angles
        projections = [c * math.cos(theta) + r * math.sin(theta) for r, c in pts]
        out.append(max(projections) - min(projections))
    return out


def point_in_polygon_reference(x: float, y: float, vertices) -> bool:
    """Even-odd crossing test with edge points counted inside."""
    n = len(vertices)
    eps = 1e-9
    inside = False
    for i in range(n):
        x1, y1 = vertices[i]
        x2, y2 = vertices[(i + 1) % n]
        # on-edge check
        cross = (x2 - x1) * (y - y1) - (y2 - y1) * (x - x1)
        if abs(cross) < eps:
            if min(x1, x2) - eps <= x <= max(x1, x2) + eps and min(y1, y2) - eps <= y <= max(y1, y2) + eps:
                return True
        if (y1 > y + eps) != (y2 > y + eps):
            x_at = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if x < x_at - eps:
                inside = not inside
    return inside


def turning_flips_reference(contour: np.ndarray, tolerance_rad: float) -> int:
    """Sign flips of significant turning angles along the closed outline."""
    pts = [(int(r), int(c)) for r, c in contour]
    n = len(pts)
    angles = []
    for i in range(n):
        a, b, c = pts[i], pts[(i + 1) % n], pts[(i + 2) % n]
        v1 = (b[0] - a[0], b[1] - a[1])
        v2 = (c[0] - b[0], c[1] - b[1])
        cross = v1[0] * v2[1] - v1[1] * v2[0]
        dot = v1[0] * v2[0] + v1[1] * v2[1]
        angles.append(math.atan2(cross, dot))
    signs = [1 if a > 0 else -1 for a in angles if abs(a) > tolerance_rad]
    if len(signs) < 2:
        return 0
    flips = 0
    for i in range(len(signs)):
        if signs[i] != signs[(i + 1) % len(signs)]:
            flips += 1
    return flips
