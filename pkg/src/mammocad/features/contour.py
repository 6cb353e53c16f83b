"""Mask outline extraction by Moore boundary tracing."""
from __future__ import annotations

import numpy as np
from scipy import ndimage

from ..errors import PipelineError

# Moore neighbourhood in clockwise screen order starting East; (row, col)
_RING = ((0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1), (-1, 0), (-1, 1))


def boundary_pixels(mask: np.ndarray) -> np.ndarray:
    """Mask pixels with at least one background (or out-of-image) 8-neighbour."""
    mask = np.asarray(mask, dtype=bool)
    interior = ndimage.binary_erosion(
        mask, structure=np.ones((3, 3), dtype=bool), border_value=0
    )
    return mask & ~interior


def trace_contour(mask: np.ndarray) -> np.ndarray:
    """Walk the outline of a single 8-connected mask.

    Returns an (n, 2) array of (row, col) boundary pixels forming a closed
    walk (the last point is 8-adjacent to the first), oriented
    counterclockwise in the standard plane (y up). Thin structures may repeat
    pixels, which is inherent to a pixel-level walk. Masks with fewer than 4
    boundary pixels raise "degenerate-mask".
    """
    mask = np.asarray(mask, dtype=bool)
    if int(boundary_pixels(mask).sum()) < 4:
        raise PipelineError("degenerate-mask", "mask outline has fewer than 4 pixels")
    h, w = mask.shape

    def is_set(p):
        return 0 <= p[0] < h and 0 <= p[1] < w and mask[p]

    rows, cols = np.nonzero(mask)
    start = (int(rows[0]), int(cols[0]))  # topmost, then leftmost
    backtrack = (start[0], start[1] - 1)  # background by the scan order

    def step(cur, back):
        ring = [(cur[0] + dr, cur[1] + dc) for dr, dc in _RING]
        i = ring.index(back)
        prev = back
        for k in range(1, 9):
            cand = ring[(i + k) % 8]
            if is_set(cand):
                return cand, prev
            prev = cand
        raise AssertionError("isolated pixel escaped the degeneracy check")

    # follow the deterministic (pixel, backtrack) orbit until a state repeats;
    # the repeated segment is the closed boundary walk
    first_seen: dict[tuple, int] = {}
    seq: list[tuple[int, int]] = []
    state = (start, backtrack)
    while state not in first_seen:
        first_seen[state] = len(seq)
        seq.append(state[0])
        state = step(*state)
    contour = np.array(seq[first_seen[state]:], dtype=int)

    # orient counterclockwise in the y-up convention (negative shoelace area
    # in row/col coordinates); zero-area walks are left as traced
    x = contour[:, 1].astype(float)
    y = contour[:, 0].astype(float)
    area2 = float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))
    if area2 > 0:
        contour = contour[::-1].copy()
    return contour
