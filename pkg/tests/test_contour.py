"""Boundary tracing on binary masks."""
import numpy as np
import pytest

from conftest import random_blob
from mammocad.errors import PipelineError
from mammocad.features.contour import boundary_pixels, trace_contour


def signed_area2(contour: np.ndarray) -> float:
    """Twice the polygon area in the x-right / y-down pixel frame; negative
    means clockwise on screen."""
    y = contour[:, 0].astype(float)
    x = contour[:, 1].astype(float)
    return float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def assert_valid_contour(contour: np.ndarray, mask: np.ndarray):
    mask = np.asarray(mask, dtype=bool)
    # every vertex is a boundary pixel of the mask
    border = boundary_pixels(mask)
    for r, c in contour:
        assert border[r, c], f"({r}, {c}) is not on the boundary"
    # consecutive vertices are 8-neighbours, including the closing step
    steps = np.abs(contour - np.roll(contour, -1, axis=0)).max(axis=1)
    assert (steps == 1).all()
    # no vertex repeats
    assert len({(int(r), int(c)) for r, c in contour}) == len(contour)


class TestTraceContour:
    def test_square(self):
        mask = np.zeros((8, 8), dtype=bool)
        mask[2:6, 2:6] = True
        contour = trace_contour(mask)
        assert_valid_contour(contour, mask)
        assert len(contour) == 12  # 4x4 square boundary ring
        assert signed_area2(contour) < 0  # clockwise on screen

    def test_disk(self, disk_mask):
        contour = trace_contour(disk_mask)
        assert_valid_contour(contour, disk_mask)
        assert signed_area2(contour) < 0

    def test_plus(self, plus_mask):
        contour = trace_contour(plus_mask)
        assert_valid_contour(contour, plus_mask)
        assert signed_area2(contour) < 0

    def test_covers_extremes(self, disk_mask):
        contour = trace_contour(disk_mask)
        rows, cols = np.nonzero(disk_mask)
        assert contour[:, 0].min() == rows.min()
        assert contour[:, 0].max() == rows.max()
        assert contour[:, 1].min() == cols.min()
        assert contour[:, 1].max() == cols.max()

    def test_random_blobs(self):
        for seed in range(30):
            mask = random_blob(np.random.default_rng(seed))
            contour = trace_contour(mask)
            assert_valid_contour(contour, mask)
            assert signed_area2(contour) < 0, f"seed {seed}"

    def test_one_pixel_wide_arm(self):
        # thin appendages force the tracer to walk back along the same pixels'
        # neighbourhood without looping forever
        mask = np.zeros((9, 9), dtype=bool)
        mask[4, 1:8] = True
        mask[1:8, 4] = True
        contour = trace_contour(mask)
        steps = np.abs(contour - np.roll(contour, -1, axis=0)).max(axis=1)
        assert (steps == 1).all()

    def test_too_small_mask(self):
        mask = np.zeros((5, 5), dtype=bool)
        mask[2, 2] = True
        with pytest.raises(PipelineError) as exc:
            trace_contour(mask)
        assert exc.value.code == "degenerate-mask"

    def test_empty_mask(self):
        with pytest.raises(PipelineError) as exc:
            trace_contour(np.zeros((4, 4), dtype=bool))
        assert exc.value.code == "degenerate-mask"

    def test_deterministic(self, disk_mask):
        a = trace_contour(disk_mask)
        b = trace_contour(disk_mask)
        np.testing.assert_array_equal(a, b)


class TestBoundaryPixels:
    def test_interior_removed(self, square_mask):
        border = boundary_pixels(square_mask)
        assert not border[5, 5]
        assert border[3, 3]
        assert border[3, 5]

    def test_image_edge_counts_as_boundary(self):
        mask = np.ones((4, 4), dtype=bool)
        border = boundary_pixels(mask)
        assert border[0, 0] and border[0, 2]
        assert not border[1, 1]
