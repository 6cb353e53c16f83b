"""Image IO, ROI cropping and histogram equalization."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from conftest import gray
from mammocad.errors import PipelineError
from mammocad.imaging import (
    BIRADS_LABELS,
    GrayImage,
    RoiRecord,
    crop_roi,
    equalize_histogram,
    load_png,
    save_png,
)


class TestGrayImage:
    def test_rejects_out_of_range_levels(self):
        with pytest.raises(ValueError):
            gray([[0, 300]], bit_depth=8)

    def test_rejects_bad_bit_depth(self):
        with pytest.raises(ValueError):
            gray([[0, 1]], bit_depth=12)

    def test_rejects_non_positive_spacing(self):
        with pytest.raises(ValueError):
            gray([[0, 1]], spacing_mm=0.0)

    def test_max_level(self):
        assert gray([[0]]).max_level == 255
        assert gray([[0]], bit_depth=16).max_level == 65535


class TestRoiRecord:
    def test_requires_square_image(self):
        with pytest.raises(ValueError):
            RoiRecord("r", gray(np.zeros((3, 4), dtype=int)), 50.0, "B-2")

    def test_rejects_unknown_label(self):
        with pytest.raises(ValueError):
            RoiRecord("r", gray(np.zeros((3, 3), dtype=int)), 50.0, "B-9")

    def test_label_order(self):
        assert BIRADS_LABELS == ("B-2", "B-3", "B-4", "B-5")


class TestPngRoundTrip:
    def test_8_bit(self, tmp_path):
        rng = np.random.default_rng(0)
        img = gray(rng.integers(0, 256, (17, 13)), spacing_mm=0.5)
        save_png(img, tmp_path / "a.png")
        back = load_png(tmp_path / "a.png", spacing_mm=0.5)
        assert back.bit_depth == 8
        assert back.spacing_mm == 0.5
        np.testing.assert_array_equal(back.levels, img.levels)

    def test_16_bit(self, tmp_path):
        rng = np.random.default_rng(1)
        img = gray(rng.integers(0, 65536, (9, 9)), bit_depth=16)
        save_png(img, tmp_path / "b.png")
        back = load_png(tmp_path / "b.png")
        assert back.bit_depth == 16
        np.testing.assert_array_equal(back.levels, img.levels)

    def test_missing_file(self, tmp_path):
        with pytest.raises(PipelineError) as exc:
            load_png(tmp_path / "nope.png")
        assert exc.value.code == "io"

    def test_corrupt_file(self, tmp_path):
        (tmp_path / "bad.png").write_bytes(b"not a png")
        with pytest.raises(PipelineError) as exc:
            load_png(tmp_path / "bad.png")
        assert exc.value.code == "io"

    def test_deterministic_bytes(self, tmp_path):
        img = gray(np.random.default_rng(2).integers(0, 256, (20, 20)))
        save_png(img, tmp_path / "x.png")
        save_png(img, tmp_path / "y.png")
        assert (tmp_path / "x.png").read_bytes() == (tmp_path / "y.png").read_bytes()


class TestCropRoi:
    def setup_method(self):
        self.full = gray(np.arange(100).reshape(10, 10))

    def test_centered_window(self):
        roi = crop_roi(self.full, (5, 5), 2)
        assert roi.levels.shape == (5, 5)
        np.testing.assert_array_equal(roi.levels, self.full.levels[3:8, 3:8])

    def test_side_is_odd(self):
        for radius in (1, 2, 3):
            assert crop_roi(self.full, (5, 5), radius).width == 2 * radius + 1

    def test_border_center_shifts_inward(self):
        roi = crop_roi(self.full, (0, 0), 2)
        np.testing.assert_array_equal(roi.levels, self.full.levels[0:5, 0:5])

    def test_window_too_large(self):
        with pytest.raises(PipelineError) as exc:
            crop_roi(self.full, (5, 5), 5)
        assert exc.value.code == "roi-exceeds-image"

    def test_center_outside(self):
        with pytest.raises(PipelineError) as exc:
            crop_roi(self.full, (20, 5), 2)
        assert exc.value.code == "roi-exceeds-image"

    def test_spacing_carried_over(self):
        full = gray(np.zeros((10, 10), dtype=int), spacing_mm=0.07)
        assert crop_roi(full, (5, 5), 2).spacing_mm == 0.07


class TestEqualizeHistogram:
    def test_constant_image_unchanged(self):
        img = gray(np.full((8, 8), 77))
        out = equalize_histogram(img)
        np.testing.assert_array_equal(out.levels, img.levels)

    def test_two_level_image_hits_extremes(self):
        img = gray([[0, 0, 0, 10], [10, 10, 0, 0]])
        out = equalize_histogram(img)
        # lowest level maps to 0, highest to the top of the range
        assert out.levels[img.levels == 0].max() == 0
        assert out.levels[img.levels == 10].min() == 255

    def test_known_remap(self):
        # 4 pixels, distinct levels: cdf = .25/.5/.75/1 -> 0, 85, 170, 255
        img = gray([[10, 20], [30, 40]])
        out = equalize_histogram(img)
        np.testing.assert_array_equal(out.levels, [[0, 85], [170, 255]])

    def test_full_range_output(self):
        rng = np.random.default_rng(3)
        img = gray(rng.integers(100, 150, (32, 32)))
        out = equalize_histogram(img)
        assert out.levels.min() == 0
        assert out.levels.max() == 255

    def test_idempotent_within_rounding(self):
        rng = np.random.default_rng(4)
        img = gray(rng.integers(0, 256, (32, 32)))
        once = equalize_histogram(img)
        twice = equalize_histogram(once)
        assert np.abs(twice.levels - once.levels).max() <= 1

    def test_16_bit_range(self):
        rng = np.random.default_rng(5)
        img = gray(rng.integers(1000, 2000, (16, 16)), bit_depth=16)
        out = equalize_histogram(img)
        assert out.bit_depth == 16
        assert out.levels.max() == 65535

    @settings(max_examples=50, deadline=None)
    @given(
        hnp.arrays(
            np.int64,
            hnp.array_shapes(min_dims=2, max_dims=2, min_side=2, max_side=12),
            elements=st.integers(0, 255),
        )
    )
    def test_preserves_level_ordering(self, levels):
        out = equalize_histogram(gray(levels))
        flat_in = levels.ravel()
        flat_out = out.levels.ravel()
        order = np.argsort(flat_in, kind="stable")
        diffs = np.diff(flat_out[order])
        assert (diffs >= 0).all()
        # equal inputs stay equal
        for v in np.unique(flat_in):
            assert len(np.unique(flat_out[flat_in == v])) == 1
