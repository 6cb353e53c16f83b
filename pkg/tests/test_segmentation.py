"""Region growing, threshold sweeps, review bundles and selections."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import gray
from mammocad.errors import PipelineError
from mammocad.imaging import RoiRecord
from mammocad.segmentation import (
    CandidateSet,
    SelectionEntry,
    apply_selection,
    auto_select,
    emit_review_bundle,
    grow_region,
    is_simple_polygon,
    load_review_bundle,
    load_selections,
    rasterize_polygon,
    resolve_selection,
    save_selections,
    threshold_sweep,
)
from oracles import grow_reference


def random_image(seed: int, side: int = 32):
    rng = np.random.default_rng(seed)
    return gray(rng.integers(0, 256, (side, side)))


class TestGrowRegion:
    def test_matches_flood_fill_oracle(self):
        for seed in range(25):
            img = random_image(seed)
            rng = np.random.default_rng(1000 + seed)
            pos = (int(rng.integers(32)), int(rng.integers(32)))
            t = float(rng.integers(0, 120))
            mask = grow_region(img, pos, t)
            np.testing.assert_array_equal(
                mask.bits, grow_reference(img.levels, pos, t), err_msg=f"seed {seed}"
            )

    def test_compares_against_seed_not_region(self):
        # a ramp: adaptive growth would creep along it, fixed-seed must stop
        img = gray([[0, 4, 8, 12, 16]])
        mask = grow_region(img, (0, 0), 5.0)
        np.testing.assert_array_equal(mask.bits, [[True, True, False, False, False]])

    def test_eight_connectivity_spans_diagonals(self):
        img = gray([[5, 99], [99, 5]])
        mask = grow_region(img, (0, 0), 1.0)
        assert mask.bits[1, 1] and not mask.bits[0, 1]

    def test_zero_threshold_is_equal_value_component(self):
        img = gray([[7, 7, 1], [1, 1, 1], [7, 1, 7]])
        mask = grow_region(img, (0, 0), 0.0)
        assert mask.bits[0, 0] and mask.bits[0, 1]
        assert not mask.bits[2, 0]  # equal value but disconnected
        assert not mask.bits[2, 2]

    def test_seed_always_included(self):
        img = random_image(3)
        mask = grow_region(img, (5, 5), 0.0)
        assert mask.bits[5, 5]
        assert mask.seed == (5, 5)

    def test_seed_out_of_bounds(self):
        with pytest.raises(PipelineError) as exc:
            grow_region(random_image(0), (40, 2), 1.0)
        assert exc.value.code == "seed-out-of-bounds"

    def test_single_connected_component(self):
        from scipy import ndimage

        for seed in range(10):
            img = random_image(seed)
            mask = grow_region(img, (16, 16), 60.0)
            _, n = ndimage.label(mask.bits, structure=np.ones((3, 3)))
            assert n == 1


class TestThresholdSweep:
    def test_nested_and_strictly_growing(self):
        for seed in range(15):
            cands = threshold_sweep(random_image(seed), steps=32)
            counts = [c.pixel_count for c in cands.candidates]
            assert counts == sorted(set(counts)), "pixel counts must strictly increase"
            for small, big in zip(cands.candidates, cands.candidates[1:]):
                assert not (small.bits & ~big.bits).any(), "masks must nest"

    def test_thresholds_increasing_and_span_range(self):
        img = random_image(7)
        cands = threshold_sweep(img, steps=64)
        ts = [c.threshold for c in cands.candidates]
        assert ts == sorted(ts)
        assert ts[0] == 0.0
        span = int(img.levels.max()) - int(img.levels.min())
        assert ts[-1] <= span
        # the final threshold admits every pixel
        assert cands.candidates[-1].pixel_count == img.levels.size

    def test_constant_image_collapses_to_one_candidate(self):
        cands = threshold_sweep(gray(np.full((8, 8), 9)), steps=16)
        assert len(cands) == 1
        assert cands.candidates[0].pixel_count == 64

    def test_default_seed_is_center(self):
        cands = threshold_sweep(random_image(1), steps=8)
        assert cands.seed == (16, 16)

    def test_steps_validation(self):
        with pytest.raises(ValueError):
            threshold_sweep(random_image(0), steps=1)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 10_000), st.integers(2, 24))
    def test_dedup_never_repeats_a_mask(self, seed, steps):
        img = random_image(seed, side=12)
        cands = threshold_sweep(img, steps=steps)
        seen = {c.bits.tobytes() for c in cands.candidates}
        assert len(seen) == len(cands)


class TestAutoSelect:
    def test_picks_largest_at_most_half(self):
        img = gray(
            [
                [100, 100, 0, 0],
                [100, 100, 0, 0],
                [0, 0, 0, 0],
                [0, 0, 0, 0],
            ]
        )
        cands = threshold_sweep(img, steps=8, seed=(0, 0))
        idx = auto_select(cands)
        assert cands.candidates[idx].pixel_count <= img.levels.size / 2
        bigger = [
            c.pixel_count
            for c in cands.candidates
            if c.pixel_count <= img.levels.size / 2
        ]
        assert cands.candidates[idx].pixel_count == max(bigger)

    def test_falls_back_to_smallest(self):
        cands = threshold_sweep(gray(np.full((6, 6), 3)), steps=4)
        assert auto_select(cands) == 0


def make_roi(seed: int = 0, side: int = 16) -> RoiRecord:
    rng = np.random.default_rng(seed)
    return RoiRecord(
        roi_id=f"roi-{seed:03d}",
        image=gray(rng.integers(0, 256, (side, side)), spacing_mm=0.3),
        patient_age=57.0,
        birads_label="B-3",
        view="MLO",
    )


class TestReviewBundles:
    def test_round_trip_masks_bit_exact(self, tmp_path):
        roi = make_roi(5)
        cands = threshold_sweep(roi.image, steps=16, roi_id=roi.roi_id)
        bundle_dir = emit_review_bundle(roi, cands, tmp_path)
        desc, roi2, cands2 = load_review_bundle(bundle_dir)
        assert desc["roi_id"] == roi.roi_id
        assert desc["candidate_count"] == len(cands)
        assert roi2.patient_age == roi.patient_age
        assert roi2.view == "MLO"
        np.testing.assert_array_equal(roi2.image.levels, roi.image.levels)
        assert len(cands2) == len(cands)
        for a, b in zip(cands.candidates, cands2.candidates):
            np.testing.assert_array_equal(a.bits, b.bits)
            assert a.threshold == b.threshold

    def test_descriptor_lists_increasing_thresholds(self, tmp_path):
        roi = make_roi(6)
        cands = threshold_sweep(roi.image, steps=16, roi_id=roi.roi_id)
        bundle_dir = emit_review_bundle(roi, cands, tmp_path)
        desc, _, _ = load_review_bundle(bundle_dir)
        ts = [c["threshold"] for c in desc["candidates"]]
        assert ts == sorted(ts)
        counts = [c["pixel_count"] for c in desc["candidates"]]
        assert counts == sorted(set(counts))

    def test_missing_descriptor_key(self, tmp_path):
        roi = make_roi(7)
        cands = threshold_sweep(roi.image, steps=8, roi_id=roi.roi_id)
        bundle_dir = emit_review_bundle(roi, cands, tmp_path)
        desc_file = bundle_dir / "bundle.json"
        import json

        doc = json.loads(desc_file.read_text())
        del doc["seed_xy"]
        desc_file.write_text(json.dumps(doc))
        with pytest.raises(PipelineError) as exc:
            load_review_bundle(bundle_dir)
        assert exc.value.code == "schema"

    def test_rerun_is_byte_identical(self, tmp_path):
        roi = make_roi(8)
        cands = threshold_sweep(roi.image, steps=8, roi_id=roi.roi_id)
        d1 = emit_review_bundle(roi, cands, tmp_path / "a")
        d2 = emit_review_bundle(roi, cands, tmp_path / "b")
        for f1 in sorted(d1.iterdir()):
            assert f1.read_bytes() == (d2 / f1.name).read_bytes()


class TestSelections:
    def test_round_trip(self, tmp_path):
        entries = {
            "roi-b": SelectionEntry(2, None, "alice", "2024-01-01T00:00:00+00:00"),
            "roi-a": SelectionEntry(0, [(1.0, 2.0), (5.0, 2.0), (3.0, 6.0)], "bob", ""),
        }
        save_selections(entries, tmp_path / "sel.json")
        back = load_selections(tmp_path / "sel.json")
        assert back.keys() == entries.keys()
        assert back["roi-b"].candidate_index == 2
        assert back["roi-a"].contour == [(1.0, 2.0), (5.0, 2.0), (3.0, 6.0)]
        assert back["roi-b"].reviewer == "alice"

    def test_bad_entry(self, tmp_path):
        (tmp_path / "sel.json").write_text('{"version": 1, "entries": {"r": {}}}')
        with pytest.raises(PipelineError) as exc:
            load_selections(tmp_path / "sel.json")
        assert exc.value.code == "schema"


class TestSimplePolygon:
    def test_square_ok(self):
        assert is_simple_polygon([(0, 0), (4, 0), (4, 4), (0, 4)])

    def test_triangle_ok(self):
        assert is_simple_polygon([(0, 0), (5, 1), (2, 6)])

    def test_bowtie_rejected(self):
        assert not is_simple_polygon([(0, 0), (4, 4), (4, 0), (0, 4)])

    def test_too_few_vertices(self):
        assert not is_simple_polygon([(0, 0), (4, 4)])

    def test_zero_length_edge(self):
        assert not is_simple_polygon([(0, 0), (0, 0), (4, 0), (2, 3)])

    def test_spike_revisiting_edge(self):
        # the edge returns along itself through a collinear vertex
        assert not is_simple_polygon([(0, 0), (4, 0), (2, 0), (2, 3)])


class TestRasterize:
    def test_square_block(self):
        bits = rasterize_polygon([(1, 1), (4, 1), (4, 4), (1, 4)], (6, 6))
        expected = np.zeros((6, 6), dtype=bool)
        expected[1:5, 1:5] = True
        np.testing.assert_array_equal(bits, expected)

    def test_matches_scalar_oracle(self):
        from oracles import point_in_polygon_reference

        rng = np.random.default_rng(11)
        polys = [
            [(2.0, 1.0), (9.5, 2.5), (7.0, 9.0), (1.5, 6.5)],
            [(0.0, 0.0), (10.0, 0.0), (5.0, 9.0)],
            [(3.2, 0.8), (8.8, 4.1), (6.0, 9.3), (0.7, 7.7), (1.1, 3.3)],
        ]
        for verts in polys:
            bits = rasterize_polygon(verts, (11, 11))
            for r in range(11):
                for c in range(11):
                    assert bits[r, c] == point_in_polygon_reference(
                        float(c), float(r), verts
                    ), (verts, r, c)


class TestApplySelection:
    def _cands(self):
        roi = make_roi(9, side=12)
        return threshold_sweep(roi.image, steps=12, roi_id=roi.roi_id)

    def test_plain_index(self):
        cands = self._cands()
        out = apply_selection(cands, SelectionEntry(1))
        np.testing.assert_array_equal(out.bits, cands.candidates[1].bits)
        assert out.threshold == cands.candidates[1].threshold

    def test_index_out_of_range(self):
        with pytest.raises(PipelineError) as exc:
            apply_selection(self._cands(), SelectionEntry(99))
        assert exc.value.code == "bad-selection"

    def test_contour_overrides_mask(self):
        cands = self._cands()
        entry = SelectionEntry(0, contour=[(2, 2), (8, 2), (8, 8), (2, 8)])
        out = apply_selection(cands, entry)
        expected = np.zeros((12, 12), dtype=bool)
        expected[2:9, 2:9] = True
        np.testing.assert_array_equal(out.bits, expected)
        assert out.threshold == cands.candidates[0].threshold

    def test_self_intersecting_contour(self):
        entry = SelectionEntry(0, contour=[(0, 0), (4, 4), (4, 0), (0, 4)])
        with pytest.raises(PipelineError) as exc:
            apply_selection(self._cands(), entry)
        assert exc.value.code == "bad-selection"

    def test_empty_contour_interior(self):
        entry = SelectionEntry(0, contour=[(50, 50), (60, 50), (55, 60)])
        with pytest.raises(PipelineError) as exc:
            apply_selection(self._cands(), entry)
        assert exc.value.code == "bad-selection"

    def test_resolve_missing_roi(self):
        with pytest.raises(PipelineError) as exc:
            resolve_selection(self._cands(), {})
        assert exc.value.code == "unreviewed-roi"

    def test_resolve_found(self):
        cands = self._cands()
        out = resolve_selection(cands, {cands.roi_id: SelectionEntry(0)})
        np.testing.assert_array_equal(out.bits, cands.candidates[0].bits)


class TestCandidateSetInvariants:
    def test_rejects_non_nested_counts(self):
        img = gray(np.arange(16).reshape(4, 4))
        a = grow_region(img, (0, 0), 3.0)
        b = grow_region(img, (0, 0), 1.0)
        with pytest.raises(ValueError):
            CandidateSet("x", [a, b], 2, (0, 0))
