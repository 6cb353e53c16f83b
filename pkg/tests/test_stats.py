"""The 7-statistic pooling used across margin and texture features."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mammocad.errors import PipelineError
from mammocad.features.stats import STAT_NAMES, central_moments, stats7
from oracles import moments_reference, stats7_reference

finite_floats = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)


class TestCentralMoments:
    @settings(max_examples=100, deadline=None)
    @given(st.lists(finite_floats, min_size=1, max_size=40))
    def test_matches_loop_reference(self, xs):
        got = central_moments(np.array(xs))
        want = moments_reference(xs)
        scale = max(1.0, max(abs(v) for v in xs)) ** 4
        np.testing.assert_allclose(got, want, rtol=1e-9, atol=1e-9 * scale)


class TestStats7:
    def test_names(self):
        assert STAT_NAMES == (
            "mean",
            "maximum",
            "minimum",
            "standard_deviation",
            "variance",
            "skewness",
            "kurtosis",
        )

    def test_known_triple(self):
        # {1,2,3}: population variance 2/3, symmetric so skewness 0,
        # kurtosis m4/m2^2 = (2*1/3)/(4/9) = 1.5
        out = stats7([1.0, 2.0, 3.0])
        np.testing.assert_allclose(
            out, [2.0, 3.0, 1.0, np.sqrt(2 / 3), 2 / 3, 0.0, 1.5], atol=1e-12
        )

    def test_constant_input(self):
        out = stats7([4.2, 4.2, 4.2])
        np.testing.assert_allclose(out, [4.2, 4.2, 4.2, 0.0, 0.0, 0.0, 0.0])

    def test_single_value(self):
        out = stats7([7.0])
        np.testing.assert_allclose(out, [7.0, 7.0, 7.0, 0.0, 0.0, 0.0, 0.0])

    def test_empty_input(self):
        with pytest.raises(PipelineError) as exc:
            stats7([])
        assert exc.value.code == "empty-stats"

    def test_near_constant_treated_as_constant(self):
        # spread below rounding noise (variance <= 1e-24 at unit scale)
        # zeroes the spread statistics instead of amplifying noise
        out = stats7([0.0, 1e-13])
        np.testing.assert_allclose(out[3:], [0.0, 0.0, 0.0, 0.0])

    def test_small_but_real_spread_kept(self):
        out = stats7([0.0, 1e-3])
        assert out[4] == pytest.approx(2.5e-7)
        assert out[6] == pytest.approx(1.0)  # two points: kurtosis is 1

    def test_right_skew_positive(self):
        assert stats7([0.0, 0.0, 0.0, 10.0])[5] > 0

    def test_left_skew_negative(self):
        assert stats7([0.0, 10.0, 10.0, 10.0])[5] < 0

    @settings(max_examples=150, deadline=None)
    @given(st.lists(finite_floats, min_size=1, max_size=30))
    def test_matches_reference(self, xs):
        got = stats7(np.array(xs))
        want = stats7_reference(xs)
        np.testing.assert_allclose(got, want, rtol=1e-7, atol=1e-7)

    @settings(max_examples=60, deadline=None)
    @given(
        st.lists(finite_floats, min_size=2, max_size=20),
        st.floats(0.1, 100.0),
    )
    def test_scaling_behaviour(self, xs, factor):
        base = stats7(np.array(xs))
        scaled = stats7(np.array(xs) * factor)
        if base[4] == 0.0:
            return  # constant input: shape statistics pinned to 0
        # mean/max/min/std scale linearly, variance quadratically,
        # skewness and kurtosis are scale-free
        np.testing.assert_allclose(scaled[:4], base[:4] * factor, rtol=1e-6)
        assert scaled[4] == pytest.approx(base[4] * factor**2, rel=1e-6)
        assert scaled[5] == pytest.approx(base[5], rel=1e-5, abs=1e-7)
        assert scaled[6] == pytest.approx(base[6], rel=1e-5, abs=1e-7)

    @settings(max_examples=60, deadline=None)
    @given(st.lists(finite_floats, min_size=1, max_size=20), st.randoms())
    def test_permutation_invariant(self, xs, rand):
        shuffled = list(xs)
        rand.shuffle(shuffled)
        # atol absorbs summation-order noise when a central moment cancels
        # to ~0 (e.g. skew of two near-symmetric pairs)
        np.testing.assert_allclose(
            stats7(np.array(xs)), stats7(np.array(shuffled)), rtol=1e-7, atol=1e-9
        )

    def test_min_max_bracket_mean(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            xs = rng.normal(size=rng.integers(1, 30))
            mean, mx, mn = stats7(xs)[:3]
            assert mn <= mean <= mx
