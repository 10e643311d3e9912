import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from memfuzzy.device import (
    DeviceParams,
    DeviceState,
    apply_bias,
    apply_bias_array,
    closed_form_memristance,
    memristance,
    saturation_time,
    state_for_memristance,
)

P = DeviceParams()


def rel(a, b):
    return abs(a - b) / abs(b)


class TestParams:
    def test_defaults(self):
        assert (P.r_on, P.r_off, P.length_d, P.mobility) == (100.0, 16e3, 10e-9, 1e-14)
        assert P.drift_coefficient == pytest.approx(1e4)

    @pytest.mark.parametrize("kw", [
        dict(r_on=0.0), dict(r_on=2e4), dict(length_d=0.0), dict(mobility=-1.0),
        dict(v_threshold=-0.1),
    ])
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            DeviceParams(**kw)

    @pytest.mark.parametrize("x", [-1e-9, 1.0000001])
    def test_state_bounds(self, x):
        with pytest.raises(ValueError):
            DeviceState(x)


class TestMemristance:
    def test_limits(self):
        assert memristance(P, DeviceState(1.0)) == P.r_on
        assert memristance(P, DeviceState(0.0)) == P.r_off

    def test_midpoint(self):
        # 100 * 0.5 + 16000 * 0.5
        assert memristance(P, DeviceState(0.5)) == pytest.approx(8050.0, rel=1e-15)

    @given(st.floats(0, 1), st.floats(0, 1))
    def test_affine(self, x1, x2):
        mid = memristance(P, DeviceState(0.5 * (x1 + x2)))
        avg = 0.5 * (memristance(P, DeviceState(x1)) + memristance(P, DeviceState(x2)))
        assert mid == pytest.approx(avg, rel=1e-12)

    @given(st.floats(0, 1), st.floats(0, 1))
    def test_strictly_decreasing(self, x1, x2):
        m1, m2 = memristance(P, DeviceState(x1)), memristance(P, DeviceState(x2))
        if x2 - x1 > 1e-12:
            assert m1 > m2
        elif x1 <= x2:
            assert m1 >= m2

    @given(st.floats(100, 16e3))
    def test_inverse(self, m):
        assert memristance(P, state_for_memristance(P, m)) == pytest.approx(m, rel=1e-12)


class TestClosedForm:
    def test_t_zero(self):
        assert closed_form_memristance(P, 5000.0, 1.0, 0.0) == 5000.0

    def test_clamps_at_r_on(self):
        t = 2 * saturation_time(P, 5000.0, 1.0)
        assert closed_form_memristance(P, 5000.0, 1.0, t) == P.r_on

    def test_negative_grows_to_r_off(self):
        m0 = 2000.0
        ts = saturation_time(P, m0, -1.0)
        ms = [closed_form_memristance(P, m0, -1.0, f * ts) for f in (0.1, 0.5, 0.9)]
        assert ms == sorted(ms) and ms[0] > m0
        # M^2 grows linearly in t
        k = 2 * P.delta_r * P.drift_coefficient
        assert ms[1] == pytest.approx(math.sqrt(m0 ** 2 + k * 0.5 * ts), rel=1e-14)
        assert closed_form_memristance(P, m0, -1.0, 2 * ts) == P.r_off

    def test_below_threshold_is_inert(self):
        assert closed_form_memristance(P, 5000.0, 0.5, 1.0) == 5000.0


class TestApplyBias:
    def test_zero_drive(self):
        s = DeviceState(0.3)
        assert apply_bias(P, s, 0.0, 10.0) == s

    def test_subthreshold(self):
        s = DeviceState(0.3)
        assert apply_bias(P, s, 0.7, 10.0) == s
        assert apply_bias(P, s, -0.75, 10.0) == s

    def test_saturation(self):
        s = apply_bias(P, DeviceState(0.0), 5.0, 100.0)
        assert s.x == 1.0 and memristance(P, s) == P.r_on
        s = apply_bias(P, DeviceState(1.0), -5.0, 100.0)
        assert s.x == 0.0 and memristance(P, s) == P.r_off

    @pytest.mark.parametrize("m0,v", [(16e3, 1.0), (8e3, 2.0), (3e3, -1.0), (12e3, -3.0)])
    def test_matches_closed_form_ten_points(self, m0, v):
        ts = saturation_time(P, m0, v)
        s0 = state_for_memristance(P, m0)
        for t in np.linspace(0.09, 0.9, 10) * ts:
            m = memristance(P, apply_bias(P, s0, v, t))
            assert rel(m, closed_form_memristance(P, m0, v, t)) <= 1e-6

    def test_low_start_reverse_needs_more_steps(self):
        # square-root profile near M=0 makes the start of a reverse drive from low M stiff
        m0, v = 400.0, -1.0
        t = 0.75 * saturation_time(P, m0, v)
        exact = closed_form_memristance(P, m0, v, t)
        m = memristance(P, apply_bias(P, state_for_memristance(P, m0), v, t, steps=4096))
        assert rel(m, exact) <= 1e-6

    def test_validation(self):
        with pytest.raises(ValueError):
            apply_bias(P, DeviceState(0.5), 1.0, -1.0)
        with pytest.raises(ValueError):
            apply_bias(P, DeviceState(0.5), 1.0, 1.0, steps=0)

    def test_array_version_agrees(self):
        x = np.array([0.0, 0.2, 0.7, 1.0])
        scale = np.array([1.0, 0.5, 2.0, 1.0])
        out = apply_bias_array(scale * P.r_on, scale * P.r_off, x, -1.2, 0.01, P, steps=16)
        for i in range(len(x)):
            ref = apply_bias(P.scaled(scale[i]), DeviceState(x[i]), -1.2, 0.01, steps=16)
            assert out[i] == pytest.approx(ref.x, abs=1e-13)

    @settings(max_examples=60, deadline=None)
    @given(st.floats(0.0, 1.0), st.floats(-3, 3), st.floats(0, 0.05))
    def test_monotone(self, x, v, t):
        s = apply_bias(P, DeviceState(x), v, t, steps=32)
        if v > 0:
            assert s.x >= x
        elif v < 0:
            assert s.x <= x
        assert 0.0 <= s.x <= 1.0

    @settings(max_examples=40, deadline=None)
    @given(st.floats(2e3, 16e3), st.sampled_from([-2.0, -1.0, 1.0, 2.0]),
           st.floats(0.05, 0.85), st.floats(0.1, 0.9))
    def test_semigroup(self, m0, v, frac, split):
        t = frac * saturation_time(P, m0, v)
        s0 = state_for_memristance(P, m0)
        once = apply_bias(P, s0, v, t)
        twice = apply_bias(P, apply_bias(P, s0, v, split * t), v, (1 - split) * t)
        assert rel(memristance(P, twice), memristance(P, once)) <= 1e-8

    @settings(max_examples=40, deadline=None)
    @given(st.floats(2e3, 15e3), st.sampled_from([1.0, 2.0]), st.floats(0.05, 0.6))
    def test_reversible_away_from_clamps(self, m0, v, frac):
        t = frac * saturation_time(P, m0, v)
        s0 = state_for_memristance(P, m0)
        back = apply_bias(P, apply_bias(P, s0, v, t), -v, t)
        assert rel(memristance(P, back), m0) <= 1e-8
