import dataclasses
import math

import numpy as np
import pytest

from memfuzzy.compiler import MembershipSpec, QuantizationGrid, Tabulated, compile_antidiagonal, compile_rows
from memfuzzy.crossbar import CrossbarArray, write_pulse
from memfuzzy.device import DeviceParams, closed_form_memristance, state_for_memristance
from memfuzzy.programming import (
    NonConvergence,
    ProgramConfig,
    estimate_pulses,
    measure_all,
    measure_cell,
    program_cell,
    program_matrix,
)

P = DeviceParams()
R = P.r_on


def set_cell(array, row, col, m):
    array.x[row, col] = state_for_memristance(array.params, m).x


class TestConfig:
    @pytest.mark.parametrize("kw", [dict(write_voltage=0), dict(pulse_width=0),
                                    dict(rel_tolerance=1.0), dict(rel_tolerance=0),
                                    dict(max_pulses_per_cell=0), dict(max_sweeps=-1)])
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            ProgramConfig(**kw)

    def test_width_modes(self):
        assert ProgramConfig().width_for(8e3, 16e3) == pytest.approx(8e-3 / 4)
        assert ProgramConfig(scale_width=False).width_for(8e3, 16e3) == 8e-3


class TestMeasure:
    @pytest.mark.parametrize("m", [R, 4 * R, P.r_off])
    def test_inverts_read(self, m):
        a = CrossbarArray(2, 3)
        set_cell(a, 1, 2, m)
        assert measure_cell(a, 1, 2) == pytest.approx(m, rel=1e-15)

    def test_index(self):
        with pytest.raises(IndexError):
            measure_cell(CrossbarArray(2, 3), 2, 0)

    def test_measure_all_matches_state(self):
        rng = np.random.default_rng(0)
        a = CrossbarArray(3, 4, x=rng.uniform(0, 1, (3, 4)), scale=rng.uniform(0.5, 2, (3, 4)))
        np.testing.assert_allclose(measure_all(a), a.memristances(), rtol=1e-14)


class TestProgramCell:
    def test_already_there(self):
        a = CrossbarArray(1, 1)
        b, n = program_cell(a, 0, 0, P.r_off)
        assert n == 0 and np.array_equal(a.x, b.x)

    def test_to_quarter_grade(self):
        a = CrossbarArray(2, 2)
        b, n = program_cell(a, 0, 1, 4 * R)
        assert abs(measure_cell(b, 0, 1) - 4 * R) <= 0.01 * 4 * R
        assert n == estimate_pulses(P, P.r_off, 4 * R)
        # constant fractional step in M^2: pulses ~ ln(M0^2 / M_upper^2) / -ln(1 - rho)
        cfg = ProgramConfig()
        rho = 2 * P.delta_r * P.drift_coefficient * cfg.write_voltage * cfg.pulse_width / P.r_off ** 2
        predicted = math.log(P.r_off ** 2 / (4 * R * 1.01) ** 2) / -math.log(1 - rho)
        assert abs(n - predicted) <= 1

    def test_fixed_width_count_formula(self):
        cfg = ProgramConfig(scale_width=False, pulse_width=1e-3)
        m0, target = P.r_off, 8e3
        n = program_cell(CrossbarArray(1, 1), 0, 0, target, cfg)[1]
        c = 2 * P.delta_r * P.drift_coefficient * cfg.write_voltage * cfg.pulse_width
        assert abs(n - (m0 ** 2 - target ** 2) / c) <= 0.01 * target ** 2 * 4 / c
        assert n == math.ceil((m0 ** 2 - (target * 1.01) ** 2) / c)

    def test_upward(self):
        a = CrossbarArray(1, 1)
        set_cell(a, 0, 0, 300.0)
        b, n = program_cell(a, 0, 0, 5e3)
        assert n > 0 and abs(measure_cell(b, 0, 0) - 5e3) <= 50

    def test_coarse_pulse_does_not_converge(self):
        # one fixed 5 ms pulse near 500 ohm moves M by ~ k dR v tau / M = 3 kOhm
        cfg = ProgramConfig(scale_width=False, pulse_width=5e-3, rel_tolerance=0.01,
                            max_pulses_per_cell=200)
        per_pulse = (closed_form_memristance(P, 600.0, -1.0, 5e-3) - 600.0)
        assert per_pulse > 2 * 0.01 * 500
        with pytest.raises(NonConvergence) as info:
            program_cell(CrossbarArray(2, 2), 1, 0, 500.0, cfg)
        assert (info.value.row, info.value.col) == (1, 0)
        # a finer pulse fixes it
        fine = ProgramConfig(scale_width=False, pulse_width=5e-7, rel_tolerance=0.01)
        a = CrossbarArray(2, 2)
        set_cell(a, 1, 0, 600.0)
        program_cell(a, 1, 0, 500.0, fine)

    def test_target_range(self):
        with pytest.raises(ValueError):
            program_cell(CrossbarArray(1, 1), 0, 0, 50.0)

    def test_each_pulse_moves_toward_target(self):
        cfg = ProgramConfig()
        a = CrossbarArray(1, 2)
        set_cell(a, 0, 1, 3e3)
        target = 700.0
        m = measure_cell(a, 0, 1)
        for _ in range(2000):
            if abs(m - target) <= cfg.rel_tolerance * target:
                break
            v = cfg.write_voltage if m > target else -cfg.write_voltage
            a = write_pulse(a, 0, 1, v, cfg.width_for(m, P.r_off))
            new = measure_cell(a, 0, 1)
            assert np.sign(new - m) == np.sign(target - m)
            m = new
        n = program_cell(CrossbarArray(1, 2, x=[[0.0, state_for_memristance(P, 3e3).x]]),
                         0, 1, target)[1]
        assert n == estimate_pulses(P, 3e3, target)


class TestProgramMatrix:
    def test_all_off(self):
        grid = QuantizationGrid(0, 4, 1)
        tm = compile_rows([MembershipSpec("z", Tabulated([(0, 0), (4, 0)]))], grid)
        a, rep = program_matrix(CrossbarArray(1, 5), tm)
        assert rep.converged and rep.total_pulses == 0 and rep.sweeps == 1

    def test_two_set_programmed(self, two_set_programmed, two_set_targets):
        a, rep = two_set_programmed
        assert rep.converged and rep.sweeps <= 5
        t = two_set_targets.values
        m = measure_all(a)
        programmed = t != P.r_off
        assert np.all(np.abs(m - t)[programmed] <= 0.01 * t[programmed])
        assert np.all(rep.rel_errors[programmed] <= 0.01)
        assert np.all(rep.pulse_counts[~programmed] == 0)
        # subthreshold half-select: untouched cells stay exactly at r_off
        assert np.all(a.x[~programmed] == 0.0) and rep.max_disturb == 0.0

    def test_deterministic(self, two_set_targets):
        r1 = program_matrix(CrossbarArray(2, 14), two_set_targets)
        r2 = program_matrix(CrossbarArray(2, 14), two_set_targets)
        assert np.array_equal(r1[0].x, r2[0].x)
        assert r1[1].to_dict() == r2[1].to_dict()

    def test_shape_mismatch(self, two_set_targets):
        with pytest.raises(ValueError):
            program_matrix(CrossbarArray(3, 14), two_set_targets)

    def test_zero_sweeps(self, two_set_targets):
        with pytest.raises(NonConvergence) as info:
            program_matrix(CrossbarArray(2, 14), two_set_targets, ProgramConfig(max_sweeps=0))
        assert info.value.report is not None and not info.value.report.converged

    def test_rerun_is_idempotent(self, two_set_programmed, two_set_targets):
        a, _ = two_set_programmed
        b, rep = program_matrix(a, two_set_targets)
        assert rep.total_pulses == 0 and rep.converged and np.array_equal(a.x, b.x)

    def test_disturb_accounting(self):
        # threshold-free device: V/2 half-select does move the neighbours
        p = DeviceParams(v_threshold=0.0)
        spec = MembershipSpec("s", Tabulated([(0, 0.05), (1, 0.08), (2, 0.1)]))
        tm = compile_antidiagonal(spec, QuantizationGrid(0, 2, 1), params=p)
        cfg = ProgramConfig()
        a, rep = program_matrix(CrossbarArray(3, 3, p), tm, cfg)
        assert rep.converged
        off = tm.values == p.r_off
        m = a.memristances()
        direct = np.max(np.abs(m[off] - p.r_off) / p.r_off)
        assert direct > 0
        assert rep.max_disturb == pytest.approx(direct, rel=1e-9)
        # worst case: every pulse on a shared line pushed the cell downward at v/2
        for i, j in zip(*np.nonzero(off)):
            line_time = rep.pulse_time[i, :].sum() + rep.pulse_time[:, j].sum()
            bound = closed_form_memristance(p, p.r_off, cfg.write_voltage / 2, line_time)
            assert m[i, j] >= bound * (1 - 1e-9)
        assert rep.max_disturb <= 1 - closed_form_memristance(
            p, p.r_off, cfg.write_voltage / 2, rep.pulse_time.sum()) / p.r_off

    def test_report_dict(self, two_set_programmed):
        d = two_set_programmed[1].to_dict()
        assert d["converged"] is True and len(d["pulse_counts"]) == 2
        assert d["max_rel_error"] <= 0.01

    @pytest.mark.parametrize("d,bound", [(0.0, 0.0), (0.2, 0.25), (0.5, 1.0), (1.0, math.inf),
                                         (3.0, math.inf)])
    def test_grade_bound(self, two_set_programmed, d, bound):
        rep = dataclasses.replace(two_set_programmed[1], max_disturb=d)
        assert rep.grade_disturb_bound == pytest.approx(bound)
        # grade = R/M: M -> M(1 - d) raises the grade by d/(1-d)
        if d < 1:
            assert abs(1 / (1 - d) - 1) == pytest.approx(bound)
