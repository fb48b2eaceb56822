from fractions import Fraction as F

import pytest

from apmeasure import (
    FaithfulnessError,
    Interval,
    PiecewiseLinearFn,
    almost_period_certificate,
    almost_period_defect,
    build_stage,
    bump,
    combine,
    convolution_value,
    convolve,
    limit_window,
    make_measure,
    radius_series_tail_bound,
    sup_abs,
    sup_abs_diff,
    triangle_test_function,
)
from helpers import grid_max_abs_diff, indicator_overlap_bump, integer_comb, pointwise_convolution

TRIANGLE = triangle_test_function()
J_UNIT = Interval.closed(F(-1, 2), F(1, 2))


class TestPiecewiseLinearFn:
    def test_validation(self):
        with pytest.raises(ValueError):
            PiecewiseLinearFn((0, 0), (1, 1))
        with pytest.raises(ValueError):
            PiecewiseLinearFn((0, 1), (1, 0))  # nonzero at left support edge
        with pytest.raises(ValueError):
            PiecewiseLinearFn((0,), (1,))  # single point cannot be zero outside
        PiecewiseLinearFn((0,), (1,), zero_outside=False)

    def test_eval_and_extension(self):
        assert TRIANGLE.eval(0) == 1
        assert TRIANGLE.eval(F(1, 12)) == F(1, 2)
        assert TRIANGLE.eval(5) == 0
        window_fn = PiecewiseLinearFn((0, 1), (2, 4), zero_outside=False)
        assert window_fn.eval(F(1, 2)) == 3
        with pytest.raises(FaithfulnessError):
            window_fn.eval(2)

    def test_translate_scale(self):
        g = TRIANGLE.translate(F(1, 12)).scale(2)
        assert g.eval(F(1, 12)) == 2
        assert g.eval(F(1, 12) + F(1, 6)) == 0

    def test_max_abs_slope(self):
        assert TRIANGLE.max_abs_slope() == 6

    def test_canonical_drops_collinear(self):
        g = PiecewiseLinearFn((0, 1, 2, 3), (0, 1, 1, 0))
        h = PiecewiseLinearFn((0, 1, F(3, 2), 2, 3), (0, 1, 1, 1, 0))
        assert h.canonical() == g

    def test_slope_changes_roundtrip(self):
        changes = TRIANGLE.slope_changes()
        assert [c[0] for c in changes] == [F(-1, 6), F(0), F(1, 6)]
        assert sum(c[1] for c in changes) == 0


class TestBump:
    def test_plateau_and_support_edges(self):
        phi = bump(1, 1)
        assert phi.eval(2) == 1
        assert phi.eval(4) == 0
        assert phi.eval(3) == F(1, 2)
        assert phi.eval(0) == 1

    def test_plateau_everywhere(self):
        for v, j in [(F(1, 16), 1), (F(1, 3), 2), (F(2), 5)]:
            phi = bump(v, j)
            assert phi.eval(0) == 1
            assert phi.eval((3 * j - 1) * v) == 1
            assert phi.eval(-(3 * j + 1) * v) == 0

    def test_bounded_by_one(self):
        phi = bump(F(1, 5), 3)
        assert all(0 <= val <= 1 for val in phi.values)

    def test_matches_indicator_overlap(self):
        v, j = F(1, 4), 2
        phi = bump(v, j)
        for i in range(-40, 41):
            x = F(i, 16)
            assert phi.eval(x) == indicator_overlap_bump(v, j, x)

    def test_invalid_params(self):
        with pytest.raises(ValueError):
            bump(0, 1)
        with pytest.raises(ValueError):
            bump(1, 0)


class TestConvolve:
    def test_identity_with_origin_mass(self):
        mu = make_measure([(0, 1)], Interval.closed(-2, 2))
        g = convolve(TRIANGLE, mu, Interval.closed(-1, 1))
        for i in range(-12, 13):
            x = F(i, 12)
            assert g.eval(x) == TRIANGLE.eval(x)

    def test_stage1_value(self):
        mu1 = build_stage(1).measure
        # both atoms 15/16 and 17/16 are within reach 1/6 of x = 15/16
        expected = F(1, 2) * 1 + F(1, 2) * F(1, 4)
        assert convolution_value(TRIANGLE, mu1, F(15, 16)) == expected == F(5, 8)
        assert pointwise_convolution(TRIANGLE, mu1, F(15, 16)) == expected

    def test_cell_three_value(self):
        mu = limit_window(Interval.closed(2, 4))
        assert convolution_value(TRIANGLE, mu, 3) == 1 - F(9, 1024)

    def test_curve_matches_pointwise_oracle(self):
        mu2 = build_stage(2).measure
        J = Interval.closed(F(-5, 4), F(5, 4))
        g = convolve(TRIANGLE, mu2, J)
        for i in range(-20, 21):
            x = F(i, 16)
            assert g.eval(x) == pointwise_convolution(TRIANGLE, mu2, x)
        for x in g.breakpoints:
            assert g.eval(x) == pointwise_convolution(TRIANGLE, mu2, x)

    def test_linear_in_measure(self):
        W = Interval.closed(-3, 3)
        mu = make_measure([(F(-1, 2), 2), (F(1, 3), -1)], W)
        nu = make_measure([(F(1, 3), F(1, 2)), (1, 1)], W)
        mix = combine(3, mu, -2, nu)
        J = Interval.closed(-2, 2)
        g_mix = convolve(TRIANGLE, mix, J)
        g_mu = convolve(TRIANGLE, mu, J)
        g_nu = convolve(TRIANGLE, nu, J)
        for x in g_mix.breakpoints + g_mu.breakpoints + g_nu.breakpoints:
            assert g_mix.eval(x) == 3 * g_mu.eval(x) - 2 * g_nu.eval(x)

    def test_faithfulness_enforced(self):
        mu = make_measure([(0, 1)], Interval.closed(-1, 1))
        with pytest.raises(FaithfulnessError, match="window"):
            convolve(TRIANGLE, mu, Interval.closed(-1, 1))
        g = convolve(TRIANGLE, mu, Interval.closed(F(-1, 2), F(1, 2)))
        assert g.eval(0) == 1

    def test_degenerate_window(self):
        mu = make_measure([(0, 1)], Interval.closed(-1, 1))
        g = convolve(TRIANGLE, mu, Interval.closed(F(1, 12), F(1, 12)))
        assert g.eval(F(1, 12)) == F(1, 2)

    def test_requires_compact_support(self):
        window_fn = PiecewiseLinearFn((0, 1), (2, 4), zero_outside=False)
        mu = make_measure([(0, 1)], Interval.closed(-9, 9))
        with pytest.raises(ValueError, match="compactly supported"):
            convolve(window_fn, mu, Interval.closed(-1, 1))


class TestSup:
    def test_equal_functions(self):
        assert sup_abs_diff(TRIANGLE, TRIANGLE, J_UNIT)[0] == 0

    def test_shifted_triangle(self):
        shifted = TRIANGLE.translate(F(1, 12))
        value, witness = sup_abs_diff(TRIANGLE, shifted, Interval.closed(-1, 1))
        assert value == F(1, 2)
        assert abs(TRIANGLE.eval(witness) - shifted.eval(witness)) == value

    def test_against_zero(self):
        zero = PiecewiseLinearFn((-1, 1), (0, 0))
        value, witness = sup_abs_diff(TRIANGLE, zero, Interval.closed(-1, 1))
        assert value == 1 and witness == 0
        assert sup_abs(TRIANGLE, Interval.closed(-1, 1)) == (1, 0)

    def test_grid_oracle_never_exceeds(self):
        g1 = convolve(TRIANGLE, build_stage(1).measure, Interval.closed(-1, 1))
        g2 = TRIANGLE
        J = Interval.closed(-1, 1)
        sup, _ = sup_abs_diff(g1, g2, J)
        assert grid_max_abs_diff(g1, g2, J) <= sup

    def test_outside_definition_range(self):
        g = PiecewiseLinearFn((0, 1), (1, 2), zero_outside=False)
        with pytest.raises(FaithfulnessError):
            sup_abs_diff(g, TRIANGLE, Interval.closed(-1, 1))

    def test_zero_sup_iff_same_canonical_form(self):
        redundant = PiecewiseLinearFn(
            (F(-1, 6), F(-1, 12), 0, F(1, 24), F(1, 6)),
            (0, F(1, 2), 1, F(3, 4), 0))
        J = Interval.closed(F(-1, 6), F(1, 6))
        assert sup_abs_diff(redundant, TRIANGLE, J)[0] == 0
        assert redundant.canonical() == TRIANGLE.canonical() == TRIANGLE
        nudged = PiecewiseLinearFn((F(-1, 6), 0, F(1, 6)), (0, F(99, 100), 0))
        assert sup_abs_diff(nudged, TRIANGLE, J)[0] != 0
        assert nudged.canonical() != TRIANGLE.canonical()


class TestAlmostPeriodDefect:
    def test_zero_shift(self):
        defect, _ = almost_period_defect(TRIANGLE, limit_window, 0, J_UNIT)
        assert defect == 0

    def test_shift_three(self):
        defect, witness = almost_period_defect(TRIANGLE, limit_window, 3, J_UNIT)
        assert defect == F(9, 1024)
        assert witness == 0
        assert defect <= 6 * (F(1, 512) + F(1, 65536) + F(1, 2 ** 25))

    def test_integer_comb_periodicity(self):
        comb = integer_comb(-30, 30)
        for tau in (1, 2, -7):
            defect, _ = almost_period_defect(TRIANGLE, comb, tau, Interval.closed(-5, 5))
            assert defect == 0

    def test_measure_source_window_too_small(self):
        comb = integer_comb(-2, 2)
        with pytest.raises(FaithfulnessError):
            almost_period_defect(TRIANGLE, comb, 10, J_UNIT)


class TestAlmostPeriodCertificate:
    def test_scale_two_small_range(self):
        cert = almost_period_certificate(TRIANGLE, F(1, 10), 27, 2, limit_window)
        assert cert.all_within
        assert cert.density_gap == 9
        assert cert.max_defect <= F(3, 512)
        assert [row.tau for row in cert.rows] == [-27, -18, -9, 0, 9, 18, 27]
        assert cert.rows[3].defect == 0

    def test_zero_epsilon_fails(self):
        cert = almost_period_certificate(TRIANGLE, 0, 9, 2, limit_window)
        assert not cert.all_within

    def test_generous_epsilon_scale_one(self):
        cert = almost_period_certificate(TRIANGLE, 1, 9, 1, limit_window)
        assert cert.all_within
        assert cert.max_defect <= 1

    def test_defect_below_lipschitz_times_tail(self):
        cert = almost_period_certificate(TRIANGLE, F(1, 10), 27, 2, limit_window)
        bound = TRIANGLE.max_abs_slope() * radius_series_tail_bound(3)
        assert cert.max_defect <= bound

    def test_invalid_scale(self):
        with pytest.raises(ValueError):
            almost_period_certificate(TRIANGLE, 1, 9, 0, limit_window)
