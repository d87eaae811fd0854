import math

import numpy as np
import pytest

from cayleyphase import (
    BoltzmannParams,
    Couplings,
    DomainError,
    critical_curve,
    critical_temperature,
    cycle_thresholds,
    derive_params,
    exclude_higher_periods,
    lift_fixed_point,
    lift_two_cycle,
    multi_root_window,
    phase_counts,
    ratio_map,
    ratio_map2,
    ratio_map_deriv,
    recurrence_residual,
    recurrence_step,
    solve_fixed_points,
    solve_two_cycles,
    symmetric_residual,
    tabulate_critical_curves,
)

from conftest import maxdiff


def params_at_level(level: float, b: float) -> BoltzmannParams:
    # invert level = 1/(a^2 b^6)
    return BoltzmannParams.from_weights((level * b**6) ** -0.5, b)


class TestMultiRootWindow:
    def test_absent_at_or_below_nine(self):
        for bt in (0.5, 1.0, 4.0, 9.0):
            assert multi_root_window(bt) is None

    def test_critical_points_at_16(self):
        # roots of y^2 - 13 y + 16 = 0
        lo, hi = multi_root_window(16.0)
        y1 = (13.0 - math.sqrt(105.0)) / 2.0
        y2 = (13.0 + math.sqrt(105.0)) / 2.0
        assert y1 == pytest.approx(1.3765246170202009, rel=1e-14)
        assert y2 == pytest.approx(11.6234753829797990, rel=1e-14)
        for y in (y1, y2):
            assert y * y + (3.0 - 16.0) * y + 16.0 == pytest.approx(0.0, abs=1e-12)

        def nu(y):
            return ((1.0 + y) / (16.0 + y)) ** 2 / y

        assert lo == pytest.approx(min(nu(y1), nu(y2)), rel=1e-13)
        assert hi == pytest.approx(max(nu(y1), nu(y2)), rel=1e-13)
        assert 0.0 < lo < hi

    def test_window_predicts_three_roots(self):
        lo, hi = multi_root_window(16.0)
        p = params_at_level(math.sqrt(lo * hi), 2.0)
        assert solve_fixed_points(p).regime == "three"


class TestSolveFixedPoints:
    def test_unit_weights_unique(self):
        rep = solve_fixed_points(BoltzmannParams.from_weights(1.0, 1.0))
        assert rep.regime == "unique"
        (root,) = rep.roots
        assert root.x == pytest.approx(1.0, rel=1e-14)
        assert root.derivative == 0.0
        assert root.stability == "stable"

    @pytest.mark.parametrize("a", [0.2, 0.8, 1.0, 3.0, 10.0])
    @pytest.mark.parametrize("b", [0.4, 0.9, 1.0, 1.3, 1.7])
    def test_unique_when_b4_small(self, a, b):
        # b^4 <= 9 for every b here
        p = BoltzmannParams.from_weights(a, b)
        rep = solve_fixed_points(p)
        assert rep.regime == "unique"
        (root,) = rep.roots
        assert abs(ratio_map(p, root.x) - root.x) <= 1e-10 * max(1.0, root.x)

    def test_three_root_regime_structure(self, params_three_roots):
        rep = solve_fixed_points(params_three_roots)
        assert rep.regime == "three"
        xs = [r.x for r in rep.roots]
        assert xs == sorted(xs)
        stability = [r.stability for r in rep.roots]
        assert stability == ["stable", "unstable", "stable"]
        for r in rep.roots:
            assert abs(ratio_map(params_three_roots, r.x) - r.x) <= 1e-10 * max(1.0, r.x)
            # stability tags agree with the derivative magnitude
            if r.stability == "stable":
                assert abs(r.derivative) < 1.0
            else:
                assert abs(r.derivative) > 1.0

    def test_boundary_reports_double_root_once(self):
        lo, hi = multi_root_window(16.0)
        for level in (lo, hi):
            rep = solve_fixed_points(params_at_level(level, 2.0))
            assert rep.regime == "two"
            tags = [r.stability for r in rep.roots]
            assert tags.count("saddle-boundary") == 1
            assert tags.count("stable") == 1


class TestTwoCycles:
    def test_half_b_unit_a(self, params_symmetric_cycle):
        rep = solve_two_cycles(params_symmetric_cycle)
        # exact dyadic inputs: B and the factored discriminant are exact
        assert rep.b_coeff == -0.68359375
        assert rep.discriminant == 0.4291534423828125
        x_lo, x_hi = rep.roots
        assert 0.0 < x_lo < x_hi
        for y in rep.roots:
            assert abs(ratio_map2(params_symmetric_cycle, y) - y) <= 1e-10 * max(1.0, y)
            assert abs(ratio_map(params_symmetric_cycle, y) - y) > 1e-3
        assert ratio_map(params_symmetric_cycle, x_hi) == pytest.approx(x_lo, rel=1e-9)
        assert ratio_map(params_symmetric_cycle, x_lo) == pytest.approx(x_hi, rel=1e-9)
        # attractive pair
        d = ratio_map_deriv(params_symmetric_cycle, x_lo) * ratio_map_deriv(params_symmetric_cycle, x_hi)
        assert abs(d) < 1.0

    def test_no_roots_above_threshold(self):
        rep = solve_two_cycles(BoltzmannParams.from_weights(1.0, 0.9))
        assert rep.roots == ()
        assert rep.thresholds.star_minus is None

    def test_b_one_discriminant_exactly_zero(self):
        rep = solve_two_cycles(BoltzmannParams.from_weights(2.0, 1.0))
        assert rep.discriminant == 0.0
        assert rep.roots == ()  # the merged root is negative there

    def test_boundary_gives_single_degenerate_root(self):
        th = cycle_thresholds(0.5)
        p = BoltzmannParams.from_weights(math.sqrt(th.star_plus), 0.5)
        rep = solve_two_cycles(p)
        assert rep.degenerate
        (x1,) = rep.roots
        assert x1 > 0.0
        # merged pair sits on a fixed point with derivative -1
        assert abs(ratio_map(p, x1) - x1) <= 1e-5 * max(1.0, x1)
        assert ratio_map_deriv(p, x1) == pytest.approx(-1.0, abs=1e-5)

    def test_sign_dichotomy_on_random_grid(self, rng):
        for _ in range(200):
            b = float(10.0 ** rng.uniform(-0.8, 0.5))
            a = float(10.0 ** rng.uniform(-0.8, 0.8))
            rep = solve_two_cycles(BoltzmannParams.from_weights(a, b))
            th = rep.thresholds
            expect_positive = (
                th.star_minus is not None and th.star_minus < a * a < th.star_plus
            )
            if expect_positive:
                assert rep.discriminant > 0.0
                assert rep.b_coeff < 0.0
                assert len(rep.roots) == 2
            elif abs(b - 1.0) > 1e-12 and th.star_minus is not None and not (
                abs(a * a - th.star_minus) < 1e-9 or abs(a * a - th.star_plus) < 1e-9
            ):
                assert rep.discriminant < 0.0
                assert rep.roots == ()


class TestCycleThresholds:
    def test_values_at_half(self):
        th = cycle_thresholds(0.5)
        assert th.star_minus == pytest.approx(0.102993, rel=2e-5)
        assert th.star_plus == pytest.approx(9.70951, rel=2e-5)
        # the two star thresholds are exact reciprocals
        assert th.star_minus * th.star_plus == pytest.approx(1.0, rel=1e-12)
        assert th.outer_minus <= th.star_minus < th.star_plus <= th.outer_plus

    def test_merge_at_critical_b(self):
        th = cycle_thresholds(math.sqrt(1.0 / 3.0))
        assert th.star_minus == pytest.approx(th.star_plus, rel=1e-7)

    def test_absent_above_critical_b(self):
        for b in (0.9, 1.0, 1.5):
            th = cycle_thresholds(b)
            assert th.star_minus is None and th.star_plus is None
        # outer pair exists a bit beyond the star pair
        assert cycle_thresholds(0.6).outer_minus is not None
        assert cycle_thresholds(0.6).star_minus is None

    def test_ordering_when_both_present(self, rng):
        for _ in range(50):
            b = float(rng.uniform(0.1, math.sqrt(1.0 / 3.0) - 1e-6))
            th = cycle_thresholds(b)
            assert th.outer_minus <= th.star_minus < th.star_plus <= th.outer_plus


class TestLifts:
    def test_unit_fixed_point(self):
        p = BoltzmannParams.from_weights(1.0, 1.0)
        u = lift_fixed_point(p, 1.0)
        assert u.components == (0.25, 0.25, 0.25, 0.25)
        assert recurrence_step(p, u).components == u.components

    def test_lift_is_on_slice_and_fixed(self, params_three_roots):
        for r in solve_fixed_points(params_three_roots).roots:
            u = lift_fixed_point(params_three_roots, r.x)
            assert symmetric_residual(u) == 0.0
            assert recurrence_residual(params_three_roots, u) <= 1e-9

    def test_lift_rejects_non_fixed_ratio(self, params_three_roots):
        with pytest.raises(DomainError):
            lift_fixed_point(params_three_roots, 2.0)

    def test_two_cycle_lift(self, params_symmetric_cycle):
        p = params_symmetric_cycle
        rep = solve_two_cycles(p)
        for y in rep.roots:
            u = lift_two_cycle(p, y)
            assert symmetric_residual(u) == 0.0
            w1 = recurrence_step(p, u)
            w2 = recurrence_step(p, w1)
            scale = u.max_norm()
            assert maxdiff(w2, u) / scale <= 1e-9
            assert maxdiff(w1, u) / scale > 1e-3
            partner = lift_two_cycle(p, ratio_map(p, y))
            assert maxdiff(w1, partner) / partner.max_norm() <= 1e-9

    def test_two_cycle_lift_rejects_fixed_ratio(self, params_symmetric_cycle):
        with pytest.raises(DomainError):
            lift_two_cycle(params_symmetric_cycle, 123.0)


class TestCriticalTemperature:
    def test_exact_values(self):
        assert critical_temperature(math.log(3.0) / 2.0) == 1.0
        assert critical_temperature(-math.log(3.0)) == 2.0
        assert critical_temperature(0.0) is None

    def test_b4_is_nine_at_tc(self):
        for j2 in (0.3, 1.0, 2.4):
            tc = critical_temperature(j2)
            b_tilde = math.exp(4.0 * j2 / tc)
            assert b_tilde == pytest.approx(9.0, rel=1e-12)
        for j2 in (-0.3, -1.7):
            tc = critical_temperature(j2)
            b_tilde = math.exp(4.0 * j2 / tc)
            assert b_tilde == pytest.approx(1.0 / 9.0, rel=1e-12)


class TestCriticalCurve:
    def test_matches_thresholds_at_half(self):
        # choose (j2, beta) with b = exp(j2 beta) = 0.5
        beta = 2.0
        j2 = math.log(0.5) / beta
        s = critical_curve(j2, beta)
        th = cycle_thresholds(0.5)
        assert math.exp(2.0 * s.j1_plus * beta) == pytest.approx(th.star_plus, rel=1e-12)
        assert math.exp(2.0 * s.j1_minus * beta) == pytest.approx(th.star_minus, rel=1e-12)
        # the two branches are mirror images in j1
        assert s.j1_plus == pytest.approx(-s.j1_minus, rel=1e-12)

    def test_absent_above_critical_temperature(self):
        j2 = -1.0
        tc = critical_temperature(j2)
        s = critical_curve(j2, 1.0 / (1.5 * tc))
        assert s.j1_plus is None and s.j1_minus is None

    def test_degenerate_at_tc(self):
        j2 = -1.0
        tc = critical_temperature(j2)
        s = critical_curve(j2, 1.0 / tc)
        assert s.j1_plus == pytest.approx(s.j1_minus, abs=1e-7)

    def test_roundtrip_discriminant_zero(self):
        beta = 1.25
        j2 = math.log(0.4) / beta
        s = critical_curve(j2, beta)
        for j1 in (s.j1_plus, s.j1_minus):
            rep = solve_two_cycles(derive_params(Couplings(j1, j2, 1.0 / beta)))
            assert abs(rep.discriminant) <= 1e-8 * rep.b_coeff**2

    def test_tabulate_handles_absent(self):
        rows = tabulate_critical_curves(np.linspace(-2.0, -0.1, 5), temperature=0.8)
        assert len(rows) == 5
        assert any(r.j1_plus is not None for r in rows)
        hot = tabulate_critical_curves(np.linspace(-0.2, -0.1, 3), temperature=5.0)
        assert all(r.j1_plus is None and r.j1_minus is None for r in hot)


class TestPhaseCounts:
    def test_hot_positive_j2(self):
        j2 = 1.0
        tc = critical_temperature(j2)
        for t in (tc, 1.2 * tc, 5.0):
            assert phase_counts(Couplings(0.05, j2, t)) == (1, 0)

    def test_hot_negative_j2(self):
        j2 = -1.0
        tc = critical_temperature(j2)
        para, comm2 = phase_counts(Couplings(0.3, j2, tc * 1.000001))
        assert (para, comm2) == (1, 0)
        # at tc exactly with j1 = 0 the merged threshold equals a^2 = 1:
        # the degenerate corner carries the single (merged) two-cycle point
        para, comm2 = phase_counts(Couplings(0.0, j2, tc))
        assert para == 1 and comm2 == 1
        # off the merged point there is none
        para, comm2 = phase_counts(Couplings(0.3, j2, tc))
        assert para == 1 and comm2 == 0

    def test_cycle_window(self):
        # b = 0.5 at T = 1, a = 1: inside the star window
        c = Couplings(0.0, math.log(0.5), 1.0)
        assert phase_counts(c) == (1, 2)

    def test_three_phase_window(self, params_three_roots):
        p = params_three_roots
        t = 1.0
        c = Couplings(math.log(p.a), math.log(p.b), t)
        assert phase_counts(c) == (3, 0)


class TestExcludeHigherPeriods:
    def test_positive_j2_roots_are_fixed_points(self):
        p = BoltzmannParams.from_weights(0.8, 1.4)
        rep = exclude_higher_periods(p, 4)
        assert rep.all_accounted
        fixed = set(rep.reference_fixed)
        for finding in rep.findings:
            assert all(finding.matched)

    def test_negative_j2_roots_include_two_cycle(self, params_symmetric_cycle):
        rep = exclude_higher_periods(params_symmetric_cycle, 4)
        assert rep.all_accounted
        by_period = {f.period: f for f in rep.findings}
        # even composition sees the two-cycle ratios again
        assert len(by_period[4].roots) >= 3

    def test_constant_map_single_root(self):
        p = BoltzmannParams.from_weights(1.7, 1.0)
        rep = exclude_higher_periods(p, 5)
        assert rep.all_accounted
        for finding in rep.findings:
            assert len(finding.roots) == 1
            assert finding.roots[0] == pytest.approx(p.a * p.a, rel=1e-10)

    def test_rejects_bad_period(self, params_symmetric_cycle):
        with pytest.raises(DomainError):
            exclude_higher_periods(params_symmetric_cycle, 2)
        with pytest.raises(DomainError):
            exclude_higher_periods(params_symmetric_cycle, 9)
