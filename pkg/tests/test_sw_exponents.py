import math

import numpy as np
import pytest

from conftest import random_source
from swexp.binary_example import BinaryExample, binary_entropy, binary_kl, h_binary_inverse
from swexp.channel import ExponentKind, rate_thresholds
from swexp.info_core import JointSource, entropy_vec, load_source
from swexp.slepian_wolf import (
    VariableRateContext,
    fixed_critical_rate,
    fixed_exponent,
    fixed_exponent_many,
    fixed_gallager,
    fixed_sp_rate_ceiling,
    max_correct_probability,
    second_order_coefficient,
    tilted_family,
    variable_context,
    variable_exponent_bounds,
    zero_error_rate_window,
)

LN2 = math.log(2.0)
SP, RC, EX, CD = (
    ExponentKind.SPHERE_PACKING,
    ExponentKind.RANDOM_CODING,
    ExponentKind.EXPURGATED,
    ExponentKind.CORRECT_DECODING,
)


class TestFixedExponent:
    def test_sp_binary_closed_form_point(self, preset_sources):
        # doubly binary closed form: D(q0 || p) at the rate with H_b(q0) = r
        src = preset_sources[0.5]
        r = binary_entropy(0.3)
        got = float(fixed_exponent(SP, src, r))
        assert abs(got - binary_kl(0.3, 0.05)) < 1e-8
        assert abs(got - 0.3237606860825891) < 1e-8  # frozen: 0.3 ln 6 + 0.7 ln(0.7/0.95)

    def test_cd_zero_at_sw_limit(self, preset_sources):
        src = preset_sources[0.35]
        h = src.conditional_entropy_x_given_y()
        assert float(fixed_exponent(CD, src, h)) <= 1e-10

    def test_sp_infinite_beyond_ceiling(self, preset_sources):
        src = preset_sources[0.12]
        assert not fixed_exponent(SP, src, LN2 + 0.05).finite

    def test_rc_below_sp(self, preset_sources):
        src = preset_sources[0.12]
        rates = np.linspace(0.25, 0.6, 9)
        rc = fixed_exponent_many(RC, src, rates)
        sp = fixed_exponent_many(SP, src, rates)
        assert (rc <= sp + 1e-9).all()

    def test_ternary_general_path_matches_parametric(self):
        rng = np.random.default_rng(21)
        src = random_source(rng, 3, 3)
        h = src.conditional_entropy_x_given_y()
        ceiling = fixed_sp_rate_ceiling(src)
        for r in (h + 0.05, 0.5 * (h + ceiling)):
            type_form = float(fixed_exponent(SP, src, r))
            rho_form = float(fixed_gallager(SP, src, r))
            assert abs(type_form - rho_form) < 1e-5


class TestFixedGallager:
    def test_zero_at_sw_limit(self, preset_sources):
        src = preset_sources[0.12]
        h = src.conditional_entropy_x_given_y()
        assert float(fixed_gallager(SP, src, h)) < 1e-9
        assert float(fixed_gallager(RC, src, h)) < 1e-9

    def test_rc_affine_branch(self, preset_sources):
        # above the critical rate the random-coding form is affine with unit
        # slope: the tilt pins at its endpoint
        src = preset_sources[0.35]
        r_cr = fixed_critical_rate(src)
        r = r_cr + 0.05
        branch = -math.log(sum(np.sqrt(src.joint[:, y]).sum() ** 2 for y in range(2))) + r
        assert abs(float(fixed_gallager(RC, src, r)) - branch) < 1e-9

    def test_agreement_with_type_form(self, preset_sources):
        src = preset_sources[0.5]
        r = binary_entropy(0.3)
        assert abs(float(fixed_gallager(SP, src, r)) - float(fixed_exponent(SP, src, r))) < 1e-5

    def test_kind_restriction(self, preset_sources):
        with pytest.raises(ValueError):
            fixed_gallager(EX, preset_sources[0.5], 0.3)


class TestTiltedFamily:
    def test_untilted(self, preset_sources):
        src = preset_sources[0.12]
        tp = tilted_family(src, 0.0)
        assert abs(tp.rate - src.conditional_entropy_x_given_y()) < 1e-12
        assert tp.exponent < 1e-14
        assert np.abs(tp.y_marginal.probs - src.marginal_y.probs).max() < 1e-12
        assert np.abs(tp.x_given_y.rows - src.backward.rows).max() < 1e-12

    def test_critical_rate_at_unit_tilt(self, preset_sources):
        src = preset_sources[0.35]
        assert abs(tilted_family(src, 1.0).rate - fixed_critical_rate(src)) < 1e-14

    def test_rate_monotone_in_tilt(self, preset_sources):
        src = preset_sources[0.12]
        rates = [tilted_family(src, rho).rate for rho in np.linspace(0.0, 2.0, 11)]
        assert all(r1 <= r2 + 1e-12 for r1, r2 in zip(rates, rates[1:]))

    @pytest.mark.parametrize("rho", [0.25, 0.5, 1.0])
    def test_point_on_sphere_packing_curve(self, preset_sources, rho):
        src = preset_sources[0.5]
        tp = tilted_family(src, rho)
        dual = float(fixed_gallager(SP, src, tp.rate))
        assert abs(tp.exponent - dual) < 1e-6

    @pytest.mark.parametrize("rho", [0.1, 0.6, 1.0])
    def test_parametric_consistency_type_form(self, preset_sources, rho):
        src = preset_sources[0.12]
        tp = tilted_family(src, rho)
        assert abs(float(fixed_exponent(SP, src, tp.rate)) - tp.exponent) < 1e-6


class TestRateCeiling:
    def test_all_positive_binary(self, preset_sources):
        assert abs(fixed_sp_rate_ceiling(preset_sources[0.12]) - LN2) < 1e-15

    def test_column_supporting_single_letter(self):
        src = JointSource([[0.5, 0.2], [0.0, 0.3]])
        # y = 0 supports one letter (contributes log 1 = 0), y = 1 supports two
        assert abs(fixed_sp_rate_ceiling(src) - LN2) < 1e-15

    def test_three_by_two_supports(self):
        doc = {
            "alphabet_x": 3,
            "alphabet_y": 2,
            "joint": [[0.25, 0.1], [0.25, 0.15], [0.0, 0.25]],
        }
        src = load_source(doc)
        # supports of x given y: {0,1} and {0,1,2}
        assert abs(fixed_sp_rate_ceiling(src) - math.log(3.0)) < 1e-15


class TestVariableBounds:
    def test_exact_region_equality(self, preset_sources):
        src = preset_sources[0.12]
        ctx = variable_context(src)
        h = ctx.sw_limit
        top = ctx.h_marginal - ctx.thresholds.critical_rate
        for r in np.linspace(h + 0.01, top - 0.01, 5):
            b = variable_exponent_bounds(src, float(r), ctx)
            assert b.exact is not None
            assert abs(float(b.lower) - float(b.upper_sp)) < 1e-6

    def test_zero_at_sw_limit(self, preset_sources):
        src = preset_sources[0.35]
        b = variable_exponent_bounds(src, src.conditional_entropy_x_given_y())
        assert float(b.lower) < 1e-9 and float(b.upper_sp) < 1e-9

    def test_infinite_in_zero_error_regime(self, preset_sources):
        src = preset_sources[0.12]
        upper_rate, lower_rate = zero_error_rate_window(src)
        b = variable_exponent_bounds(src, upper_rate + 1e-3)
        assert not b.lower.finite
        b2 = variable_exponent_bounds(src, max(lower_rate - 1e-3, 1e-3))
        assert b2.upper_sp.finite

    def test_window_bounds_in_range(self, preset_sources):
        for src in preset_sources.values():
            upper_rate, lower_rate = zero_error_rate_window(src)
            h = entropy_vec(src.marginal_x.probs)
            assert -1e-12 <= upper_rate <= h + 1e-12
            assert -1e-12 <= lower_rate <= h + 1e-12

    def test_window_identical_rows_degenerate(self):
        # X independent of Y: every coupling distance is zero, the expurgated
        # floor collapses, and the window degenerates at H(P_X)
        src = JointSource([[0.35 * 0.4, 0.35 * 0.6], [0.65 * 0.4, 0.65 * 0.6]])
        upper_rate, lower_rate = zero_error_rate_window(src)
        h = entropy_vec(src.marginal_x.probs)
        assert abs(upper_rate - h) < 1e-9
        assert abs(lower_rate - h) < 1e-9

    def test_sp_exception_flagged(self, preset_sources):
        src = preset_sources[0.5]
        ctx = variable_context(src)
        r = ctx.h_marginal - ctx.thresholds.sp_rate_floor
        b = variable_exponent_bounds(src, r, ctx)
        assert b.flag == "sp-floor-exception"
        assert b.exact is None

    def test_dominance_over_fixed(self, preset_sources):
        # the variable-rate sphere-packing bound dominates the fixed-rate one
        src = preset_sources[0.12]
        ctx = variable_context(src)
        rates = np.linspace(ctx.sw_limit + 0.01, LN2 - 0.02, 12)
        fixed_sp = fixed_exponent_many(SP, src, rates)
        for r, fv in zip(rates, fixed_sp):
            b = variable_exponent_bounds(src, float(r), ctx)
            assert float(b.upper_sp) >= fv - 1e-9


class TestSecondOrder:
    def test_independent_source_infinite(self):
        src = JointSource([[0.2 * 0.5, 0.2 * 0.5], [0.8 * 0.5, 0.8 * 0.5]])
        assert not second_order_coefficient(src).finite

    def test_degenerate_rejected_at_construction(self):
        with pytest.raises(ValueError):
            JointSource([[0.5, 0.0], [0.0, 0.5]])

    def test_binary_example_finite_positive(self, preset_sources):
        c = second_order_coefficient(preset_sources[0.12])
        assert c.finite and float(c) > 0.0

    def test_richardson_extrapolation_agreement(self, preset_sources):
        # finite-difference oracle on the exact-region curve, two-level
        # Richardson with ratio 2 and steps 1e-2, 5e-3, 2.5e-3
        src = preset_sources[0.12]
        ctx = variable_context(src)
        coeff = float(second_order_coefficient(src))
        h0 = ctx.sw_limit
        gs = []
        for step in [1e-2, 5e-3, 2.5e-3]:
            b = variable_exponent_bounds(src, h0 + step, ctx)
            assert b.exact is not None
            gs.append(float(b.exact) / step**2)
        r1 = 2 * gs[1] - gs[0]
        r2 = 2 * gs[2] - gs[1]
        best = (4 * r2 - r1) / 3
        assert abs(best - coeff) / coeff < 0.02


class TestPcMax:
    def test_endpoints(self, preset_sources):
        src = preset_sources[0.5]
        h = src.conditional_entropy_x_given_y()
        assert max_correct_probability(src, h) == 1.0
        assert max_correct_probability(src, 0.0) == 0.0
        assert abs(max_correct_probability(src, h / 2) - 0.5) < 1e-12

    def test_piecewise_linear_with_knee(self, preset_sources):
        src = preset_sources[0.35]
        h = src.conditional_entropy_x_given_y()
        grid = np.linspace(0.0, 2 * h, 41)
        vals = np.array([max_correct_probability(src, float(r)) for r in grid])
        assert (np.diff(vals) >= -1e-12).all()
        below = grid <= h
        assert np.abs(vals[below] - grid[below] / h).max() < 1e-12
        assert (vals[~below] == 1.0).all()

    def test_negative_rate_rejected(self, preset_sources):
        with pytest.raises(ValueError):
            max_correct_probability(preset_sources[0.5], -0.1)


class TestCorrectDecodingPositivity:
    def test_fixed_cd_positive_iff_below_limit(self, preset_sources):
        for src in preset_sources.values():
            h = src.conditional_entropy_x_given_y()
            below = float(fixed_exponent(CD, src, h - 1e-6))
            at_or_above = float(fixed_exponent(CD, src, h + 1e-6))
            assert below > 0.0
            assert at_or_above <= 1e-9
