import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vnr.distributions import Distribution, mix, translate
from vnr.risk import (
    CertaintyTransform,
    DecreasingTestFn,
    LambdaFn,
    RiskMeasure,
    certainty_equivalent,
    default_ramp_grid,
    dual_inverse,
    dual_value,
    lambda_var,
    propvolle_lower_bound,
    var,
)

UX = Distribution.uniform(-0.5, 0.5)
QY = Distribution.from_cdf(lambda z: min(1.0, (z + 0.5) ** 2), -0.5, 0.5, 10_000)


def rand_atoms(rng, n=None, span=3.0):
    n = n or int(rng.integers(2, 6))
    xs = rng.uniform(-span, span, n)
    ws = rng.random(n) + 0.05
    ws = ws / ws.sum()
    return Distribution.from_atoms(list(zip(xs, ws)))


@st.composite
def step_lambdas(draw, cap=0.8):
    left = draw(st.floats(0.0, cap / 2))
    n = draw(st.integers(0, 3))
    xs = sorted(draw(st.lists(st.floats(-3, 3, allow_nan=False), min_size=n, max_size=n,
                              unique=True)))
    vals = sorted(draw(st.lists(st.floats(left, cap), min_size=n, max_size=n)))
    return LambdaFn.from_breakpoints([(x, v, "step") for x, v in zip(xs, vals)], left)


class TestVar:
    def test_uniform_paper_value(self):
        assert var(UX, 0.01) == pytest.approx(0.49, abs=1e-15)

    def test_quadratic_ingested(self):
        assert var(QY, 0.01) == pytest.approx(0.4, abs=1e-3)

    def test_dirac(self):
        for lam in (0.0, 0.3, 0.9):
            assert var(Distribution.dirac(1.3), lam) == pytest.approx(-1.3)

    def test_level_domain(self):
        with pytest.raises(ValueError):
            var(UX, 1.0)
        with pytest.raises(ValueError):
            var(UX, -0.1)

    def test_matches_constant_lambda_var(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            d = rand_atoms(rng)
            lam = float(rng.uniform(0.0, 0.9))
            assert var(d, lam) == pytest.approx(lambda_var(d, LambdaFn.constant(lam)), abs=1e-12)


class TestLambdaVar:
    def test_dirac(self):
        lam = LambdaFn.from_breakpoints([(0.0, 0.4, "step")], 0.1)
        assert lambda_var(Distribution.dirac(0.7), lam) == pytest.approx(-0.7)

    def test_zero_curve_is_worst_case(self):
        d = Distribution.from_atoms([(-1.5, 0.3), (2.0, 0.7)])
        assert lambda_var(d, LambdaFn.constant(0.0)) == pytest.approx(1.5)

    def test_well_posedness_guard(self):
        with pytest.raises(ValueError):
            lambda_var(UX, LambdaFn.constant(1.0))

    def test_linear_curve_crossing(self):
        # F uniform vs Lambda rising linearly: crossing solved exactly
        lam = LambdaFn.from_breakpoints([(-0.5, 0.0, "step"), (0.5, 0.2, "linear")], 0.0)
        # F(x) = x + 0.5, Lambda(x) = 0.2 (x + 0.5): cross where x + 0.5 = 0 -> x = -0.5
        assert lambda_var(UX, lam) == pytest.approx(0.5, abs=1e-12)

    def test_cash_law_with_shifted_curve(self):
        # Lambda V@R(P_{X+a}) = Lambda^a V@R(P_X) - a with Lambda^a(x) = Lambda(x+a)
        rng = np.random.default_rng(1)
        for _ in range(40):
            d = rand_atoms(rng)
            lam = LambdaFn.from_breakpoints(
                [(float(x), float(v), "step")
                 for x, v in zip(sorted(rng.uniform(-2, 2, 3)), sorted(rng.uniform(0.05, 0.8, 3)))],
                0.02,
            )
            a = float(rng.uniform(-2, 2))
            lhs = lambda_var(d.translate(a), lam)
            rhs = lambda_var(d, lam.shift(a)) - a
            assert lhs == pytest.approx(rhs, abs=1e-10)

    @given(step_lambdas())
    @settings(max_examples=40, deadline=None)
    def test_antitone_under_translation(self, lam):
        d = Distribution.from_atoms([(-0.8, 0.4), (1.1, 0.6)])
        assert lambda_var(d, lam) >= lambda_var(d.translate(0.7), lam) - 1e-12


class TestCertaintyEquivalent:
    def test_dirac(self):
        assert certainty_equivalent(
            Distribution.dirac(1.2), CertaintyTransform.entropic()
        ) == pytest.approx(-1.2)

    def test_two_atom_log(self):
        d = Distribution.from_atoms([(0.0, 0.5), (-math.log(3.0), 0.5)])
        assert certainty_equivalent(d, CertaintyTransform.entropic()) == pytest.approx(
            math.log(2.0)
        )

    def test_translation_invariance(self):
        rng = np.random.default_rng(2)
        ent = CertaintyTransform.entropic()
        for _ in range(30):
            d = rand_atoms(rng)
            p = float(rng.uniform(-2, 2))
            assert certainty_equivalent(d.translate(p), ent) == pytest.approx(
                certainty_equivalent(d, ent) - p, abs=1e-10
            )

    def test_numeric_inverse_matches_closed_form(self):
        probe = CertaintyTransform(fn=lambda x: math.exp(-x), lower_bound=0.0)
        d = Distribution.from_atoms([(0.4, 0.3), (1.3, 0.7)])
        want = certainty_equivalent(d, CertaintyTransform.entropic())
        assert certainty_equivalent(d, probe) == pytest.approx(want, abs=1e-10)

    def test_increasing_transform_rejected(self):
        with pytest.raises(ValueError):
            CertaintyTransform(fn=lambda x: x, lower_bound=0.0)

    def test_unbounded_below_rejected(self):
        with pytest.raises(ValueError):
            CertaintyTransform(fn=lambda x: -x, lower_bound=-math.inf)


def stieltjes_oracle(a, f, lam, n=200_000):
    """Numeric integral of (1 - Lambda) df over (-inf, -a] by fine sampling."""
    lo, hi = f.xs[0], min(float(-a), f.xs[-1])
    if hi <= lo:
        return f.at_neg_inf
    grid = np.linspace(lo, hi, n)
    fv = np.array([f(x) for x in grid])
    lv = np.array([lam(x) for x in grid])
    mid = 0.5 * (lv[1:] + lv[:-1])
    return f.at_neg_inf + float(np.sum((1.0 - mid) * np.diff(fv)))


class TestDualPair:
    lam = LambdaFn.constant(0.25)
    f = DecreasingTestFn(np.array([-1.0, 0.0, 2.0]), np.array([1.0, 0.8, 0.1]))

    def test_constant_lambda_closed_form(self):
        # V(a, f) = lam f(-inf) + (1 - lam) f(-a), cross-checked numerically
        for a in (-3.0, -0.7, 0.0, 0.9, 4.0):
            got = dual_value(a, self.f, self.lam)
            closed = 0.25 * self.f.at_neg_inf + 0.75 * self.f(-a)
            assert got == pytest.approx(closed, abs=1e-12)
            assert got == pytest.approx(stieltjes_oracle(a, self.f, self.lam), abs=1e-4)

    def test_zero_curve_collapses(self):
        z = LambdaFn.constant(0.0)
        for a in (-2.0, 0.3, 1.5):
            assert dual_value(a, self.f, z) == pytest.approx(self.f(-a), abs=1e-12)

    def test_far_right_limit(self):
        assert dual_value(50.0, self.f, self.lam) == pytest.approx(self.f.at_neg_inf)

    def test_piecewise_linear_lambda_against_oracle(self):
        lam = LambdaFn.from_breakpoints(
            [(-1.0, 0.1, "step"), (0.5, 0.6, "linear")], 0.05
        )
        for a in (-1.7, -0.2, 0.6):
            got = dual_value(a, self.f, lam)
            assert got == pytest.approx(stieltjes_oracle(a, self.f, lam), abs=1e-4)

    def test_inverse_zero_curve_is_left_inverse(self):
        z = LambdaFn.constant(0.0)
        # V^{-1}(v, f) = -f^l(v) with f^l(y) = sup{x | f(x) >= y}
        assert dual_inverse(0.8, self.f, z) == pytest.approx(0.0, abs=1e-12)
        assert dual_inverse(0.45, self.f, z) == pytest.approx(-1.0, abs=1e-12)

    def test_inverse_round_trip(self):
        for lam in (LambdaFn.constant(0.0), self.lam,
                    LambdaFn.from_breakpoints([(0.0, 0.5, "step")], 0.1)):
            values = np.linspace(-2.5, 3.0, 40)
            for a in values:
                v = dual_value(float(a), self.f, lam)
                back = dual_inverse(v, self.f, lam)
                assert back <= a + 1e-10

    def test_strictly_decreasing_round_trip_is_tight(self):
        # on (-2, 1) the test function is strictly decreasing, so V is
        # strictly increasing there and the left inverse is exact
        for a in (-1.5, -0.5, 0.5):
            v = dual_value(a, self.f, self.lam)
            assert dual_inverse(v, self.f, self.lam) == pytest.approx(a, abs=1e-10)

    def test_flat_test_function_degenerates(self):
        flat = DecreasingTestFn.constant(0.3)
        assert dual_inverse(0.3, flat, self.lam) == -math.inf

    def test_out_of_range_values(self):
        assert dual_inverse(1.5, self.f, self.lam) == math.inf  # above sup f
        assert dual_inverse(-2.0, self.f, self.lam) == -math.inf  # below total drop


class TestPropvolle:
    def test_bound_never_exceeds_primal(self):
        rng = np.random.default_rng(3)
        for _ in range(40):
            d = rand_atoms(rng)
            lam = LambdaFn.constant(float(rng.uniform(0.0, 0.5)))
            grid = default_ramp_grid(d, 60)
            assert propvolle_lower_bound(d, lam, grid) <= lambda_var(d, lam) + 1e-9

    def test_flat_singleton_is_uninformative(self):
        d = Distribution.from_atoms([(0.0, 0.5), (1.0, 0.5)])
        got = propvolle_lower_bound(d, LambdaFn.constant(0.1),
                                    [DecreasingTestFn.constant(0.5)])
        assert got == -math.inf

    def test_two_atom_gap_within_tolerance(self):
        d = Distribution.from_atoms([(0.0, 0.5), (1.0, 0.5)])
        lam = LambdaFn.constant(0.1)
        grid = default_ramp_grid(d, 200, width=0.02, pad=0.5)
        bound = propvolle_lower_bound(d, lam, grid)
        assert lambda_var(d, lam) - bound <= 0.05

    def test_monotone_under_nested_refinement(self):
        d = Distribution.from_atoms([(-0.3, 0.4), (0.9, 0.6)])
        lam = LambdaFn.constant(0.1)
        full = default_ramp_grid(d, 200, width=0.02, pad=0.5)
        b50 = propvolle_lower_bound(d, lam, full[::4])
        b100 = propvolle_lower_bound(d, lam, full[::2])
        b200 = propvolle_lower_bound(d, lam, full)
        assert b50 <= b100 + 1e-15 <= b200 + 2e-15

    def test_empty_grid_rejected(self):
        with pytest.raises(ValueError):
            propvolle_lower_bound(UX, LambdaFn.constant(0.1), [])


class TestRiskMeasureProperties:
    MEASURES = [
        RiskMeasure.var(0.1),
        RiskMeasure.lambda_var(LambdaFn.from_breakpoints([(0.0, 0.3, "step")], 0.05)),
        RiskMeasure.entropic(),
        RiskMeasure.worst_case(),
    ]

    def test_antitone_for_dominance(self):
        rng = np.random.default_rng(4)
        for _ in range(25):
            d = rand_atoms(rng)
            d2 = d.translate(float(rng.uniform(0.01, 2.0)))  # d <=_1 d2
            for phi in self.MEASURES:
                assert phi(d) >= phi(d2) - 1e-10

    def test_quasi_convexity_on_mixtures(self):
        rng = np.random.default_rng(5)
        for _ in range(25):
            d1, d2 = rand_atoms(rng), rand_atoms(rng)
            lam = float(rng.uniform(0, 1))
            m = mix(d1, d2, lam)
            for phi in self.MEASURES:
                assert phi(m) <= max(phi(d1), phi(d2)) + 1e-10

    def test_translation_invariance_var_and_entropic(self):
        rng = np.random.default_rng(6)
        for _ in range(25):
            d = rand_atoms(rng)
            p = float(rng.uniform(-2, 2))
            for phi in (RiskMeasure.var(0.2), RiskMeasure.entropic(), RiskMeasure.worst_case()):
                assert phi(translate(d, p)) == pytest.approx(phi(d) - p, abs=1e-10)
