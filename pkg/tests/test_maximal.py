"""Cutoff averages, their maximal function, seminorms and the maximal bound checks."""

import math

import numpy as np
import pytest

from hankel_gm.analysis.funcrep import parse_descriptor, sample
from hankel_gm.analysis.gm import dyadic_profile
from hankel_gm.analysis.maximal import (
    CutoffShape,
    CutoffSpec,
    good_number_lower_bound,
    maximal_average,
    maximal_bound_check,
    maximal_function,
    maximal_lorentz_check,
    phi_average,
    seminorm_gamma,
)
from hankel_gm.analysis.norms import WeightFunction
from hankel_gm.core.exceptions import DomainError, PreconditionError
from tests.conftest import sample_descriptor

THEOREM_WEIGHT = WeightFunction.power(1.0 / 1.5 - 1.0)


def _gaussian_profile(x):
    return np.sqrt(x) * np.exp(-x * x)


@pytest.mark.unit
class TestCutoff:
    def test_sharp(self):
        phi = CutoffSpec(0.5)
        assert phi.support_end == 1.0
        assert list(phi(np.array([0.5, 1.0, 1.01]))) == [1.0, 1.0, 0.0]

    def test_smooth_transition(self):
        phi = CutoffSpec(1.0, CutoffShape.SMOOTH)
        assert phi.support_end == 1.5
        values = phi(np.array([0.5, 1.0, 1.25, 1.5, 2.0]))
        assert values[0] == 1.0 and values[1] == 1.0
        assert 0.0 < values[2] < 1.0
        assert values[3] == 0.0 and values[4] == 0.0

    def test_shape_accepts_text(self):
        assert CutoffSpec(1.0, "smooth").shape is CutoffShape.SMOOTH

    @pytest.mark.parametrize("epsilon", [0.0, -1.0, math.inf])
    def test_invalid_epsilon(self, epsilon):
        with pytest.raises(DomainError):
            CutoffSpec(epsilon)


@pytest.mark.unit
class TestAverages:
    def test_indicator_average(self, indicator):
        phi = CutoffSpec(1.0)
        assert phi_average(indicator, phi, 0.5) == pytest.approx(1.0, rel=1e-12)
        assert phi_average(indicator, phi, 2.0) == pytest.approx(0.5, rel=1e-12)

    def test_smooth_average_adds_the_transition(self, indicator):
        phi = CutoffSpec(1.0, CutoffShape.SMOOTH)
        # the falling half of the plateau step has mass 1/4 on [1, 3/2]
        assert phi_average(indicator, phi, 0.25) == pytest.approx(1.25, rel=1e-4)
        assert phi_average(indicator, phi, 2.0) == pytest.approx(0.5, rel=1e-12)

    def test_average_needs_positive_t(self, indicator):
        with pytest.raises(DomainError):
            phi_average(indicator, CutoffSpec(1.0), 0.0)

    def test_maximal_is_nonincreasing_and_dominates(self, sign_changing):
        phi = CutoffSpec(1.0)
        t = sign_changing.grid[::5]
        maximal = maximal_average(sign_changing, phi, t)
        assert np.all(np.diff(maximal) <= 1e-12)
        assert np.all(maximal >= np.abs(phi_average(sign_changing, phi, t)) - 1e-12)

    def test_maximal_function_models(self):
        g = sample_descriptor("power-truncated:a=0.5,b=1.0")
        m = maximal_function(g, CutoffSpec(1.0))
        # Phi_g(t) = 2 t^(-1/2) below 1 and 2/t beyond
        assert float(m(0.25)) == pytest.approx(4.0, rel=1e-5)
        assert float(m(4.0)) == pytest.approx(0.5, rel=1e-5)
        assert m.tail.exponent == pytest.approx(-1.0, rel=1e-6)
        assert m.head.exponent == pytest.approx(-0.5)


@pytest.mark.unit
class TestSeminorm:
    def test_sup_of_weighted_gaussian(self):
        assert seminorm_gamma(_gaussian_profile, 0.0, 2, 0) == pytest.approx(math.exp(-1.0), rel=1e-9)

    def test_first_derivative(self):
        # (x^-1 D) e^(-x^2) = -2 e^(-x^2), so the sup of 2x e^(-x^2) is sqrt(2/e)
        assert seminorm_gamma(_gaussian_profile, 0.0, 1, 1) == pytest.approx(math.sqrt(2.0 / math.e), rel=1e-7)

    def test_growing_profile_is_infinite(self):
        assert math.isinf(seminorm_gamma(lambda x: np.sqrt(x), 0.0, 1, 0))

    @pytest.mark.parametrize("m,n", [(-1, 0), (0, -1), (0, 5), (0.5, 0)])
    def test_invalid_indices(self, m, n):
        with pytest.raises(DomainError):
            seminorm_gamma(_gaussian_profile, 0.0, m, n)


@pytest.mark.unit
class TestMaximalBound:
    def test_truncated_power_closed_form(self):
        g = sample_descriptor("power-truncated:a=0.5,b=1.0")
        result = maximal_bound_check(g, THEOREM_WEIGHT, 1.0)
        # ||g||_1,w = 6 and ||M Phi_g||_1,w = 12 + 6
        assert result.norm_g == pytest.approx(6.0, rel=1e-4)
        assert result.ratio == pytest.approx(1.0 / 3.0, rel=1e-3)
        assert result.passed
        assert result.drift is not None and result.drift < 0.05
        assert result.shape == "sharp"

    def test_sign_changing_ratio_is_finite(self):
        result = maximal_bound_check(sample_descriptor("dyadic-sign-power:a=0.5,b=8.0"), THEOREM_WEIGHT, 1.0)
        assert math.isfinite(result.ratio) and result.ratio > 0
        assert result.passed

    def test_non_decaying_function_rejected(self):
        with pytest.raises(PreconditionError) as info:
            maximal_bound_check(sample_descriptor("indicator:b=inf"), THEOREM_WEIGHT, 1.0)
        assert info.value.hypothesis == "vanishing-at-infinity"

    def test_non_gm_function_rejected(self):
        f = sample(parse_descriptor("exponential:rate=1.0"), 2.0 ** -4, 2.0 ** 5, 2.0 ** (1.0 / 16))
        with pytest.raises(PreconditionError) as info:
            maximal_bound_check(f, THEOREM_WEIGHT, 1.0)
        assert info.value.hypothesis == "general-monotone"

    def test_non_doubling_weight_rejected(self):
        weight = WeightFunction(closure=lambda x: np.where(x > 1.0, 1.0, 0.0))
        with pytest.raises(PreconditionError) as info:
            maximal_bound_check(sample_descriptor("power-truncated:a=0.5,b=1.0"), weight, 1.0)
        assert info.value.hypothesis == "doubling-weight"

    def test_good_number_lower_bound(self):
        g = sample_descriptor("dyadic-sign-power:a=0.5", lo=-6, hi=6)
        profile = dyadic_profile(g, r=2.0)
        bound = good_number_lower_bound(g, profile, CutoffSpec(1.0))
        assert bound.ns == profile.good_numbers
        assert all(math.isfinite(r) and r > 0 for r in bound.ratios)
        assert bound.minimum > 0


@pytest.mark.slow
class TestMaximalLorentz:
    def test_gaussian(self, transform_settings):
        f = sample_descriptor("gaussian-hermite:alpha=0.0", lo=-8, hi=5)
        result = maximal_lorentz_check(f, 0.0, 2.0, 2.0, transform_settings=transform_settings)
        assert result.passed
        assert math.isfinite(result.value) and result.value > 0

    def test_needs_p_above_one(self, indicator):
        with pytest.raises(DomainError):
            maximal_lorentz_check(indicator, 0.5, 1.0, 2.0)
