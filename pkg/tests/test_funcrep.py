"""Function representation: descriptors, sampling, integrals, variation and persistence."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose, assert_array_equal

from hankel_gm.analysis.funcrep import (
    FunctionKind,
    Interpolation,
    PowerLaw,
    SampledFunction,
    antiderivative,
    even_odd_split,
    geometric_grid,
    insert_nodes,
    integrate,
    load_csv,
    modulus_view,
    multiply_power,
    parse_descriptor,
    sample,
    save_csv,
    total_variation,
)
from hankel_gm.core.exceptions import DomainError, ReportIOError, SamplingError
from tests.conftest import sample_descriptor


@pytest.mark.unit
class TestDescriptors:
    @pytest.mark.parametrize("text", [
        "power-truncated:a=0.5,b=1.0",
        "dyadic-sign-power:a=0.6,b=4.0",
        "indicator:b=1.0",
        "smooth-broken-power:a=0.25,b=2.0,amplitude=3.0",
        "gaussian-hermite:alpha=2.0",
        "sign-change-exponential:a=0.25,x0=2.0,weight_exponent=0.5",
    ])
    def test_descriptor_reproduces_function(self, text):
        f = parse_descriptor(text)
        assert parse_descriptor(f.descriptor()) == f

    def test_defaults_are_filled_in(self):
        f = parse_descriptor("dyadic-sign-power:a=0.5")
        assert f.kind is FunctionKind.DYADIC_SIGN_POWER
        assert math.isinf(f["b"])

    @pytest.mark.parametrize("text", [
        "",
        "no-such-kind:a=1",
        "power-truncated:a",
        "power-truncated:a=x",
        "indicator:a=0.5",
        "indicator:a=2.0,b=1.0",
        "smooth-broken-power:a=2.0,b=1.0",
        "custom-closure",
    ])
    def test_malformed_descriptors_rejected(self, text):
        with pytest.raises(DomainError):
            parse_descriptor(text)

    def test_sign_flips_at_dyadic_nodes(self):
        f = parse_descriptor("dyadic-sign-power:a=0.5")
        nodes = 2.0 ** np.arange(-4, 5)
        signs = (-1.0) ** np.arange(-4, 5)
        assert_allclose(f(nodes), signs * nodes ** -0.5, rtol=1e-15)
        assert_allclose(f(nodes, side="left"), -signs * nodes ** -0.5, rtol=1e-15)

    @given(c=st.floats(min_value=1e-3, max_value=1e3), x=st.floats(min_value=1e-3, max_value=1e3))
    @settings(max_examples=100, deadline=None)
    def test_dilation_composes(self, c, x):
        f = parse_descriptor("smooth-broken-power:a=0.25,b=2.0")
        assert f.dilated(c)(x) == pytest.approx(float(f(c * x)), rel=1e-13)

    def test_times_power(self):
        f = parse_descriptor("power-exponential:a=0.25,rate=1.0")
        x = np.array([0.1, 1.0, 10.0])
        assert_allclose(f.times_power(0.5)(x), x ** 0.5 * f(x), rtol=1e-14)

    def test_sign_changing_kinds(self):
        assert parse_descriptor("dyadic-sign-power:a=0.0").changes_sign
        assert not parse_descriptor("indicator:b=1.0").changes_sign
        assert parse_descriptor("indicator:b=1.0").is_nonincreasing


@pytest.mark.unit
class TestPowerLaw:
    def test_oscillating_dilation(self):
        model = PowerLaw(1.0, -0.5, oscillating=True)
        x = np.array([0.3, 1.5, 5.0])
        assert_allclose(model.dilated(2.0)(x), model(2.0 * x), rtol=1e-14)

    def test_integral_of_decaying_tail(self):
        assert PowerLaw(1.0, -2.0).signed_integral(1.0, math.inf) == pytest.approx(1.0, rel=1e-15)

    def test_divergent_power_integral(self):
        assert math.isinf(PowerLaw(1.0, -1.0).power_integral(1.0, 0.0, 1.0, math.inf))


@pytest.mark.unit
class TestGrids:
    def test_dyadic_grid_is_exact(self):
        grid = geometric_grid(0.25, 4.0, 2.0 ** 0.25)
        assert grid.size == 17
        assert 1.0 in grid.tolist()
        assert grid[0] == 0.25 and grid[-1] == 4.0

    @pytest.mark.parametrize("args", [(0.0, 1.0, 1.5), (2.0, 1.0, 1.5), (1.0, 2.0, 2.5), (1.0, 2.0, 1.0)])
    def test_invalid_windows(self, args):
        with pytest.raises(DomainError):
            geometric_grid(*args)

    def test_insert_far_point(self):
        assert_array_equal(insert_nodes(np.array([1.0, 2.0, 4.0]), [3.0]), [1.0, 2.0, 3.0, 4.0])

    def test_insert_snaps_nearby_node(self):
        assert_array_equal(insert_nodes(np.array([1.0, 2.0, 4.0]), [2.1]), [1.0, 2.1, 4.0])

    def test_sample_places_jump_on_grid(self):
        f = sample(parse_descriptor("power-truncated:a=0.5,b=1.5"), 0.25, 4.0, 2.0 ** 0.25)
        assert 1.5 in f.grid.tolist()
        i = f.grid.tolist().index(1.5)
        assert f.values[i] == 0.0
        assert f.left_limits[i] == pytest.approx(1.5 ** -0.5)
        assert f.metadata == {"ratio": 2.0 ** 0.25, "x_min": 0.25, "x_max": 4.0}


@pytest.mark.unit
class TestSampledFunction:
    def test_rejects_unsorted_grid(self):
        with pytest.raises(DomainError):
            SampledFunction(grid=np.array([1.0, 3.0, 2.0]), values=np.zeros(3))

    def test_rejects_mismatched_values(self):
        with pytest.raises(DomainError):
            SampledFunction(grid=np.array([1.0, 2.0]), values=np.zeros(3))

    def test_non_finite_value_is_a_sampling_error(self):
        with pytest.raises(SamplingError):
            SampledFunction(grid=np.array([1.0, 2.0]), values=np.array([1.0, np.inf]))

    def test_sampling_a_pole(self):
        f = parse_descriptor("custom-closure", closure=lambda x: 1.0 / (x - 1.0))
        with pytest.raises(SamplingError) as info:
            sample(f, 0.5, 2.0, 2.0 ** 0.25)
        assert info.value.details["node"] == 1.0

    def test_constant_left_evaluation(self):
        f = SampledFunction(grid=np.array([1.0, 2.0, 3.0]), values=np.array([1.0, 5.0, 0.0]),
                            interp=Interpolation.CONSTANT_LEFT)
        assert_array_equal(f(np.array([1.0, 1.5, 2.0, 2.5])), [1.0, 1.0, 5.0, 5.0])

    def test_multiply_power_is_exact_at_nodes(self, sign_changing):
        g = multiply_power(sign_changing, 0.75)
        assert_allclose(g.values, sign_changing.values * sign_changing.grid ** 0.75, rtol=1e-15)
        assert g.head.exponent == pytest.approx(sign_changing.head.exponent + 0.75)


@pytest.mark.unit
class TestIntegrals:
    def test_inverse_square(self):
        f = sample_descriptor("power-truncated:a=2.0,b=inf", lo=-4, hi=4)
        assert integrate(f, 0.5, 2.0) == pytest.approx(1.5, rel=1e-5)

    def test_tail_model_beyond_window(self):
        f = sample_descriptor("power-truncated:a=2.0,b=inf", lo=-4, hi=4)
        assert integrate(f, 1.0, math.inf) == pytest.approx(1.0, rel=1e-5)

    def test_indicator_with_head_model(self, indicator):
        assert integrate(indicator, 0.0, 4.0) == pytest.approx(1.0, abs=1e-12)

    def test_weighted_integral(self, indicator):
        assert integrate(indicator, 0.0, 1.0, beta=1.0) == pytest.approx(0.5, abs=1e-12)

    def test_empty_interval_rejected(self, indicator):
        with pytest.raises(DomainError):
            integrate(indicator, 2.0, 1.0)

    def test_antiderivative_of_indicator(self, indicator):
        x = np.array([1e-5, 0.25, 0.5, 1.0, 2.0, 1e3])
        assert_allclose(antiderivative(indicator, x), np.minimum(x, 1.0), atol=1e-12)

    def test_unknown_model_rejected(self):
        f = SampledFunction(grid=np.array([1.0, 2.0]), values=np.ones(2))
        with pytest.raises(DomainError):
            integrate(f, 0.5, 2.0)


@pytest.mark.unit
class TestVariationAndModulus:
    def test_one_sign_flip_on_an_octave(self):
        f = sample_descriptor("dyadic-sign-power:a=0.0", lo=-4, hi=4)
        assert total_variation(f, 1.0, 2.0) == pytest.approx(2.0, abs=1e-12)

    def test_jump_at_left_end_excluded(self):
        f = sample_descriptor("dyadic-sign-power:a=0.0", lo=-4, hi=4)
        assert total_variation(f, 1.0, 1.5) == pytest.approx(0.0, abs=1e-12)

    def test_monotone_variation_is_the_drop(self):
        f = sample_descriptor("smooth-broken-power:a=0.25,b=2.0", lo=-6, hi=6)
        expected = float(f(1.0) - f(4.0))
        assert total_variation(f, 1.0, 4.0) == pytest.approx(expected, rel=1e-9)

    def test_modulus_is_nonnegative(self, sign_changing):
        m = modulus_view(sign_changing)
        assert np.all(m.values >= 0)
        assert_allclose(m(sign_changing.grid), np.abs(sign_changing.values), atol=1e-15)


@pytest.mark.unit
class TestEvenOddSplit:
    def test_shifted_indicator(self):
        def f(x):
            return ((x >= -1.0) & (x < 2.0)).astype(float)

        even, odd = even_odd_split(f, 2.0 ** -6, 2.0 ** 4, jumps=(-1.0, 2.0))
        assert float(even(0.5)) == pytest.approx(1.0)
        assert float(even(1.5)) == pytest.approx(0.5)
        assert float(odd(0.5)) == pytest.approx(0.0, abs=1e-15)
        assert float(odd(1.5)) == pytest.approx(0.5)
        assert float(even(3.0)) == pytest.approx(0.0, abs=1e-15)

    def test_asymmetric_negative_grid_rejected(self):
        with pytest.raises(DomainError):
            even_odd_split(np.abs, 0.5, 2.0, 2.0 ** 0.5, negative_grid=np.array([-2.0, -1.0]))


@pytest.mark.unit
class TestPersistence:
    def test_csv_keeps_nodes_jumps_and_models(self, tmp_path, sign_changing):
        target = save_csv(sign_changing, tmp_path / "f.csv")
        assert target.with_suffix(".json").is_file()
        loaded = load_csv(target)
        assert_array_equal(loaded.grid, sign_changing.grid)
        assert_array_equal(loaded.values, sign_changing.values)
        assert_array_equal(loaded.left_limits, sign_changing.left_limits)
        assert loaded.head == sign_changing.head
        assert loaded.tail == sign_changing.tail
        assert loaded.interp is sign_changing.interp

    def test_renamed_abscissa(self, tmp_path, indicator):
        target = save_csv(indicator, tmp_path / "g.csv", abscissa="y")
        assert target.read_text().splitlines()[0] == "y,re,im"
        assert_array_equal(load_csv(target).grid, indicator.grid)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ReportIOError):
            load_csv(tmp_path / "missing.csv")
