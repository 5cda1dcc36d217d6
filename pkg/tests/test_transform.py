"""Hankel transform values, inverse, Fourier on the line, radial transforms and diagnostics."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from pydantic import ValidationError

from hankel_gm.analysis.funcrep import Interpolation
from hankel_gm.analysis.transform import (
    LineSamples,
    TailMode,
    TransformSettings,
    calderon_profile,
    even_part_distribution_check,
    fourier_1d,
    hankel_inverse,
    hankel_transform,
    hankel_values,
    hardy_littlewood_ranges,
    parseval_check,
    pointwise_bound_profile,
    radial_fourier,
    radial_weight_params,
    truncation_probe,
)
from hankel_gm.core.exceptions import ConvergenceError, DomainError
from tests.conftest import sample_descriptor

YS = np.array([0.1, 0.5, 1.0, 3.0, 7.5, 20.0])
SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)


def _open_indicator(x):
    return (np.abs(x) < 1.0).astype(float)


def _gaussian(x):
    return np.exp(-0.5 * x * x)


@pytest.mark.unit
class TestSettings:
    def test_truncation_order(self):
        with pytest.raises(ValidationError):
            TransformSettings(m=2.0, n=1.0)

    def test_y_window_order(self):
        with pytest.raises(ValidationError):
            TransformSettings(y_min_exp=3, y_max_exp=3)

    def test_tail_mode_short_name(self):
        assert TransformSettings(tail_mode="ibp").tail_mode is TailMode.INTEGRATE_BY_PARTS

    def test_default_ladder(self):
        ladder = TransformSettings(ladder_levels=3).ladder(4.0)
        assert ladder[0] == (0.125, 2.0)
        assert ladder[1] == (0.125 / 16.0, 32.0)
        assert len(ladder) == 3

    @pytest.mark.parametrize("y", [0.1, 1.0, 10.0])
    def test_first_rung_is_ordered(self, y):
        m, n = TransformSettings().ladder(y)[0]
        assert 0 < m < n

    def test_single_truncation_override(self):
        assert TransformSettings(m=8.0).ladder(1.0)[0] == (8.0, 16.0)
        assert TransformSettings(n=0.25).ladder(1.0)[0] == (0.125, 0.25)

    def test_frozen(self, transform_settings):
        with pytest.raises(ValidationError):
            transform_settings.tol = 1.0


@pytest.mark.unit
class TestClosedForms:
    def test_indicator_cosine_transform(self, indicator, transform_settings):
        values, errors = hankel_values(indicator, -0.5, YS, transform_settings)
        assert_allclose(values, SQRT_2_OVER_PI * np.sin(YS) / YS, atol=1e-8)
        assert np.all(errors < 1e-6)

    def test_indicator_sine_transform(self, indicator, transform_settings):
        values, _ = hankel_values(indicator, 0.5, YS, transform_settings)
        assert_allclose(values, SQRT_2_OVER_PI * (1.0 - np.cos(YS)) / YS, atol=1e-8)

    @pytest.mark.parametrize("tail_mode", list(TailMode))
    @pytest.mark.parametrize("alpha", [0.0, 0.5, 2.0])
    def test_inverse_square_root_is_self_reciprocal(self, alpha, tail_mode):
        f = sample_descriptor("power-truncated:a=0.5,b=inf", lo=-8, hi=8)
        settings = TransformSettings.from_settings(tail_mode=tail_mode)
        ys = np.array([0.5, 1.0, 2.0])
        values, _ = hankel_values(f, alpha, ys, settings)
        assert_allclose(values, ys ** -0.5, rtol=1e-6)

    def test_points_must_be_positive(self, indicator):
        with pytest.raises(DomainError):
            hankel_values(indicator, 0.0, [0.0, 1.0])

    def test_head_divergence(self):
        f = sample_descriptor("power-truncated:a=2.0,b=1.0")
        with pytest.raises(ConvergenceError):
            hankel_values(f, 0.0, [1.0])

    def test_tail_divergence(self):
        with pytest.raises(ConvergenceError):
            hankel_values(sample_descriptor("indicator:b=inf"), 0.0, [1.0])

    def test_error_estimate_covers_linear_cells(self, transform_settings):
        f = sample_descriptor("gaussian-hermite:alpha=-0.5", lo=-10, hi=5, per_octave=8, interp=Interpolation.LINEAR)
        ys = np.array([0.5, 1.0, 2.0])
        values, errors = hankel_values(f, -0.5, ys, transform_settings)
        actual = np.abs(values - np.exp(-0.5 * ys * ys))
        assert np.all(actual <= 1.1 * errors)
        assert np.all(errors < 1e-2)

    def test_short_window_round_trip(self):
        settings = TransformSettings.from_settings(y_min_exp=-5, y_max_exp=3, y_nodes_per_octave=8)
        f = sample_descriptor("gaussian-hermite:alpha=0.0", lo=-5, hi=3, per_octave=8)
        back = hankel_inverse(hankel_transform(f, 0.0, settings), 0.0, settings)
        inside = (back.grid >= 0.25) & (back.grid <= 2.5)
        assert_allclose(back.values[inside], f(back.grid[inside]), atol=1e-4)

    def test_transform_on_grid(self, indicator, transform_settings):
        F = hankel_transform(indicator, 0.5, transform_settings)
        assert F.grid.size == transform_settings.y_grid().size
        assert F.interp is Interpolation.CUBIC
        assert len(F.metadata["error_estimate"]) == F.grid.size
        assert F.metadata["alpha"] == 0.5


@pytest.mark.slow
class TestSelfReciprocity:
    @pytest.mark.parametrize("alpha", [-0.5, 0.0, 0.5, 2.0])
    def test_gaussian_hermite(self, alpha, transform_settings):
        f = sample_descriptor(f"gaussian-hermite:alpha={alpha}", lo=-10, hi=5, per_octave=64)
        ys = transform_settings.y_grid()
        values, _ = hankel_values(f, alpha, ys, transform_settings)
        expected = ys ** (alpha + 0.5) * np.exp(-0.5 * ys * ys)
        assert np.linalg.norm(values - expected) / np.linalg.norm(expected) < 1e-6

    def test_round_trip(self):
        settings = TransformSettings.from_settings(y_min_exp=-8, y_max_exp=3, y_nodes_per_octave=16)
        f = sample_descriptor("gaussian-hermite:alpha=0.0", lo=-8, hi=3)
        back = hankel_inverse(hankel_transform(f, 0.0, settings), 0.0, settings)
        inside = (back.grid >= 0.25) & (back.grid <= 2.5)
        assert_allclose(back.values[inside], f(back.grid[inside]), atol=1e-4)
        assert back.metadata["transform"] == "inverse"


@pytest.mark.unit
class TestFourier:
    def test_gaussian(self, transform_settings):
        line = fourier_1d(_gaussian, transform_settings, x_min=2.0 ** -10, x_max=2.0 ** 5, ratio=2.0 ** (1.0 / 32))
        ys = line.positive.grid
        expected = math.sqrt(2.0 * math.pi) * np.exp(-0.5 * ys * ys)
        assert_allclose(line.positive.values.real, expected, atol=1e-6)
        assert_allclose(line.positive.values.imag, 0.0, atol=1e-12)
        assert_allclose(line.negative.values, line.positive.values, atol=1e-12)

    def test_indicator_of_symmetric_interval(self, transform_settings):
        line = fourier_1d(
            _open_indicator,
            transform_settings,
            x_min=2.0 ** -10,
            x_max=2.0 ** 4,
            ratio=2.0 ** (1.0 / 16),
            jumps=(1.0, -1.0),
            interp=Interpolation.CONSTANT_LEFT,
        )
        ys = line.positive.grid
        assert_allclose(line.positive.values.real, 2.0 * np.sin(ys) / ys, atol=1e-8)

    def test_smooth_samples_carry_no_jumps(self):
        line = LineSamples.from_callable(_gaussian, 2.0 ** -10, 2.0 ** 5, 2.0 ** (1.0 / 32))
        assert line.positive.left_values is None
        assert line.negative.left_values is None
        assert line.even_part().jump_nodes.size == 0

    def test_only_declared_jumps_are_recorded(self):
        line = LineSamples.from_callable(
            lambda x: np.where(x < 1.0, _gaussian(x), 0.0), 2.0 ** -6, 2.0 ** 3, 2.0 ** (1.0 / 16), jumps=(1.0,)
        )
        jumps = line.positive.jump_nodes
        assert line.positive.grid[jumps].tolist() == [1.0]
        assert line.positive.left_limits[jumps[0]] == pytest.approx(math.exp(-0.5))
        assert line.negative.left_values is None

    def test_halves_need_matching_grids(self, indicator):
        with pytest.raises(DomainError):
            LineSamples(indicator, sample_descriptor("indicator:b=1.0", lo=-6, hi=6))

    def test_even_part_distribution(self):
        line = LineSamples.from_callable(
            lambda x: ((x > -1.0) & (x < 2.0)).astype(float),
            2.0 ** -8,
            2.0 ** 4,
            2.0 ** (1.0 / 16),
            jumps=(-1.0, 2.0),
            interp=Interpolation.CONSTANT_LEFT,
        )
        comparison = even_part_distribution_check(line, levels=[0.25, 0.75])
        assert comparison.ratios == pytest.approx([4.0 / 3.0, 2.0 / 3.0], rel=1e-9)
        assert comparison.passed


@pytest.mark.unit
class TestRadial:
    def test_planar_gaussian(self, transform_settings):
        F = radial_fourier(sample_descriptor("gaussian-hermite:alpha=-0.5", lo=-10, hi=5, per_octave=32), 2, transform_settings)
        assert_allclose(F.values, 2.0 * math.pi * np.exp(-0.5 * F.grid ** 2), atol=5e-6)
        assert F.metadata["dimension"] == 2

    def test_unit_ball(self, indicator, transform_settings):
        F = radial_fourier(indicator, 3, transform_settings)
        y = F.grid
        assert_allclose(F.values, 4.0 * math.pi * (np.sin(y) - y * np.cos(y)) / y ** 3, atol=1e-7)

    def test_dimension_must_be_positive(self, indicator):
        with pytest.raises(DomainError):
            radial_fourier(indicator, 0)

    def test_weight_parameters_on_a_grid(self):
        for n in (1, 2, 3, 5):
            for q in np.linspace(1.05, 9.95, 50):
                for beta in np.linspace(-4.0, 4.0, 50):
                    params = radial_weight_params(n, float(q), float(beta))
                    lower, upper = n / q - (n + 1) / 2.0, n / q
                    assert params.gamma == pytest.approx(beta + n - 2.0 * n / q)
                    assert params.admissible == (lower < beta < upper)
                    if beta <= lower:
                        assert params.violated == "lower"
                    elif beta >= upper:
                        assert params.violated == "upper"
                    else:
                        assert params.violated is None

    def test_hardy_littlewood_flags(self):
        assert radial_weight_params(1, 1.5, 0.0).hardy_littlewood_plain
        assert radial_weight_params(1, 9.0, 0.0).hardy_littlewood_weighted
        assert not radial_weight_params(3, 1.2, 0.0).hardy_littlewood_plain
        assert not radial_weight_params(3, 4.0, 0.0).hardy_littlewood_weighted
        assert hardy_littlewood_ranges(2).plain == (4.0 / 3.0, math.inf)
        assert hardy_littlewood_ranges(2).weighted == (1.0, 4.0)

    @pytest.mark.parametrize("q", [1.0, math.inf])
    def test_q_range(self, q):
        with pytest.raises(DomainError):
            radial_weight_params(2, q, 0.0)


@pytest.mark.unit
class TestDiagnostics:
    @pytest.mark.parametrize("y", [0.1, 1.0, 10.0])
    def test_truncation_ladder_converges(self, transform_settings, y):
        f = sample_descriptor("power-truncated:a=0.5,b=inf", lo=-8, hi=8)
        ladder = truncation_probe(f, 0.0, y, settings=transform_settings)
        assert ladder.converging
        assert len(ladder.partials) == transform_settings.ladder_levels
        assert np.all(np.diff(ladder.cauchy) < 0)
        # H_0 of x^(-1/2) is y^(-1/2)
        assert ladder.partials[-1] == pytest.approx(y ** -0.5, abs=ladder.cauchy[-1] + 1e-5)

    def test_ladder_rungs_must_be_ordered(self, indicator):
        with pytest.raises(DomainError):
            truncation_probe(indicator, 0.0, 1.0, ladder=[(2.0, 1.0)])

    def test_ladder_needs_positive_y(self, indicator):
        with pytest.raises(DomainError):
            truncation_probe(indicator, 0.0, -1.0)

    def test_pointwise_majorant_constant(self, indicator, transform_settings):
        F = hankel_transform(indicator, 0.5, transform_settings)
        fit = pointwise_bound_profile(indicator, F, 0.5)
        assert 0 < fit.constant < math.inf

    def test_calderon_majorant_constant(self, indicator, transform_settings):
        F = hankel_transform(indicator, 0.5, transform_settings)
        fit = calderon_profile(indicator, F)
        assert 0 < fit.constant < math.inf


@pytest.mark.slow
class TestParseval:
    def test_gaussian_against_indicator(self, transform_settings):
        f = sample_descriptor("gaussian-hermite:alpha=0.0", lo=-6, hi=4)
        G = sample_descriptor("indicator:b=1.0", lo=-6, hi=2)
        result = parseval_check(f, G, 0.0, transform_settings)
        assert result.residual < 1e-6
        assert result.lhs == pytest.approx(result.rhs, abs=1e-6)
