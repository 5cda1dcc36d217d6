"""Corpus, experiment files, norm-inequality checks and the equivalence executor."""

import math

import numpy as np
import pytest

from hankel_gm.analysis.funcrep import parse_descriptor, sample
from hankel_gm.analysis.transform import LineSamples
from hankel_gm.config.settings import settings
from hankel_gm.core.exceptions import ConfigurationError, DomainError, PreconditionError
from hankel_gm.harness.checks import (
    booton_check,
    check_exponent_range,
    fourier_equivalence,
    hardy_check,
    lorentz_pitt_check,
    maximal_check,
    norm_ratio,
    parseval_verdict,
    pitt_check,
    radial_equivalence,
)
from hankel_gm.harness.config_file import ConfigFileParser, load_experiment_config, spaces_text
from hankel_gm.harness.corpus import DEFAULT_CORPUS, build_corpus, parse_corpus, random_members
from hankel_gm.harness.executor import ExperimentExecutor, band_summary, dilation_spread, run_equivalence
from hankel_gm.schemas import ExperimentConfig, RatioReport, RatioRow, SpacePair
from tests.conftest import sample_descriptor


def _config(**overrides) -> ExperimentConfig:
    fields = {
        "corpus": ["indicator:b=1.0"],
        "spaces": [SpacePair(p=2.0, q=2.0)],
        "window": (-8, 8, 8),
        "y_window": (-6, 6, 4),
    }
    fields.update(overrides)
    return ExperimentConfig(**fields)


def _row(fn: str, ratio: float, lorentz=None, flag: str = "ok") -> RatioRow:
    return RatioRow(fn=fn, p=2.0, q=2.0, c=1.0, ratio_lebesgue=ratio, ratio_lorentz=lorentz, flag=flag)


def _dilated_rows(fn: str, ratios, budget: float = 0.0):
    return [
        RatioRow(fn=fn, p=2.0, q=2.0, c=c, ratio_lebesgue=r, ratio_lorentz=r, err_budget=budget)
        for c, r in zip((0.5, 1.0, 2.0), ratios)
    ]


@pytest.mark.unit
class TestCorpus:
    def test_default_corpus(self):
        functions = parse_corpus(list(DEFAULT_CORPUS))
        assert len(functions) >= 10
        assert sum(f.changes_sign for f in functions) >= 3

    def test_random_members_are_seeded(self):
        first = random_members(6, seed=7)
        assert first == random_members(6, seed=7)
        assert [parse_descriptor(f.descriptor()) for f in first] == first

    def test_sign_changing_fallback(self):
        corpus = build_corpus(_config(corpus=["indicator:b=1.0", "indicator:b=1.0"]))
        assert len(corpus) == 2
        assert corpus[0].descriptor() == parse_descriptor("indicator:b=1.0").descriptor()
        assert corpus[1].changes_sign

    def test_malformed_member(self):
        with pytest.raises(ConfigurationError) as info:
            parse_corpus(["no-such-kind:a=1"])
        assert info.value.details["descriptor"] == "no-such-kind:a=1"


@pytest.mark.unit
class TestConfigFile:
    def test_values_are_converted(self):
        config = ConfigFileParser.parse_values({
            "CORPUS": "indicator:b=1.0; dyadic-sign-power:a=0.25,b=8.0",
            "alpha": "0.5",
            "SPACES": "2:2,1.5:inf",
            "WINDOW": "-8:8:8",
            "DILATIONS": "0.5, 1, 2",
            "SEED": "3",
            "DILATION_RTOL": "1e-4",
        })
        assert config.corpus == ["indicator:b=1.0", "dyadic-sign-power:a=0.25,b=8.0"]
        assert config.spaces == [SpacePair(p=2.0, q=2.0), SpacePair(p=1.5, q=math.inf)]
        assert config.window == (-8, 8, 8)
        assert config.dilations == [0.5, 1.0, 2.0]
        assert config.seed == 3
        assert config.dilation_rtol == 1e-4
        assert spaces_text(config) == "2.0:2.0,1.5:inf"

    def test_defaults_come_from_settings(self):
        config = ConfigFileParser.parse_values({})
        assert config.corpus == list(DEFAULT_CORPUS)
        assert config.window == (settings.window_min_exp, settings.window_max_exp, settings.nodes_per_octave)
        assert config.dilations == settings.dilations
        assert config.dilation_rtol == settings.dilation_rtol

    @pytest.mark.parametrize("values", [
        {"COLOUR": "blue"},
        {"ALPHA": "half"},
        {"WINDOW": "1:2"},
        {"WINDOW": "8:-8:8"},
        {"SPACES": "2"},
        {"ALPHA": "-1.0"},
        {"DILATION_RTOL": "0"},
    ])
    def test_invalid_values(self, values):
        with pytest.raises(ConfigurationError):
            ConfigFileParser.parse_values(values)

    def test_load_file(self, tmp_path):
        path = tmp_path / "experiment.env"
        path.write_text("CORPUS=indicator:b=1.0\nALPHA=0.0\nSPACES=2:1\n", encoding="utf-8")
        config = load_experiment_config(path)
        assert config.alpha == 0.0
        assert config.spaces == [SpacePair(p=2.0, q=1.0)]

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigurationError):
            load_experiment_config(tmp_path / "missing.env")


@pytest.mark.unit
class TestRatios:
    @pytest.mark.parametrize("numerator,denominator,expected", [
        (3.0, 2.0, (1.5, "ok")),
        (0.0, 0.0, (0.0, "zero")),
        (math.inf, math.inf, (math.inf, "both-infinite")),
        (math.inf, 1.0, (math.inf, "infinite-ratio")),
        (1.0, 0.0, (math.inf, "infinite-ratio")),
        (1.0, math.inf, (0.0, "infinite-ratio")),
    ])
    def test_norm_ratio(self, numerator, denominator, expected):
        assert norm_ratio(numerator, denominator) == expected

    @pytest.mark.parametrize("alpha,p,q", [(0.5, 0.5, 2.0), (0.5, math.inf, 2.0), (0.0, 2.0, 0.5), (-0.5, 1.0, 2.0)])
    def test_exponent_range(self, alpha, p, q):
        with pytest.raises(DomainError):
            check_exponent_range(alpha, p, q)

    def test_exponent_range_accepts_endpoints_of_q(self):
        check_exponent_range(0.5, 0.6, 1.0)
        check_exponent_range(0.5, 0.6, math.inf)


@pytest.mark.unit
class TestOneSidedChecks:
    def test_pitt_on_sign_changing_function(self, transform_settings):
        f = sample_descriptor("dyadic-sign-power:a=0.25,b=8.0")
        result = pitt_check(f, 0.5, 2.0, 2.0, transform_settings)
        assert result.passed
        assert result.flag == "ok"
        assert math.isfinite(result.value) and result.value > 0

    def test_pitt_sup_norm(self, indicator, transform_settings):
        result = pitt_check(indicator, 0.5, 2.0, math.inf, transform_settings)
        assert result.flag == "sup-norm"
        assert result.details["function_norm"] == pytest.approx(1.0, rel=1e-12)

    def test_pitt_rejects_small_p(self, indicator):
        with pytest.raises(DomainError):
            pitt_check(indicator, 0.5, 0.4, 2.0)

    def test_lorentz_pitt_needs_p_above_one(self, indicator):
        with pytest.raises(DomainError):
            lorentz_pitt_check(indicator, 0.5, 1.0, 2.0)

    def test_booton_on_indicator(self, indicator):
        result = booton_check(indicator, 2.0, 2.0)
        assert result.value == pytest.approx(1.0, rel=1e-9)
        assert result.details["nonincreasing"]
        assert result.passed

    def test_booton_on_dyadic_sign_function(self, sign_changing):
        # the sign alternates but |f| = x^(-1/4) on (0, 8) is nonincreasing
        result = booton_check(sign_changing, 3.0, 1.5)
        assert result.details["nonincreasing"]
        assert result.value == pytest.approx(1.0, rel=1e-9)
        assert result.passed

    def test_booton_band_across_dilations(self):
        f = parse_descriptor("sign-change-exponential:a=0.25,x0=2.0")
        results = [
            booton_check(sample(f.dilated(c), 2.0 ** -10, 2.0 ** 8, 2.0 ** (1.0 / 16)), 3.0, 1.5)
            for c in (0.5, 1.0, 2.0)
        ]
        assert all(not r.details["nonincreasing"] for r in results)
        assert all(r.threshold is None and r.passed for r in results)
        values = [r.value for r in results]
        assert max(values) / min(values) < 1.01

    def test_booton_range(self, indicator):
        with pytest.raises(DomainError):
            booton_check(indicator, 1.0, 2.0)

    def test_maximal_with_theorem_weight(self):
        result = maximal_check(sample_descriptor("power-truncated:a=0.5,b=1.0"), 1.5, 1.0)
        assert result.value == pytest.approx(1.0 / 3.0, rel=1e-3)
        assert result.passed

    def test_maximal_needs_finite_q(self, indicator):
        with pytest.raises(DomainError):
            maximal_check(indicator, 2.0, math.inf)


@pytest.mark.unit
class TestHardy:
    def test_pure_power_is_inconclusive(self):
        f = sample_descriptor("power-truncated:a=0.5,b=inf", lo=-6, hi=6)
        result = hardy_check(f, 0.5, 2.0)
        assert result.head_flag == "inconclusive"
        assert result.tail_flag == "inconclusive"
        assert result.passed

    def test_indicator_outer_inequality(self, indicator):
        # int_0^1 (y log y)^2 dy/y = 1/4 against int_0^1 x dx = 1/2
        result = hardy_check(indicator, 1.0, 2.0)
        assert result.head_flag == "inconclusive"
        assert result.tail_ratio == pytest.approx(0.5, rel=1e-3)
        assert result.threshold == 1.0
        assert result.passed

    @pytest.mark.parametrize("sigma,q", [(0.0, 2.0), (1.0, 0.5), (1.0, math.inf)])
    def test_invalid_parameters(self, indicator, sigma, q):
        with pytest.raises(DomainError):
            hardy_check(indicator, sigma, q)


@pytest.mark.unit
class TestCorollaries:
    def test_fourier_gaussian(self, transform_settings):
        line = LineSamples.from_callable(lambda x: np.exp(-0.5 * x * x), 2.0 ** -10, 2.0 ** 5, 2.0 ** (1.0 / 32))
        result = fourier_equivalence(line, 2.0, 2.0, transform_settings)
        assert result.weighted_f == pytest.approx(math.pi ** 0.25, rel=1e-6)
        assert result.ratio_weighted == pytest.approx(math.sqrt(2.0 * math.pi), rel=1e-3)
        assert result.ratio_lorentz == pytest.approx(math.sqrt(2.0 * math.pi), rel=1e-3)

    def test_fourier_range(self, indicator):
        line = LineSamples(indicator, indicator)
        with pytest.raises(DomainError):
            fourier_equivalence(line, 1.0, 2.0)

    def test_radial_plancherel(self, transform_settings):
        f0 = sample_descriptor("gaussian-hermite:alpha=-0.5", lo=-8, hi=5, per_octave=32)
        result = radial_equivalence(f0, 3, 0.0, 2.0, transform_settings)
        assert result.params.gamma == pytest.approx(0.0)
        assert result.ratio == pytest.approx((2.0 * math.pi) ** 3, rel=1e-3)

    def test_radial_inadmissible_beta(self, indicator):
        with pytest.raises(PreconditionError) as info:
            radial_equivalence(indicator, 3, 5.0, 2.0)
        assert info.value.hypothesis == "radial-admissibility"


@pytest.mark.slow
class TestParsevalVerdict:
    def test_gaussian_pair(self, transform_settings):
        f = sample_descriptor("gaussian-hermite:alpha=0.0", lo=-6, hi=4)
        G = sample_descriptor("power-exponential:a=0.25,rate=1.0", lo=-6, hi=5)
        result = parseval_verdict(f, G, 0.0, transform_settings)
        assert result.passed
        assert result.value <= result.threshold


@pytest.mark.unit
class TestExecutor:
    def test_inadmissible_space(self):
        with pytest.raises(ConfigurationError) as info:
            ExperimentExecutor(_config(alpha=0.5, spaces=[SpacePair(p=0.4, q=2.0)]))
        assert info.value.details["p_lower"] == pytest.approx(0.5)

    def test_unknown_tail_mode(self):
        with pytest.raises(ConfigurationError):
            ExperimentExecutor(_config(tail_mode="sideways"))

    def test_band_summary(self):
        report = RatioReport(alpha=0.5, rows=[
            _row("a", 1.0),
            _row("b", 4.0),
            _row("c", math.inf, flag="infinite-ratio"),
        ])
        (band,) = band_summary(report, band_max_ratio=10.0)
        assert (band.kind, band.minimum, band.maximum, band.spread) == ("lebesgue", 1.0, 4.0, 4.0)
        assert band.within_band
        assert not band_summary(report, band_max_ratio=2.0)[0].within_band

    def test_lorentz_band(self):
        report = RatioReport(alpha=0.0, rows=[_row("a", 1.0, 2.0), _row("b", 1.0, 3.0)])
        bands = {band.kind: band for band in band_summary(report)}
        assert bands["lorentz"].spread == pytest.approx(1.5)

    def test_dilation_spread(self):
        rows = _dilated_rows("invariant", [1.0, 1.0 + 1e-8, 1.0]) + _dilated_rows("drifting", [1.0, 2.0, 4.0])
        spreads = {(s.fn, s.kind): s for s in dilation_spread(RatioReport(alpha=0.5, rows=rows), rtol=1e-6)}
        assert len(spreads) == 4
        assert spreads[("invariant", "lebesgue")].within_tolerance
        drifting = spreads[("drifting", "lorentz")]
        assert drifting.spread == pytest.approx(3.0)
        assert drifting.dilations == [0.5, 1.0, 2.0]
        assert not drifting.within_tolerance

    def test_dilation_spread_allows_the_error_budget(self):
        report = RatioReport(alpha=0.5, rows=_dilated_rows("a", [1.0, 1.001, 1.0], budget=1e-3))
        lebesgue, _ = dilation_spread(report, rtol=1e-6)
        assert lebesgue.tolerance == pytest.approx(1e-6 + 2e-3)
        assert lebesgue.within_tolerance
        tight = RatioReport(alpha=0.5, rows=_dilated_rows("a", [1.0, 1.001, 1.0]))
        assert not dilation_spread(tight)[0].within_tolerance

    def test_single_dilation_has_no_spread(self):
        assert dilation_spread(RatioReport(alpha=0.5, rows=[_row("a", 1.0)])) == []


@pytest.mark.slow
class TestEquivalenceRun:
    def test_dilation_invariance_and_skips(self):
        config = _config(
            corpus=["power-exponential:a=0.25,rate=1.0", "exponential:rate=1.0"],
            spaces=[SpacePair(p=2.0, q=2.0), SpacePair(p=1.5, q=1.0)],
            dilations=[0.5, 1.0, 2.0],
            y_window=(-6, 10, 4),
            workers=2,
        )
        report = run_equivalence(config)
        assert [s.reason for s in report.skipped] == ["not-general-monotone"]
        # the sign-changing fallback joins the corpus
        assert len({row.fn for row in report.rows}) == 2
        assert len(report.rows) == 2 * 2 * 3
        smooth = parse_descriptor("power-exponential:a=0.25,rate=1.0").descriptor()
        for p, q in ((2.0, 2.0), (1.5, 1.0)):
            ratios = [r.ratio_lebesgue for r in report.rows if r.fn == smooth and (r.p, r.q) == (p, q)]
            assert len(ratios) == 3
            np.testing.assert_allclose(ratios, ratios[1], rtol=5e-3)
        assert report.metadata["seed"] == 0
        assert report.schema_version == settings.report_schema_version

    def test_plancherel_rows(self):
        report = run_equivalence(_config(corpus=["power-exponential:a=0.25,rate=1.0"], y_window=(-6, 10, 4)))
        smooth = parse_descriptor("power-exponential:a=0.25,rate=1.0").descriptor()
        rows = [r for r in report.rows if r.fn == smooth]
        assert rows
        for row in rows:
            assert row.flag == "ok"
            assert row.ratio_lebesgue == pytest.approx(1.0, rel=5e-3)
            assert row.ratio_lorentz == pytest.approx(1.0, rel=5e-3)
