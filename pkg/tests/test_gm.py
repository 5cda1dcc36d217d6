"""GM ratio profiles, certificates, dyadic profiles, bad chains and level sets."""

import math

import pytest

from hankel_gm.analysis.funcrep import parse_descriptor, sample
from hankel_gm.analysis.gm import (
    bad_chain,
    certify_gm,
    chain_counts,
    dyadic_profile,
    gm_profile,
    gm_property_profiles,
    gm_ratio,
    good_level_sets,
    lambda_exponent,
    theorem_epsilon,
)
from hankel_gm.core.exceptions import DomainError, NotGeneralMonotoneError, PreconditionError
from tests.conftest import sample_descriptor, step_function


@pytest.fixture
def bump_profile():
    """A_k = 1 on every block except A_0 = 100; bad numbers -1, 1 and 2."""
    g = step_function([2.0 ** -4, 1.0, 2.0, 2.0 ** 8], [1.0, 100.0, 1.0])
    return dyadic_profile(g, r=1.0, nu=1, n_range=(-2, 5))


@pytest.mark.unit
class TestLambda:
    @pytest.mark.parametrize("lam,nu", [(2.0, 1), (4.0, 2), (8.0, 3)])
    def test_powers_of_two(self, lam, nu):
        assert lambda_exponent(lam) == nu

    @pytest.mark.parametrize("lam", [1.0, 0.5, 3.0, math.inf])
    def test_rejected(self, lam):
        with pytest.raises(DomainError):
            lambda_exponent(lam)

    def test_epsilon(self):
        assert theorem_epsilon(1.0, 1, 2.0) == pytest.approx(2.0 ** -36, rel=1e-12)
        with pytest.raises(DomainError):
            theorem_epsilon(0.0, 1, 2.0)


@pytest.mark.unit
class TestRatio:
    @pytest.mark.parametrize("x", [0.25, 1.0, 4.0])
    def test_alternating_sign_at_dyadic_scale(self, x):
        f = sample_descriptor("dyadic-sign-power:a=0.0", lo=-6, hi=6)
        assert gm_ratio(f, x) == pytest.approx(1.0 / math.log(2.0), rel=1e-12)

    def test_zero_over_zero(self):
        f = sample_descriptor("indicator:b=1.0", lo=-6, hi=6)
        assert gm_ratio(f, 8.0) == 0.0

    def test_scale_must_be_positive(self, indicator):
        with pytest.raises(DomainError):
            gm_ratio(indicator, 0.0)

    def test_profile_records_lambda(self):
        f = sample_descriptor("smooth-broken-power:a=0.25,b=2.0", lo=-6, hi=6)
        profile = gm_profile(f, 4.0)
        assert profile.nu == 2
        assert len(profile.scales) == len(profile.ratios) > 0
        assert profile.source == f.source


@pytest.mark.unit
class TestCertificate:
    @pytest.mark.parametrize("descriptor", [
        "power-truncated:a=0.5,b=1.0",
        "smooth-broken-power:a=0.25,b=2.0",
        "dyadic-sign-power:a=0.5,b=8.0",
        "indicator:b=1.0",
        "power-exponential:a=0.25,rate=1.0",
    ])
    def test_corpus_members_certify(self, descriptor):
        certificate = certify_gm(sample_descriptor(descriptor))
        assert certificate.C > 0
        assert certificate.C == pytest.approx(certificate.safety_factor * certificate.sup_ratio)
        assert all(math.isfinite(r) for r in certificate.ratios)

    def test_power_times_gm_function_certifies(self):
        certificate = certify_gm(sample_descriptor("power-exponential:rate=1.0,weight_exponent=0.5"))
        assert math.isfinite(certificate.C)

    @pytest.mark.parametrize("descriptor", [
        "power-exponential:a=0.0,rate=1.0",
        "exponential:rate=-1.0",
        "gaussian-hermite:alpha=-0.5",
    ])
    def test_decaying_monotone_functions_certify(self, descriptor):
        f = sample(parse_descriptor(descriptor), 2.0 ** -4, 2.0 ** 8, 2.0 ** (1.0 / 16))
        certificate = certify_gm(f)
        # nonincreasing f: TV over (x, 2x] <= f(x) <= int_{x/2}^x f(t)/t dt / log 2
        assert certificate.sup_ratio <= (1.0 + 1e-6) / math.log(2.0)

    def test_growing_exponential_is_rejected(self):
        f = sample(parse_descriptor("exponential:rate=1.0"), 2.0 ** -4, 2.0 ** 5, 2.0 ** (1.0 / 16))
        with pytest.raises(NotGeneralMonotoneError) as info:
            certify_gm(f)
        profile = info.value.profile
        assert profile.ratios[-1] > profile.ratios[0]
        assert info.value.exit_code == 1

    def test_window_too_short(self):
        with pytest.raises(DomainError):
            certify_gm(step_function([1.0, 2.0], [1.0]))


@pytest.mark.unit
class TestDyadicProfile:
    def test_inverse_square_is_good_at_r_two(self):
        profile = dyadic_profile(sample_descriptor("power-truncated:a=2.0,b=inf", lo=-6, hi=6), r=2.0)
        assert (profile.n_min, profile.n_max) == (-4, 4)
        assert profile.bad_numbers == []
        assert profile.B[0] == pytest.approx(16.0 * profile.A[0], rel=1e-12)

    def test_inverse_cube_depends_on_r(self):
        g = sample_descriptor("power-truncated:a=3.0,b=inf", lo=-6, hi=6)
        assert dyadic_profile(g, r=2.0).good_numbers == []
        assert dyadic_profile(g, r=3.0).bad_numbers == []

    def test_missing_blocks(self):
        g = sample_descriptor("power-truncated:a=2.0,b=inf", lo=-6, hi=6)
        with pytest.raises(DomainError):
            dyadic_profile(g, n_range=(-20, 0))

    def test_nu_must_be_positive(self, indicator):
        with pytest.raises(DomainError):
            dyadic_profile(indicator, nu=0)

    def test_bump_classification(self, bump_profile):
        assert bump_profile.A[0] == 100.0
        assert bump_profile.bad_numbers == [-1, 1, 2]


@pytest.mark.unit
class TestChains:
    def test_chain_below_the_bump_increases(self, bump_profile):
        chain = bad_chain(bump_profile, -1)
        assert chain.gammas == [-1, 0]
        assert chain.direction == "increasing"
        assert chain.status == "terminated"

    def test_chain_above_the_bump_decreases(self, bump_profile):
        chain = bad_chain(bump_profile, 2)
        assert chain.gammas == [2, 0]
        assert chain.direction == "decreasing"
        assert chain.length == 1 and chain.end == 0

    def test_good_start_is_rejected(self, bump_profile):
        with pytest.raises(PreconditionError) as info:
            bad_chain(bump_profile, 0)
        assert info.value.hypothesis == "bad-number"

    def test_start_outside_profile(self, bump_profile):
        with pytest.raises(DomainError):
            bad_chain(bump_profile, 40)

    def test_counts_respect_bound(self, bump_profile):
        report = chain_counts(bump_profile)
        counts = {(c.n, c.direction, c.length): c.count for c in report.counts}
        assert counts == {(0, "decreasing", 1): 2, (0, "increasing", 1): 1}
        assert report.all_within_bound
        assert report.inconclusive == []

    def test_chains_leaving_the_window_are_inconclusive(self):
        profile = dyadic_profile(sample_descriptor("power-truncated:a=3.0,b=inf", lo=-6, hi=6), r=2.0)
        report = chain_counts(profile)
        assert report.counts == []
        assert report.inconclusive == profile.bad_numbers


@pytest.mark.unit
class TestLevelSets:
    def test_alternating_block_splits_by_sign(self):
        g = sample_descriptor("dyadic-sign-power:a=0.5", lo=-6, hi=6)
        certificate = certify_gm(g)
        profile = dyadic_profile(g, r=2.0)
        report = good_level_sets(g, profile, 0, certificate)
        assert report.measure_plus == pytest.approx(1.0, rel=1e-9)
        assert report.measure_minus == pytest.approx(0.5, rel=1e-9)
        assert report.interval_sign == 1
        assert report.interval == pytest.approx((1.0, 2.0))
        assert report.measure >= report.measure_bound
        assert report.interval_margin >= 1.0

    def test_bad_number_rejected(self, bump_profile):
        g = step_function([2.0 ** -4, 1.0, 2.0, 2.0 ** 8], [1.0, 100.0, 1.0])
        with pytest.raises(PreconditionError) as info:
            good_level_sets(g, bump_profile, -1)
        assert info.value.hypothesis == "good-number"


@pytest.mark.unit
class TestPropertyProfiles:
    def test_decaying_function(self):
        profiles = gm_property_profiles(sample_descriptor("smooth-broken-power:a=0.25,b=2.0"))
        assert profiles.vanishes_at_zero
        assert profiles.vanishes_at_infinity
        assert math.isfinite(profiles.pointwise_constant) and profiles.pointwise_constant > 0
        assert set(profiles.weighted_variation) == {"-1.0", "0.0", "1.0"}

    def test_indicator_vanishes_at_both_ends(self):
        profiles = gm_property_profiles(sample_descriptor("indicator:b=1.0"))
        assert profiles.vanishes_at_zero
        assert profiles.vanishes_at_infinity
