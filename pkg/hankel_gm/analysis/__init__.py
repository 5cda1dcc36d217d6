"""Numerical core: Bessel kernels, sampled functions, norms, GM analysis, maximal functions and transforms."""

from hankel_gm.analysis.bessel import BesselOrder, bessel_j, bessel_moments, bessel_zeros, kernel_primitive
from hankel_gm.analysis.funcrep import (
    AnalyticFunction,
    Interpolation,
    PowerLaw,
    SampledFunction,
    even_odd_split,
    load_csv,
    parse_descriptor,
    sample,
    sample_default,
    save_csv,
)
from hankel_gm.analysis.gm import (
    bad_chain,
    certify_gm,
    chain_counts,
    dyadic_profile,
    gm_profile,
    gm_property_profiles,
    gm_ratio,
    good_level_sets,
)
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
from hankel_gm.analysis.norms import (
    LorentzFormula,
    SpaceMode,
    SpaceSpec,
    WeightFunction,
    decreasing_rearrangement,
    distribution_function,
    lorentz_norm,
    power_weighted_norm,
    weighted_lebesgue_norm,
)
from hankel_gm.analysis.transform import (
    LineSamples,
    TailMode,
    TransformSettings,
    fourier_1d,
    hankel_inverse,
    hankel_transform,
    hankel_values,
    parseval_check,
    radial_fourier,
    radial_weight_params,
    truncation_probe,
)

__all__ = [
    "AnalyticFunction",
    "BesselOrder",
    "CutoffShape",
    "CutoffSpec",
    "Interpolation",
    "LineSamples",
    "LorentzFormula",
    "PowerLaw",
    "SampledFunction",
    "SpaceMode",
    "SpaceSpec",
    "TailMode",
    "TransformSettings",
    "WeightFunction",
    "bad_chain",
    "bessel_j",
    "bessel_moments",
    "bessel_zeros",
    "certify_gm",
    "chain_counts",
    "decreasing_rearrangement",
    "distribution_function",
    "dyadic_profile",
    "even_odd_split",
    "fourier_1d",
    "gm_profile",
    "gm_property_profiles",
    "gm_ratio",
    "good_level_sets",
    "good_number_lower_bound",
    "hankel_inverse",
    "hankel_transform",
    "hankel_values",
    "kernel_primitive",
    "load_csv",
    "lorentz_norm",
    "maximal_average",
    "maximal_bound_check",
    "maximal_function",
    "maximal_lorentz_check",
    "parse_descriptor",
    "parseval_check",
    "phi_average",
    "power_weighted_norm",
    "radial_fourier",
    "radial_weight_params",
    "sample",
    "sample_default",
    "save_csv",
    "seminorm_gamma",
    "truncation_probe",
    "weighted_lebesgue_norm",
]
