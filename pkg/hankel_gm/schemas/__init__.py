"""Schemas package."""

from hankel_gm.schemas.schemas import (
    BadChain,
    BandSummary,
    ChainCount,
    ChainCountReport,
    CheckResult,
    DilationSpread,
    DistributionComparison,
    DyadicProfile,
    ExperimentConfig,
    FourierEquivalenceResult,
    GMCertificate,
    GMProfile,
    GMPropertyProfiles,
    GoodNumberBound,
    HardyLittlewoodRanges,
    HardyResult,
    LevelSetReport,
    MaximalBoundResult,
    ParsevalResult,
    ProfileFit,
    RadialEquivalenceResult,
    RadialParams,
    RATIO_REPORT_SCHEMA,
    RatioReport,
    RatioRow,
    SkippedFunction,
    SpacePair,
    TruncationProbe,
    WindowStability,
)

__all__ = [
    "BadChain",
    "BandSummary",
    "ChainCount",
    "ChainCountReport",
    "CheckResult",
    "DilationSpread",
    "DistributionComparison",
    "DyadicProfile",
    "ExperimentConfig",
    "FourierEquivalenceResult",
    "GMCertificate",
    "GMProfile",
    "GMPropertyProfiles",
    "GoodNumberBound",
    "HardyLittlewoodRanges",
    "HardyResult",
    "LevelSetReport",
    "MaximalBoundResult",
    "ParsevalResult",
    "ProfileFit",
    "RadialEquivalenceResult",
    "RadialParams",
    "RATIO_REPORT_SCHEMA",
    "RatioReport",
    "RatioRow",
    "SkippedFunction",
    "SpacePair",
    "TruncationProbe",
    "WindowStability",
]
