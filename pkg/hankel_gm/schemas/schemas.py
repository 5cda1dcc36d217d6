"""Pydantic schemas for certificates, profiles, check results and reports."""

import math
from typing import Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


# General monotonicity
class GMProfile(BaseModel):
    """Per-scale GM ratios TV(f;[x,2x]) / int_{x/lambda}^{lambda x} |f(t)|/t dt."""

    lam: float = Field(..., gt=1, description="GM constant lambda = 2^nu")
    nu: int = Field(..., ge=1, description="Dyadic exponent of lambda")
    scales: List[float] = Field(default_factory=list, description="Scales x at which the ratio was measured")
    ratios: List[float] = Field(default_factory=list, description="Measured ratio per scale (inf allowed)")
    source: Optional[str] = Field(None, description="Function descriptor, when known")

    @property
    def sup_ratio(self) -> float:
        return max(self.ratios) if self.ratios else 0.0


class GMCertificate(GMProfile):
    """Witness of the GM inequality with constants (C, lambda)."""

    C: float = Field(..., ge=0, description="Certified GM constant")
    safety_factor: float = Field(..., ge=1, description="Factor applied to the observed supremum")

    @model_validator(mode="after")
    def _dominates_profile(self) -> "GMCertificate":
        if self.ratios and self.C < self.sup_ratio:
            raise ValueError("certificate constant must dominate the ratio profile")
        return self


class DyadicProfile(BaseModel):
    """Block suprema A_n, wide suprema B_n and good/bad classification."""

    n_min: int
    n_max: int
    r: float = Field(..., gt=0)
    nu: int = Field(..., ge=1)
    A: Dict[int, float] = Field(..., description="A_n = sup |g| on [2^n, 2^(n+1)] over the profiled blocks")
    B: Dict[int, float] = Field(..., description="B_n = max A_k for k in [n - 2nu, n + 2nu - 1]")
    classification: Dict[int, Literal["good", "bad"]]
    C: Optional[float] = Field(None, description="GM constant used by level-set bounds")

    @property
    def threshold(self) -> float:
        """2^(2 r nu), the goodness factor."""
        return 2.0 ** (2.0 * self.r * self.nu)

    def is_good(self, n: int) -> bool:
        return self.classification[n] == "good"

    def wide_supremum(self, n: int) -> Optional[float]:
        """B_n computed from the stored blocks; None when the blocks do not cover it."""
        keys = range(n - 2 * self.nu, n + 2 * self.nu)
        if not all(k in self.A for k in keys):
            return None
        return max(self.A[k] for k in keys)

    def goodness(self, n: int) -> Optional[bool]:
        """Classification of any n whose wide window lies in the profiled blocks."""
        wide = self.wide_supremum(n)
        if wide is None:
            return None
        return wide <= self.threshold * self.A[n] * (1.0 + 1e-12)

    @property
    def good_numbers(self) -> List[int]:
        return [n for n, c in sorted(self.classification.items()) if c == "good"]

    @property
    def bad_numbers(self) -> List[int]:
        return [n for n, c in sorted(self.classification.items()) if c == "bad"]


class BadChain(BaseModel):
    """Chain of bad numbers ending at a good number (or at the window edge)."""

    start: int
    gammas: List[int]
    direction: Literal["decreasing", "increasing"]
    status: Literal["terminated", "inconclusive"] = "terminated"

    @property
    def length(self) -> int:
        return len(self.gammas) - 1

    @property
    def end(self) -> int:
        return self.gammas[-1]


class ChainCount(BaseModel):
    """Number of bad m whose chain ends at ``n`` with the given length and direction."""

    n: int
    direction: Literal["decreasing", "increasing"]
    length: int
    count: int
    bound: int

    @property
    def within_bound(self) -> bool:
        return self.count <= self.bound


class ChainCountReport(BaseModel):
    counts: List[ChainCount] = Field(default_factory=list)
    inconclusive: List[int] = Field(default_factory=list, description="Bad numbers whose chain left the window")

    @property
    def all_within_bound(self) -> bool:
        return all(c.within_bound for c in self.counts)


class LevelSetReport(BaseModel):
    """Measured level sets of a good number against the lemma bounds."""

    n: int
    threshold: float = Field(..., description="Level A_n / (C 2^(2 nu + 3))")
    measure: float
    measure_plus: float
    measure_minus: float
    interval: Optional[Tuple[float, float]] = Field(None, description="Longest single-sign subinterval of E_n")
    interval_sign: int = 0
    measure_bound: float
    interval_bound: float

    @property
    def measure_margin(self) -> float:
        return self.measure / self.measure_bound if self.measure_bound > 0 else math.inf

    @property
    def interval_margin(self) -> float:
        if self.interval is None:
            return 0.0
        length = self.interval[1] - self.interval[0]
        return length / self.interval_bound if self.interval_bound > 0 else math.inf


class GMPropertyProfiles(BaseModel):
    """Measured constants for the standard GM properties."""

    scales: List[float]
    pointwise_ratios: List[float] = Field(..., description="sup_[t,2t] |f| / int_{t/lambda}^{lambda t} |f|/x")
    weighted_variation: Dict[str, List[float]] = Field(
        default_factory=dict, description="Per gamma: int_t^inf x^gamma |df| / int_{t/lambda}^inf x^(gamma-1) |f|"
    )
    edge_zero: List[float] = Field(default_factory=list, description="Octave suprema of x|f(x)| approaching 0")
    edge_infinity: List[float] = Field(default_factory=list, description="Octave suprema of x|f(x)| approaching inf")
    vanishes_at_zero: Optional[bool] = None
    vanishes_at_infinity: Optional[bool] = None

    @property
    def pointwise_constant(self) -> float:
        return max(self.pointwise_ratios) if self.pointwise_ratios else 0.0

    def variation_constant(self, gamma: float) -> float:
        values = self.weighted_variation.get(repr(float(gamma)), [])
        return max(values) if values else 0.0


class GoodNumberBound(BaseModel):
    """Ratios M Phi_g(2^(n - nu)) / A_n over good n."""

    ns: List[int]
    ratios: List[float]

    @property
    def minimum(self) -> float:
        return min(self.ratios) if self.ratios else math.inf


# Transform diagnostics
class TruncationProbe(BaseModel):
    """Partial integrals along a truncation ladder and their Cauchy differences."""

    alpha: float
    y: float
    ladder: List[Tuple[float, float]]
    partials: List[float]
    cauchy: List[float] = Field(..., description="Sup-oscillation of the partial integrals beyond each rung")
    head_terms: List[float]
    tail_terms: List[float]
    converging: bool


class ParsevalResult(BaseModel):
    lhs: float
    rhs: float
    residual: float
    budget: float


class RadialParams(BaseModel):
    """Power-weight parameters for the radial Fourier equivalence."""

    n: int = Field(..., ge=1)
    q: float = Field(..., gt=1)
    beta: float
    gamma: float
    lower: float = Field(..., description="n/q - (n+1)/2, exclusive lower bound for beta")
    upper: float = Field(..., description="n/q, exclusive upper bound for beta")
    admissible: bool
    violated: Optional[str] = Field(None, description="Name of the violated bound")
    hardy_littlewood_plain: bool = Field(..., description="beta = 0 specialisation admissible at q")
    hardy_littlewood_weighted: bool = Field(..., description="gamma = 0 specialisation admissible at q")


class HardyLittlewoodRanges(BaseModel):
    n: int
    plain: Tuple[float, float] = Field(..., description="q-range for int |f^|^q ~ int |x|^(n(q-2)) |f|^q")
    weighted: Tuple[float, float] = Field(..., description="q-range for int |x|^(n(q-2)) |f^|^q ~ int |f|^q")


class ProfileFit(BaseModel):
    """Fitted constant of a pointwise majorant over a y grid."""

    ys: List[float]
    ratios: List[float]

    @property
    def constant(self) -> float:
        return max(self.ratios) if self.ratios else 0.0


class DistributionComparison(BaseModel):
    levels: List[float]
    ratios: List[float]
    bound: float = 4.0

    @property
    def max_ratio(self) -> float:
        return max(self.ratios) if self.ratios else 0.0

    @property
    def passed(self) -> bool:
        return self.max_ratio <= self.bound


# Maximal function diagnostics
class MaximalBoundResult(BaseModel):
    norm_g: float
    norm_maximal: float
    ratio: float
    ratio_grown: Optional[float] = None
    drift: Optional[float] = None
    epsilon: float
    shape: str
    passed: bool


# Checks
class CheckResult(BaseModel):
    """Outcome of one check, in the shape of an assertion result."""

    check: str
    passed: bool
    value: Optional[float] = Field(None, description="Measured ratio or residual")
    threshold: Optional[float] = None
    flag: str = "ok"
    message: str = ""
    details: Dict[str, Any] = Field(default_factory=dict)


class HardyResult(BaseModel):
    sigma: float
    q: float
    head_ratio: float
    tail_ratio: float
    threshold: float
    head_flag: str = "ok"
    tail_flag: str = "ok"

    @property
    def passed(self) -> bool:
        limit = self.threshold * (1.0 + 1e-3)
        head = self.head_flag == "inconclusive" or self.head_ratio <= limit
        tail = self.tail_flag == "inconclusive" or self.tail_ratio <= limit
        return head and tail


class FourierEquivalenceResult(BaseModel):
    p: float
    q: float
    weighted_f: float
    weighted_fhat: float
    lorentz_f: float
    lorentz_fhat: float
    ratio_weighted: float
    ratio_lorentz: float


class RadialEquivalenceResult(BaseModel):
    params: RadialParams
    transform_side: float = Field(..., description="int |x|^(-beta q) |f^(x)|^q dx")
    function_side: float = Field(..., description="int |x|^(gamma q) |f(x)|^q dx")
    ratio: float


# Experiments and reports
class SpacePair(BaseModel):
    model_config = ConfigDict(frozen=True)

    p: float = Field(..., gt=0)
    q: float = Field(..., gt=0)


class ExperimentConfig(BaseModel):
    """Equivalence experiment description (usually loaded from a KEY=VALUE file)."""

    corpus: List[str] = Field(..., min_length=1, description="Function descriptors")
    alpha: float = Field(0.5, ge=-0.5)
    spaces: List[SpacePair] = Field(..., min_length=1)
    dilations: List[float] = Field(default_factory=lambda: [1.0])
    window: Tuple[int, int, int] = Field((-20, 20, 16), description="(min_exp, max_exp, nodes_per_octave)")
    y_window: Tuple[int, int, int] = Field((-12, 12, 8), description="(min_exp, max_exp, nodes_per_octave)")
    tail_mode: str = "integrate-by-parts"
    tol: float = Field(1e-10, gt=0)
    m: Optional[float] = Field(None, gt=0, description="Lower truncation M")
    n: Optional[float] = Field(None, gt=0, description="Upper truncation N")
    output: Optional[str] = None
    format: Literal["csv", "json"] = "csv"
    seed: int = 0
    random_corpus: int = Field(0, ge=0)
    workers: int = Field(1, ge=1)
    band_max_ratio: float = Field(1e3, gt=1)
    dilation_rtol: float = Field(1e-6, gt=0, description="Allowed relative spread of a ratio across the dilation ladder")

    @field_validator("dilations")
    @classmethod
    def _positive_dilations(cls, value: List[float]) -> List[float]:
        if not value or any(not c > 0 for c in value):
            raise ValueError("dilations must be positive")
        return value

    @model_validator(mode="after")
    def _ordered_windows(self) -> "ExperimentConfig":
        for name in ("window", "y_window"):
            lo, hi, per_octave = getattr(self, name)
            if not lo < hi or per_octave < 1:
                raise ValueError(f"{name} needs min_exp < max_exp and nodes_per_octave >= 1")
        if self.m is not None and self.n is not None and not self.m < self.n:
            raise ValueError("truncation needs M < N")
        return self


class RatioRow(BaseModel):
    """One (function, p, q, c) row of an equivalence report."""

    fn: str
    p: float
    q: float
    c: float
    ratio_lebesgue: float
    ratio_lorentz: Optional[float] = None
    err_budget: float = 0.0
    flag: str = "ok"


class SkippedFunction(BaseModel):
    fn: str
    reason: str
    details: Dict[str, Any] = Field(default_factory=dict)


class RatioReport(BaseModel):
    """Rows of an equivalence experiment plus the metadata needed to reproduce it."""

    schema_version: str = "1.0"
    alpha: float
    rows: List[RatioRow] = Field(default_factory=list)
    skipped: List[SkippedFunction] = Field(default_factory=list)
    metadata: Dict[str, Any] = Field(default_factory=dict)


class BandSummary(BaseModel):
    """Max/min spread of finite ratios per (alpha, p, q)."""

    alpha: float
    p: float
    q: float
    kind: Literal["lebesgue", "lorentz"]
    minimum: float
    maximum: float
    spread: float
    within_band: bool


class DilationSpread(BaseModel):
    """Relative spread max/min - 1 of one ratio column across the dilation ladder."""

    fn: str
    p: float
    q: float
    kind: Literal["lebesgue", "lorentz"]
    dilations: List[float]
    spread: float
    tolerance: float
    within_tolerance: bool


class WindowStability(BaseModel):
    bands: List[BandSummary]
    grown_bands: List[BandSummary]
    drift: float
    stable: bool


RATIO_REPORT_SCHEMA: Dict[str, Any] = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "RatioReport",
    "type": "object",
    "required": ["schema_version", "alpha", "rows"],
    "properties": {
        "schema_version": {"type": "string"},
        "alpha": {"type": "number"},
        "rows": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["fn", "p", "q", "c", "ratio_lebesgue", "ratio_lorentz", "err_budget", "flag"],
                "properties": {
                    "fn": {"type": "string"},
                    "p": {"type": "number"},
                    "q": {"type": "number"},
                    "c": {"type": "number"},
                    "ratio_lebesgue": {"type": "number"},
                    "ratio_lorentz": {"type": ["number", "null"]},
                    "err_budget": {"type": "number"},
                    "flag": {
                        "type": "string",
                        "enum": ["ok", "sup-norm", "both-infinite", "lorentz-n/a", "infinite-ratio", "zero"],
                    },
                },
            },
        },
        "skipped": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["fn", "reason"],
                "properties": {"fn": {"type": "string"}, "reason": {"type": "string"}, "details": {"type": "object"}},
            },
        },
        "metadata": {"type": "object"},
    },
}
