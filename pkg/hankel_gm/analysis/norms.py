"""
Distribution functions, decreasing rearrangements, weighted Lebesgue norms and
Lorentz norms of sampled functions.

Everything is computed on the modulus view of a function, which is
piecewise-linear (or piecewise-constant) and monotone on every cell. On such
data the distribution function is piecewise-linear in the level between
consecutive node values, so the rearrangement is again piecewise-linear and is
built exactly from the node values. Head and tail power-law models contribute
closed-form terms; a divergent norm is returned as ``inf``.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate, special

from hankel_gm.analysis.funcrep import Interpolation, PowerLaw, SampledFunction, modulus_view
from hankel_gm.config.settings import settings as app_settings
from hankel_gm.core.exceptions import AccuracyError, DomainError, PreconditionError

logger = logging.getLogger(__name__)

_LEVEL_CHUNK = 256
_LEVELS_PER_OCTAVE = 16
_MAX_MODEL_LEVELS = 1024
_GAUSS_CHECK = 1e-12


class SpaceMode(str, Enum):
    """Which norm a SpaceSpec selects."""

    WEIGHTED_LEBESGUE_T = "weighted-lebesgue-t"
    LORENTZ = "lorentz"
    PLAIN_WEIGHT = "plain-weight"


class LorentzFormula(str, Enum):
    REARRANGEMENT = "rearrangement"
    DISTRIBUTION = "distribution"


def reciprocal(p: float) -> float:
    """1/p with the convention 1/inf = 0."""
    return 0.0 if math.isinf(p) else 1.0 / p


@dataclass(frozen=True)
class WeightFunction:
    """
    Positive weight on (0, inf), either x^exponent or an arbitrary closure.

    ``doubling_constant`` is set by ``certify_doubling`` and bounds w(s)/w(t)
    for s, t in a common interval [x, 2x].
    """

    exponent: Optional[float] = None
    closure: Optional[Callable[[np.ndarray], np.ndarray]] = None
    doubling_constant: Optional[float] = None

    def __post_init__(self) -> None:
        if (self.exponent is None) == (self.closure is None):
            raise DomainError("A weight is given either by a power exponent or by a closure")

    @classmethod
    def power(cls, exponent: float) -> "WeightFunction":
        return cls(exponent=float(exponent))

    @property
    def is_power(self) -> bool:
        return self.exponent is not None

    def __call__(self, x) -> np.ndarray:
        xa = np.asarray(x, dtype=float)
        if self.exponent is not None:
            return np.power(xa, self.exponent)
        return np.asarray(self.closure(xa), dtype=float)

    def describe(self) -> str:
        return f"x^{self.exponent!r}" if self.is_power else "closure"


@dataclass(frozen=True)
class SpaceSpec:
    """
    Exponents (p, q) and the norm they select.

    ``weighted-lebesgue-t`` is L^q with weight x^(q/p - 1) (x^(1/p) in sup form
    when q = inf), ``lorentz`` is L^(p,q) and ``plain-weight`` is L^q(w).
    """

    p: float
    q: float
    mode: SpaceMode = SpaceMode.WEIGHTED_LEBESGUE_T
    weight: Optional[WeightFunction] = None

    def __post_init__(self) -> None:
        for name in ("p", "q"):
            value = getattr(self, name)
            if math.isnan(value) or not value > 0:
                raise DomainError(f"Exponent {name} must lie in (0, inf]", details={name: value})
        object.__setattr__(self, "mode", SpaceMode(self.mode))
        if self.mode is SpaceMode.PLAIN_WEIGHT and self.weight is None:
            raise DomainError("plain-weight mode needs a weight")

    @property
    def inv_p(self) -> float:
        return reciprocal(self.p)

    @property
    def inv_q(self) -> float:
        return reciprocal(self.q)

    @property
    def inv_conjugate(self) -> float:
        """1/p' = 1 - 1/p; negative when p < 1."""
        return 1.0 - self.inv_p

    @property
    def conjugate(self) -> float:
        """p' = p / (p - 1), defined for p >= 1."""
        if self.p < 1:
            raise DomainError("Conjugate exponent needs p >= 1", details={"p": self.p})
        return math.inf if self.p == 1 else (1.0 if math.isinf(self.p) else self.p / (self.p - 1.0))

    @property
    def t_exponent(self) -> float:
        """gamma with ||f||_{L^q_t(p,q)} = ||x^gamma f||_q."""
        return self.inv_p - self.inv_q

    def dual(self) -> "SpaceSpec":
        """The space of the transform: (p', q) in the same mode."""
        return replace(self, p=self.conjugate)


# -- pieces of |f| -----------------------------------------------------------


@dataclass
class _Pieces:
    """Monotone cells of |f| plus the magnitudes of the head and tail models."""

    lo: np.ndarray
    hi: np.ndarray
    start: np.ndarray
    end: np.ndarray
    models: List[Tuple[PowerLaw, float, float]] = field(default_factory=list)
    truncated: bool = False

    @property
    def heads(self) -> List[PowerLaw]:
        return [m for m, lo, _ in self.models if lo == 0.0]

    @property
    def tails(self) -> List[PowerLaw]:
        return [m for m, _, hi in self.models if math.isinf(hi)]

    @property
    def unbounded_heads(self) -> List[PowerLaw]:
        return [m for m in self.heads if m.exponent < 0.0]

    @property
    def models_static(self) -> bool:
        """True when every model is constant, so d_f is a step function between levels."""
        return all(m.exponent == 0.0 for m, _, _ in self.models)


def _pieces(functions: Sequence[SampledFunction]) -> _Pieces:
    lows, highs, starts, ends = [], [], [], []
    models: List[Tuple[PowerLaw, float, float]] = []
    truncated = False
    for f in functions:
        m = modulus_view(f)
        values = np.real(m.values).astype(float)
        lows.append(m.grid[:-1])
        highs.append(m.grid[1:])
        starts.append(values[:-1])
        ends.append(values[:-1] if m.interp is Interpolation.CONSTANT_LEFT else np.real(m.left_limits[1:]).astype(float))
        if m.head is None:
            logger.warning("Unknown head model treated as zero below the window")
        elif not m.head.is_zero:
            models.append((m.head, 0.0, m.x_min))
        if m.tail is None:
            logger.warning("Unknown tail model treated as zero beyond the window")
        elif not m.tail.is_zero:
            if m.tail.exponent >= 0.0:
                logger.warning(f"Non-decaying tail x^{m.tail.exponent} has level sets of infinite measure")
                truncated = True
            else:
                models.append((m.tail, m.x_max, math.inf))
    return _Pieces(
        lo=np.concatenate(lows),
        hi=np.concatenate(highs),
        start=np.concatenate(starts),
        end=np.concatenate(ends),
        models=models,
        truncated=truncated,
    )


def _window_measure(pieces: _Pieces, s: np.ndarray, inclusive: bool = False) -> np.ndarray:
    """|{x in window : |f(x)| > s}| (or >= s) for each level."""
    width = pieces.hi - pieces.lo
    top = np.maximum(pieces.start, pieces.end)
    bottom = np.minimum(pieces.start, pieces.end)
    span = top - bottom
    flat = span == 0.0
    out = np.empty(s.shape)
    for first in range(0, s.size, _LEVEL_CHUNK):
        level = s[first:first + _LEVEL_CHUNK, None]
        with np.errstate(divide="ignore", invalid="ignore"):
            fraction = np.clip((top - level) / span, 0.0, 1.0)
        above = bottom >= level if inclusive else bottom > level
        fraction = np.where(flat, above, fraction)
        out[first:first + _LEVEL_CHUNK] = fraction @ width
    return out


def _model_measure(pieces: _Pieces, s: np.ndarray, inclusive: bool = False) -> np.ndarray:
    total = np.zeros(s.shape)
    for model, lo, hi in pieces.models:
        if inclusive and model.exponent == 0.0:
            total = total + np.where(abs(model.coefficient) >= s, hi - lo, 0.0)
        else:
            total = total + model.measure_above(s, lo, hi)
    return total


def _measure(pieces: _Pieces, s: np.ndarray, inclusive: bool = False) -> np.ndarray:
    return _window_measure(pieces, s, inclusive) + _model_measure(pieces, s, inclusive)


def _model_edge(model: PowerLaw, lo: float, hi: float) -> float:
    return float(model.magnitude(hi if lo == 0.0 else lo))


def _levels(pieces: _Pieces) -> np.ndarray:
    """Descending positive levels at which d_f changes slope."""
    window = np.concatenate((pieces.start, pieces.end))
    levels = [window[window > 0.0]]
    positive = window[window > 0.0]
    floor = float(positive.min()) if positive.size else 0.0
    step = 2.0 ** (1.0 / _LEVELS_PER_OCTAVE)
    for model, lo, hi in pieces.models:
        levels.append(np.array([_model_edge(model, lo, hi)]))
        # where a model decays into the range of window values, d_f is curved there
        if floor > 0.0 and model.exponent != 0.0:
            toward_zero = model.exponent > 0.0 if lo == 0.0 else model.exponent < 0.0
            if toward_zero:
                k = np.arange(1, _MAX_MODEL_LEVELS + 1)
                x = hi * step ** -k if lo == 0.0 else lo * step ** k
                extra = model.magnitude(x)
                levels.append(extra[extra > floor])
    merged = np.unique(np.concatenate(levels))
    return merged[merged > 0.0][::-1]


def distribution_function(f: SampledFunction, s):
    """
    d_f(s) = |{x : |f(x)| > s}|, head and tail models included.

    Nonincreasing and right-continuous in s; complex data uses the modulus.

    Raises:
        DomainError: If a level is negative
    """
    sa = np.atleast_1d(np.asarray(s, dtype=float))
    if np.any(sa < 0) or np.any(np.isnan(sa)):
        raise DomainError("Distribution levels must be nonnegative")
    pieces = _pieces([f])
    result = _measure(pieces, sa)
    if pieces.truncated:
        result = np.full(sa.shape, math.inf)
    return float(result[0]) if np.ndim(s) == 0 else result


# -- rearrangement -------------------------------------------------------------


def _zero_function(metadata: dict) -> SampledFunction:
    return SampledFunction(
        grid=np.array([1.0, 2.0]),
        values=np.zeros(2),
        interp=Interpolation.CONSTANT_LEFT,
        head=PowerLaw.zero(),
        tail=PowerLaw.zero(),
        metadata=metadata,
    )


def _rearrange(pieces: _Pieces) -> SampledFunction:
    metadata = {"rearranged": True, "tail_truncated": pieces.truncated}
    levels = _levels(pieces)
    if levels.size == 0:
        return _zero_function(metadata)
    strict = _measure(pieces, levels)
    inclusive = _measure(pieces, levels, inclusive=True)
    t = np.empty(2 * levels.size)
    t[0::2], t[1::2] = strict, inclusive
    v = np.repeat(levels, 2)
    support = float(_measure(pieces, np.array([0.0]))[0])
    if math.isfinite(support):
        t = np.append(t, support)
        v = np.append(v, 0.0)
    t = np.maximum.accumulate(t)
    nodes, first = np.unique(t, return_index=True)
    last = np.searchsorted(t, nodes, side="right") - 1
    left, right = v[first], v[last]
    if nodes[0] == 0.0:
        nodes, left, right = nodes[1:], left[1:], right[1:]
    top = float(levels[0])
    unbounded = pieces.unbounded_heads
    if unbounded:
        exponent = min(m.exponent for m in unbounded)
        head = PowerLaw(float(left[0] / nodes[0] ** exponent), exponent)
    else:
        head = PowerLaw(top, 0.0)
        if left[0] < top:
            # the top value is attained on a null set: pin the head with a tiny first cell
            eps = nodes[0] * 1e-9
            value = top + (left[0] - top) * 1e-9
            nodes, left, right = np.insert(nodes, 0, eps), np.insert(left, 0, value), np.insert(right, 0, value)
    if math.isfinite(support):
        tail = PowerLaw.zero()
    else:
        exponent = max(m.exponent for m in pieces.tails)
        tail = PowerLaw(float(right[-1] / nodes[-1] ** exponent), exponent)
    if nodes.size == 1:
        nodes = np.append(nodes, 2.0 * nodes[0])
        extra = float(tail(nodes[-1]))
        left, right = np.append(left, extra), np.append(right, extra)
    return SampledFunction(
        grid=nodes,
        values=right,
        interp=Interpolation.LINEAR,
        left_values=None if np.array_equal(left, right) else left,
        head=head,
        tail=tail,
        metadata=metadata,
    )


def decreasing_rearrangement(f: SampledFunction) -> SampledFunction:
    """
    f*(t) = inf{s : d_f(s) <= t}, as a nonincreasing piecewise-linear function.

    Equimeasurable with |f|. A non-decaying tail is dropped and recorded in
    ``metadata['tail_truncated']``.
    """
    result = _rearrange(_pieces([f]))
    if f.source is not None:
        result = result.copy_with_metadata(rearrangement_of=f.source)
    return result


# -- integrals of |f|^q x^beta -------------------------------------------------------


def _power_moment(lo: np.ndarray, hi: np.ndarray, e: float) -> np.ndarray:
    """int_lo^hi x^(e-1) dx for finite positive limits."""
    log_ratio = np.log(hi / lo)
    if e == 0.0:
        return log_ratio
    return np.power(lo, e) * np.expm1(e * log_ratio) / e


@dataclass(frozen=True)
class _Gauss:
    nodes: np.ndarray
    weights: np.ndarray


def _gauss(order: int) -> _Gauss:
    nodes, weights = special.roots_legendre(order)
    return _Gauss(nodes, weights)


_GL8 = _gauss(8)
_GL16 = _gauss(16)


def _gauss_integral(rule: _Gauss, lo: np.ndarray, hi: np.ndarray, integrand: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> np.ndarray:
    half = 0.5 * (hi - lo)
    x = 0.5 * (hi + lo)[:, None] + half[:, None] * rule.nodes[None, :]
    return (integrand(x, np.arange(lo.size)[:, None]) @ rule.weights) * half


def _checked_integrals(lo: np.ndarray, hi: np.ndarray, integrand, scalar_integrand) -> np.ndarray:
    """Gauss-Legendre 16 per interval, with adaptive quad where 8 and 16 points disagree."""
    if lo.size == 0:
        return np.zeros(0)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        fine = _gauss_integral(_GL16, lo, hi, integrand)
        coarse = _gauss_integral(_GL8, lo, hi, integrand)
    suspect = ~(np.abs(fine - coarse) <= _GAUSS_CHECK * np.abs(fine))
    for i in np.nonzero(suspect)[0]:
        value, _ = integrate.quad(lambda x: scalar_integrand(x, i), lo[i], hi[i], epsabs=0.0, epsrel=1e-13, limit=200)
        fine[i] = value
    return fine


def _cell_lq(lo, hi, a, b, q: float, beta: float, weight: Optional[WeightFunction]) -> float:
    """sum over cells of int (linear from a to b)^q x^beta w(x) dx."""
    keep = (a > 0.0) | (b > 0.0)
    lo, hi, a, b = lo[keep], hi[keep], a[keep], b[keep]
    total = 0.0
    constant = a == b
    if weight is None and constant.any():
        total += float(np.sum(np.power(a[constant], q) * _power_moment(lo[constant], hi[constant], beta + 1.0)))
        lo, hi, a, b = lo[~constant], hi[~constant], a[~constant], b[~constant]
    if lo.size == 0:
        return total
    slope = (b - a) / (hi - lo)
    w = (lambda x: 1.0) if weight is None else weight

    def integrand(x, i):
        return np.power(np.maximum(a[i] + slope[i] * (x - lo[i]), 0.0), q) * np.power(x, beta) * w(x)

    def scalar(x, i):
        return max(a[i] + slope[i] * (x - lo[i]), 0.0) ** q * x ** beta * float(np.asarray(w(x)))

    return total + float(np.sum(_checked_integrals(lo, hi, integrand, scalar)))


def _model_lq(model: PowerLaw, lo: float, hi: float, q: float, beta: float, weight: Optional[WeightFunction]) -> float:
    if model.is_zero:
        return 0.0
    if weight is None or weight.is_power:
        shift = 0.0 if weight is None else weight.exponent
        return model.power_integral(q, beta + shift, lo, hi)
    value, _ = integrate.quad(
        lambda x: float(model.magnitude(x)) ** q * x ** beta * float(np.asarray(weight(x))), lo, hi, limit=200
    )
    return value


def lq_integral(f: SampledFunction, q: float, beta: float = 0.0, weight: Optional[WeightFunction] = None) -> float:
    """int_0^inf |f(x)|^q x^beta w(x) dx (w = 1 by default); +inf when divergent."""
    if not 0 < q < math.inf:
        raise DomainError("lq_integral needs 0 < q < inf", details={"q": q})
    m = modulus_view(f)
    values = np.real(m.values).astype(float)
    start = values[:-1]
    end = start if m.interp is Interpolation.CONSTANT_LEFT else np.real(m.left_limits[1:]).astype(float)
    if weight is not None and weight.is_power:
        beta, weight = beta + weight.exponent, None
    total = _cell_lq(m.grid[:-1], m.grid[1:], start, end, q, beta, weight)
    for model, lo, hi, side in ((m.head, 0.0, m.x_min, "head"), (m.tail, m.x_max, math.inf, "tail")):
        if model is None:
            logger.warning(f"Unknown {side} model ignored in L^{q} integral")
            continue
        total += _model_lq(model, lo, hi, q, beta, weight)
    if not math.isfinite(total):
        logger.info(f"L^{q} integral with x^{beta} diverges")
        return math.inf
    return total


def _sup_weighted(f: SampledFunction, gamma: float, weight: Optional[WeightFunction] = None) -> float:
    """sup x^gamma w(x) |f(x)| including interior maxima of linear cells."""
    m = modulus_view(f)
    values = np.real(m.values).astype(float)
    left = np.real(m.left_limits).astype(float)
    scale = np.power(m.grid, gamma) * (1.0 if weight is None else weight(m.grid))
    best = float(max(np.max(values * scale), np.max(left * scale)))
    if m.interp is Interpolation.LINEAR and weight is None and gamma != 0.0:
        lo, hi = m.grid[:-1], m.grid[1:]
        a, b = values[:-1], left[1:]
        slope = (b - a) / (hi - lo)
        intercept = a - slope * lo
        with np.errstate(divide="ignore", invalid="ignore"):
            x = -gamma * intercept / (slope * (gamma + 1.0))
        inside = np.isfinite(x) & (x > lo) & (x < hi)
        if inside.any():
            xs = x[inside]
            best = max(best, float(np.max(np.power(xs, gamma) * (intercept[inside] + slope[inside] * xs))))
    shift = 0.0 if weight is None or not weight.is_power else weight.exponent
    for model, lo_, hi_ in ((m.head, 0.0, m.x_min), (m.tail, m.x_max, math.inf)):
        if model is not None:
            best = max(best, model.sup_weighted(gamma + shift, lo_, hi_))
    return best


def power_weighted_norm(f: SampledFunction, gamma: float, q: float) -> float:
    """
    ||x^gamma f||_{L^q(0, inf)}; q = inf gives sup x^gamma |f(x)|.

    The exponent may have any sign, as needed for 1/p' - 1/q with p < 1.
    """
    if math.isnan(q) or not q > 0:
        raise DomainError("Norm exponent q must lie in (0, inf]", details={"q": q})
    if math.isinf(q):
        return _sup_weighted(f, gamma)
    return lq_integral(f, q, gamma * q) ** (1.0 / q)


def weighted_lebesgue_norm(f: SampledFunction, spec: SpaceSpec) -> float:
    """
    Norm of f in the space selected by ``spec``.

    ``weighted-lebesgue-t`` computes ||x^(1/p - 1/q) f||_q, ``plain-weight``
    computes (int |f|^q w)^(1/q) (sup w |f| when q = inf) and ``lorentz``
    defers to ``lorentz_norm``.
    """
    if spec.mode is SpaceMode.WEIGHTED_LEBESGUE_T:
        return power_weighted_norm(f, spec.t_exponent, spec.q)
    if spec.mode is SpaceMode.LORENTZ:
        return lorentz_norm(f, spec.p, spec.q)
    weight = spec.weight
    if math.isinf(spec.q):
        if weight.is_power:
            return _sup_weighted(f, weight.exponent)
        return _sup_weighted(f, 0.0, weight)
    return lq_integral(f, spec.q, 0.0, weight) ** (1.0 / spec.q)


# -- Lorentz norms -------------------------------------------------------------------


def _distribution_norm(pieces: _Pieces, p: float, q: float) -> float:
    levels = _levels(pieces)
    if levels.size == 0 and not pieces.models:
        return 0.0
    grid = np.append(levels, 0.0)
    strict = _window_measure(pieces, grid)
    inclusive = _window_measure(pieces, grid, inclusive=True)
    # on (grid[k+1], grid[k]) the window part of d_f runs linearly between these
    lower_value, upper_value = strict[1:], inclusive[:-1]
    s_lo, s_hi = grid[1:], grid[:-1]
    inv_p = 1.0 / p

    def d_between(s, i):
        fraction = (s - s_lo[i]) / (s_hi[i] - s_lo[i])
        return lower_value[i] + (upper_value[i] - lower_value[i]) * fraction + _model_measure(pieces, s)

    if math.isinf(q):
        return _distribution_sup(pieces, levels, strict, inclusive, inv_p)
    decaying = pieces.tails
    if decaying and 1.0 + inv_p / max(m.exponent for m in decaying) <= 0.0:
        # d ~ (s/c)^(1/a) as s -> 0 is not integrable against s^(q-1)
        return math.inf

    total = 0.0
    constant = (lower_value == upper_value) & pieces.models_static
    if constant.any():
        # d_f is constant on these intervals
        d = lower_value[constant] + _model_measure(pieces, 0.5 * (s_lo[constant] + s_hi[constant]))
        total += float(np.sum(np.power(d, q * inv_p) * (np.power(s_hi[constant], q) - np.power(s_lo[constant], q)) / q))
    varying = np.nonzero(~constant)[0]
    if varying.size:

        def integrand(s, i):
            index = varying[i]
            return np.power(s, q - 1.0) * np.power(np.maximum(d_between(s, index), 0.0), q * inv_p)

        def scalar(s, i):
            index = varying[i]
            d = float(d_between(np.array([s]), index)[0])
            return s ** (q - 1.0) * max(d, 0.0) ** (q * inv_p)

        total += float(np.sum(_checked_integrals(s_lo[varying], s_hi[varying], integrand, scalar)))
    unbounded = pieces.unbounded_heads
    if unbounded and levels.size:
        # above the top level only unbounded heads contribute: d ~ (s/c)^(1/a)
        exponent = q - 1.0 + q * inv_p / min(m.exponent for m in unbounded)
        if exponent >= -1.0:
            return math.inf
        value, _ = integrate.quad(
            lambda s: s ** (q - 1.0) * float(_model_measure(pieces, np.array([s]))[0]) ** (q * inv_p),
            float(levels[0]), math.inf, limit=200,
        )
        total += value
    if not math.isfinite(total):
        return math.inf
    return p ** (1.0 / q) * total ** (1.0 / q)


def _distribution_sup(pieces: _Pieces, levels: np.ndarray, strict: np.ndarray, inclusive: np.ndarray, inv_p: float) -> float:
    """sup_s s d_f(s)^(1/p)."""
    if levels.size == 0:
        return 0.0
    model_strict = _model_measure(pieces, levels)
    model_inclusive = _model_measure(pieces, levels, inclusive=True)
    d_strict = strict[:-1] + model_strict
    d_inclusive = inclusive[:-1] + model_inclusive
    best = float(max(np.max(levels * np.power(d_strict, inv_p)), np.max(levels * np.power(d_inclusive, inv_p))))
    # interior stationary points of s (A + B s)^(1/p) on linear stretches
    lower_value, upper_value = strict[1:], inclusive[:-1]
    grid = np.append(levels, 0.0)
    s_lo, s_hi = grid[1:], grid[:-1]
    slope = (upper_value - lower_value) / (s_hi - s_lo)
    intercept = lower_value - slope * s_lo
    with np.errstate(divide="ignore", invalid="ignore"):
        s_star = -intercept / (slope * (1.0 + inv_p))
    inside = np.isfinite(s_star) & (s_star > s_lo) & (s_star < s_hi)
    if inside.any():
        s = s_star[inside]
        d = intercept[inside] + slope[inside] * s + _model_measure(pieces, s)
        best = max(best, float(np.max(s * np.power(np.maximum(d, 0.0), inv_p))))
    unbounded = pieces.unbounded_heads
    if unbounded and 1.0 + inv_p / min(m.exponent for m in unbounded) > 0.0:
        return math.inf
    decaying = pieces.tails
    if decaying:
        if 1.0 + inv_p / max(m.exponent for m in decaying) < 0.0:
            return math.inf
        s = float(levels[-1]) * 2.0 ** (-np.arange(1, 257) / 4.0)
        d = _measure(pieces, s)
        best = max(best, float(np.max(s * np.power(d, inv_p))))
    return best


def lorentz_norm(
    f: SampledFunction,
    p: float,
    q: float,
    formula: LorentzFormula = LorentzFormula.REARRANGEMENT,
    *,
    others: Sequence[SampledFunction] = (),
    cross_check: bool = False,
    rtol: Optional[float] = None,
) -> float:
    """
    ||f||_{L^(p,q)} by the rearrangement or the distribution formula.

    Rearrangement: (int (t^(1/p) f*(t))^q dt/t)^(1/q). Distribution:
    p^(1/q) (int (s d_f(s)^(1/p))^q ds/s)^(1/q). The q = inf forms are the
    corresponding suprema. ``others`` adds further pieces of the same function
    (for instance the negative half-line) to the distribution.

    With ``cross_check`` both formulas are evaluated and must agree to
    ``rtol`` (default ``cross_formula_rtol``); the requested formula's value
    is returned.

    Raises:
        DomainError: If p or q is outside (0, inf]
        AccuracyError: If the cross-checked formulas disagree
    """
    value = _lorentz_norm(f, p, q, formula, others)
    if not cross_check:
        return value
    limit = app_settings.cross_formula_rtol if rtol is None else rtol
    other_formula = (
        LorentzFormula.DISTRIBUTION if LorentzFormula(formula) is LorentzFormula.REARRANGEMENT
        else LorentzFormula.REARRANGEMENT
    )
    other = _lorentz_norm(f, p, q, other_formula, others)
    if math.isinf(value) and math.isinf(other):
        return value
    mismatch = abs(value - other) / max(abs(value), abs(other), np.finfo(float).tiny)
    if not mismatch <= limit:
        raise AccuracyError(
            f"Lorentz norm formulas disagree by {mismatch:.3g} (allowed {limit:.3g})",
            achieved_error=mismatch,
            details={"p": p, "q": q, "formula": LorentzFormula(formula).value, "value": value, "other": other},
        )
    logger.debug(f"Lorentz cross-check at p={p}, q={q}: mismatch {mismatch:.3g}")
    return value


def _lorentz_norm(
    f: SampledFunction,
    p: float,
    q: float,
    formula: LorentzFormula,
    others: Sequence[SampledFunction],
) -> float:
    for name, value in (("p", p), ("q", q)):
        if math.isnan(value) or not value > 0:
            raise DomainError(f"Lorentz exponent {name} must lie in (0, inf]", details={name: value})
    formula = LorentzFormula(formula)
    pieces = _pieces([f, *others])
    levels = _levels(pieces)
    is_zero = levels.size == 0 and not pieces.models and not pieces.truncated
    if is_zero:
        return 0.0
    if math.isinf(p):
        if not math.isinf(q):
            return math.inf
        return math.inf if pieces.unbounded_heads else float(levels[0]) if levels.size else 0.0
    if pieces.truncated:
        logger.info("Lorentz norm of a function with a non-decaying tail is infinite")
        return math.inf
    if formula is LorentzFormula.DISTRIBUTION:
        return _distribution_norm(pieces, p, q)
    rearranged = _rearrange(pieces)
    return power_weighted_norm(rearranged, 1.0 / p - reciprocal(q), q)


def lorentz_norm_on_line(f_pos: SampledFunction, f_neg: SampledFunction, p: float, q: float,
                         formula: LorentzFormula = LorentzFormula.REARRANGEMENT) -> float:
    """Lorentz norm on the real line from the two half-line profiles f(x) and f(-x)."""
    return lorentz_norm(f_pos, p, q, formula, others=(f_neg,))


def norm_on_line(f_pos: SampledFunction, f_neg: SampledFunction, gamma: float, q: float) -> float:
    """|| |x|^gamma f ||_{L^q(R)} from the two half-line profiles."""
    pos = power_weighted_norm(f_pos, gamma, q)
    neg = power_weighted_norm(f_neg, gamma, q)
    if math.isinf(q):
        return max(pos, neg)
    return (pos ** q + neg ** q) ** (1.0 / q)


def certify_doubling(weight: WeightFunction, grid=None) -> WeightFunction:
    """
    Witness the doubling property w(s) ~ w(t) on every [x, 2x] of the grid.

    Raises:
        PreconditionError: If the weight is not positive and finite, or its
            doubling constant is unbounded on the grid
    """
    scales = np.exp2(np.arange(-20 * 4, 20 * 4 + 1) / 4.0) if grid is None else np.asarray(grid, dtype=float)
    points = scales[:, None] * np.exp2(np.arange(17) / 16.0)[None, :]
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        values = weight(points)
    if not np.all(np.isfinite(values)) or np.any(values <= 0):
        raise PreconditionError("doubling-weight", "Weight must be positive and finite on the grid",
                                details={"weight": weight.describe()})
    constant = float(np.max(values.max(axis=1) / values.min(axis=1)))
    if not math.isfinite(constant):
        raise PreconditionError("doubling-weight", "Weight is not doubling on the grid", details={"weight": weight.describe()})
    logger.debug(f"Weight {weight.describe()} doubling constant {constant:.6g}")
    return replace(weight, doubling_constant=constant)
