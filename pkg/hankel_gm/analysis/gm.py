"""
General monotonicity: ratio profiles and certificates, dyadic block suprema,
good/bad numbers, chains of bad numbers and the level sets of good numbers.
"""

import logging
import math
from collections import Counter
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from hankel_gm.analysis.funcrep import (
    Interpolation,
    SampledFunction,
    integrate,
    linear_view,
    modulus_view,
    total_variation,
    with_nodes,
)
from hankel_gm.config.settings import settings
from hankel_gm.core.exceptions import DomainError, NotGeneralMonotoneError, PreconditionError
from hankel_gm.schemas import (
    BadChain,
    ChainCount,
    ChainCountReport,
    DyadicProfile,
    GMCertificate,
    GMProfile,
    GMPropertyProfiles,
    LevelSetReport,
)

logger = logging.getLogger(__name__)

_SCALES_PER_OCTAVE = 4
_EDGE_OCTAVES = 8


def lambda_exponent(lam: float) -> int:
    """nu with lambda = 2^nu.

    Raises:
        DomainError: If lambda is not a power of two greater than one
    """
    if not lam > 1 or not math.isfinite(lam):
        raise DomainError("GM constant lambda must exceed 1", details={"lambda": lam})
    nu = math.log2(lam)
    if abs(nu - round(nu)) > 1e-12:
        raise DomainError("GM constant lambda must be a power of two", details={"lambda": lam})
    return int(round(nu))


def _modulus_integral(f: SampledFunction, modulus: SampledFunction, a: float, b: float, beta: float) -> float:
    """int_a^b |f| x^beta, on f itself where its node values keep one sign."""
    if not f.is_complex and f.x_min <= a and b <= f.x_max:
        span = (f.grid >= a) & (f.grid <= b)
        nodes = np.concatenate((f.values[span], f.left_limits[span]))
        if nodes.size and (np.all(nodes > 0) or np.all(nodes < 0)):
            return abs(float(integrate(f, a, b, beta=beta)))
    return float(integrate(modulus, a, b, beta=beta))


def _ratio(f: SampledFunction, lin: SampledFunction, modulus: SampledFunction, x: float, lam: float) -> float:
    numerator = total_variation(lin, x, 2.0 * x)
    denominator = _modulus_integral(f, modulus, x / lam, lam * x, -1.0)
    if denominator <= 0.0:
        return 0.0 if numerator == 0.0 else math.inf
    return numerator / denominator


def gm_ratio(f: SampledFunction, x: float, lam: float = 2.0) -> float:
    """
    TV(f; (x, 2x]) / int_{x/lambda}^{lambda x} |f(t)|/t dt.

    0/0 gives 0; a positive variation over a vanishing denominator gives +inf.
    """
    if not x > 0:
        raise DomainError("Scale must be positive", details={"x": x})
    return _ratio(f, linear_view(f), modulus_view(f), x, lam)


def gm_scales(f: SampledFunction, lam: float) -> np.ndarray:
    """Scales 2^(k/4) with [x/lambda, lambda x] inside the window."""
    first = math.ceil(_SCALES_PER_OCTAVE * math.log2(f.x_min * lam) - 1e-9)
    last = math.floor(_SCALES_PER_OCTAVE * math.log2(f.x_max / lam) + 1e-9)
    if last < first:
        raise DomainError("Window is too short for GM scales", details={"x_min": f.x_min, "x_max": f.x_max, "lambda": lam})
    return np.exp2(np.arange(first, last + 1) / _SCALES_PER_OCTAVE)


def gm_profile(f: SampledFunction, lam: float = 2.0, scales: Optional[Iterable[float]] = None) -> GMProfile:
    nu = lambda_exponent(lam)
    xs = gm_scales(f, lam) if scales is None else np.asarray(list(scales), dtype=float)
    lin, modulus = linear_view(f), modulus_view(f)
    ratios = [_ratio(f, lin, modulus, float(x), lam) for x in xs]
    return GMProfile(lam=lam, nu=nu, scales=xs.tolist(), ratios=ratios, source=f.source)


def _unbounded(ratios: Sequence[float], growth_factor: float) -> bool:
    """Infinite ratios, or ratios that climb towards a window edge to far above the bulk."""
    values = np.asarray(ratios, dtype=float)
    if not np.all(np.isfinite(values)):
        return True
    positive = values[values > 0]
    if positive.size == 0:
        return False
    bulk = float(np.median(positive))
    edge = max(1, values.size // 8)
    # each block runs from the inside of the window outwards
    for block in (values[: edge + 1][::-1], values[-edge - 1 :]):
        if block[-1] > block[0] and float(block.max()) > growth_factor * bulk:
            return True
    return False


def certify_gm(
    f: SampledFunction,
    lam: float = 2.0,
    *,
    scales: Optional[Iterable[float]] = None,
    safety_factor: Optional[float] = None,
    growth_factor: Optional[float] = None,
) -> GMCertificate:
    """
    Certify the GM inequality on a log grid of scales.

    The certified constant is the observed supremum times the safety factor.

    Raises:
        DomainError: If lambda is not 2^nu or the window admits no scale
        NotGeneralMonotoneError: If the ratio profile is infinite somewhere or
            grows at the window edges; the profile is attached
    """
    safety = settings.gm_safety_factor if safety_factor is None else safety_factor
    growth = settings.gm_growth_factor if growth_factor is None else growth_factor
    profile = gm_profile(f, lam, scales)
    if _unbounded(profile.ratios, growth):
        logger.info(f"GM certification failed for {f.source or 'sampled function'}: sup ratio {profile.sup_ratio}")
        raise NotGeneralMonotoneError("Ratio profile is unbounded; function is not general monotone", profile=profile)
    certificate = GMCertificate(**profile.model_dump(), C=safety * profile.sup_ratio, safety_factor=safety)
    logger.debug(f"Certified GM with C={certificate.C:.6g}, lambda={lam}")
    return certificate


def theorem_epsilon(C: float, nu: int, r: float) -> float:
    """epsilon = 1 / (C^4 2^(6 r nu + 8 nu + 16)) for the cutoff of the maximal theorem."""
    if not C > 0:
        raise DomainError("epsilon needs a positive GM constant", details={"C": C})
    return math.exp(-4.0 * math.log(C) - (6.0 * r * nu + 8.0 * nu + 16.0) * math.log(2.0))


# -- dyadic blocks -----------------------------------------------------------------


def _block_suprema(modulus: SampledFunction, blocks: Sequence[int]) -> Dict[int, float]:
    """sup |g| over [2^k, 2^(k+1)] for each block k, exact for linear cells."""
    grid, values, left = modulus.grid, np.real(modulus.values), np.real(modulus.left_limits)
    result = {}
    for k in blocks:
        lo, hi = 2.0 ** k, 2.0 ** (k + 1)
        ends = [float(modulus.evaluate(lo, "right")[0]), float(modulus.evaluate(hi, "left")[0])]
        inner = (grid > lo) & (grid < hi)
        candidates = [max(ends)]
        if inner.any():
            candidates += [float(values[inner].max()), float(left[inner].max())]
        result[k] = max(candidates)
    return result


def _default_range(g: SampledFunction, nu: int) -> Tuple[int, int]:
    first_block = math.ceil(math.log2(g.x_min) - 1e-12)
    last_block = math.floor(math.log2(g.x_max) + 1e-12) - 1
    return first_block + 2 * nu, last_block - 2 * nu + 1


def dyadic_profile(
    g: SampledFunction,
    r: Optional[float] = None,
    nu: int = 1,
    n_range: Optional[Tuple[int, int]] = None,
    C: Optional[float] = None,
) -> DyadicProfile:
    """
    Block suprema A_n, wide suprema B_n and the good/bad classification.

    n is good when B_n <= 2^(2 r nu) A_n.

    Raises:
        DomainError: If the window does not cover the blocks the range needs
    """
    r = settings.good_number_r if r is None else r
    if nu < 1:
        raise DomainError("nu must be a positive integer", details={"nu": nu})
    n_min, n_max = _default_range(g, nu) if n_range is None else n_range
    if n_max < n_min:
        raise DomainError("Window is too short for a dyadic profile", details={"n_min": n_min, "n_max": n_max})
    blocks = list(range(n_min - 2 * nu, n_max + 2 * nu))
    missing = [k for k in blocks if 2.0 ** k < g.x_min * (1 - 1e-12) or 2.0 ** (k + 1) > g.x_max * (1 + 1e-12)]
    if missing:
        raise DomainError(
            f"Window [{g.x_min}, {g.x_max}] misses dyadic blocks {missing[0]}..{missing[-1]}",
            details={"missing_blocks": missing},
        )
    A = _block_suprema(modulus_view(g), blocks)
    threshold = 2.0 ** (2.0 * r * nu)
    B, classification = {}, {}
    for n in range(n_min, n_max + 1):
        B[n] = max(A[k] for k in range(n - 2 * nu, n + 2 * nu))
        classification[n] = "good" if B[n] <= threshold * A[n] * (1.0 + 1e-12) else "bad"
    logger.debug(f"Dyadic profile n in [{n_min}, {n_max}]: {sum(c == 'good' for c in classification.values())} good")
    return DyadicProfile(n_min=n_min, n_max=n_max, r=r, nu=nu, A=A, B=B, classification=classification, C=C)


def _goodness(profile: DyadicProfile, n: int) -> Optional[bool]:
    if n in profile.classification:
        return profile.is_good(n)
    return profile.goodness(n)


def bad_chain(profile: DyadicProfile, m: int) -> BadChain:
    """
    Follow the chain of bad numbers from ``m`` to a good number.

    The first step picks the smallest gamma in [m - 2nu, m + 2nu) with
    A_gamma = B_m; if it lies below m the chain decreases and keeps taking the
    smallest such gamma, otherwise it increases and takes the largest.

    Raises:
        DomainError: If m is outside the profile
        PreconditionError: If m is good
    """
    if m not in profile.classification:
        raise DomainError(f"{m} is outside the profiled range", details={"n_min": profile.n_min, "n_max": profile.n_max})
    if profile.is_good(m):
        raise PreconditionError("bad-number", f"{m} is a good number", details={"m": m})
    nu = profile.nu
    gammas = [m]
    direction = None
    current = m
    for _ in range(len(profile.A) + 1):
        wide = profile.B.get(current, profile.wide_supremum(current))
        if wide is None:
            break
        candidates = [k for k in range(current - 2 * nu, current + 2 * nu) if profile.A[k] == wide]
        if direction is None:
            direction = "decreasing" if min(candidates) < m else "increasing"
        current = min(candidates) if direction == "decreasing" else max(candidates)
        if current in gammas:
            break
        gammas.append(current)
        good = _goodness(profile, current)
        if good is None:
            break
        if good:
            return BadChain(start=m, gammas=gammas, direction=direction)
    logger.info(f"Chain from bad number {m} left the profiled window after {len(gammas) - 1} steps")
    return BadChain(start=m, gammas=gammas, direction=direction or "decreasing", status="inconclusive")


def chain_counts(profile: DyadicProfile) -> ChainCountReport:
    """Count bad m per (end n, direction, length s) against the bound (2 nu)^s."""
    counter: Counter = Counter()
    inconclusive = []
    for m in profile.bad_numbers:
        chain = bad_chain(profile, m)
        if chain.status == "inconclusive":
            inconclusive.append(m)
            continue
        counter[(chain.end, chain.direction, chain.length)] += 1
    counts = [
        ChainCount(n=n, direction=direction, length=s, count=count, bound=(2 * profile.nu) ** s)
        for (n, direction, s), count in sorted(counter.items())
    ]
    return ChainCountReport(counts=counts, inconclusive=inconclusive)


# -- level sets ------------------------------------------------------------------


def _above(lo: np.ndarray, hi: np.ndarray, start: np.ndarray, end: np.ndarray, s: float) -> Tuple[np.ndarray, np.ndarray]:
    """Subinterval [u, v] of each linear cell where the function exceeds s (u = v when empty)."""
    width = hi - lo
    with np.errstate(divide="ignore", invalid="ignore"):
        falling = lo + width * (start - s) / (start - end)
        rising = hi - width * (end - s) / (end - start)
    u = np.where(start > s, lo, np.where(end > s, rising, hi))
    v = np.where(end > s, hi, np.where(start > s, falling, lo))
    return u, np.maximum(u, v)


def _longest_run(lo, hi, u, v) -> Tuple[float, float]:
    best, run_start, run_end = (0.0, 0.0), None, None
    for i in range(lo.size):
        if v[i] <= u[i]:
            run_start = None
            continue
        if run_start is not None and u[i] == lo[i] and run_end == lo[i]:
            run_end = v[i]
        else:
            run_start, run_end = u[i], v[i]
        if run_end - run_start > best[1] - best[0]:
            best = (float(run_start), float(run_end))
        if v[i] < hi[i]:
            run_start = None
    return best


def good_level_sets(
    g: SampledFunction,
    profile: DyadicProfile,
    n: int,
    certificate: Optional[GMCertificate] = None,
) -> LevelSetReport:
    """
    Level sets E_n, E_n^+ and E_n^- of a good number on [2^(n-nu), 2^(n+nu)].

    The level is A_n / (C 2^(2 nu + 3)). Measured sizes are reported next to
    the lemma bounds 2^n / (C 2^(2 r nu + nu + 3)) for |E_n| and
    2^n / (C^3 2^(4 r nu + 5 nu + 12)) for the single-sign interval.

    Raises:
        DomainError: If g is complex-valued
        PreconditionError: If n is not good or the GM constant is zero
    """
    if g.is_complex:
        raise DomainError("Level-set sign analysis needs a real-valued function")
    good = _goodness(profile, n)
    if not good:
        raise PreconditionError("good-number", f"{n} is not a good number of the profile", details={"n": n})
    nu, r = profile.nu, profile.r
    if certificate is not None:
        C = certificate.C
    elif profile.C is not None:
        C = profile.C
    else:
        C = certify_gm(g, 2.0 ** nu).C
    if not C > 0:
        raise PreconditionError("gm-constant", "Level-set bounds need a positive GM constant", details={"C": C})
    A_n = profile.A[n] if n in profile.A else _block_suprema(modulus_view(g), [n])[n]
    threshold = A_n / (C * 2.0 ** (2 * nu + 3))
    a, b = 2.0 ** (n - nu), 2.0 ** (n + nu)
    lin = with_nodes(linear_view(g), (a, b))
    inside = (lin.grid[:-1] >= a) & (lin.grid[1:] <= b)
    lo, hi = lin.grid[:-1][inside], lin.grid[1:][inside]
    start = np.real(lin.values[:-1][inside])
    end = start if lin.interp is Interpolation.CONSTANT_LEFT else np.real(lin.left_limits[1:][inside])
    plus = _above(lo, hi, start, end, threshold)
    minus = _above(lo, hi, -start, -end, threshold)
    measure_plus = float(np.sum(plus[1] - plus[0]))
    measure_minus = float(np.sum(minus[1] - minus[0]))
    run_plus = _longest_run(lo, hi, *plus)
    run_minus = _longest_run(lo, hi, *minus)
    if run_plus[1] - run_plus[0] >= run_minus[1] - run_minus[0]:
        interval, sign = run_plus, 1
    else:
        interval, sign = run_minus, -1
    if interval[1] <= interval[0]:
        interval, sign = None, 0
    return LevelSetReport(
        n=n,
        threshold=threshold,
        measure=measure_plus + measure_minus,
        measure_plus=measure_plus,
        measure_minus=measure_minus,
        interval=interval,
        interval_sign=sign,
        measure_bound=2.0 ** n / (C * 2.0 ** (2 * r * nu + nu + 3)),
        interval_bound=2.0 ** n / (C ** 3 * 2.0 ** (4 * r * nu + 5 * nu + 12)),
    )


# -- property profiles --------------------------------------------------------------


def _weighted_variation(lin: SampledFunction, t: float, gamma: float) -> float:
    """int_t^inf x^gamma |df(x)|, jumps weighted at their node."""
    g = with_nodes(lin, (t,))
    keep = g.grid[:-1] >= t
    lo, hi = g.grid[:-1][keep], g.grid[1:][keep]
    total = 0.0
    if g.interp is Interpolation.LINEAR:
        slope = np.abs(g.left_limits[1:][keep] - g.values[:-1][keep]) / (hi - lo)
        e = gamma + 1.0
        moments = np.log(hi / lo) if e == 0.0 else (np.power(hi, e) - np.power(lo, e)) / e
        total += float(np.sum(slope * moments))
    jumps = np.abs(g.values - g.left_limits)
    nodes = (g.grid > t) & (g.grid <= g.x_max)
    total += float(np.sum(jumps[nodes] * np.power(g.grid[nodes], gamma)))
    tail = g.tail
    if tail is None or tail.is_zero:
        edge = abs(g.values[-1])
        return total + (edge * g.x_max ** gamma if edge and tail is not None else 0.0)
    total += abs(tail.exponent) * tail.power_integral(1.0, gamma - 1.0, g.x_max, math.inf)
    if tail.oscillating:
        e = tail.exponent + gamma
        if e >= 0:
            return math.inf
        first = math.ceil(math.log2(g.x_max))
        total += 2.0 * abs(tail.coefficient) * 2.0 ** (first * e) / (1.0 - 2.0 ** e)
    return total


def gm_property_profiles(
    f: SampledFunction,
    certificate: Optional[GMCertificate] = None,
    gammas: Sequence[float] = (-1.0, 0.0, 1.0),
) -> GMPropertyProfiles:
    """
    Measured constants of three standard consequences of general monotonicity.

    Pointwise domination sup_[t,2t] |f| against int_{t/lambda}^{lambda t} |f|/x,
    weighted variation int_t^inf x^gamma |df| against
    int_{t/lambda}^inf x^(gamma-1) |f|, and octave suprema of x|f(x)| at both
    ends of the window.
    """
    lam = certificate.lam if certificate is not None else 2.0
    scales = gm_scales(f, lam)
    lin, modulus = linear_view(f), modulus_view(f)
    grid, values, left = modulus.grid, np.real(modulus.values), np.real(modulus.left_limits)

    pointwise = []
    for t in scales:
        block = (grid >= t) & (grid <= 2 * t)
        sup = max(float(modulus.evaluate(t)[0]), float(modulus.evaluate(2 * t, "left")[0]))
        if block.any():
            sup = max(sup, float(values[block].max()), float(left[block].max()))
        denominator = _modulus_integral(f, modulus, t / lam, lam * t, -1.0)
        pointwise.append(sup / denominator if denominator > 0 else (0.0 if sup == 0 else math.inf))

    weighted: Dict[str, List[float]] = {}
    for gamma in gammas:
        ratios = []
        for t in scales:
            numerator = _weighted_variation(lin, float(t), gamma)
            try:
                denominator = float(integrate(modulus, t / lam, math.inf, beta=gamma - 1.0))
            except DomainError:
                denominator = math.nan
            if not math.isfinite(denominator):
                ratios.append(math.nan if math.isnan(denominator) else 0.0)
            elif denominator > 0:
                ratios.append(numerator / denominator)
            else:
                ratios.append(0.0 if numerator == 0 else math.inf)
        weighted[repr(float(gamma))] = ratios

    weighted_modulus = grid * np.maximum(values, left)
    octaves = np.floor(np.log2(grid) + 1e-12)
    first, last = int(octaves.min()), int(octaves.max())
    edge_zero = [float(weighted_modulus[octaves == k].max()) for k in range(min(first + _EDGE_OCTAVES, last), first - 1, -1)]
    edge_infinity = [float(weighted_modulus[octaves == k].max()) for k in range(max(last - _EDGE_OCTAVES, first), last + 1)]
    return GMPropertyProfiles(
        scales=scales.tolist(),
        pointwise_ratios=pointwise,
        weighted_variation=weighted,
        edge_zero=edge_zero,
        edge_infinity=edge_infinity,
        vanishes_at_zero=_vanishes(f.head, edge_zero, at_zero=True),
        vanishes_at_infinity=_vanishes(f.tail, edge_infinity, at_zero=False),
    )


def _vanishes(model, edge: List[float], at_zero: bool) -> bool:
    if model is not None:
        if model.is_zero:
            return True
        return model.exponent + 1.0 > 0 if at_zero else model.exponent + 1.0 < 0
    return edge[-1] <= 0.5 * max(edge) if edge and max(edge) > 0 else True
