"""
Cutoff averages Phi_g(t) = t^-1 int phi(u/t) g(u) du, their maximal function
M Phi_g(t) = sup_{x >= t} |Phi_g(x)| and the checks built on them.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

import numpy as np
from numpy.polynomial import Chebyshev
from scipy import special
from scipy.optimize import minimize_scalar

from hankel_gm.analysis.bessel import OrderLike, as_order
from hankel_gm.analysis.funcrep import (
    Interpolation,
    PowerLaw,
    SampledFunction,
    antiderivative,
    parse_descriptor,
    sample,
)
from hankel_gm.analysis.gm import certify_gm, lambda_exponent, theorem_epsilon
from hankel_gm.analysis.norms import (
    SpaceMode,
    SpaceSpec,
    WeightFunction,
    certify_doubling,
    lorentz_norm,
    weighted_lebesgue_norm,
)
from hankel_gm.analysis.transform import TransformSettings, hankel_transform
from hankel_gm.config.settings import settings
from hankel_gm.core.exceptions import DomainError, NotGeneralMonotoneError, PreconditionError
from hankel_gm.schemas import CheckResult, DyadicProfile, GoodNumberBound, MaximalBoundResult

logger = logging.getLogger(__name__)

_TRANSITION_ORDER = 16
_EXTENSION_OCTAVES = 8
_EXTENSION_PER_OCTAVE = 16
_SEMINORM_DEGREE = 32
_SEMINORM_SAMPLES = 64
_SEMINORM_RANGES = (4, 8, 16, 32)
_SEMINORM_RTOL = 1e-8
_MAX_DERIVATIVE = 4


class CutoffShape(str, Enum):
    SHARP = "sharp"
    SMOOTH = "smooth"


def _smooth_step(u: np.ndarray) -> np.ndarray:
    """C-infinity step from 0 at u <= 0 to 1 at u >= 1."""
    u = np.clip(u, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        left = np.where(u > 0, np.exp(-1.0 / u), 0.0)
        right = np.where(u < 1, np.exp(-1.0 / (1.0 - u)), 0.0)
    return left / (left + right)


@dataclass(frozen=True)
class CutoffSpec:
    """
    Cutoff phi with values in [0, 1], equal to 1 on (0, 1).

    ``sharp`` is the indicator of (0, 1]; ``smooth`` falls from 1 to 0 on
    [1, 1 + epsilon/2] through a C-infinity plateau transition.
    """

    epsilon: float
    shape: CutoffShape = CutoffShape.SHARP

    def __post_init__(self) -> None:
        if not self.epsilon > 0 or not math.isfinite(self.epsilon):
            raise DomainError("Cutoff epsilon must be positive", details={"epsilon": self.epsilon})
        object.__setattr__(self, "shape", CutoffShape(self.shape))

    @property
    def support_end(self) -> float:
        return 1.0 if self.shape is CutoffShape.SHARP else 1.0 + self.epsilon / 2.0

    def __call__(self, s) -> np.ndarray:
        sa = np.asarray(s, dtype=float)
        if self.shape is CutoffShape.SHARP:
            return np.where((sa > 0) & (sa <= 1.0), 1.0, 0.0)
        inside = np.where(sa > 0, 1.0, 0.0)
        return inside * (1.0 - _smooth_step((sa - 1.0) / (self.epsilon / 2.0)))


def _transition_integral(g: SampledFunction, phi: CutoffSpec, t: np.ndarray) -> np.ndarray:
    """int_t^{t(1+eps/2)} phi(u/t) g(u) du by Gauss-Legendre."""
    nodes, weights = special.roots_legendre(_TRANSITION_ORDER)
    half = 0.5 * t * (phi.support_end - 1.0)
    points = (t + half)[:, None] + half[:, None] * nodes[None, :]
    values = g.evaluate(points.ravel()).reshape(points.shape) * phi(points / t[:, None])
    return (values @ weights) * half


def phi_average(g: SampledFunction, phi: CutoffSpec, t):
    """
    Phi_g(t) = t^-1 int_0^inf phi(u/t) g(u) du.

    Raises:
        DomainError: If t <= 0, or the averaging range leaves the window and
            the head or tail model is unknown
    """
    ta = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(~(ta > 0)) or np.any(~np.isfinite(ta)):
        raise DomainError("Averages need t > 0")
    if g.tail is None and np.any(ta * phi.support_end > g.x_max):
        raise DomainError(
            "Averaging range passes the window end and no tail model is known",
            details={"x_max": g.x_max, "t_max": float(ta.max())},
        )
    total = antiderivative(g, ta)
    if phi.shape is CutoffShape.SMOOTH:
        total = total + _transition_integral(g, phi, ta)
    result = total / ta
    return result[0] if np.ndim(t) == 0 else result


@dataclass(frozen=True)
class _MaximalTable:
    """|Phi_g| on the evaluation points with its reverse running maximum."""

    g: SampledFunction
    phi: CutoffSpec
    points: np.ndarray
    running: np.ndarray

    @classmethod
    def build(cls, g: SampledFunction, phi: CutoffSpec) -> "_MaximalTable":
        extension = g.x_max * 2.0 ** (np.arange(1, _EXTENSION_OCTAVES * _EXTENSION_PER_OCTAVE + 1) / _EXTENSION_PER_OCTAVE)
        if g.tail is None:
            extension = extension[extension * phi.support_end <= g.x_max]
        points = np.unique(np.concatenate((g.grid, extension)))
        if g.tail is None:
            points = points[points * phi.support_end <= g.x_max]
        magnitude = np.abs(phi_average(g, phi, points))
        running = np.maximum.accumulate(magnitude[::-1])[::-1]
        return cls(g, phi, points, running)

    def query(self, t) -> np.ndarray:
        ta = np.atleast_1d(np.asarray(t, dtype=float))
        index = np.searchsorted(self.points, ta, side="left")
        beyond = np.where(index < self.points.size, self.running[np.minimum(index, self.points.size - 1)], 0.0)
        return np.maximum(np.abs(phi_average(self.g, self.phi, ta)), beyond)


def maximal_average(g: SampledFunction, phi: CutoffSpec, t):
    """
    M Phi_g(t) = sup_{x >= t} |Phi_g(x)| over the grid, t itself and eight
    octaves of tail extension; nonincreasing in t by construction.
    """
    values = _MaximalTable.build(g, phi).query(t)
    return float(values[0]) if np.ndim(t) == 0 else values


def maximal_function(g: SampledFunction, phi: CutoffSpec) -> SampledFunction:
    """M Phi_g on the grid of g as a piecewise-linear function with fitted models."""
    table = _MaximalTable.build(g, phi)
    values = table.query(g.grid)
    head_exponent = g.head.exponent if g.head is not None and not g.head.is_zero else 0.0
    if head_exponent < 0:
        head = PowerLaw(float(values[0]) / g.x_min ** head_exponent, head_exponent)
    else:
        head = PowerLaw(float(values[0]), 0.0)
    beyond = table.points[table.points > g.x_max]
    end = float(values[-1])
    if beyond.size == 0 or end == 0.0:
        tail = PowerLaw.zero()
    else:
        far = float(table.running[-1])
        if far <= 0:
            tail = PowerLaw.zero()
        else:
            exponent = min(0.0, math.log(far / end) / math.log(float(beyond[-1]) / g.x_max))
            tail = PowerLaw(end / g.x_max ** exponent, exponent)
    return SampledFunction(
        grid=g.grid,
        values=values,
        interp=Interpolation.LINEAR,
        head=head,
        tail=tail,
        metadata={"maximal": True, "epsilon": phi.epsilon, "shape": phi.shape.value},
    )


# -- seminorms ------------------------------------------------------------------------


def _octave_sup(psi: Callable[[np.ndarray], np.ndarray], k: int, m: int, n: int) -> float:
    """sup over x in [2^k, 2^(k+1)] of |x^m (x^-1 D)^n psi| using s = x^2/2."""
    lo, hi = 2.0 ** k, 2.0 ** (k + 1)
    s_lo, s_hi = lo * lo / 2.0, hi * hi / 2.0
    series = Chebyshev.interpolate(lambda s: psi(np.sqrt(2.0 * s)), _SEMINORM_DEGREE, domain=[s_lo, s_hi])
    derivative = series.deriv(n) if n else series

    def magnitude(x):
        return np.abs(np.power(x, m) * derivative(np.asarray(x) ** 2 / 2.0))

    xs = np.geomspace(lo, hi, _SEMINORM_SAMPLES)
    sampled = magnitude(xs)
    best = int(np.argmax(sampled))
    a, b = xs[max(best - 1, 0)], xs[min(best + 1, xs.size - 1)]
    refined = minimize_scalar(lambda x: -float(magnitude(x)), bounds=(a, b), method="bounded")
    return float(max(sampled[best], -refined.fun))


def seminorm_gamma(phi: Callable[[np.ndarray], np.ndarray], order: OrderLike, m: int, n: int) -> float:
    """
    gamma_{m,n}(phi) = sup_x |x^m (x^-1 D)^n (x^(-alpha-1/2) phi(x))|.

    The supremum is taken per octave on Chebyshev interpolants in s = x^2/2,
    where x^-1 D = d/ds, over x in [2^-K, 2^K] for growing K. A value that still
    grows at the widest range is reported as infinite.

    Raises:
        DomainError: If m or n is negative or n exceeds the derivative cap
    """
    alpha = as_order(order).alpha
    if m < 0 or n < 0 or int(m) != m or int(n) != n:
        raise DomainError("Seminorm indices must be nonnegative integers", details={"m": m, "n": n})
    if n > _MAX_DERIVATIVE:
        raise DomainError(f"Seminorm derivative order is capped at {_MAX_DERIVATIVE}", details={"n": n})

    def psi(x):
        xa = np.asarray(x, dtype=float)
        with np.errstate(over="ignore", under="ignore", invalid="ignore"):
            return np.power(xa, -alpha - 0.5) * np.asarray(phi(xa), dtype=float)

    octaves = {}
    previous = None
    for K in _SEMINORM_RANGES:
        for k in range(-K, K):
            if k not in octaves:
                octaves[k] = _octave_sup(psi, k, int(m), int(n))
        current = max(octaves[k] for k in range(-K, K))
        if not math.isfinite(current):
            return math.inf
        if previous is not None and abs(current - previous) <= _SEMINORM_RTOL * max(current, 1e-300):
            return current
        previous = current
    logger.info(f"Seminorm gamma_{m},{n} still growing at 2^{_SEMINORM_RANGES[-1]}: reported infinite")
    return math.inf


# -- maximal theorem ---------------------------------------------------------------------


def _check_vanishing(g: SampledFunction, r: float) -> None:
    peak = float(np.max(np.abs(g.values)))
    tail = g.tail
    if tail is not None:
        decays = tail.is_zero or tail.exponent < 0
    else:
        decays = abs(g.left_limits[-1]) <= 1e-6 * peak
    if not decays:
        raise PreconditionError("vanishing-at-infinity", "g does not vanish at the window end",
                                details={"tail": None if tail is None else tail.to_dict()})
    head = g.head
    if head is not None:
        decays = head.is_zero or head.exponent + r > 0
    else:
        weighted = np.power(g.grid, r) * np.abs(g.values)
        decays = weighted[0] <= 1e-3 * float(weighted.max())
    if not decays:
        raise PreconditionError("head-decay", f"x^{r} g(x) does not vanish at 0",
                                details={"head": None if head is None else head.to_dict(), "r": r})


def _plain_norm(f: SampledFunction, weight: WeightFunction, q: float) -> float:
    return weighted_lebesgue_norm(f, SpaceSpec(p=q, q=q, mode=SpaceMode.PLAIN_WEIGHT, weight=weight))


def _ratio(numerator: float, denominator: float) -> float:
    if denominator == 0:
        return 0.0 if numerator == 0 else math.inf
    return numerator / denominator


def maximal_bound_check(
    g: SampledFunction,
    w: WeightFunction,
    q: float,
    phi: Optional[CutoffSpec] = None,
    *,
    lam: float = 2.0,
    r: Optional[float] = None,
) -> MaximalBoundResult:
    """
    Compare ||g||_{L^q(w)} with ||M Phi_g||_{L^q(w)}.

    The hypotheses are checked first: g real-valued and general monotone,
    vanishing at infinity, x^r g(x) -> 0 at 0 and w doubling. Without an
    explicit cutoff the sharp one with the theorem's epsilon is used. When g
    carries a descriptor the ratio is recomputed on a window grown by a factor
    4 at both ends and must not drift by more than ``window_drift_tol``.

    Raises:
        PreconditionError: Naming the first hypothesis that fails
    """
    r = settings.good_number_r if r is None else r
    nu = lambda_exponent(lam)
    if g.is_complex:
        raise PreconditionError("real-valued", "The maximal theorem is stated for real-valued g")
    try:
        certificate = certify_gm(g, lam)
    except NotGeneralMonotoneError as e:
        raise PreconditionError("general-monotone", e.message, details={"source": g.source}) from e
    _check_vanishing(g, r)
    certify_doubling(w)
    if phi is None:
        phi = CutoffSpec(theorem_epsilon(certificate.C if certificate.C > 0 else 1.0, nu, r))
    norm_g = _plain_norm(g, w, q)
    norm_maximal = _plain_norm(maximal_function(g, phi), w, q)
    ratio = _ratio(norm_g, norm_maximal)

    ratio_grown = drift = None
    if g.source is not None:
        ratio_step = float(g.metadata.get("ratio", g.max_ratio))
        grown = sample(parse_descriptor(g.source), g.x_min / 4.0, g.x_max * 4.0, ratio_step, g.interp)
        ratio_grown = _ratio(_plain_norm(grown, w, q), _plain_norm(maximal_function(grown, phi), w, q))
        if math.isfinite(ratio) and ratio > 0:
            drift = abs(ratio_grown - ratio) / ratio
    passed = math.isfinite(ratio) and (drift is None or drift <= settings.window_drift_tol)
    logger.info(f"Maximal bound check q={q}: ratio={ratio:.6g}, drift={drift}, passed={passed}")
    return MaximalBoundResult(
        norm_g=norm_g,
        norm_maximal=norm_maximal,
        ratio=ratio,
        ratio_grown=ratio_grown,
        drift=drift,
        epsilon=phi.epsilon,
        shape=phi.shape.value,
        passed=passed,
    )


def maximal_lorentz_check(
    f: SampledFunction,
    order: OrderLike,
    p: float,
    q: float,
    phi: Optional[CutoffSpec] = None,
    transform_settings: Optional[TransformSettings] = None,
) -> CheckResult:
    """
    ||M Phi_{H_alpha f}||_{L^(p',q)} / ||f||_{L^(p,q)}; passes when finite.

    Raises:
        DomainError: If p <= 1
    """
    alpha = as_order(order).alpha
    if not p > 1:
        raise DomainError("The averaging Lorentz bound needs p > 1", details={"p": p})
    phi = phi or CutoffSpec(1.0)
    p_conjugate = SpaceSpec(p=p, q=q).conjugate
    norm_f = lorentz_norm(f, p, q)
    if norm_f == 0:
        return CheckResult(check="maximal-lorentz", passed=True, value=0.0, flag="zero",
                           message="f vanishes identically")
    transform = hankel_transform(f, alpha, transform_settings)
    norm_maximal = lorentz_norm(maximal_function(transform, phi), p_conjugate, q)
    ratio = _ratio(norm_maximal, norm_f)
    passed = math.isfinite(ratio)
    return CheckResult(
        check="maximal-lorentz",
        passed=passed,
        value=ratio,
        flag="ok" if passed else "infinite-ratio",
        message=f"||M Phi_Hf||_(p',q) / ||f||_(p,q) = {ratio:.6g}",
        details={"alpha": alpha, "p": p, "q": q, "norm_f": norm_f, "norm_maximal": norm_maximal},
    )


def good_number_lower_bound(
    g: SampledFunction, profile: DyadicProfile, phi: Optional[CutoffSpec] = None
) -> GoodNumberBound:
    """M Phi_g(2^(n - nu)) / A_n over the good numbers of the profile."""
    nu = profile.nu
    if phi is None:
        C = profile.C if profile.C is not None else certify_gm(g, 2.0 ** nu).C
        phi = CutoffSpec(theorem_epsilon(C if C > 0 else 1.0, nu, profile.r))
    table = _MaximalTable.build(g, phi)
    ns, ratios = [], []
    for n in sorted(profile.classification):
        if not profile.is_good(n) or profile.A[n] == 0:
            continue
        ns.append(n)
        ratios.append(float(table.query(2.0 ** (n - nu))[0]) / profile.A[n])
    return GoodNumberBound(ns=ns, ratios=ratios)
