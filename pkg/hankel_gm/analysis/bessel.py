"""Bessel functions of the first kind, their power moments and the kernel primitive.

All entry points are vectorised over the argument and pure. Three regimes are
used for J_alpha: the ascending series below a crossover, the Hankel asymptotic
expansion above it, and ``scipy.special.jv`` when neither reaches the requested
tolerance. Moments ``M_mu(u) = int_0^u t^mu J_alpha(t) dt`` are assembled from a
term-wise integrated series, zero-aligned Gauss-Legendre panels and, for large
arguments, the reduction

    int u^mu J_nu = u^mu J_{nu+1} + (nu + 1 - mu) int u^(mu-1) J_{nu+1}.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple, Union

import numpy as np
from scipy import special
from scipy.optimize import brentq

from hankel_gm.config.settings import settings
from hankel_gm.core.exceptions import AccuracyError, DomainError

logger = logging.getLogger(__name__)

SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)
_EPS = float(np.finfo(float).eps)
_ZERO_SCAN_STEP = 0.25


@dataclass(frozen=True)
class BesselOrder:
    """Order alpha >= -1/2 of J_alpha."""

    alpha: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.alpha) or self.alpha < -0.5:
            raise DomainError(
                f"Bessel order must satisfy alpha >= -1/2, got {self.alpha}",
                details={"alpha": self.alpha},
            )

    @property
    def is_elementary(self) -> bool:
        """True for the cosine (alpha=-1/2) and sine (alpha=1/2) kernels."""
        return self.alpha in (-0.5, 0.5)


OrderLike = Union[BesselOrder, float, int]


def as_order(order: OrderLike) -> BesselOrder:
    """Coerce a float or BesselOrder into a validated BesselOrder."""
    if isinstance(order, BesselOrder):
        return order
    return BesselOrder(float(order))


def _series_j(alpha: float, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    half = 0.5 * x
    term = np.power(half, alpha) / special.gamma(alpha + 1.0)
    total = term.copy()
    magnitude = np.abs(term)
    factor = -half * half
    for k in range(1, 400):
        term = term * factor / (k * (k + alpha))
        total += term
        magnitude += np.abs(term)
        if np.all(np.abs(term) <= _EPS * magnitude):
            break
    bound = 4.0 * _EPS * magnitude + np.abs(term)
    return total, bound


def _asymptotic_j(alpha: float, x: np.ndarray, max_terms: int = 60) -> Tuple[np.ndarray, np.ndarray]:
    mu = 4.0 * alpha * alpha
    inv8x = 1.0 / (8.0 * x)
    p = np.ones_like(x)
    q = np.zeros_like(x)
    term = np.ones_like(x)
    previous = np.ones_like(x)
    bound = np.zeros_like(x)
    active = np.ones(x.shape, dtype=bool)
    for k in range(1, max_terms + 1):
        term = term * (mu - (2 * k - 1) ** 2) * inv8x / k
        magnitude = np.abs(term)
        # the expansion is asymptotic: stop at the smallest term
        stopped = active & (magnitude >= previous)
        bound[stopped] = previous[stopped]
        active &= ~stopped
        sign = -1.0 if (k // 2) % 2 else 1.0
        if k % 2 == 0:
            p[active] += sign * term[active]
        else:
            q[active] += sign * term[active]
        previous = magnitude
        if not active.any():
            break
    bound[active] = previous[active]
    phase = alpha * math.pi / 2.0 + math.pi / 4.0
    # cos(x - phase) expanded so that x itself is reduced exactly
    cos_w = np.cos(x) * math.cos(phase) + np.sin(x) * math.sin(phase)
    sin_w = np.sin(x) * math.cos(phase) - np.cos(x) * math.sin(phase)
    amplitude = np.sqrt(2.0 / (math.pi * x))
    values = amplitude * (p * cos_w - q * sin_w)
    return values, amplitude * (bound + 4.0 * _EPS * (np.abs(p) + np.abs(q)))


def _evaluate(alpha: float, x: np.ndarray, tol: float) -> Tuple[np.ndarray, np.ndarray]:
    values = np.empty_like(x)
    bounds = np.zeros_like(x)
    zero = x == 0.0
    if zero.any():
        values[zero] = 1.0 if alpha == 0.0 else (0.0 if alpha > 0.0 else np.inf)
    crossover = max(settings.bessel_crossover, 2.0 * abs(alpha))
    small = ~zero & (x <= crossover)
    large = x > crossover
    if small.any():
        values[small], bounds[small] = _series_j(alpha, x[small])
    if large.any():
        values[large], bounds[large] = _asymptotic_j(alpha, x[large])
    fallback = ~zero & ((bounds > tol) | ~np.isfinite(values))
    if fallback.any():
        logger.debug(f"J_{alpha}: {int(fallback.sum())} points evaluated in the library regime")
        values[fallback] = special.jv(alpha, x[fallback])
        bounds[fallback] = 8.0 * _EPS * np.maximum(1.0, np.abs(values[fallback]))
    bad = ~zero & ~np.isfinite(values)
    if bad.any():
        raise AccuracyError(
            f"J_{alpha} could not be evaluated at {int(bad.sum())} points",
            achieved_error=float("inf"),
            details={"alpha": alpha, "first_bad_x": float(x[bad][0])},
        )
    return values, bounds


def bessel_j(order: OrderLike, x, tol: float = None, return_bound: bool = False):
    """
    Evaluate J_alpha(x) for x >= 0.

    Args:
        order: Bessel order alpha >= -1/2
        x: Scalar or array of nonnegative arguments
        tol: Absolute tolerance (defaults to ``settings.bessel_tol``)
        return_bound: Also return the per-point error bound

    Returns:
        Values of J_alpha, shaped like ``x`` (and the bounds if requested)
    """
    alpha = as_order(order).alpha
    tol = settings.bessel_tol if tol is None else tol
    xa = np.asarray(x, dtype=float)
    scalar = xa.ndim == 0
    xa = np.atleast_1d(xa).astype(float)
    if np.any(~np.isfinite(xa)) or np.any(xa < 0):
        raise DomainError("Bessel arguments must be finite and nonnegative", details={"alpha": alpha})
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        values, bounds = _evaluate(alpha, xa.ravel(), tol)
    values = values.reshape(xa.shape)
    bounds = bounds.reshape(xa.shape)
    if scalar:
        values, bounds = float(values[0]), float(bounds[0])
    return (values, bounds) if return_bound else values


def envelope_constant(order: OrderLike, grid) -> float:
    """Fitted C_alpha with |J_alpha(x)| <= C_alpha * min(x^alpha, x^(-1/2)) on the grid."""
    alpha = as_order(order).alpha
    x = np.asarray(grid, dtype=float)
    x = x[x > 0]
    envelope = np.minimum(np.power(x, alpha), np.power(x, -0.5))
    return float(np.max(np.abs(bessel_j(alpha, x)) / envelope))


@lru_cache(maxsize=128)
def _zeros_cached(alpha: float, lower: float, upper: float) -> Tuple[float, ...]:
    count = max(2, int(math.ceil((upper - lower) / _ZERO_SCAN_STEP)) + 1)
    scan = np.linspace(lower, upper, count)
    values = bessel_j(alpha, scan)
    roots = [float(t) for t, v in zip(scan[1:], values[1:]) if v == 0.0]

    def j_scalar(t: float) -> float:
        return float(bessel_j(alpha, t))

    change = np.nonzero(values[:-1] * values[1:] < 0)[0]
    for i in change:
        roots.append(brentq(j_scalar, scan[i], scan[i + 1], xtol=1e-15, rtol=4 * _EPS))
    return tuple(sorted(roots))


def bessel_zeros(order: OrderLike, lower: float, upper: float) -> np.ndarray:
    """Sorted zeros of J_alpha in (lower, upper]."""
    alpha = as_order(order).alpha
    if not 0 <= lower < upper or not math.isfinite(upper):
        raise DomainError("Zero search needs 0 <= lower < upper < inf", details={"lower": lower, "upper": upper})
    return np.array(_zeros_cached(alpha, float(lower), float(upper)))


@lru_cache(maxsize=8)
def _legendre(order: int) -> Tuple[np.ndarray, np.ndarray]:
    nodes, weights = special.roots_legendre(order)
    return nodes, weights


def _gauss_moments(alpha: float, mus: np.ndarray, a: np.ndarray, b: np.ndarray, order: int) -> np.ndarray:
    nodes, weights = _legendre(order)
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    t = mid[:, None] + half[:, None] * nodes[None, :]
    jt = bessel_j(alpha, t)
    integrand = np.power(t[None, :, :], mus[:, None, None]) * jt[None, :, :]
    return (integrand @ weights) * half[None, :]


def _adaptive_moments(
    alpha: float, mus: np.ndarray, a: np.ndarray, b: np.ndarray, order: int, tol: float, depth: int
) -> Tuple[np.ndarray, np.ndarray]:
    coarse = _gauss_moments(alpha, mus, a, b, order)
    fine = _gauss_moments(alpha, mus, a, b, 2 * order)
    error = np.max(np.abs(fine - coarse), axis=0)
    scale = np.maximum(1.0, np.max(np.abs(fine), axis=0))
    bad = error > tol * scale
    if bad.any() and depth > 0:
        split = 0.5 * (a[bad] + b[bad])
        left, left_err = _adaptive_moments(alpha, mus, a[bad], split, order, tol, depth - 1)
        right, right_err = _adaptive_moments(alpha, mus, split, b[bad], order, tol, depth - 1)
        fine[:, bad] = left + right
        error[bad] = left_err + right_err
    return fine, error


def _series_moments(alpha: float, mus: np.ndarray, u: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    out = np.zeros((mus.size, u.size))
    bound = np.zeros(u.size)
    positive = u > 0
    if not positive.any():
        return out, bound
    up = u[positive]
    half = 0.5 * up
    term = np.power(half, alpha) / special.gamma(alpha + 1.0)
    offset = alpha + mus + 1.0
    total = term[None, :] / offset[:, None]
    magnitude = np.abs(total)
    factor = -half * half
    for k in range(1, 400):
        term = term * factor / (k * (k + alpha))
        contribution = term[None, :] / (2.0 * k + offset)[:, None]
        total += contribution
        magnitude += np.abs(contribution)
        if np.all(np.abs(contribution) <= _EPS * magnitude):
            break
    scale = np.power(up[None, :], (mus + 1.0)[:, None])
    out[:, positive] = total * scale
    bound[positive] = np.max((4.0 * _EPS * magnitude + np.abs(contribution)) * scale, axis=0)
    return out, bound


@dataclass(frozen=True)
class _PanelTable:
    """Cumulative moments at the zeros of J_alpha between the series and reduction regimes."""

    alpha: float
    mus: np.ndarray
    breaks: np.ndarray
    cumulative: np.ndarray
    cumulative_error: np.ndarray
    order: int
    tol: float
    depth: int

    def evaluate(self, u: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        index = np.clip(np.searchsorted(self.breaks, u, side="right") - 1, 0, self.breaks.size - 2)
        start = self.breaks[index]
        partial, error = _adaptive_moments(self.alpha, self.mus, start, u, self.order, self.tol, self.depth)
        return self.cumulative[:, index] + partial, self.cumulative_error[index] + error


@lru_cache(maxsize=64)
def _panel_table(
    alpha: float, mus: Tuple[float, ...], lower: float, upper: float, order: int, tol: float, depth: int
) -> _PanelTable:
    mu = np.array(mus)
    breaks = np.concatenate(([lower], bessel_zeros(alpha, lower, upper), [upper]))
    breaks = np.unique(breaks)
    panels, errors = _adaptive_moments(alpha, mu, breaks[:-1], breaks[1:], order, tol, depth)
    start, start_error = _series_moments(alpha, mu, np.array([lower]))
    cumulative = start + np.concatenate((np.zeros((mu.size, 1)), np.cumsum(panels, axis=1)), axis=1)
    cumulative_error = start_error[0] + np.concatenate(([0.0], np.cumsum(errors)))
    logger.debug(f"Moment table for alpha={alpha}: {panels.shape[1]} zero-aligned panels on [{lower}, {upper}]")
    return _PanelTable(alpha, mu, breaks, cumulative, cumulative_error, order, tol, depth)


def _reduction_sum(alpha: float, mus: np.ndarray, u: np.ndarray, terms: int) -> Tuple[np.ndarray, np.ndarray]:
    bessels = [bessel_j(alpha + j + 1.0, u) for j in range(terms)]
    total = np.zeros((mus.size, u.size))
    remainder = np.zeros((mus.size, u.size))
    for k, mu in enumerate(mus):
        coefficient = 1.0
        for j in range(terms):
            total[k] += coefficient * np.power(u, mu - j) * bessels[j]
            coefficient *= alpha + 2.0 * j + 1.0 - mu
            if coefficient == 0.0:
                break
        if coefficient != 0.0:
            decay = terms - mu - 0.5
            # |J_nu(t)| <= 0.9 t^(-1/2) once t exceeds nu^2
            remainder[k] = abs(coefficient) * 0.9 * np.power(u, -decay) / max(decay, 0.5)
    return total, remainder


def bessel_moments(order: OrderLike, mus, u, tol: float = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    Power moments M_mu(u) = int_0^u t^mu J_alpha(t) dt.

    Args:
        order: Bessel order alpha
        mus: Exponents mu with alpha + mu + 1 > 0
        u: Nonnegative upper limits

    Returns:
        Tuple of the moments, shaped ``(len(mus), len(u))``, and a per-point
        absolute error estimate shaped ``(len(u),)``
    """
    alpha = as_order(order).alpha
    tol = settings.kernel_tol if tol is None else tol
    mu = np.atleast_1d(np.asarray(mus, dtype=float))
    ua = np.atleast_1d(np.asarray(u, dtype=float))
    if np.any(~np.isfinite(ua)) or np.any(ua < 0):
        raise DomainError("Moment limits must be finite and nonnegative", details={"alpha": alpha})
    if np.any(alpha + mu + 1.0 <= 0):
        raise DomainError(
            "Moment integral diverges at 0 (alpha + mu + 1 <= 0)",
            details={"alpha": alpha, "mus": mu.tolist()},
        )
    lower, upper = settings.series_cutoff, max(settings.lommel_cutoff, settings.series_cutoff + 1.0)
    out = np.zeros((mu.size, ua.size))
    error = np.zeros(ua.size)
    small = ua <= lower
    if small.any():
        out[:, small], error[small] = _series_moments(alpha, mu, ua[small])
    if (~small).any():
        table = _panel_table(
            alpha, tuple(mu.tolist()), lower, upper, settings.gauss_order, tol, settings.panel_max_depth
        )
        middle = ~small & (ua <= upper)
        if middle.any():
            out[:, middle], error[middle] = table.evaluate(ua[middle])
        large = ua > upper
        if large.any():
            terms = max(settings.lommel_terms, int(math.ceil(mu.max())) + 2)
            at_u, rem_u = _reduction_sum(alpha, mu, ua[large], terms)
            at_cut, rem_cut = _reduction_sum(alpha, mu, np.array([upper]), terms)
            out[:, large] = table.cumulative[:, -1:] + at_u - at_cut
            error[large] = table.cumulative_error[-1] + np.max(rem_u + rem_cut, axis=0)
    return out, error


def kernel_limit(order: OrderLike) -> float:
    """Abel limit of int_0^u t^(1/2) J_alpha(t) dt as u -> infinity."""
    alpha = as_order(order).alpha
    return float(math.sqrt(2.0) * special.gamma(alpha / 2.0 + 0.75) / special.gamma(alpha / 2.0 + 0.25))


def kernel_oscillation_bound(order: OrderLike, u) -> np.ndarray:
    """Estimate of sup_{t >= u} |M_{1/2}(t) - L_alpha| used by tail error budgets."""
    alpha = as_order(order).alpha
    ua = np.asarray(u, dtype=float)
    near = (alpha * alpha + 2.0) / np.maximum(ua, 1.0)
    return SQRT_2_OVER_PI * (1.0 + near) + np.where(ua < 1.0 + alpha * alpha, kernel_limit(alpha), 0.0)


def kernel_primitive(order: OrderLike, y: float, x, tol: float = None):
    """
    Kernel primitive K_y^alpha(x) = int_0^x t^(1/2) J_alpha(t y) dt.

    Uses the closed form sqrt(2/pi) sin(x y) / y^(3/2) for alpha = -1/2 and the
    moment machinery (K = y^(-3/2) M_{1/2}(x y)) otherwise.
    """
    alpha = as_order(order).alpha
    if not y > 0 or not math.isfinite(y):
        raise DomainError("Kernel primitive needs y > 0", details={"y": y})
    xa = np.asarray(x, dtype=float)
    scalar = xa.ndim == 0
    xa = np.atleast_1d(xa)
    if np.any(xa < 0):
        raise DomainError("Kernel primitive needs x >= 0", details={"alpha": alpha})
    if alpha == -0.5:
        values = SQRT_2_OVER_PI * np.sin(xa * y) / y ** 1.5
    else:
        moments, _ = bessel_moments(alpha, [0.5], xa * y, tol=tol)
        values = moments[0] / y ** 1.5
    return float(values[0]) if scalar else values


def moment_limit(order: OrderLike, mu: float) -> float:
    """
    Abel limit L_mu of M_mu(u) as u -> infinity.

    L_mu = 2^mu Gamma((alpha + mu + 1)/2) / Gamma((alpha - mu + 1)/2) for
    -alpha - 1 < mu <= 1/2; ``kernel_limit`` is the case mu = 1/2.
    """
    alpha = as_order(order).alpha
    if not -alpha - 1.0 < mu <= 0.5:
        raise DomainError(
            "Moment limit needs -alpha - 1 < mu <= 1/2",
            details={"alpha": alpha, "mu": mu},
        )
    return float(2.0**mu * special.gamma((alpha + mu + 1.0) / 2.0) * special.rgamma((alpha - mu + 1.0) / 2.0))


def moment_remainder(order: OrderLike, mu: float, u, tol: float = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    Remainder D_mu(u) = -int_u^infinity t^mu J_alpha(t) dt (Abel sense at mu = 1/2).

    Above the reduction cutoff the remainder is summed directly from the
    reduction series, so it keeps full relative accuracy for large ``u``.
    Below it, D_mu = M_mu - L_mu when M_mu exists, and otherwise the finite
    part is integrated back from the cutoff over zero-aligned panels.

    Returns:
        Tuple of remainders and absolute error estimates, both shaped like ``u``
    """
    alpha = as_order(order).alpha
    tol = settings.kernel_tol if tol is None else tol
    if not mu <= 0.5:
        raise DomainError("Moment remainder needs mu <= 1/2", details={"alpha": alpha, "mu": mu})
    ua = np.atleast_1d(np.asarray(u, dtype=float))
    if np.any(~np.isfinite(ua)) or np.any(ua < 0):
        raise DomainError("Moment limits must be finite and nonnegative", details={"alpha": alpha})
    out = np.zeros(ua.size)
    error = np.zeros(ua.size)
    upper = max(settings.lommel_cutoff, settings.series_cutoff + 1.0)
    terms = max(settings.lommel_terms, 2)
    mu_array = np.array([mu])
    far = ua > upper
    if far.any():
        with np.errstate(over="ignore", under="ignore"):
            total, remainder = _reduction_sum(alpha, mu_array, ua[far], terms)
        out[far] = total[0]
        error[far] = remainder[0]
    near = ~far
    if not near.any():
        return out, error
    if alpha + mu + 1.0 > 0:
        moments, err = bessel_moments(alpha, mu_array, ua[near], tol=tol)
        out[near] = moments[0] - moment_limit(alpha, mu)
        error[near] = err
        return out, error
    if np.any(ua[near] == 0):
        raise DomainError("Moment remainder diverges at 0 (alpha + mu + 1 <= 0)", details={"alpha": alpha, "mu": mu})
    at_cut, rem_cut = _reduction_sum(alpha, mu_array, np.array([upper]), terms)
    for i in np.nonzero(near)[0]:
        breaks = np.unique(np.concatenate(([ua[i]], bessel_zeros(alpha, ua[i], upper), [upper])))
        panels, panel_err = _adaptive_moments(
            alpha, mu_array, breaks[:-1], breaks[1:], settings.gauss_order, tol, settings.panel_max_depth
        )
        out[i] = at_cut[0, 0] - math.fsum(panels[0])
        error[i] = rem_cut[0, 0] + float(np.sum(panel_err))
    return out, error
