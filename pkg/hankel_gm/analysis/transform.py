"""Hankel transform as a convergence-controlled improper integral.

H_alpha f(y) = int_0^inf f(x) sqrt(xy) J_alpha(xy) dx is assembled from three
parts, each integrated exactly for the data the function carries:

* window cells: the piecewise polynomial in xi = x / x_i integrates against the
  kernel through the power moments M_{k+1/2} at the nodes,
* head (0, x_min): the head power law c x^a through M_{a+1/2}, summed over
  dyadic blocks when the model alternates in sign,
* tail (x_max, inf): the tail power law either in closed form ("direct") or as
  the boundary term against the kernel primitive K_y plus its Stieltjes
  remainder ("integrate-by-parts").

Convergence of the truncated integrals int_M^N is witnessed on a ladder of
(M, N) pairs: the sup-oscillation of the partial integrals beyond each rung
must shrink, otherwise the value is rejected.
"""

import logging
import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from scipy import special

from hankel_gm.analysis.bessel import (
    OrderLike,
    as_order,
    bessel_moments,
    envelope_constant,
    kernel_oscillation_bound,
    moment_remainder,
)
from hankel_gm.analysis.funcrep import (
    Interpolation,
    PowerLaw,
    SampledFunction,
    fit_head,
    fit_tail,
    geometric_grid,
    insert_nodes,
    integrate,
    modulus_view,
    multiply_power,
)
from hankel_gm.analysis.norms import decreasing_rearrangement, distribution_function
from hankel_gm.config.settings import settings as app_settings
from hankel_gm.core.exceptions import ConvergenceError, DomainError
from hankel_gm.schemas import (
    DistributionComparison,
    HardyLittlewoodRanges,
    ParsevalResult,
    ProfileFit,
    RadialParams,
    TruncationProbe,
)

logger = logging.getLogger(__name__)

SQRT_2PI = math.sqrt(2.0 * math.pi)
_BLOCK_DECAY_BITS = 60.0
_MAX_BLOCKS = 600
_TAIL_OCTAVES = 8
_STAGNATION_RATIO = 0.9

Number = Union[float, complex]


class TailMode(str, Enum):
    """How the part of the integral beyond the window is handled."""

    DIRECT = "direct"
    INTEGRATE_BY_PARTS = "integrate-by-parts"

    @classmethod
    def parse(cls, value: Union[str, "TailMode"]) -> "TailMode":
        if isinstance(value, TailMode):
            return value
        text = str(value).strip().lower()
        if text == "ibp":
            return cls.INTEGRATE_BY_PARTS
        return cls(text)


class TransformSettings(BaseModel):
    """Immutable settings of one transform run."""

    model_config = ConfigDict(frozen=True)

    m: Optional[float] = Field(None, gt=0, description="First lower truncation of the ladder")
    n: Optional[float] = Field(None, gt=0, description="First upper truncation of the ladder")
    tail_mode: TailMode = TailMode.INTEGRATE_BY_PARTS
    tol: float = Field(1e-10, gt=0, description="Moment quadrature tolerance")
    y_min_exp: int = -12
    y_max_exp: int = 12
    y_nodes_per_octave: int = Field(8, ge=1)
    ladder_levels: int = Field(4, ge=2)
    ladder_step: float = Field(4.0, gt=0, description="Octaves between ladder rungs")

    @field_validator("tail_mode", mode="before")
    @classmethod
    def _parse_tail_mode(cls, value):
        return TailMode.parse(value)

    @model_validator(mode="after")
    def _check_ranges(self) -> "TransformSettings":
        if self.m is not None and self.n is not None and not self.m < self.n:
            raise ValueError(f"Truncation needs M < N, got M={self.m}, N={self.n}")
        if not self.y_min_exp < self.y_max_exp:
            raise ValueError("y window needs y_min_exp < y_max_exp")
        return self

    @classmethod
    def from_settings(cls, **overrides) -> "TransformSettings":
        """Defaults taken from the application settings, then overridden."""
        values = {
            "tail_mode": app_settings.tail_mode,
            "tol": app_settings.transform_tol,
            "y_min_exp": app_settings.y_min_exp,
            "y_max_exp": app_settings.y_max_exp,
            "y_nodes_per_octave": app_settings.y_nodes_per_octave,
            "ladder_levels": app_settings.ladder_levels,
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def y_grid(self) -> np.ndarray:
        return geometric_grid(
            2.0 ** self.y_min_exp, 2.0 ** self.y_max_exp, 2.0 ** (1.0 / self.y_nodes_per_octave)
        )

    def ladder(self, y: float) -> List[Tuple[float, float]]:
        """Truncation pairs (M_j, N_j), moving outwards by ``ladder_step`` octaves; M_0 < N_0 for every y."""
        m0 = self.m if self.m is not None else 0.5 * min(1.0, 1.0 / y)
        n0 = self.n if self.n is not None else 2.0 * max(1.0, 1.0 / y)
        if not m0 < n0:
            m0, n0 = (m0, 2.0 * m0) if self.m is not None else (0.5 * n0, n0)
        step = 2.0 ** self.ladder_step
        return [(m0 / step ** j, n0 * step ** j) for j in range(self.ladder_levels)]


# -- power-law pieces -------------------------------------------------------------


def _block_count(rate: float) -> int:
    return int(min(_MAX_BLOCKS, math.ceil(_BLOCK_DECAY_BITS / max(rate, 1e-3))))


def _head_integral(model: PowerLaw, alpha: float, y: float, hi: float, tol: float) -> Tuple[Number, float]:
    """int_0^hi c s(x) x^a sqrt(xy) J_alpha(xy) dx for a head model."""
    if model.is_zero or hi <= 0:
        return 0.0, 0.0
    a = model.exponent
    rate = alpha + a + 1.5
    if rate <= 0:
        raise ConvergenceError(
            "Transform integral diverges at 0: head exponent too small for the kernel",
            diagnostics={"alpha": alpha, "head_exponent": a},
        )
    mu = a + 0.5
    scale = model.coefficient * y ** (-a - 1.0)
    if not model.oscillating:
        moments, err = bessel_moments(alpha, [mu], [hi * y], tol=tol)
        return scale * float(moments[0, 0]), abs(scale) * float(err[0])
    top = math.floor(math.log2(hi))
    exponents = np.arange(top - _block_count(rate) + 1, top + 1, dtype=float)
    breaks = np.append(2.0 ** exponents, hi)
    breaks = np.unique(breaks[breaks <= hi])
    moments, err = bessel_moments(alpha, [mu], breaks * y, tol=tol)
    signs = model.sign(np.sqrt(breaks[:-1] * breaks[1:]))
    blocks = signs * np.diff(moments[0])
    # the remaining piece (0, breaks[0]) is charged to the error
    leftover = abs(float(moments[0, 0]))
    value = math.fsum(blocks[::-1])
    return scale * value, abs(scale) * (float(np.sum(err)) + leftover)


def _tail_integral(
    model: PowerLaw, alpha: float, y: float, x: float, mode: TailMode, tol: float
) -> Tuple[Number, float]:
    """int_x^inf c s(t) t^a sqrt(ty) J_alpha(ty) dt for a tail model."""
    if model.is_zero:
        return 0.0, 0.0
    a = model.exponent
    if a >= 0:
        raise ConvergenceError(
            "Transform integral diverges at infinity: tail model does not decay",
            diagnostics={"alpha": alpha, "tail_exponent": a, "coefficient": model.coefficient},
        )
    mu = a + 0.5
    scale = model.coefficient * y ** (-a - 1.0)
    u = x * y
    if model.oscillating:
        return _oscillating_tail(model, alpha, y, x, tol)
    remainder, err = moment_remainder(alpha, mu, [u], tol=tol)
    if mode is TailMode.DIRECT:
        return -scale * float(remainder[0]), abs(scale) * float(err[0])
    # boundary term -f(x) (K_y(x) - K_y(inf)) sqrt(y) plus the Stieltjes remainder
    primitive, primitive_err = moment_remainder(alpha, 0.5, [u], tol=tol)
    boundary = -model.coefficient * x ** a * float(primitive[0]) / y
    stieltjes = scale * (u ** a * float(primitive[0]) - float(remainder[0]))
    error = abs(scale) * (u ** a * float(primitive_err[0]) + float(err[0]))
    return boundary + stieltjes, error


def _oscillating_tail(model: PowerLaw, alpha: float, y: float, x: float, tol: float) -> Tuple[Number, float]:
    """Dyadic-sign tail: sum_n (-1)^n [D(2^(n+1) y) - D(2^n y)] rearranged to converge absolutely."""
    a = model.exponent
    mu = a + 0.5
    scale = model.coefficient * y ** (-a - 1.0)
    n0 = math.ceil(math.log2(x))
    edge = 2.0 ** n0
    count = _block_count(-a)
    ns = np.arange(n0, n0 + count + 1)
    points = np.concatenate(([x * y], edge * y * 2.0 ** (ns - n0)))
    remainders, err = moment_remainder(alpha, mu, points, tol=tol)
    d_x, d = remainders[0], remainders[1:]
    signs = np.where(ns % 2 == 0, 1.0, -1.0)
    total = -signs[0] * d[0] - 2.0 * math.fsum((signs[1:] * d[1:])[::-1])
    if x < edge:
        total += float(model.sign(x)) * (d[0] - d_x)
    leftover = 2.0 * abs(float(d[-1]))
    return scale * total, abs(scale) * (float(np.sum(err)) * 2.0 + leftover)


# -- per-y sums -------------------------------------------------------------------


def _interpolation_deviation(f: SampledFunction) -> Tuple[int, np.ndarray]:
    """
    Number of moments per cell and the coefficient deviation that measures interpolation error.

    Cubic cells are compared with linear ones, the difference damped by h^2
    (h = cell ratio - 1); linear cells are compared with cubic ones.
    Constant-left cells are exact step functions and carry no deviation.
    """
    if f.interp is Interpolation.CUBIC:
        h = f.grid[1:] / f.grid[:-1] - 1.0
        deviation = (f.cell_coefficients - f.coefficients_as(Interpolation.LINEAR)) * (h * h)[:, None]
        return 4, deviation
    if f.interp is Interpolation.LINEAR:
        return 4, f.coefficients_as(Interpolation.CUBIC) - f.cell_coefficients
    return 1, np.zeros((f.grid.size - 1, 1), dtype=f.values.dtype)


@dataclass(frozen=True)
class _Plan:
    """Everything about f that does not depend on y."""

    f: SampledFunction
    alpha: float
    coefficients: np.ndarray
    deviation: np.ndarray
    mus: np.ndarray
    mode: TailMode
    tol: float

    @classmethod
    def build(cls, f: SampledFunction, order: OrderLike, settings: "TransformSettings") -> "_Plan":
        alpha = as_order(order).alpha
        size, deviation = _interpolation_deviation(f)
        if f.head is None:
            logger.warning("Head model unknown: the integral over (0, x_min) is taken as 0")
        if f.tail is None:
            logger.warning("Tail model unknown: only the integrated-by-parts boundary term is kept beyond x_max")
        return cls(
            f=f,
            alpha=alpha,
            coefficients=f.cell_coefficients[:, :size],
            deviation=deviation,
            mus=np.arange(size) + 0.5,
            mode=settings.tail_mode,
            tol=settings.tol,
        )

    def head(self, y: float, hi: float) -> Tuple[Number, float]:
        if self.f.head is None:
            return 0.0, 0.0
        return _head_integral(self.f.head, self.alpha, y, hi, self.tol)

    def tail(self, y: float, x: float) -> Tuple[Number, float]:
        if self.f.tail is not None:
            return _tail_integral(self.f.tail, self.alpha, y, x, self.mode, self.tol)
        edge = complex(self.f.left_limits[-1]) if self.f.is_complex else float(self.f.left_limits[-1])
        bound = float(kernel_oscillation_bound(self.alpha, x * y)) * abs(edge) / y
        if self.mode is TailMode.DIRECT or edge == 0:
            return 0.0, bound
        primitive, _ = moment_remainder(self.alpha, 0.5, [x * y], tol=self.tol)
        return -edge * float(primitive[0]) / y, bound


@dataclass
class _KernelSums:
    """Partial integrals S(x) = int_0^x f k_y for one y."""

    plan: _Plan
    y: float
    node_moments: np.ndarray
    prefix: np.ndarray
    total: Number
    error: float

    def _window(self, x: np.ndarray) -> np.ndarray:
        f = self.plan.f
        index = np.clip(np.searchsorted(f.grid, x, side="right") - 1, 0, f.grid.size - 2)
        moments, _ = bessel_moments(self.plan.alpha, self.plan.mus, x * self.y, tol=self.plan.tol)
        u0 = f.grid[index] * self.y
        powers = np.power(u0[None, :], -np.arange(self.plan.mus.size)[:, None])
        delta = moments - self.node_moments[:, index]
        partial = np.sum(self.plan.coefficients[index].T * powers * delta, axis=0) / self.y
        return self.prefix[index] + partial

    def partial(self, x) -> np.ndarray:
        """S at each x >= 0 (``inf`` gives the full integral)."""
        f = self.plan.f
        xa = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.zeros(xa.shape, dtype=self.prefix.dtype)
        for i in np.nonzero(xa < f.x_min)[0]:
            out[i] = self.plan.head(self.y, xa[i])[0]
        inside = (xa >= f.x_min) & (xa <= f.x_max)
        if inside.any():
            out[inside] = self._window(xa[inside])
        for i in np.nonzero(xa > f.x_max)[0]:
            out[i] = self.total if math.isinf(xa[i]) else self.total - self.plan.tail(self.y, xa[i])[0]
        return out


def _kernel_sums(plan: _Plan, y: float) -> _KernelSums:
    f = plan.f
    u = f.grid * y
    moments, err = bessel_moments(plan.alpha, plan.mus, u, tol=plan.tol)
    powers = np.power(u[:-1][None, :], -np.arange(plan.mus.size)[:, None])
    weighted = plan.coefficients.T * powers
    steps = np.diff(moments, axis=1)
    cells = np.sum(weighted * steps, axis=0) / y
    cell_error = float(np.sum(np.sum(np.abs(weighted), axis=0) * (err[:-1] + err[1:]))) / y
    cell_error += float(np.sum(np.abs(np.sum(plan.deviation.T * powers * steps, axis=0)))) / y
    head, head_error = plan.head(y, f.x_min)
    tail, tail_error = plan.tail(y, f.x_max)
    prefix = head + np.concatenate(([0.0], np.cumsum(cells)))
    total = prefix[-1] + tail
    return _KernelSums(plan, y, moments, prefix, total, cell_error + head_error + tail_error)


def _spread(values: np.ndarray) -> float:
    values = np.asarray(values)
    if values.size == 0:
        return 0.0
    if np.iscomplexobj(values):
        return float(np.ptp(values.real) + np.ptp(values.imag))
    return float(np.ptp(values))


def _cauchy_ladder(sums: _KernelSums, ladder: Sequence[Tuple[float, float]]) -> List[float]:
    """Sup-oscillation of S over (0, M_j] plus over [N_j, inf] for each rung."""
    f = sums.plan.f
    octaves = 2.0 ** np.arange(1, _TAIL_OCTAVES + 1)
    cauchy = []
    for m, n in ladder:
        low_points = np.concatenate(([m], m / octaves)) if m < f.x_min else np.array([m])
        low = np.concatenate(([0.0], sums.prefix[f.grid <= m], sums.partial(low_points)))
        high_points = np.concatenate(([n], max(n, f.x_max) * octaves))
        high = np.concatenate((sums.prefix[f.grid >= n], sums.partial(high_points), [sums.total]))
        cauchy.append(_spread(low) + _spread(high))
    return cauchy


def _stagnant(cauchy: Sequence[float], scale: float, tol: float) -> bool:
    return cauchy[-1] > _STAGNATION_RATIO * cauchy[0] and cauchy[-1] > tol * max(scale, 1e-300)


def hankel_values(
    f: SampledFunction,
    order: OrderLike,
    y,
    settings: Optional[TransformSettings] = None,
    *,
    witness: bool = True,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    H_alpha f at arbitrary y > 0 with per-value error estimates.

    Args:
        f: Sampled function with head and tail models
        order: Bessel order alpha >= -1/2
        y: Evaluation points
        settings: Transform settings (application defaults when omitted)
        witness: Check the truncation ladder at every y

    Returns:
        Tuple of values and absolute error estimates, shaped like ``y``. The
        estimate adds the moment quadrature bound, the interpolation deviation
        of the cells, the model error and the tolerance share of the last
        rung's Cauchy difference.

    Raises:
        ConvergenceError: If a model integral diverges or the ladder stagnates
    """
    settings = settings or TransformSettings.from_settings()
    ya = np.atleast_1d(np.asarray(y, dtype=float))
    if np.any(~np.isfinite(ya)) or np.any(ya <= 0):
        raise DomainError("Transform points must be positive and finite")
    plan = _Plan.build(f, order, settings)
    values = np.zeros(ya.shape, dtype=complex if f.is_complex else float)
    errors = np.zeros(ya.shape)
    for i, point in enumerate(ya):
        sums = _kernel_sums(plan, float(point))
        values[i] = sums.total
        errors[i] = sums.error
        if witness and np.any(sums.prefix != 0):
            cauchy = _cauchy_ladder(sums, settings.ladder(float(point)))
            scale = float(np.max(np.abs(sums.prefix)))
            if _stagnant(cauchy, scale, settings.tol):
                raise ConvergenceError(
                    f"Truncated integrals do not settle at y={point}",
                    diagnostics={"alpha": plan.alpha, "y": float(point), "cauchy": cauchy},
                )
            # what lies beyond the last rung is carried by the models at the quadrature tolerance
            errors[i] += settings.tol * cauchy[-1]
    return values, errors


def _transform_on_grid(
    f: SampledFunction, order: OrderLike, settings: Optional[TransformSettings], kind: str
) -> SampledFunction:
    settings = settings or TransformSettings.from_settings()
    alpha = as_order(order).alpha
    ys = settings.y_grid()
    values, errors = hankel_values(f, alpha, ys, settings)
    logger.info(f"{kind} transform of order {alpha} on {ys.size} points, max error estimate {errors.max():.3g}")
    metadata = {"transform": kind, "alpha": alpha, "tail_mode": settings.tail_mode.value, "error_estimate": errors}
    return _on_y_grid(ys, values, metadata)


def hankel_transform(
    f: SampledFunction, order: OrderLike, settings: Optional[TransformSettings] = None
) -> SampledFunction:
    """
    H_alpha f on the settings' y grid.

    The result is piecewise cubic with fitted head/tail models, and its
    ``metadata['error_estimate']`` holds the per-node error estimates.
    """
    return _transform_on_grid(f, order, settings, "hankel")


def hankel_inverse(
    F: SampledFunction, order: OrderLike, settings: Optional[TransformSettings] = None
) -> SampledFunction:
    """Inverse transform; the kernel is self-inverse, so this is H_alpha applied to F."""
    return _transform_on_grid(F, order, settings, "inverse")


def truncation_probe(
    f: SampledFunction,
    order: OrderLike,
    y: float,
    ladder: Optional[Sequence[Tuple[float, float]]] = None,
    settings: Optional[TransformSettings] = None,
) -> TruncationProbe:
    """
    Partial integrals int_M^N f(x) sqrt(xy) J_alpha(xy) dx along a truncation ladder.

    ``head_terms`` bound int_0^M |f| |k_y| by the Bessel envelope and
    ``tail_terms`` are |int_N^inf f k_y|. Partials of complex data are reported
    by their real part. Stagnation is logged, not raised.
    """
    settings = settings or TransformSettings.from_settings()
    if not y > 0 or not math.isfinite(y):
        raise DomainError("Truncation ladder needs y > 0", details={"y": y})
    plan = _Plan.build(f, order, settings)
    rungs = list(ladder) if ladder is not None else settings.ladder(y)
    if any(not 0 < m < n for m, n in rungs):
        raise DomainError("Truncation ladder needs 0 < M < N", details={"ladder": rungs})
    sums = _kernel_sums(plan, y)
    ms = np.array([m for m, _ in rungs])
    ns = np.array([n for _, n in rungs])
    partials = sums.partial(ns) - sums.partial(ms)
    cauchy = _cauchy_ladder(sums, rungs)
    head_terms = _head_bounds(f, plan.alpha, y, ms)
    tail_terms = np.abs(sums.total - sums.partial(ns))
    scale = float(np.max(np.abs(sums.prefix))) if sums.prefix.size else 0.0
    converging = not _stagnant(cauchy, scale, settings.tol)
    if not converging:
        logger.warning(f"Truncation ladder at y={y} is not settling: {cauchy}")
    return TruncationProbe(
        alpha=plan.alpha,
        y=y,
        ladder=[(float(m), float(n)) for m, n in rungs],
        partials=[float(np.real(v)) for v in partials],
        cauchy=cauchy,
        head_terms=[float(v) for v in head_terms],
        tail_terms=[float(v) for v in tail_terms],
        converging=converging,
    )


def _head_bounds(f: SampledFunction, alpha: float, y: float, ms: np.ndarray) -> np.ndarray:
    """int_0^M |f(x)| C min((xy)^(alpha+1/2), 1) dx for each M."""
    modulus = modulus_view(f)
    if modulus.head is None:
        modulus = replace(modulus, head=PowerLaw.zero())
    constant = envelope_constant(alpha, geometric_grid(2.0 ** -10, 2.0 ** 10, 2.0 ** 0.25))
    knee = 1.0 / y
    bounds = []
    for m in ms:
        near = y ** (alpha + 0.5) * integrate(modulus, 0.0, min(m, knee), alpha + 0.5)
        far = integrate(modulus, knee, m) if m > knee else 0.0
        bounds.append(constant * (near + far))
    return np.array(bounds)


# -- Parseval -------------------------------------------------------------------


_PAIRING_ORDER = 4
_PAIRING_NEGLIGIBLE = 1e-15


def _pairing(f: SampledFunction, h: Callable[[np.ndarray], Tuple[np.ndarray, np.ndarray]]) -> Tuple[Number, float]:
    """int_0^inf f h by Gauss-Legendre on the cells and dyadic model blocks of f."""
    nodes, weights = special.roots_legendre(_PAIRING_ORDER)
    lows, highs, models = [], [], []
    magnitude = np.maximum(np.abs(f.values[:-1]), np.abs(f.left_limits[1:]))
    weight = magnitude * np.diff(f.grid)
    total_weight = float(weight.sum())
    if total_weight == 0.0:
        return 0.0, 0.0
    keep = weight > _PAIRING_NEGLIGIBLE * total_weight
    lows.append(f.grid[:-1][keep])
    highs.append(f.grid[1:][keep])
    models.append(np.full(int(keep.sum()), None, dtype=object))
    blocks = 2.0 ** np.arange(1, 61)
    if f.head is not None and not f.head.is_zero:
        lo, hi = f.x_min / blocks, f.x_min / blocks * 2.0
        mass = np.array([f.head.power_integral(1.0, 0.0, a, b) for a, b in zip(lo, hi)])
        take = mass > _PAIRING_NEGLIGIBLE * total_weight
        lows.append(lo[take])
        highs.append(hi[take])
        models.append(np.full(int(take.sum()), f.head, dtype=object))
    if f.tail is not None and not f.tail.is_zero:
        lo, hi = f.x_max * blocks / 2.0, f.x_max * blocks
        mass = np.array([f.tail.power_integral(1.0, 0.0, a, b) for a, b in zip(lo, hi)])
        take = mass > _PAIRING_NEGLIGIBLE * total_weight
        lows.append(lo[take])
        highs.append(hi[take])
        models.append(np.full(int(take.sum()), f.tail, dtype=object))
    lo, hi = np.concatenate(lows), np.concatenate(highs)
    owners = np.concatenate(models)
    half = 0.5 * (hi - lo)
    points = 0.5 * (hi + lo)[:, None] + half[:, None] * nodes[None, :]
    fx = np.zeros(points.shape, dtype=f.values.dtype)
    window = np.array([o is None for o in owners], dtype=bool)
    if window.any():
        fx[window] = f.evaluate(points[window].ravel()).reshape(-1, _PAIRING_ORDER)
    for i in np.nonzero(~window)[0]:
        fx[i] = owners[i](points[i])
    hx, herr = h(points.ravel())
    hx = hx.reshape(points.shape)
    herr = herr.reshape(points.shape)
    value = np.sum((fx * hx) @ weights * half)
    budget = float(np.sum((np.abs(fx) * herr) @ weights * half))
    return (complex(value) if np.iscomplexobj(value) else float(value)), budget


def parseval_check(
    f: SampledFunction,
    G: SampledFunction,
    order: OrderLike,
    settings: Optional[TransformSettings] = None,
) -> ParsevalResult:
    """
    Parseval's formula int f g = int F G with F = H_alpha f and g = H_alpha G.

    Both transforms are evaluated exactly at the quadrature points of the
    other function, so the residual measures quadrature error only.
    """
    if f.is_complex or G.is_complex:
        raise DomainError("Parseval check needs real-valued functions")
    settings = settings or TransformSettings.from_settings()
    alpha = as_order(order).alpha

    def transform_of(source: SampledFunction):
        return lambda points: hankel_values(source, alpha, points, settings, witness=False)

    lhs, lhs_budget = _pairing(f, transform_of(G))
    rhs, rhs_budget = _pairing(G, transform_of(f))
    residual = abs(lhs - rhs)
    budget = lhs_budget + rhs_budget + settings.tol * (abs(lhs) + abs(rhs))
    logger.info(f"Parseval check (alpha={alpha}): lhs={lhs:.12g}, rhs={rhs:.12g}, residual={residual:.3g}")
    return ParsevalResult(lhs=float(lhs), rhs=float(rhs), residual=float(residual), budget=budget)


# -- Fourier on the line -----------------------------------------------------------


@dataclass(frozen=True)
class LineSamples:
    """
    A function on the real line as two profiles on the same positive grid.

    ``positive`` holds x -> f(x) and ``negative`` holds x -> f(-x) for x > 0.
    """

    positive: SampledFunction
    negative: SampledFunction

    def __post_init__(self) -> None:
        if not np.array_equal(self.positive.grid, self.negative.grid):
            raise DomainError("Both halves of a line function need the same grid")

    @classmethod
    def from_callable(
        cls,
        f: Callable[[np.ndarray], np.ndarray],
        x_min: Optional[float] = None,
        x_max: Optional[float] = None,
        ratio: Optional[float] = None,
        *,
        jumps: Sequence[float] = (),
        interp: Interpolation = Interpolation.CUBIC,
    ) -> "LineSamples":
        """Sample f at +-x on a geometric grid with the jumps |j| inserted as nodes."""
        x_min = 2.0 ** app_settings.window_min_exp if x_min is None else x_min
        x_max = 2.0 ** app_settings.window_max_exp if x_max is None else x_max
        ratio = 2.0 ** (1.0 / app_settings.nodes_per_octave) if ratio is None else ratio
        grid = geometric_grid(x_min, x_max, ratio)
        absolute_jumps = [abs(j) for j in jumps if j != 0]
        if absolute_jumps:
            grid = insert_nodes(grid, absolute_jumps)
        # left limits are taken one ulp toward the origin, at declared jumps only
        halves = []
        for sign, name in ((1.0, "positive"), (-1.0, "negative")):
            values = np.asarray(f(sign * grid))
            left_values = None
            at_jump = np.isin(grid, [abs(j) for j in jumps if sign * j > 0])
            if at_jump.any():
                left_values = values.copy()
                left_values[at_jump] = np.asarray(f(np.nextafter(sign * grid[at_jump], 0.0)))
            half = SampledFunction(
                grid=grid,
                values=values,
                interp=interp,
                left_values=left_values,
                metadata={"half": name, "ratio": ratio},
            )
            halves.append(_with_fitted_models(half))
        return cls(halves[0], halves[1])

    def _combine(self, sign: float, name: str) -> SampledFunction:
        values = 0.5 * (self.positive.values + sign * self.negative.values)
        left = 0.5 * (self.positive.left_limits + sign * self.negative.left_limits)
        part = SampledFunction(
            grid=self.positive.grid,
            values=values,
            interp=self.positive.interp,
            left_values=None if np.array_equal(left, values) else left,
            metadata={"part": name},
        )
        return _with_fitted_models(part)

    def even_part(self) -> SampledFunction:
        return self._combine(1.0, "even")

    def odd_part(self) -> SampledFunction:
        return self._combine(-1.0, "odd")


def _with_fitted_models(f: SampledFunction) -> SampledFunction:
    return SampledFunction(
        grid=f.grid,
        values=f.values,
        interp=f.interp,
        left_values=f.left_values,
        head=fit_head(f),
        tail=fit_tail(f),
        source=f.source,
        metadata=f.metadata,
    )


def _on_y_grid(ys: np.ndarray, values: np.ndarray, metadata: dict) -> SampledFunction:
    return _with_fitted_models(SampledFunction(grid=ys, values=values, interp=Interpolation.CUBIC, metadata=metadata))


def fourier_1d(
    f: Union[LineSamples, Callable[[np.ndarray], np.ndarray]],
    settings: Optional[TransformSettings] = None,
    **sampling,
) -> LineSamples:
    """
    Fourier transform f^(y) = int_R f(x) e^(ixy) dx on the y grid.

    With f_e, f_o the even and odd parts,
    f^(y) = sqrt(2 pi) (H_{-1/2} f_e(y) + i H_{1/2} f_o(y)) and
    f^(-y) = sqrt(2 pi) (H_{-1/2} f_e(y) - i H_{1/2} f_o(y)) for y > 0.
    Callables are sampled with ``LineSamples.from_callable(**sampling)``.
    """
    settings = settings or TransformSettings.from_settings()
    line = f if isinstance(f, LineSamples) else LineSamples.from_callable(f, **sampling)
    ys = settings.y_grid()
    cosine, cos_err = hankel_values(line.even_part(), -0.5, ys, settings)
    sine, sin_err = hankel_values(line.odd_part(), 0.5, ys, settings)
    errors = SQRT_2PI * (cos_err + sin_err)
    positive = SQRT_2PI * (cosine + 1j * sine)
    negative = SQRT_2PI * (cosine - 1j * sine)
    metadata = {"transform": "fourier", "error_estimate": errors}
    return LineSamples(
        _on_y_grid(ys, positive, {**metadata, "half": "positive"}),
        _on_y_grid(ys, negative, {**metadata, "half": "negative"}),
    )


def radial_fourier(
    f0: SampledFunction, n: int, settings: Optional[TransformSettings] = None
) -> SampledFunction:
    """
    Radial profile of the n-dimensional Fourier transform of x -> f0(|x|).

    f^(y) = (2 pi)^(n/2) |y|^(-(n-1)/2) H_{n/2-1}[s^((n-1)/2) f0(s)](|y|).
    """
    if int(n) != n or n < 1:
        raise DomainError("Dimension must be a positive integer", details={"n": n})
    settings = settings or TransformSettings.from_settings()
    shift = (n - 1) / 2.0
    alpha = n / 2.0 - 1.0
    lifted = multiply_power(f0, shift)
    ys = settings.y_grid()
    values, errors = hankel_values(lifted, alpha, ys, settings)
    factor = (2.0 * math.pi) ** (n / 2.0) * np.power(ys, -shift)
    return _on_y_grid(ys, factor * values, {"transform": "radial-fourier", "dimension": int(n),
                                           "error_estimate": factor * errors})


# -- radial corollary parameters --------------------------------------------------


def hardy_littlewood_ranges(n: int) -> HardyLittlewoodRanges:
    """q-ranges of the plain (beta = 0) and weighted (gamma = 0) radial inequalities."""
    if int(n) != n or n < 1:
        raise DomainError("Dimension must be a positive integer", details={"n": n})
    weighted_upper = math.inf if n == 1 else 2.0 * n / (n - 1)
    return HardyLittlewoodRanges(n=int(n), plain=(2.0 * n / (n + 1), math.inf), weighted=(1.0, weighted_upper))


def radial_weight_params(n: int, q: float, beta: float) -> RadialParams:
    """
    gamma = beta + n - 2n/q and the admissibility n/q - (n+1)/2 < beta < n/q.

    Inadmissible beta is reported with ``violated`` set to "lower" or "upper".

    Raises:
        DomainError: If n is not a positive integer or q is outside (1, inf)
    """
    if int(n) != n or n < 1:
        raise DomainError("Dimension must be a positive integer", details={"n": n})
    if not 1.0 < q < math.inf:
        raise DomainError("Radial exponent needs 1 < q < inf", details={"q": q})
    lower = n / q - (n + 1) / 2.0
    upper = n / q
    violated = None
    if beta <= lower:
        violated = "lower"
    elif beta >= upper:
        violated = "upper"
    ranges = hardy_littlewood_ranges(n)
    return RadialParams(
        n=int(n),
        q=q,
        beta=beta,
        gamma=beta + n - 2.0 * n / q,
        lower=lower,
        upper=upper,
        admissible=violated is None,
        violated=violated,
        hardy_littlewood_plain=ranges.plain[0] < q < ranges.plain[1],
        hardy_littlewood_weighted=ranges.weighted[0] < q < ranges.weighted[1],
    )


# -- majorants ---------------------------------------------------------------------


def pointwise_bound_profile(
    f: SampledFunction,
    F: Optional[SampledFunction],
    order: OrderLike,
    lam: float = 2.0,
    settings: Optional[TransformSettings] = None,
) -> ProfileFit:
    """
    |F(y)| over y^(alpha+1/2) int_0^(1/y) x^(alpha+1/2) |f| + y^(-1) int_(1/(lam y))^inf |f|/x.

    The fitted constant is the largest ratio over the y nodes of F.
    """
    alpha = as_order(order).alpha
    F = F if F is not None else hankel_transform(f, alpha, settings)
    modulus = modulus_view(f)
    ys, ratios = [], []
    for y, value in zip(F.grid, np.abs(F.values)):
        near = y ** (alpha + 0.5) * integrate(modulus, 0.0, 1.0 / y, alpha + 0.5)
        far = integrate(modulus, 1.0 / (lam * y), math.inf, -1.0) / y
        majorant = near + far
        if majorant == 0 or not math.isfinite(majorant):
            continue
        ys.append(float(y))
        ratios.append(float(value / majorant))
    return ProfileFit(ys=ys, ratios=ratios)


def calderon_profile(f: SampledFunction, F: SampledFunction) -> ProfileFit:
    """F*(y) over int_0^(1/y) f* + y^(-2) int_(1/y)^inf f*(x)/x^2 at the y nodes of F."""
    f_star = decreasing_rearrangement(f)
    F_star = decreasing_rearrangement(F)
    ys, ratios = [], []
    for y in F.grid:
        near = integrate(f_star, 0.0, 1.0 / y)
        far = integrate(f_star, 1.0 / y, math.inf, -2.0) / (y * y)
        majorant = near + far
        if majorant == 0 or not math.isfinite(majorant):
            continue
        ys.append(float(y))
        ratios.append(float(F_star(y)) / majorant)
    return ProfileFit(ys=ys, ratios=ratios)


def even_part_distribution_check(line: LineSamples, levels=None) -> DistributionComparison:
    """d_{f_e}(s) / d_f(s) on the line at the given levels (default: 100 levels below sup|f|)."""
    even = line.even_part()
    peak = float(max(np.max(np.abs(line.positive.values)), np.max(np.abs(line.negative.values))))
    if levels is None:
        levels = peak * np.geomspace(1e-4, 1.0, 100, endpoint=False) if peak > 0 else np.array([1.0])
    levels = np.asarray(levels, dtype=float)
    even_measure = 2.0 * np.asarray(distribution_function(even, levels), dtype=float)
    measure = np.asarray(distribution_function(line.positive, levels), dtype=float) + np.asarray(
        distribution_function(line.negative, levels), dtype=float
    )
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(measure > 0, even_measure / measure, np.where(even_measure > 0, np.inf, 0.0))
    return DistributionComparison(levels=levels.tolist(), ratios=ratios.tolist())
