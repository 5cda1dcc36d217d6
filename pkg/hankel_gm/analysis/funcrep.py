"""Function representations on (0, inf): analytic descriptors, sampled grids,
integration, total variation and the even/odd split of functions on the line."""

import csv
import json
import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cached_property
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy import special

from hankel_gm.config.settings import settings
from hankel_gm.core.exceptions import DomainError, ReportIOError, SamplingError

logger = logging.getLogger(__name__)

Number = Union[float, complex]


class Interpolation(str, Enum):
    """Rule that turns node values into a function on each cell."""

    CONSTANT_LEFT = "piecewise-constant-left"
    LINEAR = "piecewise-linear"
    CUBIC = "piecewise-cubic"

    @property
    def degree(self) -> int:
        return {"piecewise-constant-left": 0, "piecewise-linear": 1, "piecewise-cubic": 3}[self.value]


def _dyadic_index(x: np.ndarray, side: str = "right") -> np.ndarray:
    """n with x in [2^n, 2^(n+1)) (right) or (2^n, 2^(n+1)] (left)."""
    logs = np.log2(x)
    if side == "left":
        return np.ceil(logs) - 1.0
    return np.floor(logs)


def _power_difference(lo: float, hi: float, exponent: float) -> float:
    """int_lo^hi x^(exponent - 1) dx with the infinite cases resolved."""
    if lo == hi:
        return 0.0
    if exponent == 0.0:
        return math.inf if lo == 0.0 or math.isinf(hi) else math.log(hi / lo)
    if exponent > 0.0:
        if math.isinf(hi):
            return math.inf
        return (hi ** exponent - lo ** exponent) / exponent
    if lo == 0.0:
        return math.inf
    upper = 0.0 if math.isinf(hi) else hi ** exponent
    return (lo ** exponent - upper) / -exponent


@dataclass(frozen=True)
class PowerLaw:
    """
    Model c * s(x) * x^a of a function near 0 (head) or near infinity (tail).

    With ``oscillating`` the sign s(x) alternates on dyadic blocks
    [2^n, 2^(n+1)) as (-1)^n; otherwise s = 1. A zero coefficient means the
    function vanishes identically on that side.
    """

    coefficient: float
    exponent: float
    oscillating: bool = False

    @classmethod
    def zero(cls) -> "PowerLaw":
        return cls(0.0, 0.0)

    @property
    def is_zero(self) -> bool:
        return self.coefficient == 0.0

    def sign(self, x, side: str = "right") -> np.ndarray:
        xa = np.asarray(x, dtype=float)
        if not self.oscillating:
            return np.ones_like(xa)
        return np.where(np.mod(_dyadic_index(xa, side), 2.0) == 0.0, 1.0, -1.0)

    def __call__(self, x, side: str = "right") -> np.ndarray:
        xa = np.asarray(x, dtype=float)
        if self.is_zero:
            return np.zeros_like(xa)
        return self.coefficient * self.sign(xa, side) * np.power(xa, self.exponent)

    def magnitude(self, x) -> np.ndarray:
        xa = np.asarray(x, dtype=float)
        return abs(self.coefficient) * np.power(xa, self.exponent)

    def scaled(self, c: float) -> "PowerLaw":
        return PowerLaw(self.coefficient * c, self.exponent, self.oscillating)

    def times_power(self, gamma: float) -> "PowerLaw":
        return PowerLaw(self.coefficient, self.exponent + gamma, self.oscillating)

    def dilated(self, d: float) -> "PowerLaw":
        """Model of x -> f(d x)."""
        coefficient = self.coefficient * d ** self.exponent
        if self.oscillating:
            shift = math.log2(d)
            if abs(shift - round(shift)) < 1e-12 and int(round(shift)) % 2:
                coefficient = -coefficient
        return PowerLaw(coefficient, self.exponent, self.oscillating)

    def absolute(self) -> "PowerLaw":
        return PowerLaw(abs(self.coefficient), self.exponent, False)

    def power_integral(self, q: float, beta: float, lo: float, hi: float) -> float:
        """int_lo^hi (|c| x^a)^q x^beta dx, +inf when divergent."""
        if self.is_zero or lo >= hi:
            return 0.0
        return abs(self.coefficient) ** q * _power_difference(lo, hi, self.exponent * q + beta + 1.0)

    def signed_integral(self, lo: float, hi: float, beta: float = 0.0) -> float:
        """int_lo^hi c s(x) x^(a + beta) dx (nan when divergent and sign-indefinite)."""
        if self.is_zero or lo >= hi:
            return 0.0
        e = self.exponent + beta + 1.0
        if not self.oscillating:
            value = _power_difference(lo, hi, e)
            return self.coefficient * value
        if (lo == 0.0 and e <= 0.0) or (math.isinf(hi) and e >= 0.0):
            return math.nan
        return self.coefficient * _dyadic_signed(lo, hi, e)

    def variation(self, lo: float, hi: float) -> float:
        """Total variation of the model on (lo, hi], dyadic sign jumps included."""
        if self.is_zero or lo >= hi:
            return 0.0
        c, a = abs(self.coefficient), self.exponent
        if not self.oscillating:
            if a == 0.0:
                return 0.0
            if (lo == 0.0 and a < 0.0) or (math.isinf(hi) and a > 0.0):
                return math.inf
            lo_value = 0.0 if lo == 0.0 else lo ** a
            hi_value = 0.0 if math.isinf(hi) else hi ** a
            return c * abs(lo_value - hi_value)
        return c * _dyadic_variation(lo, hi, a)

    def sup_weighted(self, gamma: float, lo: float, hi: float) -> float:
        """sup over (lo, hi) of |c| x^(a + gamma)."""
        if self.is_zero or lo >= hi:
            return 0.0
        e = self.exponent + gamma
        if e > 0.0:
            return math.inf if math.isinf(hi) else abs(self.coefficient) * hi ** e
        if e < 0.0:
            return math.inf if lo == 0.0 else abs(self.coefficient) * lo ** e
        return abs(self.coefficient)

    def measure_above(self, s, lo: float, hi: float) -> np.ndarray:
        """|{x in (lo, hi) : |c| x^a > s}| for each level s."""
        sa = np.asarray(s, dtype=float)
        if self.is_zero or lo >= hi:
            return np.zeros_like(sa)
        c, a = abs(self.coefficient), self.exponent
        with np.errstate(divide="ignore", over="ignore"):
            if a == 0.0:
                return np.where(c > sa, hi - lo, 0.0)
            crossing = np.power(np.maximum(sa, 0.0) / c, 1.0 / a)
            if a < 0.0:
                crossing = np.where(sa <= 0.0, np.inf, crossing)
                return np.clip(crossing, lo, hi) - lo
            crossing = np.where(sa <= 0.0, 0.0, crossing)
            return hi - np.clip(crossing, lo, hi)

    def to_dict(self) -> Dict[str, Any]:
        return {"coefficient": self.coefficient, "exponent": self.exponent, "oscillating": self.oscillating}

    @classmethod
    def from_dict(cls, data: Optional[Dict[str, Any]]) -> Optional["PowerLaw"]:
        if data is None:
            return None
        return cls(float(data["coefficient"]), float(data["exponent"]), bool(data.get("oscillating", False)))


def _block_integral(n: float, e: float) -> float:
    """int over [2^n, 2^(n+1)] of x^(e-1)."""
    if e == 0.0:
        return math.log(2.0)
    return 2.0 ** (n * e) * (2.0 ** e - 1.0) / e


def _dyadic_signed(lo: float, hi: float, e: float) -> float:
    """int_lo^hi (-1)^floor(log2 x) x^(e-1) dx for the dyadic sign pattern."""

    def sgn(n: float) -> float:
        return 1.0 if int(n) % 2 == 0 else -1.0

    total = 0.0
    if lo == 0.0:
        top = math.floor(math.log2(hi))
        # blocks n < top sum geometrically
        total += sgn(top - 1) * _block_integral(top - 1, e) / (1.0 + 2.0 ** -e)
        lo = 2.0 ** top
    if math.isinf(hi):
        bottom = math.ceil(math.log2(lo))
        total += sgn(bottom) * _block_integral(bottom, e) / (1.0 + 2.0 ** e)
        hi = 2.0 ** bottom
    n = math.floor(math.log2(lo))
    while lo < hi:
        end = min(hi, 2.0 ** (n + 1))
        total += sgn(n) * _power_difference(lo, end, e)
        lo = end
        n += 1
    return total


def _dyadic_variation(lo: float, hi: float, a: float) -> float:
    """Variation of (-1)^floor(log2 x) x^a on (lo, hi]."""

    def block(n: float) -> float:
        # monotone part on [2^n, 2^(n+1)) plus the sign jump at 2^(n+1)
        return 2.0 ** (n * a) * abs(1.0 - 2.0 ** a) + 2.0 * 2.0 ** ((n + 1) * a)

    total = 0.0
    if lo == 0.0:
        if a <= 0.0:
            return math.inf
        top = math.floor(math.log2(hi))
        total += block(top - 1) / (1.0 - 2.0 ** -a)
        lo = 2.0 ** top
    if math.isinf(hi):
        if a >= 0.0:
            return math.inf
        bottom = math.ceil(math.log2(lo))
        total += block(bottom) / (1.0 - 2.0 ** a)
        hi = 2.0 ** bottom
    n = math.floor(math.log2(lo))
    while lo < hi:
        end = min(hi, 2.0 ** (n + 1))
        total += abs(lo ** a - end ** a)
        if end == 2.0 ** (n + 1) and end <= hi:
            total += 2.0 * end ** a
        lo = end
        n += 1
    return total


_BINOMIAL_SHIFT = np.array(
    [[special.comb(k, j) * (-1.0) ** (k - j) if k >= j else 0.0 for k in range(4)] for j in range(4)]
)


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """
    A function on (0, inf) given by node values on a strictly increasing grid.

    ``values`` are right limits at the nodes, ``left_values`` (optional) the
    left limits, so jumps at nodes are represented exactly. Outside the grid
    the ``head`` and ``tail`` power-law models apply; ``None`` means unknown
    and is treated as zero with a logged warning wherever it matters.
    """

    grid: np.ndarray
    values: np.ndarray
    interp: Interpolation = Interpolation.LINEAR
    left_values: Optional[np.ndarray] = None
    head: Optional[PowerLaw] = None
    tail: Optional[PowerLaw] = None
    source: Optional[str] = None
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values)
        complex_data = np.iscomplexobj(values) or (
            self.left_values is not None and np.iscomplexobj(self.left_values)
        )
        dtype = complex if complex_data else float
        values = values.astype(dtype)
        if grid.ndim != 1 or grid.size < 2:
            raise DomainError("A sampled function needs at least two grid nodes")
        if values.shape != grid.shape:
            raise DomainError("Grid and values must have the same length", details={"grid": grid.size, "values": values.size})
        if not np.all(np.isfinite(grid)) or grid[0] <= 0 or np.any(np.diff(grid) <= 0):
            raise DomainError("Grid must be positive, finite and strictly increasing")
        if not np.all(np.isfinite(values)):
            bad = int(np.nonzero(~np.isfinite(values))[0][0])
            raise SamplingError(float(grid[bad]), complex(values[bad]) if complex_data else float(values[bad]))
        left = None
        if self.left_values is not None:
            left = np.asarray(self.left_values).astype(dtype)
            if left.shape != grid.shape or not np.all(np.isfinite(left)):
                raise DomainError("Left limits must be finite and match the grid")
        interp = Interpolation(self.interp)
        if interp is Interpolation.CUBIC and grid.size < 4:
            interp = Interpolation.LINEAR
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "left_values", left)
        object.__setattr__(self, "interp", interp)

    # -- basic properties -------------------------------------------------

    @property
    def x_min(self) -> float:
        return float(self.grid[0])

    @property
    def x_max(self) -> float:
        return float(self.grid[-1])

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.values)

    @property
    def max_ratio(self) -> float:
        return float(np.max(self.grid[1:] / self.grid[:-1]))

    @property
    def left_limits(self) -> np.ndarray:
        """Left limits at the nodes (the first entry repeats the node value)."""
        if self.interp is Interpolation.CONSTANT_LEFT:
            first = self.values[:1] if self.left_values is None else self.left_values[:1]
            return np.concatenate((first, self.values[:-1]))
        return self.values if self.left_values is None else self.left_values

    @property
    def jump_nodes(self) -> np.ndarray:
        left = self.left_limits
        jumps = left != self.values
        jumps[0] = False
        return np.nonzero(jumps)[0]

    @cached_property
    def cell_coefficients(self) -> np.ndarray:
        """Polynomial coefficients per cell in xi = x / x_i, lowest degree first."""
        return _cell_coefficients(self.grid, self.values, self.left_limits, self.interp)

    def coefficients_as(self, interp: Interpolation) -> np.ndarray:
        """Cell coefficients the same node data would give under another rule."""
        interp = Interpolation(interp)
        if interp is self.interp:
            return self.cell_coefficients
        left = self.values if self.left_values is None else self.left_values
        return _cell_coefficients(self.grid, self.values, left, interp)

    # -- evaluation ---------------------------------------------------------

    def evaluate(self, x, side: str = "right") -> np.ndarray:
        """Evaluate at arbitrary points; ``side='left'`` returns left limits at nodes."""
        xa = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.zeros(xa.shape, dtype=self.values.dtype)
        inside = (xa >= self.x_min) & (xa <= self.x_max)
        if inside.any():
            xi_ = xa[inside]
            if side == "left":
                index = np.searchsorted(self.grid, xi_, side="left") - 1
                index = np.clip(index, 0, self.grid.size - 2)
            else:
                index = np.clip(np.searchsorted(self.grid, xi_, side="right") - 1, 0, self.grid.size - 2)
            out[inside] = _horner(self.cell_coefficients[index], xi_ / self.grid[index])
            if side == "right":
                out[inside & (xa == self.x_max)] = self.values[-1]
            else:
                out[inside & (xa == self.x_min)] = self.left_limits[0]
        below = xa < self.x_min
        if below.any() and self.head is not None:
            out[below] = self.head(xa[below], side)
        above = xa > self.x_max
        if above.any() and self.tail is not None:
            out[above] = self.tail(xa[above], side)
        return out

    def __call__(self, x, side: str = "right"):
        result = self.evaluate(x, side)
        return result[0] if np.ndim(x) == 0 else result

    # -- derived functions ----------------------------------------------------

    def with_values(self, values, left_values=None, **changes: Any) -> "SampledFunction":
        return replace(self, values=values, left_values=left_values, **changes)

    def scaled(self, c: Number) -> "SampledFunction":
        """The function c * f."""
        left = None if self.left_values is None else self.left_values * c
        head = None if self.head is None else self.head.scaled(c.real if isinstance(c, complex) else c)
        tail = None if self.tail is None else self.tail.scaled(c.real if isinstance(c, complex) else c)
        return replace(self, values=self.values * c, left_values=left, head=head, tail=tail,
                       metadata={**self.metadata, "scaled_by": c}, source=None)

    def dilated(self, c: float) -> "SampledFunction":
        """The function x -> f(c x); exact in floating point for c a power of two."""
        if not c > 0:
            raise DomainError("Dilation factor must be positive", details={"c": c})
        head = None if self.head is None else self.head.dilated(c)
        tail = None if self.tail is None else self.tail.dilated(c)
        source = None
        if self.source is not None:
            source = parse_descriptor(self.source).dilated(c).descriptor()
        return replace(self, grid=self.grid / c, head=head, tail=tail, source=source,
                       metadata={**self.metadata, "dilation": self.metadata.get("dilation", 1.0) * c})

    def copy_with_metadata(self, **metadata: Any) -> "SampledFunction":
        return replace(self, metadata={**self.metadata, **metadata})

    def to_dict(self) -> Dict[str, Any]:
        """Sidecar description (everything but the node values)."""
        return {
            "interp": self.interp.value,
            "x_min": self.x_min,
            "x_max": self.x_max,
            "nodes": int(self.grid.size),
            "head": None if self.head is None else self.head.to_dict(),
            "tail": None if self.tail is None else self.tail.to_dict(),
            "source": self.source,
            "metadata": _jsonable(self.metadata),
        }


def _horner(coefficients: np.ndarray, xi: np.ndarray) -> np.ndarray:
    result = coefficients[..., 3] * xi + coefficients[..., 2]
    result = result * xi + coefficients[..., 1]
    return result * xi + coefficients[..., 0]


def _cell_coefficients(grid: np.ndarray, values: np.ndarray, left: np.ndarray, interp: Interpolation) -> np.ndarray:
    cells = grid.size - 1
    coefficients = np.zeros((cells, 4), dtype=values.dtype)
    if interp is Interpolation.CONSTANT_LEFT:
        coefficients[:, 0] = values[:-1]
        return coefficients
    h = grid[1:] / grid[:-1] - 1.0
    # work in eta = (xi - 1) / h where the stencil sits near {-1, 0, 1, 2}
    eta_coefficients = np.zeros((cells, 4), dtype=values.dtype)
    eta_coefficients[:, 0] = values[:-1]
    eta_coefficients[:, 1] = left[1:] - values[:-1]
    if interp is Interpolation.CUBIC:
        jumps = left != values
        jumps[0] = False
        boundaries = np.unique(np.concatenate(([0], np.nonzero(jumps)[0], [grid.size - 1])))
        cell = np.arange(cells)
        start_of_segment = boundaries[np.searchsorted(boundaries, cell, side="right") - 1]
        end_of_segment = boundaries[np.searchsorted(boundaries, cell + 1, side="left")]
        usable = end_of_segment - start_of_segment >= 3
        if usable.any():
            c = cell[usable]
            s, e = start_of_segment[usable], end_of_segment[usable]
            start = np.maximum(s, np.minimum(c - 1, e - 3))
            index = start[:, None] + np.arange(4)[None, :]
            stencil = np.where(index == e[:, None], left[index], values[index])
            eta = (grid[index] / grid[c][:, None] - 1.0) / h[c][:, None]
            vandermonde = eta[:, :, None] ** np.arange(4)[None, None, :]
            eta_coefficients[usable] = np.linalg.solve(vandermonde, stencil[..., None])[..., 0]
    scaled = eta_coefficients / h[:, None] ** np.arange(4)[None, :]
    coefficients[:] = scaled @ _BINOMIAL_SHIFT.T
    return coefficients


def _xi_power_integral(xi_a: np.ndarray, xi_b: np.ndarray, p: float) -> np.ndarray:
    """int_{xi_a}^{xi_b} xi^(p - 1) d xi, accurate when the limits are close."""
    log_ratio = np.log(xi_b / xi_a)
    if p == 0.0:
        return log_ratio
    return np.power(xi_a, p) * np.expm1(p * log_ratio) / p


def _cell_integrals(f: SampledFunction, index: np.ndarray, lo: np.ndarray, hi: np.ndarray, beta: float = 0.0) -> np.ndarray:
    """int_lo^hi f(x) x^beta dx where [lo, hi] lies in cell ``index``."""
    base = f.grid[index]
    coefficients = f.cell_coefficients[index]
    xi_a, xi_b = lo / base, hi / base
    total = np.zeros(index.shape, dtype=f.values.dtype)
    for k in range(f.interp.degree + 1):
        total = total + coefficients[:, k] * _xi_power_integral(xi_a, xi_b, k + beta + 1.0)
    return total * np.power(base, beta + 1.0)


def geometric_grid(x_min: float, x_max: float, ratio: float) -> np.ndarray:
    """Geometric grid from x_min to x_max; dyadic-aligned and exact when ratio = 2^(1/m)."""
    if not (0 < x_min < x_max) or not math.isfinite(x_max):
        raise DomainError("Window needs 0 < x_min < x_max < inf", details={"x_min": x_min, "x_max": x_max})
    if not (1.0 < ratio <= 2.0):
        raise DomainError("Grid ratio must lie in (1, 2]", details={"ratio": ratio})
    per_octave = 1.0 / math.log2(ratio)
    m = round(per_octave)
    if abs(per_octave - m) < 1e-9:
        lo, hi = math.log2(x_min) * m, math.log2(x_max) * m
        if abs(lo - round(lo)) < 1e-9 and abs(hi - round(hi)) < 1e-9:
            return np.exp2(np.arange(round(lo), round(hi) + 1) / m)
    count = int(math.ceil(math.log(x_max / x_min) / math.log(ratio) - 1e-9))
    grid = x_min * ratio ** np.arange(count + 1)
    grid[-1] = x_max
    return grid


def insert_nodes(grid: np.ndarray, points: Iterable[float]) -> np.ndarray:
    """Snap points onto the grid: move a nearby node onto the point, else insert it."""
    nodes = grid.tolist()
    protected = set()
    for p in sorted(set(float(p) for p in points)):
        if not nodes[0] <= p <= nodes[-1]:
            continue
        i = int(np.searchsorted(nodes, p))
        if i < len(nodes) and nodes[i] == p:
            protected.add(p)
            continue
        left, right = nodes[i - 1], nodes[i]
        nearest = i - 1 if p - left <= right - p else i
        width = right - left
        movable = 0 < nearest < len(nodes) - 1 and nodes[nearest] not in protected
        if movable and abs(nodes[nearest] - p) < 0.25 * width:
            nodes[nearest] = p
        else:
            nodes.insert(i, p)
        protected.add(p)
    return np.array(nodes)


# -- analytic descriptors ------------------------------------------------------


class FunctionKind(str, Enum):
    """Closed-form corpus families."""

    POWER_TRUNCATED = "power-truncated"
    GAUSSIAN_HERMITE = "gaussian-hermite"
    DYADIC_SIGN_POWER = "dyadic-sign-power"
    INDICATOR = "indicator"
    POWER_EXPONENTIAL = "power-exponential"
    SMOOTH_BROKEN_POWER = "smooth-broken-power"
    SIGN_CHANGE_EXPONENTIAL = "sign-change-exponential"
    EXPONENTIAL = "exponential"
    CUSTOM = "custom-closure"


_DEFAULT_PARAMS: Dict[FunctionKind, Dict[str, float]] = {
    FunctionKind.POWER_TRUNCATED: {"b": 1.0},
    FunctionKind.GAUSSIAN_HERMITE: {"alpha": 0.0},
    FunctionKind.DYADIC_SIGN_POWER: {"b": math.inf},
    FunctionKind.INDICATOR: {"a": 0.0},
    FunctionKind.POWER_EXPONENTIAL: {"a": 0.0, "rate": 1.0},
    FunctionKind.SMOOTH_BROKEN_POWER: {},
    FunctionKind.SIGN_CHANGE_EXPONENTIAL: {"a": 0.0, "x0": 1.0},
    FunctionKind.EXPONENTIAL: {"rate": 1.0},
    FunctionKind.CUSTOM: {},
}

_REQUIRED_PARAMS: Dict[FunctionKind, Tuple[str, ...]] = {
    FunctionKind.POWER_TRUNCATED: ("a",),
    FunctionKind.DYADIC_SIGN_POWER: ("a",),
    FunctionKind.INDICATOR: ("b",),
    FunctionKind.SMOOTH_BROKEN_POWER: ("a", "b"),
}

_MODIFIERS = ("amplitude", "dilation", "weight_exponent")


def _format_number(value: float) -> str:
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return repr(float(value))


class AnalyticFunction(BaseModel):
    """
    Closed-form function on (0, inf): amplitude * x^weight_exponent * base(dilation * x).

    Descriptors serialize as typed strings, e.g. ``dyadic-sign-power:a=0.6,b=4``.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    kind: FunctionKind
    params: Dict[str, float] = Field(default_factory=dict)
    amplitude: float = 1.0
    dilation: float = Field(default=1.0, gt=0)
    weight_exponent: float = 0.0
    closure: Optional[Callable[[np.ndarray], np.ndarray]] = Field(default=None, exclude=True)
    jumps: Tuple[float, ...] = ()

    @model_validator(mode="after")
    def _check_params(self) -> "AnalyticFunction":
        missing = [p for p in _REQUIRED_PARAMS.get(self.kind, ()) if p not in self.params]
        if missing:
            raise ValueError(f"{self.kind.value} needs parameters {missing}")
        merged = {**_DEFAULT_PARAMS[self.kind], **self.params}
        object.__setattr__(self, "params", merged)
        if self.kind is FunctionKind.CUSTOM and self.closure is None:
            raise ValueError("custom-closure needs a closure")
        if self.kind is FunctionKind.SMOOTH_BROKEN_POWER and not merged["a"] < merged["b"]:
            raise ValueError("smooth-broken-power needs a < b")
        if self.kind is FunctionKind.INDICATOR and not 0.0 <= merged["a"] < merged["b"]:
            raise ValueError("indicator needs 0 <= a < b")
        if not math.isfinite(self.amplitude):
            raise ValueError("amplitude must be finite")
        return self

    def __getitem__(self, key: str) -> float:
        return self.params[key]

    # -- evaluation -----------------------------------------------------------

    def _base(self, x: np.ndarray, side: str) -> np.ndarray:
        p = self.params
        kind = self.kind
        if kind is FunctionKind.POWER_TRUNCATED:
            inside = x <= p["b"] if side == "left" else x < p["b"]
            return np.where(inside, np.power(x, -p["a"]), 0.0)
        if kind is FunctionKind.GAUSSIAN_HERMITE:
            return np.power(x, p["alpha"] + 0.5) * np.exp(-0.5 * x * x)
        if kind is FunctionKind.DYADIC_SIGN_POWER:
            inside = x <= p["b"] if side == "left" else x < p["b"]
            sign = np.where(np.mod(_dyadic_index(x, side), 2.0) == 0.0, 1.0, -1.0)
            return np.where(inside, sign * np.power(x, -p["a"]), 0.0)
        if kind is FunctionKind.INDICATOR:
            if side == "left":
                inside = (x > p["a"]) & (x <= p["b"])
            else:
                inside = (x >= p["a"]) & (x < p["b"])
            return inside.astype(float)
        if kind is FunctionKind.POWER_EXPONENTIAL:
            return np.power(x, -p["a"]) * np.exp(-p["rate"] * x)
        if kind is FunctionKind.SMOOTH_BROKEN_POWER:
            return 1.0 / (np.power(x, p["a"]) + np.power(x, p["b"]))
        if kind is FunctionKind.SIGN_CHANGE_EXPONENTIAL:
            return np.power(x, -p["a"]) * (1.0 - x / p["x0"]) * np.exp(-x / p["x0"])
        if kind is FunctionKind.EXPONENTIAL:
            return np.exp(p["rate"] * x)
        return np.asarray(self.closure(x), dtype=float)

    def evaluate(self, x, side: str = "right") -> np.ndarray:
        xa = np.asarray(x, dtype=float)
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            base = self._base(self.dilation * xa, side)
            return self.amplitude * np.power(xa, self.weight_exponent) * base

    def __call__(self, x, side: str = "right") -> np.ndarray:
        return self.evaluate(x, side)

    # -- structure ------------------------------------------------------------

    def jump_points(self, lo: float, hi: float) -> Tuple[float, ...]:
        """Discontinuities in [lo, hi] (x coordinates)."""
        p, d = self.params, self.dilation
        points = []
        if self.kind in (FunctionKind.POWER_TRUNCATED, FunctionKind.DYADIC_SIGN_POWER) and math.isfinite(p["b"]):
            points.append(p["b"] / d)
        if self.kind is FunctionKind.DYADIC_SIGN_POWER:
            first = math.ceil(math.log2(lo * d))
            last = math.floor(math.log2(hi * d))
            points.extend(2.0 ** n / d for n in range(first, last + 1))
        if self.kind is FunctionKind.INDICATOR:
            if p["a"] > 0:
                points.append(p["a"] / d)
            if math.isfinite(p["b"]):
                points.append(p["b"] / d)
        if self.kind is FunctionKind.CUSTOM:
            points.extend(self.jumps)
        return tuple(sorted(x for x in points if lo <= x <= hi))

    def _base_head(self) -> Optional[PowerLaw]:
        p = self.params
        kind = self.kind
        if kind in (FunctionKind.POWER_TRUNCATED, FunctionKind.POWER_EXPONENTIAL, FunctionKind.SMOOTH_BROKEN_POWER,
                    FunctionKind.SIGN_CHANGE_EXPONENTIAL):
            return PowerLaw(1.0, -p["a"])
        if kind is FunctionKind.GAUSSIAN_HERMITE:
            return PowerLaw(1.0, p["alpha"] + 0.5)
        if kind is FunctionKind.DYADIC_SIGN_POWER:
            return PowerLaw(1.0, -p["a"], oscillating=True)
        if kind is FunctionKind.INDICATOR:
            return PowerLaw(1.0, 0.0) if p["a"] == 0 else PowerLaw.zero()
        if kind is FunctionKind.EXPONENTIAL:
            return PowerLaw(1.0, 0.0)
        return None

    def _base_tail(self) -> Optional[PowerLaw]:
        p = self.params
        kind = self.kind
        if kind is FunctionKind.POWER_TRUNCATED:
            return PowerLaw.zero() if math.isfinite(p["b"]) else PowerLaw(1.0, -p["a"])
        if kind is FunctionKind.DYADIC_SIGN_POWER:
            return PowerLaw.zero() if math.isfinite(p["b"]) else PowerLaw(1.0, -p["a"], oscillating=True)
        if kind is FunctionKind.INDICATOR:
            return PowerLaw.zero() if math.isfinite(p["b"]) else PowerLaw(1.0, 0.0)
        if kind is FunctionKind.SMOOTH_BROKEN_POWER:
            return PowerLaw(1.0, -p["b"])
        if kind in (FunctionKind.GAUSSIAN_HERMITE, FunctionKind.POWER_EXPONENTIAL, FunctionKind.SIGN_CHANGE_EXPONENTIAL):
            return PowerLaw.zero()
        return None

    def _modify(self, model: Optional[PowerLaw]) -> Optional[PowerLaw]:
        if model is None or model.is_zero:
            return model
        return model.dilated(self.dilation).scaled(self.amplitude).times_power(self.weight_exponent)

    def head_model(self) -> Optional[PowerLaw]:
        return self._modify(self._base_head())

    def tail_model(self) -> Optional[PowerLaw]:
        return self._modify(self._base_tail())

    def default_interp(self) -> Interpolation:
        if self.kind is FunctionKind.INDICATOR:
            return Interpolation.CONSTANT_LEFT
        if self.kind is FunctionKind.DYADIC_SIGN_POWER and self.params["a"] == 0 and self.weight_exponent == 0:
            return Interpolation.CONSTANT_LEFT
        if self.kind is FunctionKind.CUSTOM:
            return Interpolation.LINEAR
        return Interpolation.CUBIC

    @property
    def is_nonincreasing(self) -> bool:
        """Known monotone (nonincreasing, nonnegative) members of the corpus."""
        if self.amplitude <= 0 or self.weight_exponent > 0:
            return False
        p = self.params
        if self.kind is FunctionKind.POWER_TRUNCATED:
            return p["a"] - self.weight_exponent >= 0
        if self.kind is FunctionKind.INDICATOR:
            return p["a"] == 0 and self.weight_exponent == 0
        if self.kind is FunctionKind.POWER_EXPONENTIAL:
            return p["a"] >= 0
        if self.kind is FunctionKind.SMOOTH_BROKEN_POWER:
            return p["a"] >= 0
        return False

    @property
    def changes_sign(self) -> bool:
        return self.kind in (FunctionKind.DYADIC_SIGN_POWER, FunctionKind.SIGN_CHANGE_EXPONENTIAL)

    def dilated(self, c: float) -> "AnalyticFunction":
        """Descriptor of x -> f(c x)."""
        return self.model_copy(update={
            "dilation": self.dilation * c,
            "amplitude": self.amplitude * c ** self.weight_exponent,
        })

    def scaled(self, c: float) -> "AnalyticFunction":
        return self.model_copy(update={"amplitude": self.amplitude * c})

    def times_power(self, gamma: float) -> "AnalyticFunction":
        return self.model_copy(update={"weight_exponent": self.weight_exponent + gamma})

    def descriptor(self) -> str:
        """Typed-string form accepted by ``parse_descriptor``."""
        parts = [f"{k}={_format_number(v)}" for k, v in sorted(self.params.items())]
        for name, default in zip(_MODIFIERS, (1.0, 1.0, 0.0)):
            value = getattr(self, name)
            if value != default:
                parts.append(f"{name}={_format_number(value)}")
        return f"{self.kind.value}:{','.join(parts)}"


def parse_descriptor(text: str, closure: Optional[Callable[[np.ndarray], np.ndarray]] = None) -> AnalyticFunction:
    """
    Parse a typed-string function descriptor.

    Args:
        text: ``kind`` or ``kind:key=value,...``; modifiers ``amplitude``,
            ``dilation`` and ``weight_exponent`` are accepted for every kind
        closure: Callable for ``custom-closure`` descriptors

    Raises:
        DomainError: If the descriptor is malformed
    """
    if not text or not text.strip():
        raise DomainError("Function descriptor cannot be empty")
    kind_text, _, rest = text.strip().partition(":")
    try:
        kind = FunctionKind(kind_text.strip())
    except ValueError as e:
        raise DomainError(f"Unknown function kind '{kind_text}'", details={"descriptor": text}) from e
    params: Dict[str, float] = {}
    modifiers: Dict[str, float] = {}
    for token in filter(None, (t.strip() for t in rest.split(","))):
        key, sep, value = token.partition("=")
        if not sep:
            raise DomainError(f"Malformed descriptor parameter '{token}'", details={"descriptor": text})
        try:
            number = float(value)
        except ValueError as e:
            raise DomainError(f"Parameter '{key}' is not a number", details={"descriptor": text}) from e
        (modifiers if key.strip() in _MODIFIERS else params)[key.strip()] = number
    try:
        return AnalyticFunction(kind=kind, params=params, closure=closure, **modifiers)
    except ValueError as e:
        raise DomainError(f"Invalid descriptor '{text}': {e}", details={"descriptor": text}) from e


# -- operations ----------------------------------------------------------------


def sample(
    f: AnalyticFunction,
    x_min: float,
    x_max: float,
    ratio: float = 2.0 ** (1.0 / 16.0),
    interp: Optional[Interpolation] = None,
) -> SampledFunction:
    """
    Sample an analytic function node-exactly on a geometric grid.

    Jump points are snapped onto the grid; right and left limits are both
    recorded so the jumps survive every interpretation rule.

    Raises:
        SamplingError: If the function is not finite at some node
    """
    grid = geometric_grid(x_min, x_max, ratio)
    jumps = f.jump_points(x_min, x_max)
    if jumps:
        grid = insert_nodes(grid, jumps)
    values = f.evaluate(grid, "right")
    left = f.evaluate(grid, "left")
    for array in (values, left):
        bad = ~np.isfinite(array)
        if bad.any():
            i = int(np.nonzero(bad)[0][0])
            raise SamplingError(float(grid[i]), float(array[i]), details={"source": f.descriptor()})
    left_values = None if np.array_equal(left, values) else left
    return SampledFunction(
        grid=grid,
        values=values,
        interp=interp or f.default_interp(),
        left_values=left_values,
        head=f.head_model(),
        tail=f.tail_model(),
        source=f.descriptor() if f.kind is not FunctionKind.CUSTOM else None,
        metadata={"ratio": ratio, "x_min": x_min, "x_max": x_max},
    )


def sample_default(f: AnalyticFunction, interp: Optional[Interpolation] = None) -> SampledFunction:
    """Sample on the configured default window."""
    return sample(
        f,
        2.0 ** settings.window_min_exp,
        2.0 ** settings.window_max_exp,
        2.0 ** (1.0 / settings.nodes_per_octave),
        interp,
    )


def _require_model(model: Optional[PowerLaw], side: str) -> PowerLaw:
    if model is None:
        raise DomainError(f"Range extends past the sampled window and no {side} model is known")
    return model


def antiderivative(f: SampledFunction, x, beta: float = 0.0) -> np.ndarray:
    """F(x) = int_0^x f(t) t^beta dt at each x, using the head and tail models."""
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    head = _require_model(f.head, "head")
    head_total = head.signed_integral(0.0, f.x_min, beta)
    cells = _cell_integrals(f, np.arange(f.grid.size - 1), f.grid[:-1], f.grid[1:], beta)
    cumulative = np.concatenate(([0.0], np.cumsum(cells))) + head_total
    out = np.zeros(xa.shape, dtype=np.result_type(cells.dtype, float))
    below = xa < f.x_min
    for i in np.nonzero(below)[0]:
        out[i] = head.signed_integral(0.0, xa[i], beta)
    inside = ~below & (xa <= f.x_max)
    if inside.any():
        index = np.clip(np.searchsorted(f.grid, xa[inside], side="right") - 1, 0, f.grid.size - 2)
        out[inside] = cumulative[index] + _cell_integrals(f, index, f.grid[index], xa[inside], beta)
    above = xa > f.x_max
    if above.any():
        tail = _require_model(f.tail, "tail")
        for i in np.nonzero(above)[0]:
            out[i] = cumulative[-1] + tail.signed_integral(f.x_max, xa[i], beta)
    return out


def integrate(f: SampledFunction, a: float, b: float, beta: float = 0.0) -> Number:
    """
    Signed integral of f(x) x^beta over [a, b] under the interpretation rule.

    Exact for piecewise-polynomial data; portions outside the window use the
    head/tail models and require them to be known.

    Raises:
        DomainError: If the interval is empty or leaves a window without a model
    """
    if not (0.0 <= a < b):
        raise DomainError("Integration needs 0 <= a < b", details={"a": a, "b": b})
    total: Number = 0.0
    if a < f.x_min:
        total += _require_model(f.head, "head").signed_integral(a, min(b, f.x_min), beta)
    if b > f.x_max:
        total += _require_model(f.tail, "tail").signed_integral(max(a, f.x_max), b, beta)
    lo, hi = max(a, f.x_min), min(b, f.x_max)
    if lo < hi:
        first = int(np.clip(np.searchsorted(f.grid, lo, side="right") - 1, 0, f.grid.size - 2))
        last = int(np.clip(np.searchsorted(f.grid, hi, side="left") - 1, 0, f.grid.size - 2))
        index = np.arange(first, last + 1)
        starts = np.maximum(f.grid[index], lo)
        ends = np.minimum(f.grid[index + 1], hi)
        keep = ends > starts
        total += np.sum(_cell_integrals(f, index[keep], starts[keep], ends[keep], beta))
    if isinstance(total, complex) or np.iscomplexobj(total):
        return complex(total)
    return float(total)


def inner_product(f: SampledFunction, g: Callable[[np.ndarray], np.ndarray], order: int = 8) -> Number:
    """int f(x) g(x) dx over the window by Gauss-Legendre on the cells of f."""
    nodes, weights = special.roots_legendre(order)
    lo, hi = f.grid[:-1], f.grid[1:]
    half = 0.5 * (hi - lo)
    points = 0.5 * (hi + lo)[:, None] + half[:, None] * nodes[None, :]
    index = np.repeat(np.arange(lo.size)[:, None], order, axis=1)
    fx = _horner(f.cell_coefficients[index], points / f.grid[index])
    gx = np.asarray(g(points.ravel())).reshape(points.shape)
    total = np.sum((fx * gx) @ weights * half)
    return complex(total) if np.iscomplexobj(total) else float(total)


def linear_view(f: SampledFunction, refine: Optional[int] = None) -> SampledFunction:
    """Piecewise-linear (or piecewise-constant) equivalent; cubic cells are subdivided."""
    if f.interp is not Interpolation.CUBIC:
        return f
    m = refine or settings.refine_factor
    cells = f.grid.size - 1
    ratio = f.grid[1:] / f.grid[:-1]
    fractions = np.arange(m) / m
    sub = f.grid[:-1, None] * np.power(ratio[:, None], fractions[None, :])
    index = np.repeat(np.arange(cells)[:, None], m, axis=1)
    sub_values = _horner(f.cell_coefficients[index], sub / f.grid[:-1, None])
    sub_values[:, 0] = f.values[:-1]
    grid = np.concatenate((sub.ravel(), f.grid[-1:]))
    values = np.concatenate((sub_values.ravel(), f.values[-1:]))
    left = values.copy()
    left[::m] = f.left_limits
    return SampledFunction(
        grid=grid,
        values=values,
        interp=Interpolation.LINEAR,
        left_values=None if np.array_equal(left, values) else left,
        head=f.head,
        tail=f.tail,
        source=f.source,
        metadata={**f.metadata, "refined_from": "piecewise-cubic", "refine_factor": m},
    )


def with_nodes(f: SampledFunction, points: Iterable[float]) -> SampledFunction:
    """Insert continuity nodes (no jumps) into a linear or constant function."""
    if f.interp is Interpolation.CUBIC:
        f = linear_view(f)
    extra = np.array(sorted(p for p in set(points) if f.x_min < p < f.x_max and p not in set(f.grid.tolist())))
    if extra.size == 0:
        return f
    values = f.evaluate(extra)
    grid = np.concatenate((f.grid, extra))
    order = np.argsort(grid, kind="stable")
    all_values = np.concatenate((f.values, values))[order]
    if f.interp is Interpolation.CONSTANT_LEFT:
        return replace(f, grid=grid[order], values=all_values, left_values=None)
    left = np.concatenate((f.left_limits, values))[order]
    return replace(f, grid=grid[order], values=all_values,
                   left_values=None if np.array_equal(left, all_values) else left)


def total_variation(f: SampledFunction, a: float, b: float) -> float:
    """
    Total variation of f on (a, b]: jumps at b count, jumps at a do not.

    Cubic data is measured on its refined piecewise-linear view, which makes the
    result refinement-monotone. Ranges beyond the window use the head/tail models.
    """
    if not (0.0 <= a < b):
        raise DomainError("Total variation needs 0 <= a < b", details={"a": a, "b": b})
    total = 0.0
    if a < f.x_min:
        total += _require_model(f.head, "head").variation(a, min(b, f.x_min))
    if b > f.x_max:
        total += _require_model(f.tail, "tail").variation(max(a, f.x_max), b)
    lo, hi = max(a, f.x_min), min(b, f.x_max)
    if lo >= hi:
        return float(total)
    g = with_nodes(linear_view(f), (lo, hi))
    i0 = int(np.searchsorted(g.grid, lo))
    i1 = int(np.searchsorted(g.grid, hi))
    values, left = g.values, g.left_limits
    jumps = np.abs(values[i0 + 1:i1 + 1] - left[i0 + 1:i1 + 1])
    within = 0.0
    if g.interp is Interpolation.LINEAR:
        within = np.sum(np.abs(left[i0 + 1:i1 + 1] - values[i0:i1]))
    # the jump at lo is excluded, the right value at hi plays no role
    return float(total + within + np.sum(jumps))


def modulus_view(f: SampledFunction) -> SampledFunction:
    """
    Nonnegative piecewise-linear (or constant) function equal to |f|.

    Cubic data is refined, sign changes inside linear cells become nodes so each
    cell of the result is monotone. Complex data uses the modulus of node values.
    """
    g = linear_view(f)
    if g.interp is Interpolation.LINEAR and not g.is_complex:
        v, w = g.values[:-1], g.left_limits[1:]
        crossing = np.nonzero(v * w < 0)[0]
        if crossing.size:
            roots = g.grid[crossing] + (g.grid[crossing + 1] - g.grid[crossing]) * v[crossing] / (v[crossing] - w[crossing])
            roots = roots[(roots > g.grid[crossing]) & (roots < g.grid[crossing + 1])]
            g = with_nodes(g, roots.tolist())
    left = None if g.left_values is None or g.interp is Interpolation.CONSTANT_LEFT else np.abs(g.left_values)
    return SampledFunction(
        grid=g.grid,
        values=np.abs(g.values),
        interp=g.interp,
        left_values=left,
        head=None if f.head is None else f.head.absolute(),
        tail=None if f.tail is None else f.tail.absolute(),
        source=f.source,
        metadata={**f.metadata, "modulus": True},
    )


def multiply_power(f: SampledFunction, gamma: float) -> SampledFunction:
    """The function x^gamma f(x); node values are exact, models shift their exponent."""
    factor = np.power(f.grid, gamma)
    interp = Interpolation.LINEAR if f.interp is Interpolation.CONSTANT_LEFT else f.interp
    left = f.left_limits * factor
    values = f.values * factor
    return SampledFunction(
        grid=f.grid,
        values=values,
        interp=interp,
        left_values=None if np.array_equal(left, values) else left,
        head=None if f.head is None else f.head.times_power(gamma),
        tail=None if f.tail is None else f.tail.times_power(gamma),
        source=None,
        metadata={**f.metadata, "weight_exponent": gamma},
    )


def _octave_maxima(grid: np.ndarray, magnitude: np.ndarray, start: float, direction: int) -> Tuple[float, float, float, float]:
    """Block maxima of |f| over two adjacent octaves starting at ``start``."""
    if direction > 0:
        first = (grid >= start) & (grid <= 2 * start)
        second = (grid >= 2 * start) & (grid <= 4 * start)
        return float(magnitude[first].max()), float(magnitude[second].max()), start, 2 * start
    first = (grid <= start) & (grid >= start / 2)
    second = (grid <= start / 2) & (grid >= start / 4)
    return float(magnitude[first].max()), float(magnitude[second].max()), start / 2, start / 4


def _fit_power_law(f: SampledFunction, at_head: bool) -> PowerLaw:
    magnitude = np.abs(np.maximum(np.abs(f.values), np.abs(f.left_limits)))
    peak = float(magnitude.max())
    if peak == 0.0 or f.x_max / f.x_min < 4.0:
        return PowerLaw.zero()
    if at_head:
        m1, m2, x1, x2 = _octave_maxima(f.grid, magnitude, f.x_min, +1)
        block = (f.grid <= 2 * f.x_min)
    else:
        m1, m2, x1, x2 = _octave_maxima(f.grid, magnitude, f.x_max, -1)
        block = (f.grid >= f.x_max / 2)
    if m1 <= 1e-14 * peak:
        return PowerLaw.zero()
    if m2 == 0.0:
        return PowerLaw.zero()
    exponent = math.log(m1 / m2) / math.log(x1 / x2) if x1 != x2 else 0.0
    values = np.real(f.values[block]) if f.is_complex else f.values[block]
    oscillating = bool(np.any(values[:-1] * values[1:] < 0))
    # the block maximum of c x^a sits at the end of the octave where x^a is largest
    lo, hi = (f.x_min, 2 * f.x_min) if at_head else (f.x_max / 2, f.x_max)
    anchor = hi if exponent > 0 else lo
    edge = f.values[0] if at_head else f.left_limits[-1]
    edge_x = f.x_min if at_head else f.x_max
    sign = 1.0 if np.real(edge) >= 0 else -1.0
    if oscillating:
        sign *= float(PowerLaw(1.0, 0.0, True).sign(edge_x, "right" if at_head else "left"))
    return PowerLaw(float(sign * m1 / anchor ** exponent), float(exponent), oscillating)


def fit_head(f: SampledFunction) -> PowerLaw:
    """Power-law model on (0, x_min) fitted from the first two octaves."""
    return _fit_power_law(f, at_head=True)


def fit_tail(f: SampledFunction) -> PowerLaw:
    """Power-law model on (x_max, inf) fitted from the last two octaves; zero when decayed."""
    return _fit_power_law(f, at_head=False)


def even_odd_split(
    f: Callable[[np.ndarray], np.ndarray],
    x_min: float,
    x_max: float,
    ratio: float = 2.0 ** (1.0 / 16.0),
    *,
    jumps: Iterable[float] = (),
    negative_grid: Optional[np.ndarray] = None,
    interp: Interpolation = Interpolation.LINEAR,
) -> Tuple[SampledFunction, SampledFunction]:
    """
    Even and odd parts of a function on the line, sampled on the positive grid.

    f_e(x) = (f(x) + f(-x)) / 2 and f_o(x) = (f(x) - f(-x)) / 2; left limits are
    taken one ulp toward the origin so jumps at +-x are kept.

    Raises:
        DomainError: If ``negative_grid`` is not the mirror image of the grid
    """
    grid = geometric_grid(x_min, x_max, ratio)
    absolute_jumps = [abs(j) for j in jumps if j != 0]
    if absolute_jumps:
        grid = insert_nodes(grid, absolute_jumps)
    if negative_grid is not None:
        mirrored = np.sort(-np.asarray(negative_grid, dtype=float))
        if mirrored.shape != grid.shape or not np.array_equal(mirrored, grid):
            raise DomainError("Even/odd split needs a grid symmetric about 0")
    plus = np.asarray(f(grid))
    minus = np.asarray(f(-grid))
    plus_left = np.asarray(f(np.nextafter(grid, 0.0)))
    minus_left = np.asarray(f(np.nextafter(-grid, 0.0)))
    parts = []
    for sign, name in ((1.0, "even"), (-1.0, "odd")):
        values = 0.5 * (plus + sign * minus)
        left = 0.5 * (plus_left + sign * minus_left)
        part = SampledFunction(
            grid=grid,
            values=values,
            interp=interp,
            left_values=None if np.array_equal(left, values) else left,
            metadata={"part": name, "ratio": ratio},
        )
        parts.append(replace(part, head=fit_head(part), tail=fit_tail(part)))
    return parts[0], parts[1]


# -- persistence -------------------------------------------------------------


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    return value


def save_csv(
    f: SampledFunction,
    path: Union[str, Path],
    extra_columns: Optional[Dict[str, np.ndarray]] = None,
    abscissa: str = "x",
) -> Path:
    """Write ``x,re,im`` (plus extra columns) and a JSON sidecar next to it; ``abscissa`` renames the x column."""
    target = Path(path)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        columns = {abscissa: f.grid, "re": np.real(f.values), "im": np.imag(f.values)}
        columns.update(extra_columns or {})
        with target.open("w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(list(columns))
            for row in zip(*columns.values()):
                writer.writerow([repr(float(v)) for v in row])
        sidecar = f.to_dict()
        if f.left_values is not None:
            sidecar["left_re"] = np.real(f.left_values).tolist()
            sidecar["left_im"] = np.imag(f.left_values).tolist()
        target.with_suffix(".json").write_text(json.dumps(sidecar, indent=2, sort_keys=True), encoding="utf-8")
    except OSError as e:
        raise ReportIOError(str(target), f"could not write sampled function: {e}") from e
    return target


def load_csv(path: Union[str, Path]) -> SampledFunction:
    """Read a function written by ``save_csv``."""
    source = Path(path)
    try:
        with source.open("r", newline="", encoding="utf-8") as handle:
            rows = list(csv.DictReader(handle))
        sidecar = json.loads(source.with_suffix(".json").read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise ReportIOError(str(source), f"could not read sampled function: {e}") from e
    abscissa = next(iter(rows[0])) if rows else "x"
    grid = np.array([float(r[abscissa]) for r in rows])
    re = np.array([float(r["re"]) for r in rows])
    im = np.array([float(r["im"]) for r in rows])
    values = re + 1j * im if np.any(im != 0) else re
    left = None
    if "left_re" in sidecar:
        left = np.array(sidecar["left_re"]) + 1j * np.array(sidecar["left_im"])
        if not np.any(np.imag(left)):
            left = np.real(left)
    return SampledFunction(
        grid=grid,
        values=values,
        interp=Interpolation(sidecar["interp"]),
        left_values=left,
        head=PowerLaw.from_dict(sidecar.get("head")),
        tail=PowerLaw.from_dict(sidecar.get("tail")),
        source=sidecar.get("source"),
        metadata=sidecar.get("metadata", {}),
    )
