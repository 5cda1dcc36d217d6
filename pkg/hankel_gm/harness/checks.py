"""Checks of the one- and two-sided norm inequalities, each returning a verdict."""

import logging
import math
from dataclasses import replace
from typing import Optional, Tuple

import numpy as np
from scipy import special

from hankel_gm.analysis.bessel import OrderLike, as_order
from hankel_gm.analysis.funcrep import (
    Interpolation,
    PowerLaw,
    SampledFunction,
    antiderivative,
    fit_head,
    fit_tail,
    geometric_grid,
    insert_nodes,
    modulus_view,
)
from hankel_gm.analysis.gm import certify_gm
from hankel_gm.analysis.maximal import CutoffSpec, maximal_bound_check, maximal_lorentz_check
from hankel_gm.analysis.norms import (
    SpaceSpec,
    WeightFunction,
    lorentz_norm,
    lorentz_norm_on_line,
    lq_integral,
    norm_on_line,
    power_weighted_norm,
)
from hankel_gm.analysis.transform import (
    LineSamples,
    TransformSettings,
    fourier_1d,
    hankel_transform,
    parseval_check,
    radial_fourier,
    radial_weight_params,
)
from hankel_gm.config.settings import settings
from hankel_gm.core.exceptions import DomainError, PreconditionError
from hankel_gm.schemas import (
    CheckResult,
    FourierEquivalenceResult,
    GMCertificate,
    HardyResult,
    RadialEquivalenceResult,
)

logger = logging.getLogger(__name__)

# octaves added on both sides of the window when tabulating Hardy primitives
_HARDY_EXTENSION = 40
_PARSEVAL_RTOL = 1e-6


def norm_ratio(numerator: float, denominator: float) -> Tuple[float, str]:
    """Ratio of two norms and its flag: ok, zero, both-infinite or infinite-ratio."""
    if numerator == 0 and denominator == 0:
        return 0.0, "zero"
    if math.isinf(numerator) and math.isinf(denominator):
        return math.inf, "both-infinite"
    if math.isinf(numerator) or denominator == 0:
        return math.inf, "infinite-ratio"
    if math.isinf(denominator):
        return 0.0, "infinite-ratio"
    return numerator / denominator, "ok"


def check_exponent_range(alpha: float, p: float, q: float) -> None:
    """
    1/(alpha + 3/2) < p < inf and 1 <= q <= inf.

    Raises:
        DomainError: If (p, q) is outside the range of the weighted equivalence
    """
    lower = 1.0 / (alpha + 1.5)
    if not lower < p < math.inf:
        raise DomainError(f"p must lie in ({lower:.6g}, inf) for alpha={alpha}", details={"alpha": alpha, "p": p})
    if not q >= 1:
        raise DomainError("q must lie in [1, inf]", details={"q": q})


def forward_norms(f: SampledFunction, F: SampledFunction, p: float, q: float) -> Tuple[float, float]:
    """(||x^(1/p' - 1/q) F||_q, ||x^(1/p - 1/q) f||_q); 1/p' = 1 - 1/p may be negative."""
    spec = SpaceSpec(p=p, q=q)
    transform_side = power_weighted_norm(F, spec.inv_conjugate - spec.inv_q, q)
    function_side = power_weighted_norm(f, spec.t_exponent, q)
    return transform_side, function_side


def lorentz_norms(f: SampledFunction, F: SampledFunction, p: float, q: float) -> Tuple[float, float]:
    """(||F||_(p',q), ||f||_(p,q)) for p > 1."""
    return lorentz_norm(F, SpaceSpec(p=p, q=q).conjugate, q), lorentz_norm(f, p, q)


def error_budget(F: SampledFunction) -> float:
    """Largest transform error estimate relative to the largest transform value."""
    errors = F.metadata.get("error_estimate")
    if errors is None:
        return 0.0
    peak = float(np.max(np.abs(F.values)))
    worst = float(np.max(errors))
    if peak == 0:
        return 0.0 if worst == 0 else math.inf
    return worst / peak


def _require_gm(f: SampledFunction) -> GMCertificate:
    if f.is_complex:
        raise PreconditionError("real-valued", "Norm equivalences are stated for real-valued f")
    return certify_gm(f)


def _one_sided(name: str, transform_side: float, function_side: float, q: float, details: dict) -> CheckResult:
    ratio, flag = norm_ratio(transform_side, function_side)
    # the bound is vacuous when f is outside its space
    passed = not (math.isinf(transform_side) and math.isfinite(function_side))
    if flag == "infinite-ratio" and math.isinf(function_side):
        flag = "vacuous"
    if flag == "ok" and math.isinf(q):
        flag = "sup-norm"
    message = f"{name}: transform side {transform_side:.6g}, function side {function_side:.6g}"
    logger.info(f"{message}, ratio {ratio:.6g} ({flag})")
    return CheckResult(
        check=name,
        passed=passed,
        value=ratio,
        flag=flag,
        message=message,
        details={**details, "transform_norm": transform_side, "function_norm": function_side},
    )


def pitt_check(
    f: SampledFunction,
    alpha: OrderLike,
    p: float,
    q: float,
    transform_settings: Optional[TransformSettings] = None,
    F: Optional[SampledFunction] = None,
) -> CheckResult:
    """
    ||H_alpha f||_{L^q_t(p',q)} / ||f||_{L^q_t(p,q)}; passes when the transform side is finite
    whenever the function side is.

    The endpoints q = 1 and q = inf are included; q = inf is reported with the
    ``sup-norm`` flag.

    Raises:
        DomainError: If (p, q) is outside the admissible range
        PreconditionError: If f is complex-valued
        NotGeneralMonotoneError: If f fails GM certification
    """
    alpha = as_order(alpha).alpha
    check_exponent_range(alpha, p, q)
    _require_gm(f)
    F = F if F is not None else hankel_transform(f, alpha, transform_settings)
    transform_side, function_side = forward_norms(f, F, p, q)
    details = {"alpha": alpha, "p": p, "q": q, "err_budget": error_budget(F)}
    return _one_sided("pitt", transform_side, function_side, q, details)


def lorentz_pitt_check(
    f: SampledFunction,
    alpha: OrderLike,
    p: float,
    q: float,
    transform_settings: Optional[TransformSettings] = None,
    F: Optional[SampledFunction] = None,
) -> CheckResult:
    """
    ||H_alpha f||_{L^(p',q)} / ||f||_{L^(p,q)} for 1 < p < inf; passes when finite.

    Raises:
        DomainError: If p is outside (1, inf) or q < 1
        NotGeneralMonotoneError: If f fails GM certification
    """
    alpha = as_order(alpha).alpha
    if not 1.0 < p < math.inf:
        raise DomainError("The Lorentz bound needs 1 < p < inf", details={"p": p})
    check_exponent_range(alpha, p, q)
    _require_gm(f)
    F = F if F is not None else hankel_transform(f, alpha, transform_settings)
    transform_side, function_side = lorentz_norms(f, F, p, q)
    details = {"alpha": alpha, "p": p, "q": q, "err_budget": error_budget(F)}
    return _one_sided("lorentz-pitt", transform_side, function_side, q, details)


def _is_nonincreasing(g: SampledFunction) -> bool:
    if g.is_complex:
        return False
    # left limit at x_i followed by the right value at x_i
    sequence = np.column_stack((g.left_limits, g.values)).ravel()[1:]
    if np.any(sequence < 0) or np.any(np.diff(sequence) > 0):
        return False
    for model in (g.head, g.tail):
        if model is None or model.is_zero:
            continue
        if model.oscillating or model.coefficient < 0 or model.exponent > 0:
            return False
    return True


def booton_check(f: SampledFunction, p: float, q: float) -> CheckResult:
    """
    ||f||_{L^q_t(p,q)} / ||f||_{L^(p,q)}.

    For nonincreasing f both norms coincide and the ratio must equal 1 within
    ``booton_rtol``; otherwise the check passes when the ratio is finite. Both
    norms are taken of the same piecewise-linear view of |f|.

    Raises:
        DomainError: Unless 1 < p < inf and 1 <= q <= inf, or p = q = inf
        NotGeneralMonotoneError: If f fails GM certification
    """
    endpoint = math.isinf(p) and math.isinf(q)
    if not endpoint and not (1.0 < p < math.inf and q >= 1):
        raise DomainError("Booton check needs 1 < p < inf and 1 <= q <= inf, or p = q = inf",
                          details={"p": p, "q": q})
    _require_gm(f)
    g = modulus_view(f)
    weighted = power_weighted_norm(g, SpaceSpec(p=p, q=q).t_exponent, q)
    lorentz = lorentz_norm(g, p, q)
    ratio, flag = norm_ratio(weighted, lorentz)
    monotone = _is_nonincreasing(g)
    threshold = settings.booton_rtol if monotone else None
    if flag == "zero" or flag == "both-infinite":
        passed = True
    elif monotone:
        passed = flag == "ok" and abs(ratio - 1.0) <= settings.booton_rtol
    else:
        passed = flag == "ok"
    if flag == "ok" and math.isinf(q):
        flag = "sup-norm"
    return CheckResult(
        check="booton",
        passed=passed,
        value=ratio,
        threshold=threshold,
        flag=flag,
        message=f"||f||_t(p,q) / ||f||_(p,q) = {ratio:.12g}" + (" (nonincreasing)" if monotone else ""),
        details={"p": p, "q": q, "weighted_norm": weighted, "lorentz_norm": lorentz, "nonincreasing": monotone},
    )


# -- Hardy's inequalities ------------------------------------------------------------


def _extended_grid(f: SampledFunction) -> np.ndarray:
    ratio = float(f.metadata.get("ratio", f.max_ratio))
    grid = geometric_grid(f.x_min * 2.0 ** -_HARDY_EXTENSION, f.x_max * 2.0 ** _HARDY_EXTENSION, ratio)
    return insert_nodes(grid, f.grid.tolist())


def _with_models(modulus: SampledFunction) -> SampledFunction:
    head = modulus.head if modulus.head is not None else fit_head(modulus)
    tail = modulus.tail if modulus.tail is not None else fit_tail(modulus)
    return replace(modulus, head=head, tail=tail)


def _inner_primitive(modulus: SampledFunction, points: np.ndarray) -> Optional[SampledFunction]:
    """G(y) = int_0^y |f(x)| dx/x tabulated on ``points``; None when it diverges."""
    head = modulus.head
    if not head.is_zero and head.exponent <= 0:
        return None
    values = antiderivative(modulus, points, -1.0)
    limit = float(values[-1]) + modulus.tail.signed_integral(float(points[-1]), math.inf, -1.0)
    if not np.all(np.isfinite(values)):
        return None
    head_model = PowerLaw.zero() if head.is_zero else PowerLaw(head.coefficient / head.exponent, head.exponent)
    tail_model = PowerLaw(limit, 0.0) if math.isfinite(limit) else None
    G = SampledFunction(grid=points, values=values, interp=Interpolation.CUBIC, head=head_model, tail=tail_model)
    return G if tail_model is not None else replace(G, tail=fit_tail(G))


def _outer_primitive(modulus: SampledFunction, points: np.ndarray) -> Optional[SampledFunction]:
    """T(y) = int_y^inf |f(x)| dx/x tabulated on ``points``; None when it diverges."""
    tail = modulus.tail
    if not tail.is_zero and tail.exponent >= 0:
        return None
    body = replace(modulus, head=PowerLaw.zero())
    from_window = antiderivative(body, points, -1.0)
    end = float(antiderivative(body, np.array([modulus.x_max]), -1.0)[0])
    total = end + tail.signed_integral(modulus.x_max, math.inf, -1.0)
    values = total - from_window
    below = points < modulus.x_min
    if np.any(below):
        values[below] = total + np.array([modulus.head.signed_integral(x, modulus.x_min, -1.0) for x in points[below]])
    if not np.all(np.isfinite(values)):
        return None
    values = np.maximum(values, 0.0)
    tail_model = PowerLaw.zero() if tail.is_zero else PowerLaw(tail.coefficient / -tail.exponent, tail.exponent)
    T = SampledFunction(grid=points, values=values, interp=Interpolation.CUBIC, tail=tail_model)
    return replace(T, head=fit_head(T))


def _hardy_side(primitive: Optional[SampledFunction], rhs: float, exponent: float, q: float) -> Tuple[float, str]:
    if math.isinf(rhs):
        return math.inf, "inconclusive"
    if rhs == 0:
        return 0.0, "ok"
    if primitive is None:
        return math.inf, "inconclusive"
    lhs = lq_integral(primitive, q, exponent)
    return lhs / rhs, "ok"


def hardy_check(f: SampledFunction, sigma: float, q: float) -> HardyResult:
    """
    Both Hardy inequalities with dx/x measures:

        int (y^-s int_0^y |f| dx/x)^q dy/y <= s^-q int (x^-s |f|)^q dx/x
        int (y^s int_y^inf |f| dx/x)^q dy/y <= s^-q int (x^s |f|)^q dx/x

    The primitives are tabulated exactly on the window grid extended by
    ``_HARDY_EXTENSION`` octaves at both ends. A divergent right-hand side
    makes that side inconclusive.

    Raises:
        DomainError: If sigma <= 0 or q is outside [1, inf)
    """
    if not sigma > 0 or not math.isfinite(sigma):
        raise DomainError("Hardy check needs sigma > 0", details={"sigma": sigma})
    if not 1.0 <= q < math.inf:
        raise DomainError("Hardy check needs 1 <= q < inf", details={"q": q})
    modulus = _with_models(modulus_view(f))
    points = _extended_grid(modulus)
    head_exponent = -sigma * q - 1.0
    tail_exponent = sigma * q - 1.0
    head_rhs = lq_integral(modulus, q, head_exponent)
    tail_rhs = lq_integral(modulus, q, tail_exponent)
    head_ratio, head_flag = _hardy_side(
        _inner_primitive(modulus, points) if math.isfinite(head_rhs) and head_rhs > 0 else None,
        head_rhs, head_exponent, q,
    )
    tail_ratio, tail_flag = _hardy_side(
        _outer_primitive(modulus, points) if math.isfinite(tail_rhs) and tail_rhs > 0 else None,
        tail_rhs, tail_exponent, q,
    )
    result = HardyResult(
        sigma=sigma,
        q=q,
        head_ratio=head_ratio,
        tail_ratio=tail_ratio,
        threshold=sigma ** -q,
        head_flag=head_flag,
        tail_flag=tail_flag,
    )
    logger.info(f"Hardy check sigma={sigma}, q={q}: head {head_ratio:.6g} ({head_flag}), "
                f"tail {tail_ratio:.6g} ({tail_flag}), threshold {result.threshold:.6g}")
    return result


# -- Fourier corollaries ----------------------------------------------------------------


def fourier_equivalence(
    line: LineSamples,
    p: float,
    q: float,
    transform_settings: Optional[TransformSettings] = None,
) -> FourierEquivalenceResult:
    """
    Weighted and Lorentz norms of f and its Fourier transform on the line.

    weighted: || |x|^(1/p' - 1/q) f^ ||_q against || |x|^(1/p - 1/q) f ||_q;
    Lorentz: ||f^||_(p',q) against ||f||_(p,q).

    Raises:
        DomainError: Unless 1 < p < inf and q >= 1
        PreconditionError: If f is complex-valued
    """
    if not 1.0 < p < math.inf or not q >= 1:
        raise DomainError("Fourier equivalence needs 1 < p < inf and q >= 1", details={"p": p, "q": q})
    if line.positive.is_complex or line.negative.is_complex:
        raise PreconditionError("real-valued", "Fourier equivalence is stated for real-valued f")
    spec = SpaceSpec(p=p, q=q)
    transform = fourier_1d(line, transform_settings)
    weighted_f = norm_on_line(line.positive, line.negative, spec.t_exponent, q)
    weighted_fhat = norm_on_line(transform.positive, transform.negative, spec.inv_conjugate - spec.inv_q, q)
    lorentz_f = lorentz_norm_on_line(line.positive, line.negative, p, q)
    lorentz_fhat = lorentz_norm_on_line(transform.positive, transform.negative, spec.conjugate, q)
    return FourierEquivalenceResult(
        p=p,
        q=q,
        weighted_f=weighted_f,
        weighted_fhat=weighted_fhat,
        lorentz_f=lorentz_f,
        lorentz_fhat=lorentz_fhat,
        ratio_weighted=norm_ratio(weighted_fhat, weighted_f)[0],
        ratio_lorentz=norm_ratio(lorentz_fhat, lorentz_f)[0],
    )


def radial_equivalence(
    f0: SampledFunction,
    n: int,
    beta: float,
    q: float,
    transform_settings: Optional[TransformSettings] = None,
) -> RadialEquivalenceResult:
    """
    int |x|^(-beta q) |f^(x)|^q dx against int |x|^(gamma q) |f(x)|^q dx on R^n.

    Both sides are radial integrals, |S^(n-1)| int_0^inf r^(n-1) ... dr.

    Raises:
        PreconditionError: If beta is outside the admissible range
    """
    params = radial_weight_params(n, q, beta)
    if not params.admissible:
        raise PreconditionError(
            "radial-admissibility",
            f"beta={beta} violates the {params.violated} bound of ({params.lower:.6g}, {params.upper:.6g})",
            details=params.model_dump(),
        )
    sphere = 2.0 * math.pi ** (n / 2.0) / special.gamma(n / 2.0)
    transform = radial_fourier(f0, n, transform_settings)
    transform_side = sphere * lq_integral(transform, q, -beta * q + n - 1.0)
    function_side = sphere * lq_integral(f0, q, params.gamma * q + n - 1.0)
    return RadialEquivalenceResult(
        params=params,
        transform_side=transform_side,
        function_side=function_side,
        ratio=norm_ratio(transform_side, function_side)[0],
    )


# -- maximal function and Parseval verdicts ------------------------------------------------


def maximal_check(
    g: SampledFunction,
    p: float,
    q: float,
    phi: Optional[CutoffSpec] = None,
    alpha: Optional[float] = None,
    transform_settings: Optional[TransformSettings] = None,
) -> CheckResult:
    """
    Maximal bound with the doubling weight x^(q/p - 1), plus the averaging
    Lorentz bound for H_alpha g when ``alpha`` is given and p > 1.

    Raises:
        DomainError: If q is not finite
        PreconditionError: Naming the first hypothesis of the maximal theorem that fails
    """
    if not 1.0 <= q < math.inf or not p > 0:
        raise DomainError("Maximal check needs p > 0 and 1 <= q < inf", details={"p": p, "q": q})
    weight = WeightFunction.power(q / p - 1.0)
    bound = maximal_bound_check(g, weight, q, phi)
    details = {"p": p, "q": q, "weight": weight.describe(), **bound.model_dump()}
    passed = bound.passed
    if alpha is not None and p > 1:
        averaging = maximal_lorentz_check(g, alpha, p, q, phi, transform_settings)
        details["averaging_lorentz"] = averaging.model_dump()
        passed = passed and averaging.passed
    return CheckResult(
        check="maximal",
        passed=passed,
        value=bound.ratio,
        threshold=settings.window_drift_tol,
        flag="ok" if math.isfinite(bound.ratio) else "infinite-ratio",
        message=f"||g||_L^q(w) / ||M Phi_g||_L^q(w) = {bound.ratio:.6g}, drift {bound.drift}",
        details=details,
    )


def parseval_verdict(
    f: SampledFunction,
    G: SampledFunction,
    alpha: OrderLike,
    transform_settings: Optional[TransformSettings] = None,
) -> CheckResult:
    """Parseval residual against max(quadrature budget, 1e-6 |int f g|)."""
    result = parseval_check(f, G, alpha, transform_settings)
    threshold = max(result.budget, _PARSEVAL_RTOL * max(abs(result.lhs), abs(result.rhs)))
    passed = result.residual <= threshold
    return CheckResult(
        check="parseval",
        passed=passed,
        value=result.residual,
        threshold=threshold,
        flag="ok" if passed else "residual-exceeded",
        message=f"|int f g - int F G| = {result.residual:.3g}",
        details=result.model_dump(),
    )
