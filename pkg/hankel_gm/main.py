"""Command-line entry point: ``hankel-gm transform|norm|gm-certify|equiv|check``."""

import argparse
import json
import logging
import math
import sys
from pathlib import Path
from typing import Any, Dict, Optional, Sequence

import numpy as np

from hankel_gm.analysis.funcrep import SampledFunction, parse_descriptor, sample, save_csv
from hankel_gm.analysis.gm import certify_gm
from hankel_gm.analysis.norms import LorentzFormula, SpaceSpec, lorentz_norm, weighted_lebesgue_norm
from hankel_gm.analysis.transform import TransformSettings, hankel_transform
from hankel_gm.config.settings import settings
from hankel_gm.core.exceptions import (
    EXIT_NUMERICAL,
    EXIT_OK,
    CheckFailedError,
    ConfigurationError,
    DomainError,
    HankelGMException,
)
from hankel_gm.harness.checks import (
    booton_check,
    hardy_check,
    lorentz_pitt_check,
    maximal_check,
    norm_ratio,
    parseval_verdict,
    pitt_check,
    radial_equivalence,
)
from hankel_gm.harness.config_file import ConfigFileParser, load_experiment_config
from hankel_gm.harness.executor import ExperimentExecutor, band_summary, dilation_spread
from hankel_gm.harness.reporting import emit_report
from hankel_gm.schemas import CheckResult, ExperimentConfig

logger = logging.getLogger(__name__)

DEFAULT_FUNCTION = "power-truncated:a=0.5,b=1.0"
CHECK_KINDS = ("pitt", "hardy", "booton", "maximal", "lorentz", "parseval", "radial")


def _number(text: str) -> float:
    """Float parser accepting ``inf``."""
    try:
        return float(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from e


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subparser per command."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="KEY=VALUE experiment file")
    common.add_argument("--out", help="Output path")
    common.add_argument("--format", choices=("csv", "json"), help="Report format")
    common.add_argument("--alpha", type=_number, help="Bessel order alpha >= -1/2")
    common.add_argument("--p", type=_number, default=2.0, help="Exponent p")
    common.add_argument("--q", type=_number, default=2.0, help="Exponent q (inf allowed)")
    common.add_argument("--m", type=_number, help="Lower truncation M")
    common.add_argument("--n", type=_number, help="Upper truncation N")
    common.add_argument("--tail", choices=("ibp", "integrate-by-parts", "direct"), help="Tail integration mode")
    common.add_argument("--tol", type=_number, help="Quadrature tolerance")
    common.add_argument("--fn", default=DEFAULT_FUNCTION, help="Function descriptor kind:key=value,...")

    parser = argparse.ArgumentParser(prog="hankel-gm", description="Hankel transforms of general monotone functions")
    parser.add_argument("--version", action="version", version=f"{settings.app_name} {settings.app_version}")
    commands = parser.add_subparsers(dest="command", required=True)
    commands.add_parser("transform", parents=[common], help="Tabulate H_alpha f as y,re,im,err_est")
    norm = commands.add_parser("norm", parents=[common], help="Weighted-Lebesgue and Lorentz norms of f")
    norm.add_argument("--formula", choices=[f.value for f in LorentzFormula], default=LorentzFormula.REARRANGEMENT.value)
    norm.add_argument("--cross-check", action="store_true", help="Require both Lorentz formulas to agree to CROSS_FORMULA_RTOL")
    gm = commands.add_parser("gm-certify", parents=[common], help="Certify the GM inequality")
    gm.add_argument("--lam", type=_number, default=2.0, help="GM constant lambda = 2^nu")
    commands.add_parser("equiv", parents=[common], help="Run an equivalence experiment")
    check = commands.add_parser("check", parents=[common], help="Run one inequality check")
    check.add_argument("--kind", choices=CHECK_KINDS, required=True)
    check.add_argument("--sigma", type=_number, default=0.5, help="Hardy exponent sigma > 0")
    check.add_argument("--dim", type=int, default=3, help="Dimension for the radial check")
    check.add_argument("--beta", type=_number, default=0.0, help="Radial weight exponent beta")
    check.add_argument("--partner", help="Second descriptor for the Parseval check")
    return parser


def _experiment_config(args: argparse.Namespace) -> ExperimentConfig:
    """Experiment file (or defaults) with the command-line overrides applied."""
    config = load_experiment_config(args.config) if args.config else ConfigFileParser.parse_values({})
    overrides: Dict[str, Any] = {
        "alpha": args.alpha,
        "output": args.out,
        "format": args.format,
        "tail_mode": args.tail,
        "tol": args.tol,
        "m": args.m,
        "n": args.n,
    }
    update = {k: v for k, v in overrides.items() if v is not None}
    try:
        return ExperimentConfig(**{**config.model_dump(), **update})
    except ValueError as e:
        raise ConfigurationError(f"Invalid command-line override: {e}") from e


def _sample(descriptor: str, config: ExperimentConfig) -> SampledFunction:
    lo, hi, per_octave = config.window
    return sample(parse_descriptor(descriptor), 2.0 ** lo, 2.0 ** hi, 2.0 ** (1.0 / per_octave))


def _emit(document: Dict[str, Any], out: Optional[str]) -> None:
    text = json.dumps(document, indent=2, sort_keys=True, default=str)
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def _run_transform(args: argparse.Namespace, config: ExperimentConfig) -> int:
    f = _sample(args.fn, config)
    ts = ExperimentExecutor(config).transform_settings
    F = hankel_transform(f, config.alpha, ts)
    out = Path(args.out) if args.out else Path(settings.output_dir) / "transform.csv"
    save_csv(F, out, extra_columns={"err_est": np.asarray(F.metadata["error_estimate"])}, abscissa="y")
    logger.info(f"Wrote H_{config.alpha} of {args.fn} to {out}")
    return EXIT_OK


def _run_norm(args: argparse.Namespace, config: ExperimentConfig) -> int:
    f = _sample(args.fn, config)
    weighted = weighted_lebesgue_norm(f, SpaceSpec(p=args.p, q=args.q))
    lorentz = lorentz_norm(f, args.p, args.q, LorentzFormula(args.formula), cross_check=args.cross_check)
    _emit({"fn": args.fn, "p": args.p, "q": args.q, "weighted_lebesgue": weighted, "lorentz": lorentz,
           "formula": args.formula}, args.out)
    return EXIT_OK


def _run_gm_certify(args: argparse.Namespace, config: ExperimentConfig) -> int:
    certificate = certify_gm(_sample(args.fn, config), args.lam)
    _emit({"fn": args.fn, **certificate.model_dump(exclude={"scales", "ratios"}),
           "sup_ratio": certificate.sup_ratio}, args.out)
    return EXIT_OK


def _run_equiv(args: argparse.Namespace, config: ExperimentConfig) -> int:
    executor = ExperimentExecutor(config)
    report = executor.run()
    out = config.output or str(Path(settings.output_dir) / f"equivalence.{config.format}")
    emit_report(report, out, config.format)
    bands = band_summary(report, config.band_max_ratio)
    for band in bands:
        logger.info(f"alpha={band.alpha} p={band.p} q={band.q} {band.kind}: "
                    f"[{band.minimum:.4g}, {band.maximum:.4g}] spread {band.spread:.4g}")
    drifting = [s for s in dilation_spread(report, config.dilation_rtol) if not s.within_tolerance]
    for spread in drifting:
        logger.warning(f"{spread.fn} p={spread.p} q={spread.q} {spread.kind}: spread {spread.spread:.3g} "
                       f"across dilations exceeds {spread.tolerance:.3g}")
    failed = [row for row in report.rows if row.flag == "infinite-ratio"]
    outside = sum(not b.within_band for b in bands)
    if failed or outside or drifting:
        raise CheckFailedError(
            "equivalence",
            f"{len(failed)} infinite ratios, {outside} bands out of range, {len(drifting)} dilation columns drifting",
            details={
                "infinite_rows": [row.fn for row in failed],
                "dilation_drift": [s.model_dump() for s in drifting],
                "report": out,
            },
        )
    return EXIT_OK


def _hardy_result(args: argparse.Namespace, f: SampledFunction) -> CheckResult:
    if math.isinf(args.q):
        raise DomainError("Hardy check needs finite q", details={"q": args.q})
    result = hardy_check(f, args.sigma, args.q)
    return CheckResult(
        check="hardy",
        passed=result.passed,
        value=max(result.head_ratio, result.tail_ratio),
        threshold=result.threshold,
        flag="inconclusive" if "inconclusive" in (result.head_flag, result.tail_flag) else "ok",
        message=f"Hardy ratios head {result.head_ratio:.6g}, tail {result.tail_ratio:.6g}",
        details=result.model_dump(),
    )


def _radial_result(args: argparse.Namespace, config: ExperimentConfig, ts: TransformSettings) -> CheckResult:
    result = radial_equivalence(_sample(args.fn, config), args.dim, args.beta, args.q, ts)
    ratio, flag = norm_ratio(result.transform_side, result.function_side)
    return CheckResult(
        check="radial",
        passed=flag != "infinite-ratio",
        value=ratio,
        flag=flag,
        message=f"radial sides {result.transform_side:.6g} / {result.function_side:.6g}",
        details=result.model_dump(),
    )


def _run_check(args: argparse.Namespace, config: ExperimentConfig) -> int:
    ts = ExperimentExecutor(config).transform_settings if args.kind != "booton" else None
    f = _sample(args.fn, config) if args.kind != "radial" else None
    alpha = config.alpha
    if args.kind == "pitt":
        result = pitt_check(f, alpha, args.p, args.q, ts)
    elif args.kind == "hardy":
        result = _hardy_result(args, f)
    elif args.kind == "booton":
        result = booton_check(f, args.p, args.q)
    elif args.kind == "maximal":
        result = maximal_check(f, args.p, args.q, alpha=alpha, transform_settings=ts)
    elif args.kind == "lorentz":
        result = lorentz_pitt_check(f, alpha, args.p, args.q, ts)
    elif args.kind == "parseval":
        partner = args.partner or f"gaussian-hermite:alpha={alpha!r}"
        result = parseval_verdict(f, _sample(partner, config), alpha, ts)
    else:
        result = _radial_result(args, config, ts)
    _emit({"fn": args.fn, **result.model_dump()}, args.out)
    if not result.passed:
        raise CheckFailedError(result.check, result.message, details={"flag": result.flag, "value": result.value})
    return EXIT_OK


_COMMANDS = {
    "transform": _run_transform,
    "norm": _run_norm,
    "gm-certify": _run_gm_certify,
    "equiv": _run_equiv,
    "check": _run_check,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run the CLI and return its exit code."""
    logging.basicConfig(
        level=getattr(logging, settings.log_level.upper()),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )
    args = build_parser().parse_args(list(argv) if argv is not None else None)
    try:
        config = _experiment_config(args)
        return _COMMANDS[args.command](args, config)
    except HankelGMException as e:
        logger.error(f"{e.error_type}: {e.message}")
        print(json.dumps(e.to_dict(), indent=2, sort_keys=True, default=str), file=sys.stderr)
        return e.exit_code
    except Exception as e:
        logger.error(f"Unhandled exception: {e}", exc_info=True)
        document: Dict[str, Any] = {
            "error": "INTERNAL_ERROR",
            "message": "An unexpected error occurred",
            "code": "INTERNAL_ERROR",
            "details": {"exception_type": type(e).__name__},
        }
        print(json.dumps(document, indent=2, sort_keys=True), file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
