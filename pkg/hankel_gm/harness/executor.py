"""Equivalence experiment executor over (function, p, q, c) tuples."""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple, Union

from hankel_gm.analysis.funcrep import AnalyticFunction, SampledFunction, sample
from hankel_gm.analysis.gm import certify_gm
from hankel_gm.analysis.transform import TransformSettings, hankel_transform
from hankel_gm.config.settings import settings
from hankel_gm.core.exceptions import ConfigurationError, NotGeneralMonotoneError, SamplingError
from hankel_gm.harness.checks import error_budget, forward_norms, lorentz_norms, norm_ratio
from hankel_gm.harness.config_file import spaces_text
from hankel_gm.harness.corpus import build_corpus
from hankel_gm.schemas import (
    BandSummary,
    DilationSpread,
    ExperimentConfig,
    RatioReport,
    RatioRow,
    SkippedFunction,
    SpacePair,
    WindowStability,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class _Task:
    index: int
    function: AnalyticFunction
    c: float


class ExperimentExecutor:
    """Runs an equivalence experiment and assembles its RatioReport."""

    def __init__(self, config: ExperimentConfig, transform_settings: Optional[TransformSettings] = None):
        """
        Initialize the experiment executor.

        Args:
            config: Experiment description
            transform_settings: Transform settings; built from the config when omitted

        Raises:
            ConfigurationError: If a (p, q) pair is outside the admissible range
        """
        self.config = config
        self.transform_settings = transform_settings or self._transform_settings(config)
        self._validate_spaces()

    @staticmethod
    def _transform_settings(config: ExperimentConfig) -> TransformSettings:
        y_min, y_max, y_per_octave = config.y_window
        try:
            return TransformSettings.from_settings(
                m=config.m,
                n=config.n,
                tail_mode=config.tail_mode,
                tol=config.tol,
                y_min_exp=y_min,
                y_max_exp=y_max,
                y_nodes_per_octave=y_per_octave,
            )
        except ValueError as e:
            raise ConfigurationError(f"Invalid transform settings: {e}") from e

    def _validate_spaces(self) -> None:
        alpha = self.config.alpha
        lower = 1.0 / (alpha + 1.5)
        for space in self.config.spaces:
            if not lower < space.p < math.inf or not space.q >= 1:
                raise ConfigurationError(
                    f"Space (p={space.p}, q={space.q}) is outside 1/(alpha+3/2) < p < inf, 1 <= q <= inf",
                    details={"alpha": alpha, "p": space.p, "q": space.q, "p_lower": lower},
                )

    def run(self) -> RatioReport:
        """
        Execute the experiment.

        Functions failing GM certification are skipped with a diagnostic. Tasks
        run on ``config.workers`` threads; rows are assembled in tuple order.
        """
        corpus = build_corpus(self.config)
        admitted: List[AnalyticFunction] = []
        skipped: List[SkippedFunction] = []
        for function in corpus:
            outcome = self._admit(function)
            if isinstance(outcome, SkippedFunction):
                logger.warning(f"Skipping {outcome.fn}: {outcome.reason}")
                skipped.append(outcome)
            else:
                admitted.append(function)

        tasks = [_Task(i, f, c) for i, f in enumerate(admitted) for c in self.config.dilations]
        logger.info(f"Running {len(tasks)} transform tasks on {self.config.workers} worker(s)")
        with ThreadPoolExecutor(max_workers=self.config.workers) as pool:
            measured = list(pool.map(self._measure, tasks))
        by_task: Dict[Tuple[int, float], Dict[SpacePair, RatioRow]] = {
            (task.index, task.c): rows for task, rows in zip(tasks, measured)
        }
        rows = [
            by_task[(i, c)][space]
            for i in range(len(admitted))
            for space in self.config.spaces
            for c in self.config.dilations
        ]
        return RatioReport(
            schema_version=settings.report_schema_version,
            alpha=self.config.alpha,
            rows=rows,
            skipped=skipped,
            metadata=self._metadata(corpus),
        )

    def _window(self) -> Tuple[float, float, float]:
        lo, hi, per_octave = self.config.window
        return 2.0 ** lo, 2.0 ** hi, 2.0 ** (1.0 / per_octave)

    def _sample(self, function: AnalyticFunction) -> SampledFunction:
        return sample(function, *self._window())

    def _admit(self, function: AnalyticFunction) -> Union[AnalyticFunction, SkippedFunction]:
        """Certify a corpus member on the undilated window."""
        descriptor = function.descriptor()
        try:
            certify_gm(self._sample(function))
        except NotGeneralMonotoneError as e:
            profile = e.profile
            return SkippedFunction(
                fn=descriptor,
                reason="not-general-monotone",
                details={"sup_ratio": profile.sup_ratio if profile is not None else None, "message": e.message},
            )
        except SamplingError as e:
            return SkippedFunction(fn=descriptor, reason="sampling", details=e.details)
        return function

    def _measure(self, task: _Task) -> Dict[SpacePair, RatioRow]:
        """All (p, q) rows of one function at one dilation."""
        descriptor = task.function.descriptor()
        f = self._sample(task.function.dilated(task.c))
        F = hankel_transform(f, self.config.alpha, self.transform_settings)
        budget = error_budget(F)
        rows = {}
        for space in self.config.spaces:
            ratio_lebesgue, lebesgue_flag = norm_ratio(*forward_norms(f, F, space.p, space.q))
            ratio_lorentz: Optional[float] = None
            lorentz_flag = "lorentz-n/a"
            if space.p > 1:
                ratio_lorentz, lorentz_flag = norm_ratio(*lorentz_norms(f, F, space.p, space.q))
            rows[space] = RatioRow(
                fn=descriptor,
                p=space.p,
                q=space.q,
                c=task.c,
                ratio_lebesgue=ratio_lebesgue,
                ratio_lorentz=ratio_lorentz,
                err_budget=budget,
                flag=_row_flag(lebesgue_flag, lorentz_flag, space.q),
            )
        logger.debug(f"Measured {descriptor} at c={task.c}")
        return rows

    def _metadata(self, corpus: List[AnalyticFunction]) -> Dict[str, object]:
        config = self.config
        ts = self.transform_settings
        return {
            "corpus": [f.descriptor() for f in corpus],
            "spaces": spaces_text(config),
            "dilations": list(config.dilations),
            "window": list(config.window),
            "y_window": [ts.y_min_exp, ts.y_max_exp, ts.y_nodes_per_octave],
            "tail_mode": ts.tail_mode.value,
            "tol": ts.tol,
            "dilation_rtol": config.dilation_rtol,
            "seed": config.seed,
            "random_corpus": config.random_corpus,
        }


def _row_flag(lebesgue_flag: str, lorentz_flag: str, q: float) -> str:
    flags = (lebesgue_flag, lorentz_flag)
    if lebesgue_flag == "zero":
        return "zero"
    if "infinite-ratio" in flags:
        return "infinite-ratio"
    if "both-infinite" in flags:
        return "both-infinite"
    if lorentz_flag == "lorentz-n/a":
        return "lorentz-n/a"
    return "sup-norm" if math.isinf(q) else "ok"


def run_equivalence(
    config: ExperimentConfig, transform_settings: Optional[TransformSettings] = None
) -> RatioReport:
    """
    Forward weighted-Lebesgue and Lorentz ratios for every (function, p, q, c).

    Raises:
        ConfigurationError: If a configured space is not admissible
        ConvergenceError: If a transform does not settle
    """
    return ExperimentExecutor(config, transform_settings).run()


def _finite_ratios(report: RatioReport, space: Tuple[float, float], kind: str) -> List[float]:
    values = []
    for row in report.rows:
        if (row.p, row.q) != space or row.flag not in ("ok", "sup-norm"):
            continue
        value = row.ratio_lebesgue if kind == "lebesgue" else row.ratio_lorentz
        if value is not None and math.isfinite(value) and value > 0:
            values.append(value)
    return values


def band_summary(report: RatioReport, band_max_ratio: Optional[float] = None) -> List[BandSummary]:
    """Per (alpha, p, q) and norm kind, the max/min spread of the finite ratios across the corpus."""
    limit = settings.band_max_ratio if band_max_ratio is None else band_max_ratio
    spaces = list(dict.fromkeys((row.p, row.q) for row in report.rows))
    bands = []
    for space in spaces:
        for kind in ("lebesgue", "lorentz"):
            values = _finite_ratios(report, space, kind)
            if not values:
                continue
            spread = max(values) / min(values)
            bands.append(BandSummary(
                alpha=report.alpha,
                p=space[0],
                q=space[1],
                kind=kind,
                minimum=min(values),
                maximum=max(values),
                spread=spread,
                within_band=spread < limit,
            ))
    return bands


def dilation_spread(report: RatioReport, rtol: Optional[float] = None) -> List[DilationSpread]:
    """
    Per function and (p, q), the spread of each ratio column across the dilation ladder.

    Both ratios are invariant under f -> f(c.), so a column may spread by at
    most ``rtol`` plus twice the largest transform error budget among its rows.
    Only finite ratios of rows flagged ok or sup-norm take part.
    """
    limit = settings.dilation_rtol if rtol is None else rtol
    columns: Dict[Tuple[str, float, float], List[RatioRow]] = {}
    for row in report.rows:
        if row.flag in ("ok", "sup-norm"):
            columns.setdefault((row.fn, row.p, row.q), []).append(row)
    spreads = []
    for (fn, p, q), rows in columns.items():
        if len(rows) < 2:
            continue
        tolerance = limit + 2.0 * max(row.err_budget for row in rows)
        for kind in ("lebesgue", "lorentz"):
            values = [row.ratio_lebesgue if kind == "lebesgue" else row.ratio_lorentz for row in rows]
            if any(v is None or not math.isfinite(v) or v <= 0 for v in values):
                continue
            spread = max(values) / min(values) - 1.0
            spreads.append(DilationSpread(
                fn=fn,
                p=p,
                q=q,
                kind=kind,
                dilations=[row.c for row in rows],
                spread=spread,
                tolerance=tolerance,
                within_tolerance=spread <= tolerance,
            ))
    return spreads


def _grown(window: Tuple[int, int, int]) -> Tuple[int, int, int]:
    lo, hi, per_octave = window
    half = (hi - lo + 1) // 2
    return lo - half, hi + half, per_octave


def _ratio_drift(report: RatioReport, grown: RatioReport) -> float:
    reference = {(r.fn, r.p, r.q, r.c): r for r in report.rows}
    drift = 0.0
    for row in grown.rows:
        base = reference.get((row.fn, row.p, row.q, row.c))
        if base is None:
            continue
        for before, after in ((base.ratio_lebesgue, row.ratio_lebesgue), (base.ratio_lorentz, row.ratio_lorentz)):
            if before is None or after is None or not math.isfinite(before) or before == 0:
                continue
            drift = max(drift, abs(after - before) / before)
    return drift


def window_stability(config: ExperimentConfig) -> WindowStability:
    """
    Re-run the experiment with both windows doubled in octave width.

    Stable when every band is within ``band_max_ratio`` in both runs and no
    individual ratio drifts by more than ``window_drift_tol``.
    """
    report = run_equivalence(config)
    grown_config = config.model_copy(update={"window": _grown(config.window), "y_window": _grown(config.y_window)})
    grown_report = run_equivalence(grown_config)
    bands = band_summary(report, config.band_max_ratio)
    grown_bands = band_summary(grown_report, config.band_max_ratio)
    drift = _ratio_drift(report, grown_report)
    stable = drift <= settings.window_drift_tol and all(b.within_band for b in bands + grown_bands)
    logger.info(f"Window stability: drift {drift:.3g}, stable={stable}")
    return WindowStability(bands=bands, grown_bands=grown_bands, drift=drift, stable=stable)
