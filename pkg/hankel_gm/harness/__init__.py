"""Experiment harness: corpus, configuration files, checks, executor and reports."""

from hankel_gm.harness.checks import (
    booton_check,
    fourier_equivalence,
    hardy_check,
    lorentz_pitt_check,
    maximal_check,
    parseval_verdict,
    pitt_check,
    radial_equivalence,
)
from hankel_gm.harness.config_file import load_experiment_config
from hankel_gm.harness.corpus import DEFAULT_CORPUS, build_corpus
from hankel_gm.harness.executor import ExperimentExecutor, band_summary, run_equivalence, window_stability
from hankel_gm.harness.reporting import emit_report, load_report

__all__ = [
    "DEFAULT_CORPUS",
    "ExperimentExecutor",
    "band_summary",
    "booton_check",
    "build_corpus",
    "emit_report",
    "fourier_equivalence",
    "hardy_check",
    "load_experiment_config",
    "load_report",
    "lorentz_pitt_check",
    "maximal_check",
    "parseval_verdict",
    "pitt_check",
    "radial_equivalence",
    "run_equivalence",
    "window_stability",
]
