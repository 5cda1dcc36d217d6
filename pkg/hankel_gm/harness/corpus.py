"""Function corpus for equivalence experiments."""

import logging
from typing import Callable, Dict, List, Tuple

import numpy as np

from hankel_gm.analysis.funcrep import AnalyticFunction, FunctionKind, parse_descriptor
from hankel_gm.core.exceptions import ConfigurationError, DomainError
from hankel_gm.schemas import ExperimentConfig

logger = logging.getLogger(__name__)

# Ten GM members, four of them sign-changing.
DEFAULT_CORPUS: Tuple[str, ...] = (
    "power-truncated:a=0.5,b=1.0",
    "power-truncated:a=0.25,b=4.0",
    "indicator:b=1.0",
    "power-exponential:a=0.25,rate=1.0",
    "smooth-broken-power:a=0.25,b=2.0",
    "smooth-broken-power:a=0.0,b=1.5",
    "dyadic-sign-power:a=0.25,b=8.0",
    "dyadic-sign-power:a=0.0,b=16.0",
    "dyadic-sign-power:a=0.6,b=4.0",
    "sign-change-exponential:a=0.25,x0=2.0",
)

_FALLBACK_SIGN_CHANGING = "dyadic-sign-power:a=0.25,b=8.0"


def _uniform(rng: np.random.Generator, lo: float, hi: float) -> float:
    # rounded so the descriptor string reproduces the value exactly
    return round(float(rng.uniform(lo, hi)), 4)


def _random_power_truncated(rng: np.random.Generator) -> AnalyticFunction:
    return AnalyticFunction(kind=FunctionKind.POWER_TRUNCATED,
                            params={"a": _uniform(rng, 0.0, 0.45), "b": 2.0 ** int(rng.integers(-2, 3))})


def _random_dyadic_sign(rng: np.random.Generator) -> AnalyticFunction:
    return AnalyticFunction(kind=FunctionKind.DYADIC_SIGN_POWER,
                            params={"a": _uniform(rng, 0.0, 0.45), "b": 2.0 ** int(rng.integers(1, 5))})


def _random_power_exponential(rng: np.random.Generator) -> AnalyticFunction:
    return AnalyticFunction(kind=FunctionKind.POWER_EXPONENTIAL,
                            params={"a": _uniform(rng, 0.0, 0.45), "rate": round(2.0 ** float(rng.uniform(-1, 1)), 4)})


def _random_broken_power(rng: np.random.Generator) -> AnalyticFunction:
    a = _uniform(rng, 0.0, 0.45)
    return AnalyticFunction(kind=FunctionKind.SMOOTH_BROKEN_POWER, params={"a": a, "b": round(a + 1.0 + float(rng.uniform()), 4)})


def _random_sign_change(rng: np.random.Generator) -> AnalyticFunction:
    return AnalyticFunction(kind=FunctionKind.SIGN_CHANGE_EXPONENTIAL,
                            params={"a": _uniform(rng, 0.0, 0.45), "x0": round(2.0 ** float(rng.uniform(-1, 2)), 4)})


_RANDOM_FAMILIES: Dict[str, Callable[[np.random.Generator], AnalyticFunction]] = {
    "power-truncated": _random_power_truncated,
    "dyadic-sign-power": _random_dyadic_sign,
    "power-exponential": _random_power_exponential,
    "smooth-broken-power": _random_broken_power,
    "sign-change-exponential": _random_sign_change,
}


def random_members(count: int, seed: int) -> List[AnalyticFunction]:
    """``count`` GM corpus members drawn from a numpy Generator seeded with ``seed``."""
    rng = np.random.default_rng(seed)
    families = list(_RANDOM_FAMILIES.values())
    return [families[int(rng.integers(len(families)))](rng) for _ in range(count)]


def parse_corpus(descriptors: List[str]) -> List[AnalyticFunction]:
    """
    Parse corpus descriptors.

    Raises:
        ConfigurationError: If a descriptor is malformed
    """
    functions = []
    for text in descriptors:
        try:
            functions.append(parse_descriptor(text))
        except DomainError as e:
            raise ConfigurationError(f"Invalid corpus entry: {e.message}", details={"descriptor": text}) from e
    return functions


def build_corpus(config: ExperimentConfig) -> List[AnalyticFunction]:
    """
    Corpus of an experiment: the configured descriptors plus seeded random members.

    A sign-changing member is appended when none is present. Duplicate
    descriptors are dropped, keeping the first occurrence.
    """
    functions = parse_corpus(config.corpus)
    functions.extend(random_members(config.random_corpus, config.seed))
    if not any(f.changes_sign for f in functions):
        logger.warning(f"Corpus has no sign-changing member; adding {_FALLBACK_SIGN_CHANGING}")
        functions.append(parse_descriptor(_FALLBACK_SIGN_CHANGING))
    unique: Dict[str, AnalyticFunction] = {}
    for f in functions:
        unique.setdefault(f.descriptor(), f)
    logger.debug(f"Corpus of {len(unique)} functions (seed {config.seed})")
    return list(unique.values())
