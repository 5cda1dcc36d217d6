"""KEY=VALUE experiment files, parsed into ExperimentConfig."""

import logging
import math
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple, Union

from dotenv import dotenv_values
from pydantic import ValidationError

from hankel_gm.config.settings import parse_comma_separated, settings
from hankel_gm.core.exceptions import ConfigurationError
from hankel_gm.harness.corpus import DEFAULT_CORPUS
from hankel_gm.schemas import ExperimentConfig, SpacePair

logger = logging.getLogger(__name__)


class ConfigFileParser:
    """Parser for flat experiment files such as::

        CORPUS=power-truncated:a=0.5,b=1;dyadic-sign-power:a=0.25,b=8
        ALPHA=0.5
        SPACES=2:2,1.5:inf
        WINDOW=-20:20:16
    """

    KEYS = (
        "CORPUS", "ALPHA", "SPACES", "DILATIONS", "WINDOW", "Y_WINDOW", "TAIL", "TOL", "M", "N",
        "OUTPUT", "FORMAT", "SEED", "RANDOM_CORPUS", "WORKERS", "BAND_MAX_RATIO", "DILATION_RTOL",
    )

    @staticmethod
    def parse_values(values: Dict[str, Optional[str]], source: str = "<values>") -> ExperimentConfig:
        """
        Build an ExperimentConfig from raw KEY=VALUE pairs.

        Args:
            values: Raw values, as returned by ``dotenv_values``
            source: Name used in error messages

        Returns:
            Validated experiment configuration; missing keys take the settings defaults

        Raises:
            ConfigurationError: On unknown keys, malformed values or failed validation
        """
        unknown = sorted(k for k in values if k.upper() not in ConfigFileParser.KEYS)
        if unknown:
            raise ConfigurationError(f"Unknown keys in {source}: {', '.join(unknown)}",
                                     details={"unknown": unknown, "allowed": list(ConfigFileParser.KEYS)})
        raw = {k.upper(): v for k, v in values.items() if v is not None and v.strip() != ""}
        fields: Dict[str, Any] = {
            "corpus": list(DEFAULT_CORPUS),
            "spaces": [SpacePair(p=2.0, q=2.0)],
            "dilations": settings.dilations,
            "window": (settings.window_min_exp, settings.window_max_exp, settings.nodes_per_octave),
            "y_window": (settings.y_min_exp, settings.y_max_exp, settings.y_nodes_per_octave),
            "tail_mode": settings.tail_mode,
            "tol": settings.transform_tol,
            "workers": settings.max_workers,
            "band_max_ratio": settings.band_max_ratio,
            "dilation_rtol": settings.dilation_rtol,
        }
        converters: Dict[str, Tuple[str, Callable[[str], Any]]] = {
            "CORPUS": ("corpus", ConfigFileParser._parse_corpus),
            "ALPHA": ("alpha", float),
            "SPACES": ("spaces", ConfigFileParser._parse_spaces),
            "DILATIONS": ("dilations", lambda v: [float(c) for c in parse_comma_separated(v)]),
            "WINDOW": ("window", ConfigFileParser._parse_window),
            "Y_WINDOW": ("y_window", ConfigFileParser._parse_window),
            "TAIL": ("tail_mode", str.strip),
            "TOL": ("tol", float),
            "M": ("m", float),
            "N": ("n", float),
            "OUTPUT": ("output", str.strip),
            "FORMAT": ("format", lambda v: v.strip().lower()),
            "SEED": ("seed", int),
            "RANDOM_CORPUS": ("random_corpus", int),
            "WORKERS": ("workers", int),
            "BAND_MAX_RATIO": ("band_max_ratio", float),
            "DILATION_RTOL": ("dilation_rtol", float),
        }
        for key, text in raw.items():
            name, convert = converters[key]
            try:
                fields[name] = convert(text)
            except ValueError as e:
                raise ConfigurationError(f"Malformed value for {key} in {source}: {text!r}",
                                         details={"key": key, "value": text}) from e
        try:
            return ExperimentConfig(**fields)
        except ValidationError as e:
            raise ConfigurationError(f"Invalid experiment configuration in {source}",
                                     details={"errors": e.errors(include_url=False, include_context=False)}) from e

    @staticmethod
    def _parse_corpus(value: str) -> List[str]:
        items = [item.strip() for item in value.split(";") if item.strip()]
        if not items:
            raise ValueError("empty corpus")
        return items

    @staticmethod
    def _parse_spaces(value: str) -> List[SpacePair]:
        pairs = []
        for item in parse_comma_separated(value):
            p_text, sep, q_text = item.partition(":")
            if not sep:
                raise ValueError(f"space '{item}' is not of the form p:q")
            pairs.append(SpacePair(p=float(p_text), q=float(q_text)))
        return pairs

    @staticmethod
    def _parse_window(value: str) -> Tuple[int, int, int]:
        parts = value.split(":")
        if len(parts) != 3:
            raise ValueError(f"window '{value}' is not of the form min_exp:max_exp:nodes_per_octave")
        lo, hi, per_octave = (int(p) for p in parts)
        return lo, hi, per_octave


def load_experiment_config(path: Union[str, Path]) -> ExperimentConfig:
    """
    Read an experiment file with python-dotenv.

    Raises:
        ConfigurationError: If the file is missing or invalid
    """
    source = Path(path)
    if not source.is_file():
        raise ConfigurationError(f"Experiment file not found: {source}", details={"path": str(source)})
    config = ConfigFileParser.parse_values(dotenv_values(source), str(source))
    logger.info(f"Loaded experiment {source}: {len(config.corpus)} descriptors, {len(config.spaces)} spaces")
    return config


def spaces_text(config: ExperimentConfig) -> str:
    """SPACES value reproducing the configured pairs."""
    def number(v: float) -> str:
        return "inf" if math.isinf(v) else repr(v)

    return ",".join(f"{number(s.p)}:{number(s.q)}" for s in config.spaces)
