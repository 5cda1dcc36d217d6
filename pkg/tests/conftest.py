"""Shared fixtures; the small TESTING settings profile is selected before any import."""

import os

os.environ.setdefault("TESTING", "1")

import numpy as np  # noqa: E402
import pytest  # noqa: E402

from hankel_gm.analysis.funcrep import Interpolation, PowerLaw, SampledFunction, parse_descriptor, sample  # noqa: E402
from hankel_gm.analysis.transform import TransformSettings  # noqa: E402


def sample_descriptor(descriptor: str, lo: int = -10, hi: int = 8, per_octave: int = 16, interp=None) -> SampledFunction:
    """Sample a descriptor on [2^lo, 2^hi] with ``per_octave`` nodes per octave."""
    return sample(parse_descriptor(descriptor), 2.0 ** lo, 2.0 ** hi, 2.0 ** (1.0 / per_octave), interp)


def step_function(breaks, heights) -> SampledFunction:
    """Right-continuous step function: heights[i] on [breaks[i], breaks[i+1]), zero beyond."""
    grid = np.asarray(breaks, dtype=float)
    values = np.append(np.asarray(heights, dtype=float), 0.0)
    return SampledFunction(
        grid=grid,
        values=values,
        interp=Interpolation.CONSTANT_LEFT,
        head=PowerLaw.zero(),
        tail=PowerLaw.zero(),
    )


@pytest.fixture
def transform_settings() -> TransformSettings:
    """Coarse y grid for quick transforms."""
    return TransformSettings.from_settings(y_min_exp=-4, y_max_exp=4, y_nodes_per_octave=4)


@pytest.fixture
def indicator() -> SampledFunction:
    return sample_descriptor("indicator:b=1.0")


@pytest.fixture
def sign_changing() -> SampledFunction:
    return sample_descriptor("dyadic-sign-power:a=0.25,b=8.0")
