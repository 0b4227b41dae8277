import numpy as np
import pytest

from liquidcard.data import Dataset
from liquidcard.scorecard import CharacteristicSpec, DiscreteAttribute, ModelSpec
from liquidcard.synth import SynthConfig, generate

# The knot layout of the case-study characteristic, at half scale so that
# smoothness parameters up to 1e10 stay inside the solver's conditioning
# guard (the roughness matrix scales with the inverse cube of the range).
CHAR965_KNOTS = tuple(k / 2 for k in (-2950.0, -950.0, -750.0, -550.0, -400.0, -300.0, -200.0, -100.0, 80.0, 1425.0))
CHAR965_FULL_KNOTS = (-2950.0, -950.0, -750.0, -550.0, -400.0, -300.0, -200.0, -100.0, 80.0, 1425.0)


def char965_spec(pattern: str = "ascending", ridge: float = 0.01) -> ModelSpec:
    char = CharacteristicSpec(
        name="char965",
        column="char965",
        liquid_knots=CHAR965_KNOTS,
        trailing_discrete=(
            DiscreteAttribute(label="above", lo=CHAR965_KNOTS[-1], hi=None, lo_open=True, hi_open=True),
        ),
        pattern=pattern,
    )
    return ModelSpec(characteristics=(char,), ridge_lambda=ridge, delta=1.0)


def char965_data(seed: int = 11, n_rows: int = 20000, noise_sd: float = 0.5):
    config = SynthConfig.from_dict(
        {
            "seed": seed,
            "n_rows": n_rows,
            "noise_sd": noise_sd,
            "characteristics": [
                {
                    "name": "char965",
                    "range": [CHAR965_KNOTS[0], CHAR965_KNOTS[-1]],
                    "curve": {
                        "type": "pwl",
                        "points": [
                            [CHAR965_KNOTS[0], -0.9],
                            [-275.0, -0.25],
                            [40.0, 0.2],
                            [CHAR965_KNOTS[-1], 0.85],
                        ],
                    },
                    "sentinel": {"value": 99999.0, "prob": 0.05, "logodds": 0.5},
                }
            ],
        }
    )
    return generate(config)


@pytest.fixture(scope="session")
def char965_split():
    data, _ = char965_data()
    return data.split(0.25, seed=3)


def three_char_data(seed: int = 21, n_rows: int = 12000) -> Dataset:
    config = SynthConfig.from_dict(
        {
            "seed": seed,
            "n_rows": n_rows,
            "noise_sd": 0.6,
            "characteristics": [
                {"name": "a", "range": [0, 1000], "curve": {"type": "pwl", "points": [[0, -0.9], [400, 0.1], [1000, 0.8]]}},
                {"name": "b", "range": [-200, 300], "curve": {"type": "pwl", "points": [[-200, 0.5], [50, 0.0], [300, -0.6]]}},
                {"name": "c", "range": [0, 10], "curve": {"type": "pwl", "points": [[0, 0.0], [10, 0.0]]}},
            ],
        }
    )
    data, _ = generate(config)
    return data


def three_char_spec(ridge: float = 0.1) -> ModelSpec:
    chars = (
        CharacteristicSpec(name="a", column="a", liquid_knots=tuple(np.linspace(0, 1000, 8)), pattern="ascending"),
        CharacteristicSpec(name="b", column="b", liquid_knots=tuple(np.linspace(-200, 300, 8)), pattern="none"),
        CharacteristicSpec(
            name="c",
            column="c",
            leading_discrete=(DiscreteAttribute(label="lo", lo=None, hi=5.0),),
            trailing_discrete=(DiscreteAttribute(label="hi", lo=5.0, hi=None, lo_open=True, hi_open=True),),
        ),
    )
    return ModelSpec(characteristics=chars, ridge_lambda=ridge, delta=1.0)


@pytest.fixture(scope="session")
def three_char_split():
    return three_char_data().split(0.3, seed=9)
