"""MLP initialization experiments: Xavier and Kaiming weights, backprop, LOO evaluation."""

from ._core import (
    CLASS_COUNT,
    FEATURE_COUNT,
    DataError,
    DivergedTrainingError,
    Error,
    FormatError,
    Hyperparams,
    InitDist,
    InitFamily,
    InitScheme,
    IoError,
    Model,
    ParseError,
    ShapeError,
    Topology,
    ValidationError,
    evaluate,
    initialize,
    preset_hyperparams,
    propagate_variance,
    run_experiment,
    synthesize,
    target_variance,
    uniform_bound,
)

__version__ = "0.1.0"
