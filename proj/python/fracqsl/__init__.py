"""Time-fractional Jaynes-Cummings dynamics and quantum speed limits."""

from ._core import (
    EvalConfig,
    JCParams,
    QslPoint,
    __version__,
    detect_revivals,
    evolve,
    figure,
    ml,
    ml_split,
    ml_time_derivative,
    qsl,
    qsl_ratio_formula,
    sweep,
    tfse_residual,
)

__all__ = [
    "EvalConfig",
    "JCParams",
    "QslPoint",
    "__version__",
    "detect_revivals",
    "evolve",
    "figure",
    "ml",
    "ml_split",
    "ml_time_derivative",
    "qsl",
    "qsl_ratio_formula",
    "sweep",
    "tfse_residual",
]
