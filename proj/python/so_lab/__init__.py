"""Hopfield self-optimization lab."""

from ._so_lab import (
    ConfigError,
    ContractError,
    FitError,
    IoError,
    __version__,
    cli,
    energy,
    four_city_tour,
    fit_baseline,
    modular_weights,
    novelty,
    recall_rate,
    run_so,
    sweep,
    value,
)

__all__ = [
    "ConfigError",
    "ContractError",
    "FitError",
    "IoError",
    "__version__",
    "cli",
    "energy",
    "four_city_tour",
    "fit_baseline",
    "modular_weights",
    "novelty",
    "recall_rate",
    "run_so",
    "sweep",
    "value",
]
