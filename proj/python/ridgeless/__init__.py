"""Distributed ridgeless regression: simulation, exact risk and theory curves."""

from ._ridgeless import (
    CSV_HEADER,
    BoundUndefinedError,
    ConfigError,
    DataError,
    DivisibilityError,
    ExperimentConfig,
    NumericError,
    ParameterError,
    RidgelessError,
    Spectrum,
    conditional_risk,
    divisors,
    excess_risk,
    fit_distributed,
    min_norm_fit,
    presets,
    run_realdata,
    run_sweep,
    run_theory,
    sweep_csv,
    theory,
)

__all__ = [
    "CSV_HEADER",
    "BoundUndefinedError",
    "ConfigError",
    "DataError",
    "DivisibilityError",
    "ExperimentConfig",
    "NumericError",
    "ParameterError",
    "RidgelessError",
    "Spectrum",
    "conditional_risk",
    "divisors",
    "excess_risk",
    "fit_distributed",
    "min_norm_fit",
    "presets",
    "run_realdata",
    "run_sweep",
    "run_theory",
    "sweep_csv",
    "theory",
]
