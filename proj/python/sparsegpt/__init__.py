"""Blocked SparseGPT pruning with lazy updates, flop accounting and a cost model."""

from ._core import (
    ConfigError,
    DegenerateCalibrationError,
    DegenerateDiagonalError,
    DomainError,
    Error,
    FormatError,
    InsufficientDataError,
    OmegaCurve,
    ShapeError,
    SingularityError,
    cost_report,
    generate_instance,
    inverse_hessian,
    matmul,
    optimize_block_exponent,
    predicted_flops,
    prune,
)

__all__ = [
    "ConfigError",
    "DegenerateCalibrationError",
    "DegenerateDiagonalError",
    "DomainError",
    "Error",
    "FormatError",
    "InsufficientDataError",
    "OmegaCurve",
    "ShapeError",
    "SingularityError",
    "cost_report",
    "generate_instance",
    "inverse_hessian",
    "matmul",
    "optimize_block_exponent",
    "predicted_flops",
    "prune",
]
