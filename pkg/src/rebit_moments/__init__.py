"""Determinantal moments and separability estimates for two-rebit density matrices."""

__version__ = "0.1.0"

from .density import (  # noqa: E402
    DensityMatrix,
    InvalidStateError,
    determinant,
    partial_transpose,
    ppt_separable,
)

__all__ = ["__version__", "DensityMatrix", "InvalidStateError", "determinant",
           "partial_transpose", "ppt_separable"]
