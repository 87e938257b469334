"""Exact rational pipeline: cube integration, intermediate functions, moments."""

from .intermediate import IntermediateFunction, intermediate_function
from .moments import MomentValue, coefficient_C, det_moment_closed_form, moment

__all__ = ["IntermediateFunction", "intermediate_function", "MomentValue", "moment",
           "coefficient_C", "det_moment_closed_form"]
