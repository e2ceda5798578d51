"""
Exception hierarchy for the quadrature toolkit.

Every error raised by the library derives from QuadratureError. Errors caused
by bad input additionally derive from ValueError so callers that only expect
the builtin keep working.
"""
from typing import Optional


class QuadratureError(Exception):
    """Base class for all toolkit errors."""


class GeometryError(QuadratureError, ValueError):
    """Singular vertex matrix or mismatched coordinate shapes."""


class DegeneracyError(GeometryError):
    """Orbit parameters collapse the orbit onto a smaller symmetry pattern."""


class InteriorityError(GeometryError):
    """A node lies on or outside the boundary of the reference simplex."""


class OrbitInputError(QuadratureError, ValueError):
    """A barycentric point that cannot be classified."""


class BasisError(QuadratureError, ValueError):
    """Basis evaluation requested outside its domain."""


class BoundsDomainError(QuadratureError, ValueError):
    """Degree or node count outside the domain of the bound formulas."""


class GenerationError(QuadratureError):
    """The line-LG initial guess could not be classified into orbits."""


class NumericError(QuadratureError):
    """A numerical kernel (root finder, SVD) failed."""


class UsageError(QuadratureError, ValueError):
    """Invalid command line, configuration file or degree range."""


class RuleParseError(QuadratureError, ValueError):
    """Malformed rule file; carries the offending line number."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
