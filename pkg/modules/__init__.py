"""
piquad - Package Initialization
"""

from .bounds import lower_bound
from .eliminate import eliminate_all
from .geometry import QuadRule, ReferenceSimplex, SymOrbit
from .initgen import generate_initial_guess
from .rules_io import parse_rule, read_rule, serialize_rule, write_rule
from .solver import lm_solve
from .verify import validate_rule

__all__ = [
    'QuadRule',
    'ReferenceSimplex',
    'SymOrbit',
    'eliminate_all',
    'generate_initial_guess',
    'lm_solve',
    'lower_bound',
    'parse_rule',
    'read_rule',
    'serialize_rule',
    'validate_rule',
    'write_rule',
]
