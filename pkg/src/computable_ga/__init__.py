"""Geometric algebra toolkit for checking computability of grade-projected expressions.

Submodules: ``algebra`` (Cl3 multivectors and rotors), ``representation``
(matrix representations), ``expressions`` and ``rewrite`` (the expression
DSL and computability checker), ``lattice`` (discretized fields), ``quantum``
(catalog operators) and ``suite``/``cli`` (verification front end).
"""

from .algebra import Multivector, Rotor, geometric_product, grade_projection, reverse, rotor_exp, sandwich
from .expressions import GaExpr, parse, pretty
from .rewrite import ComputabilityReport, check_computable, normalize, transform_under

__version__ = "0.1.0"

__all__ = [
    "ComputabilityReport",
    "GaExpr",
    "Multivector",
    "Rotor",
    "check_computable",
    "geometric_product",
    "grade_projection",
    "normalize",
    "parse",
    "pretty",
    "reverse",
    "rotor_exp",
    "sandwich",
    "transform_under",
]
