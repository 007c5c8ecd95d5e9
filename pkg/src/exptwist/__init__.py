"""Numerical verification of the exact identities and oscillatory transforms
behind a twisted GL(3) x GL(2) moment computation."""

from .arith import FactoredModulus, additive_char, mod_inverse, moebius_divisor_scan
from .characters import DirichletCharacter, enumerate_characters, gauss_sum, product_character
from .errors import ConfigInvalid

__all__ = [
    "ConfigInvalid",
    "DirichletCharacter",
    "FactoredModulus",
    "additive_char",
    "enumerate_characters",
    "gauss_sum",
    "mod_inverse",
    "moebius_divisor_scan",
    "product_character",
]
