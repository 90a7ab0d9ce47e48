"""Arithmetic height functions over finitely generated fields Q(z1, ..., zd)."""

from .polyring import (
    MultiPoly,
    ProjectivePoint,
    RationalFunction,
    coeff_norm,
    deg_i,
    gcd,
    normalize_projective,
    parse_poly,
    parse_rational,
)

__version__ = "0.1.0"

__all__ = [
    "MultiPoly",
    "ProjectivePoint",
    "RationalFunction",
    "coeff_norm",
    "deg_i",
    "gcd",
    "normalize_projective",
    "parse_poly",
    "parse_rational",
]
