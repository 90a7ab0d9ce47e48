"""Weierstrass curves over Q or Q(t) with exact arithmetic and canonical heights.

The canonical height is taken with respect to ``O(2 * origin)`` through the
x-coordinate map, so it is the limit of ``4^-n h(x(2^n P))`` where ``h`` is a
naive height on ``P^1`` over the base field.

    >>> E = EllipticCurve.from_coeffs([0, 0, 0, 0, 1])
    >>> P = E.point(2, 3)
    >>> ec_mul(E, P, 6).is_infinity
    True
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .archimedean import MCParams
from .errors import CurveError
from .heights import HeightEstimate, PolarizationChoice, naive_height
from .polyring import (
    MultiPoly,
    RationalFunction,
    divexact,
    gcd,
    normalize_projective,
    parse_rational,
)

__all__ = [
    "EllipticCurve",
    "ECPoint",
    "INFINITY",
    "ec_add",
    "ec_neg",
    "ec_mul",
    "x_height",
    "canonical_height",
    "is_torsion",
    "CanonicalHeight",
    "TorsionVerdict",
]


def _field_elt(x, nvars):
    if isinstance(x, RationalFunction):
        if x.nvars != nvars:
            raise CurveError("coefficient lives in a different field")
        return x
    if isinstance(x, str):
        return parse_rational(x, nvars)
    if isinstance(x, (int, Fraction)):
        return RationalFunction.from_fraction(x, nvars)
    raise TypeError(f"cannot use {x!r} as a field element")


@dataclass(frozen=True)
class ECPoint:
    """Affine point ``(x, y)``; both ``None`` for the point at infinity."""

    x: RationalFunction | None = None
    y: RationalFunction | None = None

    @property
    def is_infinity(self) -> bool:
        return self.x is None

    def __str__(self):
        if self.is_infinity:
            return "O"
        return f"({self.x}, {self.y})"


INFINITY = ECPoint()


@dataclass(frozen=True)
class EllipticCurve:
    """``y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6`` over Q (nvars=0) or Q(t)."""

    a1: RationalFunction
    a2: RationalFunction
    a3: RationalFunction
    a4: RationalFunction
    a6: RationalFunction
    nvars: int = 0
    disc: RationalFunction = field(init=False, compare=False)
    b_invariants: tuple = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        if self.nvars not in (0, 1):
            raise CurveError("curves are supported over Q or Q(t) only")
        a1, a2, a3, a4, a6 = self.a1, self.a2, self.a3, self.a4, self.a6
        b2 = a1 * a1 + a2 * 4
        b4 = a4 * 2 + a1 * a3
        b6 = a3 * a3 + a6 * 4
        b8 = a1 * a1 * a6 + a2 * a6 * 4 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
        disc = -(b2 * b2 * b8) - b4 * b4 * b4 * 8 - b6 * b6 * 27 + b2 * b4 * b6 * 9
        if not disc:
            raise CurveError("singular curve (zero discriminant)")
        object.__setattr__(self, "disc", disc)
        object.__setattr__(self, "b_invariants", (b2, b4, b6, b8))

    @classmethod
    def from_coeffs(cls, coeffs: Sequence, nvars: int = 0) -> "EllipticCurve":
        if len(coeffs) != 5:
            raise CurveError("expected [a1, a2, a3, a4, a6]")
        return cls(*(_field_elt(c, nvars) for c in coeffs), nvars=nvars)

    def contains(self, P: ECPoint) -> bool:
        if P.is_infinity:
            return True
        x, y = P.x, P.y
        lhs = y * y + self.a1 * x * y + self.a3 * y
        rhs = x * x * x + self.a2 * x * x + self.a4 * x + self.a6
        return lhs == rhs

    def point(self, x, y) -> ECPoint:
        P = ECPoint(_field_elt(x, self.nvars), _field_elt(y, self.nvars))
        if not self.contains(P):
            raise CurveError(f"{P} is not on the curve")
        return P

    def __str__(self):
        return f"[{self.a1}, {self.a2}, {self.a3}, {self.a4}, {self.a6}]"


def ec_neg(E: EllipticCurve, P: ECPoint) -> ECPoint:
    if P.is_infinity:
        return P
    return ECPoint(P.x, -P.y - E.a1 * P.x - E.a3)


def ec_add(E: EllipticCurve, P: ECPoint, Q: ECPoint) -> ECPoint:
    """Chord-and-tangent addition."""
    if P.is_infinity:
        return Q
    if Q.is_infinity:
        return P
    x1, y1, x2, y2 = P.x, P.y, Q.x, Q.y
    if x1 == x2:
        if not (y1 + y2 + E.a1 * x2 + E.a3):
            return INFINITY
        denom = y1 * 2 + E.a1 * x1 + E.a3
        lam = (x1 * x1 * 3 + E.a2 * x1 * 2 + E.a4 - E.a1 * y1) / denom
        nu = (-(x1 * x1 * x1) + E.a4 * x1 + E.a6 * 2 - E.a3 * y1) / denom
    else:
        dx = x2 - x1
        lam = (y2 - y1) / dx
        nu = (y1 * x2 - y2 * x1) / dx
    x3 = lam * lam + E.a1 * lam - E.a2 - x1 - x2
    y3 = -(lam + E.a1) * x3 - nu - E.a3
    return ECPoint(x3, y3)


def ec_mul(E: EllipticCurve, P: ECPoint, m: int) -> ECPoint:
    """``m * P`` by double-and-add."""
    if m < 0:
        return ec_mul(E, ec_neg(E, P), -m)
    result = INFINITY
    addend = P
    while m:
        if m & 1:
            result = ec_add(E, result, addend)
        m >>= 1
        if m:
            addend = ec_add(E, addend, addend)
    return result


def x_height(E: EllipticCurve, P: ECPoint,
             pol: PolarizationChoice = PolarizationChoice(),
             params: MCParams = MCParams()) -> HeightEstimate:
    """Naive height of ``(num x(P) : den x(P))`` in ``P^1`` over the base field."""
    if P.is_infinity:
        raise CurveError("the point at infinity has no x-coordinate")
    return naive_height(normalize_projective([P.x.num, P.x.den]), pol, params)


def _duplication_polys(E: EllipticCurve):
    # b-invariants times a common denominator, as integer polynomials
    bs = E.b_invariants
    den = MultiPoly.constant(1, E.nvars)
    for b in bs:
        den = divexact(den * b.den, gcd(den, b.den))
    return [b.num * divexact(den, b.den) for b in bs], den


def x_double(E: EllipticCurve, num: MultiPoly, den: MultiPoly):
    """x-coordinate of ``2Q`` from ``x(Q) = num/den``; None when ``2Q = O``.

    Uses the duplication formula
    ``x(2Q) = (x^4 - b4 x^2 - 2 b6 x - b8) / (4x^3 + b2 x^2 + 2 b4 x + b6)``
    homogenized in ``(num, den)``, with one gcd per call.
    """
    (b2, b4, b6, b8), L = _duplication_polys(E)
    n2, d2 = num * num, den * den
    nd = num * den
    top = L * n2 * n2 - b4 * n2 * d2 - b6 * nd * d2 * 2 - b8 * d2 * d2
    bottom = L * n2 * nd * 4 + b2 * n2 * d2 + b4 * nd * d2 * 2 + b6 * d2 * d2
    if not bottom:
        return None
    g = gcd(top, bottom)
    if bottom.leading_coeff() < 0:
        g = -g
    return divexact(top, g), divexact(bottom, g)


def _xpoint_height(num, den, pol, params):
    return naive_height(normalize_projective([num, den]), pol, params)


@dataclass
class CanonicalHeight:
    """Tate-limit result.

    ``tail`` estimates the remaining distance to the limit: with ``C`` the
    largest observed ``4^k |s_k - s_(k-1)|`` the later terms sum to at most
    ``C / (3 * 4^n)`` if ``C`` bounds every later ``|h(2Q) - 4h(Q)|``.  The
    observed maximum underestimates that constant, so ``tail`` is
    ``C / 4^n`` (a safety factor of 3).  ``error`` adds the scaled Monte
    Carlo standard error.  Neither is rigorous.
    """

    value: float
    error: float
    tail: float
    last_diff: float
    mc_stderr: float
    converged: bool
    torsion: bool = False
    table: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "value": self.value,
            "error": self.error,
            "tail": self.tail,
            "last_diff": self.last_diff,
            "mc_stderr": self.mc_stderr,
            "converged": self.converged,
            "torsion": self.torsion,
            "table": [dict(zip(("n", "h_n", "scaled", "diff"), row))
                      for row in self.table],
        }


MIN_DOUBLINGS = 3


def default_ncap(E: EllipticCurve) -> int:
    return 12 if E.nvars == 0 else 8


def canonical_height(E: EllipticCurve, P: ECPoint,
                     pol: PolarizationChoice = PolarizationChoice(),
                     tol: float = 1e-3, n_cap: int | None = None,
                     params: MCParams = MCParams()) -> CanonicalHeight:
    """``lim 4^-n h(x(2^n P))``.

    Returns exactly 0 when some ``2^n P`` is the origin or repeats an
    earlier x-coordinate (both certify torsion).  Otherwise stops once at least ``MIN_DOUBLINGS`` doublings are done and two
    consecutive scaled differences and the tail bound are all below
    ``tol``.
    """
    if n_cap is None:
        n_cap = default_ncap(E)
    if P.is_infinity:
        return CanonicalHeight(0.0, 0.0, 0.0, 0.0, 0.0, True, torsion=True)
    num, den = P.x.num, P.x.den
    # x(2^a P) = x(2^b P) means (2^a -+ 2^b) P = O
    seen = {(num, den)}
    h = _xpoint_height(num, den, pol, params)
    prev = h.total
    table = [(0, h.total, h.total, None)]
    below = 0
    diff = tail = float("inf")
    growth = 0.0
    mc = h.stderr
    for n in range(1, n_cap + 1):
        doubled = x_double(E, num, den)
        if doubled is None:
            table.append((n, None, 0.0, None))
            return CanonicalHeight(0.0, 0.0, 0.0, 0.0, 0.0, True, torsion=True,
                                   table=table)
        num, den = doubled
        if (num, den) in seen:
            table.append((n, None, 0.0, None))
            return CanonicalHeight(0.0, 0.0, 0.0, 0.0, 0.0, True, torsion=True,
                                   table=table)
        seen.add((num, den))
        h = _xpoint_height(num, den, pol, params)
        scale = 4.0 ** -n
        scaled = h.total * scale
        diff = abs(scaled - prev)
        growth = max(growth, diff / scale)
        tail = growth * scale
        mc = h.stderr * scale
        table.append((n, h.total, scaled, diff))
        prev = scaled
        below = below + 1 if diff < tol else 0
        if n >= MIN_DOUBLINGS and below >= 2 and tail < tol:
            return CanonicalHeight(scaled, tail + mc, tail, diff, mc, True,
                                   table=table)
    return CanonicalHeight(prev, tail + mc, tail, diff, mc, False, table=table)


@dataclass
class TorsionVerdict:
    """``verdict`` is True (certified torsion), False, or None (undecided)."""

    verdict: bool | None
    certificate: int | None = None
    height: CanonicalHeight | None = None

    def as_dict(self) -> dict:
        return {
            "verdict": {True: "torsion", False: "non-torsion", None: "undecided"}[
                self.verdict],
            "certificate": self.certificate,
            "height": self.height.as_dict() if self.height else None,
        }


def is_torsion(E: EllipticCurve, P: ECPoint,
               pol: PolarizationChoice = PolarizationChoice(),
               m_cap: int = 16, params: MCParams = MCParams(),
               tol: float = 1e-3, n_cap: int | None = None,
               threshold: float = 3.0) -> TorsionVerdict:
    """Exact order search up to ``m_cap``, then the canonical-height test."""
    Q = P
    for m in range(1, m_cap + 1):
        if Q.is_infinity:
            return TorsionVerdict(True, m)
        Q = ec_add(E, Q, P)
    ch = canonical_height(E, P, pol, tol, n_cap, params)
    if ch.torsion:
        return TorsionVerdict(True, None, ch)
    if ch.value > threshold * ch.error:
        return TorsionVerdict(False, None, ch)
    return TorsionVerdict(None, None, ch)
