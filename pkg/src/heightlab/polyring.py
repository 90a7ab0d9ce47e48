"""Exact sparse polynomials over the integers and their fraction field.

Elements of ``Q(z1, ..., zd)`` are stored as reduced quotients of
:class:`MultiPoly` objects.  Points of projective space over that field are
stored as tuples of coprime integer polynomials with a fixed sign, so two
representatives of the same point always compare equal.

    >>> f = parse_poly("(z1+1)*(z1-1)", 1)
    >>> str(f)
    'z1^2 - 1'
    >>> str(gcd(f, parse_poly("z1^2 - 2*z1 + 1", 1)))
    'z1 - 1'
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import reduce
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import NotDivisibleError, ParseError, ZeroPolynomialError

__all__ = [
    "MultiPoly",
    "RationalFunction",
    "ProjectivePoint",
    "parse_poly",
    "parse_rational",
    "deg_i",
    "coeff_norm",
    "gcd",
    "divexact",
    "normalize_projective",
]


def _grlex_key(exps):
    return (sum(exps), exps)


class MultiPoly:
    """Sparse polynomial in ``nvars`` variables with integer coefficients.

    ``terms`` maps exponent tuples to nonzero Python ints.  Instances are
    immutable; every arithmetic operation returns a new polynomial.
    """

    __slots__ = ("_terms", "_nvars", "_hash", "_sorted")

    def __init__(self, terms: Mapping[tuple, int] | None = None, nvars: int = 0):
        if nvars < 0:
            raise ValueError("nvars must be nonnegative")
        clean = {}
        if terms:
            for exps, coeff in terms.items():
                exps = tuple(int(e) for e in exps)
                if len(exps) != nvars:
                    raise ValueError(
                        f"exponent vector {exps} does not have length {nvars}"
                    )
                if any(e < 0 for e in exps):
                    raise ValueError(f"negative exponent in {exps}")
                if not isinstance(coeff, int):
                    raise TypeError(f"coefficient {coeff!r} is not an integer")
                if coeff:
                    clean[exps] = clean.get(exps, 0) + coeff
                    if not clean[exps]:
                        del clean[exps]
        self._terms = clean
        self._nvars = nvars
        self._hash = None
        self._sorted = None

    @classmethod
    def _raw(cls, terms, nvars):
        # trusted constructor: terms already clean
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._nvars = nvars
        obj._hash = None
        obj._sorted = None
        return obj

    @classmethod
    def constant(cls, c: int, nvars: int) -> "MultiPoly":
        c = int(c)
        return cls._raw({(0,) * nvars: c} if c else {}, nvars)

    @classmethod
    def var(cls, i: int, nvars: int) -> "MultiPoly":
        """The variable ``z_i`` (1-indexed)."""
        if not 1 <= i <= nvars:
            raise ValueError(f"variable index {i} out of range 1..{nvars}")
        exps = tuple(1 if k == i - 1 else 0 for k in range(nvars))
        return cls._raw({exps: 1}, nvars)

    @classmethod
    def from_dense(cls, coeffs: Sequence[int], i: int, nvars: int) -> "MultiPoly":
        """Univariate polynomial in ``z_i`` from low-to-high coefficients."""
        terms = {}
        for k, c in enumerate(coeffs):
            if c:
                exps = tuple(k if j == i - 1 else 0 for j in range(nvars))
                terms[exps] = int(c)
        return cls._raw(terms, nvars)

    @property
    def nvars(self) -> int:
        return self._nvars

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self) -> list:
        """(exponents, coefficient) pairs in descending graded-lex order."""
        if self._sorted is None:
            self._sorted = sorted(
                self._terms.items(), key=lambda t: _grlex_key(t[0]), reverse=True
            )
        return self._sorted

    def __iter__(self):
        return iter(self.items())

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self._terms)

    def constant_value(self) -> int:
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self._terms.get((0,) * self._nvars, 0)

    def variables(self) -> set:
        """1-based indices of the variables that actually occur."""
        out = set()
        for exps in self._terms:
            for k, e in enumerate(exps):
                if e:
                    out.add(k + 1)
        return out

    def deg(self, i: int) -> int:
        if not self._terms:
            raise ZeroPolynomialError("degree of the zero polynomial is undefined")
        if not 1 <= i <= self._nvars:
            raise ValueError(f"variable index {i} out of range 1..{self._nvars}")
        return max(exps[i - 1] for exps in self._terms)

    def degrees(self) -> tuple:
        if not self._terms:
            raise ZeroPolynomialError("degree of the zero polynomial is undefined")
        return tuple(
            max(exps[k] for exps in self._terms) for k in range(self._nvars)
        )

    def total_degree(self) -> int:
        if not self._terms:
            raise ZeroPolynomialError("degree of the zero polynomial is undefined")
        return max(sum(exps) for exps in self._terms)

    def coeff_norm(self) -> int:
        return max((abs(c) for c in self._terms.values()), default=0)

    def content(self) -> int:
        return reduce(math.gcd, self._terms.values(), 0)

    def leading_term(self) -> tuple:
        if not self._terms:
            raise ZeroPolynomialError("zero polynomial has no leading term")
        return self.items()[0]

    def leading_coeff(self) -> int:
        return self.leading_term()[1]

    def coeffs_in(self, i: int) -> dict:
        """Split into ``{power of z_i: coefficient polynomial free of z_i}``."""
        out = {}
        k = i - 1
        for exps, c in self._terms.items():
            p = exps[k]
            rest = exps[:k] + (0,) + exps[k + 1:]
            out.setdefault(p, {})[rest] = c
        return {p: MultiPoly._raw(t, self._nvars) for p, t in out.items()}

    # arithmetic

    def _coerce(self, other):
        if isinstance(other, MultiPoly):
            if other._nvars != self._nvars:
                raise ValueError(
                    f"mixing polynomials in {self._nvars} and {other._nvars} variables"
                )
            return other
        if isinstance(other, int):
            return MultiPoly.constant(other, self._nvars)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self._terms)
        for exps, c in other._terms.items():
            s = terms.get(exps, 0) + c
            if s:
                terms[exps] = s
            else:
                terms.pop(exps, None)
        return MultiPoly._raw(terms, self._nvars)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly._raw({e: -c for e, c in self._terms.items()}, self._nvars)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not self._terms or not other._terms:
            return MultiPoly._raw({}, self._nvars)
        if other.is_constant():
            c = other.constant_value()
            return MultiPoly._raw(
                {e: v * c for e, v in self._terms.items()}, self._nvars
            )
        if self.is_constant():
            return other * self
        terms = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = terms.get(e, 0) + c1 * c2
                if s:
                    terms[e] = s
                else:
                    del terms[e]
        return MultiPoly._raw(terms, self._nvars)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = MultiPoly.constant(1, self._nvars)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def scale_down(self, c: int) -> "MultiPoly":
        """Exact division of every coefficient by the integer ``c``."""
        out = {}
        for e, v in self._terms.items():
            q, r = divmod(v, c)
            if r:
                raise NotDivisibleError(f"{c} does not divide {self}")
            out[e] = q
        return MultiPoly._raw(out, self._nvars)

    def __eq__(self, other):
        if isinstance(other, int):
            other = MultiPoly.constant(other, self._nvars)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self._nvars == other._nvars and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self._nvars, frozenset(self._terms.items())))
        return self._hash

    def sort_key(self) -> tuple:
        """Total order used for deterministic output (graded-lex on terms)."""
        return tuple((_grlex_key(e), c) for e, c in self.items())

    def __repr__(self):
        return f"MultiPoly({str(self)!r}, nvars={self._nvars})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for idx, (exps, c) in enumerate(self.items()):
            mono = "*".join(
                f"z{k + 1}" if e == 1 else f"z{k + 1}^{e}"
                for k, e in enumerate(exps)
                if e
            )
            a = abs(c)
            if not mono:
                body = str(a)
            elif a == 1:
                body = mono
            else:
                body = f"{a}*{mono}"
            if idx == 0:
                parts.append(("-" if c < 0 else "") + body)
            else:
                parts.append((" - " if c < 0 else " + ") + body)
        return "".join(parts)

    # evaluation

    def evaluate(self, points) -> np.ndarray:
        """Evaluate at an ``(N, nvars)`` array of complex points.

        Coefficients are converted to floats, so callers with very large
        coefficients should rescale first (see ``scaled_floats``).
        """
        pts = np.asarray(points, dtype=complex)
        if pts.ndim == 1:
            pts = pts.reshape(-1, self._nvars)
        out = np.zeros(pts.shape[0], dtype=complex)
        for exps, c in self._terms.items():
            term = np.full(pts.shape[0], float(c), dtype=complex)
            for k, e in enumerate(exps):
                if e:
                    term *= pts[:, k] ** e
            out += term
        return out

    def as_float_terms(self, shift: int = 0):
        """(exponent array, float coefficient array) with coefficients ``c / 2**shift``."""
        items = self.items()
        exps = np.array([e for e, _ in items], dtype=np.int64).reshape(
            len(items), self._nvars
        )
        scale = 1 << shift
        coeffs = np.array([c / scale for _, c in items], dtype=float)
        return exps, coeffs


def deg_i(f: MultiPoly, i: int) -> int:
    return f.deg(i)


def coeff_norm(f: MultiPoly) -> int:
    return f.coeff_norm()


# ---------------------------------------------------------------------------
# division and gcd


def _normal_sign(f: MultiPoly) -> MultiPoly:
    if f and f.leading_coeff() < 0:
        return -f
    return f


def divexact(f: MultiPoly, g: MultiPoly) -> MultiPoly:
    """Quotient ``f / g``; raises :class:`NotDivisibleError` if inexact."""
    if not g:
        raise ZeroDivisionError("division by the zero polynomial")
    if not f:
        return MultiPoly._raw({}, f.nvars)
    if g.is_constant():
        return f.scale_down(g.constant_value())
    vs = f.variables() | g.variables()
    if len(vs) == 1:
        (v,) = vs
        q = _dup_div(_dense(f, v), _dense(g, v))
        if q is None:
            raise NotDivisibleError(f"{g} does not divide {f}")
        return MultiPoly.from_dense(q, v, f.nvars)
    lt_e, lt_c = g.leading_term()
    g_items = g.items()
    rem = dict(f._terms)
    quot = {}
    while rem:
        e = max(rem, key=_grlex_key)
        c = rem[e]
        de = tuple(a - b for a, b in zip(e, lt_e))
        if any(x < 0 for x in de) or c % lt_c:
            raise NotDivisibleError(f"{g} does not divide {f}")
        q = c // lt_c
        quot[de] = q
        for ge, gc in g_items:
            te = tuple(a + b for a, b in zip(ge, de))
            s = rem.get(te, 0) - q * gc
            if s:
                rem[te] = s
            else:
                rem.pop(te, None)
    return MultiPoly._raw(quot, f.nvars)


def _dense(f: MultiPoly, v: int) -> list:
    if not f:
        return []
    out = [0] * (f.deg(v) + 1)
    for exps, c in f._terms.items():
        out[exps[v - 1]] += c
    return out


def _dup_strip(a):
    while a and not a[-1]:
        a.pop()
    return a


def _dup_div(a, b):
    """Exact quotient of dense integer polynomials, or None."""
    a = list(a)
    n = len(b) - 1
    lb = b[-1]
    if len(a) - 1 < n:
        return None if any(a) else []
    q = [0] * (len(a) - n)
    for k in range(len(a) - 1, n - 1, -1):
        c = a[k]
        if not c:
            continue
        if c % lb:
            return None
        t = c // lb
        q[k - n] = t
        for j in range(n + 1):
            a[k - n + j] -= t * b[j]
    if any(a[:n]):
        return None
    return q


def _dup_content(a):
    return reduce(math.gcd, a, 0)


def _dup_primitive(a):
    c = _dup_content(a)
    if a[-1] < 0:
        c = -c
    return c, [x // c for x in a]


def _dup_prem(a, b):
    a = list(a)
    n = len(b) - 1
    lb = b[-1]
    while len(a) - 1 >= n and a:
        k = len(a) - 1
        lc = a[-1]
        a = [lb * x for x in a]
        for j in range(n + 1):
            a[k - n + j] -= lc * b[j]
        _dup_strip(a)
    return a


def _dup_prs_gcd(a, b):
    # a, b primitive with positive leading coefficient
    if len(a) < len(b):
        a, b = b, a
    while len(b) > 1:
        r = _dup_prem(a, b)
        if not r:
            return b
        a, b = b, _dup_primitive(r)[1]
    return [1]


def _dup_eval(a, x):
    acc = 0
    for c in reversed(a):
        acc = acc * x + c
    return acc


def _dup_heu_gcd(a, b):
    # a, b primitive; returns primitive gcd or None when the heuristic gives up
    bound = min(max(abs(c) for c in a), max(abs(c) for c in b))
    xi = 2 * bound + 29
    for _ in range(6):
        g_val = math.gcd(_dup_eval(a, xi), _dup_eval(b, xi))
        if g_val:
            coeffs = []
            half = xi // 2
            while g_val:
                r = g_val % xi
                if r > half:
                    r -= xi
                coeffs.append(r)
                g_val = (g_val - r) // xi
            g = _dup_strip(coeffs)
            if g:
                g = _dup_primitive(g)[1]
                if _dup_div(a, g) is not None and _dup_div(b, g) is not None:
                    return g
        xi = xi * 73794 // 27011
    return None


def _dup_gcd(a, b):
    """Primitive gcd (positive leading coefficient) times the content gcd."""
    if not a:
        return list(b)
    if not b:
        return list(a)
    ca, pa = _dup_primitive(a)
    cb, pb = _dup_primitive(b)
    c = math.gcd(ca, cb)
    if len(pa) == 1 or len(pb) == 1:
        return [c]
    g = _dup_heu_gcd(pa, pb)
    if g is None:
        g = _dup_prs_gcd(pa, pb)
    return [c * x for x in g]


def _content_in(f: MultiPoly, v: int):
    parts = f.coeffs_in(v)
    g = MultiPoly._raw({}, f.nvars)
    for p in sorted(parts):
        g = gcd(g, parts[p])
        if g.is_constant() and abs(g.constant_value()) == 1:
            break
    return g, parts


def _prem(a: MultiPoly, b: MultiPoly, v: int) -> MultiPoly:
    """Pseudo-remainder of ``a`` by ``b`` viewed as polynomials in ``z_v``."""
    bparts = b.coeffs_in(v)
    n = max(bparts)
    lb = bparts[n]
    xv = MultiPoly.var(v, a.nvars)
    r = a
    while r:
        m = r.deg(v)
        if m < n:
            break
        lr = r.coeffs_in(v)[m]
        r = lb * r - lr * (xv ** (m - n)) * b
    return r


def gcd(f: MultiPoly, g: MultiPoly) -> MultiPoly:
    """Greatest common divisor including integer content.

    The result is normalized to a positive graded-lex leading coefficient;
    ``gcd(0, 0)`` is the zero polynomial.
    """
    if f.nvars != g.nvars:
        raise ValueError("gcd of polynomials in different rings")
    if not f:
        return _normal_sign(g)
    if not g:
        return _normal_sign(f)
    if f.is_constant() and g.is_constant():
        return MultiPoly.constant(
            math.gcd(f.constant_value(), g.constant_value()), f.nvars
        )
    if f.is_constant():
        return MultiPoly.constant(math.gcd(f.constant_value(), g.content()), f.nvars)
    if g.is_constant():
        return MultiPoly.constant(math.gcd(g.constant_value(), f.content()), f.nvars)
    vs = f.variables() | g.variables()
    if len(vs) == 1:
        (v,) = vs
        return _normal_sign(
            MultiPoly.from_dense(_dup_gcd(_dense(f, v), _dense(g, v)), v, f.nvars)
        )
    v = max(vs)
    if v not in f.variables():
        f, g = g, f
    if v not in g.variables():
        cf, _ = _content_in(f, v)
        return gcd(cf, g)
    cf, _ = _content_in(f, v)
    cg, _ = _content_in(g, v)
    c = gcd(cf, cg)
    a = divexact(f, cf)
    b = divexact(g, cg)
    if a.deg(v) < b.deg(v):
        a, b = b, a
    while b and b.deg(v) > 0:
        r = _prem(a, b, v)
        a = b
        if not r:
            b = r
            break
        cr, _ = _content_in(r, v)
        b = divexact(r, cr)
    if b:
        # nonzero remainder free of z_v: primitive parts are coprime
        return _normal_sign(c)
    ca, _ = _content_in(a, v)
    return _normal_sign(c * divexact(a, ca))


def _lcm(f: MultiPoly, g: MultiPoly) -> MultiPoly:
    return _normal_sign(divexact(f * g, gcd(f, g)))


# ---------------------------------------------------------------------------
# rational functions


class RationalFunction:
    """Reduced quotient ``num / den`` with a positive leading coefficient on ``den``."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=1, nvars: int | None = None, _reduced=False):
        if nvars is None:
            nvars = num.nvars if isinstance(num, MultiPoly) else (
                den.nvars if isinstance(den, MultiPoly) else 0)
        num = _as_poly(num, nvars)
        den = _as_poly(den, nvars)
        if num.nvars != den.nvars:
            raise ValueError("numerator and denominator live in different rings")
        if not den:
            raise ZeroDivisionError("zero denominator")
        if not _reduced:
            if not num:
                den = MultiPoly.constant(1, num.nvars)
            else:
                g = gcd(num, den)
                if not (g.is_constant() and g.constant_value() == 1):
                    num = divexact(num, g)
                    den = divexact(den, g)
                if den.leading_coeff() < 0:
                    num, den = -num, -den
        self.num = num
        self.den = den

    @classmethod
    def from_fraction(cls, q, nvars: int = 0) -> "RationalFunction":
        q = Fraction(q)
        return cls(MultiPoly.constant(q.numerator, nvars),
                   MultiPoly.constant(q.denominator, nvars), _reduced=True)

    @property
    def nvars(self) -> int:
        return self.num.nvars

    def is_zero(self) -> bool:
        return not self.num

    def __bool__(self):
        return bool(self.num)

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def is_polynomial(self) -> bool:
        return self.den.is_constant() and self.den.constant_value() == 1

    def to_fraction(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("not a constant")
        return Fraction(self.num.constant_value(), self.den.constant_value())

    def _coerce(self, other):
        if isinstance(other, RationalFunction):
            if other.nvars != self.nvars:
                raise ValueError("mixing rational functions from different fields")
            return other
        if isinstance(other, (int, Fraction)):
            return RationalFunction.from_fraction(other, self.nvars)
        if isinstance(other, MultiPoly):
            return RationalFunction(other, 1, _reduced=True)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.den == other.den:
            return RationalFunction(self.num + other.num, self.den)
        return RationalFunction(
            self.num * other.den + other.num * self.den, self.den * other.den
        )

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den, _reduced=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not self.num or not other.num:
            return RationalFunction(MultiPoly.constant(0, self.nvars),
                                    MultiPoly.constant(1, self.nvars), _reduced=True)
        # cross-cancel before multiplying to keep operands small
        g1 = gcd(self.num, other.den)
        g2 = gcd(other.num, self.den)
        num = divexact(self.num, g1) * divexact(other.num, g2)
        den = divexact(self.den, g2) * divexact(other.den, g1)
        if den.leading_coeff() < 0:
            num, den = -num, -den
        return RationalFunction(num, den, _reduced=True)

    __rmul__ = __mul__

    def inverse(self) -> "RationalFunction":
        if not self.num:
            raise ZeroDivisionError("inverse of zero")
        num, den = self.den, self.num
        if den.leading_coeff() < 0:
            num, den = -num, -den
        return RationalFunction(num, den, _reduced=True)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        return RationalFunction(self.num ** n, self.den ** n, _reduced=True)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        return f"RationalFunction({str(self)!r})"

    def __str__(self):
        if self.is_polynomial():
            return str(self.num)
        num = str(self.num) if len(self.num) == 1 else f"({self.num})"
        den = str(self.den) if len(self.den) == 1 else f"({self.den})"
        return f"{num}/{den}"


def _as_poly(x, nvars):
    if isinstance(x, MultiPoly):
        return x
    if isinstance(x, int):
        return MultiPoly.constant(x, nvars)
    raise TypeError(f"cannot interpret {x!r} as a polynomial")


def _as_rational(x, nvars):
    if isinstance(x, RationalFunction):
        return x
    if isinstance(x, MultiPoly):
        return RationalFunction(x, 1, _reduced=True)
    if isinstance(x, (int, Fraction)):
        return RationalFunction.from_fraction(x, nvars)
    raise TypeError(f"cannot interpret {x!r} as a rational function")


# ---------------------------------------------------------------------------
# projective points


class ProjectivePoint:
    """A point of P^n over ``Q(z1..zd)`` in canonical integer form.

    Coordinates are integer polynomials with trivial common divisor and the
    first nonzero coordinate has a positive graded-lex leading coefficient.
    Use :func:`normalize_projective` to build one from arbitrary data.
    """

    __slots__ = ("coords",)

    def __init__(self, coords: Iterable[MultiPoly]):
        coords = tuple(coords)
        if not coords:
            raise ValueError("a projective point needs at least one coordinate")
        if not is_normalized(coords):
            raise ValueError("coordinates are not in canonical form; "
                             "use normalize_projective")
        self.coords = coords

    @property
    def nvars(self) -> int:
        return self.coords[0].nvars

    @property
    def dim(self) -> int:
        return len(self.coords) - 1

    def max_degrees(self) -> tuple:
        """Per-variable ``max_j deg_i(f_j)`` over the nonzero coordinates."""
        nz = [f for f in self.coords if f]
        return tuple(max(f.deg(i) for f in nz) for i in range(1, self.nvars + 1))

    def is_constant(self) -> bool:
        return all(f.is_constant() for f in self.coords)

    def sort_key(self) -> tuple:
        return tuple(f.sort_key() for f in self.coords)

    def __eq__(self, other):
        if not isinstance(other, ProjectivePoint):
            return NotImplemented
        return self.coords == other.coords

    def __hash__(self):
        return hash(self.coords)

    def __repr__(self):
        return f"ProjectivePoint({str(self)})"

    def __str__(self):
        return "(" + " : ".join(str(f) for f in self.coords) + ")"


def is_normalized(coords: Sequence[MultiPoly]) -> bool:
    nz = [f for f in coords if f]
    if not nz:
        return False
    if nz[0].leading_coeff() < 0:
        return False
    g = reduce(gcd, nz)
    return g.is_constant() and g.constant_value() == 1


def normalize_projective(coords: Sequence) -> ProjectivePoint:
    """Canonical representative of the point with the given coordinates.

    Entries may be ints, Fractions, MultiPolys or RationalFunctions.
    """
    coords = list(coords)
    if not coords:
        raise ValueError("a projective point needs at least one coordinate")
    nvars = 0
    for c in coords:
        if isinstance(c, (MultiPoly, RationalFunction)):
            nvars = c.nvars
            break
    rats = [_as_rational(c, nvars) for c in coords]
    if all(r.is_zero() for r in rats):
        raise ZeroPolynomialError("all coordinates are zero")
    den = MultiPoly.constant(1, nvars)
    for r in rats:
        if not r.is_zero():
            den = _lcm(den, r.den)
    polys = [r.num * divexact(den, r.den) if r else r.num for r in rats]
    g = reduce(gcd, [p for p in polys if p])
    polys = [divexact(p, g) if p else p for p in polys]
    first = next(p for p in polys if p)
    if first.leading_coeff() < 0:
        polys = [-p for p in polys]
    return ProjectivePoint(polys)


# ---------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(r"\s*(?:(\d+\.\d*|\.\d+)|(\d+)|(z\d+|t)|([-+*^()/,\[\]])|(\S))")


def _tokenize(text):
    pos = 0
    tokens = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        start = m.start(m.lastindex) if m.lastindex else pos
        if m.group(1):
            raise ParseError("non-integer coefficient", start)
        if m.group(2):
            tokens.append(("int", int(m.group(2)), start))
        elif m.group(3):
            tokens.append(("var", m.group(3), start))
        elif m.group(4):
            tokens.append((m.group(4), m.group(4), start))
        elif m.group(5):
            raise ParseError(f"unexpected character {m.group(5)!r}", start)
        pos = m.end()
    tokens.append(("end", None, len(text)))
    return tokens


class _Parser:
    def __init__(self, text, nvars):
        self.text = text
        self.nvars = nvars
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind=None):
        tok = self.tokens[self.i]
        if kind is not None and tok[0] != kind:
            what = "end of input" if tok[0] == "end" else repr(tok[1])
            raise ParseError(f"expected {kind!r}, found {what}", tok[2])
        self.i += 1
        return tok

    def expr(self):
        acc = self.term()
        while self.peek()[0] in "+-" and self.peek()[0] != "end":
            op = self.take()[0]
            rhs = self.term()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def term(self):
        acc = self.factor()
        while self.peek()[0] == "*":
            self.take()
            acc = acc * self.factor()
        return acc

    def factor(self):
        kind = self.peek()[0]
        if kind in ("-", "+"):
            self.take()
            inner = self.factor()
            return -inner if kind == "-" else inner
        base = self.base()
        if self.peek()[0] == "^":
            self.take()
            tok = self.peek()
            if tok[0] != "int":
                raise ParseError("exponent must be a nonnegative integer", tok[2])
            self.take()
            base = base ** tok[1]
        return base

    def base(self):
        kind, value, pos = self.peek()
        if kind == "int":
            self.take()
            return MultiPoly.constant(value, self.nvars)
        if kind == "var":
            self.take()
            if value == "t":
                if self.nvars != 1:
                    raise ParseError("'t' is only an alias for z1 when nvars=1", pos)
                return MultiPoly.var(1, 1)
            idx = int(value[1:])
            if not 1 <= idx <= self.nvars:
                raise ParseError(f"unknown variable {value} (nvars={self.nvars})", pos)
            return MultiPoly.var(idx, self.nvars)
        if kind == "(":
            self.take()
            inner = self.expr()
            self.take(")")
            return inner
        if kind == "/":
            raise ParseError(
                "division is only allowed in rational-function input", pos
            )
        what = "end of input" if kind == "end" else repr(value)
        raise ParseError(f"unexpected {what}", pos)


def parse_poly(text: str, nvars: int) -> MultiPoly:
    """Parse an integer polynomial in ``z1..z{nvars}`` (``t`` for ``z1`` if nvars=1)."""
    p = _Parser(text, nvars)
    out = p.expr()
    kind, value, pos = p.peek()
    if kind == "/":
        raise ParseError(
            "non-integer coefficient or quotient; use the rational-function parser",
            pos,
        )
    if kind != "end":
        raise ParseError(f"unexpected {value!r}", pos)
    return out


def parse_rational(text: str, nvars: int) -> RationalFunction:
    """Parse ``poly`` or ``poly / poly`` into a reduced rational function."""
    p = _Parser(text, nvars)
    num = p.expr()
    den = MultiPoly.constant(1, nvars)
    if p.peek()[0] == "/":
        slash = p.take()
        den = p.expr()
        if not den:
            raise ParseError("zero denominator", slash[2])
    kind, value, pos = p.peek()
    if kind != "end":
        raise ParseError(f"unexpected {value!r}", pos)
    return RationalFunction(num, den)


def split_list(text: str, open_="[", close="]") -> list:
    """Split ``"[a, b, c]"`` at top-level commas."""
    s = text.strip()
    if not (s.startswith(open_) and s.endswith(close)):
        raise ParseError(f"expected a list delimited by {open_}{close}", 0)
    body = s[1:-1]
    parts, depth, cur = [], 0, []
    for ch in body:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if "".join(cur).strip() or parts:
        parts.append("".join(cur))
    return [p.strip() for p in parts]
