"""Naive heights on projective space over ``Q(z1, ..., zd)``.

For a point with coprime integer polynomial coordinates ``(f_0 : ... : f_n)``
every prime divisor of ``(P^1_Z)^d`` other than the ``d`` divisors at
infinity has ``max_j(-ord f_j) = 0``, so the height reduces to

    sum_i max_j deg_i(f_j) * (self-intersection at infinity of factor i)
        + integral of log max_j |f_j| against c_1(H)^d.

For the all-FS polarization ``c_1(H)^d = d! * omega_1 ^ ... ^ omega_d`` has
total mass ``d!``, which is why the probability-measure average from
:func:`~heightlab.archimedean.logmax_integral` is multiplied by ``d!``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .arakelov import e_d, lemma42_e
from .archimedean import MCEstimate, MCParams, logmax_integral, proximity, roots
from .errors import PolarizationError, PoleError
from .polyring import ProjectivePoint, RationalFunction, normalize_projective

__all__ = [
    "PolarizationChoice",
    "HeightEstimate",
    "height_number_field",
    "naive_height",
    "nevanlinna_T",
    "nevanlinna_parts",
]

_KINDS = ("arith", "aux", "geom", "nf")


@dataclass(frozen=True)
class PolarizationChoice:
    """Which metrized bundle on ``(P^1_Z)^d`` defines the height.

    ``arith``: FS on every factor.  ``aux``: FS except ``(O, c |.|_can)`` at
    ``slot``.  ``geom``: ``d = 1`` with the flat bundle of scale ``1/e``,
    giving the classical function-field degree.  ``nf``: ``d = 0``.
    """

    kind: str = "arith"
    slot: int | None = None
    c: float | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise PolarizationError(f"unknown polarization {self.kind!r}")
        if self.kind == "aux":
            if self.slot is None or self.slot < 1:
                raise PolarizationError("aux polarization needs a slot >= 1")
            if self.c is None or not self.c > 0:
                raise PolarizationError("aux polarization needs a scale c > 0")

    @classmethod
    def arithmetic(cls):
        return cls("arith")

    @classmethod
    def auxiliary(cls, slot: int, c: float):
        return cls("aux", slot, c)

    @classmethod
    def geometric(cls):
        return cls("geom")

    @classmethod
    def number_field(cls):
        return cls("nf")

    @classmethod
    def parse(cls, text: str) -> "PolarizationChoice":
        """``arith``, ``geom``, ``nf`` or ``aux:i:c``."""
        parts = text.strip().split(":")
        if parts[0] == "aux":
            if len(parts) != 3:
                raise PolarizationError("expected aux:i:c")
            try:
                return cls("aux", int(parts[1]), float(parts[2]))
            except ValueError as exc:
                raise PolarizationError(f"bad aux polarization {text!r}") from exc
        if len(parts) != 1:
            raise PolarizationError(f"bad polarization {text!r}")
        return cls(parts[0])

    def check(self, d: int):
        if self.kind == "geom" and d != 1:
            raise PolarizationError("the geometric polarization needs d = 1")
        if self.kind == "nf" and d != 0:
            raise PolarizationError("the number-field polarization needs d = 0")
        if self.kind == "aux" and not 1 <= self.slot <= d:
            raise PolarizationError(f"aux slot {self.slot} out of range 1..{d}")

    def __str__(self):
        if self.kind == "aux":
            return f"aux:{self.slot}:{self.c!r}"
        return self.kind


@dataclass(frozen=True)
class HeightEstimate:
    exact_part: float
    arch_part: MCEstimate = field(default_factory=lambda: MCEstimate.exact(0.0))

    @property
    def total(self) -> float:
        return self.exact_part + self.arch_part.mean

    @property
    def stderr(self) -> float:
        return self.arch_part.stderr

    def as_dict(self) -> dict:
        return {
            "exact_part": self.exact_part,
            "arch_mean": self.arch_part.mean,
            "arch_stderr": self.arch_part.stderr,
            "total": self.total,
            "seed": self.arch_part.seed,
            "samples": self.arch_part.samples_used,
        }


def _as_point(point) -> ProjectivePoint:
    if isinstance(point, ProjectivePoint):
        return point
    return normalize_projective(point)


def height_number_field(point, seed: int = 0) -> HeightEstimate:
    """``log max_i |a_i|`` for a point with coprime integer coordinates."""
    point = _as_point(point)
    if point.nvars != 0:
        raise PolarizationError("number-field height needs d = 0")
    value = math.log(max(abs(f.constant_value()) for f in point.coords))
    return HeightEstimate(value, MCEstimate.exact(0.0, seed))


def naive_height(point, pol: PolarizationChoice = PolarizationChoice(),
                 params: MCParams = MCParams()) -> HeightEstimate:
    point = _as_point(point)
    d = point.nvars
    if pol.kind == "arith" and d == 0:
        return height_number_field(point, params.seed)
    pol.check(d)
    if pol.kind == "nf":
        return height_number_field(point, params.seed)
    degs = point.max_degrees()
    if pol.kind == "geom":
        return HeightEstimate(float(degs[0]), MCEstimate.exact(0.0, params.seed))
    if pol.kind == "aux":
        value = degs[pol.slot - 1] * lemma42_e(pol.c, d)
        return HeightEstimate(value, MCEstimate.exact(0.0, params.seed))
    exact = sum(degs) * e_d(d)
    arch = logmax_integral(point, d, params).scale(math.factorial(d))
    return HeightEstimate(exact, arch)


def _check_univariate(f: RationalFunction):
    if f.nvars > 1:
        raise ValueError("the characteristic function needs one variable")


def nevanlinna_parts(f: RationalFunction, r: float,
                     params: MCParams = MCParams()) -> tuple:
    """(counting term, proximity estimate) of ``T_f(r)``."""
    _check_univariate(f)
    if r <= 0:
        raise ValueError("radius must be positive")
    if f.nvars == 1 and not f.den.is_constant():
        if not f.den.terms.get((0,), 0):
            raise PoleError(f"{f} has a pole at 0")
    prox = proximity(f, r, params)
    counting = 0.0
    if f.nvars == 1 and not f.den.is_constant():
        for alpha in roots(f.den):
            if abs(alpha) < r:
                counting += math.log(r / abs(alpha))
    return counting, prox


def nevanlinna_T(f: RationalFunction, r: float,
                 params: MCParams = MCParams()) -> float:
    counting, prox = nevanlinna_parts(f, r, params)
    return counting + prox.mean
