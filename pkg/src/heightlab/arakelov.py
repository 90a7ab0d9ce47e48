"""Closed-form arithmetic intersection numbers on ``(P^1_Z)^d``.

Each factor of the base carries either ``(O(1), ||.||_FS)`` or a trivial
bundle ``(O, c ||.||_can)``.  For such products the top self-intersection
of the restriction to the divisor at infinity of the ``i``-th factor is

    d! * prod_{k != i} deg L_k * delta(L_i)
        + d!/2 * sum_{j != i} prod_{k != i, j} deg L_k * s(L_j)

with ``delta(FS) = 0``, ``delta(c) = -log c``, ``s(FS) = 1/2`` and
``s(trivial) = 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .archimedean import MCEstimate, MCParams, run_batches, sample_fs
from .errors import HeightlabError

__all__ = [
    "FS_SELF_INTERSECTION",
    "FactorBundle",
    "PolarizationSpec",
    "fs_self_intersection",
    "verify_fs_self_intersection",
    "delta_infty_restriction",
    "delta_infty_power",
    "lemma42_e",
    "e_d",
]

# arithmetic self-intersection of (O(1), FS) on P^1_Z
FS_SELF_INTERSECTION = Fraction(1, 2)


@dataclass(frozen=True)
class FactorBundle:
    """``kind="fs"`` for (O(1), FS) or ``kind="trivial"`` for (O, c |.|_can)."""

    kind: str = "fs"
    c: float = 1.0

    def __post_init__(self):
        if self.kind not in ("fs", "trivial"):
            raise ValueError(f"unknown bundle kind {self.kind!r}")
        if self.kind == "trivial" and not self.c > 0:
            raise ValueError("scale c must be positive")

    @classmethod
    def fs(cls) -> "FactorBundle":
        return cls("fs")

    @classmethod
    def scaled_trivial(cls, c) -> "FactorBundle":
        return cls("trivial", c)

    @property
    def degree(self) -> int:
        return 1 if self.kind == "fs" else 0

    @property
    def self_intersection(self) -> float:
        return float(FS_SELF_INTERSECTION) if self.kind == "fs" else 0.0


@dataclass(frozen=True)
class PolarizationSpec:
    factors: tuple

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if not all(isinstance(b, FactorBundle) for b in self.factors):
            raise TypeError("factors must be FactorBundle instances")

    @property
    def d(self) -> int:
        return len(self.factors)

    @classmethod
    def all_fs(cls, d: int) -> "PolarizationSpec":
        return cls((FactorBundle.fs(),) * d)

    @classmethod
    def auxiliary(cls, d: int, i: int, c) -> "PolarizationSpec":
        """FS on every factor except a scaled trivial bundle at slot ``i`` (1-based)."""
        if not 1 <= i <= d:
            raise ValueError(f"slot {i} out of range 1..{d}")
        return cls(tuple(FactorBundle.scaled_trivial(c) if k == i else FactorBundle.fs()
                         for k in range(1, d + 1)))


def verify_fs_self_intersection(params: MCParams = MCParams()) -> MCEstimate:
    """Monte Carlo value of ``int -log ||X_0||_FS c_1(FS)`` on P^1(C).

    With ``||X_0||_FS(z) = 1/sqrt(1+|z|^2)`` the integrand is
    ``log(1+|z|^2)/2``.
    """

    def batch(rng, n):
        z = sample_fs(rng, n)
        return 0.5 * np.log1p(np.abs(z) ** 2), 0

    return run_batches(params, batch)


def fs_self_intersection(verify: MCParams | None = None) -> float:
    sigma = float(FS_SELF_INTERSECTION)
    if verify is not None:
        est = verify_fs_self_intersection(verify)
        if abs(est.mean - sigma) > 4.0 * est.stderr:
            raise HeightlabError(
                f"numerical self-intersection {est.mean} +- {est.stderr} "
                f"disagrees with {sigma}"
            )
    return sigma


def delta_infty_restriction(b: FactorBundle) -> float:
    """Arakelov degree of the bundle restricted to the section at infinity."""
    if b.kind == "fs":
        return 0.0
    return -math.log(b.c)


def delta_infty_power(spec: PolarizationSpec | Sequence[FactorBundle], i: int) -> float:
    factors = spec.factors if isinstance(spec, PolarizationSpec) else tuple(spec)
    d = len(factors)
    if not 1 <= i <= d:
        raise IndexError(f"factor index {i} out of range 1..{d}")
    fact = math.factorial(d)
    others = [b for k, b in enumerate(factors, 1) if k != i]
    main = fact * math.prod(b.degree for b in others) * delta_infty_restriction(
        factors[i - 1])
    mixed = 0.0
    for j, bj in enumerate(factors, 1):
        if j == i:
            continue
        rest = math.prod(b.degree for k, b in enumerate(factors, 1) if k not in (i, j))
        mixed += rest * bj.self_intersection
    return main + fact / 2.0 * mixed


def lemma42_e(c, d: int) -> float:
    """``d! (-log c + (d-1)/2 * sigma)`` for the auxiliary bundle with scale ``c``."""
    if not c > 0:
        raise ValueError("scale c must be positive")
    if d < 1:
        raise ValueError("d must be >= 1")
    sigma = float(FS_SELF_INTERSECTION)
    return math.factorial(d) * (-math.log(c) + (d - 1) / 2.0 * sigma)


def e_d(d: int) -> float:
    """Self-intersection at a divisor at infinity for the all-FS product: d!(d-1)/4."""
    if d < 1:
        raise ValueError("d must be >= 1")
    return math.factorial(d) * (d - 1) / 4.0
