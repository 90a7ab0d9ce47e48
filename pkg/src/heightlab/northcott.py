"""Enumeration of points of bounded arithmetic height in P^n(Q(z1..zd)).

A coprime integer tuple ``(f_0 : ... : f_n)`` of height at most ``M`` has
``log v(f_j) <= M`` for every ``j``, and ``|f| <= 2^(deg_1 f + ... + deg_d f) v(f)``
then bounds every coefficient.  Together with caller-supplied degree caps
this leaves a finite box of candidate tuples, which is searched
exhaustively.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from functools import reduce

from .archimedean import MCParams, log_jensen_v1
from .errors import BudgetExceededError, PolarizationError
from .heights import HeightEstimate, PolarizationChoice, naive_height
from .polyring import MultiPoly, ProjectivePoint, gcd

__all__ = ["EnumSpec", "EnumResult", "coeff_bound", "enumerate_bounded",
           "search_cardinality"]

DEFAULT_BUDGET = 2_000_000


def coeff_bound(M: float, deg_caps) -> int:
    """``floor(2^(sum caps) * e^M)``, rounded up by a relative 1e-12 so a
    bound that is an integer in exact arithmetic is never lost to rounding."""
    if M < 0:
        raise ValueError("height bound M must be nonnegative")
    if any(c < 0 for c in deg_caps):
        raise ValueError("degree caps must be nonnegative")
    value = math.ldexp(math.exp(M), sum(deg_caps))
    return math.floor(value * (1.0 + 1e-12))


@dataclass(frozen=True)
class EnumSpec:
    M: float
    n: int
    d: int
    deg_caps: tuple
    params: MCParams = field(default_factory=lambda: MCParams(20_000, 0, 20_000))
    classify_band: float = 3.0
    budget: int = DEFAULT_BUDGET
    bound: int | None = None
    polarization: PolarizationChoice = field(default_factory=PolarizationChoice)

    def __post_init__(self):
        object.__setattr__(self, "deg_caps", tuple(int(c) for c in self.deg_caps))
        if len(self.deg_caps) != self.d:
            raise ValueError(f"need {self.d} degree caps, got {len(self.deg_caps)}")
        if any(c < 0 for c in self.deg_caps):
            raise ValueError("degree caps must be nonnegative")
        if not math.isfinite(self.M):
            raise ValueError("height bound must be finite")
        if self.n < 0 or self.d < 0:
            raise ValueError("dimensions must be nonnegative")

    def coefficient_bound(self) -> int:
        if self.bound is not None:
            return self.bound
        return coeff_bound(self.M, self.deg_caps)


@dataclass(frozen=True)
class EnumResult:
    point: ProjectivePoint
    height: HeightEstimate
    classification: str

    def as_dict(self) -> dict:
        return {
            "point": [str(f) for f in self.point.coords],
            "total": self.height.total,
            "stderr": self.height.stderr,
            "class": self.classification,
        }


def _monomials(d, caps):
    return list(itertools.product(*(range(c + 1) for c in caps))) if d else [()]


def search_cardinality(spec: EnumSpec) -> int:
    """Number of raw coordinate tuples in the search box."""
    k = len(_monomials(spec.d, spec.deg_caps))
    return (2 * spec.coefficient_bound() + 1) ** (k * (spec.n + 1))


def _candidate_polys(spec, bound):
    monos = _monomials(spec.d, spec.deg_caps)
    out = []
    for coeffs in itertools.product(range(-bound, bound + 1), repeat=len(monos)):
        out.append(MultiPoly(dict(zip(monos, coeffs)), spec.d))
    return out


def _canonical(tup) -> bool:
    nz = [f for f in tup if f]
    if not nz or nz[0].leading_coeff() < 0:
        return False
    g = reduce(gcd, nz)
    return g.is_constant() and g.constant_value() == 1


def enumerate_bounded(spec: EnumSpec) -> list:
    """All points with arithmetic height ``<= M + band * stderr`` within the caps.

    Points within ``band * stderr`` of ``M`` are classified ``borderline``;
    the rest are ``certain``.  Output is sorted by height, then by the
    graded-lex order of the coordinates.
    """
    pol = spec.polarization
    if pol.kind in ("geom", "aux"):
        raise PolarizationError(
            "Northcott finiteness fails for this polarization: every constant "
            "point (a : b) has height 0, so the set is infinite"
        )
    if pol.kind == "nf" and spec.d != 0:
        raise PolarizationError("the number-field polarization needs d = 0")
    if spec.M < 0:
        return []
    total = search_cardinality(spec)
    if total > spec.budget:
        raise BudgetExceededError(total, spec.budget)
    bound = spec.coefficient_bound()
    polys = _candidate_polys(spec, bound)
    tuples = [t for t in itertools.product(polys, repeat=spec.n + 1) if _canonical(t)]
    threads = spec.params.threads
    inner = replace(spec.params, threads=1)
    slack = 1e-12 * max(1.0, abs(spec.M))

    # For d = 1 the height is at least max_j log v(f_j), which Jensen's
    # formula gives exactly; candidates above M are dropped unsampled.
    prune = pol.kind == "arith" and spec.d == 1
    lower = {}
    if prune:
        for f in {f for tup in tuples for f in tup if f}:
            lower[f] = log_jensen_v1(f)

    def evaluate(chunk):
        found = []
        for tup in chunk:
            if prune and max(lower[f] for f in tup if f) > spec.M + slack:
                continue
            point = ProjectivePoint(tup)
            h = naive_height(point, pol, inner)
            if h.total <= spec.M + spec.classify_band * h.stderr + slack:
                borderline = h.stderr > 0 and abs(h.total - spec.M) <= (
                    spec.classify_band * h.stderr)
                found.append(EnumResult(point, h,
                                        "borderline" if borderline else "certain"))
        return found

    size = max(1, -(-len(tuples) // (4 * threads)))
    chunks = [tuples[i:i + size] for i in range(0, len(tuples), size)]
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(evaluate, chunks))
    else:
        parts = [evaluate(c) for c in chunks]
    results = [r for part in parts for r in part]
    results.sort(key=lambda r: (r.height.total, r.point.sort_key()))
    return results
