"""Complex-analytic evaluations against the Fubini-Study measure.

Every integral here is taken against the product probability measure
``omega_1 ^ ... ^ omega_d`` on ``C^d``, where

    omega = i dz ^ dzbar / (2 pi (1 + |z|^2)^2)

is the pushforward of the uniform measure on the round sphere.  Monte Carlo
work is split into batches; batch ``b`` draws from its own Philox stream
keyed by ``(seed, b)`` and partial results are folded in batch order, so an
estimate depends only on ``(samples, seed, batch_size)`` and never on how
many worker threads ran the batches.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import PoleError, RootFindingError, SamplingError, ZeroPolynomialError
from .polyring import MultiPoly, ProjectivePoint, RationalFunction, divexact, gcd

logger = logging.getLogger(__name__)

__all__ = [
    "MCParams",
    "MCEstimate",
    "batch_rng",
    "sample_fs",
    "roots",
    "jensen_v1",
    "log_jensen_v1",
    "v_measure",
    "logmax_integral",
    "proximity",
]

ROOT_TOL = 1e-12
ROOT_MAX_ITER = 200
MAX_RESAMPLE_RATE = 1e-3
_COEFF_BITS = 900


@dataclass(frozen=True)
class MCParams:
    """Sampling controls.  ``threads`` affects wall time only, never results."""

    samples: int = 1_000_000
    seed: int = 0
    batch_size: int = 10_000
    target_stderr: float | None = None
    threads: int = 1

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.samples < self.batch_size:
            raise ValueError("samples must be >= batch_size")
        if self.target_stderr is not None and self.target_stderr < 0:
            raise ValueError("target_stderr must be nonnegative")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")

    def scaled(self, factor: int) -> "MCParams":
        return MCParams(self.samples * factor, self.seed, self.batch_size,
                        self.target_stderr, self.threads)


@dataclass(frozen=True)
class MCEstimate:
    mean: float
    stderr: float
    samples_used: int
    seed: int
    resamples: int = 0

    @classmethod
    def exact(cls, value: float, seed: int = 0) -> "MCEstimate":
        return cls(float(value), 0.0, 0, seed, 0)

    def __add__(self, other: "MCEstimate") -> "MCEstimate":
        return MCEstimate(self.mean + other.mean,
                          math.hypot(self.stderr, other.stderr),
                          self.samples_used + other.samples_used,
                          self.seed, self.resamples + other.resamples)

    def scale(self, c: float) -> "MCEstimate":
        return MCEstimate(c * self.mean, abs(c) * self.stderr,
                          self.samples_used, self.seed, self.resamples)


def batch_rng(seed: int, batch: int) -> np.random.Generator:
    """Independent counter-based stream for one batch."""
    seq = np.random.SeedSequence([seed & 0xFFFFFFFFFFFFFFFF, batch])
    return np.random.Generator(np.random.Philox(seq))


def sample_fs(rng: np.random.Generator, size: int | tuple | None = None):
    """Draw from the Fubini-Study probability measure on C.

    Uniform height on the unit sphere, uniform azimuth, then stereographic
    projection from the north pole.  Height is drawn from [-1, 1), so the
    pole (z = infinity) cannot occur.
    """
    h = 2.0 * rng.random(size) - 1.0
    phi = 2.0 * math.pi * rng.random(size)
    r = np.sqrt((1.0 + h) / (1.0 - h))
    z = r * np.exp(1j * phi)
    if size is None:
        return complex(z)
    return z


# ---------------------------------------------------------------------------
# batch driver


def _fold(sums, counts, sumsq):
    n = int(sum(counts))
    mean = math.fsum(sums) / n
    nb = len(sums)
    if nb >= 2:
        means = np.array(sums) / np.array(counts)
        weights = np.array(counts) / (n / nb)
        var = float(np.sum(weights * (means - mean) ** 2)) / (nb - 1)
        stderr = math.sqrt(var / nb)
    else:
        var = max(math.fsum(sumsq) / n - mean * mean, 0.0)
        stderr = math.sqrt(var * n / max(n - 1, 1) / n)
    return mean, stderr, n


def run_batches(params: MCParams, batch_fn: Callable) -> MCEstimate:
    """Evaluate ``batch_fn(rng, n) -> (values, resamples)`` over all batches.

    Batch results are combined in batch-index order.  With
    ``target_stderr`` set, the estimate stops at the first batch index at
    which the running standard error reaches the target.
    """
    nb = -(-params.samples // params.batch_size)
    sizes = [params.batch_size] * (nb - 1)
    sizes.append(params.samples - params.batch_size * (nb - 1))

    def one(b):
        vals, res = batch_fn(batch_rng(params.seed, b), sizes[b])
        vals = np.asarray(vals, dtype=float)
        return math.fsum(vals), math.fsum(vals * vals), len(vals), res

    sums, sumsq, counts = [], [], []
    resamples = 0
    wave = params.threads if params.target_stderr is not None else nb
    pool = ThreadPoolExecutor(params.threads) if params.threads > 1 else None
    try:
        b = 0
        done = False
        while b < nb and not done:
            idx = range(b, min(b + wave, nb))
            results = list(pool.map(one, idx)) if pool else [one(i) for i in idx]
            for s, sq, c, res in results:
                sums.append(s)
                sumsq.append(sq)
                counts.append(c)
                resamples += res
                if params.target_stderr is not None and len(sums) >= 2:
                    _, se, _ = _fold(sums, counts, sumsq)
                    if se <= params.target_stderr:
                        done = True
                        break
            b += len(idx)
    finally:
        if pool:
            pool.shutdown()
    mean, stderr, n = _fold(sums, counts, sumsq)
    if resamples > MAX_RESAMPLE_RATE * n:
        raise SamplingError(
            f"{resamples} degenerate samples out of {n} exceeds rate {MAX_RESAMPLE_RATE}"
        )
    if resamples:
        logger.info("resampled %d degenerate points", resamples)
    return MCEstimate(mean, stderr, n, params.seed, resamples)


def _fill(rng, n, d, draw):
    """Collect ``n`` valid values from ``draw(z) -> (values, ok_mask)``."""
    out = np.empty(n)
    filled = 0
    resamples = 0
    while filled < n:
        need = n - filled
        z = sample_fs(rng, (need, d))
        vals, ok = draw(z)
        good = vals[ok]
        out[filled:filled + len(good)] = good
        filled += len(good)
        bad = need - len(good)
        resamples += bad
        if bad == need and need > 0 and resamples > n:
            raise SamplingError("integrand is degenerate on every sample")
    return out, resamples


# ---------------------------------------------------------------------------
# stable evaluation


def _coeff_shift(polys: Sequence[MultiPoly]) -> int:
    bits = max((abs(c).bit_length() for f in polys for _, c in f.items()), default=0)
    return max(0, bits - _COEFF_BITS)


def eval_log_scaled(polys: Sequence[MultiPoly], z: np.ndarray):
    """Values of ``polys`` at ``z`` up to a common positive factor.

    Returns ``(values, log_scale)`` with ``f_j(z) = values[j] * exp(log_scale)``.
    For each variable with ``|z_i| > 1`` the common factor ``z_i^D_i``
    (``D_i`` the largest degree among ``polys``) is pulled out and the
    polynomial is evaluated at ``1/z_i``, so no intermediate can overflow.
    """
    z = np.asarray(z, dtype=complex)
    npts, d = z.shape
    nz = [f for f in polys if f]
    degs = [max(f.deg(i + 1) for f in nz) for i in range(d)] if nz else [0] * d
    shift = _coeff_shift(polys)
    absz = np.abs(z)
    big = absz > 1.0
    w = np.where(big, 1.0 / np.where(big, z, 1.0), z)
    log_scale = np.full(npts, shift * math.log(2.0))
    for i in range(d):
        if degs[i]:
            log_scale += np.where(big[:, i], degs[i] * np.log(absz[:, i]), 0.0)
    values = np.zeros((len(polys), npts), dtype=complex)
    power_cache = {}

    def power(i, e):
        key = (i, e)
        if key not in power_cache:
            power_cache[key] = w[:, i] ** e
        return power_cache[key]

    for j, f in enumerate(polys):
        if not f:
            continue
        exps, coeffs = f.as_float_terms(shift)
        acc = np.zeros(npts, dtype=complex)
        for t in range(len(coeffs)):
            term = np.full(npts, coeffs[t], dtype=complex)
            for i in range(d):
                e = int(exps[t, i])
                flip = degs[i] - e
                if e == 0 and flip == 0:
                    continue
                term *= np.where(big[:, i], power(i, flip), power(i, e))
            acc += term
        values[j] = acc
    return values, log_scale


# ---------------------------------------------------------------------------
# univariate roots


def _initial_guesses(monic, n, offset):
    # radius from the Fujiwara-style bound 2 max |a_k|^(1/k)
    ks = np.arange(1, n + 1)
    mags = np.abs(monic[:, 1:]) ** (1.0 / ks)
    radius = np.max(mags, axis=1)
    radius = np.where(radius > 0, radius, 1.0)
    angles = 2.0 * math.pi * np.arange(n) / n + offset
    return 0.5 * radius[:, None] * np.exp(1j * angles)[None, :]


def _closed_form_guesses(monic, n):
    """Quadratic formula or Cardano, as starting points only; the Aberth
    iteration that follows supplies the accuracy and the stopping test."""
    with np.errstate(all="ignore"):
        if n == 2:
            b, c = monic[:, 1], monic[:, 2]
            sq = np.sqrt(b * b - 4 * c)
            sq = np.where((b.conjugate() * sq).real >= 0, sq, -sq)
            q = -0.5 * (b + sq)
            other = np.where(q != 0, c / np.where(q != 0, q, 1), 0)
            z = np.stack([q, other], axis=1)
        else:
            a, b, c = monic[:, 1], monic[:, 2], monic[:, 3]
            d0 = a * a - 3 * b
            d1 = 2 * a ** 3 - 9 * a * b + 27 * c
            sq = np.sqrt(d1 * d1 - 4 * d0 ** 3)
            big = np.where(np.abs(d1 + sq) >= np.abs(d1 - sq), d1 + sq, d1 - sq)
            C = (0.5 * big) ** (1.0 / 3.0)
            xi = np.exp(2j * math.pi * np.arange(3) / 3)[None, :]
            Ck = C[:, None] * xi
            safe = np.where(Ck != 0, Ck, 1)
            z = -(a[:, None] + Ck + np.where(Ck != 0, d0[:, None] / safe, 0)) / 3
    # coincident starting points would stall the iteration
    jitter = 1e-7 * np.exp(1j * (2.0 * math.pi * np.arange(n) / n + 0.4))
    z = z + jitter[None, :] * np.maximum(1.0, np.abs(z))
    return np.where(np.isfinite(z), z, 0.5 * np.exp(1j * np.arange(n))[None, :])


def aberth_batch(coeffs: np.ndarray, tol: float = ROOT_TOL,
                 max_iter: int = ROOT_MAX_ITER, offset: float = 0.4) -> np.ndarray:
    """Simultaneous Aberth-Ehrlich iteration for a stack of polynomials.

    ``coeffs`` has shape ``(B, n+1)`` with highest-degree coefficient first
    and nonzero.  Returns roots of shape ``(B, n)``; raises
    :class:`RootFindingError` if any row fails to converge.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    nb, m = coeffs.shape
    n = m - 1
    if n == 0:
        return np.zeros((nb, 0), dtype=complex)
    monic = coeffs / coeffs[:, :1]
    if n == 1:
        return -monic[:, 1:2]
    absc = np.abs(monic)
    if n <= 3 and offset == 0.4:
        z = _closed_form_guesses(monic, n)
    else:
        z = _initial_guesses(monic, n, offset)
    eye = np.eye(n, dtype=bool)
    eps = np.finfo(float).eps
    # work on a compacted copy of the unfinished rows, re-compacted only
    # when it has halved, so most iterations avoid fancy indexing
    rows = np.arange(nb)
    zi, ci, ai = z.copy(), monic, absc
    live = np.ones(nb, dtype=bool)
    for _ in range(max_iter):
        p = np.ones_like(zi)
        dp = np.zeros_like(zi)
        bound = np.ones(zi.shape)
        az = np.abs(zi)
        for k in range(1, m):
            dp = dp * zi + p
            p = p * zi + ci[:, k:k + 1]
            bound = bound * az + ai[:, k:k + 1]
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(p == 0, 0.0, p / dp)
            diff = zi[:, :, None] - zi[:, None, :]
            diff[:, eye] = np.inf
            s = np.sum(1.0 / diff, axis=2)
            step = ratio / (1.0 - ratio * s)
        step = np.where(np.isfinite(step), step, 0.0)
        done_roots = (np.abs(step) <= tol * np.maximum(1.0, az)) | (
            np.abs(p) <= 8.0 * eps * bound)
        zi = zi - np.where(done_roots, 0.0, step)
        row_done = np.all(done_roots, axis=1)
        live &= ~row_done
        if not live.any():
            z[rows] = zi
            return z
        if live.sum() * 2 <= len(live):
            z[rows] = zi
            rows, zi, ci, ai = rows[live], zi[live], ci[live], ai[live]
            live = np.ones(len(rows), dtype=bool)
    z[rows] = zi
    active_count = int(live.sum())
    raise RootFindingError(
        f"Aberth iteration did not converge for {active_count} of {nb} "
        f"polynomials in {max_iter} iterations"
    )


def _roots_robust(coeffs):
    try:
        return aberth_batch(coeffs)
    except RootFindingError:
        # second attempt from a rotated starting circle
        return aberth_batch(coeffs, offset=1.3, max_iter=2 * ROOT_MAX_ITER)


def _univariate_coeffs(f: MultiPoly):
    if not f:
        raise ZeroPolynomialError("roots of the zero polynomial")
    vs = f.variables()
    if len(vs) > 1:
        raise ValueError(f"{f} is not univariate")
    if not vs:
        return np.array([float(f.constant_value())]), 0
    (v,) = vs
    n = f.deg(v)
    shift = _coeff_shift([f])
    out = np.zeros(n + 1)
    for exps, c in f.items():
        out[n - exps[v - 1]] = c / (1 << shift)
    return out, shift


def _derivative(f: MultiPoly, v: int) -> MultiPoly:
    k = v - 1
    out = {}
    for exps, c in f.items():
        if exps[k]:
            e = list(exps)
            e[k] -= 1
            out[tuple(e)] = c * exps[k]
    return MultiPoly(out, f.nvars)


def squarefree_parts(f: MultiPoly) -> list:
    """Yun's decomposition of a univariate ``f``: pairs ``(a_i, i)`` with
    squarefree, pairwise coprime ``a_i`` whose product ``a_i^i`` is ``f``
    up to a constant factor."""
    vs = f.variables()
    if not vs:
        return []
    (v,) = vs
    df = _derivative(f, v)
    a0 = gcd(f, df)
    b = divexact(f, a0)
    c = divexact(df, a0)
    dd = c - _derivative(b, v)
    out, i = [], 1
    while not b.is_constant():
        a = gcd(b, dd)
        if not a.is_constant():
            out.append((a, i))
        b = divexact(b, a)
        c = divexact(dd, a)
        dd = c - _derivative(b, v)
        i += 1
    return out


def roots(f: MultiPoly, tol: float = ROOT_TOL) -> np.ndarray:
    """All complex roots of a univariate polynomial, with multiplicity.

    Repeated roots are split off exactly first, since simultaneous
    iteration only converges linearly on them."""
    coeffs, _ = _univariate_coeffs(f)
    if len(coeffs) == 1:
        return np.zeros(0, dtype=complex)
    out = []
    for a, mult in squarefree_parts(f):
        ca, _ = _univariate_coeffs(a)
        if len(ca) > 1:
            out.extend([_roots_robust(ca[None, :])[0]] * mult)
    return np.concatenate(out)


def _log_jensen_rows(coeffs: np.ndarray) -> np.ndarray:
    rts = _roots_robust(coeffs)
    return np.log(np.abs(coeffs[:, 0])) + 0.5 * np.sum(
        np.log1p(np.abs(rts) ** 2), axis=1
    )


def log_jensen_v1(f: MultiPoly) -> float:
    """``log v(f)`` for univariate ``f`` from its roots:
    ``log|c| + sum_k log sqrt(1 + |alpha_k|^2)``."""
    coeffs, shift = _univariate_coeffs(f)
    if len(coeffs) == 1:
        return math.log(abs(f.constant_value()))
    lead = math.log(abs(coeffs[0])) + shift * math.log(2.0)
    return lead + 0.5 * math.fsum(np.log1p(np.abs(roots(f)) ** 2))


def jensen_v1(f: MultiPoly) -> float:
    if f.is_constant():
        return float(abs(f.constant_value()))
    return math.exp(log_jensen_v1(f))


# ---------------------------------------------------------------------------
# integrals


def v_measure(f: MultiPoly, params: MCParams = MCParams()) -> MCEstimate:
    """Estimate of ``log v(f)`` with its standard error.

    One variable is integrated exactly by Jensen's formula; the remaining
    ones are sampled.  ``v(f)`` itself is ``exp(estimate.mean)``.
    """
    if not f:
        raise ZeroPolynomialError("v of the zero polynomial is undefined")
    # v is multiplicative and v(z_i) = 1, so monomial factors drop out, and
    # variables that do not occur are not sampled
    f = _strip_monomial(f)
    present = sorted(f.variables())
    if len(present) <= 1:
        if not present:
            return MCEstimate.exact(math.log(abs(f.constant_value())), params.seed)
        return MCEstimate.exact(log_jensen_v1(f), params.seed)
    f = _restrict(f, present)
    d = f.nvars
    parts = f.coeffs_in(1)
    top = max(parts)
    polys = [parts.get(k, MultiPoly.constant(0, d)) for k in range(top, -1, -1)]

    def draw(z):
        z = np.concatenate([np.zeros((z.shape[0], 1), dtype=complex), z], axis=1)
        vals, log_scale = eval_log_scaled(polys, z)
        coeffs = vals.T
        ok = np.abs(coeffs[:, 0]) > 0
        out = np.full(z.shape[0], np.nan)
        if ok.any():
            out[ok] = _log_jensen_rows(coeffs[ok]) + log_scale[ok]
        ok &= np.isfinite(out)
        return out, ok

    def batch(rng, n):
        return _fill(rng, n, d - 1, draw)

    return run_batches(params, batch)


def _strip_monomial(f: MultiPoly) -> MultiPoly:
    low = [min(e[k] for e in f.terms) for k in range(f.nvars)]
    if not any(low):
        return f
    return MultiPoly({tuple(a - b for a, b in zip(e, low)): c for e, c in f.items()},
                     f.nvars)


def _restrict(f: MultiPoly, present) -> MultiPoly:
    if len(present) == f.nvars:
        return f
    idx = [v - 1 for v in present]
    return MultiPoly({tuple(e[k] for k in idx): c for e, c in f.items()}, len(idx))


def _logmax_exact(point: ProjectivePoint) -> float:
    vals = [abs(f.constant_value()) for f in point.coords]
    return math.log(max(vals))


def logmax_integral(point: ProjectivePoint, d: int | None = None,
                    params: MCParams = MCParams()) -> MCEstimate:
    """Average of ``log max_j |f_j|`` over the FS probability measure."""
    if d is None:
        d = point.nvars
    if d != point.nvars:
        raise ValueError(f"dimension {d} does not match {point.nvars} variables")
    if point.is_constant():
        return MCEstimate.exact(_logmax_exact(point), params.seed)
    polys = list(point.coords)

    def draw(z):
        vals, log_scale = eval_log_scaled(polys, z)
        m = np.max(np.abs(vals), axis=0)
        ok = m > 0
        with np.errstate(divide="ignore"):
            out = np.log(m) + log_scale
        return out, ok & np.isfinite(out)

    def batch(rng, n):
        return _fill(rng, n, d, draw)

    return run_batches(params, batch)


def proximity(f: RationalFunction, r: float,
              params: MCParams = MCParams()) -> MCEstimate:
    """Mean of ``log+ |f(r e^{i theta})|`` over the circle of radius ``r``.

    Uses the equal-weight rule on ``params.samples`` equally spaced angles;
    the reported error is the difference from the rule on every other angle.
    """
    if r <= 0:
        raise ValueError("radius must be positive")
    if f.nvars > 1:
        raise ValueError("proximity needs a function of one variable")
    if f.is_constant():
        return MCEstimate.exact(max(0.0, math.log(abs(float(f.to_fraction()))))
                                if f else 0.0, params.seed)
    den_roots = roots(f.den) if not f.den.is_constant() else np.zeros(0)
    close = np.abs(np.abs(den_roots) - r) <= 1e-9 * max(1.0, r)
    if close.any():
        raise PoleError(f"pole of {f} on or too near the circle |z| = {r}")
    n = params.samples
    theta = 2.0 * math.pi * np.arange(n) / n
    z = (r * np.exp(1j * theta))
    if f.nvars == 0:
        z = z.reshape(-1, 0)
    else:
        z = z.reshape(-1, 1)
    num, ls_num = eval_log_scaled([f.num], z)
    den, ls_den = eval_log_scaled([f.den], z)
    with np.errstate(divide="ignore"):
        logf = np.log(np.abs(num[0])) + ls_num - np.log(np.abs(den[0])) - ls_den
    vals = np.maximum(logf, 0.0)
    full = math.fsum(vals) / n
    half = math.fsum(vals[::2]) / len(vals[::2])
    return MCEstimate(full, abs(full - half), n, params.seed)
