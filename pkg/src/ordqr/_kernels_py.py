"""Numpy implementations of the sampler hot loops.

This is the fallback used when the compiled ``_kernels`` extension is not
built, and the reference the compiled kernels are tested against. Both
modules take the same pre-drawn uniforms/normals and pull any extra
randomness (truncated-normal rejection regimes only) from the generator in
ascending index order, so for a given generator state both backends return
the same draws up to last-bit libm differences.
"""

import math

import numpy as np
from scipy.special import ndtr, ndtri

NAME = "python"

LOG_PROB_FLOOR = math.log(1e-300)
# standardized distance into a tail beyond which inverse-CDF sampling is
# replaced by exponential rejection
TAIL_CUTOFF = 5.0
# intervals narrower than this (in sd units) lose precision under the
# inverse CDF; they use uniform-proposal rejection instead
NARROW_WIDTH = 0.25
TINY = np.finfo(float).tiny


def _log_interval_prob(lo, hi, p):
    """log[F(hi) - F(lo)] for the standard AL(0, 1, p) CDF, lo < hi elementwise."""
    out = np.empty_like(hi)
    left = hi <= 0
    right = lo > 0
    mid = ~(left | right)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        lo_l, hi_l = lo[left], hi[left]
        out[left] = (
            math.log(p) + (1 - p) * hi_l + np.log(-np.expm1((1 - p) * (lo_l - hi_l)))
        )
        lo_r, hi_r = lo[right], hi[right]
        out[right] = math.log(1 - p) - p * lo_r + np.log(-np.expm1(-p * (hi_r - lo_r)))
        lo_m, hi_m = lo[mid], hi[mid]
        out[mid] = np.log(1.0 - (1 - p) * np.exp(-p * hi_m) - p * np.exp((1 - p) * lo_m))
    out[~(out >= LOG_PROB_FLOOR)] = LOG_PROB_FLOOR
    return out


def ordinal_logprob(mu, y, cut, sigma, p):
    """Per-observation log P(y_i | mu_i) with cut-points ``cut`` (length J+1, ±inf ends)."""
    mu = np.asarray(mu, dtype=float)
    cut = np.asarray(cut, dtype=float)
    y = np.asarray(y, dtype=np.int64)
    lo = (cut[y - 1] - mu) / sigma
    hi = (cut[y] - mu) / sigma
    return _log_interval_prob(lo, hi, p)


def category_probs_mean(mu, cut, sigma, p):
    """Category probabilities averaged over observations, a length-J vector."""
    mu = np.asarray(mu, dtype=float)
    cut = np.asarray(cut, dtype=float)
    u = (cut[None, :] - mu[:, None]) / sigma
    cdf = np.empty_like(u)
    neg = u <= 0
    cdf[neg] = p * np.exp((1 - p) * u[neg])
    cdf[~neg] = 1.0 - (1 - p) * np.exp(-p * u[~neg])
    return np.diff(cdf, axis=1).mean(axis=0)


def gig_half(lam, eta, normals, uniforms):
    """GIG(1/2, lam, eta) draws from one standard normal and one uniform each.

    Uses the inverse-Gaussian relation 1/X ~ IG(sqrt(eta/lam), eta) with the
    Michael-Schucany-Haas transform rewritten in terms of X, which stays
    finite as lam -> 0 (where it reduces to chi^2_1 / eta).
    """
    lam = np.asarray(lam, dtype=float)
    eta = np.asarray(eta, dtype=float)
    s = np.sqrt(lam / eta)
    a = np.asarray(normals, dtype=float) ** 2 / (2.0 * eta)
    x1 = s + a + np.sqrt(a * a + 2.0 * a * s)
    take_first = np.asarray(uniforms) * (x1 + s) <= x1
    with np.errstate(divide="ignore", invalid="ignore"):
        x2 = s * s / x1
    x = np.where(take_first, x1, x2)
    return np.maximum(x, TINY)


def _tail_draw(a, b, rng):
    """Standard normal restricted to (a, b) with a >= TAIL_CUTOFF.

    Exponential proposal truncated to (a, b) at the optimal rate; two
    uniforms per attempt.
    """
    lam = 0.5 * (a + math.sqrt(a * a + 4.0))
    em = math.expm1(-lam * (b - a))
    peak = min(lam, b)
    while True:
        u1 = rng.random()
        u2 = rng.random()
        x = a - math.log1p(u1 * em) / lam
        if u2 <= math.exp(-0.5 * ((x - lam) ** 2 - (peak - lam) ** 2)):
            return x


def _narrow_draw(a, b, rng):
    """Standard normal restricted to a narrow (a, b): uniform proposal, two uniforms per attempt."""
    m = a if a > 0 else (b if b < 0 else 0.0)
    while True:
        u1 = rng.random()
        u2 = rng.random()
        x = a + u1 * (b - a)
        if u2 <= math.exp(0.5 * (m * m - x * x)):
            return x


def truncnorm(mean, sd, lower, upper, uniforms, rng):
    """N(mean, sd^2) restricted to (lower, upper), elementwise.

    The central regime consumes the supplied uniform via the inverse CDF.
    Intervals lying TAIL_CUTOFF or more standard deviations into a tail use
    exponential rejection, and intervals narrower than NARROW_WIDTH use
    uniform rejection; both take their uniforms from ``rng``.
    """
    mean = np.asarray(mean, dtype=float)
    sd = np.asarray(sd, dtype=float)
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    u = np.asarray(uniforms, dtype=float)
    alpha = (lower - mean) / sd
    beta = (upper - mean) / sd
    x = np.empty_like(mean)

    right = alpha >= TAIL_CUTOFF
    left = beta <= -TAIL_CUTOFF
    narrow = ~(right | left) & (beta - alpha < NARROW_WIDTH)
    central = ~(right | left | narrow)

    a, b, uc = alpha[central], beta[central], u[central]
    pos = a > 0
    xc = np.empty_like(a)
    qa, qb = ndtr(-a[pos]), ndtr(-b[pos])
    xc[pos] = -ndtri(qa - uc[pos] * (qa - qb))
    neg = ~pos
    pa, pb = ndtr(a[neg]), ndtr(b[neg])
    xc[neg] = ndtri(pa + uc[neg] * (pb - pa))
    x[central] = xc

    for i in np.flatnonzero(~central):
        if right[i]:
            x[i] = _tail_draw(alpha[i], beta[i], rng)
        elif left[i]:
            x[i] = -_tail_draw(-beta[i], -alpha[i], rng)
        else:
            x[i] = _narrow_draw(alpha[i], beta[i], rng)

    x = np.where(x <= alpha, np.nextafter(alpha, np.inf), x)
    x = np.where(x >= beta, np.nextafter(beta, -np.inf), x)
    z = mean + sd * x
    z = np.where(z <= lower, np.nextafter(lower, np.inf), z)
    z = np.where(z >= upper, np.nextafter(upper, -np.inf), z)
    return z
