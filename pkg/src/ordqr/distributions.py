"""Distribution primitives: asymmetric Laplace (AL) density and CDF, and the
seeded samplers used by the Gibbs/MH steps.

All samplers take a :class:`numpy.random.Generator`; one generator per chain.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular

from . import _backend
from .errors import DomainError, NotSPDError


@dataclass(frozen=True)
class QuantileSpec:
    """Quantile level p with the normal-exponential mixture constants.

    ``theta = (1 - 2p) / (p (1 - p))`` and ``tau = sqrt(2 / (p (1 - p)))``.
    """

    p: float
    theta: float = field(init=False)
    tau: float = field(init=False)

    def __post_init__(self):
        p = float(self.p)
        if not (0.0 < p < 1.0):
            raise DomainError(f"quantile p must lie in (0, 1), got {self.p!r}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "theta", (1 - 2 * p) / (p * (1 - p)))
        object.__setattr__(self, "tau", math.sqrt(2 / (p * (1 - p))))

    @property
    def tau2(self):
        return 2 / (self.p * (1 - self.p))


def make_rng(seed):
    """Generator for one chain. Same seed, same stream."""
    return np.random.default_rng(np.random.SeedSequence(int(seed)))


def spawn_rngs(seed, count):
    """``count`` independent generators derived from one seed."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(int(seed)).spawn(count)]


def _check_p(p):
    if not (0.0 < p < 1.0):
        raise DomainError(f"quantile p must lie in (0, 1), got {p!r}")


def _check_loc_scale(mu, sigma):
    mu = np.asarray(mu, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    if not np.all(np.isfinite(mu)):
        raise DomainError("location must be finite")
    if not np.all(np.isfinite(sigma)) or np.any(sigma <= 0):
        raise DomainError("scale must be finite and positive")
    return mu, sigma


def _as_output(arr):
    return float(arr) if np.ndim(arr) == 0 else arr


def al_cdf(x, mu=0.0, sigma=1.0, p=0.5):
    """CDF of AL(mu, sigma, p); ``x`` may be an array and may contain ±inf."""
    _check_p(p)
    mu, sigma = _check_loc_scale(mu, sigma)
    u = (np.asarray(x, dtype=float) - mu) / sigma
    with np.errstate(over="ignore"):
        out = np.where(u <= 0, p * np.exp((1 - p) * np.minimum(u, 0.0)),
                       1.0 - (1 - p) * np.exp(-p * np.maximum(u, 0.0)))
    return _as_output(out)


def al_pdf(x, mu=0.0, sigma=1.0, p=0.5):
    """Density p(1-p)/sigma * exp(-rho_p(u)) with u = (x - mu)/sigma."""
    _check_p(p)
    mu, sigma = _check_loc_scale(mu, sigma)
    u = (np.asarray(x, dtype=float) - mu) / sigma
    check = u * (p - (u < 0))
    out = p * (1 - p) / sigma * np.exp(-check)
    return _as_output(out)


def sample_al(mu, sigma, p, rng, size=None):
    """AL(mu, sigma, p) draws via sigma*(theta*w + tau*sqrt(w)*u) + mu."""
    _check_loc_scale(mu, sigma)
    q = QuantileSpec(p)
    w = rng.standard_exponential(size)
    u = rng.standard_normal(size)
    return mu + sigma * (q.theta * w + q.tau * np.sqrt(w) * u)


def sample_gig_half(lam, eta, rng, size=None):
    """GIG(1/2, lam, eta) draws: density ∝ x^(-1/2) exp(-(lam/x + eta*x)/2).

    ``lam = 0`` gives Gamma(shape 1/2, rate eta/2). One standard normal and
    one uniform are consumed per draw (normals first, as a block).
    """
    lam = np.asarray(lam, dtype=float)
    eta = np.asarray(eta, dtype=float)
    if np.any(~np.isfinite(eta)) or np.any(eta <= 0):
        raise DomainError("GIG eta must be finite and positive")
    if np.any(~np.isfinite(lam)) or np.any(lam < 0):
        raise DomainError("GIG lambda must be finite and non-negative")
    shape = np.broadcast_shapes(lam.shape, eta.shape) if size is None else size
    normals = rng.standard_normal(shape)
    uniforms = rng.random(shape)
    out = _backend.kernels.gig_half(
        np.broadcast_to(lam, shape), np.broadcast_to(eta, shape), normals, uniforms
    )
    return _as_output(np.reshape(out, shape))


def sample_truncated_normal(mean, variance, lower, upper, rng, size=None):
    """N(mean, variance) restricted to the open interval (lower, upper).

    Bounds may be infinite. Inverse-CDF in the central regime; exponential
    rejection once the interval sits five or more standard deviations into a
    tail.
    """
    mean = np.asarray(mean, dtype=float)
    variance = np.asarray(variance, dtype=float)
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    if np.any(~(variance > 0)) or np.any(~np.isfinite(variance)):
        raise DomainError("truncated normal variance must be finite and positive")
    if np.any(~(lower < upper)):
        raise DomainError("truncated normal needs lower < upper")
    if not np.all(np.isfinite(mean)):
        raise DomainError("truncated normal mean must be finite")
    shape = np.broadcast_shapes(mean.shape, variance.shape, lower.shape, upper.shape)
    if size is not None:
        shape = np.broadcast_shapes(shape, (size,) if np.isscalar(size) else tuple(size))
    uniforms = rng.random(shape)
    out = _backend.kernels.truncnorm(
        np.broadcast_to(mean, shape), np.broadcast_to(np.sqrt(variance), shape),
        np.broadcast_to(lower, shape), np.broadcast_to(upper, shape), uniforms, rng,
    )
    return _as_output(np.reshape(out, shape))


def sample_inverse_gamma(shape, scale, rng, size=None):
    """Draws with density ∝ x^(-shape-1) exp(-scale/x)."""
    if not (np.all(np.asarray(shape) > 0) and np.all(np.asarray(scale) > 0)):
        raise DomainError("inverse-gamma shape and scale must be positive")
    g = rng.standard_gamma(shape, size)
    return _as_output(scale / g)


def inverse_gamma_logpdf(x, shape, scale):
    return shape * math.log(scale) - math.lgamma(shape) - (shape + 1) * math.log(x) - scale / x


def cholesky_spd(matrix, what="matrix"):
    """Lower Cholesky factor, raising :class:`NotSPDError` on failure."""
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise NotSPDError(f"{what} must be square")
    if not np.allclose(matrix, matrix.T, rtol=1e-10, atol=1e-12):
        raise NotSPDError(f"{what} is not symmetric")
    try:
        return np.linalg.cholesky(matrix)
    except np.linalg.LinAlgError as exc:
        raise NotSPDError(f"{what} is not positive definite") from exc


def sample_mvn(mean, covariance, rng):
    """mean + L u with L the lower Cholesky factor of ``covariance``."""
    mean = np.asarray(mean, dtype=float)
    chol = cholesky_spd(covariance, "covariance")
    return mean + chol @ rng.standard_normal(mean.shape[0])


def mvn_logpdf(x, mean, covariance=None, *, chol=None):
    """Log density of N(mean, covariance); pass ``chol`` to reuse a factor."""
    diff = np.asarray(x, dtype=float) - np.asarray(mean, dtype=float)
    if chol is None:
        chol = cholesky_spd(covariance, "covariance")
    v = solve_triangular(chol, diff, lower=True, check_finite=False)
    k = diff.shape[0]
    return float(-0.5 * (k * math.log(2 * math.pi) + v @ v) - np.sum(np.log(np.diag(chol))))
