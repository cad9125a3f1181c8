"""Conditional-draw internals shared by the two samplers and the evidence code."""

import math

import numpy as np
from scipy.linalg import solve_triangular

from . import _backend
from .distributions import mvn_logpdf
from .errors import NumericalError
from .model import delta_to_gamma, log_lik_terms

LOG_2PI = math.log(2 * math.pi)


class BetaConditional:
    """Normal full conditional of beta: precision X'diag(1/v)X + B0^-1.

    ``prior_prec`` and ``prior_prec_mean`` (B0^-1 and B0^-1 b0) are
    computed once per chain.
    """

    def __init__(self, X, prior_prec, prior_prec_mean):
        self.X = X
        self.XT = np.ascontiguousarray(X.T)
        self.prior_prec = prior_prec
        self.prior_prec_mean = prior_prec_mean

    def moments(self, target, variance, iteration=None):
        """(mean, lower Cholesky factor of the precision) given latent data.

        ``target`` is z - theta*w (or z - theta*nu), ``variance`` the
        per-observation latent variance.
        """
        inv_var = 1.0 / variance
        prec = (self.XT * inv_var) @ self.X + self.prior_prec
        try:
            chol = np.linalg.cholesky(prec)
        except np.linalg.LinAlgError as exc:
            raise NumericalError("beta conditional precision is not positive definite",
                                 iteration) from exc
        rhs = self.XT @ (target * inv_var) + self.prior_prec_mean
        half = solve_triangular(chol, rhs, lower=True, check_finite=False)
        mean = solve_triangular(chol.T, half, lower=False, check_finite=False)
        return mean, chol, half

    def draw(self, target, variance, rng, iteration=None):
        """One beta draw; returns (beta, mean, precision Cholesky factor)."""
        mean, chol, half = self.moments(target, variance, iteration)
        u = rng.standard_normal(mean.shape[0])
        beta = solve_triangular(chol.T, half + u, lower=False, check_finite=False)
        return beta, mean, chol


def normal_logpdf_prec(x, mean, prec_chol):
    """log N(x | mean, P^-1) with P = L L'."""
    v = prec_chol.T @ (x - mean)
    k = x.shape[0]
    return -0.5 * (k * LOG_2PI + v @ v) + np.sum(np.log(np.diag(prec_chol)))


def delta_log_kernel(dataset, beta, delta, prior, p, mu=None):
    """log f(y | beta, delta) + log N(delta | d0, D0); beta's prior cancels in ratios."""
    gamma = delta_to_gamma(delta)
    if mu is None:
        loglik = log_lik_terms(dataset, beta, gamma, 1.0, p).sum()
    else:
        loglik = _backend.kernels.ordinal_logprob(mu, dataset.y, gamma, 1.0, p).sum()
    return float(loglik) + mvn_logpdf(delta, prior.d0, chol=prior.D0_chol)


def log_alpha_mh(dataset, beta, delta_from, delta_to, prior, p, mu=None):
    """log of the MH acceptance probability for delta_from -> delta_to at fixed beta.

    The random-walk proposal is symmetric, so only the target ratio enters.
    """
    diff = (delta_log_kernel(dataset, beta, delta_to, prior, p, mu)
            - delta_log_kernel(dataset, beta, delta_from, prior, p, mu))
    return min(0.0, diff)
