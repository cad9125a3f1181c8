"""Log marginal likelihood (Chib-Jeliazkov for OR_I, Chib for OR_II) and DIC.

Every ordinate average is taken in log space with log-sum-exp.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from ._gibbs import delta_log_kernel, normal_logpdf_prec
from .distributions import cholesky_spd, inverse_gamma_logpdf, mvn_logpdf
from .errors import DomainError
from .model import delta_to_gamma, log_lik_terms, neg_log_lik_or1, neg_log_lik_or2


@dataclass(frozen=True)
class DicBundle:
    dic: float
    pd: float
    dev_post_mean: float

    @classmethod
    def from_parts(cls, dev_post_mean, pd):
        return cls(dev_post_mean + 2.0 * pd, pd, dev_post_mean)

    def as_dict(self):
        return {"dic": self.dic, "pd": self.pd, "dev_post_mean": self.dev_post_mean}


def _log_mean_exp(values):
    values = np.asarray(values, dtype=float)
    return float(logsumexp(values) - math.log(values.shape[0]))


def log_marg_like_or1(full_draws, reduced, dataset, prior, p, tune, details=False):
    """ln f(y|theta*) + ln pi(theta*) - ln pi(delta*|y) - ln pi(beta*|delta*, y).

    ``full_draws`` supplies the post-burn (beta, delta) draws for the
    numerator of the delta ordinate; ``reduced`` supplies the proposal draws
    for its denominator and the beta conditional moments.
    """
    betas = full_draws.post_beta
    deltas = full_draws.post_delta
    beta_star = betas.mean(axis=1)
    delta_star = np.asarray(reduced.delta_star, dtype=float)
    X = dataset.X
    prop_chol = tune * cholesky_spd(full_draws.dhat, "dhat")

    num_terms = np.empty(betas.shape[1])
    for m in range(betas.shape[1]):
        beta_m = betas[:, m]
        delta_m = deltas[:, m]
        mu = X @ beta_m
        diff = (delta_log_kernel(dataset, beta_m, delta_star, prior, p, mu=mu)
                - delta_log_kernel(dataset, beta_m, delta_m, prior, p, mu=mu))
        num_terms[m] = min(0.0, diff) + mvn_logpdf(delta_star, delta_m, chol=prop_chol)

    H = reduced.betadraws.shape[1]
    den_terms = np.empty(H)
    beta_terms = np.empty(H)
    for h in range(H):
        beta_h = reduced.betadraws[:, h]
        mu = X @ beta_h
        diff = (delta_log_kernel(dataset, beta_h, reduced.delta_props[:, h], prior, p, mu=mu)
                - delta_log_kernel(dataset, beta_h, delta_star, prior, p, mu=mu))
        den_terms[h] = min(0.0, diff)
        beta_terms[h] = normal_logpdf_prec(beta_star, reduced.beta_means[:, h],
                                           reduced.beta_prec_chol[h])

    log_num = _log_mean_exp(num_terms)
    log_den = _log_mean_exp(den_terms)
    log_delta_ord = log_num - log_den
    log_beta_ord = _log_mean_exp(beta_terms)
    loglik = float(log_lik_terms(dataset, beta_star, delta_to_gamma(delta_star), 1.0, p).sum())
    log_prior = (mvn_logpdf(beta_star, prior.b0, chol=prior.B0_chol)
                 + mvn_logpdf(delta_star, prior.d0, chol=prior.D0_chol))
    logml = loglik + log_prior - log_delta_ord - log_beta_ord
    if details:
        return logml, {
            "loglik": loglik, "log_prior": log_prior, "log_delta_ordinate": log_delta_ord,
            "log_beta_ordinate": log_beta_ord, "log_numerator": log_num, "log_denominator": log_den,
        }
    return logml


def log_marg_like_or2(full_draws, reduced, dataset, prior, p, gamma_fixed, details=False):
    """ln f(y|beta*, sigma*) + ln pi(beta*) + ln pi(sigma*) - ln pi(beta*|y) - ln pi(sigma*|beta*, y)."""
    betas = full_draws.post_beta
    sigmas = full_draws.post_sigma
    beta_star = betas.mean(axis=1)
    sigma_star = float(sigmas.mean())
    burn = full_draws.config.burn

    means = full_draws.beta_means[:, burn:]
    chols = full_draws.beta_prec_chol[burn:]
    beta_terms = np.array([normal_logpdf_prec(beta_star, means[:, g], chols[g])
                           for g in range(means.shape[1])])
    shape = reduced.ntilde / 2.0
    sigma_terms = np.array([inverse_gamma_logpdf(sigma_star, shape, d / 2.0)
                            for d in reduced.dtilde])

    log_beta_ord = _log_mean_exp(beta_terms)
    log_sigma_ord = _log_mean_exp(sigma_terms)
    loglik = -neg_log_lik_or2(dataset, beta_star, sigma_star, gamma_fixed, p)
    log_prior = (mvn_logpdf(beta_star, prior.b0, chol=prior.B0_chol)
                 + inverse_gamma_logpdf(sigma_star, prior.n0 / 2.0, prior.d0_scale / 2.0))
    logml = loglik + log_prior - log_beta_ord - log_sigma_ord
    if details:
        return logml, {
            "loglik": loglik, "log_prior": log_prior, "log_beta_ordinate": log_beta_ord,
            "log_sigma_ordinate": log_sigma_ord,
        }
    return logml


def _check_columns(ncol, burn, mcmc):
    if ncol != burn + mcmc:
        raise DomainError(f"draws have {ncol} columns, expected burn + mcmc = {burn + mcmc}")
    if mcmc < 1:
        raise DomainError("no post-burn draws")


def deviance_or1(dataset, draws, post_mean_beta, post_mean_delta, burn, mcmc, p):
    """DIC bundle from the post-burn (beta, delta) draws of an OR_I run."""
    betadraws = np.atleast_2d(draws.betadraws)
    deltadraws = np.atleast_2d(draws.deltadraws)
    _check_columns(betadraws.shape[1], burn, mcmc)
    _check_columns(deltadraws.shape[1], burn, mcmc)
    dev_post_mean = 2.0 * neg_log_lik_or1(dataset, post_mean_beta, post_mean_delta, p)[1]
    devs = np.array([2.0 * neg_log_lik_or1(dataset, betadraws[:, t], deltadraws[:, t], p)[1]
                     for t in range(burn, burn + mcmc)])
    return DicBundle.from_parts(dev_post_mean, float(devs.mean()) - dev_post_mean)


def deviance_or2(dataset, draws, gamma_fixed, post_mean_beta, post_mean_sigma, burn, mcmc, p):
    """DIC bundle from the post-burn (beta, sigma) draws of an OR_II run."""
    betadraws = np.atleast_2d(draws.betadraws)
    sigmadraws = np.ravel(draws.sigmadraws)
    _check_columns(betadraws.shape[1], burn, mcmc)
    _check_columns(sigmadraws.shape[0], burn, mcmc)
    dev_post_mean = 2.0 * neg_log_lik_or2(dataset, post_mean_beta, post_mean_sigma, gamma_fixed, p)
    devs = np.array([2.0 * neg_log_lik_or2(dataset, betadraws[:, t], sigmadraws[t], gamma_fixed, p)
                     for t in range(burn, burn + mcmc)])
    return DicBundle.from_parts(dev_post_mean, float(devs.mean()) - dev_post_mean)
