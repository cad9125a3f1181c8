"""Gibbs sampler for the OR_II model: three categories, cut-points (0, gamma2) fixed, scale sigma free.

One sweep draws beta | z, sigma, nu, then sigma | z, beta, nu, then
nu | z, beta, sigma, then z | beta, sigma, nu.
"""

import math
import time
from dataclasses import dataclass

import numpy as np

from . import _backend
from ._gibbs import BetaConditional
from .distributions import QuantileSpec, spawn_rngs
from .errors import DomainError, ModelMismatchError, NumericalError
from .model import OrdinalDataset, PriorOr2, or2_cutpoints

__all__ = [
    "Or2Config", "Or2Draws", "Or2Reduced", "Or2Fit", "fit_or2", "draw_beta_or2",
    "draw_sigma", "draw_nu", "draw_z_or2", "reduced_run_or2",
]


@dataclass(frozen=True)
class Or2Config:
    burn: int = 1125
    mcmc: int = 4500
    p: float = 0.25
    gamma2: float = 3.0
    seed: int = 0

    def __post_init__(self):
        if int(self.burn) != self.burn or self.burn < 0:
            raise DomainError(f"burn must be a non-negative integer, got {self.burn!r}")
        if int(self.mcmc) != self.mcmc or self.mcmc < 100:
            raise DomainError(f"mcmc must be an integer >= 100, got {self.mcmc!r}")
        if not (0.0 < self.p < 1.0):
            raise DomainError(f"quantile p must lie in (0, 1), got {self.p!r}")
        if not (math.isfinite(self.gamma2) and self.gamma2 > 0):
            raise DomainError(f"gamma2 must be positive, got {self.gamma2!r}")
        object.__setattr__(self, "burn", int(self.burn))
        object.__setattr__(self, "mcmc", int(self.mcmc))
        object.__setattr__(self, "seed", int(self.seed))

    @property
    def nsim(self):
        return self.burn + self.mcmc


@dataclass
class Or2Draws:
    """Draws of every sweep, burn-in included.

    ``beta_means``/``beta_prec_chol`` hold the beta full-conditional moments
    in force when each beta column was drawn.
    """

    betadraws: np.ndarray
    sigmadraws: np.ndarray
    beta_means: np.ndarray
    beta_prec_chol: np.ndarray
    config: Or2Config

    @property
    def post_beta(self):
        return self.betadraws[:, self.config.burn:]

    @property
    def post_sigma(self):
        return self.sigmadraws[0, self.config.burn:]


@dataclass
class Or2Reduced:
    """Reduced run with beta pinned at beta*: sigma draws and the IG scale d~ used for each."""

    beta_star: np.ndarray
    sigmadraws: np.ndarray
    dtilde: np.ndarray
    ntilde: float


@dataclass
class Or2Fit:
    draws: Or2Draws
    reduced: Or2Reduced
    summary: object
    post_mean_beta: np.ndarray
    post_std_beta: np.ndarray
    post_mean_sigma: float
    post_std_sigma: float
    log_marg_like: float
    dic: object
    names: tuple
    gamma_fixed: np.ndarray
    backend: str
    elapsed: float = 0.0

    @property
    def config(self):
        return self.draws.config


def _setup(dataset, prior):
    prior_prec = np.linalg.inv(prior.B0)
    prior_prec = 0.5 * (prior_prec + prior_prec.T)
    return BetaConditional(dataset.X, prior_prec, prior_prec @ prior.b0)


def draw_beta_or2(z, nu, sigma, dataset, prior, spec, rng, return_moments=False):
    """beta ~ N(beta~, B~) with latent variances tau^2 sigma nu_i."""
    nu = np.asarray(nu, dtype=float)
    if np.any(~(nu > 0)) or not sigma > 0:
        raise DomainError("nu and sigma must be strictly positive")
    cond = _setup(dataset, prior)
    beta, mean, chol = cond.draw(np.asarray(z, dtype=float) - spec.theta * nu,
                                 spec.tau2 * sigma * nu, rng)
    return (beta, mean, chol) if return_moments else beta


def _sigma_params(resid, nu, prior, spec):
    dev = resid - spec.theta * nu
    ntilde = prior.n0 + 3 * resid.shape[0]
    dtilde = float(np.sum(dev * dev / (spec.tau2 * nu)) + prior.d0_scale + 2.0 * nu.sum())
    return ntilde, dtilde


def draw_sigma(z, beta, nu, dataset, prior, spec, rng, return_params=False):
    """sigma ~ IG(n~/2, d~/2), n~ = n0 + 3n, d~ = sum (z - x'beta - theta nu)^2/(tau^2 nu) + d0 + 2 sum nu."""
    nu = np.asarray(nu, dtype=float)
    resid = np.asarray(z, dtype=float) - dataset.X @ np.asarray(beta, dtype=float)
    ntilde, dtilde = _sigma_params(resid, nu, prior, spec)
    if not (dtilde > 0 and math.isfinite(dtilde)):
        raise NumericalError(f"inverse-gamma scale d~ = {dtilde!r} is not positive")
    sigma = (dtilde / 2.0) / rng.standard_gamma(ntilde / 2.0)
    return (sigma, ntilde, dtilde) if return_params else sigma


def _draw_nu(resid, sigma, spec, rng):
    n = resid.shape[0]
    lam = resid * resid / (spec.tau2 * sigma)
    eta = np.full(n, spec.theta ** 2 / (spec.tau2 * sigma) + 2.0 / sigma)
    normals = rng.standard_normal(n)
    uniforms = rng.random(n)
    return _backend.kernels.gig_half(lam, eta, normals, uniforms)


def draw_nu(z, beta, sigma, dataset, spec, rng):
    """nu_i ~ GIG(1/2, (z_i - x_i'beta)^2/(tau^2 sigma), theta^2/(tau^2 sigma) + 2/sigma)."""
    if not sigma > 0:
        raise DomainError("sigma must be positive")
    resid = np.asarray(z, dtype=float) - dataset.X @ np.asarray(beta, dtype=float)
    return _draw_nu(resid, sigma, spec, rng)


def _draw_z(mu, sigma, nu, y, gamma, spec, rng):
    mean = mu + spec.theta * nu
    sd = np.sqrt(spec.tau2 * sigma * nu)
    uniforms = rng.random(mu.shape[0])
    return _backend.kernels.truncnorm(mean, sd, gamma[y - 1], gamma[y], uniforms, rng)


def draw_z_or2(dataset, beta, sigma, nu, gamma_fixed, spec, rng):
    """z_i ~ TN on its category interval with mean x_i'beta + theta nu_i, variance tau^2 sigma nu_i."""
    gamma_fixed = np.asarray(gamma_fixed, dtype=float)
    if gamma_fixed.shape != (4,) or gamma_fixed[1] != 0 or not gamma_fixed[2] > 0:
        raise DomainError("OR_II cut-points must be (-inf, 0, gamma2 > 0, inf)")
    mu = dataset.X @ np.asarray(beta, dtype=float)
    return _draw_z(mu, sigma, np.asarray(nu, dtype=float), dataset.y, gamma_fixed, spec, rng)


def _check_inputs(dataset, prior):
    if not isinstance(dataset, OrdinalDataset):
        raise DomainError("dataset must be an OrdinalDataset")
    if dataset.J != 3:
        raise ModelMismatchError(
            f"OR_II needs exactly 3 outcome categories, found J={dataset.J}; use the OR_I model")
    if prior.b0.shape[0] != dataset.k:
        raise DomainError(f"prior b0 has length {prior.b0.shape[0]}, dataset has k={dataset.k}")


def _run_chain(dataset, prior, config, rng):
    spec = QuantileSpec(config.p)
    cond = _setup(dataset, prior)
    gamma = or2_cutpoints(config.gamma2)
    X, y = dataset.X, dataset.y
    n, k = dataset.n, dataset.k
    nsim = config.nsim
    betadraws = np.empty((k, nsim))
    sigmadraws = np.empty((1, nsim))
    means = np.empty((k, nsim))
    chols = np.empty((nsim, k, k))

    beta = np.zeros(k)
    sigma = 1.0
    nu = np.ones(n)
    z = _draw_z(X @ beta, sigma, nu, y, gamma, spec, rng)
    for it in range(nsim):
        beta, mean, chol = cond.draw(z - spec.theta * nu, spec.tau2 * sigma * nu, rng,
                                     iteration=it + 1)
        mu = X @ beta
        resid = z - mu
        ntilde, dtilde = _sigma_params(resid, nu, prior, spec)
        sigma = (dtilde / 2.0) / rng.standard_gamma(ntilde / 2.0)
        nu = _draw_nu(resid, sigma, spec, rng)
        z = _draw_z(mu, sigma, nu, y, gamma, spec, rng)
        if not (math.isfinite(sigma) and sigma > 0 and np.all(np.isfinite(z))):
            raise NumericalError("non-finite state in OR_II sweep", it + 1)
        betadraws[:, it] = beta
        sigmadraws[0, it] = sigma
        means[:, it] = mean
        chols[it] = chol
    return Or2Draws(betadraws, sigmadraws, means, chols, config)


def reduced_run_or2(dataset, prior, config, beta_star, rng):
    """Sweeps of sigma, nu, z with beta pinned at beta*; burn discarded, mcmc kept."""
    _check_inputs(dataset, prior)
    beta_star = np.asarray(beta_star, dtype=float)
    if beta_star.shape != (dataset.k,) or not np.all(np.isfinite(beta_star)):
        raise DomainError("beta_star must be a finite k-vector")
    spec = QuantileSpec(config.p)
    gamma = or2_cutpoints(config.gamma2)
    y = dataset.y
    mu = dataset.X @ beta_star
    G = config.mcmc
    sigmas = np.empty(G)
    dtildes = np.empty(G)
    ntilde = prior.n0 + 3 * dataset.n

    sigma = 1.0
    nu = np.ones(dataset.n)
    z = _draw_z(mu, sigma, nu, y, gamma, spec, rng)
    for it in range(config.burn + G):
        ntilde, dtilde = _sigma_params(z - mu, nu, prior, spec)
        sigma = (dtilde / 2.0) / rng.standard_gamma(ntilde / 2.0)
        nu = _draw_nu(z - mu, sigma, spec, rng)
        z = _draw_z(mu, sigma, nu, y, gamma, spec, rng)
        g = it - config.burn
        if g >= 0:
            sigmas[g] = sigma
            dtildes[g] = dtilde
    return Or2Reduced(beta_star.copy(), sigmas, dtildes, float(ntilde))


def fit_or2(dataset, prior=None, config=None):
    """Run the OR_II sampler and attach summaries, log marginal likelihood and DIC."""
    from . import evidence
    from .diagnostics import summarize

    config = Or2Config() if config is None else config
    prior = PriorOr2.default(dataset.k) if prior is None else prior
    _check_inputs(dataset, prior)
    t0 = time.perf_counter()
    chain_rng, reduced_rng = spawn_rngs(config.seed, 2)
    gamma = or2_cutpoints(config.gamma2)

    draws = _run_chain(dataset, prior, config, chain_rng)
    names = tuple(dataset.covariate_names) + ("sigma",)
    summary = summarize(np.vstack([draws.betadraws, draws.sigmadraws]), config.burn, names)
    k = dataset.k
    post_mean_beta = summary.mean[:k].copy()
    post_mean_sigma = float(summary.mean[k])

    reduced = reduced_run_or2(dataset, prior, config, post_mean_beta, reduced_rng)
    logml = evidence.log_marg_like_or2(draws, reduced, dataset, prior, config.p, gamma)
    dic = evidence.deviance_or2(dataset, draws, gamma, post_mean_beta, post_mean_sigma,
                                config.burn, config.mcmc, config.p)
    return Or2Fit(
        draws=draws,
        reduced=reduced,
        summary=summary,
        post_mean_beta=post_mean_beta,
        post_std_beta=summary.std[:k].copy(),
        post_mean_sigma=post_mean_sigma,
        post_std_sigma=float(summary.std[k]),
        log_marg_like=logml,
        dic=dic,
        names=names,
        gamma_fixed=gamma,
        backend=_backend.active(),
        elapsed=time.perf_counter() - t0,
    )
