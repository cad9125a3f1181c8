"""Gibbs + Metropolis-Hastings sampler for the OR_I model (J >= 3, free cut-points).

One sweep draws beta | z, w, then w | beta, z, then delta by a random-walk MH
step with beta held at its new value, then z | beta, delta, w.
"""

import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import _backend
from ._gibbs import BetaConditional, delta_log_kernel, log_alpha_mh
from .distributions import QuantileSpec, cholesky_spd, spawn_rngs
from .errors import DomainError, NumericalError
from .model import OrdinalDataset, PriorOr1, delta_to_gamma

__all__ = [
    "Or1Config", "Or1Draws", "Or1Reduced", "Or1Fit", "DhatResult",
    "fit_or1", "draw_beta_or1", "draw_w", "compute_dhat", "draw_delta_mh",
    "draw_z_or1", "reduced_run_or1", "log_alpha_mh",
]


@dataclass(frozen=True)
class Or1Config:
    burn: int = 1125
    mcmc: int = 4500
    p: float = 0.25
    tune: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if int(self.burn) != self.burn or self.burn < 0:
            raise DomainError(f"burn must be a non-negative integer, got {self.burn!r}")
        if int(self.mcmc) != self.mcmc or self.mcmc < 100:
            raise DomainError(f"mcmc must be an integer >= 100, got {self.mcmc!r}")
        if not (0.0 < self.p < 1.0):
            raise DomainError(f"quantile p must lie in (0, 1), got {self.p!r}")
        if not (math.isfinite(self.tune) and self.tune > 0):
            raise DomainError(f"tune must be positive, got {self.tune!r}")
        object.__setattr__(self, "burn", int(self.burn))
        object.__setattr__(self, "mcmc", int(self.mcmc))
        object.__setattr__(self, "seed", int(self.seed))

    @property
    def nsim(self):
        return self.burn + self.mcmc


@dataclass
class Or1Draws:
    """Draws of every sweep, burn-in included (column t = sweep t+1)."""

    betadraws: np.ndarray
    deltadraws: np.ndarray
    accept_count: int
    dhat: np.ndarray
    config: Or1Config
    delta_init: np.ndarray = None
    flags: list = field(default_factory=list)

    @property
    def post_beta(self):
        return self.betadraws[:, self.config.burn:]

    @property
    def post_delta(self):
        return self.deltadraws[:, self.config.burn:]


@dataclass
class Or1Reduced:
    """Reduced run with delta fixed at delta*.

    ``beta_means``/``beta_prec_chol`` are the beta full-conditional moments
    built from (w, z) at each retained sweep; ``delta_props`` are the
    independent N(delta*, tune^2 Dhat) draws.
    """

    delta_star: np.ndarray
    betadraws: np.ndarray
    beta_means: np.ndarray
    beta_prec_chol: np.ndarray
    delta_props: np.ndarray


@dataclass
class Or1Fit:
    draws: Or1Draws
    reduced: Or1Reduced
    summary: object
    post_mean_beta: np.ndarray
    post_std_beta: np.ndarray
    post_mean_delta: np.ndarray
    post_std_delta: np.ndarray
    acceptance_rate: float
    log_marg_like: float
    dic: object
    names: tuple
    backend: str
    elapsed: float = 0.0

    @property
    def config(self):
        return self.draws.config

    @property
    def post_mean_gamma(self):
        return delta_to_gamma(self.post_mean_delta)


def _chain_setup(dataset, prior, spec):
    prior_prec = np.linalg.inv(prior.B0)
    prior_prec = 0.5 * (prior_prec + prior_prec.T)
    return BetaConditional(dataset.X, prior_prec, prior_prec @ prior.b0)


def draw_beta_or1(z, w, dataset, prior, spec, rng, return_moments=False):
    """beta ~ N(beta~, B~) given latent z and mixing weights w."""
    w = np.asarray(w, dtype=float)
    if np.any(~(w > 0)):
        raise DomainError("mixing weights w must be strictly positive")
    cond = _chain_setup(dataset, prior, spec)
    beta, mean, chol = cond.draw(np.asarray(z, dtype=float) - spec.theta * w, spec.tau2 * w, rng)
    if return_moments:
        return beta, mean, chol
    return beta


def draw_w(z, dataset, beta, spec, rng):
    """w_i ~ GIG(1/2, ((z_i - x_i'beta)/tau)^2, theta^2/tau^2 + 2)."""
    resid = np.asarray(z, dtype=float) - dataset.X @ np.asarray(beta, dtype=float)
    return _draw_w(resid, spec, rng)


def _draw_w(resid, spec, rng):
    n = resid.shape[0]
    lam = resid * resid / spec.tau2
    eta = np.full(n, spec.theta ** 2 / spec.tau2 + 2.0)
    normals = rng.standard_normal(n)
    uniforms = rng.random(n)
    return _backend.kernels.gig_half(lam, eta, normals, uniforms)


def draw_z_or1(dataset, beta, gamma, w, spec, rng):
    """z_i ~ TN on (gamma[y_i - 1], gamma[y_i]) with mean x_i'beta + theta w_i, variance tau^2 w_i."""
    gamma = np.asarray(gamma, dtype=float)
    if np.any(np.diff(gamma) <= 0):
        raise DomainError("cut-points must be strictly increasing")
    mu = dataset.X @ np.asarray(beta, dtype=float)
    return _draw_z(mu, np.asarray(w, dtype=float), dataset.y, gamma, 1.0, spec, rng)


def _draw_z(mu, mix, y, gamma, sigma, spec, rng):
    mean = mu + spec.theta * mix
    sd = np.sqrt(spec.tau2 * sigma * mix)
    uniforms = rng.random(mu.shape[0])
    return _backend.kernels.truncnorm(mean, sd, gamma[y - 1], gamma[y], uniforms, rng)


@dataclass
class DhatResult:
    dhat: np.ndarray
    delta_max: np.ndarray
    converged: bool
    flags: list


def _al_quantile(c, p):
    c = np.asarray(c, dtype=float)
    return np.where(c <= p, np.log(c / p) / (1 - p), -np.log((1 - c) / (1 - p)) / p)


def _default_delta_init(dataset, p):
    # widths between AL quantiles of the cumulative category frequencies
    cum = np.cumsum(dataset.counts())[:-1] / dataset.n
    widths = np.diff(_al_quantile(cum, p))
    return np.log(np.maximum(widths, 1e-3))


def _repair_spd(matrix):
    matrix = 0.5 * (matrix + matrix.T)
    vals, vecs = np.linalg.eigh(matrix)
    top = vals.max()
    if not (np.all(np.isfinite(vals)) and top > 0):
        return None, True
    floor = 1e-6 * top
    repaired = bool(np.any(vals < floor))
    vals = np.maximum(vals, floor)
    out = (vecs * vals) @ vecs.T
    return 0.5 * (out + out.T), repaired


def compute_dhat(dataset, p, beta_ref=None, delta_init=None, return_details=False):
    """Negative inverse Hessian of ln f(y | beta_ref, delta) at its maximizer over delta.

    Nelder-Mead maximization, central-difference Hessian, eigenvalue-floor
    repair. Falls back to 0.1 I if no usable curvature is found.
    """
    J = dataset.J
    m = J - 2
    beta_ref = np.zeros(dataset.k) if beta_ref is None else np.asarray(beta_ref, dtype=float)
    mu = dataset.X @ beta_ref
    y = dataset.y
    x0 = _default_delta_init(dataset, p) if delta_init is None else np.asarray(delta_init, dtype=float)
    if x0.shape != (m,):
        raise DomainError(f"delta_init must have length J-2 = {m}")

    def loglik(delta):
        if not np.all(np.isfinite(delta)) or np.any(np.abs(delta) > 50):
            return -np.inf
        return float(_backend.kernels.ordinal_logprob(mu, y, delta_to_gamma(delta), 1.0, p).sum())

    def objective(delta):
        val = loglik(delta)
        return 1e300 if not np.isfinite(val) else -val

    flags = []
    res = minimize(objective, x0, method="Nelder-Mead",
                   options={"maxfev": 500 * m, "fatol": 1e-6, "xatol": 1e-6})
    converged = bool(res.success)
    if not converged:
        flags.append(f"dhat optimizer did not converge: {res.message}")
    delta_max = np.asarray(res.x, dtype=float)
    if not np.all(np.isfinite(delta_max)) or objective(delta_max) >= 1e300:
        delta_max = x0.copy()
        flags.append("dhat optimizer failed; using starting value")

    h = 1e-4 * np.maximum(1.0, np.abs(delta_max))
    f0 = loglik(delta_max)
    hess = np.empty((m, m))
    for i in range(m):
        ei = np.zeros(m)
        ei[i] = h[i]
        hess[i, i] = (loglik(delta_max + ei) - 2 * f0 + loglik(delta_max - ei)) / h[i] ** 2
        for j in range(i + 1, m):
            ej = np.zeros(m)
            ej[j] = h[j]
            val = (loglik(delta_max + ei + ej) - loglik(delta_max + ei - ej)
                   - loglik(delta_max - ei + ej) + loglik(delta_max - ei - ej)) / (4 * h[i] * h[j])
            hess[i, j] = hess[j, i] = val

    dhat = None
    if np.all(np.isfinite(hess)):
        try:
            dhat, repaired = _repair_spd(np.linalg.inv(-hess))
            if repaired:
                flags.append("dhat repaired by eigenvalue flooring")
        except np.linalg.LinAlgError:
            dhat = None
    if dhat is None:
        dhat = 0.1 * np.eye(m)
        flags.append("dhat fell back to 0.1*I")
    if return_details:
        return DhatResult(dhat, delta_max, converged, flags)
    return dhat


def draw_delta_mh(delta_curr, beta, dataset, prior, tune, dhat, p, rng, dhat_chol=None, mu=None):
    """One random-walk MH update of delta; returns (delta_next, accepted)."""
    delta_curr = np.asarray(delta_curr, dtype=float)
    if dhat_chol is None:
        dhat_chol = cholesky_spd(dhat, "dhat")
    if mu is None:
        mu = dataset.X @ np.asarray(beta, dtype=float)
    prop = delta_curr + tune * (dhat_chol @ rng.standard_normal(delta_curr.shape[0]))
    log_u = math.log(rng.random())
    log_alpha = log_alpha_mh(dataset, beta, delta_curr, prop, prior, p, mu=mu)
    if log_u < log_alpha:
        return prop, True
    return delta_curr, False


def _check_inputs(dataset, prior):
    if not isinstance(dataset, OrdinalDataset):
        raise DomainError("dataset must be an OrdinalDataset")
    if prior.b0.shape[0] != dataset.k:
        raise DomainError(f"prior b0 has length {prior.b0.shape[0]}, dataset has k={dataset.k}")
    if prior.d0.shape[0] != dataset.J - 2:
        raise DomainError(f"prior d0 has length {prior.d0.shape[0]}, need J-2 = {dataset.J - 2}")


def _run_chain(dataset, prior, config, dhat, delta0, rng):
    spec = QuantileSpec(config.p)
    cond = _chain_setup(dataset, prior, spec)
    X, y = dataset.X, dataset.y
    n, k, m = dataset.n, dataset.k, dataset.J - 2
    nsim = config.nsim
    dhat_chol = cholesky_spd(dhat, "dhat")
    betadraws = np.empty((k, nsim))
    deltadraws = np.empty((m, nsim))

    beta = np.zeros(k)
    delta = np.array(delta0, dtype=float)
    w = np.ones(n)
    mu = X @ beta
    z = _draw_z(mu, w, y, delta_to_gamma(delta), 1.0, spec, rng)
    kernel_curr = None
    accepted = 0
    for it in range(nsim):
        beta, _, _ = cond.draw(z - spec.theta * w, spec.tau2 * w, rng, iteration=it + 1)
        mu = X @ beta
        w = _draw_w(z - mu, spec, rng)

        prop = delta + config.tune * (dhat_chol @ rng.standard_normal(m))
        log_u = math.log(rng.random())
        kernel_curr = delta_log_kernel(dataset, beta, delta, prior, config.p, mu=mu)
        kernel_prop = delta_log_kernel(dataset, beta, prop, prior, config.p, mu=mu)
        if log_u < min(0.0, kernel_prop - kernel_curr):
            delta = prop
            accepted += 1
        assert np.all(np.isfinite(delta))

        z = _draw_z(mu, w, y, delta_to_gamma(delta), 1.0, spec, rng)
        if not (np.all(np.isfinite(beta)) and np.all(np.isfinite(z))):
            raise NumericalError("non-finite state in OR_I sweep", it + 1)
        betadraws[:, it] = beta
        deltadraws[:, it] = delta
    return betadraws, deltadraws, accepted


def reduced_run_or1(dataset, prior, config, delta_star, rng, dhat=None, beta_start=None):
    """Sweeps of beta, w, z with delta pinned at delta*, plus delta^(h) ~ N(delta*, tune^2 Dhat).

    A fresh burn of ``config.burn`` sweeps is discarded; ``config.mcmc``
    sweeps are kept.
    """
    _check_inputs(dataset, prior)
    delta_star = np.asarray(delta_star, dtype=float)
    if not np.all(np.isfinite(delta_star)) or delta_star.shape != (dataset.J - 2,):
        raise DomainError("delta_star must be a finite vector of length J-2")
    if dhat is None:
        dhat = compute_dhat(dataset, config.p)
    spec = QuantileSpec(config.p)
    cond = _chain_setup(dataset, prior, spec)
    X, y = dataset.X, dataset.y
    n, k, m = dataset.n, dataset.k, dataset.J - 2
    gamma = delta_to_gamma(delta_star)
    dhat_chol = cholesky_spd(dhat, "dhat")
    H = config.mcmc

    betadraws = np.empty((k, H))
    means = np.empty((k, H))
    chols = np.empty((H, k, k))
    props = np.empty((m, H))

    beta = np.zeros(k) if beta_start is None else np.asarray(beta_start, dtype=float).copy()
    w = np.ones(n)
    z = _draw_z(X @ beta, w, y, gamma, 1.0, spec, rng)
    for it in range(config.burn + H):
        beta, mean, chol = cond.draw(z - spec.theta * w, spec.tau2 * w, rng, iteration=it + 1)
        mu = X @ beta
        w = _draw_w(z - mu, spec, rng)
        z = _draw_z(mu, w, y, gamma, 1.0, spec, rng)
        prop = delta_star + config.tune * (dhat_chol @ rng.standard_normal(m))
        h = it - config.burn
        if h >= 0:
            betadraws[:, h] = beta
            means[:, h] = mean
            chols[h] = chol
            props[:, h] = prop
    return Or1Reduced(delta_star.copy(), betadraws, means, chols, props)


def fit_or1(dataset, prior=None, config=None):
    """Run the OR_I sampler and attach summaries, log marginal likelihood and DIC."""
    from . import evidence
    from .diagnostics import summarize

    config = Or1Config() if config is None else config
    prior = PriorOr1.default(dataset.k, dataset.J) if prior is None else prior
    _check_inputs(dataset, prior)
    t0 = time.perf_counter()
    chain_rng, reduced_rng = spawn_rngs(config.seed, 2)

    info = compute_dhat(dataset, config.p, return_details=True)
    betadraws, deltadraws, accepted = _run_chain(dataset, prior, config, info.dhat,
                                                 info.delta_max, chain_rng)
    draws = Or1Draws(betadraws, deltadraws, accepted, info.dhat, config,
                     delta_init=info.delta_max, flags=list(info.flags))

    names = tuple(dataset.covariate_names) + tuple(f"delta_{j + 1}" for j in range(dataset.J - 2))
    summary = summarize(np.vstack([betadraws, deltadraws]), config.burn, names)
    k = dataset.k
    post_mean_beta = summary.mean[:k].copy()
    post_mean_delta = summary.mean[k:].copy()

    reduced = reduced_run_or1(dataset, prior, config, post_mean_delta, reduced_rng,
                              dhat=info.dhat, beta_start=post_mean_beta)
    logml = evidence.log_marg_like_or1(draws, reduced, dataset, prior, config.p, config.tune)
    dic = evidence.deviance_or1(dataset, draws, post_mean_beta, post_mean_delta,
                                config.burn, config.mcmc, config.p)
    return Or1Fit(
        draws=draws,
        reduced=reduced,
        summary=summary,
        post_mean_beta=post_mean_beta,
        post_std_beta=summary.std[:k].copy(),
        post_mean_delta=post_mean_delta,
        post_std_delta=summary.std[k:].copy(),
        acceptance_rate=round(100.0 * accepted / config.nsim, 2),
        log_marg_like=logml,
        dic=dic,
        names=names,
        backend=_backend.active(),
        elapsed=time.perf_counter() - t0,
    )

