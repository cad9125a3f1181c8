"""Posterior summaries, batch-means inefficiency factors, average covariate effects."""

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateChainError, DomainError
from .model import delta_to_gamma, outcome_probs_or1, outcome_probs_or2


@dataclass
class SummaryTable:
    """Per-parameter posterior mean, sd and equal-tailed 95% interval."""

    names: tuple
    mean: np.ndarray
    std: np.ndarray
    upper: np.ndarray
    lower: np.ndarray

    COLUMNS = ("Post Mean", "Post Std", "Upper Credible", "Lower Credible")

    def rows(self):
        for i, name in enumerate(self.names):
            yield name, float(self.mean[i]), float(self.std[i]), float(self.upper[i]), float(self.lower[i])

    def to_text(self, digits=4):
        width = max(12, max(len(n) for n in self.names) + 2)
        lines = [" " * width + "".join(f"{c:>16}" for c in self.COLUMNS)]
        for name, *vals in self.rows():
            lines.append(f"{name:<{width}}" + "".join(f"{v:>16.{digits}f}" for v in vals))
        return "\n".join(lines)

    def as_records(self):
        return [{"name": n, "post_mean": m, "post_std": s, "upper_credible": u, "lower_credible": lo}
                for n, m, s, u, lo in self.rows()]


def summarize(draws, burn, names=None):
    """Summaries over post-burn columns of a parameters x iterations matrix."""
    draws = np.atleast_2d(np.asarray(draws, dtype=float))
    if not (0 <= burn < draws.shape[1]):
        raise DomainError(f"burn={burn} leaves no post-burn columns out of {draws.shape[1]}")
    post = draws[:, burn:]
    names = tuple(names) if names is not None else tuple(f"param_{i + 1}" for i in range(draws.shape[0]))
    if len(names) != draws.shape[0]:
        raise DomainError("one name per parameter row is required")
    std = post.std(axis=1, ddof=1) if post.shape[1] > 1 else np.zeros(post.shape[0])
    lower, upper = np.quantile(post, [0.025, 0.975], axis=1)
    return SummaryTable(names, post.mean(axis=1), std, upper, lower)


def trace_export(draws, burn, names=None):
    """Post-burn series per parameter, as an ordered {name: 1-d array} mapping."""
    draws = np.atleast_2d(np.asarray(draws, dtype=float))
    if not (0 <= burn < draws.shape[1]):
        raise DomainError("burn leaves no post-burn columns")
    names = tuple(names) if names is not None else tuple(f"param_{i + 1}" for i in range(draws.shape[0]))
    return {name: draws[i, burn:].copy() for i, name in enumerate(names)}


@dataclass
class InefficiencySummary:
    factors: np.ndarray
    batch_sizes: np.ndarray
    cutoff: float
    names: tuple = ()

    def to_text(self, digits=4):
        width = max(12, max((len(n) for n in self.names), default=0) + 2)
        lines = [" " * width + f"{'Inefficiency':>14}"]
        for name, f in zip(self.names, self.factors):
            lines.append(f"{name:<{width}}{f:>14.{digits}f}")
        return "\n".join(lines)


def _acf(x, max_lag):
    x = x - x.mean()
    n = x.shape[0]
    nfft = 1 << int(np.ceil(np.log2(2 * n)))
    spec = np.fft.rfft(x, nfft)
    acov = np.fft.irfft(spec * np.conj(spec), nfft)[: max_lag + 1]
    return acov / acov[0]


def inefficiency_factor(draws, cutoff, names=None):
    """Batch-means inefficiency factor per parameter row.

    Batch size is the first lag whose |autocorrelation| drops below
    ``cutoff`` (searched up to min(M/2, 500)), kept within [1, M/10].
    """
    draws = np.atleast_2d(np.asarray(draws, dtype=float))
    if not (0.0 < cutoff < 1.0):
        raise DomainError(f"cutoff must lie in (0, 1), got {cutoff!r}")
    M = draws.shape[1]
    if M < 100:
        raise DomainError(f"need at least 100 draws, got {M}")
    max_lag = min(M // 2, 500)
    cap = max(1, M // 10)
    factors = np.empty(draws.shape[0])
    sizes = np.empty(draws.shape[0], dtype=int)
    for r, x in enumerate(draws):
        var = x.var(ddof=1)
        if not (var > 0):
            raise DegenerateChainError(f"parameter row {r} has zero variance")
        acf = _acf(x, max_lag)
        below = np.nonzero(np.abs(acf[1:]) < cutoff)[0]
        b = int(below[0]) + 1 if below.size else max_lag
        b = min(max(b, 1), cap)
        nb = M // b
        batch_means = x[: nb * b].reshape(nb, b).mean(axis=1)
        factors[r] = b * batch_means.var(ddof=1) / var
        sizes[r] = b
    names = tuple(names) if names is not None else tuple(f"param_{i + 1}" for i in range(draws.shape[0]))
    return InefficiencySummary(factors, sizes, float(cutoff), names)


@dataclass
class CovEffectResult:
    effect: np.ndarray
    p: float
    n_draws: int
    meta: dict = field(default_factory=dict)

    def to_text(self, digits=4):
        lines = [f"{'':12}{'Covariate Effect':>18}"]
        for j, v in enumerate(self.effect):
            lines.append(f"{'Category_' + str(j + 1):<12}{v:>18.{digits}f}")
        return "\n".join(lines)


def _check_mods(dataset, x1, x2):
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    if x1.shape != dataset.X.shape or x2.shape != dataset.X.shape:
        raise DomainError(f"modified matrices must be {dataset.X.shape}, got {x1.shape} and {x2.shape}")
    return x1, x2


def _average_effect(prob_fn, params, x1, x2):
    total = None
    for args in params:
        diff = (prob_fn(x2, *args) - prob_fn(x1, *args)).mean(axis=0)
        total = diff if total is None else total + diff
    return total / len(params)


def cov_effect_or1(fit, dataset, x_mod1, x_mod2, p=None):
    """Average change in P(y = j) moving every row from ``x_mod1`` to ``x_mod2``."""
    x1, x2 = _check_mods(dataset, x_mod1, x_mod2)
    p = fit.config.p if p is None else p
    betas, deltas = fit.draws.post_beta, fit.draws.post_delta
    if betas.shape[1] == 0:
        raise DomainError("fit has no post-burn draws")
    params = [(betas[:, m], delta_to_gamma(deltas[:, m])) for m in range(betas.shape[1])]
    effect = _average_effect(lambda x, b, g: outcome_probs_or1(x, b, g, p), params, x1, x2)
    return CovEffectResult(effect, p, betas.shape[1], {"model": "or1"})


def cov_effect_or2(fit, dataset, x_mod1, x_mod2, gamma_fixed=None, p=None):
    """OR_II counterpart of :func:`cov_effect_or1` with sigma-scaled probabilities."""
    x1, x2 = _check_mods(dataset, x_mod1, x_mod2)
    p = fit.config.p if p is None else p
    gamma_fixed = fit.gamma_fixed if gamma_fixed is None else np.asarray(gamma_fixed, dtype=float)
    betas, sigmas = fit.draws.post_beta, fit.draws.post_sigma
    if betas.shape[1] == 0:
        raise DomainError("fit has no post-burn draws")
    params = [(betas[:, m], sigmas[m]) for m in range(betas.shape[1])]
    effect = _average_effect(lambda x, b, s: outcome_probs_or2(x, b, s, gamma_fixed, p),
                             params, x1, x2)
    return CovEffectResult(effect, p, betas.shape[1], {"model": "or2"})
