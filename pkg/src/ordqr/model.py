"""Data containers, cut-point transforms, priors, outcome probabilities and
log-likelihoods shared by the OR_I (J >= 3, free cut-points) and OR_II
(J = 3, fixed cut-points, free scale) models.

Cut-points are carried as the full length-(J+1) vector
``(-inf, 0, gamma_2, ..., gamma_{J-1}, +inf)`` so that category ``j`` (1-based)
is the interval ``(gamma[j-1], gamma[j]]``.
"""

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _backend
from .distributions import al_cdf, cholesky_spd
from .errors import DatasetError, DomainError, RankDeficientError, TooFewCategoriesError


@dataclass(frozen=True)
class OrdinalDataset:
    """Outcome codes 1..J and an n x k design matrix.

    Validated on construction: integer codes in 1..J with every category
    present, J >= 3, finite full-column-rank ``X``.
    """

    y: np.ndarray
    X: np.ndarray
    covariate_names: Sequence[str] = ()
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        X = np.array(self.X, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        y_raw = np.asarray(self.y).ravel()
        if y_raw.shape[0] != X.shape[0]:
            raise DatasetError(f"y has {y_raw.shape[0]} rows but X has {X.shape[0]}")
        if y_raw.size == 0:
            raise DatasetError("dataset is empty")
        y_float = y_raw.astype(float)
        if not np.all(np.isfinite(y_float)) or np.any(y_float != np.round(y_float)):
            raise DatasetError("outcome codes must be integers")
        y = y_float.astype(np.int64)
        J = int(y.max())
        if y.min() < 1:
            raise DatasetError(f"outcome codes must be in 1..J, found {y.min()}")
        if J < 3:
            raise TooFewCategoriesError(f"need at least 3 outcome categories, found J={J}")
        counts = np.bincount(y, minlength=J + 1)[1:]
        missing = [j + 1 for j in range(J) if counts[j] == 0]
        if missing:
            raise DatasetError(f"categories {missing} of 1..{J} have no observations")
        if not np.all(np.isfinite(X)):
            raise DatasetError("design matrix contains non-finite values")
        if np.linalg.matrix_rank(X) < X.shape[1]:
            raise RankDeficientError(
                f"design matrix is rank deficient (rank {np.linalg.matrix_rank(X)} < {X.shape[1]} columns)")
        names = list(self.covariate_names) or [f"beta_{j + 1}" for j in range(X.shape[1])]
        if len(names) != X.shape[1]:
            raise DatasetError(f"{len(names)} covariate names for {X.shape[1]} columns")
        y.setflags(write=False)
        X.setflags(write=False)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "covariate_names", tuple(names))

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def k(self):
        return self.X.shape[1]

    @property
    def J(self):
        return int(self.y.max())

    def counts(self):
        return np.bincount(self.y, minlength=self.J + 1)[1:]


def recode_outcomes(values):
    """Map the sorted distinct values of ``values`` onto 1..J."""
    values = np.asarray(values)
    levels, codes = np.unique(values, return_inverse=True)
    return codes.astype(np.int64) + 1, levels


def delta_to_gamma(delta, J=None):
    """Full cut-point vector from log bin widths: gamma_1 = 0, gamma_j = gamma_{j-1} + exp(delta_j)."""
    delta = np.atleast_1d(np.asarray(delta, dtype=float))
    if delta.ndim != 1:
        raise DomainError("delta must be a vector")
    if J is not None and delta.shape[0] != J - 2:
        raise DomainError(f"delta has length {delta.shape[0]}, expected J-2 = {J - 2}")
    if not np.all(np.isfinite(delta)):
        raise DomainError("delta must be finite")
    interior = np.concatenate(([0.0], np.cumsum(np.exp(delta))))
    return np.concatenate(([-np.inf], interior, [np.inf]))


def gamma_to_delta(gamma):
    """Inverse of :func:`delta_to_gamma`.

    Accepts the full vector (with ±inf ends) or the interior cut-points
    ``(gamma_1 = 0, ..., gamma_{J-1})``.
    """
    interior = np.asarray(gamma, dtype=float)
    if interior.size and interior[0] == -np.inf:
        interior = interior[1:]
    if interior.size and interior[-1] == np.inf:
        interior = interior[:-1]
    if not np.all(np.isfinite(interior)):
        raise DomainError("cut-points may only be infinite at the two ends")
    if interior.shape[0] < 1 or interior[0] != 0.0:
        raise DomainError("first finite cut-point must be 0")
    widths = np.diff(interior)
    if np.any(widths <= 0):
        raise DomainError("cut-points must be strictly increasing")
    return np.log(widths)


def or2_cutpoints(gamma2):
    """Fixed OR_II cut-points (-inf, 0, gamma2, +inf)."""
    if not (np.isfinite(gamma2) and gamma2 > 0):
        raise DomainError(f"gamma2 must be positive and finite, got {gamma2!r}")
    return np.array([-np.inf, 0.0, float(gamma2), np.inf])


def _check_spd(name, matrix, dim):
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    if matrix.shape != (dim, dim):
        raise DomainError(f"{name} must be {dim}x{dim}, got {matrix.shape}")
    return matrix, cholesky_spd(matrix, name)


@dataclass(frozen=True)
class PriorOr1:
    """beta ~ N(b0, B0), delta ~ N(d0, D0)."""

    b0: np.ndarray
    B0: np.ndarray
    d0: np.ndarray
    D0: np.ndarray
    B0_chol: np.ndarray = field(init=False, repr=False, compare=False)
    D0_chol: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        b0 = np.atleast_1d(np.asarray(self.b0, dtype=float))
        d0 = np.atleast_1d(np.asarray(self.d0, dtype=float))
        object.__setattr__(self, "b0", b0)
        object.__setattr__(self, "d0", d0)
        B0, B0_chol = _check_spd("B0", self.B0, b0.shape[0])
        D0, D0_chol = _check_spd("D0", self.D0, d0.shape[0])
        object.__setattr__(self, "B0", B0)
        object.__setattr__(self, "D0", D0)
        object.__setattr__(self, "B0_chol", B0_chol)
        object.__setattr__(self, "D0_chol", D0_chol)

    @classmethod
    def default(cls, k, J, beta_var=10.0, delta_var=0.25):
        return cls(np.zeros(k), beta_var * np.eye(k), np.zeros(J - 2), delta_var * np.eye(J - 2))


@dataclass(frozen=True)
class PriorOr2:
    """beta ~ N(b0, B0), sigma ~ IG(n0/2, d0_scale/2)."""

    b0: np.ndarray
    B0: np.ndarray
    n0: float = 5.0
    d0_scale: float = 8.0
    B0_chol: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        b0 = np.atleast_1d(np.asarray(self.b0, dtype=float))
        object.__setattr__(self, "b0", b0)
        B0, B0_chol = _check_spd("B0", self.B0, b0.shape[0])
        object.__setattr__(self, "B0", B0)
        object.__setattr__(self, "B0_chol", B0_chol)
        if not (self.n0 > 0 and self.d0_scale > 0):
            raise DomainError("n0 and d0_scale must be positive")

    @classmethod
    def default(cls, k, beta_var=10.0, n0=5.0, d0_scale=8.0):
        return cls(np.zeros(k), beta_var * np.eye(k), n0, d0_scale)


def _category_probs(mu, gamma, sigma, p):
    """(..., J) outcome probabilities for linear predictors ``mu``."""
    mu = np.asarray(mu, dtype=float)
    u = (gamma - mu[..., None]) / sigma
    cdf = al_cdf(u, 0.0, 1.0, p)
    return np.diff(cdf, axis=-1)


def outcome_probs_or1(x, beta, gamma, p):
    """P(y = j | x, beta, gamma), j = 1..J. ``x`` may be one row or an n x k matrix."""
    gamma = np.asarray(gamma, dtype=float)
    return _category_probs(np.asarray(x, dtype=float) @ np.asarray(beta, dtype=float), gamma, 1.0, p)


def outcome_probs_or2(x, beta, sigma, gamma_fixed, p):
    """OR_II probabilities with the AL CDF evaluated at (gamma_j - x'beta)/sigma."""
    if not (np.isfinite(sigma) and sigma > 0):
        raise DomainError("sigma must be positive")
    gamma_fixed = np.asarray(gamma_fixed, dtype=float)
    if gamma_fixed.shape != (4,):
        raise DomainError("OR_II cut-points must be (-inf, 0, gamma2, inf)")
    return _category_probs(np.asarray(x, dtype=float) @ np.asarray(beta, dtype=float),
                           gamma_fixed, sigma, p)


def _check_shapes(dataset, beta):
    beta = np.asarray(beta, dtype=float).ravel()
    if beta.shape[0] != dataset.k:
        raise DomainError(f"beta has length {beta.shape[0]}, dataset has k={dataset.k}")
    return beta


def log_lik_terms(dataset, beta, gamma, sigma, p):
    """Per-observation log P(y_i | x_i, beta, gamma, sigma), floored at log(1e-300)."""
    beta = _check_shapes(dataset, beta)
    gamma = np.asarray(gamma, dtype=float)
    if gamma.shape[0] != dataset.J + 1:
        raise DomainError(f"need {dataset.J + 1} cut-points for J={dataset.J}")
    return _backend.kernels.ordinal_logprob(dataset.X @ beta, dataset.y, gamma, sigma, p)


def neg_log_lik_or1(dataset, beta, delta, p):
    """(per-observation negative log-likelihood, their sum) for the OR_I model."""
    gamma = delta_to_gamma(delta, dataset.J)
    per_obs = -log_lik_terms(dataset, beta, gamma, 1.0, p)
    return per_obs, float(per_obs.sum())


def neg_log_lik_or2(dataset, beta, sigma, gamma_fixed, p, per_obs=False):
    """Negative log-likelihood of the OR_II model (a float unless ``per_obs``)."""
    if not (np.isfinite(sigma) and sigma > 0):
        raise DomainError("sigma must be positive")
    if dataset.J != 3:
        raise DomainError("OR_II likelihood needs exactly 3 categories")
    terms = -log_lik_terms(dataset, beta, gamma_fixed, float(sigma), p)
    return terms if per_obs else float(terms.sum())


def design_with_intercept(X):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    return np.column_stack([np.ones(X.shape[0]), X])
