"""Synthetic data matching the simulation designs: x = (1, U(0,1), U(0,1)), AL(0, 1, p) errors."""

from dataclasses import dataclass

import numpy as np

from .distributions import make_rng, sample_al
from .errors import DatasetError, DomainError
from .model import OrdinalDataset

MAX_ATTEMPTS = 100


@dataclass(frozen=True)
class DgpSpec:
    n: int
    beta_true: tuple
    cutpoints_true: tuple
    p: float = 0.25
    seed: int = 0

    def __post_init__(self):
        beta = tuple(float(b) for b in np.ravel(self.beta_true))
        cuts = tuple(float(c) for c in np.ravel(self.cutpoints_true))
        if len(beta) < 1:
            raise DomainError("beta_true must be non-empty")
        if len(cuts) < 2:
            raise DomainError("need at least two cut-points (J >= 3)")
        if np.any(np.diff(cuts) <= 0) or not np.all(np.isfinite(cuts)):
            raise DomainError("cut-points must be finite and strictly increasing")
        if not (0.0 < self.p < 1.0):
            raise DomainError(f"quantile p must lie in (0, 1), got {self.p!r}")
        if self.n < len(cuts) + 1:
            raise DomainError("n must be at least J so every category can appear")
        object.__setattr__(self, "beta_true", beta)
        object.__setattr__(self, "cutpoints_true", cuts)
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "seed", int(self.seed))

    @property
    def J(self):
        return len(self.cutpoints_true) + 1


def or1_spec(n=500, p=0.25, seed=0):
    return DgpSpec(n, (-4.0, 5.0, 6.0), (0.0, 2.0, 4.0), p, seed)


def or2_spec(n=500, p=0.25, seed=0):
    return DgpSpec(n, (-4.0, 6.0, 5.0), (0.0, 3.0), p, seed)


def draw_latent(spec, seed=None):
    """(y, X, z) for one draw of the design, without the empty-category guard."""
    seed = spec.seed if seed is None else seed
    rng = make_rng(seed)
    k = len(spec.beta_true)
    X = np.column_stack([np.ones(spec.n), rng.random((spec.n, k - 1))])
    eps = sample_al(0.0, 1.0, spec.p, rng, size=spec.n)
    z = X @ np.asarray(spec.beta_true) + eps
    # category j when cut[j-2] < z <= cut[j-1]
    y = np.searchsorted(np.asarray(spec.cutpoints_true), z, side="left") + 1
    return y, X, z


def _generate(spec):
    for attempt in range(MAX_ATTEMPTS):
        seed = spec.seed + attempt
        y, X, _ = draw_latent(spec, seed)
        if np.bincount(y, minlength=spec.J + 1)[1:].min() > 0:
            names = ["intercept"] + [f"x{j + 2}" for j in range(X.shape[1] - 1)]
            meta = {"seed": spec.seed, "seed_used": seed, "regenerated": attempt > 0,
                    "attempts": attempt + 1, "beta_true": list(spec.beta_true),
                    "cutpoints_true": list(spec.cutpoints_true), "p": spec.p}
            return OrdinalDataset(y, X, names, meta)
    raise DatasetError(f"no draw with all {spec.J} categories present after {MAX_ATTEMPTS} attempts")


def generate_or1_data(spec=None):
    """OR_I-style dataset; defaults to n=500, beta=(-4,5,6), cut-points (0,2,4), p=0.25."""
    return _generate(or1_spec() if spec is None else spec)


def generate_or2_data(spec=None):
    """Three-category dataset; defaults to beta=(-4,6,5), cut-points (0,3), p=0.25."""
    spec = or2_spec() if spec is None else spec
    if spec.J != 3:
        raise DomainError("OR_II data needs exactly two cut-points")
    return _generate(spec)
