import types

import numpy as np
import pytest

from ordqr.diagnostics import (cov_effect_or1, cov_effect_or2, inefficiency_factor, summarize,
                               trace_export)
from ordqr.errors import DegenerateChainError, DomainError

from oracles import al_cdf


def ar1(phi, M, seed):
    rng = np.random.default_rng(seed)
    e = rng.standard_normal(M)
    x = np.empty(M)
    x[0] = e[0] / np.sqrt(1 - phi ** 2)
    for t in range(1, M):
        x[t] = phi * x[t - 1] + e[t]
    return x


def fake_fit_or1(betas, deltas, burn=0, p=0.5):
    cfg = types.SimpleNamespace(p=p, burn=burn)
    draws = types.SimpleNamespace(post_beta=np.asarray(betas)[:, burn:], post_delta=np.asarray(deltas)[:, burn:])
    return types.SimpleNamespace(config=cfg, draws=draws)


class TestSummarize:
    def test_constant(self):
        t = summarize(np.full((2, 50), 3.5), 10)
        assert np.all(t.mean == 3.5) and np.all(t.std == 0)
        assert np.all(t.lower == 3.5) and np.all(t.upper == 3.5)

    def test_normal_quantiles(self):
        x = np.random.default_rng(0).standard_normal((1, 100_000))
        t = summarize(x, 0)
        assert abs(t.lower[0] + 1.96) < 0.03 and abs(t.upper[0] - 1.96) < 0.03

    def test_matches_numpy(self):
        x = np.random.default_rng(1).gamma(2.0, size=(3, 400))
        t = summarize(x, 100, ["a", "b", "c"])
        post = x[:, 100:]
        assert np.array_equal(t.mean, post.mean(axis=1))
        assert np.allclose(t.std, post.std(axis=1, ddof=1))
        assert np.allclose(t.lower, np.percentile(post, 2.5, axis=1))
        assert t.as_records()[1]["name"] == "b"

    def test_permutation_invariant(self):
        x = np.random.default_rng(2).normal(size=(2, 300))
        perm = np.random.default_rng(3).permutation(300)
        a, b = summarize(x, 0), summarize(x[:, perm], 0)
        assert np.allclose(a.mean, b.mean, rtol=1e-14) and np.allclose(a.std, b.std, rtol=1e-13)
        assert np.array_equal(a.lower, b.lower) and np.array_equal(a.upper, b.upper)

    def test_layout(self):
        text = summarize(np.arange(20.0).reshape(2, 10), 2, ["beta_1", "beta_2"]).to_text()
        header = text.splitlines()[0]
        for col in ("Post Mean", "Post Std", "Upper Credible", "Lower Credible"):
            assert col in header
        assert text.splitlines()[1].startswith("beta_1")

    def test_empty_window(self):
        with pytest.raises(DomainError):
            summarize(np.zeros((1, 10)), 10)


class TestTraceExport:
    def test_indexing(self):
        x = np.arange(30.0).reshape(2, 15)
        out = trace_export(x, 5, ["a", "b"])
        assert list(out) == ["a", "b"]
        assert out["a"].shape == (10,)
        assert out["b"][0] == x[1, 5]


class TestInefficiency:
    def test_iid(self):
        x = np.random.default_rng(4).standard_normal((3, 100_000))
        res = inefficiency_factor(x, 0.1)
        assert np.all(np.abs(res.factors - 1) < 0.3)
        assert np.all(res.batch_sizes >= 1)

    def test_ar1(self):
        res = inefficiency_factor(ar1(0.9, 100_000, 5), 0.1)
        assert res.factors[0] > 3

    def test_matches_direct_computation(self):
        x = ar1(0.5, 5000, 6)
        res = inefficiency_factor(x[None, :], 0.05)
        c = x - x.mean()
        acf = np.array([c[: c.size - k] @ c[k:] for k in range(501)]) / (c @ c)
        b = int(np.argmax(np.abs(acf[1:]) < 0.05)) + 1
        nb = x.size // b
        bm = x[: nb * b].reshape(nb, b).mean(axis=1)
        assert res.batch_sizes[0] == b
        assert res.factors[0] == pytest.approx(b * bm.var(ddof=1) / x.var(ddof=1), rel=1e-12)
        # batch means with a short batch capture only part of the integrated autocorrelation
        rho = 0.5 ** np.arange(1, b)
        assert res.factors[0] == pytest.approx(1 + 2 * np.sum((1 - np.arange(1, b) / b) * rho), rel=0.15)

    def test_degenerate(self):
        with pytest.raises(DegenerateChainError):
            inefficiency_factor(np.ones((1, 500)), 0.1)

    @pytest.mark.parametrize("cutoff", [0.0, 1.0, -0.1])
    def test_bad_cutoff(self, cutoff):
        with pytest.raises(DomainError):
            inefficiency_factor(np.random.default_rng(0).normal(size=(1, 500)), cutoff)

    def test_too_short(self):
        with pytest.raises(DomainError):
            inefficiency_factor(np.random.default_rng(0).normal(size=(1, 99)), 0.1)

    def test_text(self):
        res = inefficiency_factor(np.random.default_rng(7).normal(size=(2, 1000)), 0.1, ["x", "y"])
        assert "Inefficiency" in res.to_text() and res.to_text().splitlines()[2].startswith("y")


class TestCovEffect:
    def test_hand_oracle_or1(self):
        X = np.column_stack([np.ones(3), [0.0, 0.5, 1.0]])
        ds = types.SimpleNamespace(X=X)
        betas = np.array([[0.2, -0.1], [1.0, 1.5]])
        deltas = np.array([[0.0, 0.3]])
        fit = fake_fit_or1(betas, deltas)
        X2 = X.copy()
        X2[:, 1] += 1.0
        res = cov_effect_or1(fit, ds, X, X2)
        expected = np.zeros(3)
        for m in range(2):
            cuts = np.array([-np.inf, 0.0, np.exp(deltas[0, m]), np.inf])
            for x1, x2 in zip(X, X2):
                for xa, sign in ((x2, 1), (x1, -1)):
                    F = al_cdf(cuts - xa @ betas[:, m], 0.5)
                    expected += sign * np.diff(F)
        expected /= 6
        assert np.allclose(res.effect, expected, atol=1e-14)
        assert res.n_draws == 2

    def test_invariants_or1(self, short_fit_or1, small_or1):
        X2 = small_or1.X.copy()
        X2[:, 1] += 0.1
        res = cov_effect_or1(short_fit_or1, small_or1, small_or1.X, X2)
        assert abs(res.effect.sum()) < 1e-10
        assert res.effect[-1] > 0 > res.effect[0]
        same = cov_effect_or1(short_fit_or1, small_or1, small_or1.X, small_or1.X)
        assert np.all(same.effect == 0)

    def test_invariants_or2(self, short_fit_or2, small_or2):
        X2 = small_or2.X.copy()
        X2[:, 2] = 1.0
        res = cov_effect_or2(short_fit_or2, small_or2, small_or2.X, X2)
        assert res.effect.shape == (3,)
        assert abs(res.effect.sum()) < 1e-10
        same = cov_effect_or2(short_fit_or2, small_or2, small_or2.X, small_or2.X)
        assert np.all(same.effect == 0)
        assert "Category_3" in res.to_text()

    def test_shape_mismatch(self, short_fit_or1, small_or1):
        with pytest.raises(DomainError):
            cov_effect_or1(short_fit_or1, small_or1, small_or1.X, small_or1.X[:, :2])
