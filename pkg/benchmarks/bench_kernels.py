"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--n 500] [--repeat 1000] [--fit]

Each kernel is fed identical inputs under both backends; outputs are checked
for equality before timings are reported.
"""

import argparse
import time

import numpy as np

from ordqr import _backend
from ordqr.model import delta_to_gamma
from ordqr.or1 import Or1Config, fit_or1
from ordqr.or2 import Or2Config, fit_or2
from ordqr.simulate import generate_or1_data, generate_or2_data, or1_spec, or2_spec


def _inputs(n, seed=0):
    rng = np.random.default_rng(seed)
    y = rng.integers(1, 5, n)
    gamma = delta_to_gamma([np.log(2), np.log(2)])
    mu = rng.normal(1.5, 2.0, n)
    lam = rng.exponential(1.0, n) ** 2
    eta = np.full(n, 2.4)
    return {
        "mu": mu, "y": y, "gamma": gamma, "lam": lam, "eta": eta,
        "normals": rng.standard_normal(n), "uniforms": rng.random(n),
        "sd": np.sqrt(rng.exponential(8.0, n)) + 0.1,
        "lower": gamma[y - 1], "upper": gamma[y],
    }


def _cases(d):
    return {
        "ordinal_logprob": lambda k: k.ordinal_logprob(d["mu"], d["y"], d["gamma"], 1.0, 0.25),
        "gig_half": lambda k: k.gig_half(d["lam"], d["eta"], d["normals"], d["uniforms"]),
        "truncnorm": lambda k: k.truncnorm(d["mu"], d["sd"], d["lower"], d["upper"], d["uniforms"],
                                           np.random.default_rng(1)),
    }


def _time(fn, kernels, repeat):
    fn(kernels)
    t0 = time.perf_counter()
    for _ in range(repeat):
        fn(kernels)
    return (time.perf_counter() - t0) / repeat


def bench_kernels(n, repeat):
    if "compiled" not in _backend.available():
        print("compiled kernels not built; only the numpy fallback is available")
        return
    py, cy = _backend._kernels_py, _backend._compiled
    print(f"kernel timings, n={n}, mean of {repeat} calls")
    print(f"{'kernel':<18}{'python [us]':>14}{'compiled [us]':>16}{'speedup':>10}{'max |diff|':>13}")
    for name, fn in _cases(_inputs(n)).items():
        diff = float(np.max(np.abs(fn(py) - fn(cy))))
        tp, tc = _time(fn, py, repeat), _time(fn, cy, repeat)
        print(f"{name:<18}{tp * 1e6:>14.1f}{tc * 1e6:>16.1f}{tp / tc:>10.1f}{diff:>13.2e}")


def bench_fits(burn, mcmc):
    d1 = generate_or1_data(or1_spec(seed=1))
    d2 = generate_or2_data(or2_spec(seed=1))
    print(f"\nfull fits, n=500, burn={burn}, mcmc={mcmc}")
    print(f"{'model':<8}{'backend':<10}{'seconds':>10}{'post mean beta':>40}")
    for backend in _backend.available():
        _backend.set_backend(backend)
        for label, run in (("or1", lambda: fit_or1(d1, config=Or1Config(burn, mcmc, seed=3))),
                           ("or2", lambda: fit_or2(d2, config=Or2Config(burn, mcmc, seed=3)))):
            t0 = time.perf_counter()
            fit = run()
            dt = time.perf_counter() - t0
            print(f"{label:<8}{backend:<10}{dt:>10.2f}{np.array2string(fit.post_mean_beta, precision=4):>40}")
    _backend.set_backend("auto")


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--n", type=int, default=500)
    ap.add_argument("--repeat", type=int, default=1000)
    ap.add_argument("--fit", action="store_true", help="also time complete fits under each backend")
    ap.add_argument("--burn", type=int, default=1125)
    ap.add_argument("--mcmc", type=int, default=4500)
    args = ap.parse_args()
    bench_kernels(args.n, args.repeat)
    if args.fit:
        bench_fits(args.burn, args.mcmc)


if __name__ == "__main__":
    main()
