"""Command-line entry point: ``ordqr {simulate,fit,coveffect,summary}``.

Exit status 0 on success, 2 for invalid configuration or input data, 3 for a
numerical failure inside a sampler.
"""

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .diagnostics import cov_effect_or1, cov_effect_or2, inefficiency_factor, summarize, trace_export
from .errors import DatasetError, DegenerateChainError, DomainError, ModelMismatchError, NotSPDError, NumericalError
from .io import (config_hash, emit_trace_svg, file_digest, load_dataset, read_draws, write_dataset,
                 write_draws, write_json)
from .model import PriorOr1, PriorOr2
from .or1 import Or1Config, fit_or1
from .or2 import Or2Config, fit_or2
from .simulate import DgpSpec, generate_or1_data, generate_or2_data

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


class ConfigError(ValueError):
    pass


def _floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"expected comma-separated numbers, got {text!r}") from None


def _vector(text, dim, what):
    if text is None:
        return np.zeros(dim)
    vals = _floats(text)
    if len(vals) == 1:
        return np.full(dim, vals[0])
    if len(vals) != dim:
        raise ConfigError(f"{what} needs 1 or {dim} values, got {len(vals)}")
    return np.array(vals)


def _matrix(text, dim, default, what):
    """Scalar c (meaning c*I) or a path to a CSV matrix file."""
    if text is None:
        return default * np.eye(dim)
    try:
        return float(text) * np.eye(dim)
    except ValueError:
        pass
    path = Path(text)
    if not path.exists():
        raise ConfigError(f"{what}: {text!r} is neither a number nor an existing matrix file")
    mat = np.loadtxt(path, delimiter=",", ndmin=2)
    if mat.shape != (dim, dim):
        raise ConfigError(f"{what} file must hold a {dim}x{dim} matrix, got {mat.shape}")
    return mat


def _resolve_seed(args):
    if args.seed is not None:
        return args.seed
    env = os.environ.get("OQR_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"OQR_SEED must be an integer, got {env!r}") from None
    return 0


def _add_data_args(sp):
    sp.add_argument("--data", required=True, help="comma-separated file with a header row")
    sp.add_argument("--response", default="y", help="response column (default: y)")
    sp.add_argument("--covariates", help="comma-separated covariate columns (default: all others)")
    grp = sp.add_mutually_exclusive_group()
    grp.add_argument("--intercept", dest="intercept", action="store_true", default=True,
                     help="prepend a column of ones (default)")
    grp.add_argument("--no-intercept", dest="intercept", action="store_false",
                     help="the covariates already include an intercept")
    sp.add_argument("--drop-missing", action="store_true", help="skip rows with empty cells")


def _add_fit_args(sp):
    _add_data_args(sp)
    sp.add_argument("--model", choices=["or1", "or2"], required=True)
    sp.add_argument("--p", type=float, default=0.25, help="quantile level in (0, 1)")
    sp.add_argument("--burn", type=int, default=1125)
    sp.add_argument("--mcmc", type=int, default=4500)
    sp.add_argument("--tune", type=float, default=1.0, help="MH step scale (or1)")
    sp.add_argument("--gamma2", type=float, default=3.0, help="fixed second cut-point (or2)")
    sp.add_argument("--prior-b0", help="beta prior mean: scalar or comma list (default 0)")
    sp.add_argument("--prior-B0", help="beta prior covariance: scalar c for c*I, or CSV file (default 10)")
    sp.add_argument("--prior-d0", help="delta prior mean (or1, default 0)")
    sp.add_argument("--prior-D0", help="delta prior covariance (or1, default 0.25)")
    sp.add_argument("--prior-n0", type=float, default=5.0, help="sigma prior shape n0 (or2)")
    sp.add_argument("--prior-d0-scale", type=float, default=8.0, help="sigma prior scale d0 (or2)")
    sp.add_argument("--seed", type=int, help="RNG seed (falls back to $OQR_SEED, then 0)")
    sp.add_argument("--out", help="output directory")
    sp.add_argument("--cutoff", type=float, help="autocorrelation cutoff for inefficiency factors")
    sp.add_argument("--verbose", action="store_true")


def build_parser():
    parser = argparse.ArgumentParser(prog="ordqr", description="Bayesian quantile regression for ordinal outcomes")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="{simulate,fit,coveffect,summary}")
    sub.required = True

    sp = sub.add_parser("simulate", help="generate a synthetic dataset")
    sp.add_argument("--model", choices=["or1", "or2"], required=True)
    sp.add_argument("--n", type=int, default=500)
    sp.add_argument("--p", type=float, default=0.25)
    sp.add_argument("--beta", help="true coefficients, comma list (intercept first)")
    sp.add_argument("--cutpoints", help="true cut-points, comma list starting at 0")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--out", required=True, help="CSV file to write")

    sp = sub.add_parser("fit", help="run a sampler and write summaries")
    _add_fit_args(sp)
    sp.add_argument("--emit-draws", action="store_true", help="write draws.csv")
    sp.add_argument("--emit-plots", action="store_true", help="write one trace SVG per parameter")

    sp = sub.add_parser("coveffect", help="fit, then compute an average covariate effect")
    _add_fit_args(sp)
    sp.add_argument("--covariate", required=True, help="column to modify")
    sp.add_argument("--mode", choices=["add", "sqrt-add", "indicator"], default="add",
                    help="add: x+amount; sqrt-add: sqrt(x^2+amount); indicator: 0 -> 1")
    sp.add_argument("--amount", type=float, default=1.0)

    sp = sub.add_parser("summary", help="summarize a draw dump written by fit --emit-draws")
    sp.add_argument("--draws", required=True)
    sp.add_argument("--burn", type=int, help="override the burn-in recorded in the file")
    sp.add_argument("--cutoff", type=float)
    sp.add_argument("--out", help="write the summary JSON here")
    return parser


def _run_config(args, dataset, seed):
    cfg = {
        "model": args.model, "data": str(args.data), "data_sha256": file_digest(args.data),
        "response": args.response, "covariates": list(dataset.covariate_names),
        "intercept": args.intercept, "drop_missing": args.drop_missing, "p": args.p,
        "burn": args.burn, "mcmc": args.mcmc, "seed": seed,
    }
    k, J = dataset.k, dataset.J
    b0 = _vector(args.prior_b0, k, "--prior-b0")
    B0 = _matrix(args.prior_B0, k, 10.0, "--prior-B0")
    if args.model == "or1":
        d0 = _vector(args.prior_d0, J - 2, "--prior-d0")
        D0 = _matrix(args.prior_D0, J - 2, 0.25, "--prior-D0")
        prior = PriorOr1(b0, B0, d0, D0)
        config = Or1Config(args.burn, args.mcmc, args.p, args.tune, seed)
        cfg.update(tune=args.tune, b0=b0, B0=B0, d0=d0, D0=D0)
    else:
        prior = PriorOr2(b0, B0, args.prior_n0, args.prior_d0_scale)
        config = Or2Config(args.burn, args.mcmc, args.p, args.gamma2, seed)
        cfg.update(gamma2=args.gamma2, b0=b0, B0=B0, n0=args.prior_n0, d0_scale=args.prior_d0_scale)
    return prior, config, cfg


def _fit(args, seed):
    covs = [c.strip() for c in args.covariates.split(",")] if args.covariates else None
    dataset = load_dataset(args.data, args.response, covs, args.intercept, args.drop_missing)
    prior, config, cfg = _run_config(args, dataset, seed)
    fit = fit_or1(dataset, prior, config) if args.model == "or1" else fit_or2(dataset, prior, config)
    return dataset, fit, cfg


def _all_draws(fit, model):
    d = fit.draws
    return np.vstack([d.betadraws, d.deltadraws] if model == "or1" else [d.betadraws, d.sigmadraws])


def summary_document(fit, model, cfg, chash, ineff=None):
    doc = {
        "model": model,
        "quantile": fit.config.p,
        "burn": fit.config.burn,
        "mcmc": fit.config.mcmc,
        "seed": fit.config.seed,
        "parameters": fit.summary.as_records(),
    }
    if model == "or1":
        doc["acceptance_rate"] = fit.acceptance_rate
    doc["log_marg_like"] = fit.log_marg_like
    doc.update(fit.dic.as_dict())
    if model == "or2":
        doc["cutpoints_fixed"] = [0.0, float(fit.gamma_fixed[2])]
    else:
        doc["dhat_flags"] = list(fit.draws.flags)
    if ineff is not None:
        doc["inefficiency"] = {"cutoff": ineff.cutoff,
                               "factors": dict(zip(ineff.names, ineff.factors.tolist())),
                               "batch_sizes": dict(zip(ineff.names, ineff.batch_sizes.tolist()))}
    doc["config_hash"] = chash
    return doc


def summary_text(fit, model):
    lines = [f"Number of burn-in draws: {fit.config.burn}",
             f"Number of retained draws: {fit.config.mcmc}",
             "Summary of MCMC draws:", "", fit.summary.to_text(), ""]
    if model == "or1":
        lines.append(f"MH acceptance rate: {fit.acceptance_rate:.2f}%")
    lines.append(f"Log of Marginal Likelihood: {fit.log_marg_like:.2f}")
    lines.append(f"DIC: {fit.dic.dic:.2f}")
    return "\n".join(lines)


def cmd_simulate(args):
    seed = _resolve_seed(args)
    if args.model == "or1":
        beta = _floats(args.beta) if args.beta else (-4.0, 5.0, 6.0)
        cuts = _floats(args.cutpoints) if args.cutpoints else (0.0, 2.0, 4.0)
        dataset = generate_or1_data(DgpSpec(args.n, beta, cuts, args.p, seed))
    else:
        beta = _floats(args.beta) if args.beta else (-4.0, 6.0, 5.0)
        cuts = _floats(args.cutpoints) if args.cutpoints else (0.0, 3.0)
        dataset = generate_or2_data(DgpSpec(args.n, beta, cuts, args.p, seed))
    cfg = {"model": args.model, "n": args.n, "p": args.p, "beta": list(beta), "cutpoints": list(cuts),
           "seed": seed}
    write_dataset(dataset, args.out, provenance={"seed": seed, "seed_used": dataset.meta["seed_used"],
                                                  "config_hash": config_hash(cfg)})
    if dataset.meta.get("regenerated"):
        print(f"note: regenerated with seed {dataset.meta['seed_used']} to fill every category",
              file=sys.stderr)
    return EXIT_OK


def cmd_fit(args):
    seed = _resolve_seed(args)
    if args.cutoff is not None and not (0 < args.cutoff < 1):
        raise ConfigError("--cutoff must lie in (0, 1)")
    dataset, fit, cfg = _fit(args, seed)
    chash = config_hash(cfg)
    draws = _all_draws(fit, args.model)
    ineff = None
    if args.cutoff is not None:
        ineff = inefficiency_factor(draws[:, fit.config.burn:], args.cutoff, fit.names)
    doc = summary_document(fit, args.model, cfg, chash, ineff)
    text = summary_text(fit, args.model)
    if ineff is not None:
        text += "\n\nSummary of Inefficiency Factor:\n\n" + ineff.to_text()
    if args.verbose or not args.out:
        print(text)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        write_json(out / "summary.json", doc)
        (out / "summary.txt").write_text(f"# seed={seed} config_hash={chash}\n{text}\n", encoding="utf-8")
        prov = {"seed": seed, "config_hash": chash, "model": args.model, "burn": fit.config.burn,
                "mcmc": fit.config.mcmc}
        if args.emit_draws:
            write_draws(out / "draws.csv", fit.names, draws, prov)
        if args.emit_plots:
            for name, series in trace_export(draws, fit.config.burn, fit.names).items():
                emit_trace_svg(series, name, out / f"trace_{name}.svg", provenance=prov)
    return EXIT_OK


def _modify(dataset, column, mode, amount):
    names = list(dataset.covariate_names)
    if column not in names:
        raise ConfigError(f"--covariate {column!r} is not among {names}")
    j = names.index(column)
    x1 = dataset.X.copy()
    x2 = dataset.X.copy()
    if mode == "add":
        x2[:, j] = x1[:, j] + amount
    elif mode == "sqrt-add":
        x2[:, j] = np.sqrt(x1[:, j] ** 2 + amount)
    else:
        x1[:, j] = 0.0
        x2[:, j] = 1.0
    return x1, x2


def cmd_coveffect(args):
    seed = _resolve_seed(args)
    dataset, fit, cfg = _fit(args, seed)
    x1, x2 = _modify(dataset, args.covariate, args.mode, args.amount)
    if args.model == "or1":
        res = cov_effect_or1(fit, dataset, x1, x2)
    else:
        res = cov_effect_or2(fit, dataset, x1, x2)
    cfg.update(covariate=args.covariate, mode=args.mode, amount=args.amount)
    chash = config_hash(cfg)
    doc = {"model": args.model, "quantile": args.p, "burn": args.burn, "mcmc": args.mcmc, "seed": seed,
           "covariate": args.covariate, "mode": args.mode, "amount": args.amount,
           "effect": {f"Category_{j + 1}": float(v) for j, v in enumerate(res.effect)},
           "n_draws": res.n_draws, "config_hash": chash}
    if args.verbose or not args.out:
        print("Summary of Covariate Effect:\n\n" + res.to_text())
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        write_json(out / "coveffect.json", doc)
    return EXIT_OK


def cmd_summary(args):
    names, draws, prov = read_draws(args.draws)
    burn = args.burn if args.burn is not None else int(prov.get("burn", 0))
    table = summarize(draws, burn, names)
    text = table.to_text()
    doc = {"model": prov.get("model"), "burn": burn, "mcmc": draws.shape[1] - burn,
           "seed": prov.get("seed"), "parameters": table.as_records(),
           "config_hash": prov.get("config_hash")}
    if args.cutoff is not None:
        ineff = inefficiency_factor(draws[:, burn:], args.cutoff, names)
        text += "\n\nSummary of Inefficiency Factor:\n\n" + ineff.to_text()
        doc["inefficiency"] = {"cutoff": ineff.cutoff, "factors": dict(zip(names, ineff.factors.tolist()))}
    print(text)
    if args.out:
        write_json(args.out, doc)
    return EXIT_OK


COMMANDS = {"simulate": cmd_simulate, "fit": cmd_fit, "coveffect": cmd_coveffect, "summary": cmd_summary}


def run_cli(argv=None):
    """Parse ``argv`` and run; returns the exit status instead of exiting."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_CONFIG
    try:
        return COMMANDS[args.command](args)
    except (NumericalError, DegenerateChainError) as exc:
        print(f"ordqr: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, DomainError, DatasetError, ModelMismatchError, NotSPDError,
            FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"ordqr: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def main():
    sys.exit(run_cli(sys.argv[1:]))
