"""Command-line interface.

Subcommands: fit, simulate, sweep, tau, diagnose.  A JSON config file
(--config) mirrors the flag set; flags given on the command line override
file values.  Exit codes: 0 success, 2 parse error, 3 solver error,
4 configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .adaptive import AdaptiveConfig, Regime, fit_adaptive
from .core import (
    Dataset,
    EmpiricalSample,
    ErrorLaw,
    ExpectileError,
    NormalPlusChiSq,
    ShiftedExp,
    StdNormal,
    TrueModel,
    check_assumptions,
    estimate_tau_empirical,
)
from .data_io import ParseError, load_csv, write_fit_csv, write_json
from .inference import confidence_intervals
from .simulate import (
    SimSpec,
    run_cell,
    run_gamma_sweep,
    summary_rows_to_csv,
    summary_rows_to_json,
)

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_SOLVER = 3
EXIT_CONFIG = 4


class ConfigError(ExpectileError):
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="expectsel",
        description="Adaptive-LASSO expectile regression and simulations.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command")

    def common(p):
        p.add_argument("--config", help="JSON config file; flags override it")
        p.add_argument("--output", help="output file path")
        p.add_argument("--format", choices=["csv", "json"], default=None)

    p_fit = sub.add_parser("fit", help="fit a CSV dataset")
    common(p_fit)
    p_fit.add_argument("--input", help="input CSV path")
    p_fit.add_argument("--response", help="response column name or index")
    p_fit.add_argument("--tau", type=float, help="expectile index; estimated when absent")
    p_fit.add_argument("--gamma", type=float, help="adaptive weight exponent (default 1)")
    p_fit.add_argument("--lambda", dest="lam", type=float, help="penalty level (default n**-0.4)")
    p_fit.add_argument("--regime", choices=["auto", "lowdim", "highdim"])
    p_fit.add_argument("--standardize", choices=["on", "off"],
                       help="standardize the response before fitting (default on)")
    p_fit.add_argument("--alpha", type=float, help="CI miscoverage level (default 0.05)")

    for name, helptext in [("simulate", "run one Monte Carlo cell"),
                           ("sweep", "run a gamma sweep of Monte Carlo cells")]:
        p_sim = sub.add_parser(name, help=helptext)
        common(p_sim)
        p_sim.add_argument("--seed", type=int)
        p_sim.add_argument("--replications", type=int)
        p_sim.add_argument("--gamma", type=float)
        p_sim.add_argument("--lambda", dest="lam", type=float)
        p_sim.add_argument("--tau", type=float,
                           help="fixed expectile index; estimated per "
                                "replication when absent")
        if name == "sweep":
            p_sim.add_argument("--gammas", help="comma-separated gamma grid")

    p_tau = sub.add_parser("tau", help="estimate the empirical expectile index")
    common(p_tau)
    p_tau.add_argument("--input", help="input CSV path")
    p_tau.add_argument("--response", help="response column name or index")

    p_diag = sub.add_parser("diagnose", help="design-assumption diagnostics")
    common(p_diag)
    p_diag.add_argument("--input", help="input CSV path")
    p_diag.add_argument("--response", help="response column name or index")
    return parser


def _load_config(args) -> dict:
    cfg = {}
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                cfg = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}")
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON in {args.config}: {exc}")
    # command-line flags override file values
    for key, val in vars(args).items():
        if key in ("command", "config") or val is None:
            continue
        cfg[key] = val
    return cfg


def _error_law_from_config(obj) -> ErrorLaw:
    if not isinstance(obj, dict) or "name" not in obj:
        raise ConfigError("error_law must be an object with a 'name' field")
    name = obj["name"]
    if name == "std_normal":
        return StdNormal()
    if name == "shifted_exp":
        return ShiftedExp(shift=float(obj.get("shift", -2.5)))
    if name == "normal_plus_chisq":
        return NormalPlusChiSq(sigma2=float(obj.get("sigma2", 4e-2)),
                               df=int(obj.get("df", 1)))
    if name == "empirical":
        return EmpiricalSample(values=tuple(float(v) for v in obj["values"]))
    raise ConfigError(f"unknown error law {name!r}")


def _sim_spec_from_config(cfg: dict) -> SimSpec:
    sim = cfg.get("sim")
    if not isinstance(sim, dict):
        raise ConfigError("simulate/sweep require a 'sim' object in the config")
    try:
        n = int(sim["n"])
        p = int(sim["p"])
        law = _error_law_from_config(sim["error_law"])
    except KeyError as exc:
        raise ConfigError(f"sim config missing field {exc}")
    if "beta0" in sim:
        beta0 = np.asarray(sim["beta0"], dtype=float)
        if beta0.shape[0] != p:
            raise ConfigError("beta0 length must equal p")
    elif "beta_active" in sim:
        beta0 = np.zeros(p)
        active = np.asarray(sim["beta_active"], dtype=float)
        beta0[:active.shape[0]] = active
    else:
        raise ConfigError("sim config needs 'beta0' or 'beta_active'")
    return SimSpec(
        n=n, p=p, true_model=TrueModel(beta0), error_law=law,
        gamma=float(cfg.get("gamma", sim.get("gamma", 1.0))),
        lam=cfg.get("lam", sim.get("lambda")),
        tau=cfg.get("tau", sim.get("tau")),
        replications=int(cfg.get("replications", sim.get("replications", 100))),
        seed=int(cfg.get("seed", sim.get("seed", 0))),
        regime=Regime(sim.get("regime", "auto")))


def _load_dataset(cfg: dict) -> Dataset:
    if "input" not in cfg:
        raise ConfigError("missing --input path")
    return load_csv(cfg["input"], cfg.get("response", 0))


def cmd_fit(cfg: dict) -> int:
    data = _load_dataset(cfg)
    standardize = cfg.get("standardize", "on") == "on"
    y = data.y
    if standardize:
        sd = float(np.std(y))
        if sd == 0.0:
            raise ConfigError("response is constant; cannot standardize")
        y = (y - np.mean(y)) / sd
        data = Dataset(x=data.x, y=y, feature_names=data.feature_names)
    tau = cfg.get("tau")
    if tau is None:
        tau = estimate_tau_empirical(data.y)
    regime = Regime(cfg.get("regime", "auto"))
    acfg = AdaptiveConfig(gamma=float(cfg.get("gamma", 1.0)),
                          lam=cfg.get("lam"), regime=regime)
    fit = fit_adaptive(data, tau, acfg)
    diag = check_assumptions(data)
    report = {
        "tau": tau,
        "gamma": acfg.gamma,
        "lambda": fit.lambda_used,
        "regime": fit.regime_used.value,
        "standardized_response": standardize,
        "converged": fit.final.converged,
        "kkt_residual": fit.final.kkt_residual,
        "diagnostics": {
            "mu_min": diag.mu_min, "mu_max": diag.mu_max,
            "max_row_inf_norm": diag.max_row_inf_norm,
            "near_singular": diag.near_singular, "notes": list(diag.notes)},
        "selected": [],
    }
    rows = []
    if fit.final.active_set.size:
        inf = confidence_intervals(fit, data, float(cfg.get("alpha", 0.05)))
        report["degenerate_inference"] = inf.degenerate
        for k, j in enumerate(fit.final.active_set):
            label = (data.feature_names[j] if data.feature_names
                     else str(int(j)))
            entry = {
                "index": int(j), "label": label,
                "coefficient": float(fit.final.beta[j]),
                "std_error": float(inf.std_errors[k]),
                "ci_lower": float(inf.intervals[k, 0]),
                "ci_upper": float(inf.intervals[k, 1]),
            }
            report["selected"].append(entry)
            rows.append(entry)
    _emit(cfg, report, rows)
    print(f"selected {len(report['selected'])} of {data.p} features "
          f"(tau={tau:.6g}, lambda={fit.lambda_used:.6g})")
    return EXIT_OK


def cmd_simulate(cfg: dict) -> int:
    spec = _sim_spec_from_config(cfg)
    summary = run_cell(spec)
    row = {"n": spec.n, "p": spec.p, "gamma": spec.gamma,
           "seed": spec.seed, **summary.as_dict()}
    _emit_rows(cfg, [row])
    print(f"n={spec.n} p={spec.p} gamma={spec.gamma}: "
          f"true_nonzero={summary.mean_true_nonzero:.4g} "
          f"false_nonzero={summary.mean_false_nonzero:.4g}")
    return EXIT_OK


def cmd_sweep(cfg: dict) -> int:
    spec = _sim_spec_from_config(cfg)
    gammas_raw = cfg.get("gammas") or cfg.get("sim", {}).get("gammas")
    if gammas_raw is None:
        raise ConfigError("sweep requires --gammas or sim.gammas")
    if isinstance(gammas_raw, str):
        gammas = [float(v) for v in gammas_raw.split(",") if v.strip()]
    else:
        gammas = [float(v) for v in gammas_raw]
    rows = []
    for gamma, summary in run_gamma_sweep(spec, gammas):
        rows.append({"n": spec.n, "p": spec.p, "gamma": gamma,
                     "seed": spec.seed, **summary.as_dict()})
        print(f"n={spec.n} p={spec.p} gamma={gamma}: "
              f"pct_true={summary.pct_true_nonzero:.4g} "
              f"pct_false={summary.pct_false_nonzero:.4g}")
    _emit_rows(cfg, rows)
    return EXIT_OK


def cmd_tau(cfg: dict) -> int:
    data = _load_dataset(cfg)
    tau = estimate_tau_empirical(data.y)
    if cfg.get("output"):
        write_json(cfg["output"], {"tau": tau})
    print(f"tau={tau:.6f}")
    return EXIT_OK


def cmd_diagnose(cfg: dict) -> int:
    data = _load_dataset(cfg)
    diag = check_assumptions(data)
    payload = {"n": diag.n, "p": diag.p, "mu_min": diag.mu_min,
               "mu_max": diag.mu_max,
               "max_row_inf_norm": diag.max_row_inf_norm,
               "near_singular": diag.near_singular,
               "notes": list(diag.notes)}
    if cfg.get("output"):
        write_json(cfg["output"], payload)
    print(json.dumps(payload))
    return EXIT_OK


def _emit(cfg, report, rows):
    out = cfg.get("output")
    if not out:
        return
    if cfg.get("format", "json") == "csv":
        write_fit_csv(out, rows)
    else:
        write_json(out, report)


def _emit_rows(cfg, rows):
    out = cfg.get("output")
    if not out:
        return
    if cfg.get("format", "csv") == "json":
        summary_rows_to_json(out, rows)
    else:
        summary_rows_to_csv(out, rows)


COMMANDS = {
    "fit": cmd_fit,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "tau": cmd_tau,
    "diagnose": cmd_diagnose,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.command:
        parser.print_usage(sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = _load_config(args)
        return COMMANDS[args.command](cfg)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        print(f"usage: see expectsel {args.command} --help", file=sys.stderr)
        return EXIT_CONFIG
    except ExpectileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
