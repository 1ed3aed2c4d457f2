"""Command-line interface: simulate, fit, lpds, backtest.

Prior and sampler settings share one flat key namespace, used both as long
flags (``--a-xi 0.5``, ``--no-learn-a-xi``) and as keys in INI config files
(``a_xi = 0.5``, ``learn_a_xi = false``). Flags override file values.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import dataclasses
import hashlib
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .diagnostics import format_table, summarize
from .gibbs import run_chain, tracked_names
from .model import (MH_PARAMS, SHRINK_PARAMS, DrawsStore, HomoskedHyper, Hyper, MCMCConfig,
                    MHTuning, PriorSpec, SvHyper, TimeSeriesData, ValidationError,
                    default_prior_spec)
from .predict import eval_pred_dens, lpds, predictive_moments, mixture_logpdf
from .simulate import SimConfig, sim_tvp
from .states import DegeneracyError

JOBS_ENV = "TVPSHRINK_JOBS"
EXIT_USAGE = 2
EXIT_FAILURE = 1


class CliError(Exception):
    def __init__(self, message: str, details=None, code: int = EXIT_USAGE):
        super().__init__(message)
        self.details = details or []
        self.code = code


# -- option namespace --------------------------------------------------------

def _bool(v) -> bool:
    if isinstance(v, bool):
        return v
    s = str(v).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {v!r}")


def _option_table() -> dict[str, type]:
    opts: dict[str, type] = {"mod_type": str, "sv": _bool, "niter": int, "nburn": int, "nthin": int}
    for p in SHRINK_PARAMS:
        opts[p] = float
        opts[f"learn_{p}"] = _bool
    for cls in (Hyper, HomoskedHyper, SvHyper):
        for f in dataclasses.fields(cls):
            opts[f.name] = float
    for p in MH_PARAMS:
        for f in dataclasses.fields(MHTuning):
            opts[f"{p}_{f.name}"] = _bool if f.type in (bool, "bool") else (int if f.name == "batch_size" else float)
    return opts


OPTIONS = _option_table()


def _flags(key: str) -> list[str]:
    """Long flag for ``key``, plus an all-lowercase alias when that is unambiguous."""
    flag = "--" + key.replace("_", "-")
    lower = flag.lower()
    clash = any(k != key and k.lower() == key.lower() for k in OPTIONS)
    return [flag] if lower == flag or clash else [flag, lower]


def add_model_options(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("prior and sampler settings (also accepted as config-file keys)")
    for key, typ in OPTIONS.items():
        if typ is _bool:
            g.add_argument(*_flags(key), dest=key, action=argparse.BooleanOptionalAction, default=None)
        elif key == "mod_type":
            g.add_argument(*_flags(key), dest=key, choices=("triple", "double", "ridge"), default=None)
        else:
            g.add_argument(*_flags(key), dest=key, type=typ, default=None, metavar="V")


def parse_options(raw: dict, where: str) -> dict:
    """Type-convert a flat key/value mapping, rejecting unknown keys."""
    out, errors = {}, []
    for k, v in raw.items():
        key = k.strip().replace("-", "_")
        if key not in OPTIONS:
            matches = [o for o in OPTIONS if o.lower() == key.lower()]
            key = matches[0] if len(matches) == 1 else key
        if key not in OPTIONS:
            errors.append(f"{where}: unknown key {k!r}")
            continue
        try:
            out[key] = OPTIONS[key](v)
        except ValueError as e:
            errors.append(f"{where}: bad value for {k}: {e}")
    if errors:
        raise CliError("invalid configuration", errors)
    return out


def build_config(opts: dict, seed: int, defaults: dict | None = None) -> tuple[PriorSpec, MCMCConfig]:
    """PriorSpec and MCMCConfig from a flat option mapping."""
    opts = {**(defaults or {}), **opts}
    mod_type = opts.get("mod_type", "double")
    base = default_prior_spec(mod_type, bool(opts.get("sv", False)))
    top = {f.name for f in dataclasses.fields(PriorSpec)}
    spec_kw = {k: v for k, v in opts.items() if k in top and k not in ("mod_type", "sv")}
    nested = {}
    for name, cls in (("hyper", Hyper), ("homosked_hyper", HomoskedHyper), ("sv_hyper", SvHyper)):
        kw = {f.name: opts[f.name] for f in dataclasses.fields(cls) if f.name in opts}
        nested[name] = dataclasses.replace(getattr(base, name), **kw)
    spec = dataclasses.replace(base, **spec_kw, **nested)
    tuning = {}
    for p in MH_PARAMS:
        kw = {f.name: opts[f"{p}_{f.name}"] for f in dataclasses.fields(MHTuning) if f"{p}_{f.name}" in opts}
        tuning[p] = MHTuning(**kw)
    mc = {k: opts[k] for k in ("niter", "nburn", "nthin") if k in opts}
    return spec, MCMCConfig(seed=seed, mh_tuning=tuning, **mc)


def options_from_args(args) -> dict:
    return {k: getattr(args, k) for k in OPTIONS if getattr(args, k, None) is not None}


def read_config_section(path: str, section: str | None) -> dict:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    if not cp.read(path):
        raise CliError(f"cannot read config file {path}")
    if section is None:
        secs = cp.sections()
        if len(secs) != 1:
            raise CliError(f"{path} has {len(secs)} sections; choose one with --section")
        section = secs[0]
    if not cp.has_section(section):
        raise CliError(f"section [{section}] not found in {path}")
    return parse_options(dict(cp.items(section)), f"{path}[{section}]")


# -- csv i/o -----------------------------------------------------------------

def _fmt(v: float) -> str:
    return f"{float(v):.17g}"


def write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v) if isinstance(v, (float, np.floating)) else v for v in r])


def read_table(path: str) -> tuple[list[str], list[list[str]]]:
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as e:
        raise CliError(f"cannot read {path}: {e.strerror}") from None
    if not rows:
        raise CliError(f"{path}: empty file (header row required)")
    header = [h.strip() for h in rows[0]]
    body = [r for r in rows[1:] if any(c.strip() for c in r)]
    for i, r in enumerate(body, start=2):
        if len(r) != len(header):
            raise CliError(f"{path}: line {i} has {len(r)} fields, header has {len(header)}")
    return header, body


def load_data(path: str, response: str = "y", covariates=None, intercept: bool = True,
              time_col: str | None = "t") -> TimeSeriesData:
    header, body = read_table(path)
    if response not in header:
        raise CliError(f"{path}: response column {response!r} not found", [f"columns: {header}"])
    tcol = time_col if time_col in header else None
    if covariates is None:
        covariates = [h for h in header if h not in (response, tcol)]
    missing = [c for c in covariates if c not in header]
    if missing:
        raise CliError(f"{path}: unknown column(s) {missing}")
    try:
        y = [float(r[header.index(response)]) for r in body]
        X = [[float(r[header.index(c)]) for c in covariates] for r in body]
    except ValueError as e:
        raise CliError(f"{path}: non-numeric value ({e})") from None
    X = np.array(X, dtype=float).reshape(len(body), len(covariates))
    names = list(covariates)
    if intercept:
        X = np.column_stack([np.ones(len(body)), X])
        names = ["Intercept"] + names
    tindex = tuple(r[header.index(tcol)] for r in body) if tcol else None
    return TimeSeriesData(np.array(y), X, tuple(names), tindex)


def sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


# -- run directory -----------------------------------------------------------

_VECTOR_COLS = {"beta_mean": "beta_mean", "theta_sr": "theta_sr", "tau2": "tau2", "xi2": "xi2",
                "kappa2_j": "kappa2", "lambda2_j": "lambda2"}


def draws_columns(fit: DrawsStore) -> tuple[list[str], np.ndarray]:
    names = fit.data.column_names
    cols, mats = [], []
    for key in tracked_names(fit.priorvals):
        arr = fit.draws[key]
        if arr.ndim == 2:
            cols += [f"{_VECTOR_COLS[key]}_{nm}" for nm in names]
            mats.append(arr)
        else:
            cols.append(key)
            mats.append(arr[:, None])
    return cols, np.concatenate(mats, axis=1)


def write_run(out: Path, fit: DrawsStore, meta: dict) -> None:
    out.mkdir(parents=True, exist_ok=True)
    names = fit.data.column_names
    T = fit.data.T
    cols, mat = draws_columns(fit)
    write_csv(out / "draws.csv", cols, mat.tolist())
    tcols = [f"t{t}" for t in range(T + 1)]
    paths = fit.beta_paths()
    for j, nm in enumerate(names):
        write_csv(out / f"beta_{nm}.csv", tcols, paths[:, :, j].tolist())
        write_csv(out / f"beta_tilde_{nm}.csv", tcols, fit.draws["beta_tilde"][:, :, j].tolist())
    if "h" in fit.draws:
        write_csv(out / "h.csv", tcols, fit.draws["h"].tolist())
    summ = summarize(fit)
    for j, nm in enumerate(names):
        hdr = ["t"] + [f"q{100 * p:g}" for p in summ.quantile_probs]
        rows = [[t] + [float(summ.quantiles[q, t, j]) for q in range(len(summ.quantile_probs))]
                for t in range(T + 1)]
        write_csv(out / f"quantiles_{nm}.csv", hdr, rows)
    write_csv(out / "fit_data.csv", ["y"] + list(names),
              [[float(fit.data.y[t])] + [float(v) for v in fit.data.X[t]] for t in range(T)])
    lines = [format_table(summ.rows)]
    if fit.mh_diag:
        lines.append("")
        lines.append("MH acceptance rates: " + ", ".join(
            f"{k} {v['acceptance_rate']:.3f}" for k, v in fit.mh_diag.items()))
    (out / "summary.txt").write_text("\n".join(lines) + "\n")
    model = {"prior": fit.priorvals.to_dict(), "mcmc": fit.cfg.to_dict(),
             "column_names": list(names), **meta}
    (out / "model.json").write_text(json.dumps(model, indent=2, sort_keys=True) + "\n")


def load_run(run_dir: str) -> DrawsStore:
    d = Path(run_dir)
    try:
        model = json.loads((d / "model.json").read_text())
    except OSError:
        raise CliError(f"{run_dir}: not a fit output directory (model.json missing)") from None
    spec = PriorSpec.from_dict(model["prior"])
    cfg = MCMCConfig.from_dict(model["mcmc"])
    names = tuple(model["column_names"])
    header, body = read_table(str(d / "fit_data.csv"))
    arr = np.array(body, dtype=float)
    data = TimeSeriesData(arr[:, 0], arr[:, 1:], names)
    header, body = read_table(str(d / "draws.csv"))
    mat = np.array(body, dtype=float).reshape(len(body), len(header))
    idx = {h: i for i, h in enumerate(header)}
    draws = {}
    for key in tracked_names(spec):
        if key in _VECTOR_COLS:
            draws[key] = mat[:, [idx[f"{_VECTOR_COLS[key]}_{nm}"] for nm in names]]
        else:
            draws[key] = mat[:, idx[key]]
    bt = []
    for nm in names:
        _, b = read_table(str(d / f"beta_tilde_{nm}.csv"))
        bt.append(np.array(b, dtype=float))
    draws["beta_tilde"] = np.stack(bt, axis=-1)
    if spec.sv:
        _, b = read_table(str(d / "h.csv"))
        draws["h"] = np.array(b, dtype=float)
    return DrawsStore(draws=draws, mh_diag={}, priorvals=spec, cfg=cfg, data=data)


def write_manifest(out: Path, command: str, config: dict, seed, inputs, t0: float, n_draws: int) -> None:
    dur = time.perf_counter() - t0
    man = {
        "command": command,
        "config": config,
        "seed": seed,
        "inputs": {str(p): sha256(p) for p in inputs},
        "version": __version__,
        "duration_seconds": dur,
        "draws_per_second": n_draws / dur if dur > 0 else None,
    }
    (out / "manifest.json").write_text(json.dumps(man, indent=2, sort_keys=True) + "\n")


# -- commands ----------------------------------------------------------------

def _floats(s: str) -> list[float]:
    try:
        return [float(v) for v in s.split(",") if v.strip()]
    except ValueError:
        raise CliError(f"expected comma-separated numbers, got {s!r}") from None


def cmd_simulate(args) -> int:
    sv = tuple(_floats(args.sv)) if args.sv else None
    if sv is not None and len(sv) != 3:
        raise CliError("--sv takes mu,phi,sigma2_eta")
    try:
        cfg = SimConfig(T=args.T, theta=tuple(_floats(args.theta)), beta_mean=tuple(_floats(args.beta_mean)),
                        sigma2=args.sigma2, sv=sv, seed=args.seed)
    except ValueError as e:
        raise CliError(str(e)) from None
    sim = sim_tvp(cfg)
    data = sim.data
    d = data.d
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    xcols = list(data.column_names[1:])
    write_csv(out, ["t", "y"] + xcols,
              [[t + 1, float(data.y[t])] + [float(v) for v in data.X[t, 1:]] for t in range(data.T)])
    truth = Path(args.truth) if args.truth else out.with_name(out.stem + "_truth.csv")
    hdr = ["t"] + [f"beta_{nm}" for nm in data.column_names] + ["eps"]
    rows = []
    for t in range(data.T + 1):
        eps = float(sim.eps[t - 1]) if t > 0 else ""
        rows.append([t] + [float(sim.true_paths[t, j]) for j in range(d)] + [eps])
    if sim.h is not None:
        hdr.append("h")
        for t in range(data.T + 1):
            rows[t].append(float(sim.h[t]))
    write_csv(truth, hdr, rows)
    print(f"wrote {out} ({data.T} rows) and {truth}")
    return 0


def _data_args(args) -> dict:
    covs = [c.strip() for c in args.covariates.split(",")] if args.covariates else None
    return dict(response=args.response, covariates=covs, intercept=args.intercept, time_col=args.time_col)


def _model_opts(args) -> dict:
    opts = read_config_section(args.config, args.section) if args.config else {}
    opts.update(options_from_args(args))
    return opts


def fit_model(data: TimeSeriesData, opts: dict, seed: int, defaults=None) -> DrawsStore:
    spec, cfg = build_config(opts, seed, defaults)
    return run_chain(data, spec, cfg)


def cmd_fit(args) -> int:
    t0 = time.perf_counter()
    data = load_data(args.data, **_data_args(args))
    if args.rows is not None:
        data = data.head(args.rows)
    opts = _model_opts(args)
    fit = fit_model(data, opts, args.seed)
    out = Path(args.out)
    meta = {"response": args.response, "intercept": args.intercept, "seed": args.seed}
    write_run(out, fit, meta)
    inputs = [args.data] + ([args.config] if args.config else [])
    write_manifest(out, "fit", {"options": opts, **meta, "rows": args.rows}, args.seed, inputs, t0, fit.M)
    print((out / "summary.txt").read_text(), end="")
    return 0


def _density_grid(s: str) -> np.ndarray:
    parts = s.split(":")
    if len(parts) != 3:
        raise CliError("--density-grid takes lo:hi:n")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise CliError("--density-grid takes lo:hi:n") from None
    if n < 2 or not hi > lo:
        raise CliError("--density-grid needs hi > lo and n >= 2")
    return np.linspace(lo, hi, n)


def origin_lpds(data: TimeSeriesData, opts: dict, origin: int, seed: int, defaults=None) -> float:
    """Fit on rows 1..origin and score row origin+1."""
    train = data.head(origin)
    fit = fit_model(train, opts, seed, defaults)
    return lpds(fit, train, data.X[origin], float(data.y[origin]))


def cmd_lpds(args) -> int:
    points = _floats(args.eval_points) if args.eval_points else []
    grid = _density_grid(args.density_grid) if args.density_grid else None
    if args.run:
        fit = load_run(args.run)
        model = json.loads((Path(args.run) / "model.json").read_text())
        train = fit.data
        names = train.column_names
        intercept = model.get("intercept", True)
        covs = list(names[1:] if intercept else names)
        test = load_data(args.test, response=model.get("response", "y"), covariates=covs,
                         intercept=intercept, time_col=args.time_col)
        if test.d != train.d:
            raise CliError(f"test rows have d={test.d}, fit has d={train.d}")
        rows = [(test.X[i], float(test.y[i])) for i in range(test.T)]
    elif args.data and args.origin is not None:
        data = load_data(args.data, **_data_args(args))
        if not 1 <= args.origin < data.T:
            raise CliError(f"--origin must lie in [1, {data.T - 1}]")
        train = data.head(args.origin)
        fit = fit_model(train, _model_opts(args), args.seed)
        rows = [(data.X[args.origin], float(data.y[args.origin]))]
    else:
        raise CliError("give either --run DIR --test CSV or --data CSV --origin N")

    for x_new, y_new in rows:
        pm = predictive_moments(fit, train, x_new)
        print(f"lpds {_fmt(mixture_logpdf([y_new], pm)[0])}")
    x_new = rows[0][0]
    if points:
        dens = eval_pred_dens(points, fit, train, x_new)
        for p, v in zip(points, dens):
            print(f"density {_fmt(p)} {_fmt(v)}")
    if grid is not None:
        dens = eval_pred_dens(grid, fit, train, x_new)
        out = Path(args.grid_out)
        write_csv(out, ["y", "density"], [[float(p), float(v)] for p, v in zip(grid, dens)])
        print(f"wrote {out}")
    return 0


BACKTEST_DEFAULTS = {"niter": 30000, "nburn": 15000, "nthin": 5}


def _backtest_job(job):
    origin, name, y, X, names, opts, seed = job
    data = TimeSeriesData(y, X, names)
    try:
        return origin, name, origin_lpds(data, opts, origin, seed, BACKTEST_DEFAULTS), ""
    except (ValidationError, DegeneracyError, ValueError, np.linalg.LinAlgError) as e:
        return origin, name, math.nan, f"{type(e).__name__}: {e}"


def read_config_set(path: str) -> dict[str, dict]:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    if not cp.read(path):
        raise CliError(f"cannot read config file {path}")
    if not cp.sections():
        raise CliError(f"{path}: no [spec] sections")
    return {s: parse_options(dict(cp.items(s)), f"{path}[{s}]") for s in cp.sections()}


def cmd_backtest(args) -> int:
    t0 = time.perf_counter()
    data = load_data(args.data, **_data_args(args))
    specs = read_config_set(args.config_set)
    overrides = options_from_args(args)
    tmax = data.T - 1 if args.tmax is None else args.tmax
    if args.t0 < 2 or args.t0 > tmax or tmax >= data.T:
        raise CliError(f"need 2 <= t0 <= tmax < T={data.T}, got t0={args.t0}, tmax={tmax}")
    jobs = args.jobs if args.jobs is not None else int(os.environ.get(JOBS_ENV, "1"))
    if jobs < 1:
        raise CliError("--jobs must be positive")
    work = [(t, name, data.y, data.X, data.column_names, {**opts, **overrides}, args.seed_base + t)
            for t in range(args.t0, tmax + 1) for name, opts in specs.items()]
    for _, name, *_rest in work[:len(specs)]:
        build_config({**specs[name], **overrides}, 0, BACKTEST_DEFAULTS)  # fail fast on bad specs
    if jobs == 1:
        results = [_backtest_job(j) for j in work]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_backtest_job, work))
    order = {name: i for i, name in enumerate(specs)}
    results.sort(key=lambda r: (r[0], order[r[1]]))

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / "lpds_long.csv", ["origin", "spec", "lpds", "error"],
              [[o, n, v, e] for o, n, v, e in results])
    origins = sorted({r[0] for r in results})
    table = {(o, n): v for o, n, v, _ in results}
    cum = {n: 0.0 for n in specs}
    rows = []
    for o in origins:
        for n in specs:
            cum[n] += table[(o, n)]
        rows.append([o] + [cum[n] for n in specs])
    write_csv(out / "lpds_cumulative.csv", ["origin"] + list(specs), rows)
    failures = [{"origin": o, "spec": n, "error": e} for o, n, _, e in results if e]
    inputs = [args.data, args.config_set]
    write_manifest(out, "backtest", {"specs": specs, "overrides": overrides, "t0": args.t0, "tmax": tmax,
                                     "jobs": jobs, "defaults": BACKTEST_DEFAULTS},
                   args.seed_base, inputs, t0, len(results))
    print(f"{len(results)} jobs, {len(failures)} failed; wrote {out}")
    if failures:
        print(json.dumps({"failed_jobs": failures}), file=sys.stderr)
        return EXIT_FAILURE
    return 0


# -- entry point -------------------------------------------------------------

def _add_data_args(p):
    p.add_argument("--data", required=True, help="CSV file with a header row")
    p.add_argument("--response", default="y")
    p.add_argument("--covariates", help="comma-separated columns (default: all but response and time column)")
    p.add_argument("--intercept", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--time-col", default="t", help="column ignored as covariate if present")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tvpshrink", description="Shrinkage for time-varying parameter regressions.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a synthetic dataset")
    p.add_argument("--T", type=int, default=200)
    p.add_argument("--theta", default="0.2,0,0")
    p.add_argument("--beta-mean", default="1.5,-0.3,0")
    p.add_argument("--sigma2", type=float, default=1.0)
    p.add_argument("--sv", help="mu,phi,sigma2_eta for stochastic volatility errors")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="sim.csv")
    p.add_argument("--truth", help="true paths file (default: <out>_truth.csv)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fit", help="run the Gibbs sampler and write a run directory")
    _add_data_args(p)
    p.add_argument("--rows", type=int, help="use only the first N rows")
    p.add_argument("--config", help="INI file with prior/sampler keys")
    p.add_argument("--section", help="section of --config to use")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory")
    add_model_options(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("lpds", help="one-step-ahead log predictive density scores")
    p.add_argument("--run", help="fit output directory")
    p.add_argument("--test", help="CSV with test rows (used with --run)")
    p.add_argument("--data", help="CSV to refit on rows 1..origin (used with --origin)")
    p.add_argument("--origin", type=int)
    p.add_argument("--response", default="y")
    p.add_argument("--covariates")
    p.add_argument("--intercept", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--time-col", default="t")
    p.add_argument("--config")
    p.add_argument("--section")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--eval-points", help="comma-separated points for density values")
    p.add_argument("--density-grid", help="lo:hi:n grid written to --grid-out")
    p.add_argument("--grid-out", default="density.csv")
    add_model_options(p)
    p.set_defaults(func=cmd_lpds)

    p = sub.add_parser("backtest", help="rolling one-step-ahead LPDS for several priors")
    _add_data_args(p)
    p.add_argument("--config-set", required=True, help="INI file, one section per named prior")
    p.add_argument("--t0", type=int, default=30, help="first origin (rows used for the first fit)")
    p.add_argument("--tmax", type=int, help="last origin (default T-1)")
    p.add_argument("--jobs", type=int, help=f"worker processes (default ${JOBS_ENV} or 1)")
    p.add_argument("--seed-base", type=int, default=0)
    p.add_argument("--out", required=True)
    add_model_options(p)
    p.set_defaults(func=cmd_backtest)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as e:
        err = {"error": "usage", "message": str(e), "details": e.details}
        code = e.code
    except ValidationError as e:
        err = {"error": "validation", "message": "invalid configuration", "details": e.errors}
        code = EXIT_USAGE
    except DegeneracyError as e:
        err = {"error": "degeneracy", "message": str(e), "details": [{"block": e.block, "iteration": e.iteration}]}
        code = EXIT_FAILURE
    print(json.dumps(err), file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
