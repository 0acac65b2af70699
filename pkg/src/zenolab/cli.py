"""Command-line experiment runner.

Usage::

    zeno-lab run --config exp.json [--out DIR] [--format csv|json] [--seed N] [--quiet]
    zeno-lab validate --config exp.json

Config schema (JSON object)
---------------------------
experiment  one of ``convergence``, ``bch_check``, ``bounds_sweep``,
            ``efficiency``, ``spectral_report``
model       ``{"id": <model id>, "parameters": {...}}`` or inline
            ``{"kicks": [kraus, ...], "generator": gkls}`` (see ``zenolab.jsonio``)
            (convergence, spectral_report)
t           evolution time, default 1 (convergence; bch_check)
t_list      list of times, replaces ``t`` (convergence)
n_list      strictly increasing positive integers (convergence, bch_check)
seed        integer seed (bch_check, bounds_sweep)
instances   number of random instances (bch_check, default 1; bounds_sweep, default 50)
dims        list of Hilbert dimensions to cycle through (bch_check, default [2, 3])
include_models  run the built-in models too (bounds_sweep, default true)
p_model, omega_t, T, target, n_points, tau_points, n_max   (efficiency)
output      ``{"path": <dir>, "format": "csv" | "json"}``

Exit codes: 0 success, 2 validation error, 3 numerical failure.
The environment variable ``ZENO_LAB_THREADS`` caps worker threads.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import bounds, jsonio, matfunc, models, sampling, spectral, zeno
from .superop import gkls_to_superop, kraus_to_superop

EXPERIMENTS = ("convergence", "bch_check", "bounds_sweep", "efficiency", "spectral_report")
FORMATS = ("csv", "json")
EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 2, 3
FLOAT_FMT = "%.17g"

REQUIRED = {
    "convergence": ("model", "n_list"),
    "bch_check": ("n_list", "seed"),
    "bounds_sweep": ("seed",),
    "efficiency": ("p_model",),
    "spectral_report": ("model",),
}
OPTIONAL = {
    "convergence": ("t", "t_list"),
    "bch_check": ("t", "instances", "dims"),
    "bounds_sweep": ("instances", "include_models", "t"),
    "efficiency": ("omega_t", "T", "target", "n_points", "tau_points", "n_max"),
    "spectral_report": (),
}
COMMON = ("experiment", "output", "description")


def workers() -> int | None:
    raw = os.environ.get("ZENO_LAB_THREADS")
    if not raw:
        return None
    try:
        return max(1, int(raw))
    except ValueError:
        return None


# -- validation ------------------------------------------------------------------


def _is_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x)


def _validate_model(model) -> list[str]:
    if not isinstance(model, dict):
        return ["model must be an object"]
    if "id" in model:
        if model["id"] not in models.MODEL_IDS:
            return [f"model.id {model['id']!r} is not one of {', '.join(models.MODEL_IDS)}"]
        params = model.get("parameters", {})
        if not isinstance(params, dict):
            return ["model.parameters must be an object"]
        unknown = set(params) - set(models.DEFAULTS[model["id"]])
        if unknown:
            return [f"unknown model parameters: {sorted(unknown)}"]
        return [f"model.parameters: {msg}" for msg in models.validate_parameters(model["id"], params)]
    if "kicks" in model and "generator" in model:
        try:
            _inline_cycle(model)
        except (ValueError, KeyError, TypeError) as exc:
            return [f"inline model: {exc}"]
        return []
    return ["model needs either 'id' or both 'kicks' and 'generator'"]


def _validate_n_list(ns) -> list[str]:
    if not isinstance(ns, list) or not ns:
        return ["n_list must be a non-empty list"]
    if not all(isinstance(k, int) and not isinstance(k, bool) for k in ns):
        return ["n_list entries must be integers"]
    if any(k < 1 for k in ns) or any(b <= a for a, b in zip(ns, ns[1:])):
        return ["n_list must be strictly increasing positive integers"]
    return []


def validate(config) -> list[str]:
    """Schema and range diagnostics; an empty list means the config is valid."""
    if not isinstance(config, dict):
        return ["config must be a JSON object"]
    exp = config.get("experiment")
    if exp not in EXPERIMENTS:
        return [f"experiment must be one of {', '.join(EXPERIMENTS)} (got {exp!r})"]
    out = [f"missing required field '{key}'" for key in REQUIRED[exp] if key not in config]
    allowed = set(REQUIRED[exp]) | set(OPTIONAL[exp]) | set(COMMON)
    out += [f"unknown field '{key}' for {exp}" for key in sorted(set(config) - allowed)]
    if "model" in config:
        out += _validate_model(config["model"])
    if "n_list" in config:
        out += _validate_n_list(config["n_list"])
    for key in ("t", "omega_t", "T", "target", "n_max"):
        if key in config and (not _is_number(config[key]) or config[key] < 0):
            out.append(f"{key} must be a nonnegative number")
    for key in ("T", "target", "n_max"):
        if key in config and _is_number(config[key]) and config[key] <= 0:
            out.append(f"{key} must be positive")
    if "t_list" in config:
        tl = config["t_list"]
        if not isinstance(tl, list) or not tl or not all(_is_number(x) and x >= 0 for x in tl):
            out.append("t_list must be a non-empty list of nonnegative numbers")
    if "seed" in config and not (isinstance(config["seed"], int) and not isinstance(config["seed"], bool)):
        out.append("seed must be an integer")
    for key in ("instances", "n_points", "tau_points"):
        if key in config and not (isinstance(config[key], int) and config[key] >= 1):
            out.append(f"{key} must be a positive integer")
    if "dims" in config:
        dims = config["dims"]
        if not isinstance(dims, list) or not dims or not all(isinstance(d, int) and d >= 1 for d in dims):
            out.append("dims must be a non-empty list of positive integers")
    if "include_models" in config and not isinstance(config["include_models"], bool):
        out.append("include_models must be true or false")
    if "p_model" in config and config["p_model"] not in models.P_MODELS:
        out.append(f"p_model must be one of {', '.join(models.P_MODELS)}")
    if "output" in config:
        o = config["output"]
        if not isinstance(o, dict):
            out.append("output must be an object")
        elif o.get("format", "csv") not in FORMATS:
            out.append("output.format must be 'csv' or 'json'")
    return out


# -- experiments ------------------------------------------------------------------


def _inline_cycle(model: dict) -> zeno.KickCycle:
    kicks = tuple(kraus_to_superop(jsonio.kraus_from_json(k)) for k in model["kicks"])
    if not kicks:
        raise ValueError("at least one kick is needed")
    gen = gkls_to_superop(jsonio.gkls_from_json(model["generator"]))
    return zeno.KickCycle(kicks, gen)


def _cycle(model: dict) -> tuple[zeno.KickCycle, str]:
    if "id" in model:
        built = models.build(model["id"], **model.get("parameters", {}))
        return built.cycle, model["id"]
    return _inline_cycle(model), "inline"


def _convergence(cfg):
    cycle, label = _cycle(cfg["model"])
    t_list = cfg.get("t_list", [cfg.get("t", 1.0)])
    zl = zeno.zeno_generator(cycle)
    rows, fits = [], []
    for t in t_list:
        res = zeno.convergence_scan(cycle, float(t), cfg["n_list"], zl=zl, workers=workers())
        rows += [(float(t), n, par, dist) for n, dist, par in res.rows()]
        fits.append({"t": float(t), "odd_slope": res.odd_slope, "even_slope": res.even_slope,
                     "all_slope": res.all_slope})
    summary = "; ".join(
        f"t={f['t']:g} slope={f['all_slope']:.4f} (odd {f['odd_slope']:.4f}, even {f['even_slope']:.4f})"
        for f in fits
    )
    return {
        "header": ("t", "n", "parity", "distance"),
        "rows": rows,
        "meta": {"model": label, "fits": fits},
        "summary": f"convergence {label}: {summary}",
    }


def _bch_check(cfg):
    t = float(cfg.get("t", 1.0))
    dims = cfg.get("dims", [2, 3])
    ns = cfg["n_list"]
    rng = np.random.default_rng(cfg["seed"])
    rows, fits = [], []
    for k in range(cfg.get("instances", 1)):
        d = dims[k % len(dims)]
        e = sampling.random_channel(d, rng, rank=d * d)
        gen = gkls_to_superop(sampling.random_gkls(d, rng))
        res = [matfunc.bch_residual(e, gen, t, n) for n in ns]
        rows += [(k, d, n, r) for n, r in zip(ns, res)]
        fits.append({"instance": k, "d": d, "slope": zeno.loglog_slope(ns, res)})
    slopes = [f["slope"] for f in fits]
    return {
        "header": ("instance", "d", "n", "residual"),
        "rows": rows,
        "meta": {"fits": fits},
        "summary": f"bch_check: slopes in [{min(slopes):.4f}, {max(slopes):.4f}] over {len(fits)} instance(s)",
    }


def _bounds_sweep(cfg):
    seed = cfg["seed"]
    count = cfg.get("instances", 50)
    reports = bounds.dominance_suite(
        range(seed, seed + count), cfg.get("include_models", True), float(cfg.get("t", 1.0)), workers()
    )
    rows = [r.row(label) for label, r in reports]
    violations = sum(r.violated for _, r in reports)
    skipped = sum(not r.applicable for _, r in reports)
    return {
        "header": ("name", "analytic", "measured", "holds", "applicable", "seed"),
        "rows": rows,
        "meta": {"reports": [{"label": label, **r.to_dict()} for label, r in reports]},
        "summary": f"bounds_sweep: {len(rows)} reports, violations = {violations or 'none'}, inapplicable = {skipped}",
    }


def _efficiency(cfg):
    keys = ("omega_t", "T", "target", "n_points", "tau_points", "n_max")
    res = models.efficiency_scan(cfg["p_model"], **{k: cfg[k] for k in keys if k in cfg})
    meta = {
        "p_model": res.model, "tau_opt": res.tau_opt, "n_opt": res.n_opt,
        "total_time_opt": res.total_time_opt, "tau_max": res.tau_max, "interior": res.interior,
        "at_feasible_edge": res.at_feasible_edge, "projective_total_time": res.projective_total_time,
    }
    flag = " (at the edge of the feasible region)" if res.at_feasible_edge else ""
    return {
        "header": ("n", "tau", "distance", "n_tau"),
        "rows": list(res.surface_rows()),
        "meta": meta,
        "summary": f"efficiency {res.model}: tau_opt={res.tau_opt:.6g} n={res.n_opt} n*tau={res.total_time_opt:.6g}{flag}",
    }


def _spectral_report(cfg):
    cycle, label = _cycle(cfg["model"])
    dec = spectral.decompose(cycle.product)
    rep = dec.report()
    rows = [
        (k, c.eigenvalue.real, c.eigenvalue.imag, c.multiplicity, c.is_peripheral, c.nilpotent_norm)
        for k, c in enumerate(dec.clusters)
    ]
    periph = [complex(*ev) for ev, p in zip(rep["eigenvalues"], rep["peripheral"]) if p]
    shown = ", ".join(f"{z.real:.6g}{z.imag:+.6g}i" for z in periph)
    return {
        "header": ("index", "re", "im", "multiplicity", "peripheral", "nilpotent_norm"),
        "rows": rows,
        "meta": {"model": label, **rep},
        "summary": f"spectral_report {label}: peripheral {{{shown}}}, mu0={dec.mu0:.6g}",
    }


RUNNERS = {
    "convergence": _convergence,
    "bch_check": _bch_check,
    "bounds_sweep": _bounds_sweep,
    "efficiency": _efficiency,
    "spectral_report": _spectral_report,
}


# -- output ------------------------------------------------------------------------


def _cell(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return FLOAT_FMT % x
    return str(x)


def to_csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(x) for x in row])
    return buf.getvalue()


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else repr(x)
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x


def to_json(experiment, result) -> str:
    payload = {
        "experiment": experiment,
        "header": list(result["header"]),
        "rows": [list(r) for r in result["rows"]],
        **result["meta"],
    }
    return json.dumps(_jsonable(payload), indent=1) + "\n"


def run(config: dict, out_dir=None, fmt=None, seed=None, quiet=False, name=None) -> int:
    """Validate and run one experiment; write ``<name>.<fmt>`` into the output dir.

    ``name`` defaults to the experiment name.
    """
    config = dict(config)
    if seed is not None:
        config["seed"] = seed
    problems = validate(config)
    if problems:
        for p in problems:
            print(f"invalid config: {p}", file=sys.stderr)
        return EXIT_INVALID
    output = config.get("output", {})
    fmt = fmt or output.get("format", "csv")
    if fmt not in FORMATS:
        print(f"invalid config: format must be 'csv' or 'json' (got {fmt!r})", file=sys.stderr)
        return EXIT_INVALID
    target = Path(out_dir or output.get("path", "."))
    exp = config["experiment"]
    try:
        result = RUNNERS[exp](config)
    except ArithmeticError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return EXIT_INVALID
    text = to_csv(result["header"], result["rows"]) if fmt == "csv" else to_json(exp, result)
    try:
        target.mkdir(parents=True, exist_ok=True)
        path = target / f"{name or exp}.{fmt}"
        with open(path, "w", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        print(f"cannot write output: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if not quiet:
        print(result["summary"])
    return EXIT_OK


def _load(path: str):
    with open(path) as fh:
        return json.load(fh)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="zeno-lab", description="Zeno-dynamics experiments")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run one experiment from a config file")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out")
    p_run.add_argument("--format", choices=FORMATS)
    p_run.add_argument("--seed", type=int)
    p_run.add_argument("--quiet", action="store_true")
    p_val = sub.add_parser("validate", help="check a config file without running it")
    p_val.add_argument("--config", required=True)
    args = parser.parse_args(argv)

    try:
        config = _load(args.config)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if args.command == "validate":
        problems = validate(config)
        for p in problems:
            print(p)
        if not problems:
            print("ok")
        return EXIT_INVALID if problems else EXIT_OK
    return run(config, args.out, args.format, args.seed, args.quiet, Path(args.config).stem)


if __name__ == "__main__":
    sys.exit(main())
