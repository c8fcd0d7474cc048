"""Command-line front end.

Usage: ``storesize <command> [options]``.  Every command writes a table
(CSV by default, ``--format json`` for JSON) to ``--output`` or stdout,
plus a one-line summary (stdout when writing a file, stderr otherwise).

Exit codes: 0 success, 2 invalid input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import __version__
from .asymptotic import comparison_table
from .errors import NumericalError, StoresizeError, ValidationError
from .figures import FIG2_SIGMA, FIGURE_CHI, PRESETS, build_preset
from .model import PhysicalUnits, SystemModel, UserModel, from_normalized_storage
from .simulator import SimConfig, compare_exact_vs_sim, simulate
from .sizing import METHODS, Axis, SweepSpec, contour, size_capacity, size_storage, sweep
from .spectral import CapacityMixture, outage_probability, outage_probability_mixture, solve_spectrum

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 2, 3

# (flag dest, type) of every option a config file may set
CONFIG_KEYS = {
    "n": int,
    "chi": float,
    "capacity": float,
    "sigma": float,
    "b": str,
    "epsilon": str,
    "method": str,
    "mixture": str,
    "horizon": float,
    "warmup": float,
    "replications": int,
    "seed": int,
    "metric": str,
    "preset": str,
    "axis": list,
    "fixed": list,
    "target": str,
    "c_min": float,
    "c_max": float,
    "points": int,
    "x_max": float,
    "b_norm": float,
    "rp_kw": float,
    "mean_on_hours": float,
    "grid_kw": float,
    "format": str,
    "output": str,
}

ORACLE_CASES = ((2, 1.0, 1.5), (5, 0.5, 2.5), (20, 0.5, 8.3), (100, 0.5, 36.83))


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _model_args(p, capacity=True):
    p.add_argument("--n", type=int, help="number of users N")
    p.add_argument("--chi", type=float, help="request rate over service rate (lambda/mu)")
    if capacity:
        g = p.add_mutually_exclusive_group()
        g.add_argument("--capacity", type=float, help="grid capacity C in units of R_p")
        g.add_argument("--sigma", type=float, help="grid capacity per user C/N")


def _sim_args(p):
    p.add_argument("--horizon", type=float, help="normalized time per replication (default 1e5)")
    p.add_argument("--warmup", type=float, help="discarded initial time (default 1e3)")
    p.add_argument("--replications", type=int, help="independent replications (default 20)")
    p.add_argument("--seed", type=int, help="64-bit seed (default 0)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="storesize", description="Shared energy-storage sizing for On/Off consumers.")
    parser.add_argument("--version", action="version", version=f"storesize {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", help="JSON file with option values (flags override it)")
        p.add_argument("--format", choices=("csv", "json"), help="output format (default csv)")
        p.add_argument("--output", help="write the table here instead of stdout")
        return p

    p = add("size", "epsilon-outage storage size B(epsilon)")
    _model_args(p)
    p.add_argument("--epsilon", help="outage target(s), comma separated")
    p.add_argument("--method", choices=METHODS)
    p.add_argument("--rp-kw", type=float, dest="rp_kw", help="peak demand per user in kW (adds B_kwh)")
    p.add_argument("--mean-on-hours", type=float, dest="mean_on_hours", help="mean On duration in hours")

    p = add("outage", "outage probability P(S > B)")
    _model_args(p)
    p.add_argument("--b", help="storage size(s), comma separated")
    p.add_argument("--method", choices=METHODS)
    p.add_argument("--mixture", help="time-varying capacity as c:w,c:w,... (replaces --capacity)")

    p = add("capacity", "minimal grid capacity for given B and epsilon")
    _model_args(p, capacity=False)
    p.add_argument("--b", help="storage size(s), comma separated")
    p.add_argument("--epsilon", help="outage target(s), comma separated")

    p = add("contour", "(C, B) pairs with equal outage")
    _model_args(p, capacity=False)
    p.add_argument("--epsilon", help="outage target(s), comma separated")
    p.add_argument("--c-min", type=float, dest="c_min")
    p.add_argument("--c-max", type=float, dest="c_max")
    p.add_argument("--points", type=int)

    p = add("sweep", "parameter sweeps and figure presets")
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--chi", type=float, help="override chi (presets pin 0.5)")
    p.add_argument("--axis", action="append", help="custom axis name=min:max:points or name=v1,v2,...")
    p.add_argument("--fixed", action="append", help="custom fixed parameter name=value")
    p.add_argument("--target", choices=("outage", "size", "capacity", "savings"))
    p.add_argument("--method", choices=METHODS)

    p = add("simulate", "Monte Carlo estimate of an outage metric")
    _model_args(p)
    p.add_argument("--b", help="storage size / backlog threshold")
    p.add_argument("--metric", choices=("backlog_exceedance", "loss_fraction"))
    _sim_args(p)

    p = add("asymptotic", "large-N approximation vs the exact solver")
    p.add_argument("--preset", choices=("fig2",))
    p.add_argument("--n", help="number(s) of users, comma separated")
    p.add_argument("--chi", type=float)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--capacity", type=float)
    g.add_argument("--sigma", type=float)
    p.add_argument("--x-max", type=float, dest="x_max", help="largest total buffer (default 15)")
    p.add_argument("--points", type=int, help="buffer grid points (default 31)")

    p = add("compare", "exact outage vs simulator, with z-scores")
    p.add_argument("--preset", choices=("oracle",))
    _model_args(p)
    p.add_argument("--b", help="threshold(s), comma separated")
    _sim_args(p)

    p = add("units", "convert a normalized storage size to kWh")
    p.add_argument("--b-norm", type=float, dest="b_norm")
    p.add_argument("--rp-kw", type=float, dest="rp_kw")
    p.add_argument("--mean-on-hours", type=float, dest="mean_on_hours")
    p.add_argument("--grid-kw", type=float, dest="grid_kw", help="also normalize a grid feed in kW")
    return parser


# --- config ---------------------------------------------------------------


def load_config(path, flags: dict | None = None):
    """Merge a JSON config file with command-line flags.

    Returns ``(config, overrides)`` where ``overrides`` lists the keys set
    in the file that a flag replaced.
    """
    data = {}
    if path:
        text = Path(path).read_text()
        if text.strip():
            try:
                data = json.loads(text)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"config {path}: invalid JSON ({exc})") from None
        if not isinstance(data, dict):
            raise ValidationError(f"config {path}: top level must be an object")
    config = {}
    for key, value in data.items():
        norm = key.replace("-", "_")
        if norm not in CONFIG_KEYS:
            raise ValidationError(f"config field {key!r} is not recognised")
        kind = CONFIG_KEYS[norm]
        try:
            if kind is list:
                value = list(value) if isinstance(value, (list, tuple)) else [value]
            elif kind is str:
                value = ",".join(str(v) for v in value) if isinstance(value, list) else str(value)
            elif kind is int:
                if isinstance(value, bool) or int(value) != value:
                    raise ValueError
                value = int(value)
            else:
                value = float(value)
        except (TypeError, ValueError):
            raise ValidationError(f"config field {key!r} has invalid value {value!r}") from None
        config[norm] = value
    overrides = []
    for key, value in (flags or {}).items():
        if value is None:
            continue
        if key in config and config[key] != value:
            overrides.append(key)
        config[key] = value
    _validate(config)
    return config, overrides


def _validate(cfg: dict) -> None:
    positive = ("chi", "horizon", "b_norm", "rp_kw", "mean_on_hours")
    for key in positive:
        if key in cfg and not (isinstance(cfg[key], (int, float)) and cfg[key] > 0):
            raise ValidationError(f"{key} must be positive, got {cfg[key]!r}")
    if "n" in cfg and isinstance(cfg["n"], int) and cfg["n"] < 1:
        raise ValidationError(f"n must be a positive integer, got {cfg['n']!r}")
    for key in ("capacity", "sigma", "warmup", "grid_kw"):
        if key in cfg and cfg[key] < 0:
            raise ValidationError(f"{key} must be nonnegative, got {cfg[key]!r}")
    if "capacity" in cfg and "sigma" in cfg:
        raise ValidationError("give either capacity or sigma, not both")
    if "method" in cfg and cfg["method"] not in METHODS:
        raise ValidationError(f"method must be one of {METHODS}, got {cfg['method']!r}")
    if "format" in cfg and cfg["format"] not in ("csv", "json"):
        raise ValidationError(f"format must be csv or json, got {cfg['format']!r}")


def _floats(cfg, key, required=True):
    raw = cfg.get(key)
    if raw is None:
        if required:
            raise ValidationError(f"missing required parameter {key!r}")
        return []
    try:
        return [float(v) for v in str(raw).split(",") if v.strip()]
    except ValueError:
        raise ValidationError(f"{key} must be a number or comma-separated numbers, got {raw!r}") from None


def _epsilons(cfg):
    eps = _floats(cfg, "epsilon")
    for e in eps:
        if not 0 < e < 1:
            raise ValidationError(f"epsilon must lie in (0, 1), got {e!r}")
    return eps


def _require(cfg, *keys):
    for key in keys:
        if cfg.get(key) is None:
            raise ValidationError(f"missing required parameter {key!r}")


def _model(cfg) -> SystemModel:
    _require(cfg, "n", "chi")
    n = cfg["n"]
    if "sigma" in cfg:
        capacity = cfg["sigma"] * n
    elif "capacity" in cfg:
        capacity = cfg["capacity"]
    else:
        raise ValidationError("missing required parameter 'capacity' (or 'sigma')")
    return SystemModel.from_params(n, cfg["chi"], capacity)


# --- commands -------------------------------------------------------------


def _cmd_size(cfg):
    model = _model(cfg)
    method = cfg.get("method", "exact")
    units = None
    if "rp_kw" in cfg or "mean_on_hours" in cfg:
        _require(cfg, "rp_kw", "mean_on_hours")
        units = PhysicalUnits(cfg["rp_kw"], cfg["mean_on_hours"])
    columns = ["N", "chi", "C", "epsilon", "B", "p_outage", "iterations", "method"]
    if units:
        columns.append("B_kwh")
    rows = []
    for eps in _epsilons(cfg):
        res = size_storage(model, eps, method)
        row = dict(N=model.n_users, chi=model.chi, C=model.capacity, epsilon=eps, B=res.b_eps,
                   p_outage=res.achieved_outage, iterations=res.iterations, method=method)
        if res.perturbed_capacity is not None:
            row["notes"] = f"C nudged to {res.perturbed_capacity:.12g}"
        if units:
            row["B_kwh"] = from_normalized_storage(units, res.b_eps)
        rows.append(row)
    summary = "; ".join(f"B({r['epsilon']:g}) = {r['B']:.12g}" for r in rows)
    return columns, rows, f"size N={model.n_users} chi={model.chi:g} C={model.capacity:.12g} [{method}]: {summary}"


def _cmd_outage(cfg):
    bs = _floats(cfg, "b")
    method = cfg.get("method", "exact")
    columns = ["N", "chi", "C", "B", "p_outage", "method"]
    rows = []
    if cfg.get("mixture"):
        _require(cfg, "n", "chi")
        pairs = []
        for part in cfg["mixture"].split(","):
            try:
                c, w = part.split(":")
                pairs.append((float(c), float(w)))
            except ValueError:
                raise ValidationError(f"mixture component {part!r} must look like c:w") from None
        mix = CapacityMixture.from_pairs(pairs)
        base = SystemModel.from_params(cfg["n"], cfg["chi"], float(mix.capacities.max()))
        values = np.atleast_1d(outage_probability_mixture(base, mix, bs))
        label = "mixture(" + ",".join(f"{c:g}:{w:g}" for c, w in mix.components) + ")"
        for b, p in zip(bs, values):
            rows.append(dict(N=base.n_users, chi=base.chi, C=label, B=b, p_outage=p, method="exact"))
        n, chi = base.n_users, base.chi
    else:
        from .sizing import outage_function

        model = _model(cfg)
        f = outage_function(model, method)
        for b in bs:
            rows.append(dict(N=model.n_users, chi=model.chi, C=model.capacity, B=b, p_outage=f(b), method=method))
        n, chi = model.n_users, model.chi
    summary = "; ".join(f"P(S>{r['B']:g}) = {r['p_outage']:.12g}" for r in rows)
    return columns, rows, f"outage N={n} chi={chi:g}: {summary}"


def _cmd_capacity(cfg):
    _require(cfg, "n", "chi")
    user = UserModel(cfg["chi"])
    n = cfg["n"]
    columns = ["N", "chi", "B", "epsilon", "C", "sigma", "savings_pct", "p_outage", "iterations", "method"]
    rows = []
    for b in _floats(cfg, "b"):
        for eps in _epsilons(cfg):
            res = size_capacity(n, user, b, eps)
            row = dict(N=n, chi=user.chi, B=b, epsilon=eps, C=res.capacity, sigma=res.capacity / n,
                       savings_pct=100.0 * (n - res.capacity) / n, p_outage=res.achieved_outage,
                       iterations=res.iterations, method="exact")
            if res.perturbations:
                row["notes"] = f"{len(res.perturbations)} capacity test point(s) nudged"
            rows.append(row)
    summary = "; ".join(f"C(B={r['B']:g}, eps={r['epsilon']:g}) = {r['C']:.12g}" for r in rows)
    return columns, rows, f"capacity N={n} chi={user.chi:g}: {summary}"


def _cmd_contour(cfg):
    _require(cfg, "n", "chi")
    user = UserModel(cfg["chi"])
    n = cfg["n"]
    c_min = cfg.get("c_min", n * user.p * 1.02)
    c_max = cfg.get("c_max", n * min(1.0, user.p * 1.25))
    points = cfg.get("points", 20)
    if not (n * user.p < c_min <= c_max) or points < 1:
        raise ValidationError(f"capacity grid must satisfy N*p < c_min <= c_max, got [{c_min}, {c_max}]")
    grid = np.linspace(c_min, c_max, points)
    columns = ["N", "chi", "epsilon", "C", "sigma", "B", "p_outage", "method", "error"]
    rows = []
    for eps in _epsilons(cfg):
        for pt in contour(n, user, eps, grid):
            row = dict(N=n, chi=user.chi, epsilon=eps, C=pt.capacity, sigma=pt.capacity / n, B=pt.b_eps,
                       p_outage=pt.achieved_outage, method="exact", error=pt.error or "")
            if pt.perturbed_capacity is not None:
                row["notes"] = f"C nudged to {pt.perturbed_capacity:.12g}"
            rows.append(row)
    failed = sum(1 for r in rows if r["error"])
    return columns, rows, f"contour N={n} chi={user.chi:g}: {len(rows)} points, {failed} failed"


def _parse_axis(text):
    try:
        name, spec = text.split("=", 1)
    except ValueError:
        raise ValidationError(f"axis {text!r} must look like name=min:max:points") from None
    name = name.strip()
    try:
        if ":" in spec:
            lo, hi, pts = spec.split(":")
            return Axis(name, float(lo), float(hi), int(pts))
        return Axis.of(name, [float(v) for v in spec.split(",")])
    except ValueError:
        raise ValidationError(f"axis {text!r} must look like name=min:max:points or name=v1,v2") from None


def _cmd_sweep(cfg):
    if cfg.get("preset"):
        chi = cfg.get("chi", FIGURE_CHI)
        columns, rows = build_preset(cfg["preset"], chi=chi)
        return columns, rows, f"sweep preset {cfg['preset']} (chi={chi:g}): {len(rows)} rows"
    if not cfg.get("axis"):
        raise ValidationError("sweep needs --preset or at least one --axis")
    fixed = {}
    for item in cfg.get("fixed", []):
        try:
            key, value = item.split("=", 1)
            fixed[key.strip()] = float(value)
        except ValueError:
            raise ValidationError(f"fixed parameter {item!r} must look like name=value") from None
    if "chi" in cfg and "chi" not in fixed:
        fixed["chi"] = cfg["chi"]
    spec = SweepSpec(
        axes=tuple(_parse_axis(a) for a in cfg["axis"]),
        fixed=fixed,
        target=cfg.get("target", "outage"),
        method=cfg.get("method", "exact"),
    )
    rows = sweep(spec)
    if all(r["error"] for r in rows):
        raise _TotalFailure(rows[0]["error"])
    columns = ["N", "chi", "C", "sigma", "b", "epsilon", "target", "value", "method", "error"]
    failed = sum(1 for r in rows if r["error"])
    return columns, rows, f"sweep target={spec.target}: {len(rows)} rows, {failed} failed"


class _TotalFailure(NumericalError):
    pass


def _sim_config(cfg, model, b):
    return SimConfig(
        model=model,
        b=b,
        horizon=cfg.get("horizon", 1e5),
        warmup=cfg.get("warmup", 1e3),
        replications=cfg.get("replications", 20),
        seed=cfg.get("seed", 0),
        metric=cfg.get("metric", "backlog_exceedance"),
    )


def _cmd_simulate(cfg):
    model = _model(cfg)
    bs = _floats(cfg, "b")
    columns = ["N", "chi", "C", "B", "metric", "mean", "stderr", "ci_lo", "ci_hi", "replications",
               "total_sim_time", "seed"]
    rows = []
    for b in bs:
        sc = _sim_config(cfg, model, b)
        est = simulate(sc)
        rows.append(dict(N=model.n_users, chi=model.chi, C=model.capacity, B=b, metric=sc.metric, mean=est.mean,
                         stderr=est.stderr, ci_lo=est.ci95[0], ci_hi=est.ci95[1], replications=est.replications,
                         total_sim_time=est.total_sim_time, seed=est.seed))
    summary = "; ".join(f"{r['metric']}(B={r['B']:g}) = {r['mean']:.6g} +/- {r['stderr']:.2g}" for r in rows)
    return columns, rows, f"simulate N={model.n_users} C={model.capacity:.12g}: {summary}"


def _cmd_asymptotic(cfg):
    chi = cfg.get("chi", FIGURE_CHI if cfg.get("preset") else None)
    if chi is None:
        raise ValidationError("missing required parameter 'chi'")
    if cfg.get("preset") == "fig2":
        ns = [400, 500, 600, 700, 800]
        sigma = FIG2_SIGMA
    else:
        ns = [int(v) for v in _floats(cfg, "n")]
        sigma = cfg.get("sigma")
        if sigma is None and cfg.get("capacity") is None:
            raise ValidationError("missing required parameter 'capacity' (or 'sigma')")
    xs = np.linspace(0.0, cfg.get("x_max", 15.0), cfg.get("points", 31))
    columns = ["N", "chi", "sigma", "x", "kappa", "asymptotic", "exact", "ratio"]
    rows = []
    for n in ns:
        capacity = sigma * n if sigma is not None else cfg["capacity"]
        rows.extend(comparison_table(SystemModel.from_params(n, chi, capacity), xs))
    worst = max((abs(math.log10(r["ratio"])) for r in rows if r["ratio"] > 0), default=math.nan)
    return columns, rows, f"asymptotic: {len(rows)} rows, worst |log10(asymptotic/exact)| = {worst:.3g}"


def _cmd_compare(cfg):
    if cfg.get("preset") == "oracle":
        cases = [(SystemModel.from_params(n, chi, c), [0.0, 1.0, 5.0]) for n, chi, c in ORACLE_CASES]
    else:
        cases = [(_model(cfg), _floats(cfg, "b"))]
    rows = compare_exact_vs_sim(
        cases,
        horizon=cfg.get("horizon", 1e5),
        warmup=cfg.get("warmup", 1e3),
        replications=cfg.get("replications", 20),
        seed=cfg.get("seed", 0),
    )
    columns = ["N", "chi", "C", "b", "exact", "sim_mean", "sim_stderr", "z", "flag", "stderr_floored",
               "replications", "horizon", "seed"]
    flagged = sum(1 for r in rows if r["flag"])
    return columns, rows, f"compare: {len(rows)} rows, {flagged} with |z| > 3"


def _cmd_units(cfg):
    _require(cfg, "b_norm", "rp_kw", "mean_on_hours")
    units = PhysicalUnits(cfg["rp_kw"], cfg["mean_on_hours"])
    kwh = from_normalized_storage(units, cfg["b_norm"])
    row = dict(b_norm=cfg["b_norm"], rp_kw=units.rp_kw, mean_on_hours=units.mean_on_hours, kwh=kwh)
    columns = ["b_norm", "rp_kw", "mean_on_hours", "kwh"]
    if cfg.get("grid_kw") is not None:
        row["grid_kw"] = cfg["grid_kw"]
        row["C_norm"] = cfg["grid_kw"] / units.rp_kw
        columns += ["grid_kw", "C_norm"]
    return columns, [row], f"units: B = {cfg['b_norm']:g} R_p/mu = {kwh:.12g} kWh"


COMMANDS = {
    "size": _cmd_size,
    "outage": _cmd_outage,
    "capacity": _cmd_capacity,
    "contour": _cmd_contour,
    "sweep": _cmd_sweep,
    "simulate": _cmd_simulate,
    "asymptotic": _cmd_asymptotic,
    "compare": _cmd_compare,
    "units": _cmd_units,
}


# --- output ---------------------------------------------------------------


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        return f"{value:.12g}"
    return str(value)


def _json_value(value):
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if not math.isfinite(value):
            return None
        return float(f"{value:.12g}")
    return value


def render(columns, rows, fmt, meta) -> str:
    columns = list(columns) + [c for c in ("notes", "version") if c not in columns]
    note_extra = meta.get("overrides")
    out_rows = []
    for row in rows:
        row = dict(row)
        notes = [row.get("notes") or ""]
        if note_extra:
            notes.append("override: " + ",".join(note_extra))
        row["notes"] = "; ".join(n for n in notes if n)
        row["version"] = __version__
        out_rows.append(row)
    if fmt == "json":
        doc = {
            "tool": "storesize",
            "version": __version__,
            "command": meta["command"],
            "config": {k: _json_value(v) for k, v in sorted(meta["config"].items())},
            "overrides": meta.get("overrides", []),
            "columns": columns,
            "rows": [{c: _json_value(r.get(c)) for c in columns} for r in out_rows],
        }
        return json.dumps(doc, indent=2, sort_keys=False) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in out_rows:
        writer.writerow([_fmt(r.get(c)) for c in columns])
    return buf.getvalue()


def write_atomic(path: str, text: str) -> None:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    flags = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    try:
        cfg, overrides = load_config(args.config, flags)
        columns, rows, summary = COMMANDS[args.command](cfg)
        text = render(columns, rows, cfg.get("format", "csv"),
                      {"command": args.command, "config": cfg, "overrides": overrides})
    except FileNotFoundError as exc:
        print(f"storesize: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ValidationError as exc:
        print(f"storesize: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (NumericalError, StoresizeError) as exc:
        print(f"storesize: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if overrides:
        summary += f" (overrides: {', '.join(overrides)})"
    if cfg.get("output"):
        write_atomic(cfg["output"], text)
        print(summary)
    else:
        sys.stdout.write(text)
        print(summary, file=sys.stderr)
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
