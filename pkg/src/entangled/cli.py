"""
Batch runner.

    entangled run <config>        averages along a schedule vs. a predicted limit
    entangled decompose <config>  reversible/stable split of one function
    entangled probe <config>      twisted-compactness and joint-bound probes
    entangled fixtures <dir>      regenerate every fixture in a directory
    entangled weights <config>    absolute Cesaro curve of a weight sequence

Exit codes: 0 success, 1 check failure or runtime error, 2 config error.
Flags override environment variables, which override the config file.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import config as cfg
from .engine import BudgetError, ChainError, StrategyError, run_schedule, sample_points
from .limits import ApplicabilityError, WeightSequence, is_class_N, predict
from .operators import probe_joint_bound, probe_twisted_compactness
from .oracle import Fixture, FixtureSchemaError, regenerate_fixture
from .space import BernoulliSamples, GridFunction, RepresentationError, norm
from .space import to_dict as function_to_dict
from .systems import SystemKindError, jgl_decompose, reversible_rank

EXIT_OK, EXIT_CHECK, EXIT_CONFIG = 0, 1, 2
REPORT_SCHEMA = "entangled-report/1"
ENV = {"workers": "ENTANGLED_WORKERS", "cache_mb": "ENTANGLED_CACHE_MB",
       "out": "ENTANGLED_OUT", "seed": "ENTANGLED_SEED"}
NAIVE_EXEMPT = ("cached", "factorized", "lowrank")

_CONFIG_ERRORS = (cfg.ConfigError, ChainError, StrategyError, RepresentationError,
                  SystemKindError, ApplicabilityError, KeyError, TypeError, ValueError)


def _fmt(x) -> str:
    return repr(float(x))


def _write_json(path: Path, data):
    path.write_text(json.dumps(data, indent=1, sort_keys=True) + "\n")


def _write_csv(path: Path, header, rows):
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _load_json(path) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise cfg.ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise cfg.ConfigError("config must be a JSON object")
    return data


def _overrides(args) -> dict:
    """Flag values, falling back to environment variables."""
    out = {}
    for key, env in ENV.items():
        val = getattr(args, key, None)
        if val is None and os.environ.get(env):
            val = os.environ[env]
        if val is not None:
            out[key] = val
    return out


def _out_dir(args, default: str) -> Path:
    out = Path(_overrides(args).get("out", default))
    out.mkdir(parents=True, exist_ok=True)
    if not os.access(out, os.W_OK):
        raise cfg.ConfigError(f"output directory {out} is not writable")
    return out


def _serialize_value(v):
    if isinstance(v, np.ndarray):
        return [[float(z.real), float(z.imag)] for z in v.astype(complex)]
    if v is None:
        return None
    return function_to_dict(v)


# -- run -----------------------------------------------------------------------

def build_experiment(data: dict, args=None) -> cfg.ExperimentConfig:
    over = _overrides(args) if args is not None else {}
    data = dict(data)
    if "workers" in over:
        data["workers"] = int(over["workers"])
    if "cache_mb" in over:
        data["cache_mb"] = float(over["cache_mb"])
    if "out" in over:
        data["out_dir"] = str(over["out"])
    if "seed" in over:
        samples = dict(data.get("samples", {}))
        samples["seed"] = int(over["seed"])
        data["samples"] = samples
    exp = cfg.experiment_from_dict(data)
    if exp.strategy not in NAIVE_EXEMPT and exp.naive_cost() > exp.max_cost:
        raise BudgetError(
            f"naive-equivalent cost {exp.naive_cost():.3g} exceeds max_cost {exp.max_cost:.3g}; "
            f"use one of {NAIVE_EXEMPT} or raise max_cost"
        )
    return exp


def _limit_for(exp: cfg.ExperimentConfig):
    if exp.predictor == "zero" and exp.abs_mode and exp.resolution:
        return GridFunction(np.zeros(exp.resolution))
    return predict(exp.chain, exp.predictor)


def _monotone(seq, tail, strict=False) -> bool:
    seq = list(seq)[-tail:] if tail and tail is not True else list(seq)
    if strict:
        return all(b < a for a, b in zip(seq, seq[1:]))
    return all(b <= a for a, b in zip(seq, seq[1:]))


def _checks(data: dict, result) -> dict:
    """
    Optional thresholds from the config's ``checks`` block::

        max_final_sup, max_final_l2            bounds at the last schedule point
        nonincreasing_sup, nonincreasing_l2    true, or an int = only the last n points
        decreasing_sup, decreasing_l2          strict version
    """
    spec = data.get("checks", {})
    cols = {"sup": result.distances_sup, "l2": result.distances_l2}
    out = {}
    for col, vals in cols.items():
        if f"max_final_{col}" in spec:
            out[f"max_final_{col}"] = bool(vals) and vals[-1] <= spec[f"max_final_{col}"]
        for name, strict in (("nonincreasing", False), ("decreasing", True)):
            key = f"{name}_{col}"
            if spec.get(key):
                out[key] = bool(vals) and _monotone(vals, spec[key], strict)
    return out


def run_experiment(exp: cfg.ExperimentConfig, out_dir=None, raw_config=None):
    """Run the schedule and write report.json, convergence.csv, samples.csv, timings.csv."""
    out = Path(out_dir or exp.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    limit = _limit_for(exp)
    points = samples = None
    if exp.sample_points is not None:
        points = np.asarray(exp.sample_points)
    else:
        pts = sample_points(exp.chain, exp.sample_count, exp.sample_seed, exp.resolution)
        if isinstance(pts, BernoulliSamples):
            samples = pts
        else:
            points = pts
    echo = exp.to_dict()
    state = {"error": None}

    def flush(idx, res):
        rows = []
        for i, N in enumerate(res.schedule):
            row = [N]
            if res.distances_sup:
                row += [_fmt(res.distances_sup[i]), _fmt(res.distances_l2[i])]
            rows.append(row)
        header = ["N", "distance_sup", "distance_l2"] if res.distances_sup else ["N"]
        _write_csv(out / "convergence.csv", header, rows)
        _write_csv(out / "timings.csv", ["N", "wall_time_s"],
                   [[N, f"{t:.6f}"] for N, t in zip(res.schedule, res.wall_times)])
        srows = []
        for N, vals in zip(res.schedule, res.sample_values):
            for j, v in enumerate(np.asarray(vals).ravel()):
                srows.append([N, j, _fmt(v.real), _fmt(v.imag)])
        _write_csv(out / "samples.csv", ["N", "sample", "re", "im"], srows)
        report = {
            "schema": REPORT_SCHEMA,
            "config": echo,
            "predictor": exp.predictor,
            "predicted_limit": _serialize_value(limit),
            "schedule": list(res.schedule),
            "distances_sup": [float(x) for x in res.distances_sup],
            "distances_l2": [float(x) for x in res.distances_l2],
            "averages": [_serialize_value(a) for a in res.averages],
            "complete": len(res.schedule) == len(exp.schedule),
            "error": state["error"],
        }
        if raw_config is not None:
            report["checks"] = _checks(raw_config, res)
        _write_json(out / "report.json", report)
        state["last"] = res

    try:
        result = run_schedule(
            exp.chain, exp.schedule, exp.strategy, limit, samples, points,
            exp.abs_mode, exp.resolution, exp.flow_step, exp.workers,
            int(exp.cache_mb * 2**20), on_point=flush,
        )
    except Exception as exc:
        done = len(state["last"].schedule) if "last" in state else 0
        N = exp.schedule[done]
        state["error"] = f"schedule point N={N}: {type(exc).__name__}: {exc}"
        if "last" in state:
            flush(done - 1, state["last"])
        else:
            _write_json(out / "report.json", {"schema": REPORT_SCHEMA, "config": echo,
                                              "complete": False, "error": state["error"]})
        raise RuntimeError(state["error"]) from exc
    return result


def cmd_run(args) -> int:
    raw = _load_json(args.config)
    exp = build_experiment(raw, args)
    out = Path(exp.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    try:
        result = run_experiment(exp, out, raw)
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CHECK
    for i, N in enumerate(result.schedule):
        line = f"N={N}"
        if result.distances_sup:
            line += f"  sup={result.distances_sup[i]:.3e}  l2={result.distances_l2[i]:.3e}"
        print(line)
    checks = _checks(raw, result)
    for name, ok in checks.items():
        print(f"check {name}: {'pass' if ok else 'FAIL'}")
    return EXIT_OK if all(checks.values()) else EXIT_CHECK


# -- decompose -----------------------------------------------------------------

def cmd_decompose(args) -> int:
    data = _load_json(args.config)
    system = cfg.system_from_dict(data["system"])
    f = cfg.function_from_config(data["f"])
    f_r, f_s = jgl_decompose(system, f)
    resid = norm(f - f_r - f_s, 2)
    report = {
        "schema": "entangled-decompose/1",
        "system": cfg.system_to_dict(system),
        "f": function_to_dict(f),
        "cutoff": getattr(f, "K", None),
        "reversible_rank": reversible_rank(system),
        "f_r": function_to_dict(f_r),
        "f_s": function_to_dict(f_s),
        "norm_f_r": norm(f_r, 2),
        "norm_f_s": norm(f_s, 2),
        "reconstruction_error": resid,
    }
    out = _out_dir(args, data.get("out_dir", "out"))
    _write_json(out / "decompose.json", report)
    print(f"|f_r|_2={report['norm_f_r']:.6g}  |f_s|_2={report['norm_f_s']:.6g}")
    return EXIT_OK if resid <= 1e-10 else EXIT_CHECK


# -- probe ---------------------------------------------------------------------

def cmd_probe(args) -> int:
    data = _load_json(args.config)
    op = cfg.operator_from_dict(data["operator"])
    system = cfg.system_from_dict(data["system"])
    fs = [cfg.function_from_config(f) for f in data["functions"]]
    dims = [int(d) for d in data.get("dims", [1, 2, 4, 8, 16])]
    n_max = int(data.get("n_max", 64))
    bound = probe_joint_bound([op], [system], fs, n_max)
    reports, rows, checks = [], [], {}
    for idx, f in enumerate(fs):
        col = []
        for d in dims:
            rep = probe_twisted_compactness(op, system, f, d, n_max, joint_bound=bound)
            reports.append(rep.as_dict())
            col.append(rep.max_residual_sup)
            rows.append([idx, d, _fmt(rep.max_residual_sup), _fmt(rep.raw_residual_sup)])
        checks[f"nonincreasing_f{idx}"] = all(b <= a for a, b in zip(col, col[1:]))
        if "max_residual" in data.get("checks", {}):
            checks[f"residual_f{idx}"] = col[-1] <= data["checks"]["max_residual"]
    if "max_joint_bound" in data.get("checks", {}):
        checks["joint_bound"] = bool(np.isfinite(bound) and bound <= data["checks"]["max_joint_bound"])
    out = _out_dir(args, data.get("out_dir", "out"))
    _write_json(out / "probe.json", {"schema": "entangled-probe/1",
                                     "operator": cfg.operator_to_dict(op),
                                     "system": cfg.system_to_dict(system),
                                     "joint_bound_estimate": bound,
                                     "reports": reports, "checks": checks})
    _write_csv(out / "probe.csv", ["f", "dim", "max_residual_sup", "raw_residual_sup"], rows)
    for r in rows:
        print(f"f{r[0]} dim={r[1]} residual={float(r[2]):.3e}")
    print(f"joint bound {bound:.4f}")
    for name, ok in checks.items():
        print(f"check {name}: {'pass' if ok else 'FAIL'}")
    return EXIT_OK if all(checks.values()) else EXIT_CHECK


# -- fixtures ------------------------------------------------------------------

def cmd_fixtures(args) -> int:
    d = Path(args.dir)
    if not d.is_dir():
        raise cfg.ConfigError(f"{d} is not a directory")
    paths = sorted(d.glob("*.json"))
    if not paths:
        raise cfg.ConfigError(f"no fixtures in {d}")
    ok = True
    for p in paths:
        try:
            check = regenerate_fixture(Fixture.load(p))
        except FixtureSchemaError as exc:
            raise cfg.ConfigError(str(exc)) from exc
        ok &= check.passed
        print(f"{p.name}: {'pass' if check.passed else 'FAIL'} max_abs_diff={check.max_abs_diff:.3e}")
    return EXIT_OK if ok else EXIT_CHECK


# -- weights -------------------------------------------------------------------

def weight_from_config(spec: dict):
    """``{"terms": [{"angle": t, "q": [re, im]}, ...]}`` or ``{"values": [[re, im], ...]}``."""
    if "terms" in spec:
        terms = []
        for t in spec["terms"]:
            g = np.exp(2j * np.pi * float(t["angle"])) if "angle" in t else complex(*t["gamma"])
            terms.append((g, complex(*t.get("q", [1.0, 0.0]))))
        return WeightSequence(tuple(terms))
    if "values" in spec:
        return np.array([complex(*v) for v in spec["values"]])
    raise cfg.ConfigError("weight spec needs 'terms' or 'values'")


def cmd_weights(args) -> int:
    data = _load_json(args.config)
    w = weight_from_config(data["weight"])
    N_max = int(data.get("N_max", 4096))
    tol = float(data.get("tol", 1e-2))
    res = is_class_N(w, N_max, tol)
    checks = {}
    if "expect_class_N" in data:
        checks["class_N"] = bool(res.member) == bool(data["expect_class_N"])
    out = _out_dir(args, data.get("out_dir", "out"))
    _write_csv(out / "weights.csv", ["N", "abs_cesaro"],
               [[N, _fmt(v)] for N, v in zip(res.schedule, res.curve)])
    _write_json(out / "weights.json", {"schema": "entangled-weights/1", "N_max": N_max,
                                       "tol": tol, "member": res.member,
                                       "schedule": res.schedule, "curve": res.curve,
                                       "checks": checks})
    print(f"class N at horizon {N_max}: {res.member} (last {res.curve[-1]:.3e})")
    return EXIT_OK if all(checks.values()) else EXIT_CHECK


# -- entry point ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="entangled", description="Entangled ergodic averages.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--workers", type=int, default=None)
    common.add_argument("--cache-mb", dest="cache_mb", type=float, default=None)
    common.add_argument("--out", default=None, help="output directory")
    common.add_argument("--seed", type=int, default=None, help="sample-point seed")
    sub = p.add_subparsers(dest="command", required=True)
    for name, fn, arg in (("run", cmd_run, "config"), ("decompose", cmd_decompose, "config"),
                          ("probe", cmd_probe, "config"), ("fixtures", cmd_fixtures, "dir"),
                          ("weights", cmd_weights, "config")):
        sp = sub.add_parser(name, parents=[common], help=fn.__doc__)
        sp.add_argument(arg)
        sp.set_defaults(func=fn)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (BudgetError, *_CONFIG_ERRORS) as exc:
        print(f"config error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
