"""Config ingestion, experiment orchestration, and CSV/manifest emission.

Config files are line-oriented ``key: value`` documents; ``#`` starts a
comment and a line containing only ``---`` separates multiple sweep
definitions in one file.  Emitted results are a CSV per sweep plus a JSON
manifest that can itself be passed back to ``sweep`` to reproduce the CSV
byte for byte.
"""

import argparse
import csv
import json
import logging
import os
import re
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .asymptotics import (COST_MODELS, GROWTH_MODELS, clt_check,
                          fit_cost_anchor, fit_growth, gumbel_check)
from .errors import ConfigParseError, MimosecError
from .harness import SweepResult, SweepSpec, run_sweep, run_trial

CSV_HEADER = ("scenario,scheme,M,trials,resamples,r_sum_mean,r_sum_se,"
              "r_sum_noeve_mean,r_sum_noeve_se,leakage_mean,leakage_se,"
              "cost_mean,cost_se")

# The two networks used throughout the experiment matrix: 16 users at 0 dB
# receive SNR overheard by 2 (sparse) or 16 (dense) eavesdroppers at -10 dB.
PRESETS = {
    "sparse": dict(K=16, J=2, L=16, total_power=1.0, sigma2=1.0, rho2=1.0,
                   beta=1.0, theta=0.1),
    "dense": dict(K=16, J=16, L=16, total_power=1.0, sigma2=1.0, rho2=1.0,
                  beta=1.0, theta=0.1),
}

_INT_KEYS = {"K", "J", "L", "quant_bits", "trials", "seed"}
_FLOAT_KEYS = {"total_power", "sigma2", "rho2"}
_VECTOR_KEYS = {"beta", "theta", "weights"}
_STRING_KEYS = {"scenario", "preset", "scheme", "cost_estimator"}
_ALL_KEYS = _INT_KEYS | _FLOAT_KEYS | _VECTOR_KEYS | _STRING_KEYS | {"m_values"}
_REQUIRED = ("scheme", "K", "J", "L", "m_values", "total_power", "sigma2",
             "rho2", "beta", "theta", "trials", "seed")


def _parse_scalar(key, raw, line, path):
    try:
        if key in _INT_KEYS:
            return int(raw)
        if key in _FLOAT_KEYS:
            return float(raw)
    except ValueError:
        kind = "integer" if key in _INT_KEYS else "number"
        raise ConfigParseError(f"expected {kind}, got '{raw}'",
                               path=path, key=key, line=line) from None
    return raw


def _parse_vector(key, raw, line, path):
    try:
        return [float(tok) for tok in raw.split(",")]
    except ValueError:
        raise ConfigParseError(f"expected a number or comma-separated numbers, got '{raw}'",
                               path=path, key=key, line=line) from None


def _parse_m_values(raw, line, path):
    m = re.fullmatch(r"pow2:(\d+)\.\.(\d+)", raw)
    if m:
        lo, hi = int(m.group(1)), int(m.group(2))
        if hi < lo:
            raise ConfigParseError(f"empty pow2 range '{raw}'",
                                   path=path, key="m_values", line=line)
        return [2 ** e for e in range(lo, hi + 1)]
    try:
        return [int(tok) for tok in raw.split(",")]
    except ValueError:
        raise ConfigParseError(f"expected comma-separated integers or 'pow2:a..b', got '{raw}'",
                               path=path, key="m_values", line=line) from None


def _broadcast(values, n, key, path):
    if len(values) == 1:
        return [values[0]] * n
    if len(values) != n:
        raise ConfigParseError(f"expected 1 or {n} values, got {len(values)}",
                               path=path, key=key)
    return values


def _spec_from_document(doc: dict, path: str) -> SweepSpec:
    entries = dict(doc)
    preset = entries.pop("preset", (None, None))[0]
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigParseError(f"unknown preset '{preset}', expected one of "
                                   f"{sorted(PRESETS)}", path=path, key="preset",
                                   line=doc["preset"][1])
        for key, value in PRESETS[preset].items():
            entries.setdefault(key, (value, None))
    entries.setdefault("weights", (1.0, None))
    entries.setdefault("cost_estimator", ("mean_of_ratios", None))
    if "scenario" not in entries and preset is not None:
        entries["scenario"] = (preset, None)
    for key in ("scenario",) + _REQUIRED:
        if key not in entries:
            raise ConfigParseError("missing required key", path=path, key=key)

    def value(key, default=None):
        return entries[key][0] if key in entries else default

    K, J = value("K"), value("J")
    for key, n in (("beta", K), ("theta", J), ("weights", K)):
        vec = value(key)
        if not isinstance(vec, list):
            vec = [float(vec)]
        entries[key] = (_broadcast(vec, n, key, path), entries.get(key, (None, None))[1])
    try:
        return SweepSpec(
            scenario=str(value("scenario")), scheme=str(value("scheme")),
            K=K, J=J, L=value("L"),
            total_power=value("total_power"), sigma2=value("sigma2"),
            rho2=value("rho2"),
            betas=np.array(value("beta")), thetas=np.array(value("theta")),
            weights=np.array(value("weights")),
            m_values=tuple(value("m_values")), trials=value("trials"),
            master_seed=value("seed"), quant_bits=value("quant_bits"),
            cost_estimator=str(value("cost_estimator")))
    except MimosecError as exc:
        raise ConfigParseError(str(exc), path=path) from exc


def _parse_text_config(path: Path):
    documents = [{}]
    for lineno, raw_line in enumerate(path.read_text().splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if line == "---":
            documents.append({})
            continue
        if ":" not in line:
            raise ConfigParseError(f"expected 'key: value', got '{line}'",
                                   path=str(path), line=lineno)
        key, _, raw = line.partition(":")
        key, raw = key.strip(), raw.strip()
        if key not in _ALL_KEYS:
            raise ConfigParseError("unknown key", path=str(path), key=key, line=lineno)
        if key in documents[-1]:
            raise ConfigParseError("duplicate key", path=str(path), key=key, line=lineno)
        if key == "m_values":
            parsed = _parse_m_values(raw, lineno, str(path))
        elif key in _VECTOR_KEYS:
            parsed = _parse_vector(key, raw, lineno, str(path))
        else:
            parsed = _parse_scalar(key, raw, lineno, str(path))
        documents[-1][key] = (parsed, lineno)
    documents = [d for d in documents if d]
    if not documents:
        raise ConfigParseError("config defines no sweeps", path=str(path))
    return [_spec_from_document(d, str(path)) for d in documents]


def _spec_from_manifest(entry: dict, path: str) -> SweepSpec:
    try:
        return SweepSpec(
            scenario=entry["scenario"], scheme=entry["scheme"],
            K=entry["K"], J=entry["J"], L=entry["L"],
            total_power=entry["total_power"], sigma2=entry["sigma2"],
            rho2=entry["rho2"], betas=np.array(entry["betas"]),
            thetas=np.array(entry["thetas"]), weights=np.array(entry["weights"]),
            m_values=tuple(entry["m_values"]), trials=entry["trials"],
            master_seed=entry["seed"], quant_bits=entry.get("quant_bits"),
            cost_estimator=entry.get("cost_estimator", "mean_of_ratios"))
    except KeyError as exc:
        raise ConfigParseError("missing required key", path=path,
                               key=str(exc)) from exc
    except MimosecError as exc:
        raise ConfigParseError(str(exc), path=path) from exc


def parse_config(path) -> list:
    """Parse a sweep config (text format or emitted JSON manifest) into a
    list of SweepSpec."""
    path = Path(path)
    if not path.exists():
        raise ConfigParseError("no such file", path=str(path))
    if path.suffix == ".json":
        body = json.loads(path.read_text())
        return [_spec_from_manifest(body["sweep"], str(path))]
    return _parse_text_config(path)


def _fmt(value: float) -> str:
    return format(float(value), ".9g")


def _spec_as_dict(spec: SweepSpec) -> dict:
    return {
        "scenario": spec.scenario, "scheme": spec.scheme,
        "K": spec.K, "J": spec.J, "L": spec.L,
        "total_power": spec.total_power, "sigma2": spec.sigma2,
        "rho2": spec.rho2, "betas": list(spec.betas),
        "thetas": list(spec.thetas), "weights": list(spec.weights),
        "m_values": list(spec.m_values), "trials": spec.trials,
        "seed": spec.master_seed, "quant_bits": spec.quant_bits,
        "cost_estimator": spec.cost_estimator,
    }


def emit_results(result: SweepResult, path) -> None:
    """Write one CSV row per swept m plus a JSON manifest alongside.

    Floating-point fields carry 9 significant digits with a dot decimal
    separator; rerunning the manifest reproduces the CSV byte for byte.
    """
    path = Path(path)
    lines = [CSV_HEADER]
    for p in result.points:
        lines.append(",".join([
            result.spec.scenario, result.spec.scheme, str(p.m), str(p.trials),
            str(p.resamples), _fmt(p.r_sum_mean), _fmt(p.r_sum_se),
            _fmt(p.r_sum_noeve_mean), _fmt(p.r_sum_noeve_se),
            _fmt(p.leakage_mean), _fmt(p.leakage_se),
            _fmt(p.cost_mean), _fmt(p.cost_se)]))
    try:
        path.write_text("\n".join(lines) + "\n", newline="\n")
        cfg0 = result.spec.config_for(max(result.spec.m_values)) \
            if result.spec.m_values else None
        manifest = {
            "tool": "mimosec",
            "version": __version__,
            "created": datetime.now(timezone.utc).isoformat(),
            "master_seed": result.spec.master_seed,
            "output": path.name,
            "sweep": _spec_as_dict(result.spec),
            "derived": {
                "snr_user_db": list(cfg0.snr_user_db()) if cfg0 else [],
                "snr_eve_db": list(cfg0.snr_eve_db()) if cfg0 else [],
            },
        }
        manifest_path = path.with_suffix(".manifest.json")
        manifest_path.write_text(json.dumps(manifest, indent=2) + "\n")
    except OSError as exc:
        raise MimosecError(f"cannot write results to {path}: {exc}") from exc


def _safe_name(text: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]+", "-", text)


def _workers_from_env() -> int:
    raw = os.environ.get("SIM_THREADS")
    if raw is not None:
        try:
            return max(1, int(raw))
        except ValueError:
            raise MimosecError(f"SIM_THREADS must be an integer, got '{raw}'") from None
    return os.cpu_count() or 1


def _cmd_sweep(args) -> int:
    specs = parse_config(args.config)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    workers = args.workers if args.workers is not None else _workers_from_env()
    used = set()
    for spec in specs:
        if args.seed is not None:
            spec = spec.with_seed(args.seed)
        result = run_sweep(spec, workers=workers)
        stem = _safe_name(f"{spec.scenario}_{spec.scheme}")
        if stem in used:
            stem = f"{stem}_{len(used)}"
        used.add(stem)
        target = out_dir / f"{stem}.csv"
        emit_results(result, target)
        print(f"wrote {target}")
    return 0


def _read_results_csv(path: Path):
    with path.open(newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise MimosecError(f"{path}: no data rows to fit")
    return rows


def _lookup_k(csv_path: Path) -> int:
    manifest = csv_path.with_suffix(".manifest.json")
    if manifest.exists():
        return int(json.loads(manifest.read_text())["sweep"]["K"])
    return 1


def _cmd_fit(args) -> int:
    path = Path(args.csv)
    rows = _read_results_csv(path)
    m = [int(r["M"]) for r in rows]
    if args.model in GROWTH_MODELS:
        y = [float(r["r_sum_noeve_mean"]) for r in rows]
        k = args.k if args.k is not None else _lookup_k(path)
        fit = fit_growth(m, y, k, args.model)
    else:
        c = [float(r["cost_mean"]) for r in rows]
        anchor = args.anchor if args.anchor is not None else max(m)
        fit = fit_cost_anchor(m, c, args.model, anchor)
    print(f"model: {fit.model}")
    print(f"intercept: {_fmt(fit.intercept)}")
    if fit.slope is not None:
        print(f"slope: {_fmt(fit.slope)}")
    print(f"residual_rms: {_fmt(fit.residual_rms)}")
    print(f"r_squared: {_fmt(fit.r_squared)}")
    return 0


def _cmd_gumbel(args) -> int:
    check = gumbel_check(args.m, args.trials, args.seed)
    print(f"m: {check.m}")
    print(f"trials: {check.trials}")
    print(f"ks_statistic: {_fmt(check.ks_statistic)}")
    print(f"mean_shifted_max: {_fmt(check.sample_mean_shifted)}")
    print(f"mean_max: {_fmt(check.sample_mean_max)}")
    return 0


def _cmd_clt(args) -> int:
    ks = clt_check(args.m, args.trials, args.seed)
    print(f"m: {args.m}")
    print(f"trials: {args.trials}")
    print(f"ks_statistic: {_fmt(ks)}")
    return 0


def _vector_line(name, values) -> str:
    return f"{name}: " + ", ".join(_fmt(v) for v in values)


def _cmd_single(args) -> int:
    spec = parse_config(args.config)[0]
    seed = args.seed if args.seed is not None else spec.master_seed
    cfg = spec.config_for(args.m)
    report = run_trial(cfg, spec.scheme, spec.quant_bits, seed, args.trial)
    print(f"scenario: {spec.scenario}")
    print(f"scheme: {spec.scheme}")
    print(f"m: {args.m}")
    print(f"seed: {seed}")
    print(f"trial: {args.trial}")
    print(_vector_line("sinr", report.sinr))
    print(_vector_line("esnr", report.esnr))
    print(_vector_line("r_secrecy", report.r_secrecy))
    print(_vector_line("r_noeve", report.r_noeve))
    print(_vector_line("interference", report.interference))
    print(_vector_line("eve_power", report.eve_power))
    print(f"r_sum: {_fmt(report.r_sum)}")
    print(f"r_sum_noeve: {_fmt(report.r_sum_noeve)}")
    print(f"leakage: {_fmt(report.leakage)}")
    print(f"cost: {_fmt(report.cost)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mimosec",
        description="Monte Carlo secrecy-rate simulator for massive MIMO "
                    "downlinks with antenna selection and hybrid precoding.")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true",
                        help="log one line per swept array size")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="run the sweeps defined in a config file")
    p.add_argument("config", help="config file or emitted .manifest.json")
    p.add_argument("--out", default=".", help="output directory (default: .)")
    p.add_argument("--seed", type=int, default=None,
                   help="override the master seed of every sweep")
    p.add_argument("--workers", type=int, default=None,
                   help="worker processes (default: SIM_THREADS or CPU count)")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("fit", help="fit a growth or cost model to a results CSV")
    p.add_argument("csv")
    p.add_argument("--model", required=True,
                   choices=list(GROWTH_MODELS) + list(COST_MODELS))
    p.add_argument("--anchor", type=int, default=None,
                   help="anchor m for cost models (default: largest swept m)")
    p.add_argument("--k", type=int, default=None,
                   help="user count scaling the growth regressor "
                        "(default: from the sibling manifest, else 1)")
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("gumbel", help="extreme-value check of the max channel gain")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_gumbel)

    p = sub.add_parser("clt", help="normality check of the phase-aligned cross sum")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_clt)

    p = sub.add_parser("single", help="run one trial and print its rate report")
    p.add_argument("config")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--seed", type=int, default=None,
                   help="override the config seed")
    p.add_argument("--trial", type=int, default=0)
    p.set_defaults(func=_cmd_single)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(message)s")
    try:
        return args.func(args)
    except MimosecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
