"""Command-line entry point: ``sgdeco <subcommand> --config file.yaml``.

Exit status is 0 on success, 2 for configuration errors and 3 when
``validate`` finds a check outside its tolerance. Results go to ``--out``
or standard output.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
from pathlib import Path
import sys

import numpy as np
import yaml

from . import __version__
from .dynamics import ideal_trajectories
from .errors import ConfigError, SgdecoError
from .harness import (ScenarioConfig, load_config, results_csv, results_json,
                      run_magnetic_scenario, run_scenario, unit_system, write_text)
from .noise import Psd, evaluate_psd, plan_synthesis, synthesize_batch, trial_seed
from .params import PhysParams
from .quadratic import quadratic_transfer
from .quantum import (coherent_density_matrix, energy_expectation, localisation_rate, master_evolve,
                      position_grid, purity_and_entropy)
from .response import closed_form_transfer, transfer_from_trajectories
from .spin import witness_report
from .validation import run_validation

EXIT_OK, EXIT_CONFIG, EXIT_VALIDATE, EXIT_IO = 0, 2, 3, 1


# -- config helpers -----------------------------------------------------------

def _read_mapping(path: str | None, allowed: set[str]) -> dict:
    if path is None:
        return {}
    p = Path(path)
    try:
        data = yaml.safe_load(p.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read configuration {p}: {exc.strerror}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"{p}: not valid YAML ({exc})") from None
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"{p}: configuration must be a mapping")
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError(f"unknown configuration field(s) {sorted(unknown)}; expected {sorted(allowed)}")
    return data


def _psd_of(data: dict) -> Psd:
    if "psd" not in data:
        raise ConfigError("psd is required")
    if not isinstance(data["psd"], dict):
        raise ConfigError("psd must be a mapping with a 'model' key")
    return Psd.from_dict(data["psd"])


def _params_of(data: dict) -> PhysParams:
    raw = data.get("params") or {}
    if not isinstance(raw, dict):
        raise ConfigError("params must be a mapping")
    try:
        return PhysParams.from_dict(dict(raw))
    except TypeError as exc:
        raise ConfigError(f"params: {exc}") from None


def _positive(data: dict, key: str, default=None) -> float:
    val = data.get(key, default)
    if not (isinstance(val, (int, float)) and not isinstance(val, bool) and math.isfinite(val) and val > 0):
        raise ConfigError(f"{key} must be a positive number, got {val!r}")
    return float(val)


def _count(value, key: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise ConfigError(f"{key} must be a positive integer, got {value!r}")
    return value


def _table_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) for v in row])
    return buf.getvalue()


def _json_text(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n"


def _emit(args, text: str) -> None:
    if args.out is None:
        sys.stdout.write(text)
    else:
        write_text(args.out, text)


def _scenario(args) -> ScenarioConfig:
    if args.config is None:
        raise ConfigError("--config is required for this subcommand")
    return load_config(args.config).with_overrides(seed=args.seed, trials=args.trials)


def _run(config: ScenarioConfig):
    if config.noise_kind == "magnetic-gradient":
        return run_magnetic_scenario(config)
    return run_scenario(config)


def _emit_scenario(args, stats, report) -> None:
    text = results_csv(stats, report) if args.format == "csv" else results_json(stats, report)
    _emit(args, text)


# -- subcommands --------------------------------------------------------------

def cmd_psd(args) -> int:
    data = _read_mapping(args.config, {"psd", "omega_max", "n_points"})
    psd = _psd_of(data)
    hi = psd.support()[1]
    finite = [b for b in psd.breakpoints() if math.isfinite(b)]
    default_max = hi if math.isfinite(hi) else 10.0 * max(finite + [1.0])
    w_max = _positive(data, "omega_max", default_max)
    n = _count(data.get("n_points", 1001), "n_points")
    w = np.linspace(0.0, w_max, n)
    s = np.asarray(evaluate_psd(psd, w), dtype=float)
    if args.format == "csv":
        _emit(args, _table_text(["omega", "S"], zip(w, s)))
    else:
        _emit(args, _json_text({"psd": psd.to_dict(), "omega": w.tolist(), "S": s.tolist()}))
    return EXIT_OK


def cmd_synth(args) -> int:
    data = _read_mapping(args.config, {"psd", "duration", "dt", "n_traces", "master_seed"})
    psd = _psd_of(data)
    duration = _positive(data, "duration")
    dt = _positive(data, "dt")
    n_traces = _count(args.trials if args.trials is not None else data.get("n_traces", 1), "n_traces")
    master = args.seed if args.seed is not None else data.get("master_seed", 0)
    if isinstance(master, bool) or not isinstance(master, int) or not 0 <= master < 1 << 64:
        raise ConfigError(f"master_seed must be an unsigned 64-bit integer, got {master!r}")
    plan = plan_synthesis(psd, duration, dt)
    seeds = [trial_seed(master, j) for j in range(n_traces)]
    traces = synthesize_batch(plan, seeds)
    t = np.arange(plan.n) * dt
    if args.format == "csv":
        header = ["t"] + [f"trace_{j}" for j in range(n_traces)]
        _emit(args, _table_text(header, np.column_stack([t, traces.T])))
    else:
        _emit(args, _json_text({"psd": psd.to_dict(), "dt": dt, "master_seed": master,
                                "seeds": seeds, "t": t.tolist(), "traces": traces.tolist()}))
    return EXIT_OK


def cmd_transfer(args) -> int:
    data = _read_mapping(args.config, {"params", "t_f", "dt", "omega_max", "n_points", "method"})
    params = _params_of(data)
    method = data.get("method", "trajectories")
    w_max = _positive(data, "omega_max", 4.0 * params.omega0)
    n = _count(data.get("n_points", 801), "n_points")
    w = np.linspace(0.0, w_max, n)
    if method == "closed-form":
        tf = closed_form_transfer(params, w)
    elif method in ("trajectories", "quadratic"):
        t_f = data.get("t_f")
        dt = data.get("dt")
        t_f = None if t_f is None else _positive(data, "t_f")
        dt = None if dt is None else _positive(data, "dt")
        xp, xm = ideal_trajectories(params, t_f, dt)
        tf = (transfer_from_trajectories(xp, xm, w) if method == "trajectories"
              else quadratic_transfer(params, xp, xm, w))
    else:
        raise ConfigError(f"method must be 'closed-form', 'trajectories' or 'quadratic', got {method!r}")
    vals = np.real(tf.values)
    if args.format == "csv":
        _emit(args, _table_text(["omega", "F"], zip(w, vals)))
    else:
        _emit(args, _json_text({"params": params.to_dict(), "method": method,
                                "provenance": tf.provenance, "omega": w.tolist(), "F": vals.tolist()}))
    return EXIT_OK


def cmd_dephase(args) -> int:
    config = _scenario(args)
    if config.noise_kind == "quadratic":
        raise ConfigError("noise_kind: 'dephase' expects acceleration or magnetic-gradient noise; "
                          "use the 'quadratic' subcommand")
    _emit_scenario(args, *_run(config))
    return EXIT_OK


def cmd_contrast(args) -> int:
    _emit_scenario(args, *_run(_scenario(args)))
    return EXIT_OK


def cmd_quadratic(args) -> int:
    config = _scenario(args)
    if config.noise_kind != "quadratic":
        raise ConfigError(f"noise_kind must be 'quadratic' for this subcommand, got {config.noise_kind!r}")
    _emit_scenario(args, *_run(config))
    return EXIT_OK


_WITNESS_KEYS = {"phi_diff", "sigma_phi_sq", "sigma_alpha_sq", "contrast"}


def cmd_witness(args) -> int:
    if args.config is None:
        raise ConfigError("--config is required for this subcommand")
    raw = _read_mapping(args.config, _WITNESS_KEYS | set(ScenarioConfig.__dataclass_fields__))
    if "noise_kind" in raw:
        config = _scenario(args)
        stats, _ = _run(config)
        rep = witness_report(config.phi_diff, stats["sigma_phi_sq"].mean,
                             contrast=stats["contrast"].mean,
                             contrast_log=stats["contrast_log"].mean)
        extra = {"config": config.to_dict(), "unit_system": unit_system(config.params),
                 "mc_witness": stats["witness"].mean, "mc_witness_stderr": stats["witness"].stderr}
    else:
        bad = set(raw) - _WITNESS_KEYS
        if bad:
            raise ConfigError(f"unknown configuration field(s) {sorted(bad)}")
        try:
            rep = witness_report(float(raw.get("phi_diff", 0.0)), float(raw.get("sigma_phi_sq", 0.0)),
                                 raw.get("sigma_alpha_sq"), raw.get("contrast"))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        extra = {}
    if args.format == "csv":
        rows = [("witness_value", rep.witness_value), ("ideal_value", rep.ideal_value),
                ("delta_w", rep.delta_w)] + sorted(rep.components.items()) + sorted(
                    (k, v) for k, v in extra.items() if isinstance(v, float))
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["name", "value"])
        for k, v in rows:
            w.writerow([k, repr(float(v))])
        _emit(args, buf.getvalue())
    else:
        doc = rep.to_dict()
        doc.update(extra)
        _emit(args, _json_text(doc))
    return EXIT_OK


def cmd_master(args) -> int:
    data = _read_mapping(args.config, {"params", "psd", "lam", "t_f", "dt", "grid_points", "alpha0",
                                       "stride", "hamiltonian"})
    params = _params_of(data)
    psd = _psd_of(data) if "psd" in data else None
    lam = data.get("lam")
    if psd is None and lam is None:
        raise ConfigError("master needs either psd or lam")
    if lam is not None and not (isinstance(lam, (int, float)) and lam >= 0):
        raise ConfigError(f"lam must be a non-negative number, got {lam!r}")
    t_f = _positive(data, "t_f", params.period)
    dt = _positive(data, "dt", 0.01 / params.omega0)
    n = _count(data.get("grid_points", 128), "grid_points")
    stride = _count(data.get("stride", 10), "stride")
    a0 = data.get("alpha0", 0.0)
    alpha0 = complex(a0[0], a0[1]) if isinstance(a0, (list, tuple)) else complex(a0)
    grid = position_grid(params, n)
    rho = coherent_density_matrix(params, grid, alpha0)
    rows = []

    def record(step, t, r):
        pur, ent = purity_and_entropy(r)
        rows.append((t, r.trace(), pur, ent, energy_expectation(params, r)))

    record(0, 0.0, rho)
    master_evolve(params, rho, psd, t_f, dt, lam=lam, hamiltonian=bool(data.get("hamiltonian", True)),
                  callback=record, stride=stride)
    header = ["t", "trace", "purity", "entropy", "energy"]
    if args.format == "csv":
        _emit(args, _table_text(header, rows))
    else:
        used = localisation_rate(params, psd) if lam is None else float(lam)
        cols = {h: [float(r[i]) for r in rows] for i, h in enumerate(header)}
        _emit(args, _json_text({"params": params.to_dict(), "lambda": used, "grid_points": n,
                                "series": cols}))
    return EXIT_OK


def cmd_validate(args) -> int:
    results = run_validation()
    for r in results:
        print(r.line(), file=sys.stderr if args.out is None and args.format == "json" else sys.stdout)
    if args.out is not None or args.format == "json":
        doc = {"checks": [{"name": r.name, "passed": r.passed, "value": r.value,
                           "tolerance": r.tolerance} for r in results]}
        if args.out is not None:
            write_text(args.out, _json_text(doc) if args.format == "json" else
                       "name,passed,value,tolerance\n" + "".join(
                           f"{r.name},{r.passed},{r.value!r},{r.tolerance!r}\n" for r in results))
        else:
            sys.stdout.write(_json_text(doc))
    return EXIT_OK if all(r.passed for r in results) else EXIT_VALIDATE


COMMANDS = {
    "psd": (cmd_psd, "tabulate a power spectral density"),
    "synth": (cmd_synth, "emit synthesized noise traces"),
    "transfer": (cmd_transfer, "emit a transfer function F(w)"),
    "dephase": (cmd_dephase, "Monte Carlo dephasing ensemble with analytic comparison"),
    "contrast": (cmd_contrast, "Monte Carlo contrast ensemble with analytic comparison"),
    "witness": (cmd_witness, "Ramsey witness for given or simulated noise statistics"),
    "master": (cmd_master, "position-basis master-equation run"),
    "quadratic": (cmd_quadratic, "frequency-noise ensemble and contrast estimates"),
    "validate": (cmd_validate, "run the fast invariant suite"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sgdeco", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="YAML or JSON configuration file")
        p.add_argument("--out", help="output path (default: standard output)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--seed", type=int, help="master seed, overriding the configuration")
        p.add_argument("--trials", type=int, help="number of trials, overriding the configuration")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    func = COMMANDS[args.command][0]
    try:
        return func(args)
    except SgdecoError as exc:
        print(f"sgdeco {args.command}: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"sgdeco {args.command}: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    raise SystemExit(main())
