"""Command-line front end.

Subcommands: ``design``, ``threshold``, ``simulate``, ``baseline``, ``sweep``.
Scenario values come from built-in defaults, then an optional ``--config``
file (``key = value`` lines, or a JSON sweep sidecar), then command-line
flags. Exit codes: 0 success, 1 configuration error, 2 infeasible design.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import asdict
from pathlib import Path

from .design import Scheme, ast_design, nast_design, on_off_threshold, overall_aea
from .errors import ConfigError, InsufficientTransmissionsError, NegativeInputError, ToleranceNotMetError
from .experiment import AXES, ExperimentSpec, format_value, parse_values, preset_specs, run_sweep
from .model import SystemConfig, db_to_linear, rate_to_threshold
from .montecarlo import McConfig, simulate_overall_aea, simulate_pt, simulate_sop
from .reliability import solve_threshold, transmission_probability
from .sop import _overall_sop, ecsi_baseline, sop_given_aea

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_INFEASIBLE = 2

DEFAULTS = {
    "n_antennas": None,
    "p_max_db": 10.0,
    "sigma_e_sq": 0.0,
    "delta": 0.9,
    "beta_m": 1.0,
    "samples": 10**6,
    "seed": 0,
    "workers": 1,
    "antithetic": False,
}

# config-file keys and the converter applied to their text
_FILE_KEYS = {
    "n_antennas": int,
    "p_max_db": float,
    "p_max": float,
    "sigma_e_sq": float,
    "delta": float,
    "beta_m": float,
    "r_m": float,
    "scheme": str,
    "sweep_axis": str,
    "sweep_values": str,
    "outputs": str,
    "samples": int,
    "seed": int,
    "workers": int,
    "antithetic": lambda s: s.strip().lower() in ("1", "true", "yes", "on"),
    "out": str,
}
_ALIASES = {"n": "n_antennas", "pmax_db": "p_max_db", "pmax": "p_max", "axis": "sweep_axis", "values": "sweep_values"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def read_config_file(path: str) -> dict:
    """Parse a ``key = value`` file (``#`` comments) into a flat dict."""
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        return {"__spec__": json.loads(text)}
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        key = _ALIASES.get(key.lower().replace("-", "_"), key.lower().replace("-", "_"))
        if key not in _FILE_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            out[key] = _FILE_KEYS[key](value)
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {value!r}") from exc
    return out


def _add_scenario(p: argparse.ArgumentParser, need_mc: bool = False):
    p.add_argument("--config", help="key = value file (or JSON sweep sidecar)")
    p.add_argument("-N", "--n-antennas", type=int, dest="n_antennas")
    power = p.add_mutually_exclusive_group()
    power.add_argument("--pmax-db", type=float, dest="p_max_db", help="power budget in dB (linear 10**(x/10))")
    power.add_argument("--pmax", type=float, dest="p_max", help="power budget, linear")
    p.add_argument("--sigma-e-sq", type=float, dest="sigma_e_sq", help="Eve noise power (default 0)")
    p.add_argument("--delta", type=float, help="minimum transmission probability")
    rate = p.add_mutually_exclusive_group()
    rate.add_argument("--beta-m", type=float, dest="beta_m", help="secrecy SINR floor")
    rate.add_argument("--r-m", type=float, dest="r_m", help="secrecy rate floor in bits")
    p.add_argument("--json", action="store_true", help="print machine-readable JSON")
    if need_mc:
        p.add_argument("--samples", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--workers", type=int)
        p.add_argument("--antithetic", action="store_true", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="aeasec", description="ECSI-free secure transmission design")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("design", help="closed-form AEA-maximizing design")
    _add_scenario(p)
    p.add_argument("--scheme", choices=["nast", "ast"], help="default nast")
    p.add_argument("--gain", type=float, help="AST: channel gain ||h_b||^2 of one realization")
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("threshold", help="on-off threshold meeting the delay constraint")
    _add_scenario(p)
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("simulate", help="Monte Carlo estimates through the full signal model")
    _add_scenario(p, need_mc=True)
    p.add_argument("--scheme", choices=["nast", "ast", "both"], help="default both")
    p.add_argument(
        "--quantity", action="append", choices=["sop", "pt", "aea"],
        help="repeatable; default sop",
    )
    p.add_argument("--out", help="write results as CSV")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("baseline", help="ECSI-based exhaustive SOP minimization")
    _add_scenario(p)
    p.add_argument("--scheme", choices=["nast", "ast"], help="default nast")
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("sweep", help="parameter sweep to CSV plus JSON sidecar")
    _add_scenario(p, need_mc=True)
    p.add_argument("--scheme", choices=["nast", "ast", "both"])
    p.add_argument("--axis", dest="sweep_axis", choices=AXES)
    p.add_argument("--values", dest="sweep_values", help="comma list or start:stop:step")
    p.add_argument("--outputs", help="comma list from aea,sop_analytic,sop_empirical,pt,baseline_sop")
    p.add_argument("--out", help="CSV path (sidecar written to <out>.json)")
    p.add_argument("--preset", choices=["antennas", "power"], help="write a predefined sweep pair")
    p.add_argument("--out-dir", default=".", help="directory for --preset outputs")
    p.set_defaults(func=cmd_sweep)
    return parser


def _merged(args) -> dict:
    vals = dict(DEFAULTS)
    if getattr(args, "config", None):
        try:
            vals.update(read_config_file(args.config))
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
    for k, v in vars(args).items():
        if v is not None and k not in ("func", "command", "config"):
            vals[k] = v
    # flags replace their file counterparts, including the alternate spelling
    if getattr(args, "p_max_db", None) is not None:
        vals.pop("p_max", None)
    if getattr(args, "p_max", None) is not None:
        vals.pop("p_max_db", None)
    if getattr(args, "beta_m", None) is not None:
        vals.pop("r_m", None)
    if getattr(args, "r_m", None) is not None:
        vals.pop("beta_m", None)
    return vals


def _system_config(vals: dict) -> SystemConfig:
    if vals.get("n_antennas") is None:
        raise ConfigError("number of antennas (-N) is required")
    p_max = vals["p_max"] if vals.get("p_max") is not None else db_to_linear(vals["p_max_db"])
    beta_m = rate_to_threshold(vals["r_m"]) if vals.get("r_m") is not None else vals["beta_m"]
    return SystemConfig(
        n_antennas=vals["n_antennas"], p_max=p_max, sigma_e_sq=vals["sigma_e_sq"],
        delta=vals["delta"], beta_m=beta_m,
    )


def _mc_config(vals: dict) -> McConfig:
    return McConfig(
        samples=vals["samples"], seed=vals["seed"], workers=vals["workers"],
        antithetic=bool(vals["antithetic"]),
    )


def _emit(result: dict, as_json: bool):
    if as_json:
        print(json.dumps(result, indent=2, sort_keys=False))
        return
    width = max(len(k) for k in result)
    for k, v in result.items():
        text = format_value(v) if isinstance(v, (int, float)) and not isinstance(v, bool) else str(v)
        print(f"{k:<{width}}  {text}")


def cmd_design(args) -> int:
    vals = _merged(args)
    config = _system_config(vals)
    scheme = Scheme.parse(vals.get("scheme") or "nast")
    nast = nast_design(config)
    mu = nast.params.mu
    if scheme is Scheme.AST and vals.get("gain") is not None:
        design = ast_design(config, vals["gain"], mu=mu)
        params, aea = design.params, design.aea
        feasible = config.p_max * vals["gain"] > config.beta_m
        p_so = sop_given_aea(config.n_antennas, aea, params.phi, params.p_total, config.sigma_e_sq)
    else:
        params, aea, feasible = nast.params, nast.aea, nast.feasible
        if scheme is Scheme.AST:
            aea = overall_aea(config, scheme).value
        p_so = _overall_sop(config, scheme)[0]
    result = {
        "scheme": scheme.value,
        "n_antennas": config.n_antennas,
        "p_max": config.p_max,
        "mu": mu,
        "pt": transmission_probability(config.n_antennas, mu),
        "phi": params.phi,
        "p_total": params.p_total,
        "beta_t": params.beta_t,
        "beta_s": params.beta_s,
        "beta_e": params.beta_e,
        "aea": aea,
        "sop_analytic": p_so,
        "feasible": feasible,
    }
    if scheme is Scheme.AST and vals.get("gain") is None:
        result["note"] = "phi/beta_t shown for the threshold realization; aea and sop are overall averages"
    _emit(result, args.json)
    if not feasible:
        print(
            f"infeasible: P_max*mu = {config.p_max * mu:.6g} does not exceed beta_m = {config.beta_m:.6g}",
            file=sys.stderr,
        )
        return EXIT_INFEASIBLE
    return EXIT_OK


def cmd_threshold(args) -> int:
    vals = _merged(args)
    if vals.get("n_antennas") is None:
        raise ConfigError("number of antennas (-N) is required")
    sol = solve_threshold(vals["n_antennas"], vals["delta"], vals["tol"])
    _emit({"n_antennas": vals["n_antennas"], "delta": vals["delta"], **asdict(sol)}, args.json)
    return EXIT_OK


SIMULATE_COLUMNS = ["quantity", "scheme", "estimate", "std_error", "analytic", "samples_used", "samples_drawn", "seed"]


def simulate_rows(config: SystemConfig, schemes, quantities, mc: McConfig) -> list[dict]:
    """Monte Carlo estimates next to their analytic counterparts."""
    rows = []
    mu = on_off_threshold(config)
    for q in quantities:
        if q == "pt":
            rep = simulate_pt(config, mu, mc)
            rows.append({"quantity": "pt", "scheme": "-", "rep": rep,
                         "analytic": transmission_probability(config.n_antennas, mu)})
            continue
        for s in schemes:
            if q == "sop":
                rep = simulate_sop(config, s, mc)
                analytic = _overall_sop(config, s)[0]
            else:
                rep = simulate_overall_aea(config, s, mc)
                analytic = overall_aea(config, s).value
            rows.append({"quantity": q, "scheme": s.value, "rep": rep, "analytic": analytic})
    return rows


def cmd_simulate(args) -> int:
    vals = _merged(args)
    config = _system_config(vals)
    mc = _mc_config(vals)
    scheme = vals.get("scheme") or "both"
    schemes = (Scheme.NAST, Scheme.AST) if scheme == "both" else (Scheme.parse(scheme),)
    if not nast_design(config).feasible:
        print("infeasible configuration: P_max*mu <= beta_m", file=sys.stderr)
        return EXIT_INFEASIBLE
    quantities = vals.get("quantity") or ["sop"]
    rows = simulate_rows(config, schemes, quantities, mc)
    table = [
        [r["quantity"], r["scheme"], format_value(r["rep"].estimate), format_value(r["rep"].std_error),
         format_value(r["analytic"]), str(r["rep"].samples_used), str(r["rep"].samples_drawn),
         str(r["rep"].seed)]
        for r in rows
    ]
    if vals.get("out"):
        with open(vals["out"], "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(SIMULATE_COLUMNS)
            writer.writerows(table)
    if args.json:
        print(json.dumps([dict(zip(SIMULATE_COLUMNS, t)) for t in table], indent=2))
    else:
        print(",".join(SIMULATE_COLUMNS))
        for t in table:
            print(",".join(t))
    return EXIT_OK


def cmd_baseline(args) -> int:
    vals = _merged(args)
    config = _system_config(vals)
    scheme = Scheme.parse(vals.get("scheme") or "nast")
    base = ecsi_baseline(config, scheme)
    aea_sop = _overall_sop(config, scheme)[0]
    feasible = base.method != "infeasible"
    result = {
        "scheme": scheme.value,
        "baseline_phi": base.params.phi,
        "baseline_sop": base.p_so,
        "aea_design_sop": aea_sop,
        "relative_gap": (aea_sop - base.p_so) / base.p_so if base.p_so > 0 else math.nan,
        "search_resolution": base.search_resolution,
        "method": base.method,
        "feasible": feasible,
    }
    _emit(result, args.json)
    return EXIT_OK if feasible else EXIT_INFEASIBLE


def _sweep_spec(vals: dict, args) -> ExperimentSpec:
    if "__spec__" in vals:
        data = dict(vals["__spec__"])
        if args.out:
            data["out_path"] = args.out
        if args.workers:
            data["mc"] = {**data.get("mc", {}), "workers": args.workers}
        return ExperimentSpec.from_dict(data)
    axis = vals.get("sweep_axis")
    if axis is None:
        raise ConfigError("--axis is required")
    if vals.get("sweep_values") is None:
        raise ConfigError("--values is required")
    if axis == "n_antennas" and vals.get("n_antennas") is None:
        vals["n_antennas"] = 1
    base = _system_config(vals)
    outputs = tuple(s.strip() for s in (vals.get("outputs") or "aea,sop_analytic").split(",") if s.strip())
    return ExperimentSpec(
        base=base,
        sweep_axis=axis,
        sweep_values=parse_values(vals["sweep_values"], integer=axis == "n_antennas"),
        scheme=vals.get("scheme") or "both",
        outputs=outputs,
        mc=_mc_config(vals),
        out_path=vals.get("out") or "sweep.csv",
    )


def cmd_sweep(args) -> int:
    vals = _merged(args)
    if vals.get("preset"):
        specs = preset_specs(vals["preset"], args.out_dir, _mc_config(vals), sigma_e_sq=args.sigma_e_sq)
    else:
        specs = [_sweep_spec(vals, args)]
    for spec in specs:
        try:
            run_sweep(spec)
        except OSError as exc:
            raise ConfigError(f"cannot write {spec.out_path}: {exc}") from exc
        print(spec.out_path)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, NegativeInputError, ToleranceNotMetError, InsufficientTransmissionsError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
