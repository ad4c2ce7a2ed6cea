"""Parameter sweeps producing CSV tables plus a JSON provenance sidecar."""
from __future__ import annotations

import csv
import json
import math
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

from .design import Scheme, nast_design, overall_aea
from .errors import ConfigError, InsufficientTransmissionsError
from .model import SystemConfig, db_to_linear
from .montecarlo import McConfig, simulate_sop
from .reliability import transmission_probability
from .sop import ecsi_baseline, overall_sop

__all__ = [
    "AXES",
    "QUANTITIES",
    "ExperimentSpec",
    "SweepRow",
    "columns",
    "evaluate_point",
    "run_sweep",
    "format_value",
    "parse_values",
    "preset_specs",
]

AXES = ("n_antennas", "delta", "p_max_db", "beta_m")
QUANTITIES = ("aea", "sop_analytic", "sop_empirical", "pt", "baseline_sop")
SCHEMES = ("nast", "ast", "both")


@dataclass(frozen=True)
class ExperimentSpec:
    base: SystemConfig
    sweep_axis: str
    sweep_values: tuple
    scheme: str = "both"
    outputs: tuple = ("aea", "sop_analytic")
    mc: McConfig = field(default_factory=McConfig)
    out_path: str = "sweep.csv"

    def __post_init__(self):
        if self.sweep_axis not in AXES:
            raise ConfigError(f"sweep_axis must be one of {AXES}, got {self.sweep_axis!r}")
        if self.scheme not in SCHEMES:
            raise ConfigError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if not self.sweep_values:
            raise ConfigError("sweep_values must not be empty")
        if not self.outputs:
            raise ConfigError("outputs must not be empty")
        bad = [q for q in self.outputs if q not in QUANTITIES]
        if bad:
            raise ConfigError(f"unknown outputs {bad}; choose from {QUANTITIES}")
        # canonical order and no duplicates keeps the column set a pure function of the request
        object.__setattr__(self, "outputs", tuple(q for q in QUANTITIES if q in self.outputs))
        values = tuple(int(v) if self.sweep_axis == "n_antennas" else float(v) for v in self.sweep_values)
        if self.sweep_axis == "n_antennas" and any(v != float(w) for v, w in zip(values, self.sweep_values)):
            raise ConfigError("n_antennas sweep values must be integers")
        object.__setattr__(self, "sweep_values", values)
        for v in values:
            if self.point_config(v).beta_m <= 0:
                raise ConfigError("beta_m must be > 0")

    @property
    def schemes(self) -> tuple[Scheme, ...]:
        if self.scheme == "both":
            return (Scheme.NAST, Scheme.AST)
        return (Scheme(self.scheme),)

    def point_config(self, value) -> SystemConfig:
        if self.sweep_axis == "p_max_db":
            return self.base.replace(p_max=db_to_linear(value))
        return self.base.replace(**{self.sweep_axis: value})

    def to_dict(self) -> dict:
        b = self.base
        return {
            "base": {
                "n_antennas": b.n_antennas,
                "p_max": b.p_max,
                "sigma_e_sq": b.sigma_e_sq,
                "delta": b.delta,
                "beta_m": b.beta_m,
            },
            "sweep_axis": self.sweep_axis,
            "sweep_values": list(self.sweep_values),
            "scheme": self.scheme,
            "outputs": list(self.outputs),
            "mc": {
                "samples": self.mc.samples,
                "seed": self.mc.seed,
                "workers": self.mc.workers,
                "antithetic": self.mc.antithetic,
            },
            "out_path": self.out_path,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentSpec":
        try:
            return cls(
                base=SystemConfig(**data["base"]),
                sweep_axis=data["sweep_axis"],
                sweep_values=tuple(data["sweep_values"]),
                scheme=data.get("scheme", "both"),
                outputs=tuple(data.get("outputs", ("aea", "sop_analytic"))),
                mc=McConfig(**data.get("mc", {})),
                out_path=data.get("out_path", "sweep.csv"),
            )
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"malformed experiment spec: {exc}") from exc


@dataclass
class SweepRow:
    axis_value: float
    feasible: bool
    values: dict

    def as_list(self, cols: list[str]) -> list[str]:
        out = [format_value(self.axis_value), "1" if self.feasible else "0"]
        out.extend(format_value(self.values[c]) for c in cols[2:])
        return out


def format_value(x) -> str:
    if isinstance(x, (bool,)):
        return "1" if x else "0"
    if isinstance(x, int):
        return str(x)
    x = float(x)
    if math.isnan(x):
        return "nan"
    return f"{x:.17g}"


def columns(spec: ExperimentSpec) -> list[str]:
    cols = [spec.sweep_axis, "feasible"]
    if "pt" in spec.outputs:
        cols.append("pt")
    for s in spec.schemes:
        for q in spec.outputs:
            if q == "pt":
                continue
            cols.append(f"{s.value}_{q}")
            if q == "sop_empirical":
                cols.append(f"{s.value}_sop_empirical_se")
    return cols


def evaluate_point(spec: ExperimentSpec, index: int, value) -> SweepRow:
    """All requested quantities at one sweep value."""
    config = spec.point_config(value)
    design = nast_design(config)
    vals: dict = {}
    if "pt" in spec.outputs:
        vals["pt"] = transmission_probability(config.n_antennas, design.params.mu)
    for s in spec.schemes:
        key = s.value
        if "aea" in spec.outputs:
            vals[f"{key}_aea"] = overall_aea(config, s).value
        if "sop_analytic" in spec.outputs:
            vals[f"{key}_sop_analytic"] = overall_sop(config, s)
        if "sop_empirical" in spec.outputs:
            est = se = math.nan
            if design.feasible:
                mc = replace(spec.mc, workers=1)
                try:
                    rep = simulate_sop(config, s, mc, stream=index)
                    est, se = rep.estimate, rep.std_error
                except InsufficientTransmissionsError:
                    pass
            vals[f"{key}_sop_empirical"] = est
            vals[f"{key}_sop_empirical_se"] = se
        if "baseline_sop" in spec.outputs:
            vals[f"{key}_baseline_sop"] = ecsi_baseline(config, s).p_so
    return SweepRow(value, design.feasible, vals)


def run_sweep(spec: ExperimentSpec, out_path: str | os.PathLike | None = None) -> list[SweepRow]:
    """Evaluate every sweep point and write the CSV and ``<csv>.json`` sidecar.

    Rows appear in sweep order whatever the worker count. Nothing is left on
    disk if evaluation or writing fails.
    """
    path = Path(out_path if out_path is not None else spec.out_path)
    points = list(enumerate(spec.sweep_values))
    if spec.mc.workers > 1 and len(points) > 1:
        with ThreadPoolExecutor(max_workers=spec.mc.workers) as pool:
            rows = list(pool.map(lambda iv: evaluate_point(spec, *iv), points))
    else:
        rows = [evaluate_point(spec, i, v) for i, v in points]

    cols = columns(spec)
    sidecar = path.with_name(path.name + ".json")
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(cols)
            for row in rows:
                writer.writerow(row.as_list(cols))
        os.replace(tmp, path)
        with open(sidecar, "w") as fh:
            json.dump(spec.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
    except BaseException:
        for p in (tmp, path, sidecar):
            try:
                os.unlink(p)
            except FileNotFoundError:
                pass
        raise
    return rows


def parse_values(text: str, integer: bool = False) -> tuple:
    """``"2,3,4"`` or an inclusive range ``"start:stop:step"``."""
    text = text.strip()
    if not text:
        raise ConfigError("empty sweep values")
    try:
        if ":" in text:
            parts = [float(x) for x in text.split(":")]
            if len(parts) != 3 or parts[2] <= 0:
                raise ConfigError(f"range must be start:stop:step with step > 0, got {text!r}")
            start, stop, step = parts
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            vals = [start + k * step for k in range(max(count, 0))]
        else:
            vals = [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise ConfigError(f"cannot parse sweep values {text!r}") from exc
    if not vals:
        raise ConfigError("empty sweep values")
    if integer:
        if any(v != int(v) for v in vals):
            raise ConfigError(f"integer sweep values required, got {text!r}")
        return tuple(int(v) for v in vals)
    return tuple(vals)


def preset_specs(name: str, out_dir: str | os.PathLike, mc: McConfig, sigma_e_sq: float | None = None):
    """Predefined sweep pairs.

    ``antennas``: AEA and SOP against N = 2..8 for delta in {0.5, 0.9}.
    ``power``: SOP of the AEA design and of the ECSI-based baseline against
    P_max in 0..40 dB for N in {2, 4}.
    """
    out_dir = Path(out_dir)
    if name == "antennas":
        s2 = 1.0 if sigma_e_sq is None else sigma_e_sq
        outputs = ("aea", "sop_analytic", "sop_empirical", "pt")
        return [
            ExperimentSpec(
                base=SystemConfig(2, db_to_linear(10.0), s2, delta, 1.0),
                sweep_axis="n_antennas",
                sweep_values=tuple(range(2, 9)),
                scheme="both",
                outputs=outputs,
                mc=mc,
                out_path=str(out_dir / f"antennas_delta{delta:g}.csv"),
            )
            for delta in (0.5, 0.9)
        ]
    if name == "power":
        s2 = 1.0 if sigma_e_sq is None else sigma_e_sq
        return [
            ExperimentSpec(
                base=SystemConfig(n, 1.0, s2, 0.9, 1.0),
                sweep_axis="p_max_db",
                sweep_values=tuple(float(x) for x in range(0, 41, 2)),
                scheme="both",
                outputs=("sop_analytic", "baseline_sop"),
                mc=mc,
                out_path=str(out_dir / f"power_N{n}.csv"),
            )
            for n in (2, 4)
        ]
    raise ConfigError(f"unknown preset {name!r}; expected 'antennas' or 'power'")
