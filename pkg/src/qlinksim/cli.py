"""Scenario runner: named experiments driven by key-value config files,
emitting CSV trajectories, per-scenario summary tables and a manifest.

Config values use the units of the literature captions: rates in multiples of
2*pi MHz, times in microseconds (steps in nanoseconds). Conversion to rad/s
and seconds happens in exactly one place. Parsing is strict: unknown keys are
rejected so a mistyped rate cannot silently fall back to a default.

The manifest written next to the outputs is itself a complete config file
with every value resolved; re-running from it reproduces the summary CSVs
byte for byte.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__, dynamics, metrics, network
from .protocols import (
    ConstantSchedule,
    CouplingSchedule,
    StirapSchedule,
    default_stirap_window,
    stirap_grid_search,
)
from .qspace import PureQubitSpec, link_layout, product_state

__all__ = ["ConfigError", "ScenarioConfig", "load_config", "run_scenario", "main", "PRESETS"]

TWO_PI_MHZ = 2.0 * math.pi * 1e6
US = 1e-6
NS = 1e-9

SCENARIOS = (
    "transfer",
    "stirap-compare",
    "chain",
    "sweep-distance",
    "coherent-info",
    "tune-stirap",
)

# Literature parameter sets (g0, kappa, gamma in units of 2*pi MHz).
PRESETS: dict[str, dict[str, float]] = {
    "fig4": {"g0_2pi_mhz": 5.8, "kappa_2pi_mhz": 0.34, "gamma_2pi_mhz": 6.0},
    "fig5-red": {"g0_2pi_mhz": 100.0, "kappa_2pi_mhz": 6.0, "gamma_2pi_mhz": 65.0},
    "fig5-blue": {"g0_2pi_mhz": 38.0, "kappa_2pi_mhz": 1.3, "gamma_2pi_mhz": 96.0},
    "fig5-yellow": {"g0_2pi_mhz": 98.0, "kappa_2pi_mhz": 253.0, "gamma_2pi_mhz": 6.0},
    "fig5-green": {"g0_2pi_mhz": 21.0, "kappa_2pi_mhz": 10.0, "gamma_2pi_mhz": 30.0},
    "fig6a": {"g0_2pi_mhz": 100.0, "kappa_2pi_mhz": 6.0, "gamma_2pi_mhz": 65.0},
}


class ConfigError(ValueError):
    """Malformed or invalid configuration."""


def _fmt(value) -> str:
    """Shortest round-trip text for a config/CSV value."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return ", ".join(_fmt(v) for v in value)
    return str(value)


@dataclass
class ScenarioConfig:
    """Fully resolved scenario settings, still in config units."""

    scenario: str = ""
    preset: str = ""
    # link rates, x 2*pi MHz
    g0_2pi_mhz: float = 5.8
    g0_a_2pi_mhz: float = -1.0  # -1: inherit g0
    g0_b_2pi_mhz: float = -1.0
    kappa_2pi_mhz: float = 0.0
    gamma_2pi_mhz: float = -1.0  # -1: use per-qubit values
    gamma_a_2pi_mhz: float = 0.0
    gamma_b_2pi_mhz: float = 0.0
    omega_q_2pi_mhz: float = 0.0
    omega_w_2pi_mhz: float = 0.0
    # drive schedule ("" = scenario default: stirap for chain, else constant)
    protocol: str = ""
    pulse_width_us: float = -1.0  # -1: from adiabaticity
    t_delay_us: float = -1.0  # -1: delay_ratio * pulse_width
    t_center_us: float = -1.0  # -1: 3 * pulse_width
    adiabaticity: float = 100.0
    delay_ratio: float = 1.2
    # transmitted state (doubles as the fidelity target)
    theta_deg: float = 90.0
    phi_deg: float = 0.0
    # integration
    t_final_us: float = -1.0  # -1: scenario default
    dt_ns: float = -1.0  # -1: resolve-fastest-rate rule
    sample_every: int = -1  # -1: aim for ~1000 stored samples
    mode_dim: int = 2
    # chain / per-hop evolution window (-1: 20 us for chains, the bare
    # transfer time pi/(sqrt(2) g0) for distance sweeps)
    hops: int = 7
    hop_time_us: float = -1.0
    # media sweep
    lengths_km: tuple = (0.001, 0.003, 0.01, 0.03, 0.1, 0.3, 1.0)
    media: tuple = (network.CAVITY, network.CAVITY_PLUS_FIBER)
    base_kappa_2pi_mhz: float = 0.0
    cavity_loss_2pi_mhz_per_km: float = network.DEFAULT_CAVITY_LOSS_PER_M * 1000.0 / TWO_PI_MHZ
    fiber_coupling_2pi_mhz: float = network.DEFAULT_FIBER_COUPLING_KAPPA / TWO_PI_MHZ
    fiber_attenuation_db_per_km: float = network.DEFAULT_FIBER_ATTENUATION_DB_PER_KM
    fiber_refractive_index: float = network.DEFAULT_FIBER_REFRACTIVE_INDEX
    # sampling / tuning
    n_samples: int = 500
    seed: int = 42
    tune_widths_us: tuple = (0.5, 1.0, 2.0)
    tune_delays_us: tuple = (0.6, 1.2, 2.4)
    out_path: str = "qlinksim-out"
    # result keys, written to manifests and ignored on load
    status: str = ""
    failed_at_us: float = -1.0
    error: str = ""
    version: str = ""

    # --- unit conversion -------------------------------------------------
    def g0_a(self) -> float:
        base = self.g0_a_2pi_mhz if self.g0_a_2pi_mhz >= 0 else self.g0_2pi_mhz
        return base * TWO_PI_MHZ

    def g0_b(self) -> float:
        base = self.g0_b_2pi_mhz if self.g0_b_2pi_mhz >= 0 else self.g0_2pi_mhz
        return base * TWO_PI_MHZ

    def gamma_a(self) -> float:
        base = self.gamma_2pi_mhz if self.gamma_2pi_mhz >= 0 else self.gamma_a_2pi_mhz
        return base * TWO_PI_MHZ

    def gamma_b(self) -> float:
        base = self.gamma_2pi_mhz if self.gamma_2pi_mhz >= 0 else self.gamma_b_2pi_mhz
        return base * TWO_PI_MHZ

    def link_params(self) -> dynamics.LinkParams:
        return dynamics.LinkParams(
            g_a=self.g0_a(),
            g_b=self.g0_b(),
            omega_q=self.omega_q_2pi_mhz * TWO_PI_MHZ,
            omega_w=self.omega_w_2pi_mhz * TWO_PI_MHZ,
            kappa=self.kappa_2pi_mhz * TWO_PI_MHZ,
            gamma_a=self.gamma_a(),
            gamma_b=self.gamma_b(),
        )

    def schedule(self) -> CouplingSchedule:
        if self.protocol == "constant":
            return ConstantSchedule(g0_a=self.g0_a(), g0_b=self.g0_b())
        if self.protocol != "stirap":
            raise ConfigError(f"protocol must be 'constant' or 'stirap', got {self.protocol!r}")
        g0 = max(self.g0_a(), self.g0_b())
        if g0 <= 0:
            raise ConfigError("stirap protocol needs a positive coupling amplitude")
        width = self.pulse_width_us * US if self.pulse_width_us > 0 else self.adiabaticity / g0
        delay = self.t_delay_us * US if self.t_delay_us > 0 else self.delay_ratio * width
        center = self.t_center_us * US if self.t_center_us >= 0 else 3.0 * width
        return StirapSchedule(
            g0_a=self.g0_a(), g0_b=self.g0_b(),
            pulse_width=width, t_delay=delay, t_center=center,
        )

    def target(self) -> PureQubitSpec:
        return PureQubitSpec(
            theta=math.radians(self.theta_deg), phi=math.radians(self.phi_deg) % (2 * math.pi)
        )

    def medium(self, kind: str = network.CAVITY, length_m: float = 0.0) -> network.MediumModel:
        return network.MediumModel(
            kind=kind,
            length=length_m,
            base_kappa=self.base_kappa_2pi_mhz * TWO_PI_MHZ,
            cavity_loss_per_m=self.cavity_loss_2pi_mhz_per_km * TWO_PI_MHZ / 1000.0,
            fiber_coupling_kappa=self.fiber_coupling_2pi_mhz * TWO_PI_MHZ,
            fiber_attenuation_db_per_km=self.fiber_attenuation_db_per_km,
            fiber_refractive_index=self.fiber_refractive_index,
        )



# --- config file handling -------------------------------------------------

_INT_KEYS = {"sample_every", "mode_dim", "hops", "n_samples", "seed"}
_STR_KEYS = {"scenario", "preset", "protocol", "out_path", "status", "error", "version"}
_LIST_FLOAT_KEYS = {"lengths_km", "tune_widths_us", "tune_delays_us"}
_LIST_STR_KEYS = {"media"}

_NONNEGATIVE_KEYS = {
    "g0_2pi_mhz", "kappa_2pi_mhz", "omega_q_2pi_mhz", "omega_w_2pi_mhz",
    "gamma_a_2pi_mhz", "gamma_b_2pi_mhz", "adiabaticity", "delay_ratio",
    "base_kappa_2pi_mhz", "cavity_loss_2pi_mhz_per_km", "fiber_coupling_2pi_mhz",
    "fiber_attenuation_db_per_km", "fiber_refractive_index",
}

# Keys where -1 means "apply the documented default"; other negatives are typos.
_SENTINEL_KEYS = {
    "g0_a_2pi_mhz", "g0_b_2pi_mhz", "gamma_2pi_mhz", "pulse_width_us",
    "t_delay_us", "t_center_us", "t_final_us", "dt_ns", "hop_time_us",
}

_KNOWN_KEYS = {f.name for f in fields(ScenarioConfig)}


def _parse_value(key: str, text: str, where: str):
    try:
        if key in _STR_KEYS:
            return text
        if key in _INT_KEYS:
            return int(text)
        if key in _LIST_FLOAT_KEYS:
            return tuple(float(part.strip()) for part in text.split(",") if part.strip())
        if key in _LIST_STR_KEYS:
            return tuple(part.strip() for part in text.split(",") if part.strip())
        return float(text)
    except ValueError as err:
        raise ConfigError(f"{where}: cannot parse {key} = {text!r}: {err}") from None


def parse_config_text(text: str, source: str = "<config>") -> dict:
    """Strictly parse `key = value` lines into a typed dict."""
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        values[key] = _parse_value(key, val, f"{source}:{lineno}")
    return values


def _validate(cfg: ScenarioConfig) -> None:
    if cfg.scenario not in SCENARIOS:
        raise ConfigError(f"scenario must be one of {SCENARIOS}, got {cfg.scenario!r}")
    if cfg.preset and cfg.preset not in PRESETS:
        raise ConfigError(f"unknown preset {cfg.preset!r}; available: {sorted(PRESETS)}")
    for key in _NONNEGATIVE_KEYS:
        value = getattr(cfg, key)
        if not math.isfinite(value) or value < 0:
            raise ConfigError(f"{key} must be finite and >= 0, got {value!r}")
    for key in _SENTINEL_KEYS:
        value = getattr(cfg, key)
        if not math.isfinite(value) or (value < 0 and value != -1.0):
            raise ConfigError(f"{key} must be >= 0 (or -1 for the default), got {value!r}")
    if not 0.0 <= cfg.theta_deg <= 180.0:
        raise ConfigError(f"theta_deg must be in [0, 180], got {cfg.theta_deg!r}")
    if cfg.hops < 1:
        raise ConfigError(f"hops must be >= 1, got {cfg.hops}")
    if cfg.n_samples < 1:
        raise ConfigError(f"n_samples must be >= 1, got {cfg.n_samples}")
    if cfg.seed < 0:
        raise ConfigError(f"seed must be >= 0, got {cfg.seed}")
    if any(length < 0 for length in cfg.lengths_km):
        raise ConfigError("lengths_km entries must be >= 0")
    for kind in cfg.media:
        if kind not in (network.CAVITY, network.FIBER, network.CAVITY_PLUS_FIBER):
            raise ConfigError(f"unknown medium kind {kind!r}")
    if cfg.protocol not in ("", "constant", "stirap"):
        raise ConfigError(f"protocol must be 'constant' or 'stirap', got {cfg.protocol!r}")


def build_config(values: dict, overrides: Optional[dict] = None) -> ScenarioConfig:
    merged = dict(values)
    if overrides:
        merged.update({k: v for k, v in overrides.items() if v is not None})
    preset = merged.get("preset", "")
    if preset:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}; available: {sorted(PRESETS)}")
        for key, value in PRESETS[preset].items():
            merged.setdefault(key, value)
    cfg = ScenarioConfig(**merged)
    _validate(cfg)
    return cfg


def load_config(path, overrides: Optional[dict] = None) -> ScenarioConfig:
    """Parse and validate a config (or manifest) file."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    values = parse_config_text(path.read_text(encoding="utf-8"), source=str(path))
    return build_config(values, overrides)


def _manifest_text(cfg: ScenarioConfig) -> str:
    lines = ["# qlinksim run manifest (loadable as a config file)"]
    for f in fields(ScenarioConfig):
        lines.append(f"{f.name} = {_fmt(getattr(cfg, f.name))}")
    return "\n".join(lines) + "\n"


# --- output helpers ---------------------------------------------------------


def _write_csv(path: Path, header: Sequence[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _trajectory_rows(traj: dynamics.Trajectory):
    n_mediators = traj.populations.shape[1] - 2
    header = ["t_us", "pop_A"]
    header += ["pop_W" if i == 0 else f"pop_W{i + 1}" for i in range(n_mediators)]
    header += ["pop_B", "fidelity", "trace", "purity"]
    fid = traj.fidelity if traj.fidelity is not None else np.full(len(traj.times), np.nan)
    rows = []
    for i, t in enumerate(traj.times):
        row = [float(t / US), float(traj.pop_a[i])]
        row += [float(x) for x in traj.pop_w[i]]
        row += [float(traj.pop_b[i]), float(fid[i]), float(traj.trace[i]), float(traj.purity[i])]
        rows.append(row)
    return header, rows


def _write_trajectory(path: Path, traj: dynamics.Trajectory) -> None:
    header, rows = _trajectory_rows(traj)
    _write_csv(path, header, rows)


# --- scenarios --------------------------------------------------------------


def resolve_defaults(cfg: ScenarioConfig) -> ScenarioConfig:
    """Fill every scenario-dependent default so the manifest echoes real values."""
    if not cfg.protocol:
        cfg = replace(cfg, protocol="stirap" if cfg.scenario == "chain" else "constant")
    if cfg.hop_time_us <= 0 and cfg.scenario in ("chain", "sweep-distance"):
        if cfg.scenario == "chain":
            hop_us = 20.0
        else:
            g0 = max(cfg.g0_a(), cfg.g0_b())
            hop_us = (math.pi / (math.sqrt(2.0) * g0)) / US if g0 > 0 else 1.0
        cfg = replace(cfg, hop_time_us=hop_us)
    if cfg.t_final_us <= 0:
        if cfg.scenario == "transfer":
            cfg = replace(cfg, t_final_us=100.0)
        elif cfg.scenario == "stirap-compare":
            stirap = replace(cfg, protocol="stirap").schedule()
            cfg = replace(cfg, t_final_us=default_stirap_window(stirap)[1] / US)
        elif cfg.scenario == "coherent-info":
            g0 = max(cfg.g0_a(), cfg.g0_b())
            t_us = (8.0 * math.pi / (math.sqrt(2.0) * g0)) / US if g0 > 0 else 1.0
            cfg = replace(cfg, t_final_us=t_us)
        elif cfg.scenario in ("chain", "sweep-distance"):
            cfg = replace(cfg, t_final_us=cfg.hop_time_us)
    if cfg.dt_ns <= 0 and cfg.scenario != "tune-stirap":
        cfg = replace(cfg, dt_ns=dynamics.default_dt(cfg.link_params(), cfg.schedule()) / NS)
    if cfg.sample_every <= 0:
        if cfg.t_final_us > 0 and cfg.dt_ns > 0:
            n_steps = max(1, int(round(cfg.t_final_us * US / (cfg.dt_ns * NS))))
            cfg = replace(cfg, sample_every=max(1, n_steps // 1000))
        else:
            cfg = replace(cfg, sample_every=1)
    return cfg


def _standard_run(cfg: ScenarioConfig, schedule: CouplingSchedule) -> dynamics.Trajectory:
    params = cfg.link_params()
    layout = link_layout(mode_dim=cfg.mode_dim)
    target = cfg.target()
    rho0 = product_state([target] + [None] * (layout.n_sites - 1), layout)
    collapse = dynamics.standard_collapse(params, layout)
    return dynamics.evolve(
        rho0, layout, params, schedule, collapse, (0.0, cfg.t_final_us * US),
        cfg.dt_ns * NS, sample_every=cfg.sample_every, target=target,
    )


def _scenario_transfer(cfg: ScenarioConfig, out: Path) -> list[Path]:
    traj = _standard_run(cfg, cfg.schedule())
    files = [out / "trajectory.csv", out / "summary.csv"]
    _write_trajectory(files[0], traj)
    _write_csv(
        files[1],
        ["final_fidelity", "stabilization_us"],
        [[traj.final_fidelity, traj.stabilization_time() / US]],
    )
    return files


def _scenario_stirap_compare(cfg: ScenarioConfig, out: Path) -> list[Path]:
    stirap = replace(cfg, protocol="stirap").schedule()
    constant = replace(cfg, protocol="constant").schedule()
    _, window_end = default_stirap_window(stirap)

    rows = []
    files = []
    for name, schedule in (("constant", constant), ("stirap", stirap)):
        traj = _standard_run(cfg, schedule)
        path = out / f"trajectory_{name}.csv"
        _write_trajectory(path, traj)
        files.append(path)
        # Latency: a pulsed protocol cannot hand off before its window ends;
        # a constant drive is done once its fidelity settles.
        latency = window_end if name == "stirap" else traj.stabilization_time()
        rows.append([name, traj.final_fidelity, latency / US])
    summary = out / "summary.csv"
    _write_csv(summary, ["protocol", "final_fidelity", "latency_us"], rows)
    files.append(summary)
    return files


def _scenario_chain(cfg: ScenarioConfig, out: Path) -> list[Path]:
    schedule = cfg.schedule()
    link = network.LinkSpec(
        params=cfg.link_params(),
        schedule=schedule,
        hop_time=cfg.hop_time_us * US,
        mode_dim=cfg.mode_dim,
        dt=cfg.dt_ns * NS,
        sample_every=cfg.sample_every,
    )
    result = network.run_chain(cfg.target(), [link] * cfg.hops)
    files = []
    for rec in result.per_hop:
        path = out / f"trajectory_hop{rec.hop_index}.csv"
        _write_trajectory(path, rec.trajectory)
        files.append(path)
    summary = out / "summary.csv"
    _write_csv(
        summary, ["hop", "fidelity"],
        [[rec.hop_index, rec.fidelity] for rec in result.per_hop],
    )
    files.append(summary)
    return files


def _point_name(kind: str, length_m: float) -> str:
    return f"trajectory_{kind.replace('+', '_plus_')}_{length_m / 1000.0:g}km.csv"


def _scenario_sweep_distance(cfg: ScenarioConfig, out: Path) -> list[Path]:
    link = network.LinkSpec(
        params=cfg.link_params(),
        schedule=cfg.schedule(),
        hop_time=cfg.hop_time_us * US,
        medium=cfg.medium(),
        mode_dim=cfg.mode_dim,
        dt=cfg.dt_ns * NS,
        sample_every=cfg.sample_every,
    )
    lengths_m = [lk * 1000.0 for lk in cfg.lengths_km]
    points = network.distance_sweep(link, cfg.media, lengths_m, cfg.target())
    files = []
    rows = []
    for p in points:
        rows.append([p.kind, p.length / 1000.0, math.nan if p.fidelity is None else p.fidelity])
        if p.trajectory is not None:
            path = out / _point_name(p.kind, p.length)
            _write_trajectory(path, p.trajectory)
            files.append(path)
    summary = out / "summary.csv"
    _write_csv(summary, ["kind", "length_km", "fidelity"], rows)
    files.append(summary)
    return files


def _scenario_coherent_info(cfg: ScenarioConfig, out: Path) -> list[Path]:
    params = cfg.link_params()
    schedule = cfg.schedule()
    t_final = cfg.t_final_us * US
    dt = cfg.dt_ns * NS

    probe = metrics.run_channel_probe(
        params, schedule, t_final, dt,
        layout=link_layout(mode_dim=cfg.mode_dim), sample_every=cfg.sample_every,
    )
    curve_rows = []
    for i, t in enumerate(probe.trajectory.times):
        joint = probe.trajectory.states[i]
        curve_rows.append([
            float(t / US),
            metrics.coherent_information(probe, joint),
            metrics.entanglement_fidelity(probe, joint),
        ])
    files = [out / "curve.csv"]
    _write_csv(files[0], ["t_us", "coherent_info_bits", "entanglement_fidelity"], curve_rows)

    traj = _standard_run(cfg, schedule)
    traj_path = out / "trajectory.csv"
    _write_trajectory(traj_path, traj)
    files.append(traj_path)

    run = metrics.make_link_run(params, schedule, t_final, dt, mode_dim=cfg.mode_dim)
    avg = metrics.average_fidelity(run, cfg.n_samples, cfg.seed)
    summary = out / "summary.csv"
    _write_csv(
        summary,
        ["coherent_info_bits", "entanglement_fidelity", "average_fidelity", "stabilization_us"],
        [[
            metrics.coherent_information(probe),
            metrics.entanglement_fidelity(probe),
            avg,
            traj.stabilization_time() / US,
        ]],
    )
    files.append(summary)
    return files


def _scenario_tune_stirap(cfg: ScenarioConfig, out: Path) -> list[Path]:
    params = cfg.link_params()
    records = stirap_grid_search(
        params,
        [w * US for w in cfg.tune_widths_us],
        [d * US for d in cfg.tune_delays_us],
        mode_dim=cfg.mode_dim,
        dt=cfg.dt_ns * NS if cfg.dt_ns > 0 else None,
    )
    best = min(records, key=lambda r: (-r["fidelity"], r["window"], r["pulse_width"]))
    rows = [
        [r["pulse_width"] / US, r["t_delay"] / US, r["fidelity"],
         1 if r is best else 0]
        for r in records
    ]
    summary = out / "summary.csv"
    _write_csv(summary, ["pulse_width_us", "t_delay_us", "fidelity", "best"], rows)
    return [summary]


_SCENARIO_RUNNERS = {
    "transfer": _scenario_transfer,
    "stirap-compare": _scenario_stirap_compare,
    "chain": _scenario_chain,
    "sweep-distance": _scenario_sweep_distance,
    "coherent-info": _scenario_coherent_info,
    "tune-stirap": _scenario_tune_stirap,
}


def run_scenario(cfg: ScenarioConfig, out_dir: Optional[Path] = None) -> int:
    """Execute the configured scenario; returns the process exit status."""
    out = Path(out_dir) if out_dir is not None else Path(cfg.out_path)
    out.mkdir(parents=True, exist_ok=True)
    cfg = replace(cfg, out_path=str(out), version=__version__, status="", error="",
                  failed_at_us=-1.0)
    cfg = resolve_defaults(cfg)
    try:
        written = _SCENARIO_RUNNERS[cfg.scenario](cfg, out)
    except dynamics.IntegrationError as err:
        for path in out.glob("*.csv"):
            path.unlink(missing_ok=True)
        failed = replace(
            cfg,
            status="integration-failure",
            failed_at_us=(err.t / US) if err.t is not None else -1.0,
            error=str(err),
        )
        (out / "manifest.txt").write_text(_manifest_text(failed), encoding="utf-8")
        print(f"error: {err}", file=sys.stderr)
        return 1
    cfg = replace(cfg, status="ok")
    (out / "manifest.txt").write_text(_manifest_text(cfg), encoding="utf-8")
    for path in written:
        print(path)
    return 0


def _print_presets() -> None:
    print(f"{'preset':12s} {'g0 (2pi MHz)':>14s} {'kappa (2pi MHz)':>16s} {'gamma (2pi MHz)':>16s}")
    for name, values in PRESETS.items():
        print(
            f"{name:12s} {values['g0_2pi_mhz']:>14g} "
            f"{values['kappa_2pi_mhz']:>16g} {values['gamma_2pi_mhz']:>16g}"
        )


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="qlinksim",
        description="Simulate mediated qubit-to-qubit state-transfer links.",
    )
    parser.add_argument("scenario", nargs="?", choices=SCENARIOS, help="scenario to run")
    parser.add_argument("--config", help="path to a key-value config file")
    parser.add_argument("--out", help="output directory (default: out_path from config)")
    parser.add_argument("--preset", help="named parameter preset, see --list-presets")
    parser.add_argument("--seed", type=int, help="seed for the sampling generator")
    parser.add_argument("--list-presets", action="store_true", help="print preset table and exit")
    args = parser.parse_args(argv)

    if args.list_presets:
        _print_presets()
        return 0

    overrides = {
        "scenario": args.scenario,
        "preset": args.preset,
        "seed": args.seed,
        "out_path": args.out,
    }
    try:
        if args.config:
            cfg = load_config(args.config, overrides)
        else:
            cfg = build_config({}, overrides)
        if not cfg.scenario:
            parser.error("scenario is required (positional argument or config key)")
        return run_scenario(cfg)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
