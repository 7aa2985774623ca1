"""Command-line front end: config parsing, unit conversion, CSV output.

All dB/dBm handling lives at this layer; the model and allocator see
linear units only.  Config values resolve with the precedence
defaults < config file < environment (FDWPCN_*) < command-line flags.

Exit codes: 0 success, 2 config error, 3 model infeasibility, 4 I/O.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys
from dataclasses import dataclass, fields
from typing import Iterable, Sequence, TextIO

import numpy as np

from . import units
from .allocator import optimize_equal, optimize_weighted, verify_kkt
from .errors import ConfigError, FdwpcnError
from .model import ChannelState, Knowledge, SystemConfig, UeProfile, solve_system
from .scenario import (
    AlphaSpec,
    ScenarioConfig,
    SweepSpec,
    SweepVariable,
    rate_region,
    sample_channels,
    sample_topology,
    sweep,
)

ENV_PREFIX = "FDWPCN_"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_MODEL = 3
EXIT_IO = 4


@dataclass(frozen=True)
class RunConfig:
    """Validated run parameters; dB/dBm keys carry their unit in the name."""

    k: int = 10
    p0_dbm: float = 30.0
    noise_dbm_per_hz: float = -160.0
    bandwidth_hz: float = 1e6
    gamma_db: float = 9.8
    alpha_mode: str = "beta"  # "absolute" | "beta"
    alpha_value: float = 0.01
    isolation_db: float = 15.0
    theta: float = 0.5
    weights: tuple[float, ...] | str = "equal"
    knowledge: str = "both"  # "genie" | "practical" | "both"
    seed: int = 12345
    trials: int = 1000
    pathloss_exp: float = 2.0

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ConfigError(f"k={self.k} must be an integer >= 1")
        if self.bandwidth_hz <= 0:
            raise ConfigError(f"bandwidth_hz={self.bandwidth_hz} must be > 0")
        if self.trials < 1:
            raise ConfigError(f"trials={self.trials} must be >= 1")
        if self.gamma_db < 0:
            raise ConfigError(f"gamma_db={self.gamma_db} must be >= 0")
        if self.isolation_db < 0:
            raise ConfigError(
                f"isolation_db={self.isolation_db} must be >= 0"
            )
        if not (0.0 <= self.theta <= 1.0):
            raise ConfigError(f"theta={self.theta} must be in [0, 1]")
        if self.alpha_mode not in ("absolute", "beta"):
            raise ConfigError(
                f"alpha_mode={self.alpha_mode!r} must be 'absolute' or 'beta'"
            )
        if self.alpha_value < 0:
            raise ConfigError(f"alpha_value={self.alpha_value} must be >= 0")
        if self.knowledge not in ("genie", "practical", "both"):
            raise ConfigError(
                f"knowledge={self.knowledge!r} must be "
                "'genie', 'practical' or 'both'"
            )
        if isinstance(self.weights, str):
            if self.weights != "equal":
                raise ConfigError(
                    f"weights={self.weights!r} must be 'equal' or a "
                    "comma-separated list of positive reals"
                )
        else:
            if len(self.weights) == 0 or any(w <= 0 for w in self.weights):
                raise ConfigError("weights must all be > 0")
        if self.pathloss_exp <= 0:
            raise ConfigError(
                f"pathloss_exp={self.pathloss_exp} must be > 0"
            )

    # -- derived linear-unit quantities -------------------------------
    def p0_watts(self) -> float:
        return units.dbm_to_watts(self.p0_dbm)

    def sigma0_sq(self) -> float:
        return units.noise_power_watts(self.noise_dbm_per_hz,
                                       self.bandwidth_hz)

    def cap_gamma(self) -> float:
        return units.db_to_linear(self.gamma_db)

    def phi(self) -> float:
        return units.isolation_db_to_phi(self.isolation_db)

    def alpha_spec(self) -> AlphaSpec:
        return AlphaSpec(self.alpha_value,
                         relative_to_beta=(self.alpha_mode == "beta"))

    def scenario(self) -> ScenarioConfig:
        return ScenarioConfig(
            k=self.k,
            p0=self.p0_watts(),
            sigma0_sq=self.sigma0_sq(),
            cap_gamma=self.cap_gamma(),
            alpha=self.alpha_spec(),
            phi=self.phi(),
            theta=self.theta,
            pathloss_exp=self.pathloss_exp,
        )

    def single_knowledge(self) -> Knowledge:
        if self.knowledge == "both":
            raise ConfigError(
                "knowledge='both' is ambiguous here; "
                "set knowledge=genie or knowledge=practical"
            )
        return Knowledge(self.knowledge)


_INT_KEYS = {"k", "seed", "trials"}
_STR_KEYS = {"alpha_mode", "knowledge"}


def _coerce(key: str, raw: str):
    raw = raw.strip()
    if key in _INT_KEYS:
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(f"{key}={raw!r} must be an integer") from None
    if key in _STR_KEYS:
        return raw
    if key == "weights":
        return _parse_weights(raw)
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"{key}={raw!r} must be a real number") from None


def _parse_weights(raw: str) -> tuple[float, ...] | str:
    raw = raw.strip()
    if raw == "equal":
        return "equal"
    try:
        return tuple(float(x) for x in raw.split(","))
    except ValueError:
        raise ConfigError(
            f"weights={raw!r} must be 'equal' or comma-separated reals"
        ) from None


def _read_config_file(path: str) -> dict:
    values: dict = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    known = {f.name for f in fields(RunConfig)}
    for lineno, line in enumerate(lines, 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(
                f"{path}:{lineno}: expected 'key = value', got {stripped!r}"
            )
        key, _, raw = stripped.partition("=")
        key = key.strip()
        if key not in known:
            raise ConfigError(
                f"{path}:{lineno}: unknown key {key!r} "
                f"(known keys: {', '.join(sorted(known))})"
            )
        values[key] = _coerce(key, raw)
    return values


def _env_overrides(environ) -> dict:
    values = {}
    for f in fields(RunConfig):
        raw = environ.get(ENV_PREFIX + f.name.upper())
        if raw is not None:
            values[f.name] = _coerce(f.name, raw)
    return values


def parse_config(
    path: str | None = None,
    overrides: dict | None = None,
    environ=None,
) -> RunConfig:
    """Resolve a RunConfig from file, environment and explicit overrides."""
    values: dict = {}
    if path is not None:
        values.update(_read_config_file(path))
    values.update(_env_overrides(environ if environ is not None
                                 else os.environ))
    if overrides:
        values.update({k: v for k, v in overrides.items() if v is not None})
    return RunConfig(**values)


def serialize_config(config: RunConfig) -> str:
    """Flat key = value text; parse_config inverts it exactly."""
    lines = []
    for f in fields(RunConfig):
        value = getattr(config, f.name)
        if isinstance(value, tuple):
            text = ",".join(repr(w) for w in value)
        elif isinstance(value, float):
            text = repr(value)
        else:
            text = str(value)
        lines.append(f"{f.name} = {text}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------
# CSV output
# ---------------------------------------------------------------------

def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.17g}"


def _write_csv(out: TextIO, header: Sequence[str],
               rows: Iterable[Sequence]) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])


def _parse_grid(text: str) -> tuple[float, ...]:
    """Grid syntax: 'start:stop:step' (inclusive) or comma list; 'inf' ok."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"grid {text!r} must be start:stop:step")
        try:
            start, stop, step = (float(p) for p in parts)
        except ValueError:
            raise ConfigError(f"grid {text!r} has non-numeric parts") from None
        if step <= 0 or stop < start:
            raise ConfigError(f"grid {text!r} needs step > 0 and stop >= start")
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        return tuple(start + i * step for i in range(n))
    try:
        return tuple(float(p) for p in text.split(","))
    except ValueError:
        raise ConfigError(f"grid {text!r} must be numbers or start:stop:step") from None


def _parse_float_list(text: str, flag: str) -> tuple[float, ...]:
    try:
        return tuple(float(p) for p in text.split(","))
    except ValueError:
        raise ConfigError(f"{flag}={text!r} must be comma-separated reals") from None


def _inter_matrix(k: int, upper: tuple[float, ...] | None) -> np.ndarray:
    h = np.zeros((k, k))
    if upper is None:
        return h
    expected = k * (k - 1) // 2
    if len(upper) != expected:
        raise ConfigError(
            f"--gains-inter needs {expected} upper-triangle values for k={k}, "
            f"got {len(upper)}"
        )
    h[np.triu_indices(k, 1)] = upper
    return h + h.T


# ---------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------

def _rate_scale(config: RunConfig, scale_bandwidth: bool) -> float:
    # bits/s/Hz by default; Mbit/s when scaled by the bandwidth
    return config.bandwidth_hz / 1e6 if scale_bandwidth else 1.0


def _cmd_optimize(config: RunConfig, args, out: TextIO) -> None:
    knowledge = config.single_knowledge()
    if args.gains_ap is not None:
        h_ap = np.array(_parse_float_list(args.gains_ap, "--gains-ap"))
        k = h_ap.size
        inter = None
        if args.gains_inter is not None:
            inter = _parse_float_list(args.gains_inter, "--gains-inter")
        channels = ChannelState(h_ap=h_ap, h_inter=_inter_matrix(k, inter))
    else:
        k = config.k
        rng = np.random.default_rng(config.seed & ((1 << 64) - 1))
        channels = sample_channels(sample_topology(k, rng),
                                   config.pathloss_exp, rng)

    profiles = [UeProfile(phi=config.phi(), zeta=config.theta, eta=1.0)
                for _ in range(k)]
    system = SystemConfig(
        p0=config.p0_watts(),
        sigma0_sq=config.sigma0_sq(),
        alpha=config.alpha_spec().resolve(config.p0_watts(),
                                          config.sigma0_sq()),
        cap_gamma=config.cap_gamma(),
        knowledge=knowledge,
    )
    coupling = solve_system(profiles, channels, system)
    gamma = coupling.gamma

    if config.weights == "equal":
        result = optimize_equal(gamma)
        weights = np.full(k, 1.0 / k)
    else:
        weights = np.array(config.weights)
        if weights.size != k:
            raise ConfigError(
                f"weights has {weights.size} entries but k={k}"
            )
        result = optimize_weighted(gamma, weights)
    report = verify_kkt(result, gamma, weights)

    p_tx = np.zeros(k)
    active = result.tau > 0
    p_tx[active] = coupling.rho[active] * system.p0 / result.tau[active]
    scale = _rate_scale(config, args.scale_bandwidth)

    header = ["ue", "tau", "p_tx", "rate",
              "kkt_sum_tau_residual", "kkt_stationarity_residual"]
    rows = [
        (i + 1, result.tau[i], p_tx[i], result.rates[i] * scale,
         report.sum_tau_residual, report.stationarity_residual)
        for i in range(k)
    ]
    _write_csv(out, header, rows)


def _cmd_rate_region(config: RunConfig, args, out: TextIO) -> None:
    knowledge = config.single_knowledge()
    h_ap = np.array(_parse_float_list(args.gains_ap, "--gains-ap"))
    if h_ap.size != 2:
        raise ConfigError("rate-region needs exactly two --gains-ap values")
    h12 = float(args.gain_inter)
    channels = ChannelState(h_ap=h_ap,
                            h_inter=np.array([[0.0, h12], [h12, 0.0]]))
    profiles = [UeProfile(phi=config.phi(), zeta=config.theta, eta=1.0)
                for _ in range(2)]
    p0 = config.p0_watts()
    s0 = config.sigma0_sq()

    if args.alpha_beta:
        alphas = [AlphaSpec(m, relative_to_beta=True).resolve(p0, s0)
                  for m in args.alpha_beta]
    else:
        alphas = [config.alpha_spec().resolve(p0, s0)]

    if args.weight_points < 2:
        raise ConfigError("--weight-points must be >= 2")
    weight_grid = np.linspace(0.0, 1.0, args.weight_points)
    scale = _rate_scale(config, args.scale_bandwidth)

    rows = []
    for alpha in alphas:
        system = SystemConfig(p0=p0, sigma0_sq=s0, alpha=alpha,
                              cap_gamma=config.cap_gamma(),
                              knowledge=knowledge)
        points = rate_region(profiles, channels, system, weight_grid)
        for w1, (r1, r2) in zip(weight_grid, points):
            rows.append((w1, 1.0 - w1, r1 * scale, r2 * scale, alpha))
    _write_csv(out, ["omega_1", "omega_2", "rate_1", "rate_2", "alpha"], rows)


_SWEEP_DEFAULT_GRIDS = {
    SweepVariable.P0_DBM: "10:40:2",
    SweepVariable.SIC_GAIN_DB: "80:140:5",
    SweepVariable.ISOLATION_DB: "0:20:1",
}


def _cmd_sweep(config: RunConfig, args, out: TextIO,
               variable: SweepVariable) -> None:
    grid_text = args.grid or _SWEEP_DEFAULT_GRIDS[variable]
    spec = SweepSpec(
        variable=variable,
        grid=_parse_grid(grid_text),
        trials=config.trials,
        seed=config.seed,
        base=config.scenario(),
    )
    result = sweep(spec, workers=args.workers)
    scale = _rate_scale(config, args.scale_bandwidth)
    header = [variable.value, "mean_practical", "se_practical",
              "mean_genie", "se_genie", "trials", "seed"]
    rows = [
        (g,
         result.mean_practical[i] * scale, result.se_practical[i] * scale,
         result.mean_genie[i] * scale, result.se_genie[i] * scale,
         result.trials, result.seed)
        for i, g in enumerate(result.grid)
    ]
    _write_csv(out, header, rows)


# ---------------------------------------------------------------------
# Argument parsing and dispatch
# ---------------------------------------------------------------------

def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="PATH",
                        help="flat key = value config file")
    parser.add_argument("--output", metavar="PATH",
                        help="write CSV here instead of stdout")
    for f in fields(RunConfig):
        flag = "--" + f.name.replace("_", "-")
        parser.add_argument(flag, dest=f.name, default=None, metavar="V")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fdwpcn",
        description="Full-duplex WPCN throughput model and sweeps",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_opt = sub.add_parser("optimize",
                           help="solve one instance, print per-UE allocation")
    p_opt.add_argument("--gains-ap", metavar="LIST",
                       help="hand-set AP-UE gains (comma list, linear)")
    p_opt.add_argument("--gains-inter", metavar="LIST",
                       help="hand-set inter-UE gains, upper triangle row-major")

    p_reg = sub.add_parser("rate-region",
                           help="trace the two-UE rate-region boundary")
    p_reg.add_argument("--gains-ap", metavar="LIST", default="0.5,0.15")
    p_reg.add_argument("--gain-inter", type=float, default=0.01, metavar="G")
    p_reg.add_argument("--weight-points", type=int, default=101, metavar="N")
    p_reg.add_argument("--alpha-beta", type=float, action="append",
                       metavar="MULT",
                       help="residual-SI multiple of beta; repeatable")

    p_p0 = sub.add_parser("sweep-p0", help="sum-throughput vs AP power (dBm)")
    p_sic = sub.add_parser("sweep-sic", help="sum-throughput vs SIC gain (dB)")
    p_phi = sub.add_parser("sweep-phi",
                           help="sum-throughput vs circulator isolation (dB)")
    for p in (p_p0, p_sic, p_phi):
        p.add_argument("--grid", metavar="GRID",
                       help="start:stop:step or comma list")
        p.add_argument("--workers", type=int, default=1, metavar="N")

    for p in (p_opt, p_reg, p_p0, p_sic, p_phi):
        p.add_argument("--scale-bandwidth", action="store_true",
                       help="emit Mbit/s instead of bits/s/Hz")
        _add_config_flags(p)
    return parser


def _config_from_args(args) -> RunConfig:
    overrides = {}
    for f in fields(RunConfig):
        raw = getattr(args, f.name, None)
        if raw is not None:
            overrides[f.name] = _coerce(f.name, raw)
    return parse_config(path=args.config, overrides=overrides)


_COMMANDS = {
    "optimize": _cmd_optimize,
    "rate-region": _cmd_rate_region,
    "sweep-p0": lambda c, a, o: _cmd_sweep(c, a, o, SweepVariable.P0_DBM),
    "sweep-sic": lambda c, a, o: _cmd_sweep(c, a, o, SweepVariable.SIC_GAIN_DB),
    "sweep-phi": lambda c, a, o: _cmd_sweep(c, a, o, SweepVariable.ISOLATION_DB),
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        config = _config_from_args(args)
        run = _COMMANDS[args.command]
        if args.output:
            with open(args.output, "w", encoding="utf-8", newline="") as fh:
                run(config, args, fh)
        else:
            run(config, args, sys.stdout)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FdwpcnError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MODEL
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def entry() -> None:
    sys.exit(main())
