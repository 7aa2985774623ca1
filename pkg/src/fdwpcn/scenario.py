"""Random network instances and seeded Monte-Carlo sweeps.

UEs are dropped uniformly by area on an annulus around the AP, channel
power gains follow a 30 dB reference loss at 1 m with a power-law
pathloss and unit-mean exponential (Rayleigh power) fading, and each
trial solves the energy model in both knowledge modes and maximises the
sum-throughput.

Determinism contract: every trial draws from its own generator seeded as
``seed XOR trial_index``, so per-trial results do not depend on
execution order and sweeps are reproducible bit-for-bit at any level of
parallelism.  A trial whose fading draw yields an inconsistent energy
balance (pathologically strong inter-UE coupling) is resampled from the
same per-trial stream and counted.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from . import units
from .allocator import optimize_equal, optimize_weighted, throughput
from .errors import InfeasibleCouplingError, SingularCouplingError
from .model import (
    ChannelState,
    Knowledge,
    SystemConfig,
    UeProfile,
    solve_system,
)

log = logging.getLogger(__name__)

INNER_RADIUS_M = 2.5
OUTER_RADIUS_M = 5.0
REFERENCE_LOSS = 1e-3  # 30 dB attenuation at 1 m

_SEED_MASK = (1 << 64) - 1
_MAX_RESAMPLES = 100


@dataclass(frozen=True, eq=False)
class Topology:
    """UE drop with the AP at the origin (meters)."""

    positions: np.ndarray  # (K, 2)
    d_ap: np.ndarray  # (K,) AP-UE distances
    d_inter: np.ndarray  # (K, K) UE-UE distances, zero diagonal


def sample_topology(k: int, rng: np.random.Generator) -> Topology:
    """Drop k UEs uniformly by area on the annulus around the AP.

    Radius is sqrt(U * (R_out^2 - R_in^2) + R_in^2) with uniform angle,
    which makes the density uniform per unit area.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    u = rng.uniform(size=k)
    radius = np.sqrt(u * (OUTER_RADIUS_M**2 - INNER_RADIUS_M**2)
                     + INNER_RADIUS_M**2)
    angle = rng.uniform(0.0, 2.0 * np.pi, size=k)
    positions = np.column_stack((radius * np.cos(angle),
                                 radius * np.sin(angle)))
    diff = positions[:, None, :] - positions[None, :, :]
    return Topology(
        positions=positions,
        d_ap=radius,
        d_inter=np.sqrt((diff**2).sum(axis=-1)),
    )


def channel_gain(
    d: float,
    delta: float,
    rng: np.random.Generator | None = None,
) -> float:
    """One channel power gain nu * 1e-3 * d^-delta.

    nu ~ Exp(1) models Rayleigh power fading; pass rng=None to disable
    fading (nu = 1).
    """
    if d <= 0:
        raise ValueError(f"distance d={d!r} must be > 0")
    nu = rng.exponential() if rng is not None else 1.0
    return nu * REFERENCE_LOSS * d ** (-delta)


def sample_channels(
    topology: Topology,
    delta: float,
    rng: np.random.Generator | None = None,
) -> ChannelState:
    """Channel gains for every link of a topology, faded i.i.d.

    Draw order (fixed for reproducibility): AP links first, then the
    upper triangle of the inter-UE links row by row.
    """
    k = topology.d_ap.shape[0]
    nu_ap = rng.exponential(size=k) if rng is not None else np.ones(k)
    h_ap = nu_ap * REFERENCE_LOSS * topology.d_ap ** (-delta)

    h_inter = np.zeros((k, k))
    iu = np.triu_indices(k, 1)
    n_pairs = iu[0].size
    if n_pairs:
        nu = rng.exponential(size=n_pairs) if rng is not None \
            else np.ones(n_pairs)
        gains = nu * REFERENCE_LOSS * topology.d_inter[iu] ** (-delta)
        h_inter[iu] = gains
        h_inter = h_inter + h_inter.T
    return ChannelState(h_ap=h_ap, h_inter=h_inter)


@dataclass(frozen=True)
class AlphaSpec:
    """Residual self-interference, absolute or relative to the
    noise-to-power ratio beta = sigma0^2 / p0."""

    value: float
    relative_to_beta: bool = False

    def resolve(self, p0: float, sigma0_sq: float) -> float:
        if self.relative_to_beta:
            return self.value * sigma0_sq / p0
        return self.value


@dataclass(frozen=True)
class ScenarioConfig:
    """Template for one Monte-Carlo network instance (linear units)."""

    k: int
    p0: float
    sigma0_sq: float
    cap_gamma: float
    alpha: AlphaSpec
    phi: float
    theta: float
    pathloss_exp: float = 2.0

    def profiles(self) -> list[UeProfile]:
        # theta carried by the harvester efficiency; PA reuse set to 1
        return [UeProfile(phi=self.phi, zeta=self.theta, eta=1.0)
                for _ in range(self.k)]

    def system(self, knowledge: Knowledge) -> SystemConfig:
        return SystemConfig(
            p0=self.p0,
            sigma0_sq=self.sigma0_sq,
            alpha=self.alpha.resolve(self.p0, self.sigma0_sq),
            cap_gamma=self.cap_gamma,
            knowledge=knowledge,
        )


def _sum_throughput(config: ScenarioConfig, channels: ChannelState,
                    knowledge: Knowledge) -> float:
    coupling = solve_system(config.profiles(), channels,
                            config.system(knowledge))
    gamma = coupling.gamma
    if not (gamma > 0).any():
        return 0.0
    return float(optimize_equal(gamma).rates.sum())


def run_trial(
    config: ScenarioConfig,
    rng: np.random.Generator,
    channels: ChannelState | None = None,
) -> tuple[float, float, int]:
    """One Monte-Carlo trial: max sum-throughput in both knowledge modes.

    Returns (practical, genie, resamples).  Hand-set ``channels`` bypass
    topology and fading (no resampling in that case).  phi = 1 leaks the
    whole PA output, so nothing is ever transmitted and both objectives
    are exactly zero.
    """
    if config.phi >= 1.0:
        return 0.0, 0.0, 0
    resamples = 0
    while True:
        ch = channels if channels is not None else sample_channels(
            sample_topology(config.k, rng), config.pathloss_exp, rng)
        try:
            practical = _sum_throughput(config, ch, Knowledge.PRACTICAL)
            genie = _sum_throughput(config, ch, Knowledge.GENIE)
            return practical, genie, resamples
        except (InfeasibleCouplingError, SingularCouplingError):
            if channels is not None:
                raise
            resamples += 1
            log.debug("resampling infeasible trial (%d so far)", resamples)
            if resamples > _MAX_RESAMPLES:
                raise


class SweepVariable(Enum):
    P0_DBM = "p0_dbm"
    SIC_GAIN_DB = "sic_gain_db"
    ISOLATION_DB = "isolation_db"
    WEIGHTS = "weights"


@dataclass(frozen=True)
class SweepSpec:
    """One Monte-Carlo sweep: a grid over one variable (dB/dBm units),
    a trial count, and a 64-bit seed."""

    variable: SweepVariable
    grid: tuple[float, ...]
    trials: int
    seed: int
    base: ScenarioConfig

    def __post_init__(self) -> None:
        if len(self.grid) == 0:
            raise ValueError("sweep grid must be non-empty")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")


@dataclass(eq=False)
class TrialResult:
    """Raw per-trial sum-throughputs plus aggregates for one sweep."""

    variable: SweepVariable
    grid: tuple[float, ...]
    seed: int
    practical: np.ndarray  # (G, trials)
    genie: np.ndarray  # (G, trials)
    resampled: np.ndarray  # (G,)

    @property
    def trials(self) -> int:
        return self.practical.shape[1]

    @property
    def mean_practical(self) -> np.ndarray:
        return self.practical.mean(axis=1)

    @property
    def mean_genie(self) -> np.ndarray:
        return self.genie.mean(axis=1)

    @property
    def se_practical(self) -> np.ndarray:
        return _standard_error(self.practical)

    @property
    def se_genie(self) -> np.ndarray:
        return _standard_error(self.genie)


def _standard_error(values: np.ndarray) -> np.ndarray:
    n = values.shape[1]
    if n < 2:
        return np.zeros(values.shape[0])
    return values.std(axis=1, ddof=1) / np.sqrt(n)


def apply_grid_value(base: ScenarioConfig, variable: SweepVariable,
                     value: float) -> ScenarioConfig:
    """Override the swept parameter of a scenario template."""
    if variable is SweepVariable.P0_DBM:
        return replace(base, p0=units.dbm_to_watts(value))
    if variable is SweepVariable.SIC_GAIN_DB:
        return replace(base, alpha=AlphaSpec(units.sic_gain_db_to_alpha(value)))
    if variable is SweepVariable.ISOLATION_DB:
        return replace(base, phi=units.isolation_db_to_phi(value))
    raise ValueError(f"{variable} is not a scalar sweep; use rate_region")


def _trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng((seed ^ trial) & _SEED_MASK)


def _grid_point(spec: SweepSpec, value: float) -> tuple[np.ndarray,
                                                        np.ndarray, int]:
    config = apply_grid_value(spec.base, spec.variable, value)
    practical = np.empty(spec.trials)
    genie = np.empty(spec.trials)
    resampled = 0
    for t in range(spec.trials):
        p, g, r = run_trial(config, _trial_rng(spec.seed, t))
        practical[t] = p
        genie[t] = g
        resampled += r
    return practical, genie, resampled


def sweep(spec: SweepSpec, workers: int = 1) -> TrialResult:
    """Run the sweep; grid points may be computed in parallel.

    The result is identical for any ``workers`` value because trials are
    seeded individually and aggregated in grid order.
    """
    n = len(spec.grid)
    practical = np.empty((n, spec.trials))
    genie = np.empty((n, spec.trials))
    resampled = np.zeros(n, dtype=int)
    if workers > 1 and n > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_grid_point, [spec] * n, spec.grid))
    else:
        rows = [_grid_point(spec, value) for value in spec.grid]
    for i, (p_row, g_row, r) in enumerate(rows):
        practical[i] = p_row
        genie[i] = g_row
        resampled[i] = r
    return TrialResult(
        variable=spec.variable,
        grid=spec.grid,
        seed=spec.seed,
        practical=practical,
        genie=genie,
        resampled=resampled,
    )


def rate_region(
    profiles: list[UeProfile],
    channels: ChannelState,
    config: SystemConfig,
    weight_grid: np.ndarray,
) -> np.ndarray:
    """Pareto boundary of the two-UE rate region.

    For each w in the grid solve the weighted problem with weights
    (w, 1 - w); the endpoints give the whole block to a single UE.
    Returns an array of (R_1, R_2) rows.
    """
    if channels.k != 2 or len(profiles) != 2:
        raise ValueError("rate_region requires exactly two UEs")
    coupling = solve_system(profiles, channels, config)
    gamma = coupling.gamma
    points = np.empty((len(weight_grid), 2))
    for i, w1 in enumerate(weight_grid):
        if not (0.0 <= w1 <= 1.0):
            raise ValueError(f"weight {w1!r} outside [0, 1]")
        if w1 == 0.0:
            tau = np.array([0.0, 1.0])
        elif w1 == 1.0:
            tau = np.array([1.0, 0.0])
        else:
            tau = optimize_weighted(gamma, np.array([w1, 1.0 - w1])).tau
        points[i] = throughput(tau, gamma)
    return points
