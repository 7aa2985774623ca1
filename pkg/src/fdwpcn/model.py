"""Energy model of a full-duplex wireless-powered network.

One hybrid access point (AP) broadcasts an energy signal with constant
power ``p0`` for a whole block while K full-duplex UEs take TDMA turns
transmitting uplink information.  Each UE harvests energy from the AP
signal, from the circulator leakage of its own transmission (fraction
``phi`` of the PA output), and - if the AP knows the inter-UE channels -
from the other UEs' uplink transmissions.

In steady state the per-UE energy balance is linear in the products
``tau_i * P_i`` (slot length times uplink transmit power), so the whole
network reduces to one K-by-K linear system ``A x = p0 * b`` whose
solution ``rho = A^-1 b`` gives ``tau_i * P_i = rho_i * p0`` independent
of the time allocation.  ``gamma_i = rho_i * H_ap_i * p0 / (Gamma *
(sigma0^2 + alpha * p0))`` is then the effective SNR coefficient seen by
the allocator.

The block duration is normalised to 1, so energies and powers coincide
numerically.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import (
    DegenerateLeakageError,
    InfeasibleCouplingError,
    InvalidAllocationError,
    InvalidProfileError,
    SingularCouplingError,
)

# Reciprocal-condition threshold below which the coupling matrix is
# treated as singular.  Physical instances have a unit-scale diagonal and
# tiny off-diagonal coupling, so anything near this limit is garbage.
RCOND_LIMIT = 1e-12

# Relative residual allowed on A @ rho = b after the linear solve.
RESIDUAL_LIMIT = 1e-10


class Knowledge(Enum):
    """Channel knowledge available to the AP.

    GENIE: inter-UE channel gains known, full coupling matrix.
    PRACTICAL: only AP-UE gains known, inter-UE harvesting ignored
    (diagonal coupling matrix).
    """

    GENIE = "genie"
    PRACTICAL = "practical"


@dataclass(frozen=True)
class UeProfile:
    """Per-UE energy-path parameters, all dimensionless fractions.

    phi: circulator leakage - share of PA output energy that leaks into
        the UE's own receive chain (and is harvested there).
    zeta: RF-to-DC energy-harvesting efficiency.
    eta: share of the harvested energy spent on PA output per block.
    """

    phi: float
    zeta: float
    eta: float

    def __post_init__(self) -> None:
        for name in ("phi", "zeta", "eta"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0) or not np.isfinite(v):
                raise InvalidProfileError(
                    f"{name}={v!r} outside [0, 1]"
                )

    @property
    def theta(self) -> float:
        """Combined harvest-and-reuse efficiency eta * zeta."""
        return self.eta * self.zeta


@dataclass(frozen=True, eq=False)
class ChannelState:
    """Channel power gains (linear) for one fading realisation.

    h_ap: length-K gains between the AP and each UE (reciprocal, used
        for both the energy downlink and the information uplink).
    h_inter: K-by-K symmetric inter-UE gains; the diagonal is unused
        (a UE's self-interference path is implied by phi, not a channel
        gain) and stored as zero.
    """

    h_ap: np.ndarray
    h_inter: np.ndarray

    def __post_init__(self) -> None:
        h_ap = np.asarray(self.h_ap, dtype=float)
        h_inter = np.asarray(self.h_inter, dtype=float).copy()
        if h_ap.ndim != 1 or h_inter.shape != (h_ap.shape[0],) * 2:
            raise ValueError(
                f"shape mismatch: h_ap {h_ap.shape}, h_inter {h_inter.shape}"
            )
        np.fill_diagonal(h_inter, 0.0)
        if (h_ap < 0).any() or (h_inter < 0).any():
            raise ValueError("channel power gains must be non-negative")
        if not np.array_equal(h_inter, h_inter.T):
            raise ValueError("h_inter must be symmetric (channel reciprocity)")
        object.__setattr__(self, "h_ap", h_ap)
        object.__setattr__(self, "h_inter", h_inter)

    @property
    def k(self) -> int:
        return self.h_ap.shape[0]


@dataclass(frozen=True)
class SystemConfig:
    """Network-level constants, all in linear units.

    p0: AP transmit power (W).
    sigma0_sq: receiver noise power at the AP (W).
    alpha: residual self-interference at the AP as a fraction of p0.
    cap_gamma: SINR gap of the modulation/coding in use (>= 1).
    knowledge: channel knowledge mode, selects the coupling structure.
    """

    p0: float
    sigma0_sq: float
    alpha: float
    cap_gamma: float
    knowledge: Knowledge = Knowledge.PRACTICAL

    def __post_init__(self) -> None:
        if not (self.p0 > 0):
            raise ValueError(f"p0={self.p0!r} must be > 0")
        if not (self.sigma0_sq > 0):
            raise ValueError(f"sigma0_sq={self.sigma0_sq!r} must be > 0")
        if not (self.alpha >= 0):
            raise ValueError(f"alpha={self.alpha!r} must be >= 0")
        if not (self.cap_gamma >= 1):
            raise ValueError(f"cap_gamma={self.cap_gamma!r} must be >= 1")


@dataclass(eq=False)
class EnergyCoupling:
    """Linear system of the per-UE energy balances and its solution.

    ``a_matrix @ rho = b_vector`` where ``rho_i * p0`` is UE i's uplink
    energy per block.  ``rho`` and ``gamma`` are filled in by
    :func:`solve_rho` / :func:`gamma_coeffs` (or :func:`solve_system`).
    """

    a_matrix: np.ndarray
    b_vector: np.ndarray
    knowledge: Knowledge
    rho: np.ndarray | None = None
    gamma: np.ndarray | None = None


@dataclass(eq=False)
class EnergyReport:
    """Per-UE energy bookkeeping for one block (T = 1).

    e_pa = e_leak + e_tx holds exactly by construction; e_pa equals
    eta * e_harvested, and tau_i * p_tx_i = e_tx_i.
    """

    e_harvested: np.ndarray
    e_pa: np.ndarray
    e_leak: np.ndarray
    e_tx: np.ndarray
    p_tx: np.ndarray


def _theta_phi(profiles: list[UeProfile]) -> tuple[np.ndarray, np.ndarray]:
    theta = np.array([p.theta for p in profiles])
    phi = np.array([p.phi for p in profiles])
    return theta, phi


def _assemble(
    theta: np.ndarray,
    phi: np.ndarray,
    channels: ChannelState,
    knowledge: Knowledge,
    degenerate: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Build (A, b).  Rows flagged ``degenerate`` (phi = 1) become unit
    rows with b = 0, which pins rho to 0 there without touching the
    other equations (those UEs transmit nothing)."""
    k = theta.shape[0]
    live = ~degenerate
    diag = np.ones(k)
    diag[live] = (1.0 - theta[live] * phi[live]) / (1.0 - phi[live])
    if knowledge is Knowledge.GENIE:
        a = -theta[:, None] * channels.h_inter
        a[degenerate, :] = 0.0
        a[np.diag_indices(k)] = diag
    else:
        a = np.diag(diag)
    b = theta * channels.h_ap
    b[degenerate] = 0.0
    return a, b


def build_coupling(
    profiles: list[UeProfile],
    channels: ChannelState,
    config: SystemConfig,
) -> EnergyCoupling:
    """Assemble the energy-coupling system A, b for UEs with phi < 1.

    Raises DegenerateLeakageError if any UE has phi = 1 (its balance
    divides by 1 - phi; use :func:`solve_system`, which special-cases
    full leakage as rho = gamma = 0).
    """
    k = len(profiles)
    if k < 1:
        raise ValueError("at least one UE required")
    if channels.k != k:
        raise ValueError(f"{k} profiles but channels for {channels.k} UEs")
    theta, phi = _theta_phi(profiles)
    if (phi >= 1.0).any():
        raise DegenerateLeakageError(
            "phi = 1 (full circulator leakage) has no finite energy balance"
        )
    a, b = _assemble(theta, phi, channels, config.knowledge,
                     np.zeros(k, dtype=bool))
    return EnergyCoupling(a_matrix=a, b_vector=b, knowledge=config.knowledge)


def solve_rho(coupling: EnergyCoupling) -> np.ndarray:
    """Solve A rho = b for the uplink-energy coefficients.

    Practical mode uses the diagonal closed form; genie mode solves the
    dense system and rejects ill-conditioned or physically inconsistent
    (negative rho) instances.
    """
    a, b = coupling.a_matrix, coupling.b_vector
    if coupling.knowledge is Knowledge.PRACTICAL:
        rho = b / np.diagonal(a)
    else:
        rcond = _reciprocal_cond(a)
        if not np.isfinite(rcond) or rcond < RCOND_LIMIT:
            raise SingularCouplingError(
                f"coupling matrix near-singular (rcond={rcond:.3e})"
            )
        rho = np.linalg.solve(a, b)
        residual = np.abs(a @ rho - b)
        scale = max(float(np.abs(b).max()), 1e-300)
        if residual.max() > RESIDUAL_LIMIT * scale:
            raise SingularCouplingError(
                f"linear solve residual {residual.max():.3e} above tolerance"
            )
    if (rho < 0).any():
        raise InfeasibleCouplingError(
            "negative uplink-energy coefficient: inter-UE coupling too "
            f"strong for a consistent energy balance (rho={rho})"
        )
    coupling.rho = rho
    return rho


def _reciprocal_cond(a: np.ndarray) -> float:
    try:
        c = np.linalg.cond(a, 1)
    except np.linalg.LinAlgError:
        return 0.0
    if not np.isfinite(c) or c == 0.0:
        return 0.0
    return 1.0 / c


def gamma_coeffs(
    rho: np.ndarray,
    channels: ChannelState,
    config: SystemConfig,
    profiles: list[UeProfile] | None = None,
) -> np.ndarray:
    """Effective SNR coefficients at the AP.

    gamma_i = rho_i * H_ap_i * p0 / (cap_gamma * (sigma0^2 + alpha*p0)).
    A UE with phi = 1 gets gamma = 0 (all PA output leaks, nothing is
    transmitted); pass ``profiles`` to apply that rule explicitly.
    """
    rho = np.asarray(rho, dtype=float)
    if (rho < 0).any():
        raise ValueError("rho must be non-negative")
    denom = config.cap_gamma * (config.sigma0_sq + config.alpha * config.p0)
    gamma = rho * channels.h_ap * config.p0 / denom
    if profiles is not None:
        _, phi = _theta_phi(profiles)
        gamma = np.where(phi >= 1.0, 0.0, gamma)
    return gamma


def solve_system(
    profiles: list[UeProfile],
    channels: ChannelState,
    config: SystemConfig,
) -> EnergyCoupling:
    """Full pipeline: assemble, solve rho, attach gamma.

    Unlike :func:`build_coupling` this accepts UEs with phi = 1: their
    balance rows are replaced by identity rows (rho = 0), which is
    exactly equivalent to removing them from the system.
    """
    k = len(profiles)
    if k < 1:
        raise ValueError("at least one UE required")
    if channels.k != k:
        raise ValueError(f"{k} profiles but channels for {channels.k} UEs")
    theta, phi = _theta_phi(profiles)
    degenerate = phi >= 1.0
    a, b = _assemble(theta, phi, channels, config.knowledge, degenerate)
    coupling = EnergyCoupling(a_matrix=a, b_vector=b,
                              knowledge=config.knowledge)
    rho = solve_rho(coupling)
    coupling.gamma = gamma_coeffs(rho, channels, config, profiles)
    return coupling


def energy_report(
    rho: np.ndarray,
    tau: np.ndarray,
    profiles: list[UeProfile],
    channels: ChannelState,
    config: SystemConfig,
) -> EnergyReport:
    """Trace rho and a time allocation back through the energy chain.

    p_tx_i = rho_i * p0 / tau_i, and the chain
    e_tx -> e_pa = e_tx / (1 - phi) -> e_harvested = e_pa / eta
    reconstructs every stage of the transceiver energy budget.
    """
    rho = np.asarray(rho, dtype=float)
    tau = np.asarray(tau, dtype=float)
    k = len(profiles)
    if rho.shape != (k,) or tau.shape != (k,) or channels.k != k:
        raise ValueError("rho, tau, profiles and channels must agree on K")
    if (tau < 0).any() or tau.sum() > 1.0 + 1e-12:
        raise InvalidAllocationError(f"tau={tau} is not a feasible allocation")
    if ((tau == 0) & (rho > 0)).any():
        raise InvalidAllocationError(
            "tau = 0 for a UE with positive uplink energy"
        )
    phi = np.array([p.phi for p in profiles])
    eta = np.array([p.eta for p in profiles])

    p_tx = np.zeros(k)
    active = tau > 0
    p_tx[active] = rho[active] * config.p0 / tau[active]
    e_tx = tau * p_tx
    if ((phi >= 1.0) & (e_tx > 0)).any():
        raise DegenerateLeakageError(
            "UE with phi = 1 cannot have transmitted energy"
        )
    with np.errstate(divide="ignore", invalid="ignore"):
        e_leak = np.where(phi < 1.0, e_tx * phi / (1.0 - phi), 0.0)
    e_pa = e_tx + e_leak  # the split identity holds exactly by construction
    e_harvested = np.where(eta > 0, e_pa / np.where(eta > 0, eta, 1.0), 0.0)
    return EnergyReport(
        e_harvested=e_harvested,
        e_pa=e_pa,
        e_leak=e_leak,
        e_tx=e_tx,
        p_tx=p_tx,
    )
