"""Full-duplex wireless-powered network: energy model, throughput-optimal
TDMA time allocation, and seeded Monte-Carlo parameter sweeps."""

from .allocator import (
    AllocationResult,
    KktReport,
    f_eval,
    f_inverse,
    optimize_equal,
    optimize_weighted,
    throughput,
    verify_kkt,
)
from .errors import (
    ConfigError,
    DegenerateLeakageError,
    FdwpcnError,
    InfeasibleCouplingError,
    InvalidAllocationError,
    InvalidProfileError,
    NoEnergyError,
    SingularCouplingError,
)
from .model import (
    ChannelState,
    EnergyCoupling,
    EnergyReport,
    Knowledge,
    SystemConfig,
    UeProfile,
    build_coupling,
    energy_report,
    gamma_coeffs,
    solve_rho,
    solve_system,
)
from .scenario import (
    AlphaSpec,
    ScenarioConfig,
    SweepSpec,
    SweepVariable,
    Topology,
    TrialResult,
    channel_gain,
    rate_region,
    run_trial,
    sample_channels,
    sample_topology,
    sweep,
)

__all__ = [
    "AllocationResult",
    "AlphaSpec",
    "ChannelState",
    "ConfigError",
    "DegenerateLeakageError",
    "EnergyCoupling",
    "EnergyReport",
    "FdwpcnError",
    "InfeasibleCouplingError",
    "InvalidAllocationError",
    "InvalidProfileError",
    "KktReport",
    "Knowledge",
    "NoEnergyError",
    "ScenarioConfig",
    "SingularCouplingError",
    "SweepSpec",
    "SweepVariable",
    "SystemConfig",
    "Topology",
    "TrialResult",
    "UeProfile",
    "build_coupling",
    "channel_gain",
    "energy_report",
    "f_eval",
    "f_inverse",
    "gamma_coeffs",
    "optimize_equal",
    "optimize_weighted",
    "rate_region",
    "run_trial",
    "sample_channels",
    "sample_topology",
    "solve_rho",
    "solve_system",
    "sweep",
    "throughput",
    "verify_kkt",
]

__version__ = "0.1.0"
