"""Exception types shared across the package.

The CLI maps these onto exit codes, so keep the hierarchy flat and the
messages self-contained (they are printed verbatim).
"""


class FdwpcnError(Exception):
    """Base class for all package errors."""


class InvalidProfileError(FdwpcnError, ValueError):
    """A UE profile field is outside its physical range."""


class DegenerateLeakageError(FdwpcnError, ValueError):
    """phi = 1 passed to an operation that divides by (1 - phi)."""


class SingularCouplingError(FdwpcnError, ArithmeticError):
    """Energy-coupling matrix is singular or numerically near-singular."""


class InfeasibleCouplingError(FdwpcnError, ArithmeticError):
    """Energy balance produced a negative uplink-energy coefficient."""


class InvalidAllocationError(FdwpcnError, ValueError):
    """Time allocation incompatible with the energy coefficients."""


class NoEnergyError(FdwpcnError, ValueError):
    """Every UE has a zero SNR coefficient; no meaningful allocation exists."""


class ConfigError(FdwpcnError, ValueError):
    """Run configuration is missing a field or holds an illegal value."""
