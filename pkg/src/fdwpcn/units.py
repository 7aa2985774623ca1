"""dB/dBm unit conversions.

Model and allocator code works exclusively in linear units (watts and
dimensionless power ratios); everything dB-flavoured goes through here.
"""

import math


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def watts_to_dbm(watts: float) -> float:
    return 10.0 * math.log10(watts) + 30.0


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * math.log10(x)


def isolation_db_to_phi(isolation_db: float) -> float:
    """Circulator leakage fraction from transmit/receive isolation in dB."""
    return 10.0 ** (-isolation_db / 10.0)


def sic_gain_db_to_alpha(sic_gain_db: float) -> float:
    """Residual self-interference fraction from cancellation gain in dB.

    ``inf`` means perfect cancellation (alpha = 0).
    """
    if math.isinf(sic_gain_db):
        return 0.0
    return 10.0 ** (-sic_gain_db / 10.0)


def noise_power_watts(density_dbm_per_hz: float, bandwidth_hz: float) -> float:
    """Receiver noise power over a bandwidth from its spectral density."""
    return dbm_to_watts(density_dbm_per_hz) * bandwidth_hz
