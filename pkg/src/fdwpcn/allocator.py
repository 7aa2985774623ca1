"""Weighted sum-throughput maximisation over TDMA slot lengths.

Given effective SNR coefficients ``gamma_i`` the uplink rate of UE i is
``R_i = tau_i * log2(1 + gamma_i / tau_i)``, concave in ``tau``, and the
slot lengths share one block: ``sum(tau) <= 1``.  At the optimum the
budget binds and every active UE satisfies the stationarity condition
``omega_i * f(gamma_i / tau_i) = lambda * ln 2`` with
``f(z) = ln(1 + z) - z / (1 + z)``, which is strictly increasing from
f(0) = 0.  The solver therefore runs an outer bisection on the dual
variable lambda: for a candidate lambda each UE's ``z_i`` comes from
inverting f, and the total time demand ``g(lambda) = sum(gamma_i / z_i)``
is strictly decreasing in lambda, so the budget ``g(lambda) = 1`` pins
lambda down.  Equal weights admit the closed form
``tau_i = gamma_i / sum(gamma)``.

Everything here is a pure function of its arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NoEnergyError

LN2 = math.log(2.0)

# |f(z) - c| <= F_INVERSE_TOL * max(1, c) on the returned z.
F_INVERSE_TOL = 1e-13

# |g(lambda) - 1| target for the outer bisection; the budget residual
# |sum(tau) - 1| of the returned allocation equals this by construction.
TIME_BUDGET_TOL = 1e-11

_MAX_ITER = 200


@dataclass(eq=False)
class AllocationResult:
    """Optimal slot allocation and solver diagnostics.

    tau sums to 1 whenever some gamma_i > 0, tau_i = 0 exactly for
    gamma_i = 0, and z_i = gamma_i / tau_i for active UEs (for inactive
    UEs z_i keeps the dual-consistent value, so the stationarity
    identity omega_i * f(z_i) = lambda_star * ln 2 holds for every UE).
    """

    tau: np.ndarray
    lambda_star: float
    z: np.ndarray
    rates: np.ndarray
    objective: float
    iterations: int


@dataclass(frozen=True)
class KktReport:
    """Optimality residuals of an allocation (diagnostic, never raises)."""

    sum_tau_residual: float
    stationarity_residual: float
    min_tau: float

    TOLERANCE = 1e-8

    @property
    def ok(self) -> bool:
        return (
            self.sum_tau_residual <= self.TOLERANCE
            and self.stationarity_residual <= self.TOLERANCE
            and self.min_tau >= 0.0
        )


def f_eval(z: float) -> float:
    """f(z) = ln(1 + z) - z / (1 + z), strictly increasing, f(0) = 0.

    Below z = 0.01 the two terms cancel almost completely, so the value
    comes from the series sum_{n>=2} (-1)^n (n-1)/n z^n instead.
    """
    if z < 0:
        raise ValueError(f"z={z!r} must be >= 0")
    if z < 0.01:
        total = 0.0
        power = z
        for n in range(2, 13):
            power *= z
            term = (n - 1) / n * power
            total += -term if n % 2 else term
        return total
    return math.log1p(z) - z / (1.0 + z)


def f_inverse(c: float, tol: float = F_INVERSE_TOL) -> float:
    """Invert f: return z >= 0 with |f(z) - c| <= tol * max(1, c).

    Newton iteration (f'(z) = z / (1+z)^2 > 0) with a bisection
    safeguard; the starting point uses f(z) ~ z^2/2 for small c and
    f(z) ~ ln z - 1 for large c.  Beyond c ~ 708 the root exceeds the
    double range and inf is returned (the dual bracketing transiently
    probes such values; they never survive to the solution).
    """
    if c < 0:
        raise ValueError(f"c={c!r} must be >= 0")
    if c == 0.0:
        return 0.0
    if c >= 708.0:
        return math.inf
    lo = 0.0
    hi = math.sqrt(2.0 * c) + c + 1.0
    while f_eval(hi) < c:
        lo = hi
        hi *= 2.0
    z = math.sqrt(2.0 * c) if c < 0.5 else math.expm1(min(c + 1.0, 700.0))
    z = min(max(z, lo), hi)
    bound = tol * max(1.0, c)
    best_z, best_err = z, math.inf
    for _ in range(_MAX_ITER):
        fz = f_eval(z)
        err = abs(fz - c)
        if err < best_err:
            best_z, best_err = z, err
        if err <= 1e-15 * c:
            break
        if fz > c:
            hi = z
        else:
            lo = z
        fp = z / (1.0 + z) ** 2
        step_ok = fp > 0
        if step_ok:
            z_new = z - (fz - c) / fp
            step_ok = lo < z_new < hi
        if not step_ok:
            z_new = 0.5 * (lo + hi)
        if abs(z_new - z) <= 1e-16 * z:
            break
        z = z_new
    if best_err > bound:
        raise ArithmeticError(f"f_inverse failed to converge for c={c!r}")
    return best_z


def throughput(tau: np.ndarray, gamma: np.ndarray) -> np.ndarray:
    """Per-UE rates tau_i * log2(1 + gamma_i / tau_i).

    The tau -> 0 limit is 0, so idle UEs contribute nothing.
    """
    tau = np.asarray(tau, dtype=float)
    gamma = np.asarray(gamma, dtype=float)
    if (tau < 0).any():
        raise ValueError("tau must be non-negative")
    rates = np.zeros_like(gamma)
    active = tau > 0
    rates[active] = tau[active] * np.log2(1.0 + gamma[active] / tau[active])
    return rates


def time_demand(lam: float, gamma: np.ndarray, weights: np.ndarray) -> float:
    """Total block time g(lambda) demanded by the stationarity conditions.

    Strictly decreasing in lambda, diverging as lambda -> 0+ and
    vanishing as lambda -> inf; only UEs with gamma_i > 0 contribute.
    """
    gamma = np.asarray(gamma, dtype=float)
    weights = np.asarray(weights, dtype=float)
    inv_cache: dict[float, float] = {}
    total = 0.0
    for g, w in zip(gamma, weights):
        if g > 0:
            z = inv_cache.get(w)
            if z is None:
                z = inv_cache[w] = f_inverse(lam * LN2 / w)
            total += g / z
    return total


def _validate(gamma: np.ndarray, weights: np.ndarray | None) -> np.ndarray:
    gamma = np.asarray(gamma, dtype=float)
    if gamma.ndim != 1 or gamma.size < 1:
        raise ValueError("gamma must be a non-empty vector")
    if not np.isfinite(gamma).all() or (gamma < 0).any():
        raise ValueError(f"gamma must be finite and non-negative: {gamma}")
    if weights is not None:
        if weights.shape != gamma.shape:
            raise ValueError("weights and gamma must have the same length")
        if not np.isfinite(weights).all() or (weights <= 0).any():
            raise ValueError("weights must be finite and strictly positive")
    if not (gamma > 0).any():
        raise NoEnergyError("all SNR coefficients are zero")
    return gamma


def optimize_weighted(gamma: np.ndarray, weights: np.ndarray) -> AllocationResult:
    """Maximise sum(omega_i * R_i) over the time budget.

    Outer bisection on the dual variable; terminates when the time
    demand matches the unit budget to TIME_BUDGET_TOL.
    """
    weights = np.asarray(weights, dtype=float)
    gamma = _validate(gamma, weights)

    iterations = 0
    lo = 1e-18
    if time_demand(lo, gamma, weights) < 1.0:
        raise ArithmeticError(
            "dual bracketing failed: SNR coefficients too small to resolve"
        )
    hi = 1.0
    while time_demand(hi, gamma, weights) >= 1.0:
        lo = hi
        hi *= 2.0
        iterations += 1
        if iterations > 600:
            raise ArithmeticError("failed to bracket the dual variable")

    best_lam = hi
    best_err = abs(time_demand(hi, gamma, weights) - 1.0)
    for _ in range(_MAX_ITER):
        mid = 0.5 * (lo + hi)
        demand = time_demand(mid, gamma, weights)
        iterations += 1
        err = abs(demand - 1.0)
        if err < best_err:
            best_lam, best_err = mid, err
        if err <= TIME_BUDGET_TOL or hi - lo <= np.finfo(float).eps * mid:
            break
        if demand > 1.0:
            lo = mid
        else:
            hi = mid

    lam = best_lam
    z = np.array([f_inverse(lam * LN2 / w) for w in weights])
    tau = np.where(gamma > 0, gamma / z, 0.0)
    rates = throughput(tau, gamma)
    return AllocationResult(
        tau=tau,
        lambda_star=lam,
        z=z,
        rates=rates,
        objective=float(np.dot(weights, rates)),
        iterations=iterations,
    )


def optimize_equal(gamma: np.ndarray) -> AllocationResult:
    """Closed-form sum-throughput maximiser (equal weights 1/K).

    tau_i = gamma_i / sum(gamma); every active UE then shares the common
    SNR-per-slot z = sum(gamma), and the dual variable follows from the
    stationarity identity as f(sum(gamma)) / (K * ln 2).
    """
    gamma = _validate(gamma, None)
    k = gamma.size
    total = float(gamma.sum())
    tau = gamma / total
    z = np.full(k, total)
    lam = f_eval(total) / (k * LN2)
    rates = throughput(tau, gamma)
    weights = np.full(k, 1.0 / k)
    return AllocationResult(
        tau=tau,
        lambda_star=lam,
        z=z,
        rates=rates,
        objective=float(np.dot(weights, rates)),
        iterations=0,
    )


def verify_kkt(
    result: AllocationResult,
    gamma: np.ndarray,
    weights: np.ndarray,
) -> KktReport:
    """Recompute optimality residuals of an allocation from scratch.

    The budget residual |sum(tau) - 1|, the worst stationarity gap
    max_i |omega_i f(gamma_i / tau_i) - lambda ln 2| over active UEs,
    and min(tau).  z is re-derived from tau so the report also flags
    allocations whose tau was perturbed after solving.
    """
    gamma = np.asarray(gamma, dtype=float)
    weights = np.asarray(weights, dtype=float)
    tau = result.tau
    target = result.lambda_star * LN2

    sum_tau_residual = abs(math.fsum(tau.tolist()) - 1.0)
    stationarity = 0.0
    for g, w, t in zip(gamma, weights, tau):
        if g <= 0:
            continue
        if t <= 0:
            stationarity = math.inf
            break
        stationarity = max(stationarity, abs(w * f_eval(g / t) - target))
    return KktReport(
        sum_tau_residual=sum_tau_residual,
        stationarity_residual=stationarity,
        min_tau=float(tau.min()),
    )
