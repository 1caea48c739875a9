"""Analytic power model: per-user power control, average-power scaling law, inverses."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .numerics import bisect, grow_bracket
from .params import SystemParams, derive_constants

_LN2 = math.log(2.0)

# exponents (in bits) beyond this correspond to unphysical per-cell load
EXPONENT_GUARD_BITS = 1024.0


class PowerOverflowError(OverflowError):
    """Per-cell load implies an exponent outside the guarded range."""


class InfeasibleBudgetError(ValueError):
    """The requested power budget cannot cover the static consumption."""


@dataclass(frozen=True)
class CellState:
    """A (coverage radius, user density) operating point."""

    radius: float
    density: float

    def __post_init__(self):
        if self.radius < 0.0:
            raise ValueError(f"radius must be >= 0, got {self.radius}")
        if self.density < 0.0:
            raise ValueError(f"density must be >= 0, got {self.density}")


def stpc_power(distance, n_users, p: SystemParams):
    """Transmit power towards one user at ``distance`` with ``n_users`` sharing the band.

    Short-term power control: enough power that the Rayleigh-faded link meets
    the rate target within the allowed outage probability.  Flat inside the
    reference distance.  Accepts numpy arrays for either argument.
    """
    c = derive_constants(p)
    n = np.asarray(n_users, dtype=float)
    if np.any(n < 1):
        raise ValueError("n_users must be >= 1")
    bits = n * c.c2
    if np.any(bits > EXPONENT_GUARD_BITS):
        raise PowerOverflowError(
            f"per-cell load exponent {np.max(bits)} bits exceeds guard "
            f"({EXPONENT_GUARD_BITS})")
    load = np.expm1(bits * _LN2) / n
    geom = np.maximum(np.asarray(distance, dtype=float) / p.ref_distance, 1.0) \
        ** p.pathloss_exp
    out = (p.snr_gap * p.noise_psd * p.bandwidth_w / (p.ref_pathloss * c.c1)) \
        * load * geom
    return out if out.ndim else float(out)


def transmit_power_x(x: float, density: float, p: SystemParams) -> float:
    """Average transmit power as a function of x = R^2 (the solver's variable)."""
    if x <= 0.0 or density < 0.0:
        return 0.0
    c = derive_constants(p)
    bits = c.d2 * math.pi * density * x
    if bits > EXPONENT_GUARD_BITS:
        raise PowerOverflowError(
            f"load exponent {bits} bits exceeds guard ({EXPONENT_GUARD_BITS})")
    return c.d1 * x ** (0.5 * p.pathloss_exp) * math.expm1(bits * _LN2)


def avg_transmit_power(radius: float, density: float, p: SystemParams) -> float:
    """Average BS transmit power D1 * R^alpha * (2^(D2*pi*lambda*R^2) - 1).

    Strictly increasing in both arguments on the positive quadrant and
    convex in x = R^2; zero when either argument is zero.
    """
    return transmit_power_x(radius * radius, density, p)


def avg_transmit_power_exact(radius: float, density: float,
                             p: SystemParams) -> float:
    """Average transmit power without the two closing approximations.

    Keeps the near-field correction term alpha*r0^(alpha+2)/(2 R^2) and the
    exact exponent base (2^(v/W) - 1 instead of (ln 2) v/W), so it equals the
    expectation of the per-user power over the Poisson population exactly.
    Intended for validation; the scaling law above is the modeling surface.
    """
    if radius <= 0.0 or density < 0.0:
        return 0.0
    c = derive_constants(p)
    alpha = p.pathloss_exp
    d1_exp = math.expm1(c.c2 * _LN2)  # 2^(v/W) - 1
    ex = d1_exp * math.pi * density * radius * radius
    if ex > EXPONENT_GUARD_BITS * _LN2:
        raise PowerOverflowError(
            f"load exponent {ex} nats exceeds guard")
    geom = radius ** alpha + alpha * p.ref_distance ** (alpha + 2.0) \
        / (2.0 * radius * radius)
    return c.d1 * geom * math.expm1(ex)


def bs_power_x(x: float, density: float, p: SystemParams) -> float:
    """BS consumption in x = R^2: a * Pt + Pc when on, sleep power when off."""
    if x <= 0.0:
        return p.sleep_power
    return p.amp_scaling * transmit_power_x(x, density, p) + p.static_power


def bs_power(radius: float, density: float, p: SystemParams) -> float:
    """BS power consumption; discontinuous at R = 0 (sleep mode) by design."""
    return bs_power_x(radius * radius, density, p)


def max_range_x(density: float, budget: float, p: SystemParams,
                rel_tol: float = 1e-10) -> float:
    """Largest x = R^2 whose BS consumption stays within ``budget`` at ``density``."""
    if budget <= p.static_power:
        raise InfeasibleBudgetError(
            f"budget {budget} W does not exceed static power {p.static_power} W")
    if density <= 0.0:
        raise ValueError(f"density must be positive, got {density}")
    target = (budget - p.static_power) / p.amp_scaling

    def f(x: float) -> float:
        c = derive_constants(p)
        bits = c.d2 * math.pi * density * x
        if bits > 700.0 / _LN2:
            return math.inf  # far past the budget; sign is all that matters
        return transmit_power_x(x, density, p) - target

    bracket = grow_bracket(f, 0.0, 1.0)
    return bisect(f, bracket, rel_tol=rel_tol)


def max_range(density: float, budget: float, p: SystemParams,
              rel_tol: float = 1e-10) -> float:
    """Coverage radius with consumption exactly at ``budget``; decreasing in density."""
    return math.sqrt(max_range_x(density, budget, p, rel_tol=rel_tol))


def throughput(radius: float, density: float) -> float:
    """Average number of simultaneously supported users, pi * lambda * R^2."""
    return math.pi * density * radius * radius


def budget_x_vec(densities: np.ndarray, transmit_budget: float,
                 p: SystemParams, iterations: int = 80) -> np.ndarray:
    """Vectorized solve of D1 x^(alpha/2) (2^(D2 pi lam x) - 1) = budget.

    Bisection carried out elementwise over ``densities`` (all > 0); used by
    the scheme searches where x must be tabulated on dense density grids.
    """
    c = derive_constants(p)
    lam = np.asarray(densities, dtype=float)
    if np.any(lam <= 0.0):
        raise ValueError("densities must be positive")
    if transmit_budget <= 0.0:
        raise InfeasibleBudgetError(
            f"transmit budget must be positive, got {transmit_budget}")
    half_alpha = 0.5 * p.pathloss_exp

    def over(x):
        bits = np.minimum(c.d2 * math.pi * lam * x, 700.0 / _LN2)
        with np.errstate(over="ignore"):
            val = c.d1 * x ** half_alpha * np.expm1(bits * _LN2)
        return val >= transmit_budget

    hi = np.ones_like(lam)
    for _ in range(200):
        mask = ~over(hi)
        if not mask.any():
            break
        hi = np.where(mask, hi * 2.0, hi)
    lo = np.zeros_like(lam)
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        mask = over(mid)
        hi = np.where(mask, mid, hi)
        lo = np.where(mask, lo, mid)
    return 0.5 * (lo + hi)
