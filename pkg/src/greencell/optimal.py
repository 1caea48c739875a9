"""Optimal range adaptation and long-term power control via Lagrangian duality.

Everything here works in x = R^2 space, where the consumption model is convex
and each per-density subproblem has at most one interior stationary point;
the public policy objects expose radii.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .metrics import PolicyMetrics
from .numerics import (Bracket, NoSignChangeError, bisect, expect,
                       grow_bracket, lambert_w0)
from .params import SystemParams, derive_constants
from .scaling import bs_power_x, max_range_x
from .traffic import DensityDistribution

_LN2 = math.log(2.0)

CASE_A = "case_A"  # power cap becomes binding only after switch-on
CASE_B = "case_B"  # cap binds immediately: constant-power transmission when on


class InfeasibleError(ValueError):
    """The throughput requirement exceeds what the power cap allows."""

    def __init__(self, u_avg: float, max_achievable: float):
        super().__init__(
            f"required average throughput {u_avg} exceeds the maximum "
            f"achievable {max_achievable:.6g} under the BS power cap")
        self.u_avg = u_avg
        self.max_achievable = max_achievable


@dataclass(frozen=True)
class DualState:
    """Lagrange multiplier of the long-term throughput constraint."""

    mu: float

    def __post_init__(self):
        if self.mu < 0.0:
            raise ValueError(f"mu must be >= 0, got {self.mu}")


@dataclass(frozen=True)
class CriticalDensities:
    """Density thresholds separating off / stationary / power-capped regimes.

    Values may be ``inf`` when the defining crossing lies beyond the scan
    ceiling (never reached) or ``0.0`` when it lies below it.
    """

    lambda1: float
    lambda2: float
    lambda3: float

    @property
    def case_tag(self) -> str:
        # relative tolerance avoids tag flip-flop at near-equality
        if self.lambda2 == self.lambda1:
            return CASE_A
        if math.isinf(self.lambda1) and math.isinf(self.lambda2):
            return CASE_A
        return CASE_A if self.lambda2 >= self.lambda1 * (1.0 - 1e-9) else CASE_B

    @property
    def on_cutoff(self) -> float:
        """Density below which the BS stays off."""
        return self.lambda1 if self.case_tag == CASE_A else self.lambda3


def lagrangian_x(x: float, density: float, mu: float, p: SystemParams) -> float:
    """Per-density Lagrangian L = consumption - mu * supported users, in x space."""
    return bs_power_x(x, density, p) - mu * math.pi * density * x


def x1_star(density: float, mu: float, p: SystemParams,
            rel_tol: float = 1e-10) -> float:
    """Interior stationary point: unique positive root of dL/dx = 0.

    The derivative tends to -mu*pi*lambda as x -> 0+ (the power term's slope
    vanishes for pathloss exponents above 2) and grows without bound, so a
    doubling bracket always straddles the root.
    """
    if density <= 0.0:
        raise ValueError(f"density must be positive, got {density}")
    if mu <= 0.0:
        raise ValueError(f"mu must be positive, got {mu}")
    c = derive_constants(p)
    alpha = p.pathloss_exp
    q = c.d2 * math.pi * density
    target = mu * math.pi * density / p.amp_scaling

    def dpt_dx(x: float) -> float:
        nats = q * x * _LN2
        if nats > 700.0:
            return math.inf
        e = math.exp(nats)
        return (0.5 * alpha * c.d1 * x ** (0.5 * alpha - 1.0) * (e - 1.0)
                + c.d1 * q * _LN2 * x ** (0.5 * alpha) * e)

    f = lambda x: dpt_dx(x) - target
    try:
        bracket = grow_bracket(f, 1e-30, 1.0)
    except NoSignChangeError as exc:
        raise NoSignChangeError(
            f"stationarity bracket failed at density={density}, mu={mu}: {exc}")
    return bisect(f, bracket, rel_tol=rel_tol)


def x2_star(density: float, p: SystemParams, rel_tol: float = 1e-10) -> float:
    """Largest admissible x: consumption pinned at the BS power cap."""
    return max_range_x(density, p.max_bs_power, p, rel_tol=rel_tol)


def subproblem(density: float, mu: float, p: SystemParams) -> float:
    """Pointwise minimizer of the per-density Lagrangian over x >= 0.

    Returns the interior stationary point when it is admissible and beats
    switching off, the power-capped point when the stationary one violates
    the cap, and 0 otherwise.
    """
    if density <= 0.0 or mu <= 0.0:
        return 0.0
    x1 = x1_star(density, mu, p)
    if bs_power_x(x1, density, p) <= p.max_bs_power:
        return x1 if lagrangian_x(x1, density, mu, p) < 0.0 else 0.0
    x2 = x2_star(density, p)
    return x2 if lagrangian_x(x2, density, mu, p) < 0.0 else 0.0


def _scan_root(f, lam_lo: float, lam_hi: float, increasing: bool,
               rel_tol: float = 1e-10) -> float:
    """Root of a monotone function of density on a geometric scan grid.

    Returns ``inf`` when the crossing lies beyond ``lam_hi`` and ``0.0``
    when it lies below ``lam_lo``.
    """
    n = max(8, int(math.ceil(10.0 * math.log10(lam_hi / lam_lo))))
    grid = np.geomspace(lam_lo, lam_hi, n)
    prev_lam, prev_val = grid[0], f(grid[0])
    crossed_sign = 1.0 if increasing else -1.0
    if prev_val * crossed_sign > 0.0:
        return 0.0
    for lam in grid[1:]:
        val = f(lam)
        if val == 0.0:
            return float(lam)
        if val * crossed_sign > 0.0:
            return bisect(f, Bracket.from_function(f, float(prev_lam), float(lam)),
                          rel_tol=rel_tol)
        prev_lam, prev_val = lam, val
    return math.inf


def critical_densities(mu: float, p: SystemParams, lambda_max: float,
                       scan_factor: float = 1e3) -> CriticalDensities:
    """The three threshold densities for a given dual variable.

    Each is found by bisection over density using the proved monotone sign
    structure of its defining function.  Crossings outside
    (0, scan_factor * lambda_max] are clamped to inf; below, to 0.
    """
    if mu <= 0.0:
        raise ValueError(f"mu must be positive, got {mu}")
    lam_lo = lambda_max * 1e-6
    lam_hi = lambda_max * scan_factor

    def along_x1(g):
        def f(lam):
            return g(x1_star(lam, mu, p), lam)
        return f

    lam1 = _scan_root(
        along_x1(lambda x, lam: lagrangian_x(x, lam, mu, p)),
        lam_lo, lam_hi, increasing=False)
    lam2 = _scan_root(
        along_x1(lambda x, lam: bs_power_x(x, lam, p) - p.max_bs_power),
        lam_lo, lam_hi, increasing=True)
    lam3 = _scan_root(
        lambda lam: lagrangian_x(x2_star(lam, p), lam, mu, p),
        lam_lo, lam_hi, increasing=False)
    return CriticalDensities(lambda1=lam1, lambda2=lam2, lambda3=lam3)


# --- closed forms under the high-spectrum-efficiency approximation ---------

def hse_x1(density: float, mu: float, p: SystemParams) -> float:
    """Closed-form stationary point when the per-cell load exponent is large."""
    if density <= 0.0:
        raise ValueError(f"density must be positive, got {density}")
    if mu <= 0.0:
        raise ValueError(f"mu must be positive, got {mu}")
    c = derive_constants(p)
    alpha = p.pathloss_exp
    k = 2.0 * c.d3 * math.pi * density / alpha
    arg = k * (mu / (p.amp_scaling * c.d1 * c.d3)) ** (2.0 / alpha)
    return lambert_w0(arg) / k


def hse_x2(density: float, p: SystemParams) -> float:
    """Closed-form power-capped point when the load exponent is large."""
    if density <= 0.0:
        raise ValueError(f"density must be positive, got {density}")
    c = derive_constants(p)
    alpha = p.pathloss_exp
    pt_max = (p.max_bs_power - p.static_power) / p.amp_scaling
    if pt_max <= 0.0:
        raise ValueError("max_bs_power must exceed static_power")
    k = 2.0 * c.d3 * math.pi * density / alpha
    arg = k * (pt_max / c.d1) ** (2.0 / alpha)
    return lambert_w0(arg) / k


def hse_critical_densities(mu: float, p: SystemParams) -> CriticalDensities:
    """Closed-form threshold densities; each strictly decreasing in mu.

    The middle threshold's closed form requires mu > d3 * (Pmax - Pc);
    otherwise its denominator is nonpositive and the value is reported
    as inf.
    """
    if mu <= 0.0:
        raise ValueError(f"mu must be positive, got {mu}")
    c = derive_constants(p)
    alpha = p.pathloss_exp
    pc = p.static_power
    pt_max = (p.max_bs_power - pc) / p.amp_scaling
    lam1 = ((1.0 / (math.pi * c.d3) + pc / (mu * math.pi))
            * (p.amp_scaling * c.d1 * c.d3 / mu) ** (2.0 / alpha)
            * math.exp(2.0 / alpha + 2.0 * c.d3 * pc / (mu * alpha)))
    denom = mu - c.d3 * pt_max * p.amp_scaling
    if denom > 0.0:
        lam2 = (alpha * p.amp_scaling * pt_max / (2.0 * math.pi * denom)
                * (p.amp_scaling * c.d1 * c.d3 / mu) ** (2.0 / alpha)
                * math.exp(c.d3 * pt_max * p.amp_scaling / denom))
    else:
        lam2 = math.inf
    lam3 = (p.max_bs_power / (mu * math.pi)
            * (c.d1 / pt_max) ** (2.0 / alpha)
            * math.exp(2.0 * c.d3 * p.max_bs_power / (mu * alpha)))
    return CriticalDensities(lambda1=lam1, lambda2=lam2, lambda3=lam3)


# --- policy tabulation and the outer dual search ----------------------------

@dataclass(frozen=True)
class AdaptationPolicy:
    """Tabulated density -> (radius, consumption) map for one dual variable."""

    mu: float
    criticals: CriticalDensities
    lambdas: np.ndarray
    radii: np.ndarray
    powers: np.ndarray
    mode: str  # "exact" or "hse"
    lambda_max: float

    @property
    def case_tag(self) -> str:
        return self.criticals.case_tag

    @property
    def breakpoints(self) -> Tuple[float, ...]:
        crits = (self.criticals.lambda1, self.criticals.lambda2,
                 self.criticals.lambda3)
        return tuple(sorted({c for c in crits if 0.0 < c < self.lambda_max}))

    def radius_at(self, density: float) -> float:
        """Radius interpolated piecewise-linearly in x = R^2; off below the cut-off."""
        cut = self.criticals.on_cutoff
        if density <= cut or density <= 0.0:
            return 0.0
        x = np.interp(density, self.lambdas, self.radii ** 2)
        return math.sqrt(max(x, 0.0))

    def rows(self):
        for lam, r, pw in zip(self.lambdas, self.radii, self.powers):
            yield float(lam), float(r), float(pw)

    def summary(self) -> dict:
        def enc(v):
            return None if math.isinf(v) else v
        return {
            "mu": self.mu,
            "mode": self.mode,
            "case_tag": self.case_tag,
            "lambda1": enc(self.criticals.lambda1),
            "lambda2": enc(self.criticals.lambda2),
            "lambda3": enc(self.criticals.lambda3),
            "lambda_max": self.lambda_max,
        }


def _policy_x(density: float, mu: float, crits: CriticalDensities,
              p: SystemParams, mode: str) -> float:
    if density <= 0.0:
        return 0.0
    if mode == "exact":
        return subproblem(density, mu, p)
    if crits.case_tag == CASE_A:
        if density <= crits.lambda1:
            return 0.0
        if density <= crits.lambda2:
            return hse_x1(density, mu, p)
        return hse_x2(density, p)
    if density <= crits.lambda3:
        return 0.0
    return hse_x2(density, p)


def policy_for_mu(mu: float, p: SystemParams, lambda_max: float,
                  grid_size: int = 2048, mode: str = "exact") -> AdaptationPolicy:
    """Tabulate the per-density minimizer over a uniform grid plus the cut-offs."""
    if mode not in ("exact", "hse"):
        raise ValueError(f"mode must be 'exact' or 'hse', got {mode}")
    if mu <= 0.0:
        crits = CriticalDensities(math.inf, math.inf, math.inf)
    elif mode == "exact":
        crits = critical_densities(mu, p, lambda_max)
    else:
        crits = hse_critical_densities(mu, p)
    grid = set(np.linspace(0.0, lambda_max, grid_size))
    for c in (crits.lambda1, crits.lambda2, crits.lambda3):
        if 0.0 < c < lambda_max:
            grid.add(c)
            grid.add(np.nextafter(c, lambda_max))
    lams = np.array(sorted(grid))
    xs = np.array([0.0 if mu <= 0.0 else _policy_x(lam, mu, crits, p, mode)
                   for lam in lams])
    # ties at the switch-on threshold resolve to off, matching radius_at
    xs[lams <= crits.on_cutoff] = 0.0
    radii = np.sqrt(xs)
    powers = np.array([bs_power_x(x, lam, p) for x, lam in zip(xs, lams)])
    return AdaptationPolicy(mu=mu, criticals=crits, lambdas=lams,
                            radii=radii, powers=powers, mode=mode,
                            lambda_max=lambda_max)


def _avg_throughput(mu: float, dist: DensityDistribution, p: SystemParams,
                    crits: Optional[CriticalDensities] = None) -> float:
    if mu <= 0.0:
        return 0.0
    if crits is None:
        crits = critical_densities(mu, p, dist.lambda_max)
    pts = [c for c in (crits.lambda1, crits.lambda2, crits.lambda3)
           if 0.0 < c < dist.lambda_max]
    return expect(lambda lam: math.pi * lam * subproblem(lam, mu, p),
                  dist, breakpoints=pts)


def max_achievable_throughput(dist: DensityDistribution,
                              p: SystemParams) -> float:
    """Long-term throughput of the always-at-cap policy (the feasibility bound)."""
    return expect(lambda lam: math.pi * lam * x2_star(lam, p) if lam > 0 else 0.0,
                  dist)


def solve(u_avg: float, dist: DensityDistribution, p: SystemParams,
          grid_size: int = 2048, constraint_rel_tol: float = 1e-4,
          mode: str = "exact") -> Tuple[AdaptationPolicy, PolicyMetrics]:
    """Minimize long-term consumption subject to a long-term throughput floor.

    Outer bisection on the dual variable until the achieved throughput matches
    ``u_avg`` within tolerance.  When ``u_avg`` falls inside a jump of the
    throughput-versus-mu curve, the nearest policy from above is returned and
    its achieved throughput is reported in the metrics.
    """
    if u_avg <= 0.0:
        raise ValueError(f"u_avg must be positive, got {u_avg}")
    cap = max_achievable_throughput(dist, p)
    if cap < u_avg:
        raise InfeasibleError(u_avg, cap)

    def achieved(mu: float) -> float:
        return _avg_throughput(mu, dist, p)

    lo, e_lo = 0.0, 0.0
    hi = 1.0
    e_hi = achieved(hi)
    while e_hi < u_avg:
        lo, e_lo = hi, e_hi
        hi *= 2.0
        if hi > 1e12:
            raise InfeasibleError(u_avg, e_hi)
        e_hi = achieved(hi)
    # bisect, keeping hi on the satisfied side
    for _ in range(200):
        if abs(e_hi - u_avg) <= constraint_rel_tol * u_avg:
            break
        if hi - lo <= 1e-12 * max(1.0, hi):
            break  # throughput jump: accept the nearest-above dual point
        mid = 0.5 * (lo + hi)
        e_mid = achieved(mid)
        if e_mid >= u_avg:
            hi, e_hi = mid, e_mid
        else:
            lo, e_lo = mid, e_mid

    mu = hi
    policy = policy_for_mu(mu, p, dist.lambda_max, grid_size=grid_size,
                           mode=mode)
    metrics = _exact_policy_metrics(mu, policy.criticals, dist, p)
    return policy, metrics


def _exact_policy_metrics(mu: float, crits: CriticalDensities,
                          dist: DensityDistribution,
                          p: SystemParams) -> PolicyMetrics:
    pts = [c for c in (crits.lambda1, crits.lambda2, crits.lambda3)
           if 0.0 < c < dist.lambda_max]

    def power(lam: float) -> float:
        return bs_power_x(subproblem(lam, mu, p), lam, p)

    def users(lam: float) -> float:
        return math.pi * lam * subproblem(lam, mu, p)

    avg_power = expect(power, dist, breakpoints=pts)
    avg_users = expect(users, dist, breakpoints=pts)
    cut = min(crits.on_cutoff, dist.lambda_max)
    on_prob = 1.0 - float(dist.cdf(cut))
    grid = np.linspace(cut, dist.lambda_max, 257) if cut < dist.lambda_max \
        else np.array([dist.lambda_max])
    peak = max((power(lam) for lam in grid if lam > 0.0), default=p.sleep_power)
    return PolicyMetrics(avg_power_w=avg_power, avg_users=avg_users,
                         on_probability=on_prob, peak_bs_power_w=peak)
