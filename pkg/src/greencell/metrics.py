"""Long-term performance metrics of a range-adaptation policy."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .numerics import expect
from .params import SystemParams
from .scaling import bs_power, throughput
from .traffic import DensityDistribution


@dataclass(frozen=True)
class PolicyMetrics:
    """Averages over the density distribution for one policy."""

    avg_power_w: float
    avg_users: float
    on_probability: float
    peak_bs_power_w: float

    def as_dict(self) -> dict:
        return {
            "avg_power_w": self.avg_power_w,
            "avg_users": self.avg_users,
            "on_probability": self.on_probability,
            "peak_bs_power_w": self.peak_bs_power_w,
        }


def evaluate(radius_fn: Callable[[float], float], dist: DensityDistribution,
             p: SystemParams, breakpoints: Sequence[float] = (),
             grid_size: int = 513) -> PolicyMetrics:
    """Metrics of an arbitrary density -> radius map.

    ``breakpoints`` are the map's discontinuities (on/off cut-offs); they are
    passed through to the quadrature and used to bound the on-probability
    and peak-power evaluations.
    """
    pts = [b for b in breakpoints if 0.0 < b < dist.lambda_max]

    def power(lam: float) -> float:
        return bs_power(radius_fn(lam), lam, p)

    def users(lam: float) -> float:
        return throughput(radius_fn(lam), lam)

    avg_power = expect(power, dist, breakpoints=pts)
    avg_users = expect(users, dist, breakpoints=pts)
    on_prob = expect(lambda lam: 1.0 if radius_fn(lam) > 0.0 else 0.0,
                     dist, breakpoints=pts)
    grid = np.linspace(0.0, dist.lambda_max, grid_size)
    peak = max((power(float(lam)) for lam in grid if radius_fn(float(lam)) > 0.0),
               default=p.sleep_power)
    for b in pts:
        # peaks sit at cut-offs; sample both sides
        for lam in (b, np.nextafter(b, dist.lambda_max)):
            if radius_fn(float(lam)) > 0.0:
                peak = max(peak, power(float(lam)))
    peak = max(peak, power(dist.lambda_max)
               if radius_fn(dist.lambda_max) > 0.0 else p.sleep_power)
    return PolicyMetrics(avg_power_w=avg_power, avg_users=avg_users,
                         on_probability=min(max(on_prob, 0.0), 1.0),
                         peak_bs_power_w=peak)
