"""Shared numerical kernels: Lambert W, bisection, expectations over densities."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from scipy import integrate


class NoSignChangeError(ValueError):
    """The supplied interval does not bracket a sign change."""


class ConvergenceError(RuntimeError):
    """An iterative routine exhausted its iteration budget."""


class NonFiniteIntegrandError(ValueError):
    """The integrand returned a non-finite value."""

    def __init__(self, value: float, at: float):
        super().__init__(f"integrand returned {value} at lambda={at}")
        self.at = at


@dataclass(frozen=True)
class Bracket:
    """A sign-changing interval [lo, hi] for a scalar root."""

    lo: float
    hi: float
    f_lo_sign: int
    f_hi_sign: int

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"need lo < hi, got [{self.lo}, {self.hi}]")
        if self.f_lo_sign == self.f_hi_sign:
            raise NoSignChangeError(
                f"no sign change on [{self.lo}, {self.hi}]")

    @classmethod
    def from_function(cls, f: Callable[[float], float],
                      lo: float, hi: float) -> "Bracket":
        flo, fhi = f(lo), f(hi)
        if flo == 0.0:
            # degenerate: widen an epsilon so bisect still works
            return cls(lo, hi, -1 if fhi > 0 else 1, 1 if fhi > 0 else -1)
        if flo * fhi > 0.0:
            raise NoSignChangeError(
                f"f({lo})={flo} and f({hi})={fhi} have the same sign")
        return cls(lo, hi, int(math.copysign(1, flo)), int(math.copysign(1, fhi)))


def bisect(f: Callable[[float], float], bracket: Bracket,
           rel_tol: float = 1e-10, max_iter: int = 200) -> float:
    """Bisection on a bracketed root.

    Terminates when the bracket width drops below rel_tol * max(1, |x|).
    Monotone convergence; raises ConvergenceError after max_iter halvings.
    """
    lo, hi = bracket.lo, bracket.hi
    sign_lo = bracket.f_lo_sign
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if hi - lo <= rel_tol * max(1.0, abs(mid)):
            return mid
        fm = f(mid)
        if fm == 0.0:
            return mid
        if math.copysign(1, fm) == sign_lo:
            lo = mid
        else:
            hi = mid
    raise ConvergenceError(
        f"bisection did not converge in {max_iter} iterations on "
        f"[{bracket.lo}, {bracket.hi}]")


def grow_bracket(f: Callable[[float], float], lo: float, hi0: float,
                 max_doublings: int = 200) -> Bracket:
    """Double ``hi`` from ``hi0`` until [lo, hi] brackets a sign change."""
    flo = f(lo)
    hi = hi0
    for _ in range(max_doublings):
        fhi = f(hi)
        if flo == 0.0 or flo * fhi <= 0.0:
            return Bracket(lo, hi,
                           int(math.copysign(1, flo)) if flo != 0 else -1,
                           int(math.copysign(1, fhi)) if fhi != 0 else 1)
        hi *= 2.0
    raise NoSignChangeError(
        f"no sign change found while doubling up to hi={hi}")


def lambert_w0(y: float) -> float:
    """Principal-branch Lambert W on the nonnegative axis.

    Returns w >= 0 with w * exp(w) = y.  Halley iterations from the
    initial guess ln(1 + y), which converges for every y >= 0.
    """
    if y < 0.0:
        raise ValueError(f"lambert_w0 requires y >= 0, got {y}")
    if y == 0.0:
        return 0.0
    w = math.log1p(y)
    for _ in range(100):
        e = math.exp(w)
        f = w * e - y
        # Halley step
        step = f / (e * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0))
        w -= step
        if abs(step) <= 1e-16 * max(1.0, abs(w)):
            break
    return w


def _finite_checked(g: Callable[[float], float]) -> Callable[[float], float]:
    def wrapped(lam: float) -> float:
        v = g(lam)
        if not math.isfinite(v):
            raise NonFiniteIntegrandError(v, lam)
        return v
    return wrapped


def _inner_points(points: Iterable[float], a: float, b: float) -> list:
    pts = sorted({p for p in points if a < p < b and math.isfinite(p)})
    return pts


def expect(g: Callable[[float], float], dist,
           breakpoints: Sequence[float] = (),
           rel_tol: float = 1e-8) -> float:
    """E[g(lambda)] under ``dist``: integral of g * pdf over [0, lambda_max].

    ``breakpoints`` are declared discontinuities of g (policy cut-offs);
    the density's own kinks are always included as split points.
    """
    return conditional_expect(g, dist, 0.0, breakpoints, rel_tol)


def conditional_expect(g: Callable[[float], float], dist, cutoff: float,
                       breakpoints: Sequence[float] = (),
                       rel_tol: float = 1e-8) -> float:
    """Integral of g * pdf over the upper tail [cutoff, lambda_max].

    Note: this is the *unnormalized* tail expectation (it is not divided
    by the tail probability).
    """
    lam_max = dist.lambda_max
    if not 0.0 <= cutoff <= lam_max:
        raise ValueError(f"cutoff {cutoff} outside [0, {lam_max}]")
    if cutoff >= lam_max:
        return 0.0
    integrand = _finite_checked(lambda lam: g(lam) * dist.pdf(lam))
    pts = _inner_points(list(breakpoints) + list(dist.breakpoints),
                        cutoff, lam_max)
    value, _ = integrate.quad(integrand, cutoff, lam_max,
                              points=pts or None, epsabs=0.0,
                              epsrel=rel_tol, limit=500)
    return value
