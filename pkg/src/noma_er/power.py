"""Power split that gives the NOMA strong user its OMA effective rate."""
from __future__ import annotations

from dataclasses import dataclass

from .channel import PairStats
from .errors import DomainError
from .oma import oma_effective_rate
from .rate import CsiCase, PowerSplit, ScenarioParams, er_closed_strong, er_quadrature

__all__ = ["PowerAllocation", "match_strong_user", "strong_rate"]

MAX_ITER = 60


@dataclass(frozen=True)
class PowerAllocation:
    split: PowerSplit
    target: float
    achieved: float
    iterations: int
    clamped: bool = False


def strong_rate(case, pair, sp, a_s, method="quadrature"):
    """NOMA strong-user rate as a function of its power coefficient."""
    ps = PowerSplit.from_strong(a_s, sp.k)
    if method == "quadrature":
        return er_quadrature(case, "strong", pair, sp, ps)
    if method == "closed-form":
        return er_closed_strong(case, pair, sp, ps)
    raise DomainError(f"unknown method {method!r}")


def match_strong_user(case: CsiCase, pair: PairStats, sp: ScenarioParams, tol: float = 1e-6,
                      method: str = "quadrature") -> PowerAllocation:
    """Bisection for a_s in (0, 1/K) with R_s^NOMA(a_s) = R_s^OMA.

    R_s^NOMA increases with a_s and vanishes as a_s -> 0.  If even
    ``a_s = 1/K - eps`` falls short of the target, that split is returned
    with ``clamped`` set.
    """
    if not tol > 0:
        raise DomainError("tolerance must be positive")
    eps = 1e-9 * (2.0 / sp.k)
    target = oma_effective_rate(case, "strong", pair, sp, method)
    lo, hi = 0.0, 1.0 / sp.k - eps
    r_hi = strong_rate(case, pair, sp, hi, method)
    if r_hi < target:
        return PowerAllocation(PowerSplit.from_strong(hi, sp.k), target, r_hi, 0, clamped=True)
    best = (abs(r_hi - target), hi, r_hi)
    it = 0
    while it < MAX_ITER and hi - lo > 1e-12:
        it += 1
        mid = 0.5 * (lo + hi)
        r = strong_rate(case, pair, sp, mid, method)
        if abs(r - target) < best[0]:
            best = (abs(r - target), mid, r)
        if abs(r - target) <= 0.01 * tol:
            break
        if r < target:
            lo = mid
        else:
            hi = mid
    _, a_s, r = best
    return PowerAllocation(PowerSplit.from_strong(a_s, sp.k), target, r, it)
