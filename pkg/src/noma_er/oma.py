"""Time-frequency-division OMA baseline.

Strong users of all pairs are served in the first half of the block and
weak users in the second, each on its own band of width ``2B/K`` with power
fraction ``2/K``.  Serving a user for half the block halves its service per
block, so the moment exponent becomes ``nu/2``.
"""
from __future__ import annotations

from dataclasses import dataclass

from .channel import PairStats
from .errors import DomainError
from .rate import (CsiCase, ErReport, ScenarioParams, er_from_moment, er_quadrature,
                   moment_closed, role_model)
from .special import QuadratureConfig

__all__ = ["OmaParams", "oma_effective_rate", "oma_report"]


@dataclass(frozen=True)
class OmaParams:
    pair_bandwidth: float
    power_fraction: float
    slot_fraction: float = 0.5

    def __post_init__(self):
        if not self.pair_bandwidth > 0:
            raise DomainError("bandwidth must be positive")
        for name in ("power_fraction", "slot_fraction"):
            if not 0 < getattr(self, name) <= 1:
                raise DomainError(f"{name} must lie in (0, 1]")

    @classmethod
    def from_scenario(cls, sp: ScenarioParams) -> "OmaParams":
        return cls(sp.pair_bandwidth, 2.0 / sp.k)


def oma_effective_rate(case: CsiCase, role: str, pair: PairStats, sp: ScenarioParams,
                       method: str = "quadrature", cfg: QuadratureConfig | None = None) -> float:
    """OMA effective rate of the strong or weak user of one pair.

    ``method`` is ``"quadrature"`` or ``"closed-form"``; the latter reuses the
    NOMA strong-user closed forms with exponent ``nu/2``.
    """
    if method == "quadrature":
        return er_quadrature(case, role, pair, sp, scheme="OMA")
    if method == "closed-form":
        model = role_model(case, role, pair, sp, scheme="OMA")
        return er_from_moment(moment_closed(model, pair, cfg), model.nu)
    raise DomainError(f"unknown method {method!r}")


def oma_report(case: CsiCase, pair: PairStats, sp: ScenarioParams, method: str = "quadrature",
               cfg: QuadratureConfig | None = None) -> ErReport:
    r_s = oma_effective_rate(case, "strong", pair, sp, method, cfg)
    r_w = oma_effective_rate(case, "weak", pair, sp, method, cfg)
    return ErReport(r_s, r_w, method, CsiCase(case))
