"""Location-based user pairing."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import ConfigError, DomainError

__all__ = ["UserPair", "PairingResult", "pair_users"]


@dataclass(frozen=True)
class UserPair:
    """1-based user indices of one pair with their distances."""

    near: int
    far: int
    d_near: float
    d_far: float


@dataclass(frozen=True)
class PairingResult:
    pairs: tuple

    def __iter__(self):
        return iter(self.pairs)

    def __len__(self):
        return len(self.pairs)


def pair_users(distances: Sequence[float]) -> PairingResult:
    """Pair the farthest remaining user with the nearest remaining one.

    Users are sorted by distance (ties by index), and pair j joins the j-th
    nearest with the j-th farthest.
    """
    d = [float(v) for v in distances]
    k = len(d)
    if k < 2 or k % 2:
        raise ConfigError(f"K must be even and at least 2, got {k}")
    if any(not v > 0 for v in d):
        raise DomainError("distances must be positive")
    order = sorted(range(k), key=lambda i: (d[i], i))
    pairs = []
    for j in range(k // 2):
        n, f = order[j], order[k - 1 - j]
        pairs.append(UserPair(n + 1, f + 1, d[n], d[f]))
    return PairingResult(tuple(pairs))
