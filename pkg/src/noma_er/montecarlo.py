"""Monte Carlo estimates of effective-rate moments.

Samples are split into ``streams`` contiguous ranges, each driven by its own
child of ``SeedSequence(seed)``.  Per-stream partial sums are combined in
stream order, so results do not depend on how many threads run the streams.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import channel
from .channel import PairStats
from .errors import ConfigError
from .rate import (LN2, CsiCase, ErReport, PowerSplit, RoleModel, ScenarioParams,
                   er_from_moments, role_model)

__all__ = ["McConfig", "MomentEstimate", "mc_moment", "mc_moments", "mc_effective_rate"]

CHUNK = 1 << 17


@dataclass(frozen=True)
class McConfig:
    samples: int = 1_000_000
    seed: int = 0
    streams: int = 1
    threads: int = 1

    def __post_init__(self):
        if int(self.samples) != self.samples or self.samples < 10_000:
            raise ConfigError("sample count must be an integer of at least 1e4")
        if int(self.streams) != self.streams or self.streams < 1:
            raise ConfigError("stream count must be a positive integer")
        if int(self.threads) != self.threads or self.threads < 1:
            raise ConfigError("thread count must be a positive integer")
        if int(self.seed) != self.seed or self.seed < 0:
            raise ConfigError("seed must be a non-negative integer")


@dataclass(frozen=True)
class MomentEstimate:
    """Sample mean of ``(1 + gamma)^-e``, its complement and standard error."""

    mean: float
    complement: float
    se: float
    n: int
    nu: float

    @property
    def rate(self) -> float:
        return er_from_moments(self.mean, self.complement, self.nu)

    @property
    def rate_se(self) -> float:
        """Delta-method standard error of the rate."""
        return self.se / (max(self.mean, 1e-300) * self.nu * LN2)


def _select(kind, g_n, g_f):
    if kind == "near":
        return g_n
    if kind == "far":
        return g_f
    if kind == "max":
        return np.maximum(g_n, g_f)
    return np.minimum(g_n, g_f)


def _stream_sums(models, pair, seed_seq, count, sampler):
    rng = np.random.default_rng(seed_seq)
    sums = np.zeros((len(models), 3))
    done = 0
    while done < count:
        size = min(CHUNK, count - done)
        g_p, g_n, g_f = sampler(rng, pair, size)
        for j, m in enumerate(models):
            x = _select(m.kind, g_n, g_f)
            if m.over_pr:
                x = x / g_p
            lr = m.exponent * m.log_ratio(x)
            val = np.exp(-lr)
            sums[j] += (val.sum(), np.dot(val, val), (-np.expm1(-lr)).sum())
        done += size
    return sums


def _estimate(models, pair, mc, sampler):
    sampler = sampler or channel.sample_gains
    children = np.random.SeedSequence(mc.seed).spawn(mc.streams)
    base, extra = divmod(mc.samples, mc.streams)
    counts = [base + (j < extra) for j in range(mc.streams)]
    jobs = list(zip(children, counts))
    if mc.threads > 1 and mc.streams > 1:
        with ThreadPoolExecutor(mc.threads) as pool:
            parts = list(pool.map(lambda a: _stream_sums(models, pair, a[0], a[1], sampler), jobs))
    else:
        parts = [_stream_sums(models, pair, s, c, sampler) for s, c in jobs]
    total = np.zeros_like(parts[0])
    for p in parts:
        total += p
    n = mc.samples
    out = []
    for m, (s1, s2, sc_) in zip(models, total):
        mean = s1 / n
        var = max(s2 / n - mean * mean, 0.0) * n / (n - 1)
        out.append(MomentEstimate(mean, sc_ / n, math.sqrt(var / n), n, m.nu))
    return out


def mc_moments(models: list[RoleModel], pair: PairStats, mc: McConfig = McConfig(),
               sampler=None) -> list[MomentEstimate]:
    """Estimate several role models from one shared set of fading blocks."""
    return _estimate(list(models), pair, mc, sampler)


def mc_moment(case: CsiCase, scheme: str, role: str, pair: PairStats, sp: ScenarioParams,
              ps: PowerSplit | None, mc: McConfig = McConfig(), sampler=None) -> MomentEstimate:
    return _estimate([role_model(case, role, pair, sp, ps, scheme)], pair, mc, sampler)[0]


def mc_effective_rate(case: CsiCase, scheme: str, pair: PairStats, sp: ScenarioParams,
                      ps: PowerSplit | None, mc: McConfig = McConfig(), sampler=None) -> ErReport:
    models = [role_model(case, r, pair, sp, ps, scheme) for r in ("strong", "weak")]
    s, w = _estimate(models, pair, mc, sampler)
    return ErReport(s.rate, w.rate, "monte-carlo", CsiCase(case))
