"""Path loss, MRC gain statistics and fading samplers.

Every gain density used here (single-user, max and min of a pair) is a finite
sum of gamma kernels ``c * x**(k-1) * exp(-x/w)``.  :func:`gain_terms`
exposes that expansion; the ratio densities over the exponential ST-PR gain
and the closed-form rate expressions are both built from it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import special as sc

from .errors import DomainError

__all__ = [
    "PathLossParams",
    "LinkStats",
    "PairStats",
    "GammaTerm",
    "omega_tilde",
    "path_loss_linear",
    "gain_terms",
    "pdf_gain",
    "cdf_gain",
    "pdf_max_gain",
    "pdf_min_gain",
    "pdf_ratio",
    "gain_density",
    "sample_block",
    "sample_gains",
]

GAIN_KINDS = ("near", "far", "max", "min")


@dataclass(frozen=True)
class PathLossParams:
    """Log-distance path loss ``PL_ref - 10 xi log10(d/d_ref)`` in dB."""

    pl_ref_db: float = -30.0
    d_ref: float = 1.0
    xi: float = 2.5

    def __post_init__(self):
        if not self.d_ref > 0:
            raise DomainError("d_ref must be positive")
        if not self.xi > 0:
            raise DomainError("path-loss exponent must be positive")


@dataclass(frozen=True)
class LinkStats:
    """Per-antenna mean gain ``omega`` (linear) and antenna count ``n``."""

    omega: float
    n: int = 1

    def __post_init__(self):
        if not self.omega > 0:
            raise DomainError("omega must be positive")
        if int(self.n) != self.n or self.n < 1:
            raise DomainError("antenna count must be a positive integer")
        object.__setattr__(self, "n", int(self.n))


@dataclass(frozen=True)
class PairStats:
    near: LinkStats
    far: LinkStats
    pr: LinkStats

    def __post_init__(self):
        if self.pr.n != 1:
            raise DomainError("the ST-PR link has a single antenna")

    @property
    def omega_tilde(self) -> float:
        return omega_tilde(self.near.omega, self.far.omega)


class GammaTerm(NamedTuple):
    """Density term ``coef * x**(shape-1) * exp(-x/scale)``."""

    coef: float
    shape: int
    scale: float


def omega_tilde(b1: float, b2: float) -> float:
    return b1 * b2 / (b1 + b2)


def path_loss_linear(d, p: PathLossParams = PathLossParams()):
    d_arr = np.asarray(d, dtype=float)
    if np.any(~(d_arr > 0)):
        raise DomainError("distance must be positive")
    out = 10.0 ** ((p.pl_ref_db - 10.0 * p.xi * np.log10(d_arr / p.d_ref)) / 10.0)
    return float(out) if out.ndim == 0 else out


def _check_x(x):
    x = np.asarray(x, dtype=float)
    if np.any(x < 0) or np.any(np.isnan(x)):
        raise DomainError("density argument must be non-negative")
    return x


def _single_terms(s: LinkStats):
    return [GammaTerm(1.0 / (math.gamma(s.n) * s.omega ** s.n), s.n, s.omega)]


def _cross_terms(a: LinkStats, b: LinkStats, sign: float):
    """``sign * f_a(x) * (1 - F_b(x))`` expanded into gamma kernels."""
    w = omega_tilde(a.omega, b.omega)
    base = 1.0 / (math.gamma(a.n) * a.omega ** a.n)
    return [
        GammaTerm(sign * base / (b.omega ** tau * math.factorial(tau)), a.n + tau, w)
        for tau in range(b.n)
    ]


def gain_terms(kind: str, pair: PairStats) -> list[GammaTerm]:
    """Gamma-kernel expansion of the density of g_n, g_f, max or min."""
    if kind == "near":
        return _single_terms(pair.near)
    if kind == "far":
        return _single_terms(pair.far)
    if kind == "max":
        # f_n F_f + f_f F_n with F = 1 - (1 - F)
        return (_single_terms(pair.near) + _single_terms(pair.far)
                + _cross_terms(pair.near, pair.far, -1.0) + _cross_terms(pair.far, pair.near, -1.0))
    if kind == "min":
        return _cross_terms(pair.near, pair.far, 1.0) + _cross_terms(pair.far, pair.near, 1.0)
    raise DomainError(f"unknown gain kind {kind!r}; expected one of {GAIN_KINDS}")


def _eval_terms(x, terms):
    out = np.zeros_like(x)
    for c, k, w in terms:
        out += c * x ** (k - 1) * np.exp(-x / w)
    return out


def _ratio_terms_eval(x, terms, omega_p):
    # f_X(x) = ∫ y f_g(xy) f_p(y) dy, term by term
    out = np.zeros_like(x)
    for c, k, w in terms:
        out += c * math.gamma(k + 1) / omega_p * x ** (k - 1) * (x / w + 1.0 / omega_p) ** (-(k + 1))
    return out


def _max_product(x, a: LinkStats, b: LinkStats):
    """f_a(x) F_b(x) without cancellation."""
    log_f = sc.xlogy(a.n - 1, x) - x / a.omega - sc.gammaln(a.n) - a.n * math.log(a.omega)
    return np.exp(log_f) * sc.gammainc(b.n, x / b.omega)


def _max_ratio_product(x, a: LinkStats, b: LinkStats, omega_p, n_series=64):
    """Ratio density of ``f_a(g) F_b(g)`` over g_p.

    For small x the lower-tail series of F_b gives a sum of positive terms
    (ratio between consecutive terms below 1/2 there); elsewhere the finite
    expansion has no significant cancellation.
    """
    w = omega_tilde(a.omega, b.omega)
    s = x / w + 1.0 / omega_p
    r = (x / b.omega) / s
    finite = _ratio_terms_eval(x, _single_terms(a) + _cross_terms(a, b, -1.0), omega_p)
    small = r <= 0.5
    if not np.any(small):
        return finite
    xs = x[small]
    ss = s[small]
    rs = r[small]
    tau = b.n
    k = a.n + tau
    with np.errstate(divide="ignore", under="ignore"):
        term = np.exp(-sc.gammaln(a.n) - a.n * math.log(a.omega) - math.log(omega_p)
                      - tau * math.log(b.omega) - sc.gammaln(tau + 1) + sc.gammaln(k + 1)
                      + sc.xlogy(k - 1, xs) - (k + 1) * np.log(ss))
    series = term.copy()
    for _ in range(n_series):
        # ratio of consecutive terms: (k+1)/(tau+1) * r
        term = term * ((k + 1) / (tau + 1)) * rs
        series += term
        tau += 1
        k += 1
        if np.all(term <= 1e-17 * series):
            break
    out = finite.copy()
    out[small] = series
    return out


def _scalar(out):
    return float(out) if np.ndim(out) == 0 else out


def pdf_gain(x, s: LinkStats):
    x = _check_x(x)
    return _scalar(np.exp(sc.xlogy(s.n - 1, x) - x / s.omega - sc.gammaln(s.n) - s.n * math.log(s.omega)))


def cdf_gain(x, s: LinkStats):
    x = _check_x(x)
    return _scalar(sc.gammainc(s.n, x / s.omega))


def pdf_max_gain(x, pair: PairStats):
    """Density of max(g_n, g_f), evaluated as f_n F_f + f_f F_n.

    Equal to the gamma-kernel expansion of :func:`gain_terms` but free of its
    cancellation near the origin.
    """
    x = _check_x(x)
    return _scalar(_max_product(x, pair.near, pair.far) + _max_product(x, pair.far, pair.near))


def pdf_min_gain(x, pair: PairStats):
    x = _check_x(x)
    return _scalar(_eval_terms(x, gain_terms("min", pair)))


def pdf_ratio(x, kind: str, pair: PairStats):
    """Density of ``g / g_p`` where g is the near, far, max or min gain."""
    x = _check_x(x)
    return _scalar(gain_density(kind, pair, over_pr=True)(x))


def sample_gains(rng: np.random.Generator, pair: PairStats, size: int):
    """Draw ``size`` fading blocks; returns arrays (g_p, g_n, g_f)."""
    g_p = rng.exponential(pair.pr.omega, size)
    g_n = rng.gamma(pair.near.n, pair.near.omega, size)
    g_f = rng.gamma(pair.far.n, pair.far.omega, size)
    return g_p, g_n, g_f


def sample_block(rng: np.random.Generator, pair: PairStats):
    """One fading block as floats (g_p, g_n, g_f, g_s, g_w)."""
    g_p, g_n, g_f = (float(v[0]) for v in sample_gains(rng, pair, 1))
    return g_p, g_n, g_f, max(g_n, g_f), min(g_n, g_f)


def gain_density(kind: str, pair: PairStats, over_pr: bool = False):
    """Vectorized density of the gain ``kind``, or of its ratio to g_p."""
    terms = gain_terms(kind, pair)
    n, f, omega_p = pair.near, pair.far, pair.pr.omega
    if kind == "max":
        if over_pr:
            def ratio_max(x):
                x = np.asarray(x, dtype=float)
                flat = x.reshape(-1)
                out = _max_ratio_product(flat, n, f, omega_p) + _max_ratio_product(flat, f, n, omega_p)
                return out.reshape(x.shape)
            return ratio_max
        return lambda x: _max_product(np.asarray(x, dtype=float), n, f) + _max_product(np.asarray(x, dtype=float), f, n)
    if over_pr:
        return lambda x: _ratio_terms_eval(np.asarray(x, dtype=float), terms, omega_p)
    return lambda x: _eval_terms(np.asarray(x, dtype=float), terms)
