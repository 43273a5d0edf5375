"""Effective rate of the strong and weak user of one NOMA pair.

The four CSI regimes differ in two switches.  With instantaneous IL-CSI the
ST transmits ``I/g_p`` and every SINR scales with ``X = g/g_p``; with
statistical IL-CSI it transmits a fixed power and the SINR scales with the
gain itself.  With instantaneous SL-CSI the strong user is the one with the
larger instantaneous gain; otherwise the near user is always served as the
strong user.  The weak user's symbol must be decodable at both users, so its
rate is governed by the smaller of the two gains in every regime.

Each moment then has the form ``E[((1 + a1 S x) / (1 + a0 S x))^-e]`` and
is computed either from the closed forms (Meijer G and bivariate Meijer G
functions) or by adaptive quadrature against the gain densities.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy import special as sc

from . import channel
from .channel import PairStats, omega_tilde
from .errors import AccuracyError, ConfigError, DomainError
from .special import Egbmgf2Spec, MeijerGSpec, QuadratureConfig, egbmgf, meijer_g

__all__ = [
    "CsiCase",
    "ScenarioParams",
    "PowerSplit",
    "ErReport",
    "RoleModel",
    "PointMass",
    "role_model",
    "transmit_power_instantaneous",
    "transmit_power_statistical",
    "er_from_moment",
    "er_from_moments",
    "t1", "t2", "t3", "t4", "t5", "t6",
    "moment_closed",
    "moment_quadrature",
    "er_closed_strong",
    "er_closed_weak",
    "er_closed",
    "er_quadrature",
    "average_rate_quadrature",
]

LN2 = math.log(2.0)


class CsiCase(str, Enum):
    """CSI at the ST: interference link first, secondary links second."""

    II = "II"
    IS = "IS"
    SI = "SI"
    SS = "SS"

    @property
    def instantaneous_il(self) -> bool:
        return self.value[0] == "I"

    @property
    def instantaneous_sl(self) -> bool:
        return self.value[1] == "I"


@dataclass(frozen=True)
class ScenarioParams:
    """System-level parameters; per-pair quantities are derived properties."""

    i_peak: float
    theta: float
    k: int
    bandwidth: float = 1.0
    block: float = 1.0
    n0: float = 1.0
    delta: float = 0.1

    def __post_init__(self):
        for name in ("i_peak", "theta", "bandwidth", "block", "n0"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")
        if not 0 < self.delta < 1:
            raise DomainError("delta must lie in (0, 1)")
        if int(self.k) != self.k or self.k < 2 or self.k % 2:
            raise ConfigError(f"K must be even and at least 2, got {self.k}")

    @property
    def pair_bandwidth(self) -> float:
        return 2.0 * self.bandwidth / self.k

    @property
    def nu(self) -> float:
        return self.theta * self.block * self.pair_bandwidth / LN2

    @property
    def i_hat(self) -> float:
        return self.i_peak / (self.n0 * self.pair_bandwidth)

    def p_hat(self, omega_p: float) -> float:
        """Normalized statistical-CSI transmit power."""
        return transmit_power_statistical(omega_p, self.i_peak, self.delta) / (self.n0 * self.pair_bandwidth)


@dataclass(frozen=True)
class PowerSplit:
    a_s: float
    a_w: float

    def __post_init__(self):
        if not self.a_s > 0:
            raise DomainError("a_s must be positive")
        if not self.a_s < self.a_w:
            raise DomainError("a_s must be smaller than a_w")

    @classmethod
    def from_strong(cls, a_s: float, k: int) -> "PowerSplit":
        return cls(a_s, 2.0 / k - a_s)

    @property
    def total(self) -> float:
        return self.a_s + self.a_w


@dataclass(frozen=True)
class ErReport:
    r_s: float
    r_w: float
    method: str
    case: CsiCase
    flags: frozenset = field(default_factory=frozenset)

    @property
    def r_sum(self) -> float:
        return self.r_s + self.r_w


def transmit_power_instantaneous(g_p, i_peak):
    g = np.asarray(g_p, dtype=float)
    if np.any(~(g > 0)):
        raise DomainError("g_p must be positive")
    out = i_peak / g
    return float(out) if out.ndim == 0 else out


def transmit_power_statistical(omega_p: float, i_peak: float, delta: float) -> float:
    if not omega_p > 0:
        raise DomainError("omega_p must be positive")
    if not 0 < delta < 1:
        raise DomainError("delta must lie in (0, 1)")
    return -i_peak / (omega_p * math.log(delta))


def er_from_moment(moment: float, nu: float) -> float:
    if not nu > 0:
        raise DomainError("nu must be positive")
    if not 0 < moment <= 1.0 + 1e-12:
        raise DomainError(f"moment {moment!r} outside (0, 1]")
    return max(-math.log2(min(moment, 1.0)) / nu, 0.0)


# ---------------------------------------------------------------------------
# Role models


@dataclass(frozen=True)
class RoleModel:
    """Moment ``E[((1 + a1 S x)/(1 + a0 S x))^-exponent]`` over a gain density.

    ``x`` is the gain ``kind`` divided by g_p when ``over_pr`` is set; the
    rate is ``-log2(moment)/nu``.
    """

    kind: str
    over_pr: bool
    snr: float
    a1: float
    a0: float
    exponent: float
    nu: float

    def log_ratio(self, x):
        """``log(1 + gamma)`` for the SINR at ``x``."""
        x = np.asarray(x, dtype=float)
        out = np.log1p(self.a1 * self.snr * x)
        if self.a0:
            out = out - np.log1p(self.a0 * self.snr * x)
        return out


def role_model(case: CsiCase, role: str, pair: PairStats, sp: ScenarioParams,
               ps: PowerSplit | None = None, scheme: str = "NOMA") -> RoleModel:
    case = CsiCase(case)
    over_pr = case.instantaneous_il
    snr = sp.i_hat if over_pr else sp.p_hat(pair.pr.omega)
    if role == "strong":
        kind = "max" if case.instantaneous_sl else "near"
    elif role == "weak":
        if scheme == "OMA" and not case.instantaneous_sl:
            kind = "far"
        else:
            kind = "min"
    else:
        raise DomainError(f"unknown role {role!r}")
    if scheme == "OMA":
        return RoleModel(kind, over_pr, snr, 2.0 / sp.k, 0.0, sp.nu / 2.0, sp.nu)
    if scheme != "NOMA":
        raise DomainError(f"unknown scheme {scheme!r}")
    if ps is None:
        raise DomainError("NOMA rates need a power split")
    if abs(ps.total - 2.0 / sp.k) > 1e-12 * (2.0 / sp.k):
        raise DomainError("power split must satisfy a_s + a_w = 2/K")
    if role == "strong":
        return RoleModel(kind, over_pr, snr, ps.a_s, 0.0, sp.nu, sp.nu)
    return RoleModel(kind, over_pr, snr, ps.total, ps.a_s, sp.nu, sp.nu)


# ---------------------------------------------------------------------------
# Closed-form building blocks


def _g22(k, nu, z, cfg, flags):
    r = meijer_g(MeijerGSpec(2, 2, (-k, 1.0 - k), (0.0, nu - k), z), cfg, full_output=True)
    if r.perturbed:
        flags.add("perturbed")
    return r.value


def _g12(k, nu, z, cfg, flags):
    r = meijer_g(MeijerGSpec(1, 2, (1.0 - nu, 1.0 - k), (0.0,), z), cfg, full_output=True)
    if r.perturbed:
        flags.add("perturbed")
    return r.value


def t1(alpha, beta, b, nu, omega_p, cfg=None, flags=None):
    """E[(1 + b X)^-nu] for X = g/g_p with g ~ Gamma(alpha, beta)."""
    flags = set() if flags is None else flags
    z = omega_p / (beta * b)
    return math.exp(alpha * math.log(z) - sc.gammaln(alpha) - sc.gammaln(nu)) * _g22(alpha, nu, z, cfg, flags)


def t2(alpha1, beta1, alpha2, beta2, b, nu, omega_p, cfg=None, flags=None):
    """Cross term of the max/min ratio density: sum over tau < alpha2."""
    flags = set() if flags is None else flags
    w = omega_tilde(beta1, beta2)
    z = omega_p / (w * b)
    out = 0.0
    for tau in range(int(alpha2)):
        k = alpha1 + tau
        log_c = (k * math.log(omega_p / b) - sc.gammaln(alpha1) - sc.gammaln(nu)
                 - alpha1 * math.log(beta1) - tau * math.log(beta2) - sc.gammaln(tau + 1))
        out += math.exp(log_c) * _g22(k, nu, z, cfg, flags)
    return out


def _weak_spec(k, nu, x1, x2, exponential):
    inner2 = ((), (0.0,)) if exponential else ((-k,), (0.0,))
    return Egbmgf2Spec(((1.0 - k,), (nu - k,)), ((1.0 + nu,), (0.0,)), inner2, x1, x2)


def t3(alpha1, beta1, alpha2, beta2, a_s, a_tot, s_hat, nu, omega_p, cfg=None, flags=None):
    """Weak-user term with instantaneous IL-CSI, sum over tau < alpha2.

    Each summand is a bivariate Meijer G function; it is evaluated divided by
    ``Γ(-nu)``, which cancels the same factor in the prefactor and keeps
    integer ``nu`` regular.
    """
    w = omega_tilde(beta1, beta2)
    x1 = a_s / a_tot
    x2 = omega_p / (w * a_tot * s_hat)
    out = 0.0
    for tau in range(int(alpha2)):
        k = alpha1 + tau
        log_c = (k * math.log(omega_p / (a_tot * s_hat)) - sc.gammaln(alpha1) - sc.gammaln(nu)
                 - alpha1 * math.log(beta1) - tau * math.log(beta2) - sc.gammaln(tau + 1))
        out += math.exp(log_c) * egbmgf(_weak_spec(k, nu, x1, x2, False), cfg, regularize=True)
    return out


def t4(alpha, beta, b, nu, cfg=None, flags=None):
    """E[(1 + b g)^-nu] for g ~ Gamma(alpha, beta)."""
    flags = set() if flags is None else flags
    return math.exp(-sc.gammaln(alpha) - sc.gammaln(nu)) * _g12(alpha, nu, b * beta, cfg, flags)


def t5(alpha1, beta1, alpha2, beta2, b, nu, cfg=None, flags=None):
    """Cross term of the max/min gain density: sum over tau < alpha2."""
    flags = set() if flags is None else flags
    w = omega_tilde(beta1, beta2)
    out = 0.0
    for tau in range(int(alpha2)):
        k = alpha1 + tau
        log_c = (k * math.log(w) - sc.gammaln(alpha1) - sc.gammaln(nu)
                 - alpha1 * math.log(beta1) - tau * math.log(beta2) - sc.gammaln(tau + 1))
        out += math.exp(log_c) * _g12(k, nu, b * w, cfg, flags)
    return out


def t6(alpha1, beta1, alpha2, beta2, a_s, a_tot, p_hat, nu, cfg=None, flags=None):
    """Weak-user term with statistical IL-CSI, sum over tau < alpha2."""
    w = omega_tilde(beta1, beta2)
    x1 = a_s / a_tot
    x2 = 1.0 / (w * a_tot * p_hat)
    out = 0.0
    for tau in range(int(alpha2)):
        k = alpha1 + tau
        log_c = (-k * math.log(a_tot * p_hat) - sc.gammaln(alpha1) - sc.gammaln(nu)
                 - alpha1 * math.log(beta1) - tau * math.log(beta2) - sc.gammaln(tau + 1))
        out += math.exp(log_c) * egbmgf(_weak_spec(k, nu, x1, x2, True), cfg, regularize=True)
    return out


def moment_closed(model: RoleModel, pair: PairStats, cfg: QuadratureConfig | None = None,
                  flags: set | None = None) -> float:
    """Closed-form moment for a role model."""
    flags = set() if flags is None else flags
    n, f, om_p = pair.near, pair.far, pair.pr.omega
    e = model.exponent
    if model.a0:
        if model.kind != "min":
            raise DomainError("interference-limited moments are defined for the min gain only")
        if model.over_pr:
            weak = t3
            extra = (model.a0, model.a1, model.snr, e, om_p)
        else:
            weak = t6
            extra = (model.a0, model.a1, model.snr, e)
        return (weak(n.n, n.omega, f.n, f.omega, *extra, cfg=cfg, flags=flags)
                + weak(f.n, f.omega, n.n, n.omega, *extra, cfg=cfg, flags=flags))
    b = model.a1 * model.snr
    if model.over_pr:
        single = lambda s: t1(s.n, s.omega, b, e, om_p, cfg, flags)
        cross = lambda s1, s2: t2(s1.n, s1.omega, s2.n, s2.omega, b, e, om_p, cfg, flags)
    else:
        single = lambda s: t4(s.n, s.omega, b, e, cfg, flags)
        cross = lambda s1, s2: t5(s1.n, s1.omega, s2.n, s2.omega, b, e, cfg, flags)
    if model.kind == "near":
        return single(n)
    if model.kind == "far":
        return single(f)
    if model.kind == "max":
        return single(n) + single(f) - cross(n, f) - cross(f, n)
    return cross(n, f) + cross(f, n)


def _closed_rate(model, pair, cfg, flags):
    m = moment_closed(model, pair, cfg, flags)
    if not m > 0:
        raise AccuracyError(f"closed-form moment {m!r} not positive", estimate=abs(m))
    return er_from_moment(m, model.nu)


def er_closed_strong(case, pair, sp, ps, cfg=None, flags=None) -> float:
    return _closed_rate(role_model(case, "strong", pair, sp, ps), pair, cfg, flags)


def er_closed_weak(case, pair, sp, ps, cfg=None, flags=None) -> float:
    return _closed_rate(role_model(case, "weak", pair, sp, ps), pair, cfg, flags)


def er_closed(case, pair, sp, ps, cfg=None) -> ErReport:
    flags = set()
    r_s = er_closed_strong(case, pair, sp, ps, cfg, flags)
    r_w = er_closed_weak(case, pair, sp, ps, cfg, flags)
    return ErReport(r_s, r_w, "closed-form", CsiCase(case), frozenset(flags))


# ---------------------------------------------------------------------------
# Quadrature


@dataclass(frozen=True)
class PointMass:
    """Degenerate distribution of the SINR variable, for testing."""

    x0: float


def _scale(model: RoleModel, pair: PairStats) -> float:
    s = pair.near if model.kind == "near" else pair.far if model.kind == "far" else None
    n_omega = s.n * s.omega if s else max(pair.near.n * pair.near.omega, pair.far.n * pair.far.omega)
    return n_omega / pair.pr.omega if model.over_pr else n_omega


_GL16 = np.polynomial.legendre.leggauss(16)
_GL32 = np.polynomial.legendre.leggauss(32)
MAX_PANELS = 20_000


def _panel_rule(fun, a, b, rule):
    """Gauss-Legendre rule on panels [a, b] of u = log x, for ∫ fun(x) dx."""
    t, w = rule
    half = 0.5 * (b - a)
    u = a[:, None] + half[:, None] * (t + 1.0)
    x = np.exp(u)
    with np.errstate(all="ignore"):
        vals = np.nan_to_num(fun(x) * x)
    return half * (vals @ w)


def _positive_integral(fun, center, rtol):
    """∫_0^∞ fun for a non-negative integrand, by adaptive quadrature in log x.

    Panels are bisected until the 16- and 32-point Gauss-Legendre rules
    agree to ``rtol`` (relative to the panel, or to a small share of the
    total).  ``fun`` is called on whole arrays of nodes.
    """
    log10 = math.log(10.0)
    u = math.log(center) + np.linspace(-40.0, 40.0, 321) * log10
    with np.errstate(all="ignore"):
        mass = np.nan_to_num(np.abs(fun(np.exp(u))) * np.exp(u))
    peak = mass.max()
    if peak == 0.0:
        return 0.0, 0.0
    live = np.nonzero(mass > peak * 1e-20)[0]
    lo, hi = u[max(live[0] - 1, 0)], u[min(live[-1] + 1, len(u) - 1)]
    span = hi - lo
    floor = 1e-2 * rtol * np.sum(mass) * (u[1] - u[0])
    edges = np.linspace(lo, hi, max(int(math.ceil(2.0 * span / log10)), 1) + 1)
    a, b = edges[:-1], edges[1:]
    total, err = 0.0, 0.0
    while len(a):
        fine = _panel_rule(fun, a, b, _GL32)
        diff = np.abs(fine - _panel_rule(fun, a, b, _GL16))
        ok = (diff <= rtol * np.abs(fine)) | (diff <= floor * (b - a) / span)
        total += fine[ok].sum()
        err += diff[ok].sum()
        a, b = a[~ok], b[~ok]
        if len(a) > MAX_PANELS:
            total += fine[~ok].sum()
            err += diff[~ok].sum()
            break
        mid = 0.5 * (a + b)
        a, b = np.concatenate([a, mid]), np.concatenate([mid, b])
    return total, err


def moment_quadrature(model: RoleModel, pair: PairStats, density=None, rtol: float = 1e-11):
    """Return ``(moment, complement)`` computed by adaptive quadrature.

    When the moment exceeds 1/2 its complement ``1 - moment`` is integrated
    separately, so rates stay accurate for ``nu -> 0`` (moment close to 1).  ``density`` replaces the gain density: either a
    callable or a :class:`PointMass`.
    """
    e = model.exponent
    if isinstance(density, PointMass):
        lr = float(model.log_ratio(density.x0))
        return math.exp(-e * lr), -math.expm1(-e * lr)
    f = density or channel.gain_density(model.kind, pair, model.over_pr)
    center = _scale(model, pair)
    m, err = _positive_integral(lambda x: f(x) * np.exp(-e * model.log_ratio(x)), center, rtol)
    c = 1.0 - m
    if m > 0.5:
        c, err = _positive_integral(lambda x: -f(x) * np.expm1(-e * model.log_ratio(x)), center, rtol)
    if err > 1e3 * rtol * max(min(m, c), 1e-300):
        raise AccuracyError("quadrature did not reach the requested tolerance", estimate=err)
    return m, c


def er_from_moments(m: float, c: float, nu: float) -> float:
    """Rate from a moment ``m`` and its separately computed complement ``c``.

    Whichever of the two is better conditioned is used.
    """
    if m > 0.5:
        return max(-math.log1p(-c) / (nu * LN2), 0.0)
    return er_from_moment(m, nu)


def er_quadrature(case, role, pair, sp, ps=None, density=None, scheme: str = "NOMA") -> float:
    model = role_model(case, role, pair, sp, ps, scheme)
    m, c = moment_quadrature(model, pair, density)
    return er_from_moments(m, c, model.nu)


def average_rate_quadrature(case, role, pair, sp, ps=None, scheme: str = "NOMA") -> float:
    """E[log2(1 + gamma)] (with the 1/2 time share for OMA)."""
    model = role_model(case, role, pair, sp, ps, scheme)
    f = channel.gain_density(model.kind, pair, model.over_pr)
    v, _ = _positive_integral(lambda x: f(x) * model.log_ratio(x), _scale(model, pair), 1e-11)
    return v / LN2 * (model.exponent / model.nu)
