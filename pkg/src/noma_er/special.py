"""Gamma function, Meijer G-function and bivariate Meijer G-function numerics.

All Meijer-type functions are evaluated directly from their Mellin-Barnes
representation: a vertical contour is placed between the left and right pole
groups of the gamma products and integrated with composite Gauss-Legendre
panels that are graded towards the real axis, where the integrand is sharpest.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import special as sc

from .errors import AccuracyError, DomainError

__all__ = [
    "QuadratureConfig",
    "MeijerGSpec",
    "Egbmgf2Spec",
    "ContourResult",
    "ln_gamma",
    "meijer_g",
    "egbmgf",
]

# shift applied to coalescing upper parameters
PERTURBATION = 1e-6


@dataclass(frozen=True)
class QuadratureConfig:
    """Contour quadrature settings.

    ``nodes`` is the node budget per integration axis for the uniform part of
    the mesh; graded panels near the real axis come on top of it.
    """

    rtol: float = 1e-10
    atol: float = 1e-300
    half_height: float = 40.0
    nodes: int = 512
    pole_eps: float = 1e-8
    panel_order: int = 16
    max_half_height: float = 640.0

    def __post_init__(self):
        if self.rtol <= 0 or self.atol <= 0:
            raise DomainError("tolerances must be positive")
        if self.half_height <= 0:
            raise DomainError("half_height must be positive")
        if self.nodes < 64:
            raise DomainError("node budget must be at least 64")
        if self.pole_eps <= 0:
            raise DomainError("pole_eps must be positive")


@dataclass(frozen=True)
class MeijerGSpec:
    """Parameters of ``G^{m,n}_{p,q}(z | a; b)``."""

    m: int
    n: int
    a: tuple
    b: tuple
    z: float
    p: int = field(init=False)
    q: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(float(v) for v in self.a))
        object.__setattr__(self, "b", tuple(float(v) for v in self.b))
        object.__setattr__(self, "p", len(self.a))
        object.__setattr__(self, "q", len(self.b))
        if not (0 <= self.m <= self.q and 0 <= self.n <= self.p):
            raise DomainError(f"invalid orders m={self.m}, n={self.n}, p={self.p}, q={self.q}")
        if not self.z > 0:
            raise DomainError("z must be positive")


@dataclass(frozen=True)
class Egbmgf2Spec:
    """Parameters of the extended generalized bivariate Meijer G-function.

    Each block is an ``(upper, lower)`` pair. Supported block shapes are
    ``G^{1,1:1,1:1,1}_{1,1:1,1:1,1}`` and ``G^{1,1:1,1:1,0}_{1,1:1,1:0,1}``,
    i.e. ``outer = ([a], [b])``, ``inner1 = ([c], [d])`` and
    ``inner2 = ([e], [f])`` or ``([], [f])``.  The value is

        (2 pi i)^-2 ∬ Γ(1-a+s+t) Γ(b-s-t) Γ(1-c+s) Γ(d-s) Γ(1-e+t) Γ(f-t) z1^s z2^t ds dt
    """

    outer: tuple
    inner1: tuple
    inner2: tuple
    z1: float
    z2: float

    def __post_init__(self):
        def block(bl):
            up, lo = bl
            return tuple(float(v) for v in up), tuple(float(v) for v in lo)

        outer, inner1, inner2 = block(self.outer), block(self.inner1), block(self.inner2)
        object.__setattr__(self, "outer", outer)
        object.__setattr__(self, "inner1", inner1)
        object.__setattr__(self, "inner2", inner2)
        if len(outer[0]) != 1 or len(outer[1]) != 1 or len(inner1[0]) != 1 or len(inner1[1]) != 1:
            raise DomainError("outer and first inner block must be 1,1:1,1")
        if len(inner2[1]) != 1 or len(inner2[0]) > 1:
            raise DomainError("second inner block must be 1,1:1,1 or 1,0:0,1")
        if not (self.z1 > 0 and self.z2 > 0):
            raise DomainError("z1 and z2 must be positive")


@dataclass(frozen=True)
class ContourResult:
    value: float
    error: float
    perturbed: bool = False


def ln_gamma(x):
    """Natural log of the gamma function for positive real ``x``."""
    x_arr = np.asarray(x, dtype=float)
    if np.any(~(x_arr > 0)):
        raise DomainError("ln_gamma requires x > 0")
    out = sc.gammaln(x_arr)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# Mesh construction


def _half_edges(L, d, h):
    """Panel edges on [0, L]: geometric near 0 (scale d), then width ~h."""
    edges = [0.0]
    w = min(d / 8.0, h)
    x = 0.0
    while x + w < L:
        x += w
        edges.append(x)
        w = min(2.0 * w, h)
    edges.append(L)
    return np.asarray(edges)


def _line_nodes(L, d, n_uniform, order):
    n_panels = max(n_uniform // order, 2)
    h = 2.0 * L / n_panels
    edges = _half_edges(L, d, h)
    edges = np.concatenate([-edges[:0:-1], edges])
    x, w = np.polynomial.legendre.leggauss(order)
    lo, hi = edges[:-1, None], edges[1:, None]
    half = 0.5 * (hi - lo)
    nodes = (lo + half * (x + 1.0)).ravel()
    weights = (half * w).ravel()
    return nodes, weights


# ---------------------------------------------------------------------------
# One-dimensional Mellin-Barnes line integrals
#
# A factor (shift, coef) stands for Γ(shift + coef * s) with coef = ±1.


def _log_gamma_product(num, den, s):
    out = np.zeros(np.shape(s), dtype=complex)
    for shift, coef in num:
        out += sc.loggamma(shift + coef * s)
    for shift, coef in den:
        out -= sc.loggamma(shift + coef * s)
    return out


def _pole_starts(num):
    left = [-shift for shift, coef in num if coef > 0]
    right = [shift for shift, coef in num if coef < 0]
    return left, right


def _distance_to_poles(x, num):
    """Distance from real point x to the nearest pole of the numerator."""
    best = np.inf
    for shift, coef in num:
        # poles where shift + coef*x = -k
        g = shift + coef * x
        if g <= 0:
            best = min(best, abs(g - round(g)))
        else:
            best = min(best, g)
    return best


def _trimmed_half_height(logf, c, cfg, probe_scale):
    """Envelope-based truncation of the line, doubling L while the tail is large."""
    L = cfg.half_height
    cut = math.log(cfg.rtol) - 8.0
    while True:
        y = np.linspace(-L, L, 801)
        lf = logf(c + 1j * y).real
        lf = np.where(np.isfinite(lf), lf, -np.inf)
        peak = lf.max()
        above = np.nonzero(lf > peak + cut)[0]
        y_hi = max(abs(y[above[0]]), abs(y[above[-1]]))
        if y_hi < L * 0.99:
            return min(L, y_hi + 2.0 * probe_scale + 1.0)
        if L >= cfg.max_half_height:
            raise AccuracyError(
                "contour truncation did not converge",
                estimate=float(np.exp(max(lf[0], lf[-1]) - peak)),
            )
        L *= 2.0


def _line_integral(num, den, log_z, c, d, cfg, nodes=None):
    """(1/2πi) ∫_{c-i∞}^{c+i∞} Π Γ(num)/Π Γ(den) exp(s log_z) ds, complex."""

    def logf(s):
        return _log_gamma_product(num, den, s) + s * log_z

    L = _trimmed_half_height(logf, c, cfg, d)
    n = cfg.nodes if nodes is None else nodes
    y, w = _line_nodes(L, d, n, cfg.panel_order)
    lf = logf(c + 1j * y)
    scale = lf.real.max()
    total = np.sum(w * np.exp(lf - scale)) / (2.0 * np.pi)
    return total * math.exp(scale)


def _geometric_error(fine, coarse):
    """Error of ``fine`` assuming geometric convergence from half the nodes."""
    diff = abs(fine - coarse)
    size = abs(fine)
    if size == 0.0 or diff >= 1e-2 * size:
        return diff
    return diff * diff / size


def _refine(evaluate, cfg):
    """Double the node budget until the geometric error estimate meets rtol."""
    n = cfg.nodes
    coarse = evaluate(n // 2)
    while True:
        fine = evaluate(n)
        err = _geometric_error(fine, coarse)
        if err <= max(cfg.rtol * abs(fine), cfg.atol) or n >= 4 * cfg.nodes:
            return fine, err
        coarse, n = fine, 2 * n


def _line_value(num, den, log_z, c, d, cfg):
    return _refine(lambda n: _line_integral(num, den, log_z, c, d, cfg, nodes=n), cfg)


def _best_abscissa(num, den, log_z, lo, hi, cfg):
    """Abscissa in (lo, hi) minimizing ∫|integrand| along the vertical line.

    The integral itself does not depend on the abscissa, so this minimizes
    the cancellation, which grows like ``z^c`` when ``|log z|`` is large.
    Returns the abscissa and its distance to the nearest pole.
    """
    if np.isinf(lo) and np.isinf(hi):
        lo, hi = -1.0, 1.0
    elif np.isinf(lo):
        lo = hi - max(1.0, 2.0 * abs(log_z))
    elif np.isinf(hi):
        hi = lo + max(1.0, 2.0 * abs(log_z))
    width = hi - lo
    y, w = _line_nodes(cfg.half_height, 0.05 * width, 256, 8)
    best = None
    for frac in np.linspace(0.05, 0.95, 19):
        c = lo + frac * width
        lf = (_log_gamma_product(num, den, c + 1j * y) + (c + 1j * y) * log_z).real
        peak = lf.max()
        score = peak + math.log(np.sum(w * np.exp(lf - peak)))
        if best is None or score < best[0]:
            best = (score, c)
    c = best[1]
    d = min(_distance_to_poles(c, num), width)
    return c, d


def _check_real(value, what):
    if abs(value.imag) > 1e-8 * max(abs(value.real), 1e-300):
        raise AccuracyError(f"{what}: imaginary residue {value.imag:.3e}", estimate=abs(value.imag))
    return float(value.real)


def _meijer_factors(spec):
    a, b, m, n = spec.a, spec.b, spec.m, spec.n
    num = [(bj, -1.0) for bj in b[:m]] + [(1.0 - aj, 1.0) for aj in a[:n]]
    den = [(1.0 - bj, 1.0) for bj in b[m:]] + [(aj, -1.0) for aj in a[n:]]
    return num, den


def meijer_g(spec: MeijerGSpec, cfg: QuadratureConfig | None = None, full_output: bool = False):
    """Meijer G-function ``G^{m,n}_{p,q}(z | a; b)`` for real parameters.

    The contour is the vertical line through the midpoint of the gap between
    the poles of ``Γ(b_j - s)`` and those of ``Γ(1 - a_k + s)``.  Requires
    ``m + n > (p + q)/2`` so that the line integral converges for ``z > 0``.

    If the two pole groups (nearly) touch, the upper parameters of the left
    group are shifted by ``PERTURBATION`` and ``perturbed`` is set in the
    full output.
    """
    cfg = cfg or QuadratureConfig()
    if 2 * (spec.m + spec.n) <= spec.p + spec.q:
        raise DomainError("vertical contour diverges: need m + n > (p + q)/2")
    num, den = _meijer_factors(spec)
    left, right = _pole_starts(num)
    lo = max(left) if left else -np.inf
    hi = min(right) if right else np.inf
    perturbed = False
    if hi - lo <= cfg.pole_eps:
        if hi - lo < -cfg.pole_eps:
            raise DomainError("pole groups interleave; no separating vertical contour")
        num = [(shift + PERTURBATION, coef) if coef > 0 else (shift, coef) for shift, coef in num]
        lo -= PERTURBATION
        perturbed = True
    log_z = math.log(spec.z)
    c, d = _best_abscissa(num, den, log_z, lo, hi, cfg)
    value, err = _line_value(num, den, log_z, c, d, cfg)
    val = _check_real(value, "meijer_g")
    if err > max(cfg.rtol * abs(val), cfg.atol):
        raise AccuracyError(f"meijer_g error estimate {err:.3e} above tolerance", estimate=err)
    if full_output:
        return ContourResult(val, err, perturbed)
    return val


# ---------------------------------------------------------------------------
# Bivariate function


def _choose_contour(a, b, c, d, e, f):
    """Pick (u, sigma): u = Re(s+t) in the outer strip, sigma = Re(s).

    Returns (u, sigma, tau, d_u, d_sigma, d_tau).
    """
    u_hi = min(b, d + f)
    u_lo = a - 1.0
    if not u_lo < u_hi:
        raise DomainError("outer block admits no contour strip")
    u = 0.5 * (u_lo + u_hi)
    d_u = 0.5 * (u_hi - u_lo)
    # sigma < d, tau = u - sigma in (e-1, f); prefer sigma in (d-1, d)
    s_lo = u - f
    if e is not None:
        s_hi = min(d, u - e + 1.0)
    else:
        s_hi = d
    s_lo = max(s_lo, d - 1.0)
    if not s_lo < s_hi:
        raise DomainError("inner blocks admit no contour")
    cand = np.linspace(s_lo, s_hi, 403)[1:-1]
    inner1 = [(1.0 - c, 1.0), (d, -1.0)]
    inner2 = [(f, -1.0)] + ([(1.0 - e, 1.0)] if e is not None else [])
    best, arg = -1.0, None
    for sig in cand:
        tau = u - sig
        ds = _distance_to_poles(sig, inner1)
        dt = _distance_to_poles(tau, inner2)
        # crossed residue poles in t sit at b - p_k + i = b - c + 1 + k + i
        x = tau - (b - c + 1.0)
        dq = abs(x - round(x))
        score = min(ds, dt, dq)
        if score > best:
            best, arg = score, (sig, tau, ds, dt)
    sig, tau, ds, dt = arg
    return u, sig, tau, d_u, ds, dt


def _plane_integral(a, b, c, d, e, f, lz1, lz2, u0, tau0, d_u, d_t, L_u, L_t, cfg, n, regular):
    """V x V part in (u, t) coordinates, s = u - t."""
    yu, wu = _line_nodes(L_u, d_u, n, cfg.panel_order)
    yt, wt = _line_nodes(L_t, d_t, n, cfg.panel_order)
    u = u0 + 1j * yu
    t = tau0 + 1j * yt
    log_outer = sc.loggamma(1.0 - a + u) + sc.loggamma(b - u) + u * lz1
    log_t = sc.loggamma(f - t) + t * (lz2 - lz1)
    if e is not None:
        log_t = log_t + sc.loggamma(1.0 - e + t)
    s = u[:, None] - t[None, :]
    log_s = sc.loggamma(1.0 - c + s) + sc.loggamma(d - s)
    log_f = log_outer[:, None] + log_t[None, :] + log_s
    if regular:
        log_f = log_f - sc.loggamma(1.0 + d - c + 0j)
    scale = log_f.real.max()
    vals = np.exp(log_f - scale)
    total = wu @ vals @ wt / (2.0 * np.pi) ** 2
    return total * math.exp(scale)


def _plane_extent(a, b, c, d, e, f, lz1, lz2, u0, tau0, cfg):
    """Half-heights along u and t where the integrand envelope is negligible."""
    L = cfg.half_height
    cut = math.log(cfg.rtol) - 8.0
    while True:
        y = np.linspace(-L, L, 321)
        u = u0 + 1j * y
        t = tau0 + 1j * y
        lo = (sc.loggamma(1.0 - a + u) + sc.loggamma(b - u) + u * lz1).real
        lt = (sc.loggamma(f - t) + t * (lz2 - lz1)).real
        if e is not None:
            lt = lt + sc.loggamma(1.0 - e + t).real
        s = u[:, None] - t[None, :]
        ls = (sc.loggamma(1.0 - c + s) + sc.loggamma(d - s)).real
        lf = lo[:, None] + lt[None, :] + ls
        lf = np.where(np.isfinite(lf), lf, -np.inf)
        peak = lf.max()
        mask = lf > peak + cut
        iu = np.nonzero(mask.any(axis=1))[0]
        it = np.nonzero(mask.any(axis=0))[0]
        Lu = max(abs(y[iu[0]]), abs(y[iu[-1]]))
        Lt = max(abs(y[it[0]]), abs(y[it[-1]]))
        if max(Lu, Lt) < 0.99 * L:
            step = y[1] - y[0]
            return min(L, Lu + 2 * step + 1.0), min(L, Lt + 2 * step + 1.0)
        if L >= cfg.max_half_height:
            raise AccuracyError("bivariate contour truncation did not converge", estimate=np.inf)
        L *= 2.0


def _egbmgf_core(spec, cfg, regular, n):
    (a,), (b,) = spec.outer
    (c,), (d,) = spec.inner1
    e = spec.inner2[0][0] if spec.inner2[0] else None
    (f,) = spec.inner2[1]
    lz1, lz2 = math.log(spec.z1), math.log(spec.z2)

    u0, sig, tau0, d_u, d_s, d_t = _choose_contour(a, b, c, d, e, f)
    L_u, L_t = _plane_extent(a, b, c, d, e, f, lz1, lz2, u0, tau0, cfg)
    total = _plane_integral(a, b, c, d, e, f, lz1, lz2, u0, tau0, d_u, d_t, L_u, L_t, cfg, n, regular)

    # left poles p_k = c - 1 - k of Γ(1-c+s) that sit right of the s-line
    inner2_num = [(f, -1.0)] + ([(1.0 - e, 1.0)] if e is not None else [])
    k = 0
    while c - 1.0 - k > sig:
        p = c - 1.0 - k
        if regular:
            coef = sc.poch(1.0 + d - c, k) / math.factorial(k)
        else:
            coef = sc.gamma(d - p) / math.factorial(k)
        coef *= (-1.0) ** k * math.exp(p * lz1)
        num = [(1.0 - a + p, 1.0), (b - p, -1.0)] + inner2_num
        d_line = _distance_to_poles(tau0, num)
        line = _line_integral(num, [], lz2, tau0, max(d_line, 1e-12), replace(cfg, nodes=n))
        # right poles of Γ(b-p-t) that ended up left of the t-line
        corr = 0.0
        i = 0
        while b - p + i < tau0:
            q = b - p + i
            lg = sc.loggamma(1.0 - a + p + q + 0j) + sc.loggamma(f - q + 0j) + q * lz2
            if e is not None:
                lg = lg + sc.loggamma(1.0 - e + q + 0j)
            corr += (-1.0) ** i / math.factorial(i) * np.exp(lg)
            i += 1
        total = total + coef * (line + corr)
        k += 1
    return total


def egbmgf(spec: Egbmgf2Spec, cfg: QuadratureConfig | None = None, *, regularize: bool = False,
           full_output: bool = False):
    """Extended generalized bivariate Meijer G-function for the supported classes.

    The double integral is taken over a tensor product of vertical lines,
    parametrized by ``u = s + t`` and ``t``.  When the first inner block has
    no separating line (``c - 1 >= d``, as for ``(1 + z)^ν`` kernels) the
    left poles of ``Γ(1 - c + s)`` lying right of the s-line are added back as
    one-dimensional line integrals, together with the right poles of the
    outer block they drag across the t-line.

    With ``regularize=True`` the result is divided by ``Γ(1 + d - c)``, which
    stays finite when that gamma function has a pole (integer exponents).
    """
    cfg = cfg or QuadratureConfig()
    (c,), (d,) = spec.inner1
    perturbed = False
    if not regularize:
        g = 1.0 + d - c
        if g <= 0 and abs(g - round(g)) < cfg.pole_eps:
            spec = Egbmgf2Spec(spec.outer, ((c + PERTURBATION,), (d,)), spec.inner2, spec.z1, spec.z2)
            perturbed = True
    fine, err = _refine(lambda n: _egbmgf_core(spec, cfg, regularize, n), cfg)
    val = _check_real(fine, "egbmgf")
    if err > max(cfg.rtol * abs(val), cfg.atol):
        raise AccuracyError(f"egbmgf error estimate {err:.3e} above tolerance", estimate=err)
    if full_output:
        return ContourResult(val, err, perturbed)
    return val
