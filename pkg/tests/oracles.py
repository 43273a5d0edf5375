"""Grid-scan oracle for the matched power split.

The gain density does not depend on a_s, so it is tabulated once on a fixed
Gauss-Legendre mesh in log x and the strong-user moment is then evaluated for
every grid value of a_s at once.
"""
import math

import numpy as np

from noma_er.channel import gain_density
from noma_er.rate import role_model


def log_mesh(center, lo=-14.0, hi=10.0, panels=960, order=16):
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(lo * math.log(10.0), hi * math.log(10.0), panels + 1)
    a, b = edges[:-1, None], edges[1:, None]
    u = (a + 0.5 * (b - a) * (x + 1.0)).ravel()
    wu = (0.5 * (b - a) * w).ravel()
    t = center * np.exp(u)
    return t, wu * t


def strong_rates_on_grid(case, pair, sp, a_grid):
    """NOMA strong-user ER for each a_s in ``a_grid``."""
    model = role_model(case, "strong", pair, sp, scheme="OMA")
    scale = max(pair.near.n * pair.near.omega, pair.far.n * pair.far.omega)
    if model.over_pr:
        scale /= pair.pr.omega
    x, w = log_mesh(scale)
    fw = gain_density(model.kind, pair, model.over_pr)(x) * w
    a = np.asarray(a_grid, dtype=float)[:, None]
    lr = np.log1p(a * model.snr * x[None, :])
    m = (fw[None, :] * np.exp(-sp.nu * lr)).sum(axis=1)
    return -np.log2(m) / sp.nu


def grid_crossing(case, pair, sp, target, n=10_000):
    """a_s where the grid-scanned strong-user ER first reaches ``target``."""
    grid = np.linspace(0.0, 1.0 / sp.k, n + 2)[1:-1]
    r = strong_rates_on_grid(case, pair, sp, grid)
    above = np.nonzero(r >= target)[0]
    if not len(above):
        return None
    j = above[0]
    if j == 0:
        return grid[0]
    return grid[j - 1] + (target - r[j - 1]) * (grid[j] - grid[j - 1]) / (r[j] - r[j - 1])
