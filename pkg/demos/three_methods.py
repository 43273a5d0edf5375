"""Compare closed form, quadrature and Monte Carlo for one user pair.

Two-user cell, users at 10 m and 50 m, primary receiver at 40 m, I = 0 dB,
theta = 1, single-antenna links.  The power split is the one that gives the
strong user exactly its OMA rate.
"""
import time

from noma_er.channel import LinkStats, PairStats, path_loss_linear
from noma_er.montecarlo import McConfig, mc_effective_rate
from noma_er.oma import oma_report
from noma_er.power import match_strong_user
from noma_er.rate import ScenarioParams, er_closed, er_quadrature


def main():
    pair = PairStats(LinkStats(path_loss_linear(10.0)), LinkStats(path_loss_linear(50.0)),
                     LinkStats(path_loss_linear(40.0)))
    sp = ScenarioParams(i_peak=1.0, theta=1.0, k=2)
    print(f"nu = {sp.nu:.4f}, I_hat = {sp.i_hat:.3g}")
    print(f"{'case':4}  {'a_s':>8}  {'method':>12}  {'R_s':>8}  {'R_w':>8}  {'sum':>8}  {'time':>7}")
    for case in ("II", "IS", "SI", "SS"):
        ps = match_strong_user(case, pair, sp).split
        rows = []
        t = time.perf_counter()
        rows.append(("closed-form", er_closed(case, pair, sp, ps), time.perf_counter() - t))
        t = time.perf_counter()
        quad = tuple(er_quadrature(case, r, pair, sp, ps) for r in ("strong", "weak"))
        rows.append(("quadrature", quad, time.perf_counter() - t))
        t = time.perf_counter()
        rows.append(("monte-carlo", mc_effective_rate(case, "NOMA", pair, sp, ps, McConfig(1_000_000)),
                     time.perf_counter() - t))
        rows.append(("OMA", oma_report(case, pair, sp), 0.0))
        for name, r, dt in rows:
            r_s, r_w = (r.r_s, r.r_w) if hasattr(r, "r_s") else r
            print(f"{case:4}  {ps.a_s:8.5f}  {name:>12}  {r_s:8.5f}  {r_w:8.5f}  {r_s + r_w:8.5f}  {dt:6.2f}s")


if __name__ == "__main__":
    main()
