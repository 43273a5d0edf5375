"""Sum-ER sweeps over the interference level or the delay exponent.

A sweep is described by a JSON file.  dB-valued fields carry a ``_dB``
suffix; every field is optional and falls back to the defaults below.  One
CSV is written per (CSI case, method) with a column pair ``NOMA_K_N`` /
``OMA_K_N`` per scenario.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .channel import LinkStats, PairStats, PathLossParams, path_loss_linear
from .errors import ConfigError, DomainError
from .montecarlo import McConfig, mc_moments
from .oma import oma_effective_rate
from .pairing import pair_users
from .power import match_strong_user
from .rate import CsiCase, ScenarioParams, er_closed_weak, er_quadrature, role_model

__all__ = ["Scenario", "SweepSpec", "read_config", "validate_config", "run_sweep", "sum_rates", "main"]

log = logging.getLogger(__name__)

AXES = ("I_dB", "theta")
METHODS = ("quad", "closed", "mc")
# the closed forms are validated for nu up to this value
CLOSED_NU_MAX = 40.0

DEFAULTS = {
    "PL_ref_dB": -30.0,
    "d_ref": 1.0,
    "xi": 2.5,
    "d_p": 40.0,
    "B": 1.0,
    "T": 1.0,
    "N0": 1.0,
    "delta": 0.1,
    "I_dB": 0.0,
    "theta": 1.0,
    "axis": "I_dB",
    "I_dB_grid": [float(v) for v in range(-20, 1, 2)],
    "theta_grid": [float(f"{v:.6g}") for v in np.logspace(-2, 3, 11)],
    "scenarios": [
        {"K": 2, "N": 1, "distances": [10.0, 50.0]},
        {"K": 2, "N": 4, "distances": [10.0, 50.0]},
        {"K": 4, "N": 1, "distances": [10.0, 12.0, 50.0, 60.0]},
        {"K": 4, "N": 4, "distances": [10.0, 12.0, 50.0, 60.0]},
    ],
    "cases": ["II", "IS", "SI", "SS"],
    "methods": ["quad"],
    "out": ".",
    "seed": 0,
    "samples": 1_000_000,
    "streams": 8,
    "threads": 1,
}


@dataclass(frozen=True)
class Scenario:
    k: int
    n: int
    distances: tuple

    @property
    def label(self) -> str:
        return f"{self.k}_{self.n}"


@dataclass(frozen=True)
class SweepSpec:
    axis: str
    grid: tuple
    i_db: float
    theta: float
    path_loss: PathLossParams
    d_p: float
    bandwidth: float
    block: float
    n0: float
    delta: float
    scenarios: tuple
    cases: tuple
    methods: tuple
    out: Path
    seed: int = 0
    samples: int = 1_000_000
    streams: int = 8
    threads: int = 1
    inferred: tuple = field(default=(), compare=False)

    def scenario_params(self, x: float, k: int) -> ScenarioParams:
        i_db, theta = (x, self.theta) if self.axis == "I_dB" else (self.i_db, x)
        return ScenarioParams(10.0 ** (i_db / 10.0), theta, k, self.bandwidth, self.block,
                              self.n0, self.delta)


# ---------------------------------------------------------------------------
# Validation


def _positive(name, v):
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v) or v <= 0:
        raise ConfigError(f"{name} must be a positive number, got {v!r}")
    return float(v)


def _number(name, v):
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigError(f"{name} must be a finite number, got {v!r}")
    return float(v)


def _count(name, v, low):
    if isinstance(v, bool) or not isinstance(v, (int, float)) or int(v) != v or v < low:
        raise ConfigError(f"{name} must be an integer >= {low}, got {v!r}")
    return int(v)


def _grid(name, values, check):
    if not isinstance(values, list) or not values:
        raise ConfigError(f"{name} must be a non-empty list")
    out = [check(name, v) for v in values]
    if any(b <= a for a, b in zip(out, out[1:])):
        raise ConfigError(f"{name} must be strictly increasing")
    return tuple(out)


def _scenario(i, raw):
    if not isinstance(raw, dict):
        raise ConfigError(f"scenario {i} must be an object")
    unknown = set(raw) - {"K", "N", "distances"}
    if unknown:
        raise ConfigError(f"scenario {i}: unknown keys {sorted(unknown)}")
    try:
        k, n, d = raw["K"], raw["N"], raw["distances"]
    except KeyError as exc:
        raise ConfigError(f"scenario {i}: missing key {exc.args[0]!r}") from None
    k = _count(f"scenario {i} K", k, 1)
    if k % 2:
        raise ConfigError(f"scenario {i}: K must be even, got {k}")
    n = _count(f"scenario {i} N", n, 1)
    if not isinstance(d, list) or len(d) != k:
        raise ConfigError(f"scenario {i}: distances must list K={k} values")
    return Scenario(k, n, tuple(_positive(f"scenario {i} distance", v) for v in d))


def read_config(path) -> dict:
    """Load a JSON config file; an empty file means all defaults."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    try:
        raw = json.loads(text) if text.strip() else {}
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    return raw


def validate_config(source) -> SweepSpec:
    """Parse a config file path or dict into a :class:`SweepSpec`.

    Every default that was filled in is listed in ``spec.inferred``.
    """
    raw = dict(source) if isinstance(source, dict) else read_config(source)
    unknown = set(raw) - set(DEFAULTS)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    inferred = tuple(f"{k} = {json.dumps(v)}" for k, v in DEFAULTS.items() if k not in raw)
    cfg = {**DEFAULTS, **raw}

    axis = cfg["axis"]
    if axis not in AXES:
        raise ConfigError(f"axis must be one of {AXES}, got {axis!r}")
    grid = (_grid("I_dB_grid", cfg["I_dB_grid"], _number) if axis == "I_dB"
            else _grid("theta_grid", cfg["theta_grid"], _positive))
    delta = _number("delta", cfg["delta"])
    if not 0 < delta < 1:
        raise ConfigError(f"delta must lie in (0, 1), got {delta}")
    if not isinstance(cfg["scenarios"], list) or not cfg["scenarios"]:
        raise ConfigError("scenarios must be a non-empty list")
    scenarios = tuple(_scenario(i, s) for i, s in enumerate(cfg["scenarios"]))
    labels = [s.label for s in scenarios]
    if len(set(labels)) != len(labels):
        raise ConfigError("scenarios must have distinct (K, N)")
    cases = tuple(cfg["cases"]) if isinstance(cfg["cases"], list) else ()
    if not cases or any(c not in CsiCase.__members__ for c in cases):
        raise ConfigError(f"cases must be a non-empty list drawn from {list(CsiCase.__members__)}")
    methods = tuple(cfg["methods"]) if isinstance(cfg["methods"], list) else ()
    if not methods or any(m not in METHODS for m in methods):
        raise ConfigError(f"methods must be a non-empty list drawn from {list(METHODS)}")
    try:
        pl = PathLossParams(_number("PL_ref_dB", cfg["PL_ref_dB"]), _positive("d_ref", cfg["d_ref"]),
                            _positive("xi", cfg["xi"]))
    except DomainError as exc:
        raise ConfigError(str(exc)) from None
    if not isinstance(cfg["out"], str):
        raise ConfigError("out must be a directory path")
    spec = SweepSpec(
        axis=axis,
        grid=grid,
        i_db=_number("I_dB", cfg["I_dB"]),
        theta=_positive("theta", cfg["theta"]),
        path_loss=pl,
        d_p=_positive("d_p", cfg["d_p"]),
        bandwidth=_positive("B", cfg["B"]),
        block=_positive("T", cfg["T"]),
        n0=_positive("N0", cfg["N0"]),
        delta=delta,
        scenarios=scenarios,
        cases=cases,
        methods=methods,
        out=Path(cfg["out"]),
        seed=_count("seed", cfg["seed"], 0),
        samples=_count("samples", cfg["samples"], 10_000),
        streams=_count("streams", cfg["streams"], 1),
        threads=_count("threads", cfg["threads"], 1),
        inferred=inferred,
    )
    if "closed" in methods:
        _check_closed_range(spec)
    return spec


def _check_closed_range(spec: SweepSpec):
    for sc in spec.scenarios:
        for x in spec.grid:
            nu = spec.scenario_params(x, sc.k).nu
            if nu > CLOSED_NU_MAX:
                raise ConfigError(f"closed-form method supports nu <= {CLOSED_NU_MAX:g}; "
                                  f"scenario K={sc.k} at {spec.axis}={x:g} has nu={nu:.4g}")


# ---------------------------------------------------------------------------
# Evaluation


def _pairs(spec: SweepSpec, sc: Scenario):
    omega_p = path_loss_linear(spec.d_p, spec.path_loss)
    out = []
    for up in pair_users(sc.distances):
        out.append(PairStats(LinkStats(path_loss_linear(up.d_near, spec.path_loss), sc.n),
                             LinkStats(path_loss_linear(up.d_far, spec.path_loss), sc.n),
                             LinkStats(omega_p, 1)))
    return out


def _point_seed(spec, *key):
    return int(np.random.SeedSequence(spec.seed, spawn_key=key).generate_state(1)[0])


def sum_rates(spec: SweepSpec, case: str, method: str, sc: Scenario, x: float, key=()) -> tuple:
    """NOMA and OMA sum ER of one scenario at one sweep point."""
    sp = spec.scenario_params(x, sc.k)
    noma = oma = 0.0
    for j, pair in enumerate(_pairs(spec, sc)):
        split_method = "closed-form" if method == "closed" else "quadrature"
        alloc = match_strong_user(case, pair, sp, method=split_method)
        ps = alloc.split
        if method == "quad":
            noma += alloc.achieved + er_quadrature(case, "weak", pair, sp, ps)
            oma += sum(oma_effective_rate(case, r, pair, sp) for r in ("strong", "weak"))
        elif method == "closed":
            noma += alloc.achieved + er_closed_weak(case, pair, sp, ps)
            oma += sum(oma_effective_rate(case, r, pair, sp, "closed-form") for r in ("strong", "weak"))
        else:
            models = [role_model(case, r, pair, sp, ps, s)
                      for s in ("NOMA", "OMA") for r in ("strong", "weak")]
            mc = McConfig(spec.samples, _point_seed(spec, *key, j), spec.streams)
            est = mc_moments(models, pair, mc)
            noma += est[0].rate + est[1].rate
            oma += est[2].rate + est[3].rate
    return noma, oma


def _file_name(axis, case, method):
    stem = "IdB" if axis == "I_dB" else "theta"
    suffix = "" if method == "quad" else f"_{method}"
    return f"Data_Rate_vs_{stem}_{case}{suffix}.csv"


def _table(spec, case, method, pool):
    ci = list(CsiCase.__members__).index(case)
    mi = METHODS.index(method)
    jobs = [(si, xi) for xi in range(len(spec.grid)) for si in range(len(spec.scenarios))]
    run = lambda job: sum_rates(spec, case, method, spec.scenarios[job[0]], spec.grid[job[1]],
                                key=(ci, mi, job[0], job[1]))
    results = dict(zip(jobs, pool.map(run, jobs) if pool else map(run, jobs)))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = [spec.axis]
    for sc in spec.scenarios:
        header += [f"NOMA_{sc.label}", f"OMA_{sc.label}"]
    writer.writerow(header)
    for xi, x in enumerate(spec.grid):
        row = [f"{x:.12g}"]
        for si in range(len(spec.scenarios)):
            row += [f"{v:.12g}" for v in results[(si, xi)]]
        writer.writerow(row)
    return buf.getvalue()


def run_sweep(spec: SweepSpec) -> list[Path]:
    """Write one CSV per (case, method); returns the written paths."""
    out = spec.out
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {out}: {exc.strerror}") from None
    if not os.access(out, os.W_OK):
        raise ConfigError(f"output directory {out} is not writable")
    written = []
    pool = ThreadPoolExecutor(spec.threads) if spec.threads > 1 else None
    try:
        for case in spec.cases:
            for method in spec.methods:
                text = _table(spec, case, method, pool)
                path = out / _file_name(spec.axis, case, method)
                path.write_text(text)
                log.info("wrote %s", path)
                written.append(path)
    finally:
        if pool:
            pool.shutdown()
    return written


# ---------------------------------------------------------------------------
# Command line


def _parser():
    p = argparse.ArgumentParser(prog="noma-er-sweep", description=__doc__.splitlines()[0])
    p.add_argument("--config", help="JSON sweep configuration (defaults apply when omitted)")
    p.add_argument("--axis", choices=AXES)
    p.add_argument("--cases", help="comma-separated CSI cases, e.g. II,SS")
    p.add_argument("--methods", help="comma-separated methods: quad, closed, mc")
    p.add_argument("--out", help="output directory")
    p.add_argument("--seed", type=int)
    p.add_argument("--samples", type=int, help="Monte Carlo samples per point")
    p.add_argument("--threads", type=int)
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(message)s", stream=sys.stderr)
    try:
        raw = read_config(args.config) if args.config else {}
        overrides = {
            "axis": args.axis,
            "cases": args.cases.split(",") if args.cases else None,
            "methods": args.methods.split(",") if args.methods else None,
            "out": args.out,
            "seed": args.seed,
            "samples": args.samples,
            "threads": args.threads,
        }
        raw.update({k: v for k, v in overrides.items() if v is not None})
        spec = validate_config(raw)
        for line in spec.inferred:
            log.info("default: %s", line)
        for path in run_sweep(spec):
            print(path)
    except (ConfigError, DomainError, ArithmeticError, OSError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 2 if isinstance(exc, (ConfigError, DomainError)) else 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
