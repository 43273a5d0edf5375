import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from noma_er.channel import LinkStats, PairStats
from noma_er.errors import DomainError
from noma_er.rate import (CsiCase, PointMass, PowerSplit, RoleModel, ScenarioParams, average_rate_quadrature,
                          er_closed, er_closed_strong, er_closed_weak, er_from_moment, er_from_moments,
                          er_quadrature, moment_closed, moment_quadrature, role_model,
                          transmit_power_instantaneous, transmit_power_statistical)

from conftest import make_pair

CASES = ["II", "IS", "SI", "SS"]
SPLIT = PowerSplit.from_strong(0.2, 2)
# two-user scenario, I = 0 dB, theta = 1, a_s = 0.2; Monte Carlo oracles
# with 1e7 independent draws
SS_STRONG_MC = 1.2199807082401837
II_WEAK_MC = 0.5285663670108895


class TestPower:
    def test_instantaneous(self):
        assert transmit_power_instantaneous(4.0, 2.0) == 0.5
        assert transmit_power_instantaneous(1.0, 1.0) == 1.0
        p = transmit_power_instantaneous(np.array([1.0, 10.0, 1e6]), 1.0)
        assert np.all(np.diff(p) < 0) and p[-1] < 1e-5
        with pytest.raises(DomainError):
            transmit_power_instantaneous(0.0, 1.0)

    def test_statistical(self):
        assert transmit_power_statistical(1.0, 1.0, math.exp(-1.0)) == pytest.approx(1.0, rel=1e-15)
        assert transmit_power_statistical(1.0, 1.0, 0.1) == pytest.approx(1.0 / math.log(10.0), rel=1e-15)
        for delta in (0.0, 1.0, 1.5):
            with pytest.raises(DomainError):
                transmit_power_statistical(1.0, 1.0, delta)

    def test_statistical_outage_probability(self):
        omega_p, i_peak, delta = 2.5e-7, 1.0, 0.1
        p = transmit_power_statistical(omega_p, i_peak, delta)
        g_p = np.random.default_rng(5).exponential(omega_p, 1_000_000)
        assert np.mean(g_p * p > i_peak) == pytest.approx(delta, rel=0.005)


class TestScenario:
    def test_derived_quantities(self):
        sp = ScenarioParams(2.0, 3.0, 4, bandwidth=2.0, block=0.5, n0=0.25, delta=0.1)
        assert sp.pair_bandwidth == 1.0
        assert sp.nu == pytest.approx(3.0 * 0.5 * 1.0 / math.log(2.0))
        assert sp.i_hat == pytest.approx(8.0)
        assert sp.p_hat(2.0) == pytest.approx(-2.0 / (2.0 * math.log(0.1)) / 0.25)

    @pytest.mark.parametrize("kw", [dict(k=3), dict(k=0), dict(theta=0.0), dict(i_peak=-1.0), dict(delta=1.0)])
    def test_invalid(self, kw):
        args = dict(i_peak=1.0, theta=1.0, k=2) | kw
        with pytest.raises((DomainError, ValueError)):
            ScenarioParams(**args)

    def test_power_split(self):
        ps = PowerSplit.from_strong(0.1, 4)
        assert ps.total == pytest.approx(0.5, abs=1e-15) and ps.a_s < ps.a_w
        with pytest.raises(DomainError):
            PowerSplit(0.0, 1.0)

    def test_split_must_use_pair_budget(self, pair, sp):
        with pytest.raises(DomainError):
            role_model("II", "strong", pair, sp, PowerSplit(0.1, 0.5))
        with pytest.raises(DomainError):
            role_model("II", "strong", pair, sp, None)


class TestErFromMoment:
    def test_examples(self):
        assert er_from_moment(1.0, 0.7) == 0.0
        assert er_from_moment(4.0 ** -2.5, 2.5) == pytest.approx(2.0, rel=1e-14)
        assert er_from_moment(0.25, 2.0) == pytest.approx(1.0, rel=1e-15)

    @pytest.mark.parametrize("m", [0.0, -0.1, 1.0 + 1e-9])
    def test_domain(self, m):
        with pytest.raises(DomainError):
            er_from_moment(m, 1.0)

    def test_complement_path_for_small_nu(self):
        nu = 1e-9
        m = 4.0 ** -nu
        assert er_from_moments(m, -math.expm1(-nu * math.log(4.0)), nu) == pytest.approx(2.0, rel=1e-12)


class TestRoleModels:
    @pytest.mark.parametrize("case, kind", [("II", "max"), ("IS", "near"), ("SI", "max"), ("SS", "near")])
    def test_strong_gain(self, case, kind, pair, sp):
        m = role_model(case, "strong", pair, sp, SPLIT)
        assert m.kind == kind and m.a0 == 0.0 and m.a1 == SPLIT.a_s
        assert m.over_pr == (case[0] == "I")

    @pytest.mark.parametrize("case", CASES)
    def test_weak_uses_min_gain(self, case, pair, sp):
        m = role_model(case, "weak", pair, sp, SPLIT)
        assert m.kind == "min" and (m.a1, m.a0) == (SPLIT.total, SPLIT.a_s)

    @pytest.mark.parametrize("case, kind", [("II", "min"), ("IS", "far"), ("SI", "min"), ("SS", "far")])
    def test_oma_models(self, case, kind, pair, sp):
        m = role_model(case, "weak", pair, sp, None, scheme="OMA")
        assert m.kind == kind and m.exponent == sp.nu / 2 and m.a1 == 1.0

    def test_snr_per_case(self, pair, sp):
        assert role_model("II", "strong", pair, sp, SPLIT).snr == sp.i_hat
        assert role_model("SS", "strong", pair, sp, SPLIT).snr == sp.p_hat(pair.pr.omega)


class TestClosedForm:
    @pytest.mark.parametrize("case", CASES)
    @pytest.mark.parametrize("n", [1, 4])
    def test_matches_quadrature(self, case, n, sp):
        pair = make_pair(n)
        rep = er_closed(case, pair, sp, SPLIT)
        assert rep.r_s == pytest.approx(er_quadrature(case, "strong", pair, sp, SPLIT), rel=1e-6)
        assert rep.r_w == pytest.approx(er_quadrature(case, "weak", pair, sp, SPLIT), rel=1e-6)
        assert rep.r_sum == rep.r_s + rep.r_w and rep.method == "closed-form"

    @settings(max_examples=12, deadline=None)
    @given(st.sampled_from(CASES), st.sampled_from(["strong", "weak"]), st.floats(0.2, 20.0),
           st.integers(1, 4), st.integers(1, 4), st.sampled_from([2, 4]), st.floats(0.05, 0.95),
           st.floats(-20.0, 0.0))
    def test_matches_quadrature_property(self, case, role, nu, n_near, n_far, k, frac, i_db):
        pair = PairStats(LinkStats(make_pair().near.omega, n_near), LinkStats(make_pair().far.omega, n_far),
                         make_pair().pr)
        sp = ScenarioParams(10 ** (i_db / 10), nu * math.log(2.0) * k / 2.0, k)
        ps = PowerSplit.from_strong(frac / k, k)
        model = role_model(case, role, pair, sp, ps)
        closed = er_from_moment(moment_closed(model, pair), model.nu)
        assert closed == pytest.approx(er_quadrature(case, role, pair, sp, ps), rel=1e-6)

    def test_ss_strong_derived_value(self, pair, sp):
        assert er_closed_strong("SS", pair, sp, SPLIT) == pytest.approx(SS_STRONG_MC, rel=0.01)

    def test_ii_weak_derived_value(self, pair, sp):
        assert er_closed_weak("II", pair, sp, SPLIT) == pytest.approx(II_WEAK_MC, rel=0.01)

    def test_weak_expression_reuse(self, pair4, sp):
        assert er_closed_weak("II", pair4, sp, SPLIT) == er_closed_weak("IS", pair4, sp, SPLIT)
        assert er_closed_weak("SI", pair4, sp, SPLIT) == er_closed_weak("SS", pair4, sp, SPLIT)

    @pytest.mark.parametrize("case", ["II", "SS"])
    def test_small_nu_limit(self, case, pair):
        sp = ScenarioParams(1.0, 1e-6, 2)
        for role in ("strong", "weak"):
            closed = (er_closed_strong if role == "strong" else er_closed_weak)(case, pair, sp, SPLIT)
            avg = average_rate_quadrature(case, role, pair, sp, SPLIT)
            assert closed == pytest.approx(avg, rel=0.005)

    def test_weak_interference_limited_needs_min(self, pair, sp):
        model = RoleModel("near", True, 1.0, 1.0, 0.5, 1.0, 1.0)
        with pytest.raises(DomainError):
            moment_closed(model, pair)


class TestQuadrature:
    def test_point_mass(self, pair, sp):
        model = role_model("II", "strong", pair, sp, SPLIT)
        x0 = 3.0 / (model.a1 * model.snr)
        assert er_quadrature("II", "strong", pair, sp, SPLIT, density=PointMass(x0)) == pytest.approx(2.0, rel=1e-14)

    def test_weak_limit_small_a_s(self, pair, sp):
        ps = PowerSplit.from_strong(1e-12, 2)
        weak = er_quadrature("II", "weak", pair, sp, ps)
        model = RoleModel("min", True, sp.i_hat, 1.0, 0.0, sp.nu, sp.nu)
        m, c = moment_quadrature(model, pair)
        assert weak == pytest.approx(er_from_moments(m, c, sp.nu), rel=1e-9)

    @pytest.mark.parametrize("case", CASES)
    def test_monotone_in_theta_and_interference(self, case, pair):
        thetas = np.logspace(-2, 2, 10)
        levels = np.linspace(-20.0, 0.0, 10)
        for role in ("strong", "weak"):
            by_theta = [er_quadrature(case, role, pair, ScenarioParams(1.0, t, 2), SPLIT) for t in thetas]
            by_level = [er_quadrature(case, role, pair, ScenarioParams(10 ** (l / 10), 1.0, 2), SPLIT)
                        for l in levels]
            assert np.all(np.diff(by_theta) <= 1e-12)
            assert np.all(np.diff(by_level) >= -1e-12)

    @pytest.mark.parametrize("case", CASES)
    @pytest.mark.parametrize("scheme", ["NOMA", "OMA"])
    def test_jensen_bound(self, case, scheme, pair4, sp):
        for role in ("strong", "weak"):
            er = er_quadrature(case, role, pair4, sp, SPLIT, scheme=scheme)
            assert er <= average_rate_quadrature(case, role, pair4, sp, SPLIT, scheme=scheme) + 1e-9

    @pytest.mark.parametrize("n", [1, 4])
    def test_dominance(self, n, sp):
        pair = make_pair(n)
        r = {c: er_quadrature(c, "strong", pair, sp, SPLIT) for c in CASES}
        assert r["II"] >= r["IS"] and r["SI"] >= r["SS"]

    def test_case_enum(self):
        assert CsiCase("IS").instantaneous_il and not CsiCase("IS").instantaneous_sl
        with pytest.raises(ValueError):
            CsiCase("XX")
