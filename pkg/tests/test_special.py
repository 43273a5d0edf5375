import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from noma_er.errors import AccuracyError, DomainError
from noma_er.rate import t1, t2, t3, t4, t5, t6
from noma_er.special import Egbmgf2Spec, MeijerGSpec, QuadratureConfig, egbmgf, ln_gamma, meijer_g

import terms

# G22 at z = 2 from the real-axis integral of its ratio-kernel representation
G22_REF = 0.234863302736549
# single (alpha1, tau) = (1, 0) weak-user terms of the two-user scenario,
# a_s = 0.05, a_tot = 1, nu = 1/ln 2, from 1-D quadrature
T3_REF = 0.009287227069333498
T6_REF = 0.013689809565328592


def g11(z, nu, cfg=None):
    return meijer_g(MeijerGSpec(1, 1, (1.0 - nu,), (0.0,), z), cfg)


class TestLnGamma:
    @pytest.mark.parametrize("x, expected", [(5.0, math.log(24.0)), (1.0, 0.0),
                                             (0.5, 0.5 * math.log(math.pi))])
    def test_values(self, x, expected):
        assert ln_gamma(x) == pytest.approx(expected, abs=1e-14)

    @pytest.mark.parametrize("x", [0.0, -1.0, float("nan")])
    def test_domain(self, x):
        with pytest.raises(DomainError):
            ln_gamma(x)

    @given(st.floats(0.01, 150.0))
    def test_recurrence(self, x):
        assert ln_gamma(x + 1.0) - ln_gamma(x) == pytest.approx(math.log(x), abs=1e-11 * max(1.0, ln_gamma(x + 1.0)))


class TestMeijerG:
    def test_examples(self):
        assert meijer_g(MeijerGSpec(1, 1, (-1.0,), (0.0,), 1.0)) == pytest.approx(0.25, rel=1e-12)
        assert meijer_g(MeijerGSpec(1, 1, (0.0,), (0.0,), 3.0)) == pytest.approx(0.25, rel=1e-12)

    @pytest.mark.parametrize("nu", [0.5, 1.3, 2.7])
    @pytest.mark.parametrize("z", [0.1, 1.0, 10.0])
    def test_reduction_identity(self, nu, z):
        exact = math.gamma(nu) * (1.0 + z) ** -nu
        assert abs(g11(z, nu) - exact) <= 1e-9 * exact

    @settings(max_examples=40, deadline=None)
    @given(st.floats(0.2, 20.0), st.floats(-6.0, 6.0))
    def test_reduction_identity_property(self, nu, log10_z):
        z = 10.0 ** log10_z
        exact = math.exp(math.lgamma(nu) - nu * math.log1p(z))
        assert g11(z, nu) == pytest.approx(exact, rel=1e-9)

    def test_g22_derived_value(self):
        assert meijer_g(MeijerGSpec(2, 2, (-1.0, 0.0), (0.0, 0.4427), 2.0)) == pytest.approx(G22_REF, rel=1e-9)

    @pytest.mark.parametrize("m, n, a, b, z", [
        (2, 2, (-2.0, -1.0), (0.0, 1.3), 0.7),
        (2, 2, (-3.0, -2.0), (0.0, 12.5), 40.0),
        (2, 2, (-1.0, 0.0), (0.0, 0.25), 1e-3),
        (1, 2, (-0.6, -2.0), (0.0,), 5.0),
        (1, 2, (-14.0, -3.0), (0.0,), 0.02),
    ])
    def test_against_mpmath(self, m, n, a, b, z):
        an = [list(a[:n]), list(a[n:])]
        bm = [list(b[:m]), list(b[m:])]
        with mpmath.workdps(30):
            ref = complex(mpmath.meijerg(an, bm, z))
        assert abs(ref.imag) < 1e-12 * abs(ref.real)
        ref = ref.real
        assert meijer_g(MeijerGSpec(m, n, a, b, z)) == pytest.approx(ref, rel=1e-9)

    def test_same_side_coalescence_needs_no_perturbation(self):
        # integer nu gives a double pole on one side; the contour does not care
        r = meijer_g(MeijerGSpec(2, 2, (-1.0, 0.0), (0.0, 1.0), 2.0), full_output=True)
        assert not r.perturbed
        with mpmath.workdps(30):
            ref = float(mpmath.re(mpmath.meijerg([[-1, 0], []], [[0, 1 + mpmath.mpf("1e-20")], []], 2)))
        assert r.value == pytest.approx(ref, rel=1e-9)

    def test_touching_pole_groups_are_flagged(self):
        r = meijer_g(MeijerGSpec(1, 1, (1.0,), (0.0,), 0.5), full_output=True)
        assert r.perturbed
        assert math.isfinite(r.value)

    def test_refinement_consistency(self):
        spec = MeijerGSpec(2, 2, (-2.0, -1.0), (0.0, 3.3), 0.4)
        coarse = QuadratureConfig(rtol=1e-8, nodes=128)
        fine = QuadratureConfig(rtol=1e-8, nodes=1024)
        assert meijer_g(spec, coarse) == pytest.approx(meijer_g(spec, fine), rel=1e-8)

    def test_error_estimate_non_increasing(self):
        spec = MeijerGSpec(2, 2, (-3.0, -2.0), (0.0, 7.1), 3.0)
        errs = [meijer_g(spec, QuadratureConfig(nodes=n), full_output=True).error for n in (128, 256, 512)]
        assert all(b <= a or b < 1e-15 for a, b in zip(errs, errs[1:]))

    def test_divergent_contour_rejected(self):
        with pytest.raises(DomainError):
            meijer_g(MeijerGSpec(1, 0, (0.5,), (0.0, 0.3), 1.0))

    def test_invalid_spec(self):
        with pytest.raises(DomainError):
            MeijerGSpec(2, 1, (0.0,), (0.0,), 1.0)
        with pytest.raises(DomainError):
            MeijerGSpec(1, 1, (0.0,), (0.0,), -1.0)

    def test_truncation_failure_reports_estimate(self):
        cfg = QuadratureConfig(half_height=1.0, max_half_height=1.0)
        with pytest.raises(AccuracyError) as info:
            meijer_g(MeijerGSpec(1, 1, (0.0,), (0.0,), 1.0), cfg)
        assert info.value.estimate is not None


def weak_spec(k, nu, x1, x2, exponential):
    inner2 = ((), (0.0,)) if exponential else ((-k,), (0.0,))
    return Egbmgf2Spec(((1.0 - k,), (nu - k,)), ((1.0 + nu,), (0.0,)), inner2, x1, x2)


class TestEgbmgf:
    def test_t3_term(self, pair, sp):
        v = t3(1, pair.near.omega, 1, pair.far.omega, 0.05, 1.0, sp.i_hat, sp.nu, pair.pr.omega)
        assert v == pytest.approx(T3_REF, rel=1e-6)

    def test_t6_term(self, pair, sp):
        p_hat = sp.p_hat(pair.pr.omega)
        v = t6(1, pair.near.omega, 1, pair.far.omega, 0.05, 1.0, p_hat, sp.nu)
        assert v == pytest.approx(T6_REF, rel=1e-6)

    @pytest.mark.parametrize("exponential", [False, True])
    def test_refinement_consistency(self, exponential):
        spec = weak_spec(2.0, 2.3, 0.3, 0.8, exponential)
        coarse = egbmgf(spec, QuadratureConfig(rtol=1e-8, nodes=128), regularize=True)
        fine = egbmgf(spec, QuadratureConfig(rtol=1e-8, nodes=512), regularize=True)
        assert coarse == pytest.approx(fine, rel=1e-8)

    def test_regularized_matches_plain(self):
        # away from integer exponents the two differ by the factor Γ(-nu)
        nu = 1.7
        spec = weak_spec(1.0, nu, 0.2, 0.5, True)
        plain = egbmgf(spec)
        reg = egbmgf(spec, regularize=True)
        assert plain == pytest.approx(reg * math.gamma(-nu), rel=1e-8)

    def test_integer_exponent_is_perturbed_when_not_regularized(self):
        r = egbmgf(weak_spec(1.0, 2.0, 0.2, 0.5, True), full_output=True)
        assert r.perturbed

    def test_bad_blocks(self):
        with pytest.raises(DomainError):
            Egbmgf2Spec(((0.0, 1.0), (0.0,)), ((1.0,), (0.0,)), ((), (0.0,)), 1.0, 1.0)
        with pytest.raises(DomainError):
            Egbmgf2Spec(((0.0,), (0.0,)), ((1.0,), (0.0,)), ((), (0.0,)), 0.0, 1.0)


@pytest.mark.slow
def test_terms_match_defining_integrals():
    """T1..T6 against their real-axis integrals on 50 random parameter sets."""
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(50):
        p = terms.random_term_params(rng)
        nu, a1, a2, b1, b2, om, b, a_s, a_tot = (p[k] for k in
                                                  ("nu", "a1", "a2", "b1", "b2", "omega_p", "b", "a_s", "a_tot"))
        s_hat = b / a_tot
        pairs = [
            (t1(a1, b1, b, nu, om), terms.t1_ref(a1, b1, b, nu, om)),
            (t2(a1, b1, a2, b2, b, nu, om), terms.t2_ref(a1, b1, a2, b2, b, nu, om)),
            (t3(a1, b1, a2, b2, a_s, a_tot, s_hat, nu, om), terms.t3_ref(a1, b1, a2, b2, a_s, a_tot, s_hat, nu, om)),
            (t4(a1, b1, b, nu), terms.t4_ref(a1, b1, b, nu)),
            (t5(a1, b1, a2, b2, b, nu), terms.t5_ref(a1, b1, a2, b2, b, nu)),
            (t6(a1, b1, a2, b2, a_s, a_tot, s_hat, nu), terms.t6_ref(a1, b1, a2, b2, a_s, a_tot, s_hat, nu)),
        ]
        for value, ref in pairs:
            worst = max(worst, abs(value / ref - 1.0))
    assert worst <= 1e-6
