import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from oscperiod import errors
from oscperiod.lemmas import (
    CLAIMS, DEFAULT_P_GRID, Frequencies, G_fn, H_fn, J_fn, S_fn, T_lem, f_p, f_p_closed,
    f_p_prime, f_p_prime_direct, f_p_series, family, g_zero, h_fn, lead_H, lead_h, lead_J,
    lead_S, lead_T, lemma_sweep, log_f_p, residual_H_ode, residual_h_ode, residual_J_ode,
    residual_S_ode, residual_T_ode, s_zero, series_threshold,
)

PS = [1.1, 1.5, 2.0, 2.9, 3.0, 3.1, 5.0, 7.0, 9.0, 20.0]
TS = [1e-4, 1e-2, 0.3, 1.0, 2.5, 6.0]


def test_frequency_relations():
    for p in DEFAULT_P_GRID:
        f = Frequencies.of(p)
        assert f.omega2 - f.omega1 == pytest.approx(2.0, abs=1e-15)
        assert f.omega3 - f.omega2 == pytest.approx(p - 1.0, abs=1e-15)
        assert f.omega3 == 1.5 * p - 0.5


@pytest.mark.parametrize("p", PS)
def test_f_p_matches_definition(p):
    for t in TS + [15.0]:
        ref = float(oracles.f_p(p, t))
        assert f_p(p, t) == pytest.approx(ref, rel=1e-12)
        assert f_p(p, -t) == f_p(p, t)
        assert f_p(p, t) > 0


def test_f_p_log_form_far_out():
    for p in (1.5, 5.0, 20.0):
        for t in (50.0, 400.0):
            with mp.workdps(40):
                ref = mp.log(oracles.f_p(p, t))
            assert log_f_p(p, t) == pytest.approx(float(ref), rel=1e-13, abs=1e-12)


def test_f3_is_one_and_origin_limit():
    for t in np.linspace(-30, 30, 121):
        assert abs(f_p(3, t) - 1) <= 1e-13
    assert f_p(2, 0.0) == pytest.approx(2.0, rel=1e-15)
    for p in PS:
        assert f_p(p, 0.0) == pytest.approx(p * (p + 1) / (3 * (p - 1) ** 2), rel=1e-15)


@pytest.mark.parametrize("p", [1.1, 1.5, 2.0, 5.0, 9.0, 20.0])
def test_series_seam(p):
    t = series_threshold(p)
    a, b = f_p_series(p, t), f_p_closed(p, t)
    assert abs(a - b) <= 1e-11 * abs(b)


@pytest.mark.parametrize("p", PS)
def test_f_p_prime_matches_numeric_derivative(p):
    for t in [0.01, 0.3, 1.0, 2.5, 6.0]:
        ref = float(oracles.f_p_prime(p, t))
        got = f_p_prime(p, t)
        assert abs(got - ref) <= 1e-11 * max(abs(ref), 1e-12 * f_p(p, t))
        assert f_p_prime(p, -t) == -got


def test_f_p_prime_two_routes_agree():
    for p in (1.5, 2.5, 5.0, 9.0):
        for t in (0.5, 1.0, 3.0):
            assert f_p_prime_direct(p, t) == pytest.approx(f_p_prime(p, t), rel=1e-9)


def test_f_p_prime_sign_examples():
    assert abs(f_p_prime(3, 1.0)) < 1e-15
    assert f_p_prime(5, 1.0) < 0
    assert f_p_prime(2, 1.0) > 0


@pytest.mark.parametrize("p", PS)
def test_closed_forms_match_printed_definitions(p):
    for t in [0.05, 0.7, 2.0, 5.0]:
        assert h_fn(p, t) == pytest.approx(float(oracles.h_printed(p, t)), rel=1e-12, abs=1e-300)
        assert S_fn(p, t) == pytest.approx(float(oracles.S_printed(p, t)), rel=1e-12)
        assert T_lem(p, t) == pytest.approx(float(oracles.T_printed(p, t)), rel=1e-12)


@pytest.mark.parametrize("p", [1.5, 2.0, 5.0, 9.0])
def test_H_J_match_their_definition_through_f(p):
    # H and J are built here by product-to-sum algebra; the oracle differentiates f itself
    for t in [0.1, 0.7, 2.0, 4.0]:
        assert H_fn(p, t) == pytest.approx(float(oracles.H_from_f(p, t, +1)), rel=1e-11)
        assert J_fn(p, t) == pytest.approx(float(oracles.H_from_f(p, t, -1)), rel=1e-11)


@pytest.mark.parametrize("p", [1.5, 2.0, 5.0, 9.0])
def test_h_drives_f_prime(p):
    for t in [0.2, 1.0, 3.0]:
        with mp.workdps(40):
            s = mp.sinh((mp.mpf(p) - 1) * t / 2)
            ref = -oracles.h_printed(p, t) / (4 * s**4)
        assert f_p_prime(p, t) == pytest.approx(float(ref), rel=1e-11)


# -- differential identities, checked in 30-digit arithmetic from the printed definitions

def _ode_residual(fn, omega, rhs, t):
    with mp.workdps(30):
        lhs = oracles.second(fn, t) - omega**2 * fn(mp.mpf(t))
        scale = max(abs(lhs), abs(rhs), mp.mpf(10) ** -25)
        return float(abs(lhs - rhs) / scale)


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0, 5.0, 7.0, 9.0])
def test_h_equation_forcing_constant(p):
    w1, w2, w3 = oracles.omegas(p)
    P = mp.mpf(p)
    for t in (0.4, 1.7):
        forcing = (P - 3) * mp.sinh(w2 * t) - (P + 1) * mp.sinh(w1 * t)
        k_true = P * (P - 1) * (3 * P - 1) / 2
        fn = lambda x: oracles.h_printed(p, x)
        assert _ode_residual(fn, w3, k_true * forcing, t) < 1e-20
        # the constant without the factor 1/2 does not satisfy the equation
        if p != 3.0:
            assert _ode_residual(fn, w3, 2 * k_true * forcing, t) > 0.1


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0, 5.0, 7.0, 9.0])
def test_S_equation_constant(p):
    w1, w2, _ = oracles.omegas(p)
    fn = lambda x: oracles.S_printed(p, x)
    for t in (0.4, 1.7):
        base = mp.cosh(w2 * t) * oracles.G(p, t)
        assert _ode_residual(fn, w1, (mp.mpf(p) - 1) / 4 * base, t) < 1e-20
        if p != 2.0:
            # a bare 1/4 only works at p = 2
            assert _ode_residual(fn, w1, base / 4, t) > 0.01


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0, 5.0, 7.0, 9.0])
def test_H_J_T_equations_as_printed(p):
    w1, w2, w3 = oracles.omegas(p)
    P = mp.mpf(p)
    for t in (0.4, 1.7):
        H = lambda x: oracles.H_from_f(p, x, +1)
        J = lambda x: oracles.H_from_f(p, x, -1)
        Tf = lambda x: oracles.T_printed(p, x)
        assert _ode_residual(H, w3, P * (P - 1) * oracles.S_printed(p, t), t) < 1e-15
        assert _ode_residual(J, w3, P * (P - 1) * oracles.T_printed(p, t), t) < 1e-15
        rhs = -(P - 1) / 4 * mp.cosh(w2 * t) * (
            (P + 1) * (P + 3) + (P - 3) * (3 * P - 1) * mp.tanh(w2 * t))
        assert _ode_residual(Tf, w1, rhs, t) < 1e-20


@pytest.mark.parametrize("fn", [residual_h_ode, residual_H_ode, residual_S_ode, residual_J_ode, residual_T_ode])
def test_residual_functions_vanish(fn):
    for p in (1.1, 2.0, 3.0, 5.0, 7.0, 20.0):
        for t in (1e-4, 0.5, 1.0, 10.0, 30.0):
            assert fn(p, t).relative <= 1e-10


def test_residual_examples():
    assert residual_h_ode(5, 1.0).relative <= 1e-10
    assert residual_T_ode(2, 0.5).relative <= 1e-10
    r = residual_H_ode(3, 0.8)
    assert r.relative <= 1e-10 and r.lhs != 0.0


# -- expansions near 0

@pytest.mark.parametrize("p", [1.5, 2.0, 2.5, 4.0, 5.0, 9.0])
def test_small_t_expansions(p):
    t = 1e-3 / (p - 1)
    assert h_fn(p, t) == pytest.approx(lead_h(p, t), rel=0.01)
    assert H_fn(p, t) == pytest.approx(lead_H(p, t), rel=0.01)
    assert J_fn(p, t) == pytest.approx(lead_J(p, t), rel=0.01)
    assert S_fn(p, t) == pytest.approx(lead_S(p, t), rel=0.01)
    assert T_lem(p, t) == pytest.approx(lead_T(p, t), rel=0.01)
    assert f_p(p, t) == pytest.approx(p * (p + 1) / (3 * (p - 1) ** 2), rel=0.01)


def test_h_vanishes_at_p3():
    for t in (0.1, 1.0, 5.0):
        assert h_fn(3, t) == 0.0
    assert S_fn(3, 1e-3) == pytest.approx(6e-6, rel=0.01)


# -- behavior at infinity

@pytest.mark.parametrize("p", [1.5, 2.0, 5.0, 9.0, 12.0])
@pytest.mark.parametrize("t", [10.0, 15.0])
def test_asymptotics(p, t):
    w1, w2, w3 = Frequencies.of(p).omega1, Frequencies.of(p).omega2, Frequencies.of(p).omega3
    assert f_p(p, t) == pytest.approx(math.exp(-(p - 3) * t / 2), rel=0.1)
    sign, log_H = family(p).H.log_abs(t)
    assert sign > 0
    assert math.exp(log_H - w3 * t) == pytest.approx(3 / 16, rel=0.1)
    sign, log_S = family(p).S.log_abs(t)
    pref = -p * (p - 7) / 8
    assert sign == math.copysign(1.0, pref)
    assert math.exp(log_S - w2 * t) == pytest.approx(abs(pref), rel=0.1)


def test_f5_at_ten():
    assert f_p(5, 10.0) == pytest.approx(math.exp(-10.0), rel=0.05)


def test_S_at_p7_grows_like_five_e2t():
    # the sinh and cosh terms at rate 4 cancel exactly; 5 e^{2t} survives
    for t in (10.0, 15.0):
        assert S_fn(7, t) == pytest.approx(5 * math.exp(2 * t), rel=0.01)
        with mp.workdps(40):
            assert float(oracles.S_printed(7, t) / mp.exp(2 * t)) == pytest.approx(5.0, rel=0.01)


# -- G and the zeros

def test_G_values():
    assert G_fn(5, 0.0) == 48.0
    for p in (2.0, 5.0, 9.0):
        assert G_fn(p, 60.0) == pytest.approx(-2 * p * (p - 7), rel=1e-12, abs=1e-12)
    assert G_fn(7, 60.0) == pytest.approx(0.0, abs=1e-9)


def test_g_zero():
    assert g_zero(9) == pytest.approx(math.atanh(120 / 156) / 5, rel=1e-15)
    assert g_zero(9) == pytest.approx(0.203688, abs=1e-6)
    assert abs(G_fn(9, g_zero(9))) <= 1e-12
    assert g_zero(7.001) > g_zero(7.1) > g_zero(9)
    with pytest.raises(errors.DomainError):
        g_zero(7)


def test_s_zero():
    z = s_zero(9)
    assert S_fn(9, z - 1e-6) * S_fn(9, z + 1e-6) < 0
    assert S_fn(9, z - 1e-6) > 0
    with pytest.raises(errors.DomainError):
        s_zero(5)
    assert S_fn(9, 40.0) < 0


# -- sweeps

def test_sweep_examples():
    assert lemma_sweep("L2", [1.5, 3, 5, 9]).passed
    assert lemma_sweep("L3", [2.0]).passed
    rep = lemma_sweep("L1i")
    assert rep.passed and rep.worst_violation <= 1e-13
    with pytest.raises(ValueError):
        lemma_sweep("L9")


def test_s2_sign_pattern_recorded():
    rep = lemma_sweep("S2")
    assert rep.passed
    for runs in rep.observed["sign_runs"].values():
        assert [r[2] for r in runs] == [1, -1]


def test_h_monotone_on_each_side_of_three():
    ts = np.linspace(0.01, 10, 400)
    for p in (4.0, 5.0, 9.0):
        vals = [h_fn(p, t) for t in ts]
        assert all(b > a for a, b in zip(vals, vals[1:]))
    for p in (1.5, 2.0, 2.5):
        vals = [h_fn(p, t) for t in ts]
        assert all(b < a for a, b in zip(vals, vals[1:]))


@settings(max_examples=80, deadline=None)
@given(p=st.floats(1.05, 25.0), t=st.floats(1e-4, 30.0))
def test_positivity_of_numerator_and_claims(p, t):
    assert family(p).numerator.scaled(t) > 0
    assert family(p).H.scaled(t) > 0
    assert family(p).J.scaled(t) < 0


def test_all_claims_listed():
    assert len(CLAIMS) == 13
