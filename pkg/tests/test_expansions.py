import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from levyasym.black_scholes import call_price
from levyasym.errors import RegimeError
from levyasym.expansions import (
    ExpansionCoefficients,
    IVExpansion,
    ModelConstants,
    MoneynessSpec,
    Regime,
    approx_price,
    iv_coeffs_pure,
    iv_coeffs_sv,
    iv_expansion_sv,
    model_constants,
    pure_jump_coeffs,
    sv_coeffs,
    sv_jump_term,
)
from levyasym.levy import (
    CGMYParams,
    TemperedStableModel,
    cgmy_d2_pure,
    exponential_tempering,
)
from levyasym.stable import expected_positive_part, prob_nonnegative, stable_law_of

from oracles import fourier_call

FIG = CGMYParams(0.5, 2.0, 3.6, 1.5)
SQ2PI = math.sqrt(2 * math.pi)
ASYM = TemperedStableModel(0.8, 0.2, 1.5, exponential_tempering(2.0, 3.6))


# --- moneyness ---------------------------------------------------------------

def test_regime_parsing_and_beta_presence():
    assert MoneynessSpec(0.1, "pure-power", 0.9).regime is Regime.PURE_POWER
    with pytest.raises(RegimeError):
        MoneynessSpec(0.1, Regime.PURE_POWER)
    with pytest.raises(RegimeError):
        MoneynessSpec(0.1, Regime.SV_MAIN, 0.6)
    with pytest.raises(ValueError):
        MoneynessSpec(0.1, "sideways")


@pytest.mark.parametrize("Y", [1.2, 1.5, 1.8])
def test_beta_bounds_are_open(Y):
    for beta in (1 / Y, 1.0):
        with pytest.raises(RegimeError):
            MoneynessSpec(0.1, Regime.PURE_POWER, beta).check(Y)
    for beta in (0.5, (3 - Y) / 2):
        with pytest.raises(RegimeError):
            MoneynessSpec(0.1, Regime.SV_POWER, beta).check(Y)
    MoneynessSpec(0.1, Regime.PURE_POWER, 0.5 * (1 / Y + 1)).check(Y)
    MoneynessSpec(0.1, Regime.SV_POWER, 0.5 * (0.5 + (3 - Y) / 2)).check(Y)


def test_log_strike_exponents():
    Y = 1.5
    assert MoneynessSpec(2.0).log_strike(0.25, Y) == pytest.approx(0.5)
    assert MoneynessSpec(2.0, Regime.SV_MAIN).log_strike(0.25, Y) == pytest.approx(2 * 0.25 ** 0.75)
    assert MoneynessSpec(2.0, Regime.PURE_POWER, 0.8).log_strike(0.25, Y) == pytest.approx(2 * 0.25 ** 0.8)
    with pytest.raises(ValueError):
        MoneynessSpec(2.0).log_strike(0.0, Y)


# --- pure-jump coefficients --------------------------------------------------

def test_pure_jump_reference_values():
    c = pure_jump_coeffs(FIG, MoneynessSpec())
    assert c.d2 == pytest.approx(cgmy_d2_pure(FIG), rel=1e-12)
    assert c.d2 == pytest.approx(-2.9576, abs=1e-4)
    assert (c.exp1, c.exp2) == (pytest.approx(1 / 1.5), 1.0)
    assert c.d1 == pytest.approx(expected_positive_part(stable_law_of(FIG)), rel=1e-12)


def test_general_model_path_matches_cgmy():
    a = pure_jump_coeffs(FIG, MoneynessSpec(0.3))
    b = pure_jump_coeffs(FIG.to_model(), MoneynessSpec(0.3))
    assert b.d2 == pytest.approx(a.d2, rel=1e-7)
    assert b.d1 == pytest.approx(a.d1, rel=1e-12)


@given(st.floats(-5, 5))
def test_theta_enters_linearly_symmetric(theta):
    k = model_constants(FIG)
    up = pure_jump_coeffs(FIG, MoneynessSpec(theta), k)
    down = pure_jump_coeffs(FIG, MoneynessSpec(-theta), k)
    assert up.d2 - down.d2 == pytest.approx(-theta, abs=1e-12)


def test_theta_zero_is_atm():
    k = model_constants(FIG)
    c = pure_jump_coeffs(FIG, MoneynessSpec(0.0), k)
    assert c.d2 == k.vartheta + k.gamma_tilde * k.prob_nonneg


def test_power_regime_coefficients():
    k = model_constants(ASYM)
    c = pure_jump_coeffs(ASYM, MoneynessSpec(0.05, Regime.PURE_POWER, 0.8), k)
    assert c.d2 == pytest.approx(-0.05 * k.prob_nonneg, rel=1e-15)
    assert c.exp2 == 0.8 and c.exp1 == pytest.approx(1 / 1.5)


def test_power_regime_continuity_at_beta_one():
    k = model_constants(FIG)
    art = ModelConstants(k.eta, 0.0, 0.0, k.prob_nonneg, k.expected_positive)
    lin = pure_jump_coeffs(FIG, MoneynessSpec(0.7), art)
    near = pure_jump_coeffs(FIG, MoneynessSpec(0.7, Regime.PURE_POWER, 1 - 1e-9), art)
    assert near.d2 == pytest.approx(lin.d2, rel=1e-15)
    assert near.exp2 == pytest.approx(lin.exp2, abs=1e-8)


def test_regime_mismatch():
    with pytest.raises(RegimeError):
        pure_jump_coeffs(FIG, MoneynessSpec(0.0, Regime.SV_MAIN))
    with pytest.raises(RegimeError):
        sv_coeffs(FIG, 0.4, MoneynessSpec(0.0))


# --- SV coefficients ---------------------------------------------------------

def test_sv_reference_values():
    c = sv_coeffs(FIG, 0.4, MoneynessSpec(0.0, Regime.SV_MAIN))
    assert c.d1 == pytest.approx(0.159577, abs=1e-6)
    assert c.d2 == pytest.approx(1.8132, abs=1e-4)
    hand = 2 ** -1.25 / math.sqrt(math.pi) * math.gamma(0.25) * 1.0 / 0.75 * 0.4 ** -0.5
    assert c.d2 == pytest.approx(hand, rel=1e-14)
    assert (c.exp1, c.exp2) == (0.5, 0.75)


@given(st.floats(-3, 3))
def test_sv_theta_dependence(theta):
    base = sv_coeffs(FIG, 0.4, MoneynessSpec(0.0, Regime.SV_MAIN))
    main = sv_coeffs(FIG, 0.4, MoneynessSpec(theta, Regime.SV_MAIN))
    assert main.d2 - base.d2 == pytest.approx(-theta / 2, abs=1e-12)
    power = sv_coeffs(FIG, 0.4, MoneynessSpec(theta, Regime.SV_POWER, 0.6))
    assert power.d2 == pytest.approx(-theta / 2, abs=1e-15)
    assert power.exp2 == 0.6


def test_sv_rejects_bad_vol():
    with pytest.raises(ValueError):
        sv_coeffs(FIG, 0.0, MoneynessSpec(0.0, Regime.SV_MAIN))


# --- approx_price / coefficient containers -----------------------------------

def test_approx_price_identities():
    c = pure_jump_coeffs(FIG, MoneynessSpec())
    assert approx_price(c, 1.0, 2) == pytest.approx(c.d1 + c.d2)
    for t in (0.3, 0.01):
        assert approx_price(c, t, 1) == pytest.approx(approx_price(c, t, 2) - c.d2 * t)
    with pytest.raises(ValueError):
        approx_price(c, 0.1, 3)
    with pytest.raises(ValueError):
        approx_price(c, 0.0, 1)


def test_coefficient_invariants():
    with pytest.raises(ValueError):
        ExpansionCoefficients(1.0, 1.0, 0.0, 0.5)
    with pytest.raises(ValueError):
        ExpansionCoefficients(0.0, 0.5, 0.0, 1.0)


# --- implied-vol expansions --------------------------------------------------

def test_iv_pure_coefficients():
    iv = iv_coeffs_pure(FIG)
    c = pure_jump_coeffs(FIG, MoneynessSpec())
    assert iv.sigma1 / SQ2PI == pytest.approx(c.d1, rel=1e-15)
    assert iv.sigma2 / SQ2PI == pytest.approx(c.d2, rel=1e-15)
    assert iv.sigma2 == pytest.approx(SQ2PI * cgmy_d2_pure(FIG), rel=1e-12)
    assert (iv.exp1, iv.exp2, iv.kind) == (pytest.approx(1 / 1.5 - 0.5), 0.5, "pure-jump")


def test_iv_sv_coefficients():
    Y = 1.5
    assert 2 ** (-Y / 2) == pytest.approx(SQ2PI * 2 ** (-(Y + 1) / 2) / math.sqrt(math.pi), rel=1e-15)
    iv = iv_coeffs_sv(FIG, 0.4, 0.0)
    assert iv.sigma1 == 0.4 and iv.exp1 == 0.0 and iv.exp2 == pytest.approx(0.25)
    assert iv.sigma2 == pytest.approx(SQ2PI * sv_jump_term(FIG, 0.4), rel=1e-14)
    assert iv_expansion_sv(FIG, 0.4, 0.0, 1e-20) == pytest.approx(0.4, abs=1e-4)
    # the strike shift is absorbed by the Black-Scholes map
    assert iv_expansion_sv(FIG, 0.4, 0.8, 0.05) == pytest.approx(iv_expansion_sv(FIG, 0.4, 0.0, 0.05))


def test_iv_expansion_value():
    iv = IVExpansion(2.0, 0.0, 3.0, 0.5, "sv")
    assert iv.value(0.25) == pytest.approx(3.5)
    assert iv.value(0.25, 1) == pytest.approx(2.0)
    with pytest.raises(ValueError):
        iv.value(-1.0)


def _bs_gap_ratios(iv, coeffs, kappa_of, ts):
    out = []
    for t in ts:
        gap = call_price(1.0, math.exp(kappa_of(t)), t, iv.value(t)) - approx_price(coeffs, t, 2)
        out.append(abs(gap) / t ** coeffs.exp2)
    return out


@pytest.mark.parametrize("theta", [0.0, 0.5, -0.5])
def test_iv_price_consistency_pure_jump(theta):
    # the second-order implied vol nearly cancels to zero around t = 0.05
    # here, so the asymptotic regime starts well below that
    ts = [1e-3, 1e-4, 1e-5, 1e-6]
    for model in (FIG, ASYM):
        iv = iv_coeffs_pure(model, theta)
        c = pure_jump_coeffs(model, MoneynessSpec(theta))
        r = _bs_gap_ratios(iv, c, lambda t: theta * t, ts)
        assert all(b < a for a, b in zip(r, r[1:])), r
        assert r[-1] < 0.01


def test_iv_without_strike_term_is_inconsistent():
    # dropping the theta/2 Black-Scholes term leaves an O(t) gap when P != 1/2
    theta = 0.5
    c = pure_jump_coeffs(ASYM, MoneynessSpec(theta))
    good = iv_coeffs_pure(ASYM, theta)
    bad = IVExpansion(good.sigma1, good.exp1, SQ2PI * c.d2, good.exp2, "pure-jump")
    r = _bs_gap_ratios(bad, c, lambda t: theta * t, [1e-3, 1e-4, 1e-5])
    assert r[-1] == pytest.approx(theta / 2, rel=0.05)


@pytest.mark.parametrize("theta", [0.0, 0.3])
def test_iv_price_consistency_sv(theta):
    ts = [0.5, 0.25, 0.1, 0.05]
    iv = iv_coeffs_sv(FIG, 0.4, theta)
    c = sv_coeffs(FIG, 0.4, MoneynessSpec(theta, Regime.SV_MAIN))
    r = _bs_gap_ratios(iv, c, lambda t: theta * t ** 0.75, ts)
    assert all(b < a for a, b in zip(r, r[1:])), r


# --- coefficients against the Fourier pricer ---------------------------------

def test_pure_jump_d2_fourier_symmetric():
    c = pure_jump_coeffs(FIG, MoneynessSpec())
    res = [abs((fourier_call(t) - c.d1 * t ** c.exp1) / t - c.d2) for t in (1e-3, 1e-4, 1e-5, 1e-6)]
    assert all(b < a for a, b in zip(res, res[1:]))
    assert res[-1] < 0.1


def test_pure_jump_d2_fourier_asymmetric():
    c = pure_jump_coeffs(ASYM, MoneynessSpec())
    res = [abs((fourier_call(t, c_plus=0.8, c_minus=0.2) - c.d1 * t ** c.exp1) / t - c.d2)
           for t in (1e-4, 1e-5, 1e-6)]
    assert all(b < a for a, b in zip(res, res[1:]))
    assert res[-1] < 0.15


def test_pure_jump_theta_slope_fourier():
    # price change per unit theta t is -P(Z >= 0), not +P
    P = prob_nonnegative(stable_law_of(ASYM))
    t = 1e-6
    base = fourier_call(t, c_plus=0.8, c_minus=0.2)
    slope = (fourier_call(t, k=t, c_plus=0.8, c_minus=0.2) - base) / t
    assert slope == pytest.approx(-P, abs=0.01)


def test_power_regime_sign_fourier():
    t, theta, beta = 1e-5, 0.05, 0.8
    c = pure_jump_coeffs(FIG, MoneynessSpec(theta, Regime.PURE_POWER, beta))
    shift = (fourier_call(t, k=theta * t ** beta) - fourier_call(t)) / t ** beta
    assert shift == pytest.approx(c.d2, rel=0.01)
    assert shift < 0


def test_sv_d2_fourier():
    c = sv_coeffs(FIG, 0.4, MoneynessSpec(0.0, Regime.SV_MAIN))
    res = [abs((fourier_call(t, sigma=0.4) - c.d1 * t ** 0.5) / t ** 0.75 - c.d2)
           for t in (1e-4, 1e-6, 1e-8, 1e-10)]
    assert all(b < a for a, b in zip(res, res[1:]))
    assert res[-1] < 0.02 * c.d2


def test_sv_theta_slope_fourier():
    t, theta = 1e-6, 0.3
    shift = (fourier_call(t, k=theta * t ** 0.75, sigma=0.4) - fourier_call(t, sigma=0.4)) / t ** 0.75
    c0 = sv_coeffs(FIG, 0.4, MoneynessSpec(0.0, Regime.SV_MAIN))
    c1 = sv_coeffs(FIG, 0.4, MoneynessSpec(theta, Regime.SV_MAIN))
    assert shift == pytest.approx(c1.d2 - c0.d2, rel=0.02)
    assert shift < 0
