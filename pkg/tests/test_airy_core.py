import numpy as np
import pytest
from scipy import optimize, special

import airy_core
from airy_core import (
    AI0,
    AIP0,
    AIRYE_LIMIT,
    OMEGA,
    OMEGA_BAR,
    SWITCH_RADIUS,
    WRONSKIAN,
    Regime,
    Scaled,
    ZeroKind,
    airy,
    airy_identity_residuals,
    airy_zero,
    airy_zeros,
    airye,
    eval_airy,
    log_airy_envelope,
    u_envelope,
)
from errors import AccuracyLoss, ConfigError


def test_value_at_origin():
    res = eval_airy(0.0)
    assert res.value == pytest.approx(0.3550280539, abs=1e-10)
    assert res.value == pytest.approx(AI0, abs=1e-15)
    assert res.derivative == pytest.approx(AIP0, abs=1e-15)
    assert res.regime == Regime.SERIES


@pytest.mark.parametrize(
    "z", [0.5, 2 + 1j, -3 + 0.5j, 8.0, -8.0, 5j, 10 - 10j, -12 - 1j, 3.5 + 3.5j]
)
def test_eval_matches_scipy(z):
    ai, aip, _, _ = special.airy(complex(z))
    res = eval_airy(z)
    assert res.value == pytest.approx(ai, rel=1e-8, abs=1e-12)
    assert res.derivative == pytest.approx(aip, rel=1e-8, abs=1e-12)


def test_large_argument_uses_expansions():
    assert eval_airy(9.0).regime == Regime.ASYMPTOTIC_RIGHT
    assert eval_airy(0.1 + 0.2j).regime == Regime.SERIES


def test_non_finite_argument():
    with pytest.raises(AccuracyLoss):
        eval_airy(complex(np.inf, 0.0))


def test_wronskian_of_rotated_pair():
    z = 1 + 2j
    ai, aip, _, _ = special.airy(np.array([OMEGA * z, OMEGA_BAR * z]))
    wronskian = OMEGA_BAR * aip[1] * ai[0] - OMEGA * aip[0] * ai[1]
    assert wronskian == pytest.approx(WRONSKIAN, abs=1e-12)


@pytest.mark.parametrize(
    "z, tol", [(0.0, 1e-13), (5 - 3j, 1e-10), (-8.0, 1e-9), (1 + 2j, 1e-12)]
)
def test_identity_residuals(z, tol):
    rotation, wronskian = airy_identity_residuals(z)
    assert rotation <= tol
    assert wronskian <= tol


def test_wronskian_on_log_spaced_sample():
    radii = np.logspace(-2, 3, 20)
    worst = 0.0
    for k in range(12):
        for r in radii:
            worst = max(worst, airy_identity_residuals(r * np.exp(1j * k * np.pi / 6))[1])
    assert worst <= 1e-10


@pytest.mark.parametrize("z", [0.5, 2 + 1j, -3 + 0.5j, 15 + 4j])
def test_scaled_evaluation(z):
    ai, aip, _, _ = special.airy(complex(z))
    sai, saip = airye(np.array([z], dtype=complex))
    assert sai.value()[0] == pytest.approx(ai, rel=1e-12)
    assert saip.value()[0] == pytest.approx(aip, rel=1e-12)


def test_scaled_keeps_huge_products():
    # Ai(-i 400 e^{-i alpha}) alone overflows a double
    z = np.array([OMEGA_BAR * 400.0], dtype=complex)
    sai, _ = airye(z)
    square = sai * sai
    assert np.isfinite(square.log_abs()[0])
    assert square.log_abs()[0] == pytest.approx(2.0 * sai.log_abs()[0])
    with pytest.raises(AccuracyLoss):
        airy(z)


def test_scaled_arithmetic():
    a = Scaled(2.0, 800.0)
    b = Scaled(3.0, 800.0)
    assert float((a * b).log_abs()) == pytest.approx(np.log(6.0) + 1600.0)
    assert float((a + b).log_abs()) == pytest.approx(np.log(5.0) + 800.0)
    assert complex((a / b).value()) == pytest.approx(2.0 / 3.0)
    assert complex((Scaled(1.0) - 0.25).value()) == pytest.approx(0.75)


def test_first_zeros():
    a, ap, _, _ = special.ai_zeros(5)
    zeros = airy_zeros(5, ZeroKind.OF_AI)
    zeros_prime = airy_zeros(5, ZeroKind.OF_AI_PRIME)
    assert [z.location for z in zeros] == pytest.approx(a, abs=1e-12)
    assert [z.location for z in zeros_prime] == pytest.approx(ap, abs=1e-12)
    assert airy_zero(1, ZeroKind.OF_AI_PRIME).location == pytest.approx(-1.018793, abs=1e-6)
    assert airy_zero(1, ZeroKind.OF_AI).location == pytest.approx(-2.338107, abs=1e-6)


def test_derivative_vanishes_at_first_zero():
    zero = airy_zero(1, ZeroKind.OF_AI_PRIME)
    assert zero.residual <= 1e-12
    assert abs(eval_airy(zero.location).derivative) <= 1e-12


def test_zero_asymptotics():
    n = 50
    zero = airy_zero(n, ZeroKind.OF_AI_PRIME).location
    law = -((1.5 * np.pi * (n - 0.75)) ** (2.0 / 3.0))
    assert zero / law == pytest.approx(1.0, abs=1e-3)


def test_zero_index_must_be_positive():
    with pytest.raises(ConfigError):
        airy_zero(0, ZeroKind.OF_AI)


def test_envelope():
    assert u_envelope(0.0) == pytest.approx(-1.0)
    lam = 20.0
    sai, _ = airye(np.array([OMEGA_BAR * lam], dtype=complex))
    assert log_airy_envelope(lam, 0.0) == pytest.approx(sai.log_abs()[0], abs=0.05)
    for lam in (10.0, 20.0):
        x = np.linspace(0.0, 5.0 * lam, 51)
        sai, _ = airye(OMEGA_BAR * (1j * x + lam))
        ratio = np.exp(sai.log_abs() - log_airy_envelope(lam, x))
        assert np.all(np.abs(ratio - 1.0) <= 0.01)


@pytest.mark.parametrize("theta", np.linspace(0.5 * np.pi, np.pi, 7))
def test_series_meets_expansions(theta):
    z = (SWITCH_RADIUS + 0.2) * np.exp(1j * theta)
    res = eval_airy(z)
    assert res.regime != Regime.SERIES
    ai, aip, _, _ = airy_core._series(np.array([z]))
    assert abs(ai[0] - res.value) <= 1e-9 * max(abs(res.value), 0.1)
    assert abs(aip[0] - res.derivative) <= 1e-9 * max(abs(res.derivative), 0.1)


@pytest.mark.parametrize(
    "kind, column", [(ZeroKind.OF_AI, 0), (ZeroKind.OF_AI_PRIME, 1)]
)
def test_zeros_match_bracketed_roots(kind, column):
    a, ap, _, _ = special.ai_zeros(21)
    reference = a if kind == ZeroKind.OF_AI else ap
    fun = lambda t: special.airy(t)[column]
    for n in range(1, 21):
        high = 0.0 if n == 1 else 0.5 * (reference[n - 2] + reference[n - 1])
        low = 0.5 * (reference[n - 1] + reference[n])
        root = optimize.brentq(fun, low, high, xtol=1e-15, rtol=4 * np.finfo(float).eps)
        assert airy_zero(n, kind).location == pytest.approx(root, abs=1e-11)


def test_scaled_evaluation_beyond_scipy_range():
    z = 2.0 * AIRYE_LIMIT * np.exp(0.3j)
    eai, eaip, _, _ = special.airye(z)
    zeta = 2.0 / 3.0 * z**1.5
    sai, saip = airye(np.array([z]))
    assert sai.log_abs()[0] == pytest.approx(np.log(abs(eai)) - zeta.real, rel=1e-10)
    assert saip.log_abs()[0] == pytest.approx(np.log(abs(eaip)) - zeta.real, rel=1e-10)

    far = 2.5e7j
    sai, _ = airye(np.array([far]))
    leading = -(2.0 / 3.0 * far**1.5).real - np.log(2.0 * np.sqrt(np.pi)) - 0.25 * np.log(abs(far))
    assert np.isfinite(sai.log_abs()[0])
    assert sai.log_abs()[0] == pytest.approx(leading, abs=1e-8)


def test_scalar_divided_by_scaled():
    quotient = 2.0 / Scaled(4.0, 1.0)
    assert complex(quotient.value()) == pytest.approx(0.5 * np.exp(-1.0))
    assert complex((1j / Scaled(2.0)).value()) == pytest.approx(0.5j)
