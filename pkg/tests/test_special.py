import math

import pytest

from oracles import bessel_oracle
from riccati_lin.special import (
    BesselDomainError, BesselKind, bessel, bessel_derivative, iv, jv, kv, yv,
)

NU_GRID = (0.0, 1 / 3, 0.5, 1.0, 1.5)
X_GRID = (0.5, 1.0, 2.0, 5.0, 10.0, 20.0)


# --- spec examples ----------------------------------------------------------

def test_half_integer_value():
    assert abs(jv(0.5, 1.0) - math.sqrt(2 / math.pi) * math.sin(1.0)) <= 1e-15


def test_small_argument_limit():
    assert abs(iv(0, 1e-8) - 1.0) <= 1e-12


def test_wronskian_one_third_at_two():
    nu, x = 1 / 3, 2.0
    w = jv(nu, x) * bessel_derivative("Y", nu, x) - bessel_derivative("J", nu, x) * yv(nu, x)
    assert abs(w - 2 / (math.pi * x)) <= 1e-10


@pytest.mark.parametrize("kind, x, partner, sign", [
    ("J", 1.5, "J", -1), ("I", 2.0, "I", 1), ("K", 1.0, "K", -1), ("Y", 3.0, "Y", -1),
])
def test_order_zero_derivatives(kind, x, partner, sign):
    assert abs(bessel_derivative(kind, 0, x) - sign * bessel(partner, 1, x)) <= 1e-10


# --- identities -------------------------------------------------------------

@pytest.mark.parametrize("nu", NU_GRID)
@pytest.mark.parametrize("x", X_GRID)
def test_wronskians(nu, x):
    wjy = jv(nu, x) * bessel_derivative("Y", nu, x) - bessel_derivative("J", nu, x) * yv(nu, x)
    wik = iv(nu, x) * bessel_derivative("K", nu, x) - bessel_derivative("I", nu, x) * kv(nu, x)
    assert abs(wjy / (2 / (math.pi * x)) - 1) <= 1e-9
    assert abs(wik / (-1 / x) - 1) <= 1e-9


@pytest.mark.parametrize("x", [0.1 + 0.1 * k for k in range(200)])
def test_half_integer_reductions(x):
    s = math.sqrt(2 / (math.pi * x))
    assert abs(jv(0.5, x) - s * math.sin(x)) <= 1e-10 * max(1.0, abs(s))
    assert abs(jv(-0.5, x) - s * math.cos(x)) <= 1e-10 * max(1.0, abs(s))


def test_half_integer_modified():
    for x in (0.3, 2.0, 7.5, 30.0):
        s = math.sqrt(2 / (math.pi * x))
        assert iv(0.5, x) == pytest.approx(s * math.sinh(x), rel=1e-12)
        assert kv(0.5, x) == pytest.approx(math.sqrt(math.pi / (2 * x)) * math.exp(-x), rel=1e-12)


@pytest.mark.parametrize("nu", [0.3, 1.0, 2.5, -1.7, 3.0])
@pytest.mark.parametrize("x", [0.7, 3.0, 12.0])
def test_recurrences(nu, x):
    # J, Y: C_{v+1} = 2v/x C_v - C_{v-1}; I: I_{v+1} = I_{v-1} - 2v/x I_v; K: K_{v+1} = K_{v-1} + 2v/x K_v
    for f, rec in ((jv, lambda a, b: 2 * nu / x * b - a),
                   (yv, lambda a, b: 2 * nu / x * b - a),
                   (iv, lambda a, b: a - 2 * nu / x * b),
                   (kv, lambda a, b: a + 2 * nu / x * b)):
        lhs = f(nu + 1, x)
        rhs = rec(f(nu - 1, x), f(nu, x))
        scale = max(abs(f(nu - 1, x)), abs(f(nu, x)), abs(lhs))
        assert abs(lhs - rhs) <= 1e-8 * scale


@pytest.mark.parametrize("kind", list(BesselKind))
@pytest.mark.parametrize("nu", [0.0, 0.7, 2.0, -2.5])
@pytest.mark.parametrize("x", [0.4, 3.0, 15.0])
def test_derivative_against_central_difference(kind, nu, x):
    h = 1e-4 * x
    fd = (bessel(kind, nu, x + h) - bessel(kind, nu, x - h)) / (2 * h)
    d = bessel_derivative(kind, nu, x)
    assert abs(d - fd) <= 1e-6 * max(1.0, abs(d))


def test_negative_integer_order_symmetry():
    for x in (0.5, 4.0, 25.0):
        assert jv(-3, x) == pytest.approx(-jv(3, x), rel=1e-12)
        assert yv(-2, x) == pytest.approx(yv(2, x), rel=1e-12)
        assert iv(-4, x) == pytest.approx(iv(4, x), rel=1e-12)
        assert kv(-1.5, x) == pytest.approx(kv(1.5, x), rel=1e-12)


# --- oracle -----------------------------------------------------------------

ORACLE_ORDERS = (-5.0, -3.5, -2 / 3, -0.5, 0.0, 0.25, 1 / 3, 0.5, 1.0, 2.0, 3.5, 5.0)
ORACLE_ARGS = (1e-3, 0.1, 0.5, 1.0, 2.0, 3.7, 6.0, 10.0, 17.5, 30.0, 50.0)


def _oracle_rel_err(kind, nu, x):
    got = bessel(kind, nu, x)
    ref = bessel_oracle(kind, nu, x)
    return abs(got - ref) / abs(ref)


@pytest.mark.parametrize("kind", list(BesselKind))
def test_against_high_precision_oracle(kind):
    worst = 0.0
    for nu in ORACLE_ORDERS:
        for x in ORACLE_ARGS:
            ref = bessel_oracle(kind, nu, x)
            if ref == 0 or not math.isfinite(ref) or abs(ref) > 1e300 or abs(ref) < 1e-300:
                continue
            worst = max(worst, _oracle_rel_err(kind, nu, x))
    assert worst <= 1e-10


# --- envelope ---------------------------------------------------------------

@pytest.mark.parametrize("nu, x", [(0.0, 0.0), (0.0, -1.0), (5.5, 1.0), (-6.0, 1.0), (1.0, 50.5),
                                   (float("nan"), 1.0), (1.0, float("inf"))])
def test_envelope_errors(nu, x):
    with pytest.raises(BesselDomainError):
        jv(nu, x)


def test_kind_from_string():
    assert bessel("J", 0, 1.0) == bessel(BesselKind.J, 0, 1.0)
    with pytest.raises(ValueError):
        bessel("H", 0, 1.0)
