import math
import random

import pytest

from oracles import central_difference
from riccati_lin.expr import NotAValue
from riccati_lin.transform import (
    AZeroError, LinearState, RiccatiProblem, SingularCoefficientError, canonical_potential,
    check_a_nonzero, identically_zero, initial_linear_state, p_equation_coefficients,
    reconstruct_z, y_from_z, z_from_y,
)


def P(a, f):
    return RiccatiProblem.from_text(a, f)


# --- canonical potential ----------------------------------------------------

def test_unit_a_potential_is_f():
    F = canonical_potential(P("1", "exp(x)")).F
    for x in (-1.0, 0.0, 2.3):
        assert F(x) == pytest.approx(math.exp(x), rel=1e-15)


def test_constant_a_potential():
    F = canonical_potential(P("-3", "sin(x) + 2")).F
    for x in (0.1, 1.7):
        assert F(x) == pytest.approx(-3 * (math.sin(x) + 2), rel=1e-15)


@pytest.mark.parametrize("c, n", [(1.0, 2.0), (-2.0, 1.0), (0.5, -1.0), (3.0, 0.5)])
def test_power_a_potential(c, n):
    F = canonical_potential(P(f"{c}*x^({n})", "cos(x)")).F
    for x in (0.5, 1.0, 2.0):
        expected = c * x ** n * math.cos(x) + n * (n + 2) / (4 * x * x)
        assert F(x) == pytest.approx(expected, rel=1e-12)


def test_potential_at_a_zero_raises():
    with pytest.raises(AZeroError):
        canonical_potential(P("x", "1")).F(0.0)


# --- substitutions ----------------------------------------------------------

def test_unit_a_y_equals_z():
    prob = P("1", "x")
    for x, z in ((0.0, 1.0), (3.0, -2.5)):
        assert y_from_z(prob, x, z) == z


def test_power_a_z_from_y():
    c, n = 2.0, 3.0
    prob = P("2*x^3", "1")
    x, y = 1.7, 0.4
    expected = y / (c * x ** n) + n / (2 * c * x ** (n + 1))
    assert z_from_y(prob, x, y) == pytest.approx(expected, rel=1e-14)


def test_round_trip_example():
    prob = P("x^2", "1")
    assert abs(z_from_y(prob, 1.3, y_from_z(prob, 1.3, -0.7)) + 0.7) <= 1e-12


def test_inverse_identity_random():
    rng = random.Random(20261015)
    prob = P("2 + sin(x)", "x")
    worst = 0.0
    for _ in range(1000):
        x = rng.uniform(-10, 10)
        z = rng.uniform(-100, 100)
        back = z_from_y(prob, x, y_from_z(prob, x, z))
        worst = max(worst, abs(back - z) / max(1.0, abs(z)))
    assert worst <= 1e-12


@pytest.mark.parametrize("fn", [y_from_z, z_from_y])
def test_substitution_division_by_zero(fn):
    with pytest.raises(AZeroError):
        fn(P("x", "1"), 0.0, 1.0)


# --- initial state and reconstruction ---------------------------------------

@pytest.mark.parametrize("a, f, x0, z0, expected", [
    ("1", "1", 0.0, 0.0, (1.0, 0.0)),
    ("1", "1", 0.0, -2.0, (1.0, -2.0)),
    ("x^2", "1", 2.0, 1.0, (1.0, 3.5)),
])
def test_initial_linear_state(a, f, x0, z0, expected):
    st = initial_linear_state(P(a, f), x0, z0)
    assert (st.q, st.p) == pytest.approx(expected, abs=1e-15)
    assert reconstruct_z(P(a, f), st) == pytest.approx(z0, abs=1e-15)


def test_reconstruct_unit_a():
    assert reconstruct_z(P("1", "1"), LinearState(0.3, 2.0, 5.0)) == 2.5


def test_reconstruct_cosh_sinh():
    st = LinearState(2.0, math.cosh(2.0), math.sinh(2.0))
    assert reconstruct_z(P("1", "1"), st) == pytest.approx(math.tanh(2.0), rel=1e-15)


@pytest.mark.parametrize("lam", [-3.0, 0.01, 17.0])
def test_reconstruct_scale_invariance(lam):
    prob = P("x^2 + 1", "exp(x)")
    base = LinearState(0.8, 1.3, -0.4)
    z0 = reconstruct_z(prob, base)
    z1 = reconstruct_z(prob, LinearState(0.8, lam * 1.3, lam * -0.4))
    assert abs(z1 - z0) <= 1e-12 * abs(z0)


def test_reconstruct_pole_signal():
    z = reconstruct_z(P("1", "1"), LinearState(0.5, 1e-14, 1.0), pole_threshold=1e-12)
    assert isinstance(z, NotAValue)


# --- potential identities ---------------------------------------------------

@pytest.mark.parametrize("a, f", [("x^2", "1"), ("exp(x)", "sin(x)"), ("2 + cos(x)", "x^3 - 1"),
                                  ("-1", "x"), ("sqrt(x)", "ln(x)")])
def test_d_equals_four_a_squared_f(a, f):
    prob = P(a, f)
    pot = canonical_potential(prob)
    rng = random.Random(7)
    for _ in range(200):
        x = rng.uniform(0.2, 4.0)
        ax = prob.a(x)
        D = pot.D(x)
        assert abs(D - 4 * ax * ax * pot.F(x)) <= 1e-10 * (1 + abs(D))


# --- p-equation coefficients ------------------------------------------------

def test_example_coefficients():
    c1, c0 = p_equation_coefficients(P("1", "exp(x)"), 0.7)
    assert c1 == pytest.approx(-1.0, rel=1e-14)
    assert c0 == pytest.approx(-math.exp(0.7), rel=1e-14)


def test_constant_a_coefficients():
    c = -2.5
    prob = P(str(c), "x^2 + 1")
    x = 1.3
    f, f1 = x * x + 1, 2 * x
    c1, c0 = p_equation_coefficients(prob, x)
    assert c1 == pytest.approx(-f1 / f, rel=1e-14)
    assert c0 == pytest.approx(-c * f, rel=1e-14)


def test_trivial_coefficients():
    assert p_equation_coefficients(P("1", "1"), 3.0) == (0.0, -1.0)


@pytest.mark.parametrize("f, fprime", [("exp(x)", math.exp), ("cosh(x)", math.sinh),
                                       ("x^2 + 1", lambda x: 2 * x)])
def test_unit_a_specialization(f, fprime):
    prob = P("1", f)
    for x in (0.3, 1.1, 2.0):
        fx = prob.f(x)
        c1, c0 = p_equation_coefficients(prob, x)
        assert c1 == pytest.approx(-fprime(x) / fx, rel=1e-13)
        assert c0 == pytest.approx(-fx, rel=1e-14)


@pytest.mark.parametrize("a, f", [("x^2", "1"), ("exp(x)", "cos(x) + 2"), ("1 + x", "x")])
def test_first_coefficient_is_log_derivative_of_potential(a, f):
    prob = P(a, f)
    F = canonical_potential(prob).F
    for x in (0.5, 1.2, 2.4):
        c1, _ = p_equation_coefficients(prob, x)
        dF = central_difference(F, x, 1e-3)
        assert c1 == pytest.approx(-dF / F(x), rel=1e-8)


def test_singular_coefficient():
    # a = 1, f = x: D = 4x vanishes at 0
    with pytest.raises(SingularCoefficientError):
        p_equation_coefficients(P("1", "x"), 0.0)


# --- sampling checks --------------------------------------------------------

def test_a_zero_detected_with_bracket():
    with pytest.raises(AZeroError) as info:
        check_a_nonzero(P("x - 0.5", "1"), 0.0, 1.0)
    lo, hi = info.value.bracket
    assert lo <= 0.5 <= hi
    assert hi - lo < 0.05


def test_a_undefined_detected():
    with pytest.raises(AZeroError):
        check_a_nonzero(P("ln(x)", "1"), -1.0, 1.0)


def test_a_nonzero_passes():
    check_a_nonzero(P("2 + sin(x)", "1"), -5.0, 5.0)


def test_identically_zero():
    assert identically_zero(P("1", "0").f, 0.0, 3.0)
    assert identically_zero(P("1", "x - x").f, 0.0, 3.0)
    assert not identically_zero(P("1", "x").f, 0.0, 3.0)
