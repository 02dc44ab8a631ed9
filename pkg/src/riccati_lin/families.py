"""Closed-form solution families of dz/dx + a(x) z^2 = f(x).

Every family with free constants is written as

    z(x) = g(x) * (K1 n1(x) + K2 n2(x)) / (K1 d1(x) + K2 d2(x)),

so the constants are projective and fitting an initial value is a single
linear condition on (K1, K2). Families with Bessel functions are evaluated
for x > 0 only.

============  =========================  ==================================
tag           equation                   solution
============  =========================  ==================================
note_f_zero   z' + z^2 = 0               1/(x - K)
example1      z' + z^2 = e^x             Bessel I/K of argument 2 e^(x/2)
corollary3    z' + c z^2 = x^n, c < 0    Bessel J/Y of argument
                                         2 sqrt(-c) x^(n/2+1) / (n+2)
corollary4    z' + c z^2 = x^-2          powers x^sqrt(1+4c)
============  =========================  ==================================

``corollary1`` and ``corollary2`` have no closed form; they return the
specialised linear system (:class:`LinearSystem`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

from .expr import Const, Expr, NotAValue, Pow, Var, as_expr, parse
from .special import iv, jv, kv, yv
from .transform import RiccatiProblem

__all__ = [
    "ClosedForm", "LinearSystem", "FamilyError", "FAMILIES",
    "note_f_zero", "example1", "corollary1", "corollary2", "corollary3",
    "corollary4", "fit_constants", "make_family",
]


class FamilyError(ValueError):
    pass


@dataclass(frozen=True)
class ClosedForm:
    """One member (or, before fitting, a parameterised family) of a solution family."""

    family: str
    params: dict
    constants: tuple
    problem: RiccatiProblem
    domain: str
    _basis: Callable = field(default=None, repr=False, compare=False)

    def parts(self, x: float):
        """``(g, (n1, n2), (d1, d2))`` at x."""
        return self._basis(float(x))

    def __call__(self, x: float) -> float:
        g, (n1, n2), (d1, d2) = self.parts(x)
        k1, k2 = self.constants
        den = k1 * d1 + k2 * d2
        if den == 0.0:
            return NotAValue("pole")
        return g * (k1 * n1 + k2 * n2) / den

    def denominator(self, x: float) -> float:
        _, _, (d1, d2) = self.parts(x)
        k1, k2 = self.constants
        return k1 * d1 + k2 * d2

    def with_constants(self, k1: float, k2: float) -> ClosedForm:
        if k1 == 0 and k2 == 0:
            raise FamilyError("constants (0, 0) do not define a solution")
        return replace(self, constants=(float(k1), float(k2)))


@dataclass(frozen=True)
class LinearSystem:
    """Specialised linear system: ``q'' = F q`` and ``z = reconstruct(x, q, p)``."""

    problem: RiccatiProblem
    F: Callable[[float], float]
    reconstruct: Callable[[float, float, float], float]


def note_f_zero(K: float = 0.0) -> ClosedForm:
    """z = 1/(x - K) solving z' + z^2 = 0 away from x = K."""
    def basis(x):
        return 1.0, (1.0, 0.0), (x, -1.0)

    return ClosedForm("note_f_zero", {}, (1.0, float(K)),
                      RiccatiProblem(Const(1.0), Const(0.0)),
                      "x != K", basis)


def example1(K1: float = 0.0, K2: float = 1.0) -> ClosedForm:
    """Solution family of z' + z^2 = e^x."""
    def basis(x):
        s = math.exp(0.5 * x)
        u = 2.0 * s
        return s, (kv(1, u), iv(1, u)), (-kv(0, u), iv(0, u))

    # the Bessel envelope x <= 50 limits u = 2 e^(x/2)
    return ClosedForm("example1", {}, (float(K1), float(K2)),
                      RiccatiProblem(Const(1.0), parse("exp(x)")),
                      "all real x with 2 e^(x/2) <= 50", basis)


def _check_c(c):
    c = float(c)
    if c == 0.0:
        raise FamilyError("c = 0 removes the quadratic term; the family divides by c")
    return c


def corollary1(c: float, f: Expr | str) -> LinearSystem:
    """Constant a = c: ``q'' = c f q`` and ``z = p/(c q)``."""
    c = _check_c(c)
    f = as_expr(f)

    def F(x):
        return c * f.evaluate(x)

    def reconstruct(x, q, p):
        return p / (c * q)

    return LinearSystem(RiccatiProblem(Const(c), f), F, reconstruct)


def corollary2(c: float, n: float, f: Expr | str) -> LinearSystem:
    """a = c x^n on x > 0: ``q'' = (c x^n f + n(n+2)/(4x^2)) q``."""
    c = _check_c(c)
    n = float(n)
    f = as_expr(f)

    def F(x):
        return c * x ** n * f.evaluate(x) + n * (n + 2.0) / (4.0 * x * x)

    def reconstruct(x, q, p):
        return p / (c * x ** n * q) + n / (2.0 * c * x ** (n + 1.0))

    a = Const(c) if n == 0 else Const(c) * Pow(Var(), Const(n))
    return LinearSystem(RiccatiProblem(a, f), F, reconstruct)


def corollary3(c: float, n: float, K1: float = 1.0, K2: float = 0.0) -> ClosedForm:
    """Solution family of z' + c z^2 = x^n for c < 0, n > -2, x > 0."""
    c, n = float(c), float(n)
    if not c < 0:
        raise FamilyError("corollary3 requires c < 0")
    if n == -2:
        raise FamilyError("corollary3 requires n != -2")
    if n < -2:
        raise FamilyError("corollary3 is implemented for n > -2 (positive Bessel argument)")
    nu = 1.0 / (n + 2.0)
    nu_low = -(n + 1.0) / (n + 2.0)
    r = math.sqrt(-c)
    scale = 2.0 * r / (n + 2.0)

    def basis(x):
        if x <= 0:
            raise FamilyError("corollary3 is defined for x > 0")
        u = scale * x ** (0.5 * n + 1.0)
        g = -x ** (0.5 * n) / r
        return g, (jv(nu_low, u), yv(nu_low, u)), (jv(nu, u), yv(nu, u))

    f = Const(1.0) if n == 0 else Pow(Var(), Const(n))
    return ClosedForm("corollary3", {"c": c, "n": n}, (float(K1), float(K2)),
                      RiccatiProblem(Const(c), f), "x > 0", basis)


def corollary4(c: float, K1: float = 1.0, K2: float = 0.0) -> ClosedForm:
    """Solution family of z' + c z^2 = x^-2 for c >= -1/4, c != 0, x > 0."""
    c = _check_c(c)
    if c < -0.25:
        raise FamilyError("corollary4 requires c >= -1/4")
    s = math.sqrt(1.0 + 4.0 * c)

    def basis(x):
        if x <= 0:
            raise FamilyError("corollary4 is defined for x > 0")
        xs = x ** s
        return -2.0 / x, (xs, 1.0), ((1.0 - s) * xs, 1.0 + s)

    return ClosedForm("corollary4", {"c": c}, (float(K1), float(K2)),
                      RiccatiProblem(Const(c), parse("x^(-2)")), "x > 0", basis)


def fit_constants(form: ClosedForm, x0: float, z0: float, rtol: float = 1e-9) -> ClosedForm:
    """Family member with z(x0) = z0.

    ``z0 (K1 d1 + K2 d2) = g (K1 n1 + K2 n2)`` is one homogeneous linear
    equation in (K1, K2); its null vector is normalised to unit length with
    the larger entry positive.
    """
    g, (n1, n2), (d1, d2) = form.parts(x0)
    alpha = z0 * d1 - g * n1
    beta = z0 * d2 - g * n2
    if alpha == 0.0 and beta == 0.0:
        raise FamilyError(f"z({x0!r}) = {z0!r} does not determine the constants")
    k1, k2 = beta, -alpha
    norm = math.hypot(k1, k2)
    k1, k2 = k1 / norm, k2 / norm
    if (k1 if abs(k1) >= abs(k2) else k2) < 0:
        k1, k2 = -k1, -k2
    fitted = form.with_constants(k1, k2)
    value = fitted(x0)
    if isinstance(value, NotAValue) or abs(value - z0) > rtol * max(1.0, abs(z0)):
        raise FamilyError(f"no member of {form.family} attains z({x0!r}) = {z0!r}")
    return fitted


FAMILIES = {
    "note_f_zero": ("k",),
    "example1": ("k1", "k2"),
    "corollary3": ("c", "n", "k1", "k2"),
    "corollary4": ("c", "k1", "k2"),
}


def make_family(tag: str, c=None, n=None, k=None, k1=None, k2=None) -> ClosedForm:
    """Construct a family by tag from keyword parameters (used by the CLI)."""
    def need(name, value):
        if value is None:
            raise FamilyError(f"family {tag!r} needs --{name}")
        return value

    if tag == "note_f_zero":
        return note_f_zero(0.0 if k is None else k)
    if tag == "example1":
        return example1(0.0 if k1 is None else k1, 1.0 if k2 is None else k2)
    if tag == "corollary3":
        return corollary3(need("c", c), need("n", n),
                          1.0 if k1 is None else k1, 0.0 if k2 is None else k2)
    if tag == "corollary4":
        return corollary4(need("c", c), 1.0 if k1 is None else k1, 0.0 if k2 is None else k2)
    raise FamilyError(f"unknown family {tag!r}; choose from {', '.join(FAMILIES)}")
