"""Reduction of dz/dx + a(x) z^2 = f(x) to a linear second-order equation.

With ``y = a z - a'/(2a)`` the equation becomes ``y' + y^2 = F`` where

    F = a f - a''/(2a) + 3 a'^2 / (4 a^2),

and ``y = p/q`` with ``q' = p``, ``q'' = F q``. The solution is recovered as
``z = p/(a q) + a'/(2 a^2)``. Zeros of ``q`` are poles of ``z``; the linear
pair ``(q, p)`` stays smooth through them.

Only the ``q``-equation is integrated. The companion second-order equation
for ``p`` has a first-derivative coefficient that is singular where
``D = 4 a^3 f - 2 a a'' + 3 a'^2`` vanishes, so it is exposed for residual
checks only (:func:`p_equation_coefficients`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .expr import Expr, NotAValue, as_expr, differentiate

__all__ = [
    "RiccatiProblem", "CanonicalPotential", "LinearState",
    "TransformError", "AZeroError", "SingularCoefficientError",
    "canonical_potential", "y_from_z", "z_from_y", "initial_linear_state",
    "reconstruct_z", "p_equation_coefficients", "check_a_nonzero",
    "identically_zero", "sample_points",
]

N_SAMPLES = 64


class TransformError(ArithmeticError):
    pass


class AZeroError(TransformError):
    """a(x) vanishes (or is undefined) inside the solve interval."""

    def __init__(self, message, bracket):
        super().__init__(message)
        self.bracket = bracket


class SingularCoefficientError(TransformError):
    pass


@dataclass(frozen=True)
class RiccatiProblem:
    """The coefficient pair ``(a, f)`` with cached symbolic derivatives."""

    a: Expr
    f: Expr
    a1: Expr = field(init=False, repr=False)
    a2: Expr = field(init=False, repr=False)
    a3: Expr = field(init=False, repr=False)
    f1: Expr = field(init=False, repr=False)

    def __post_init__(self):
        a = as_expr(self.a)
        f = as_expr(self.f)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "f", f)
        a1 = differentiate(a, 1)
        a2 = differentiate(a1, 1)
        object.__setattr__(self, "a1", a1)
        object.__setattr__(self, "a2", a2)
        object.__setattr__(self, "a3", differentiate(a2, 1))
        object.__setattr__(self, "f1", differentiate(f, 1))

    @classmethod
    def from_text(cls, a: str, f: str) -> RiccatiProblem:
        return cls(as_expr(a), as_expr(f))

    def rhs(self, x: float, z: float) -> float:
        """z' = f(x) - a(x) z^2."""
        return self.f.evaluate(x) - self.a.evaluate(x) * z * z


@dataclass(frozen=True)
class CanonicalPotential:
    """``F`` and ``D = 4 a^2 F`` as callables of ``x``."""

    F: Callable[[float], float]
    D: Callable[[float], float]


@dataclass(frozen=True)
class LinearState:
    x: float
    q: float
    p: float


def _a_at(prob, x):
    a = prob.a.evaluate(x)
    if isinstance(a, NotAValue) or a == 0.0:
        raise AZeroError(f"a(x) is zero or undefined at x={x!r}", (x, x))
    return a


def canonical_potential(prob: RiccatiProblem) -> CanonicalPotential:
    a_, a1_, a2_, f_ = (prob.a.evaluate, prob.a1.evaluate,
                        prob.a2.evaluate, prob.f.evaluate)

    def F(x):
        a = _a_at(prob, x)
        a1 = a1_(x)
        return a * f_(x) - a2_(x) / (2.0 * a) + 3.0 * a1 * a1 / (4.0 * a * a)

    def D(x):
        a = a_(x)
        a1 = a1_(x)
        return 4.0 * a ** 3 * f_(x) - 2.0 * a * a2_(x) + 3.0 * a1 * a1

    return CanonicalPotential(F, D)


def y_from_z(prob: RiccatiProblem, x: float, z: float) -> float:
    a = _a_at(prob, x)
    return a * z - prob.a1.evaluate(x) / (2.0 * a)


def z_from_y(prob: RiccatiProblem, x: float, y: float) -> float:
    a = _a_at(prob, x)
    return y / a + prob.a1.evaluate(x) / (2.0 * a * a)


def initial_linear_state(prob: RiccatiProblem, x0: float, z0: float) -> LinearState:
    """Gauge q(x0) = 1, so p(x0) = y(x0)."""
    return LinearState(float(x0), 1.0, y_from_z(prob, x0, z0))


def reconstruct_z(prob: RiccatiProblem, state: LinearState, pole_threshold: float = 0.0) -> float:
    """``p/(a q) + a'/(2 a^2)``; a ``NotAValue('pole')`` when ``|q| <= pole_threshold``."""
    if abs(state.q) <= pole_threshold:
        return NotAValue("pole")
    a = _a_at(prob, state.x)
    return state.p / (a * state.q) + prob.a1.evaluate(state.x) / (2.0 * a * a)


def p_equation_coefficients(prob: RiccatiProblem, x: float) -> tuple[float, float]:
    """``(c1, c0)`` with ``p'' + c1 p' + c0 p = 0``.

    Raises :class:`SingularCoefficientError` where ``D(x) = 0``.
    """
    a = _a_at(prob, x)
    a1, a2, a3 = prob.a1.evaluate(x), prob.a2.evaluate(x), prob.a3.evaluate(x)
    f, f1 = prob.f.evaluate(x), prob.f1.evaluate(x)
    D = 4.0 * a ** 3 * f - 2.0 * a * a2 + 3.0 * a1 * a1
    if D == 0.0 or not math.isfinite(D):
        raise SingularCoefficientError(f"D(x) = {D!r} at x={x!r}")
    num = (-2.0 * a ** 3 * a1 * f - 2.0 * a ** 4 * f1 + a * a * a3
           - 4.0 * a * a1 * a2 + 3.0 * a1 ** 3)
    c1 = 2.0 / a * num / D
    c0 = -a * f + a2 / (2.0 * a) - 3.0 * a1 * a1 / (4.0 * a * a)
    return c1, c0


def sample_points(lo: float, hi: float, n: int = N_SAMPLES) -> np.ndarray:
    """Endpoints plus ``n`` interior points."""
    lo, hi = min(lo, hi), max(lo, hi)
    return np.linspace(lo, hi, n + 2)


def check_a_nonzero(prob: RiccatiProblem, lo: float, hi: float) -> None:
    """Raise :class:`AZeroError` if sampling finds a zero or sign change of a."""
    xs = [float(x) for x in sample_points(lo, hi)]
    vals = [prob.a.evaluate(x) for x in xs]
    for i, v in enumerate(vals):
        if isinstance(v, NotAValue) or v == 0.0:
            lo_b = xs[max(i - 1, 0)]
            hi_b = xs[min(i + 1, len(xs) - 1)]
            raise AZeroError(f"a(x) vanishes or is undefined in [{lo_b!r}, {hi_b!r}]",
                             (lo_b, hi_b))
    for x_l, x_r, v_l, v_r in zip(xs[:-1], xs[1:], vals[:-1], vals[1:]):
        if (v_l > 0) != (v_r > 0):
            raise AZeroError(f"a(x) changes sign in [{x_l!r}, {x_r!r}]",
                             (x_l, x_r))


def identically_zero(e: Expr, lo: float, hi: float) -> bool:
    """Sampling test: every sample of ``e`` on [lo, hi] is exactly zero."""
    return all(e.evaluate(float(x)) == 0.0 for x in sample_points(lo, hi))
