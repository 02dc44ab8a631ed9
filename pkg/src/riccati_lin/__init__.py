"""Solve dz/dx + a(x) z^2 = f(x) through an equivalent linear second-order equation."""

__version__ = "0.1.0"

from .expr import parse, evaluate, differentiate, simplify, to_string  # noqa: E402
from .transform import (  # noqa: E402
    RiccatiProblem, canonical_potential, y_from_z, z_from_y, initial_linear_state,
    reconstruct_z, p_equation_coefficients,
)
from .integrate import (  # noqa: E402
    SolveConfig, Trajectory, integrate_linear, integrate_direct, solve_linearized,
)
from .special import bessel, bessel_derivative  # noqa: E402
from . import families, verify  # noqa: E402,F401

__all__ = [
    "parse", "evaluate", "differentiate", "simplify", "to_string",
    "RiccatiProblem", "canonical_potential", "y_from_z", "z_from_y", "initial_linear_state",
    "reconstruct_z", "p_equation_coefficients",
    "SolveConfig", "Trajectory", "integrate_linear", "integrate_direct", "solve_linearized",
    "bessel", "bessel_derivative", "families", "verify",
]
