"""
Constant and power-law coefficients
===================================

For a = c x^n the potential of q'' = F q is c x^n f + n(n+2)/(4x^2).
Two special cases have elementary or Bessel closed forms:

* z' + c z^2 = x^-2 has power-law solutions,
* z' + c z^2 = x^n with c < 0 reduces to Bessel J and Y.
"""

# %%
import math

from riccati_lin import RiccatiProblem, integrate_direct
from riccati_lin.families import corollary2, corollary3, corollary4, fit_constants
from riccati_lin.transform import canonical_potential

# %%
# Two routes to the same potential.
s = corollary2(1.0, 2.0, "1")
F = canonical_potential(RiccatiProblem.from_text("x^2", "1")).F
for x in (0.5, 1.0, 2.0):
    print(f"x={x}: corollary {s.F(x):.15f}  general {F(x):.15f}")

# %%
# c = 2, K2 = 0 collapses to z = 1/x.
form = corollary4(2.0, 1.0, 0.0)
direct = integrate_direct(form.problem, 1.0, 1.0, 3.0)
print("\ncorollary 4 member vs 1/x and vs direct integration")
for x, z in zip(direct.x[::50], direct.z[::50]):
    print(f"  x={x:.1f}  formula={form(x):.12f}  direct={z:.12f}  1/x={1 / x:.12f}")

# %%
# c = -1, n = 0: half-integer Bessel functions are sines and cosines, and the
# member through (0.1, tan 0.1) is tan x.
form = fit_constants(corollary3(-1.0, 0.0), 0.1, math.tan(0.1))
print("\ncorollary 3 member through (0.1, tan 0.1), constants", form.constants)
for x in (0.1, 0.5, 1.0, 1.4):
    print(f"  x={x}  formula={form(x):.12f}  tan={math.tan(x):.12f}")
