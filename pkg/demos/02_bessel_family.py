"""
A closed form made of Bessel functions
======================================

z' + z^2 = e^x is solved by

    z = e^(x/2) (K1 K_1(u) + K2 I_1(u)) / (-K1 K_0(u) + K2 I_0(u)),  u = 2 e^(x/2).

Fit the constants to an initial value, then compare with the numerical
linearized solve.
"""

# %%
import numpy as np

from riccati_lin import SolveConfig, solve_linearized
from riccati_lin.families import example1, fit_constants
from riccati_lin.special import iv

# %%
# The K1 = 0 branch passes through I_1(2)/I_0(2) at x = 0.
z0 = iv(1, 2.0) / iv(0, 2.0)
form = fit_constants(example1(), 0.0, z0)
print("fitted constants (K1, K2):", form.constants)

# %%
traj = solve_linearized(form.problem, 0.0, z0, 2.0, SolveConfig(output_step=0.25))
print("\n   x     closed form        linearized        difference")
for x, z in zip(traj.x, traj.z):
    c = form(x)
    print(f"{x:5.2f}  {c:16.12f}  {z:16.12f}  {z - c: .2e}")

# %%
# A generic initial value brings in K_0, K_1 as well.
form = fit_constants(example1(), 0.0, -1.5)
traj = solve_linearized(form.problem, 0.0, -1.5, 1.5, SolveConfig(output_step=0.01))
gap = np.nanmax(np.abs(traj.z - [form(x) for x in traj.x]))
print("\nz(0) = -1.5: constants", form.constants, " poles", traj.poles)
print("max |linearized - closed form| away from poles:", gap)
