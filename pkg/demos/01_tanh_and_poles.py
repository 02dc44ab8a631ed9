"""
Through a pole and out the other side
=====================================

z' + z^2 = 1 with z(0) = -2 has the solution coth(x - ln(3)/2), which blows
up at x = ln(3)/2. A direct Runge-Kutta run has to stop there. The linear
pair q'' = q, q' = p is smooth everywhere, so z = p/q can be read off on
both sides of the pole.
"""

# %%
import math

import numpy as np

from riccati_lin import RiccatiProblem, SolveConfig, integrate_direct, solve_linearized

prob = RiccatiProblem.from_text("1", "1")
cfg = SolveConfig(output_step=0.05)

# %%
# The smooth case first: z(0) = 0 gives tanh.
lin = solve_linearized(prob, 0.0, 0.0, 2.0, cfg)
direct = integrate_direct(prob, 0.0, 0.0, 2.0, cfg)
print("tanh case, z(2):")
print("  linearized ", lin.value_at(2.0))
print("  direct     ", direct.value_at(2.0))
print("  tanh(2)    ", math.tanh(2.0))

# %%
# Now start below -1.
lin = solve_linearized(prob, 0.0, -2.0, 2.0, cfg)
direct = integrate_direct(prob, 0.0, -2.0, 2.0, cfg)
x_star = 0.5 * math.log(3.0)

print("\npole found at", lin.poles, " exact:", x_star)
for e in direct.events:
    print("direct solver:", e.kind, "at x =", e.x)

# %%
# Samples on both sides, next to the exact coth branch.
print("\n   x      linearized        direct           coth(x - x*)")
for x, zl, zd in zip(lin.x[::4], lin.z[::4], direct.z[::4]):
    exact = 1.0 / math.tanh(x - x_star)
    print(f"{x:5.2f}  {zl:16.10f}  {zd:16.10f}  {exact:16.10f}")

# %%
# Behind the scenes q changes sign while p stays finite.
i = int(np.argmin(np.abs(lin.x - x_star)))
print("\nq, p around the pole:")
for j in range(i - 2, i + 3):
    print(f"  x={lin.x[j]:.2f}  q={lin.q[j]: .6f}  p={lin.p[j]: .6f}")
