"""
Evidence without a closed form
==============================

z' + z^2 = e^x from z(0) = 1, checked the ways that do not need an exact
answer: finite-difference residual, a second method, the Wronskian of the
linear equation, the cross-ratio of four solutions. Then the same checks on
a trajectory nudged by 1e-3, which must all fail.
"""

# %%
from riccati_lin import RiccatiProblem, SolveConfig, integrate_direct, solve_linearized
from riccati_lin.verify import (
    cross_method_report, cross_ratio_report, lemma_system_check, perturbed, residual_report,
    wronskian_report,
)

prob = RiccatiProblem.from_text("1", "exp(x)")
cfg = SolveConfig()
lin = solve_linearized(prob, 0.0, 1.0, 1.0, cfg)
direct = integrate_direct(prob, 0.0, 1.0, 1.0, cfg)


def show(title, report):
    print(title)
    for name, value in report.measures.items():
        verdict = "pass" if report.passes[name] else "FAIL"
        print(f"  {name:22s} {value:10.3e}  <= {report.tolerances[name]:.0e}  {verdict}")


# %%
show("residual", residual_report(prob, lin))
show("cross-method", cross_method_report(prob, 0.0, 1.0, 1.0, cfg, lin=lin, direct=direct))
show("lemma system", lemma_system_check(prob, lin))
show("Wronskian", wronskian_report(prob, 0.0, 1.0, cfg))
show("cross-ratio", cross_ratio_report(prob, 0.0, (-1.0, 0.0, 1.0, 2.0), 1.0, cfg))

# %%
# Negative controls.
bad = perturbed(lin)
print()
show("residual, z + 1e-3", residual_report(prob, bad))
show("cross-method, z + 1e-3", cross_method_report(prob, 0.0, 1.0, 1.0, cfg, lin=bad, direct=direct))
show("lemma system, p + 1e-3", lemma_system_check(prob, perturbed(lin, what="p")))
