import dataclasses
import math

import numpy as np
import pytest

from oracles import HALF_LN3
from riccati_lin.families import note_f_zero
from riccati_lin.integrate import (
    FLAG_OK, SolveConfig, Trajectory, integrate_direct, solve_linearized,
)
from riccati_lin.transform import RiccatiProblem
from riccati_lin.verify import (
    VerificationReport, adaptive_simpson, closed_form_residual, compare_to_closed_form,
    cross_method_report, cross_ratio_report, fd_derivative, lemma_system_check, lift_solution,
    perturbed, pole_residue_report, residual_report, wronskian_report,
)


def P(a, f):
    return RiccatiProblem.from_text(a, f)


def exact_trajectory(xs, z, q=None, p=None):
    xs = np.asarray(xs, dtype=float)
    nan = np.full(len(xs), np.nan)
    return Trajectory(xs, np.asarray(z, dtype=float),
                      nan if q is None else np.asarray(q, dtype=float),
                      nan if p is None else np.asarray(p, dtype=float),
                      np.array([FLAG_OK] * len(xs)))


@pytest.fixture(scope="module")
def tanh_lin():
    return solve_linearized(P("1", "1"), 0.0, 0.0, 2.0)


@pytest.fixture(scope="module")
def exp_lin():
    return solve_linearized(P("1", "exp(x)"), 0.0, 1.0, 1.0)


# --- report object ----------------------------------------------------------

def test_report_passes_are_functions_of_numbers():
    r = VerificationReport(measures={"a": 1.0, "b": 3.0}, tolerances={"a": 2.0, "b": 2.0})
    assert r.passes == {"a": True, "b": False}
    assert not r.ok
    m = r.merged(VerificationReport(measures={"c": 0.0}, tolerances={"c": 0.0}))
    assert set(m.passes) == {"a", "b", "c"}
    d = m.to_dict()
    assert d["pass"] is False and d["passes"]["c"] is True


def test_fd_derivative_is_fourth_order():
    xs = np.linspace(0, 1, 101)
    d = fd_derivative(xs ** 4, xs[1] - xs[0])
    assert np.all(np.isnan(d[:2])) and np.all(np.isnan(d[-2:]))
    assert np.nanmax(np.abs(d - 4 * xs ** 3)) <= 1e-12


def test_adaptive_simpson():
    assert adaptive_simpson(math.exp, 0.0, 2.0, 1e-12) == pytest.approx(math.exp(2) - 1, rel=1e-12)
    assert adaptive_simpson(lambda t: 1 / t, 1.0, 3.0, 1e-12) == pytest.approx(math.log(3), rel=1e-11)


# --- residuals --------------------------------------------------------------

def test_residual_tanh(tanh_lin):
    rep = residual_report(P("1", "1"), tanh_lin)
    assert rep.max_residual <= 1e-6
    assert rep.ok
    assert len(rep.residual_grid) > 100


def test_residual_note_f_zero():
    xs = np.linspace(2.0, 4.0, 2001)
    form = note_f_zero(1.0)
    rep = residual_report(P("1", "0"), exact_trajectory(xs, [form(x) for x in xs]), tol=1e-8)
    assert rep.max_residual <= 1e-8


def test_residual_across_pole():
    prob = P("1", "1")
    t = solve_linearized(prob, 0.0, -2.0, 2.0)
    rep = residual_report(prob, t)
    assert rep.ok
    assert rep.excluded


def test_residual_segment_too_short():
    xs = np.linspace(0, 0.05, 6)
    with pytest.raises(ValueError):
        residual_report(P("1", "1"), exact_trajectory(xs, np.tanh(xs)))


def test_residual_spacing_mismatch(tanh_lin):
    with pytest.raises(ValueError):
        residual_report(P("1", "1"), tanh_lin, h=0.02)


def test_closed_form_residual():
    xs = np.linspace(0.2, 2.0, 50)
    assert closed_form_residual(math.tanh, P("1", "1"), xs) <= 1e-10
    assert closed_form_residual(lambda x: math.tanh(x) + 1e-3, P("1", "1"), xs) >= 1e-4


def test_compare_to_closed_form(tanh_lin):
    assert compare_to_closed_form(tanh_lin, math.tanh, tol=1e-8).ok
    assert not compare_to_closed_form(perturbed(tanh_lin), math.tanh, tol=1e-6).ok


# --- cross-method -----------------------------------------------------------

def test_cross_method_tanh():
    rep = cross_method_report(P("1", "1"), 0.0, 0.0, 2.0, SolveConfig())
    assert rep.comparison_max_gap <= 1e-7


def test_cross_method_pole_pairing():
    rep = cross_method_report(P("1", "1"), 0.0, -2.0, 2.0, SolveConfig())
    assert len(rep.pole_agreement) == 1
    x_lin, x_blow, gap = rep.pole_agreement[0]
    assert abs(x_lin - HALF_LN3) <= 1e-8
    assert gap <= 1e-4
    assert rep.ok


def test_cross_method_deterministic():
    a = cross_method_report(P("1", "exp(x)"), 0.0, 1.0, 1.0, SolveConfig())
    b = cross_method_report(P("1", "exp(x)"), 0.0, 1.0, 1.0, SolveConfig())
    assert a == b


# --- lemma system -----------------------------------------------------------

def test_lemma_exact_states():
    xs = np.linspace(0, 2, 201)
    t = exact_trajectory(xs, np.tanh(xs), np.cosh(xs), np.sinh(xs))
    rep = lemma_system_check(P("1", "1"), t)
    assert max(rep.lemma_checks.values()) <= 1e-8


def test_lemma_integrated(exp_lin):
    rep = lemma_system_check(P("1", "exp(x)"), exp_lin)
    assert max(rep.lemma_checks.values()) <= 1e-6
    assert rep.ok


def test_lemma_guard_band_excludes_zero_of_f():
    prob = P("1", "x")
    t = solve_linearized(prob, -1.0, 0.0, 1.0, SolveConfig(output_step=0.005))
    rep = lemma_system_check(prob, t, guard=1e-6)
    assert any(abs(x) < 1e-9 for x in rep.excluded)
    assert rep.ok


def test_lemma_requires_unit_a():
    with pytest.raises(ValueError):
        lemma_system_check(P("2", "1"), solve_linearized(P("2", "1"), 0.0, 0.0, 1.0))


# --- converse lift ----------------------------------------------------------

def test_lift_tanh():
    res = lift_solution(P("1", "1"), math.tanh, 0.5, 1.5)
    assert res.report.ok
    assert max(res.report.measures.values()) <= 1e-6
    assert np.all(res.q != 0)
    # tau(lo) = 0 pins p = sinh x / sinh(lo)
    assert np.max(np.abs(res.p - np.sinh(res.x) / math.sinh(0.5))) <= 1e-8
    assert np.max(np.abs(res.q - np.cosh(res.x) / math.sinh(0.5))) <= 1e-8


def test_lift_direct_trajectory():
    prob = P("1", "exp(x)")
    t = integrate_direct(prob, 0.0, 1.0, 1.0)
    res = lift_solution(prob, t, 0.25, 1.0)
    assert res.report.measures["lift_q_prime"] <= 1e-6


def test_lift_gauge_shift_cancels():
    res = lift_solution(P("1", "1"), math.tanh, 0.5, 1.5)
    assert np.allclose((math.e * res.p) / (math.e * res.q), res.p / res.q, rtol=1e-15)


def test_lift_rejects_zero_of_y():
    with pytest.raises(ValueError):
        lift_solution(P("1", "1"), math.tanh, -0.5, 0.5)


def test_lift_rejects_zero_of_f():
    with pytest.raises(ValueError):
        lift_solution(P("1", "x"), lambda x: 1.0 + x * x, -0.5, 0.5)


# --- invariant suites -------------------------------------------------------

@pytest.mark.parametrize("a, f, lo, hi", [("1", "exp(x)", 0.0, 2.0), ("x^2", "1", 0.5, 2.0),
                                          ("-1", "x", 0.0, 3.0)])
def test_wronskian_suite(a, f, lo, hi):
    assert wronskian_report(P(a, f), lo, hi).ok


def test_cross_ratio_suite():
    assert cross_ratio_report(P("1", "exp(x)"), 0.0, (-1.0, 0.0, 1.0, 2.0), 1.0).ok


def test_cross_ratio_needs_four():
    with pytest.raises(ValueError):
        cross_ratio_report(P("1", "1"), 0.0, (0.0, 1.0), 1.0)


def test_pole_residue_requires_linear():
    with pytest.raises(ValueError):
        pole_residue_report(P("1", "1"), integrate_direct(P("1", "1"), 0.0, 0.0, 1.0))


# --- negative controls ------------------------------------------------------

def test_negative_residual(tanh_lin):
    rep = residual_report(P("1", "1"), perturbed(tanh_lin))
    assert rep.max_residual >= 1e-3
    assert not rep.ok


def test_negative_cross_method():
    prob, cfg = P("1", "1"), SolveConfig()
    lin = solve_linearized(prob, 0.0, 0.0, 2.0, cfg)
    direct = integrate_direct(prob, 0.0, 0.0, 2.0, cfg)
    rep = cross_method_report(prob, 0.0, 0.0, 2.0, cfg, lin=perturbed(lin), direct=direct)
    assert not rep.ok


@pytest.mark.parametrize("what", ["q", "p"])
def test_negative_lemma(exp_lin, what):
    assert not lemma_system_check(P("1", "exp(x)"), perturbed(exp_lin, what=what)).ok


def test_negative_lift():
    res = lift_solution(P("1", "1"), lambda x: math.tanh(x) + 1e-3, 0.5, 1.5)
    assert not res.report.ok


def test_negative_wronskian():
    assert not wronskian_report(P("1", "exp(x)"), 0.0, 2.0, perturb=1e-3).ok


def test_negative_cross_ratio():
    prob = P("1", "exp(x)")
    ts = [solve_linearized(prob, 0.0, z0, 1.0) for z0 in (-1.0, 0.0, 1.0, 2.0)]
    ts[0] = perturbed(ts[0])
    assert not cross_ratio_report(prob, 0.0, (), 1.0, trajectories=ts).ok


def test_negative_pole_residue():
    prob = P("1", "1")
    t = solve_linearized(prob, 0.0, -2.0, 1.0)
    assert pole_residue_report(prob, t).ok
    shifted = dataclasses.replace(t, poles=(t.poles[0] + 1e-3,))
    assert not pole_residue_report(prob, shifted).ok
