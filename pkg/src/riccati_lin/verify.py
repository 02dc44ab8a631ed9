"""Independent evidence for computed solutions.

Everything here checks a trajectory against something it was not computed
from: finite-difference residuals of the original equation, a second
solution method, a closed form, conserved quantities of the linear equation
(Wronskian, cross-ratio), or the converse construction that lifts a
solution ``y`` of ``y' + y^2 = f`` back to a linear pair ``(p, q)``.

Each report stores measured values and tolerances; its pass flags are
computed from those numbers only.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from .expr import NotAValue
from .integrate import (
    FLAG_OK, SolveConfig, Trajectory, integrate_direct, integrate_linear,
    solve_linearized,
)
from .transform import (
    LinearState, RiccatiProblem, SingularCoefficientError, canonical_potential,
    identically_zero, p_equation_coefficients, reconstruct_z,
)

__all__ = [
    "VerificationReport", "LiftResult", "fd_derivative", "fd_second_derivative",
    "residual_report", "closed_form_residual", "compare_to_closed_form",
    "cross_method_report", "lemma_system_check", "lift_solution",
    "wronskian_report", "cross_ratio_report", "pole_residue_report",
    "adaptive_simpson", "perturbed",
]

PERTURBATION = 1e-3


@dataclass(frozen=True)
class VerificationReport:
    """Measured values, their tolerances, and the raw material behind them.

    ``measures[name] <= tolerances[name]`` is the pass criterion for each
    check ``name``.
    """

    max_residual: float | None = None
    residual_grid: tuple = ()
    comparison_max_gap: float | None = None
    pole_agreement: tuple = ()
    lemma_checks: dict = field(default_factory=dict)
    measures: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    excluded: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "measures", {k: float(v) for k, v in self.measures.items()})
        object.__setattr__(self, "lemma_checks",
                           {k: float(v) for k, v in self.lemma_checks.items()})
        if self.max_residual is not None:
            object.__setattr__(self, "max_residual", float(self.max_residual))

    @property
    def passes(self) -> dict:
        return {name: bool(value <= self.tolerances[name])
                for name, value in self.measures.items()}

    @property
    def ok(self) -> bool:
        return all(self.passes.values())

    def merged(self, other: VerificationReport) -> VerificationReport:
        def pick(a, b):
            return b if a in (None, (), {}) else a
        return VerificationReport(
            max_residual=pick(self.max_residual, other.max_residual),
            residual_grid=pick(self.residual_grid, other.residual_grid),
            comparison_max_gap=pick(self.comparison_max_gap, other.comparison_max_gap),
            pole_agreement=pick(self.pole_agreement, other.pole_agreement),
            lemma_checks={**self.lemma_checks, **other.lemma_checks},
            measures={**self.measures, **other.measures},
            tolerances={**self.tolerances, **other.tolerances},
            excluded=self.excluded + other.excluded,
        )

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passes"] = self.passes
        d["pass"] = self.ok
        return d


# ---------------------------------------------------------------------------
# finite differences

def fd_derivative(v: np.ndarray, s: float) -> np.ndarray:
    """Fourth-order central first derivative; NaN in the two end slots each side."""
    out = np.full(len(v), np.nan)
    if len(v) >= 5:
        out[2:-2] = (v[:-4] - 8 * v[1:-3] + 8 * v[3:-1] - v[4:]) / (12 * s)
    return out


def fd_second_derivative(v: np.ndarray, s: float) -> np.ndarray:
    out = np.full(len(v), np.nan)
    if len(v) >= 5:
        out[2:-2] = (-v[:-4] + 16 * v[1:-3] - 30 * v[2:-2] + 16 * v[3:-1] - v[4:]) / (12 * s * s)
    return out


def _fd_point(fn, x, h):
    return (fn(x - 2 * h) - 8 * fn(x - h) + 8 * fn(x + h) - fn(x + 2 * h)) / (12 * h)


def _spacing(x, h=None):
    s = float(x[1] - x[0])
    if np.max(np.abs(np.diff(x) - s)) > 1e-9 * abs(s):
        raise ValueError("trajectory samples are not uniformly spaced")
    if h is not None and abs(h - s) > 1e-9 * abs(s):
        raise ValueError(f"sample spacing {s!r} does not match h={h!r}")
    return s


def perturbed(traj: Trajectory, delta: float = PERTURBATION, what: str = "z") -> Trajectory:
    """Copy of ``traj`` with ``delta`` added to z, q or p (negative controls)."""
    if what == "z":
        return traj.with_z(traj.z + delta)
    if what == "q":
        return Trajectory(traj.x, traj.z, traj.q + delta, traj.p, traj.flags,
                          traj.poles, traj.events, traj.method)
    if what == "p":
        return Trajectory(traj.x, traj.z, traj.q, traj.p + delta, traj.flags,
                          traj.poles, traj.events, traj.method)
    raise ValueError(f"cannot perturb {what!r}")


# ---------------------------------------------------------------------------
# residuals

MIN_SEGMENT = 9


def residual_report(prob: RiccatiProblem, traj: Trajectory, h: float | None = None,
                    tol: float = 1e-6, pole_margin: float | None = None) -> VerificationReport:
    """Finite-difference residual ``z' + a z^2 - f`` on the pole-free segments.

    ``h`` is the expected sample spacing (checked, not resampled). Points
    closer than ``pole_margin`` (default 50 sample spacings) to a pole are
    skipped, since the difference stencil cannot resolve ``1/(x - x*)``
    there. The pass measure scales the residual by ``1 + |f| + |z|^2``.
    """
    s = _spacing(traj.x, h)
    margin = 50 * abs(s) if pole_margin is None else pole_margin
    grid = []
    scaled = []
    skipped = []
    segs = [seg for seg in traj.segments() if len(seg) >= MIN_SEGMENT]
    if not segs:
        raise ValueError(f"no pole-free segment has {MIN_SEGMENT} or more samples")
    for seg in traj.segments():
        if len(seg) < MIN_SEGMENT:
            skipped.extend(float(traj.x[i]) for i in seg)
            continue
        xs = traj.x[seg]
        zs = traj.z[seg]
        dz = fd_derivative(zs, s)
        for x, z, d in zip(xs[2:-2], zs[2:-2], dz[2:-2]):
            if any(abs(x - xp) < margin for xp in traj.poles):
                skipped.append(float(x))
                continue
            a = prob.a.evaluate(x)
            f = prob.f.evaluate(x)
            r = d + a * z * z - f
            grid.append((float(x), float(r)))
            scaled.append(abs(r) / (1 + abs(f) + z * z))
    max_res = max((abs(r) for _, r in grid), default=math.nan)
    return VerificationReport(
        max_residual=max_res, residual_grid=tuple(grid),
        measures={"residual": max(scaled, default=math.inf)},
        tolerances={"residual": tol}, excluded=tuple(skipped))


def closed_form_residual(fn: Callable[[float], float], prob: RiccatiProblem,
                         xs: Sequence[float], h: float = 1e-4) -> float:
    """max |z' + a z^2 - f| / (1 + |f| + |z|^2) with a central-difference z'."""
    worst = 0.0
    for x in xs:
        z = fn(x)
        d = _fd_point(fn, x, h)
        a, f = prob.a.evaluate(x), prob.f.evaluate(x)
        worst = max(worst, abs(d + a * z * z - f) / (1 + abs(f) + z * z))
    return worst


def compare_to_closed_form(traj: Trajectory, form: Callable[[float], float],
                           tol: float = 1e-6) -> VerificationReport:
    gap = 0.0
    for x, z, flag in zip(traj.x, traj.z, traj.flags):
        if flag == FLAG_OK:
            gap = max(gap, abs(z - form(x)))
    return VerificationReport(comparison_max_gap=gap, measures={"closed_form_gap": gap},
                              tolerances={"closed_form_gap": tol})


# ---------------------------------------------------------------------------
# cross-method comparison

def cross_method_report(prob: RiccatiProblem, x0: float, z0: float, x_end: float,
                        cfg: SolveConfig = SolveConfig(), tol: float = 1e-7,
                        pole_tol: float = 1e-3, lin: Trajectory | None = None,
                        direct: Trajectory | None = None) -> VerificationReport:
    """Compare linearized and direct solutions on their common pole-free samples.

    Each direct blow-up is paired with the nearest linearized pole.
    """
    lin = lin if lin is not None else solve_linearized(prob, x0, z0, x_end, cfg)
    direct = direct if direct is not None else integrate_direct(prob, x0, z0, x_end, cfg)
    both = lin.ok & direct.ok
    gap = float(np.max(np.abs(lin.z[both] - direct.z[both]))) if both.any() else math.nan
    pairs = []
    for xb in direct.poles:
        if lin.poles:
            xp = min(lin.poles, key=lambda v: abs(v - xb))
            pairs.append((float(xp), float(xb), abs(float(xp) - float(xb))))
        else:
            pairs.append((math.nan, float(xb), math.inf))
    measures = {"comparison_gap": gap if both.any() else math.inf}
    tolerances = {"comparison_gap": tol}
    if pairs:
        measures["pole_gap"] = max(p[2] for p in pairs)
        tolerances["pole_gap"] = pole_tol
    return VerificationReport(comparison_max_gap=gap, pole_agreement=tuple(pairs),
                              measures=measures, tolerances=tolerances)


# ---------------------------------------------------------------------------
# the a = 1 system q' = p, p' = f q, and its converse

def _require_unit_a(prob, lo, hi):
    if not identically_zero(prob.a - 1.0, lo, hi):
        raise ValueError("this check applies to a(x) = 1 only")


def lemma_system_check(prob: RiccatiProblem, traj: Trajectory, guard: float = 1e-6,
                       tol: float = 1e-6) -> VerificationReport:
    """Check q' = p, p' = f q, q = p'/f and the p-equation on linear samples.

    Derivatives are finite differences of the sampled q and p. The
    relations that divide by f are skipped where ``|f| <= guard``; those
    points are listed in ``excluded``.
    """
    x, q, p = traj.x, traj.q, traj.p
    _require_unit_a(prob, float(x[0]), float(x[-1]))
    s = _spacing(x)
    dq = fd_derivative(q, s)
    dp = fd_derivative(p, s)
    d2p = fd_second_derivative(p, s)
    defects = {"q_prime": 0.0, "p_prime": 0.0, "q_relation": 0.0, "p_equation": 0.0}
    excluded = []
    for i in range(2, len(x) - 2):
        xi = float(x[i])
        f = prob.f.evaluate(xi)
        defects["q_prime"] = max(defects["q_prime"], abs(dq[i] - p[i]) / (1 + abs(p[i])))
        defects["p_prime"] = max(defects["p_prime"], abs(dp[i] - f * q[i]) / (1 + abs(f * q[i])))
        if abs(f) <= guard:
            excluded.append(xi)
            continue
        defects["q_relation"] = max(defects["q_relation"],
                                    abs(q[i] - dp[i] / f) / (1 + abs(q[i])))
        try:
            c1, c0 = p_equation_coefficients(prob, xi)
        except SingularCoefficientError:
            excluded.append(xi)
            continue
        r = d2p[i] + c1 * dp[i] + c0 * p[i]
        defects["p_equation"] = max(defects["p_equation"],
                                    abs(r) / (1 + abs(d2p[i]) + abs(c1 * dp[i]) + abs(c0 * p[i])))
    return VerificationReport(lemma_checks=dict(defects),
                              measures={f"lemma_{k}": v for k, v in defects.items()},
                              tolerances={f"lemma_{k}": tol for k in defects},
                              excluded=tuple(excluded))


def adaptive_simpson(fn: Callable[[float], float], a: float, b: float,
                     tol: float = 1e-10, max_depth: int = 40) -> float:
    """Adaptive Simpson quadrature with Richardson correction of each panel."""
    def simpson(fa, fm, fb, a, b):
        return (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    def recurse(a, b, fa, fm, fb, whole, tol, depth):
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = fn(lm), fn(rm)
        left = simpson(fa, flm, fm, a, m)
        right = simpson(fm, frm, fb, m, b)
        delta = left + right - whole
        if depth <= 0 or abs(delta) <= 15.0 * tol:
            return left + right + delta / 15.0
        return (recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1))

    fa, fb, fm = fn(a), fn(b), fn(0.5 * (a + b))
    return recurse(a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, max_depth)


@dataclass(frozen=True)
class LiftResult:
    x: np.ndarray
    tau: np.ndarray
    p: np.ndarray
    q: np.ndarray
    report: VerificationReport


def _interpolant(prob, traj):
    """Cubic Hermite through direct samples using z' = f - a z^2 at the nodes."""
    x, z = traj.x, traj.z
    dz = np.array([prob.rhs(float(xi), float(zi)) for xi, zi in zip(x, z)])

    def y(t):
        i = int(np.clip(np.searchsorted(x, t) - 1, 0, len(x) - 2))
        h = x[i + 1] - x[i]
        u = (t - x[i]) / h
        u2, u3 = u * u, u * u * u
        return float((2 * u3 - 3 * u2 + 1) * z[i] + (u3 - 2 * u2 + u) * h * dz[i]
                     + (-2 * u3 + 3 * u2) * z[i + 1] + (u3 - u2) * h * dz[i + 1])
    return y


def lift_solution(prob: RiccatiProblem, y: Callable[[float], float] | Trajectory,
                  lo: float, hi: float, step: float = 0.01, guard: float = 1e-6,
                  tol: float = 1e-6, quad_tol: float = 1e-10) -> LiftResult:
    """Build (p, q) from a solution y of y' + y^2 = f.

    ``tau' = f/y`` with ``tau(lo) = 0``, ``p = exp(tau)``, ``q = p/y``; then
    ``q' = p`` and ``q'' = f q`` are checked by finite differences.
    """
    _require_unit_a(prob, lo, hi)
    if isinstance(y, Trajectory):
        inside = (y.x >= lo - 1e-12) & (y.x <= hi + 1e-12)
        if not np.all(np.asarray(y.flags)[inside] == FLAG_OK):
            raise ValueError("the trajectory has unreported samples inside the lift interval")
        y = _interpolant(prob, y)
    n = max(8, math.ceil((hi - lo) / step))
    xs = lo + (hi - lo) * np.arange(n + 1) / n
    ys = np.array([y(float(x)) for x in xs])
    fs = np.array([prob.f.evaluate(float(x)) for x in xs])
    if np.min(np.abs(ys)) <= guard:
        raise ValueError("y has a zero on the lift interval")
    if np.min(np.abs(fs)) <= guard:
        raise ValueError("f has a zero on the lift interval")

    def integrand(t):
        return prob.f.evaluate(t) / y(t)

    tau = np.zeros(len(xs))
    for i in range(1, len(xs)):
        tau[i] = tau[i - 1] + adaptive_simpson(integrand, float(xs[i - 1]), float(xs[i]),
                                               tol=quad_tol / n)
    p = np.exp(tau)
    q = p / ys
    s = float(xs[1] - xs[0])
    dq = fd_derivative(q, s)[2:-2]
    d2q = fd_second_derivative(q, s)[2:-2]
    inner = slice(2, -2)
    defects = {
        "q_prime": float(np.max(np.abs(dq - p[inner]) / (1 + np.abs(p[inner])))),
        "q_second": float(np.max(np.abs(d2q - fs[inner] * q[inner])
                                 / (1 + np.abs(fs[inner] * q[inner])))),
        "ratio": float(np.max(np.abs(p / q - ys) / (1 + np.abs(ys)))),
    }
    report = VerificationReport(lemma_checks=defects,
                                measures={f"lift_{k}": v for k, v in defects.items()},
                                tolerances={f"lift_{k}": tol for k in defects})
    return LiftResult(xs, tau, p, q, report)


# ---------------------------------------------------------------------------
# conserved quantities

def _relative_drift(values):
    values = np.asarray(values, dtype=float)
    return float(np.max(np.abs(values - values[0])) / abs(values[0]))


def wronskian_report(prob: RiccatiProblem, lo: float, hi: float,
                     cfg: SolveConfig = SolveConfig(), tol: float = 1e-8,
                     perturb: float = 0.0) -> VerificationReport:
    """Relative drift of W = q1 p2 - q2 p1 for starts (1, 0) and (0, 1) at ``lo``."""
    F = canonical_potential(prob).F
    t1 = integrate_linear(F, LinearState(lo, 1.0, 0.0), hi, cfg)
    t2 = integrate_linear(F, LinearState(lo, 0.0, 1.0), hi, cfg)
    q1, p1 = t1.q[t1.grid], t1.p[t1.grid]
    q2, p2 = t2.q[t2.grid], t2.p[t2.grid]
    q1 = q1 + perturb * np.arange(len(q1)) / max(1, len(q1) - 1)
    w = q1 * p2 - q2 * p1
    drift = _relative_drift(w)
    return VerificationReport(measures={"wronskian_drift": drift},
                              tolerances={"wronskian_drift": tol})


def cross_ratio(z1, z2, z3, z4):
    return ((z1 - z3) * (z2 - z4)) / ((z1 - z4) * (z2 - z3))


def cross_ratio_report(prob: RiccatiProblem, x0: float, z0s: Sequence[float], x_end: float,
                       cfg: SolveConfig = SolveConfig(), tol: float = 1e-6,
                       trajectories: Sequence[Trajectory] | None = None) -> VerificationReport:
    """Relative drift of the cross-ratio of four solutions on common pole-free samples."""
    if trajectories is None:
        if len(z0s) != 4:
            raise ValueError("the cross-ratio needs exactly four solutions")
        trajectories = [solve_linearized(prob, x0, z0, x_end, cfg) for z0 in z0s]
    mask = np.logical_and.reduce([t.ok for t in trajectories])
    zs = [t.z[mask] for t in trajectories]
    cr = cross_ratio(*zs)
    drift = _relative_drift(cr)
    return VerificationReport(measures={"cross_ratio_drift": drift},
                              tolerances={"cross_ratio_drift": tol})


def pole_residue_report(prob: RiccatiProblem, traj: Trajectory,
                        deltas: tuple = (1e-3, 1e-4), tol: float = 1e-4) -> VerificationReport:
    """Check (x - x*) z(x) -> 1/a(x*) at every pole, by Richardson extrapolation.

    Symmetric sampling at x* +- delta removes the odd term; the two deltas
    eliminate the quadratic one.
    """
    if traj.linear is None:
        raise ValueError("pole residues need a linearized trajectory")
    lin = traj.linear
    worst = 0.0
    rows = []
    for xp in traj.poles:
        sym = []
        for d in deltas:
            vals = []
            for t in (d, -d):
                st = lin.state_at(xp + t)
                z = reconstruct_z(prob, st)
                vals.append(t * z)
            sym.append(0.5 * (vals[0] + vals[1]))
        d1, d2 = deltas
        limit = (d1 * d1 * sym[1] - d2 * d2 * sym[0]) / (d1 * d1 - d2 * d2)
        expected = 1.0 / prob.a.evaluate(xp)
        err = abs(limit - expected) / max(1.0, abs(expected))
        rows.append((float(xp), float(limit), float(expected)))
        worst = max(worst, err)
    if isinstance(worst, NotAValue):
        worst = math.inf
    return VerificationReport(pole_agreement=tuple(rows),
                              measures={"pole_residue": worst},
                              tolerances={"pole_residue": tol})
