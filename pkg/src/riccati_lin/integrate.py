"""Adaptive Runge-Kutta integration of the linear pair and of the direct equation.

The stepper is the Dormand-Prince 5(4) pair with a PI step-size controller.
Steps are clipped so that every point of the uniform output grid is a step
node, which keeps the reported samples at full integration accuracy.

``solve_linearized`` integrates ``q' = p, p' = F(x) q`` straight through the
zeros of ``q`` and reconstructs ``z`` on both sides of each pole.
``integrate_direct`` integrates ``z' = f - a z^2`` and stops at blow-up.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Callable, Iterator

import numpy as np

from .transform import (
    LinearState, RiccatiProblem, canonical_potential, check_a_nonzero,
    identically_zero, initial_linear_state, reconstruct_z,
)

__all__ = [
    "SolveConfig", "Event", "Trajectory", "LinearTrajectory",
    "SolverAbort", "StepSizeUnderflow",
    "integrate_linear", "integrate_direct", "solve_linearized",
    "output_grid", "FLAG_OK", "FLAG_POLE_GUARD", "FLAG_BLOWUP", "FLAG_NOT_COMPUTED",
]

FLAG_OK = "ok"
FLAG_POLE_GUARD = "pole_guard"
FLAG_BLOWUP = "blowup"
FLAG_NOT_COMPUTED = "not_computed"


@dataclass(frozen=True)
class SolveConfig:
    rel_tol: float = 1e-9
    abs_tol: float = 1e-11
    h_init: float = 1e-3
    h_min: float = 1e-12
    h_max: float = 0.5
    blowup_threshold: float = 1e8
    pole_refine_tol: float = 1e-10
    output_step: float = 0.01

    def __post_init__(self):
        if not 0 < self.h_min <= self.h_init <= self.h_max:
            raise ValueError("step bounds must satisfy 0 < h_min <= h_init <= h_max")
        for name in ("rel_tol", "abs_tol", "blowup_threshold", "pole_refine_tol", "output_step"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    @property
    def guard(self) -> float:
        """Half-width of the band around a pole where z is not reported."""
        return max(1e-6, 10.0 * self.pole_refine_tol)


@dataclass(frozen=True)
class Event:
    kind: str
    x: float
    message: str = ""


class SolverAbort(RuntimeError):
    def __init__(self, message, x, kind="step_failure"):
        super().__init__(message)
        self.x = x
        self.kind = kind


class StepSizeUnderflow(SolverAbort):
    pass


# ---------------------------------------------------------------------------
# Dormand-Prince 5(4)

_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
)
_B = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84)
# fifth-order minus embedded fourth-order weights; last entry multiplies k7
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)

_SAFETY = 0.9
_FAC_MIN, _FAC_MAX = 0.2, 5.0
_ALPHA = 0.7 / 5
_BETA = 0.4 / 5


def _steps(rhs, x0, y0, x_end, cfg: SolveConfig, stops) -> Iterator[tuple]:
    """Yield accepted steps ``(x, y, k, x_new, y_new, k_new)``.

    ``k`` is ``rhs(x, y)``. ``stops`` are points (in the direction of
    integration) that must be hit exactly.
    """
    direction = 1.0 if x_end > x0 else -1.0
    x = float(x0)
    y = np.asarray(y0, dtype=float)
    k1 = rhs(x, y)
    h = min(cfg.h_init, abs(x_end - x0))
    err_prev = 1.0
    stop_iter = iter(stops)
    target = next(stop_iter, x_end)

    while direction * (x_end - x) > 0:
        while direction * (target - x) <= 0:
            target = next(stop_iter, x_end)
        h = min(h, cfg.h_max)
        if h < cfg.h_min:
            raise StepSizeUnderflow(f"step size underflow at x={x!r}", x)
        remaining = abs(target - x)
        clipped = h >= remaining * (1 - 1e-12)
        step = remaining if clipped else h
        dx = direction * step

        ks = [k1]
        for i in range(1, 6):
            yi = y + dx * sum(a * kk for a, kk in zip(_A[i], ks))
            ks.append(rhs(x + _C[i] * dx, yi))
        y_new = y + dx * sum(b * kk for b, kk in zip(_B, ks) if b)
        x_new = float(target) if clipped else x + dx
        k7 = rhs(x_new, y_new)
        err_vec = dx * (sum(e * kk for e, kk in zip(_E, ks) if e) + _E[6] * k7)
        scale = cfg.abs_tol + cfg.rel_tol * np.maximum(np.abs(y), np.abs(y_new))
        err = float(np.max(np.abs(err_vec) / scale))

        if not math.isfinite(err):
            if step <= cfg.h_min:
                raise SolverAbort(f"non-finite derivative near x={x!r}", x)
            h = step * _FAC_MIN
            continue
        if err <= 1.0:
            yield x, y, k1, x_new, y_new, k7
            x, y, k1 = x_new, y_new, k7
            err = max(err, 1e-10)
            fac = _SAFETY * err ** -_ALPHA * err_prev ** _BETA
            h_next = step * min(_FAC_MAX, max(_FAC_MIN, fac))
            # a clipped step does not limit the controller's next proposal
            h = max(h, h_next) if clipped else h_next
            err_prev = err
        else:
            h = step * max(_FAC_MIN, _SAFETY * err ** -0.2)


def output_grid(x0: float, x_end: float, output_step: float) -> np.ndarray:
    """Uniform grid from x0 to x_end with spacing at most ``output_step``."""
    n = max(1, math.ceil(abs(x_end - x0) / output_step - 1e-9))
    grid = x0 + (x_end - x0) * np.arange(n + 1) / n
    grid[-1] = x_end
    return grid


# ---------------------------------------------------------------------------
# dense output

def _hermite5(t, h, y0, d0, s0, y1, d1, s1):
    """Quintic Hermite interpolant on one step, t in [0, 1]."""
    t2 = t * t
    t3 = t2 * t
    t4 = t3 * t
    t5 = t4 * t
    h00 = 1 - 10 * t3 + 15 * t4 - 6 * t5
    h10 = t - 6 * t3 + 8 * t4 - 3 * t5
    h20 = 0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5
    h21 = 0.5 * t3 - t4 + 0.5 * t5
    h11 = -4 * t3 + 7 * t4 - 3 * t5
    h01 = 10 * t3 - 15 * t4 + 6 * t5
    return (h00 * y0 + h01 * y1 + h * (h10 * d0 + h11 * d1)
            + h * h * (h20 * s0 + h21 * s1))


def _hermite3(t, h, y0, d0, y1, d1):
    t2 = t * t
    t3 = t2 * t
    return ((2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * d0
            + (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * h * d1)


@dataclass(frozen=True)
class LinearTrajectory:
    """Step nodes of an integration of ``q' = p, p' = F q``.

    ``dp`` holds ``F(x) q`` at each node. ``grid`` lists the node indices
    that are output-grid points. ``zeros`` are the refined zeros of ``q``.
    """

    x: np.ndarray
    q: np.ndarray
    p: np.ndarray
    dp: np.ndarray
    grid: np.ndarray
    zeros: tuple
    events: tuple = ()

    def state_at(self, x: float) -> LinearState:
        """Interpolated (q, p): quintic Hermite for q, cubic for p."""
        xs = self.x
        increasing = xs[-1] > xs[0]
        lo, hi = (xs[0], xs[-1]) if increasing else (xs[-1], xs[0])
        if not lo <= x <= hi:
            raise ValueError(f"x={x!r} outside the integrated interval")
        if increasing:
            i = min(max(bisect.bisect_right(xs, x) - 1, 0), len(xs) - 2)
        else:
            neg = -xs
            i = min(max(bisect.bisect_right(neg, -x) - 1, 0), len(xs) - 2)
        return LinearState(x, *self._interp(i, x))

    def _interp(self, i, x):
        h = self.x[i + 1] - self.x[i]
        t = (x - self.x[i]) / h
        q0, q1 = self.q[i], self.q[i + 1]
        p0, p1 = self.p[i], self.p[i + 1]
        s0, s1 = self.dp[i], self.dp[i + 1]
        q = _hermite5(t, h, q0, p0, s0, q1, p1, s1)
        p = _hermite3(t, h, p0, s0, p1, s1)
        return q, p


def _refine_zero(traj_parts, tol):
    """Bisection for the zero of q inside one step on the quintic interpolant."""
    x0, q0, p0, s0, x1, q1, p1, s1 = traj_parts
    h = x1 - x0
    if q1 == 0.0:
        return x1
    lo, hi = 0.0, 1.0
    sign_lo = q0 > 0
    while abs(hi - lo) * abs(h) > tol:
        mid = 0.5 * (lo + hi)
        qm = _hermite5(mid, h, q0, p0, s0, q1, p1, s1)
        if qm == 0.0:
            return x0 + mid * h
        if (qm > 0) == sign_lo:
            lo = mid
        else:
            hi = mid
    return x0 + 0.5 * (lo + hi) * h


def integrate_linear(F: Callable[[float], float], state0: LinearState, x_end: float,
                     cfg: SolveConfig = SolveConfig()) -> LinearTrajectory:
    """Integrate ``q' = p, p' = F(x) q`` from ``state0`` to ``x_end``.

    Sign changes of ``q`` are recorded and refined to ``cfg.pole_refine_tol``.
    Integration never stops at them.
    """
    x0 = state0.x

    def rhs(x, y):
        return np.array((y[1], F(x) * y[0]))

    grid = output_grid(x0, x_end, cfg.output_step)
    xs, qs, ps, dps = [x0], [state0.q], [state0.p], [F(x0) * state0.q]
    grid_idx = [0]
    zeros, events = [], []
    gi = 1
    for x, y, k, x_new, y_new, k_new in _steps(rhs, x0, (state0.q, state0.p), x_end, cfg, grid[1:]):
        q0, q1 = y[0], y_new[0]
        if q0 != 0.0 and (q1 == 0.0 or (q0 > 0) != (q1 > 0)):
            zeros.append(_refine_zero((x, q0, y[1], k[1], x_new, q1, y_new[1], k_new[1]),
                                      cfg.pole_refine_tol))
        elif q0 != 0.0:
            h = x_new - x
            qm = _hermite5(0.5, h, q0, y[1], k[1], q1, y_new[1], k_new[1])
            if min(abs(q0), abs(q1), abs(qm)) < 1e-12 * (abs(y[1]) + abs(y_new[1])) * abs(h):
                events.append(Event("possible_double_zero", x_new,
                                    "q nearly vanishes without changing sign"))
        xs.append(x_new)
        qs.append(y_new[0])
        ps.append(y_new[1])
        dps.append(k_new[1])
        if gi < len(grid) and x_new == grid[gi]:
            grid_idx.append(len(xs) - 1)
            gi += 1
    return LinearTrajectory(np.array(xs), np.array(qs), np.array(ps), np.array(dps),
                            np.array(grid_idx), tuple(zeros), tuple(events))


# ---------------------------------------------------------------------------
# trajectories of z

@dataclass(frozen=True)
class Trajectory:
    """Samples of z on a uniform grid, sorted by increasing x.

    ``z`` is NaN where it is not reported (see ``flags``). ``q`` and ``p``
    are NaN for the direct method.
    """

    x: np.ndarray
    z: np.ndarray
    q: np.ndarray
    p: np.ndarray
    flags: np.ndarray
    poles: tuple = ()
    events: tuple = ()
    method: str = ""
    linear: LinearTrajectory | None = field(default=None, repr=False, compare=False)

    @property
    def ok(self) -> np.ndarray:
        return self.flags == FLAG_OK

    def segments(self) -> list[np.ndarray]:
        """Index arrays of maximal runs of consecutive ok samples."""
        runs, cur = [], []
        for i, good in enumerate(self.ok):
            if good:
                cur.append(i)
            elif cur:
                runs.append(np.array(cur))
                cur = []
        if cur:
            runs.append(np.array(cur))
        return runs

    def value_at(self, x: float) -> float:
        """z at a grid point (nearest sample within 1e-12)."""
        i = int(np.argmin(np.abs(self.x - x)))
        if abs(self.x[i] - x) > 1e-12 * max(1.0, abs(x)):
            raise KeyError(f"x={x!r} is not a sample point")
        return float(self.z[i])

    def with_z(self, z) -> Trajectory:
        """Copy with replaced z values (used for negative controls)."""
        return Trajectory(self.x, np.asarray(z, dtype=float), self.q, self.p, self.flags,
                          self.poles, self.events, self.method, self.linear)


def _sorted(x, z, q, p, flags):
    flags = np.array(flags, dtype=str)
    if len(x) > 1 and x[-1] < x[0]:
        return x[::-1].copy(), z[::-1].copy(), q[::-1].copy(), p[::-1].copy(), flags[::-1].copy()
    return x, z, q, p, flags


def integrate_direct(prob: RiccatiProblem, x0: float, z0: float, x_end: float,
                     cfg: SolveConfig = SolveConfig()) -> Trajectory:
    """Integrate ``z' = f(x) - a(x) z^2``; stop at ``|z| > cfg.blowup_threshold``."""
    a, f = prob.a.evaluate, prob.f.evaluate

    def rhs(x, y):
        return np.array((f(x) - a(x) * y[0] * y[0],))

    grid = output_grid(x0, x_end, cfg.output_step)
    z = np.full(len(grid), np.nan)
    flags = [FLAG_BLOWUP] * len(grid)
    z[0] = z0
    flags[0] = FLAG_OK
    events = []
    gi = 1
    for x, y, _, x_new, y_new, _ in _steps(rhs, x0, (z0,), x_end, cfg, grid[1:]):
        if not abs(y_new[0]) <= cfg.blowup_threshold:
            events.append(Event("blowup", x, f"|z| exceeded {cfg.blowup_threshold:g} "
                                             f"between x={x!r} and x={x_new!r}"))
            break
        if gi < len(grid) and x_new == grid[gi]:
            z[gi] = y_new[0]
            flags[gi] = FLAG_OK
            gi += 1
    nan = np.full(len(grid), np.nan)
    gx, z, q, p, flags = _sorted(grid, z, nan, nan.copy(), flags)
    blowups = tuple(e.x for e in events)
    return Trajectory(gx, z, q, p, flags, poles=blowups, events=tuple(events), method="direct")


def _routed_f_zero(prob, x0, z0, x_end, cfg):
    from .families import note_f_zero

    c = prob.a.evaluate(x0)
    grid = output_grid(x0, x_end, cfg.output_step)
    y0 = c * z0
    events = [Event("routed_f_zero", x0, "f is identically zero; using z = 1/(a (x - K))")]
    if y0 == 0.0:
        z = np.zeros(len(grid))
        q = np.ones(len(grid))
        p = np.zeros(len(grid))
        flags = [FLAG_OK] * len(grid)
        poles = ()
    else:
        K = x0 - 1.0 / y0
        form = note_f_zero(K)
        z = np.empty(len(grid))
        flags = []
        for i, x in enumerate(grid):
            if abs(x - K) < cfg.guard:
                z[i] = np.nan
                flags.append(FLAG_POLE_GUARD)
            else:
                z[i] = form(x) / c
                flags.append(FLAG_OK)
        # y = p/q with q = (x - K)/(x0 - K), p = 1/(x0 - K)
        q = (grid - K) / (x0 - K)
        p = np.full(len(grid), 1.0 / (x0 - K))
        lo, hi = min(x0, x_end), max(x0, x_end)
        poles = (K,) if lo < K < hi else ()
    gx, z, q, p, flags = _sorted(grid, z, q, p, flags)
    return Trajectory(gx, z, q, p, flags, poles=poles, events=tuple(events),
                      method="linearized")


def solve_linearized(prob: RiccatiProblem, x0: float, z0: float, x_end: float,
                     cfg: SolveConfig = SolveConfig()) -> Trajectory:
    """Solve through the linear pair and reconstruct z on the output grid.

    Poles of z (zeros of q) are crossed; z is omitted within ``cfg.guard``
    of each one. Raises :class:`~riccati_lin.transform.AZeroError` if a(x)
    vanishes on the interval. When f is identically zero and a is constant
    the closed form ``z = 1/(a (x - K))`` is used instead.
    """
    if x_end == x0:
        raise ValueError("x_end must differ from x0")
    check_a_nonzero(prob, x0, x_end)
    if identically_zero(prob.f, x0, x_end) and identically_zero(prob.a1, x0, x_end):
        return _routed_f_zero(prob, x0, z0, x_end, cfg)

    pot = canonical_potential(prob)
    lin = integrate_linear(pot.F, initial_linear_state(prob, x0, z0), x_end, cfg)
    idx = lin.grid
    gx = lin.x[idx]
    q = lin.q[idx]
    p = lin.p[idx]
    z = np.empty(len(idx))
    flags = []
    for i, (x, qi, pi) in enumerate(zip(gx, q, p)):
        if any(abs(x - x_star) < cfg.guard for x_star in lin.zeros):
            z[i] = np.nan
            flags.append(FLAG_POLE_GUARD)
            continue
        z[i] = reconstruct_z(prob, LinearState(float(x), float(qi), float(pi)))
        flags.append(FLAG_OK)
    z[0] = z0 if flags[0] == FLAG_OK else z[0]
    gx, z, q, p, flags = _sorted(gx, z, q, p, flags)
    return Trajectory(gx, z, q, p, flags, poles=tuple(sorted(lin.zeros)),
                      events=lin.events, method="linearized", linear=lin)

