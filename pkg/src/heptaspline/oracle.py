"""Independent reference solutions, error metrics and convergence studies.

The reference integrator rewrites y^(N) = g - f*y as the companion
first-order system for (y, y', ..., y^(N-1)) and runs classical fixed-step
fourth-order Runge-Kutta.  It shares no code with the spline path, so
agreement between the two is a genuine cross-check.

Also bundled here: the three analytically solvable benchmark problems used
by the error tables and the CLI example configs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .assembly import EndConditionMode, build, min_knots
from .cascade import IvpProblem
from .forces import ForceExpr, parse
from .linsolve import SolutionGrid, lu_solve
from .spline_params import SplineParams

__all__ = [
    "RkTrajectory",
    "ConvergenceReport",
    "Benchmark",
    "BENCHMARKS",
    "rk_solve",
    "max_abs_error",
    "convergence_study",
]


@dataclass
class RkTrajectory:
    """States at the integrator's own step points; no interpolation."""

    t: np.ndarray
    states: np.ndarray      # shape (steps+1, order); column 0 is y

    @property
    def y(self) -> np.ndarray:
        return self.states[:, 0]

    def value_at(self, t: float) -> float:
        """y at a step point; raises if ``t`` is not on the step grid."""
        h = self.t[1] - self.t[0]
        idx = round((t - self.t[0]) / h)
        if idx < 0 or idx >= len(self.t) or abs(self.t[idx] - t) > 1e-9 * max(1.0, abs(t)):
            raise ValueError(f"t={t} is not a step point of this trajectory")
        return float(self.states[idx, 0])


def rk_solve(problem: IvpProblem, steps: int) -> RkTrajectory:
    """Classical RK4 on the companion system at uniform step (b-a)/steps.

    Works for any equation order (the state dimension is ``problem.order``);
    f and g are tabulated on the half-step grid before the loop.
    """
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    order = problem.order
    a, b = problem.a, problem.b
    h = (b - a) / steps
    half_grid = a + 0.5 * h * np.arange(2 * steps + 1)
    gtab = problem.g.evaluate(half_grid)
    ftab = problem.f.evaluate(half_grid)

    z = np.array(problem.u, dtype=float)
    states = np.empty((steps + 1, order))
    states[0] = z

    def rate(z, j):
        out = np.empty(order)
        out[:-1] = z[1:]
        out[-1] = gtab[j] - ftab[j] * z[0]
        return out

    for i in range(steps):
        k1 = rate(z, 2 * i)
        k2 = rate(z + 0.5 * h * k1, 2 * i + 1)
        k3 = rate(z + 0.5 * h * k2, 2 * i + 1)
        k4 = rate(z + h * k3, 2 * i + 2)
        z = z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        states[i + 1] = z
    return RkTrajectory(t=a + h * np.arange(steps + 1), states=states)


Reference = Union[ForceExpr, RkTrajectory]


def max_abs_error(grid: SolutionGrid, reference: Reference) -> float:
    """max over knots of |y_i - y_ref(t_i)|.

    ``reference`` is either a closed-form solution or an RK trajectory whose
    step points contain every knot.
    """
    if isinstance(reference, RkTrajectory):
        ref = np.array([reference.value_at(t) for t in grid.t])
    else:
        ref = reference.evaluate(grid.t)
    return float(np.max(np.abs(grid.y - ref)))


@dataclass
class ConvergenceReport:
    """Errors per n and observed orders across exact doublings.

    ``orders[i]`` is log2(E_{n_i} / E_{n_{i+1}}) when n_{i+1} == 2 n_i,
    else None; len(orders) == len(entries) - 1.
    """

    entries: tuple[tuple[int, float], ...]
    orders: tuple[Optional[float], ...]
    mode: EndConditionMode
    params: SplineParams


def convergence_study(problem: IvpProblem, params: SplineParams,
                      mode: EndConditionMode, n_list: Sequence[int],
                      reference: Optional[ForceExpr] = None) -> ConvergenceReport:
    """Solve for each n and report max-abs errors against a reference.

    When no closed-form ``reference`` is given, a fine RK run with
    100 * max(n_list) steps stands in; every n must then divide that step
    count so the knots land on RK step points.
    """
    ns = list(n_list)
    if any(n2 <= n1 for n1, n2 in zip(ns, ns[1:])):
        raise ValueError(f"n_list must be strictly increasing, got {ns}")
    least = min_knots(mode)
    if ns and ns[0] < least:
        raise ValueError(f"{mode.value} end conditions need n >= {least}, got n={ns[0]}")
    ref: Reference
    if reference is None:
        ref = rk_solve(problem, steps=100 * max(ns))
    else:
        ref = reference
    entries = []
    for n in ns:
        grid = lu_solve(build(problem, params, mode, n))
        entries.append((n, max_abs_error(grid, ref)))
    orders: list[Optional[float]] = []
    for (n1, e1), (n2, e2) in zip(entries, entries[1:]):
        if n2 == 2 * n1 and e1 > 0.0 and e2 > 0.0:
            orders.append(math.log2(e1 / e2))
        else:
            orders.append(None)
    return ConvergenceReport(entries=tuple(entries), orders=tuple(orders),
                             mode=mode, params=params)


# --- analytically solvable benchmark problems ----------------------------

@dataclass(frozen=True)
class Benchmark:
    name: str
    problem: IvpProblem
    exact: ForceExpr


def _oscillating() -> Benchmark:
    """Trig forcing on [-1, 1] with unit feedback; solution (t^2 - 1) sin t."""
    s1, c1 = math.sin(1.0), math.cos(1.0)
    problem = IvpProblem(
        a=-1.0, b=1.0,
        f=ForceExpr.constant(1.0),
        g=parse("-t^2*cos(t) + 43*cos(t) + t^2*sin(t) - 14*t*sin(t) - sin(t)"),
        u=(0.0,
           2 * s1,
           -4 * c1 - 2 * s1,
           6 * c1 - 6 * s1,
           8 * c1 + 12 * s1,
           -20 * c1 + 10 * s1,
           -12 * c1 - 30 * s1),
    )
    return Benchmark("oscillating", problem, parse("t^2*sin(t) - sin(t)"))


def _exponential() -> Benchmark:
    """Exponential forcing on [0, 1] with f = -1; solution t (1 - t) e^t."""
    problem = IvpProblem(
        a=0.0, b=1.0,
        f=ForceExpr.constant(-1.0),
        g=parse("-35*exp(t) - 14*t*exp(t)"),
        u=(0.0, 1.0, 0.0, -3.0, -8.0, -15.0, -24.0),
    )
    return Benchmark("exponential", problem, parse("t*exp(t) - t^2*exp(t)"))


def _pure_forcing() -> Benchmark:
    """Same solution as ``exponential`` but with f = 0 (no feedback term)."""
    problem = IvpProblem(
        a=0.0, b=1.0,
        f=ForceExpr.zero(),
        g=parse("-35*exp(t) - 13*t*exp(t) - t^2*exp(t)"),
        u=(0.0, 1.0, 0.0, -3.0, -8.0, -15.0, -24.0),
    )
    return Benchmark("pure-forcing", problem, parse("t*exp(t) - t^2*exp(t)"))


#: The three analytically solvable problems behind the bundled configs.
BENCHMARKS: tuple[Benchmark, ...] = (_oscillating(), _exponential(), _pure_forcing())
