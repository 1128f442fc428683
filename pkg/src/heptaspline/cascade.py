"""Hierarchical cascade of velocity scales and its reduction to one IVP.

The model couples ``n_scales`` velocity variables y^(k) so that each scale is
damped through the next one down, with a driving force per scale:

    dy^(k)/dt = -Gamma * y^(k+1) + L^(k)(t),      k = 1..N (indices mod N)

Index arithmetic is fully cyclic (y^(k+N) is y^(k)).  Iterating the coupling
N times turns the system into a single N-th order equation for the top scale,

    y^(N) + Gamma^N * y = g(t)        (N odd),

where g collects derivatives of the per-scale forces.  This module builds
g, derives the N initial derivative values of the top scale from the
per-scale initial velocities, and can also integrate the coupled system
directly for cross-validation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .forces import ForceExpr

__all__ = [
    "CascadeModel",
    "IvpProblem",
    "compose_g",
    "derive_initial_conditions",
    "reduce",
    "simulate_direct",
]


@dataclass(frozen=True)
class IvpProblem:
    """Initial value problem  y^(order) + f(t)*y = g(t)  on [a, b].

    ``u`` holds the initial data y(a), y'(a), ..., y^(order-1)(a); the order
    of the equation equals ``len(u)``.  The spline solver handles order 7
    only; other odd orders can still be integrated by the Runge-Kutta oracle.
    """

    a: float
    b: float
    f: ForceExpr
    g: ForceExpr
    u: tuple[float, ...]

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError(f"need a < b, got [{self.a}, {self.b}]")
        if len(self.u) < 1:
            raise ValueError("u must hold at least one initial value")
        if not all(math.isfinite(v) for v in self.u):
            raise ValueError(f"initial values must be finite, got {self.u}")
        object.__setattr__(self, "u", tuple(float(v) for v in self.u))

    @property
    def order(self) -> int:
        return len(self.u)


@dataclass(frozen=True)
class CascadeModel:
    """Cyclically coupled scales with friction ``gamma`` and per-scale forces."""

    n_scales: int
    gamma: float
    forces: tuple[ForceExpr, ...]
    init_velocities: tuple[float, ...]
    interval: tuple[float, float]

    def __post_init__(self):
        if self.n_scales < 1:
            raise ValueError(f"n_scales must be positive, got {self.n_scales}")
        if not self.gamma > 0:
            raise ValueError(f"gamma must be > 0, got {self.gamma}")
        if len(self.forces) != self.n_scales:
            raise ValueError(
                f"expected {self.n_scales} forces, got {len(self.forces)}")
        if len(self.init_velocities) != self.n_scales:
            raise ValueError(
                f"expected {self.n_scales} initial velocities, got {len(self.init_velocities)}")
        a, b = self.interval
        if not a < b:
            raise ValueError(f"need a < b, got interval {self.interval}")
        object.__setattr__(self, "forces", tuple(self.forces))
        object.__setattr__(self, "init_velocities",
                           tuple(float(v) for v in self.init_velocities))


def compose_g(model: CascadeModel) -> ForceExpr:
    """Effective top-scale driving force of the reduced equation.

    g(t) = sum_{j=0}^{N-1} (-Gamma)^(N-1-j) * d^j/dt^j L^(N-j)(t),
    the pattern produced by differentiating the coupling N times starting
    from scale 1, with cyclic scale indices.
    """
    n = model.n_scales
    g = ForceExpr.zero()
    for j in range(n):
        weight = (-model.gamma) ** (n - 1 - j)
        scale_index = (n - 1 - j) % n        # 0-based index of scale N-j
        g = g + weight * model.forces[scale_index].derivative(j)
    return g


def derive_initial_conditions(model: CascadeModel) -> tuple[float, ...]:
    """Initial derivatives u_m = d^m y^(1)/dt^m (a) of the top scale.

    Repeated differentiation of the coupling gives, with cyclic indices,

        d^m y^(k)/dt^m = (-Gamma)^m y^(k+m)
                         + sum_{j=0}^{m-1} (-Gamma)^(m-1-j) d^j L^(k+m-1-j)/dt^j,

    evaluated here at k = 1 and t = a.
    """
    n = model.n_scales
    a = model.interval[0]
    v = model.init_velocities
    u = []
    for m in range(n):
        value = (-model.gamma) ** m * v[m % n]
        for j in range(m):
            scale_index = (m - 1 - j) % n    # 0-based index of scale 1+m-1-j
            weight = (-model.gamma) ** (m - 1 - j)
            value += weight * model.forces[scale_index].derivative(j)(a)
        u.append(value)
    return tuple(u)


def reduce(model: CascadeModel) -> IvpProblem:
    """Reduce the cascade to the single N-th order problem for scale 1.

    Only odd N closes to ``y^(N) + Gamma^N y = g`` (even N would flip the
    sign of the feedback term and is not supported).  For odd N other than 7
    the result can be integrated by the oracle but is rejected by the spline
    assembler.
    """
    n = model.n_scales
    if n % 2 == 0:
        raise ValueError(f"reduction requires an odd number of scales, got {n}")
    a, b = model.interval
    return IvpProblem(
        a=a,
        b=b,
        f=ForceExpr.constant(model.gamma ** n),
        g=compose_g(model),
        u=derive_initial_conditions(model),
    )


def simulate_direct(model: CascadeModel, steps: int) -> tuple[np.ndarray, np.ndarray]:
    """Integrate the coupled scales with classical fixed-step Runge-Kutta.

    Returns ``(times, trajectories)`` where ``trajectories[i, k]`` is scale
    k+1 at ``times[i]``; shape (steps+1, n_scales).  Force values are
    tabulated on the half-step grid up front, so the stepping loop performs
    no expression evaluation.
    """
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    n = model.n_scales
    a, b = model.interval
    h = (b - a) / steps
    half_grid = a + 0.5 * h * np.arange(2 * steps + 1)
    ftab = np.empty((n, half_grid.size))
    for k, force in enumerate(model.forces):
        ftab[k] = force.evaluate(half_grid)

    shift = np.arange(1, n + 1) % n          # k -> k+1 cyclically
    gamma = model.gamma
    y = np.array(model.init_velocities, dtype=float)
    out = np.empty((steps + 1, n))
    out[0] = y
    for i in range(steps):
        l0, l1, l2 = ftab[:, 2 * i], ftab[:, 2 * i + 1], ftab[:, 2 * i + 2]
        k1 = -gamma * y[shift] + l0
        y1 = y + 0.5 * h * k1
        k2 = -gamma * y1[shift] + l1
        y2 = y + 0.5 * h * k2
        k3 = -gamma * y2[shift] + l1
        y3 = y + h * k3
        k4 = -gamma * y3[shift] + l2
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[i + 1] = y
    times = a + h * np.arange(steps + 1)
    return times, out
