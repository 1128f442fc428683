"""Spline weights (alpha, beta, gamma, delta) and truncation-error coefficients.

The four weights multiply the h^7 derivative terms of the consistency
stencil and must satisfy alpha + beta + gamma + delta = 60.  They can be
given directly, produced from the one-parameter optimal family (which
annihilates the h^9..h^12 truncation terms), or evaluated from the
trigonometric closed forms in theta = omega*h.

Weights are kept as exact rationals when constructed from rationals, so the
vanishing-coefficient identities can be tested exactly; they are reduced to
floats only when a linear system is assembled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

__all__ = [
    "SplineParams",
    "TruncationCoeffs",
    "STANDARD_END_ROW_H9_CONSTANTS",
    "validate",
    "optimal_family",
    "from_theta",
    "truncation_coeffs",
]

Scalar = Union[int, float, Fraction]

#: Magnitude-and-sign constants of the h^9 y^(9) truncation term of the six
#: standard end-condition rows, in the orientation that treats the knot-value
#: side as positive (the assembled rows measure the opposite orientation, so
#: row residuals of t^9 match the negatives of these; see tests).
STANDARD_END_ROW_H9_CONSTANTS: tuple[float, ...] = (
    -5.778, -6.472, -7.230, -19.288, -25.620, -33.020,
)

_SUM_TOLERANCE = 1e-9


@dataclass(frozen=True)
class SplineParams:
    """Weights of the consistency stencil, constrained to sum to 60."""

    alpha: Scalar
    beta: Scalar
    gamma: Scalar
    delta: Scalar

    @property
    def total(self) -> Scalar:
        return self.alpha + self.beta + self.gamma + self.delta

    def as_floats(self) -> tuple[float, float, float, float]:
        return (float(self.alpha), float(self.beta), float(self.gamma), float(self.delta))


@dataclass(frozen=True)
class TruncationCoeffs:
    """Coefficients of h^m y^(m) in the interior local truncation error."""

    c7: Scalar
    c8: Scalar
    c9: Scalar
    c10: Scalar
    c11: Scalar
    c12: Scalar


def validate(params: SplineParams) -> SplineParams:
    """Return ``params`` if the sum-60 constraint holds within 1e-9."""
    for name in ("alpha", "beta", "gamma", "delta"):
        value = getattr(params, name)
        if not math.isfinite(float(value)):
            raise ValueError(f"{name} is not finite: {value}")
    total = params.total
    if abs(total - 60) > _SUM_TOLERANCE:
        raise ValueError(
            f"spline parameters must satisfy alpha+beta+gamma+delta=60, got sum={total}"
        )
    return params


def optimal_family(delta: Scalar) -> SplineParams:
    """Parameter set annihilating the h^9..h^12 truncation coefficients.

    alpha = 151/15 - delta/5, beta = -301/6 + delta, gamma = 1001/10 - 9*delta/5.
    Computed in exact rational arithmetic; the sum is exactly 60 for any delta
    (floats are converted to the dyadic rationals they represent).
    """
    d = Fraction(delta)
    return SplineParams(
        alpha=Fraction(151, 15) - d / 5,
        beta=Fraction(-301, 6) + d,
        gamma=Fraction(1001, 10) - 9 * d / 5,
        delta=d,
    )


def from_theta(theta: float) -> SplineParams:
    """Evaluate the trigonometric closed forms of the four weights.

    ``theta`` must stay away from 0 and multiples of pi (sin theta = 0).
    Note: the resulting weights do not satisfy the sum-60 constraint (the
    deviation is large and grows as theta -> 0); run them through
    :func:`validate` before assembling a system, which will reject them.
    """
    if abs(theta) <= 1e-12:
        raise ValueError(f"theta={theta} is too close to 0")
    s = math.sin(theta)
    if abs(s) <= 1e-12:
        raise ValueError(f"theta={theta} is too close to a multiple of pi (sin theta = 0)")
    c = math.cos(theta)
    t3, t5, t7 = theta**3, theta**5, theta**7
    alpha = (120 * (c - 1) / (t7 * s) + 60 / (t5 * s)
             - 5 / (t3 * s) + 1 / (6 * theta * s))
    beta = (600 * (1 - c) / (t7 * s) - 60 * (2 * c - 3) / (t5 * s)
            + 5 * (2 * c - 9) / (t3 * s) - (2 * c - 57) / (6 * theta * s))
    gamma = (1080 * (c - 1) / (t7 * s) + 180 * (2 * c + 1) / (t5 * s)
             + 45 * (2 * c + 1) / (t3 * s) - (38 * c - 101) / (2 * theta * s))
    delta = (600 * (1 - c) / (t7 * s) - 60 * (4 * c + 1) / (t5 * s)
             - 5 * (20 * c - 1) / (t3 * s) - (604 * c - 359) / (6 * theta * s))
    return SplineParams(alpha, beta, gamma, delta)


def truncation_coeffs(params: SplineParams) -> TruncationCoeffs:
    """Interior truncation coefficients c7..c12 as linear forms in the weights.

    Exact when the weights are ints or Fractions.  c7 and c8 are multiples of
    (sum - 60) and vanish for every validated parameter set; c9..c12 vanish
    identically on the optimal family.
    """
    al, be, ga, de = params.alpha, params.beta, params.gamma, params.delta
    s = al + be + ga + de
    # Fraction * float degrades to float, so these stay exact only for
    # rational weights, which is the intended use.
    return TruncationCoeffs(
        c7=2 * (-60 + s),
        c8=(-60 + s),
        c9=Fraction(1, 2) * (-100 + 25 * al + 13 * be + 5 * ga + de),
        c10=Fraction(1, 6) * (-120 + 37 * al + 19 * be + 7 * ga + de),
        c11=Fraction(1, 24) * (-228 + 337 * al + 97 * be + 17 * ga + de),
        c12=Fraction(1, 120) * (-380 + 781 * al + 211 * be + 31 * ga + de),
    )
