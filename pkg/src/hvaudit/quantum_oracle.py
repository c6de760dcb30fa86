"""Closed-form predictions for the entangled two-photon polarization state.

The state is ``(|d>|d> + |d_perp>|d_perp>) / sqrt(2)``.  Rotating both photons
into their analyzer bases (Alice at angle ``theta``, Bob at ``phi``, both
measured from ``d``) gives amplitudes ``cos(phi - theta)`` on the equal-outcome
branches and ``sin(phi - theta)`` on the unequal ones.  Every quantity here is
evaluated directly from those trig closed forms.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Union

__all__ = [
    "Angle",
    "AngleLike",
    "Outcome",
    "JointDistribution",
    "as_angle",
    "joint_prob",
    "joint_distribution",
    "marginal_x",
    "marginal_y",
    "conditional_y_given_x",
    "correlation",
    "chsh_value",
]

EXACT_TOL = 1e-12


@dataclass(frozen=True, order=True)
class Angle:
    """Analyzer setting in radians, stored canonically in ``[0, pi)``.

    Polarization analyzers are axis-like: turning one by ``pi`` flips the
    sign of the rotated basis vectors and leaves all probabilities unchanged.
    """

    radians: float

    def __post_init__(self):
        r = float(self.radians)
        if not math.isfinite(r):
            raise ValueError(f"angle must be finite, got {self.radians!r}")
        r = r % math.pi
        # tiny negative inputs round up to exactly pi
        if r >= math.pi:
            r = 0.0
        object.__setattr__(self, "radians", r)

    @classmethod
    def from_degrees(cls, degrees: float) -> "Angle":
        return cls(math.radians(degrees))

    def __float__(self) -> float:
        return self.radians


AngleLike = Union[Angle, float, int]


def as_angle(value: AngleLike) -> Angle:
    return value if isinstance(value, Angle) else Angle(value)


class Outcome(enum.IntEnum):
    """Binary polarization result: +1 along the analyzer axis, -1 perpendicular."""

    PLUS = 1
    MINUS = -1

    @classmethod
    def parse(cls, value) -> "Outcome":
        if isinstance(value, str):
            value = value.strip()
            if value in ("+", "+1", "1"):
                return cls.PLUS
            if value in ("-", "-1"):
                return cls.MINUS
            raise ValueError(f"outcome must be +1 or -1, got {value!r}")
        return cls(int(value))

    def __str__(self) -> str:
        return "+1" if self is Outcome.PLUS else "-1"


OUTCOMES = (Outcome.PLUS, Outcome.MINUS)


def _delta(theta: AngleLike, phi: AngleLike) -> float:
    return as_angle(phi).radians - as_angle(theta).radians


def _cos2_sin2(theta: AngleLike, phi: AngleLike) -> tuple[float, float]:
    d = _delta(theta, phi)
    return math.cos(d) ** 2, math.sin(d) ** 2


def joint_prob(theta: AngleLike, phi: AngleLike, x, y) -> float:
    """P[X=x, Y=y]: half of cos^2(phi - theta) if x == y, half of sin^2 otherwise."""
    c2, s2 = _cos2_sin2(theta, phi)
    return 0.5 * c2 if Outcome(x) == Outcome(y) else 0.5 * s2


@dataclass(frozen=True)
class JointDistribution:
    """The four joint outcome probabilities at one pair of settings."""

    p: dict

    def __post_init__(self):
        if set(self.p) != {(x, y) for x in OUTCOMES for y in OUTCOMES}:
            raise ValueError("joint distribution needs exactly the four (x, y) cells")
        if any(v < 0.0 for v in self.p.values()):
            raise ValueError("negative probability")
        total = math.fsum(self.p.values())
        if abs(total - 1.0) > EXACT_TOL:
            raise ValueError(f"probabilities sum to {total!r}, not 1")

    def __getitem__(self, key) -> float:
        x, y = key
        return self.p[(Outcome(x), Outcome(y))]


def joint_distribution(theta: AngleLike, phi: AngleLike) -> JointDistribution:
    return JointDistribution({(x, y): joint_prob(theta, phi, x, y) for x in OUTCOMES for y in OUTCOMES})


def marginal_x(theta: AngleLike, phi: AngleLike, x) -> float:
    return math.fsum(joint_prob(theta, phi, x, y) for y in OUTCOMES)


def marginal_y(theta: AngleLike, phi: AngleLike, y) -> float:
    return math.fsum(joint_prob(theta, phi, x, y) for x in OUTCOMES)


def conditional_y_given_x(theta: AngleLike, phi: AngleLike, y, x) -> float:
    """P[Y=y | X=x]: cos^2(phi - theta) when y == x, sin^2(phi - theta) otherwise."""
    c2, s2 = _cos2_sin2(theta, phi)
    return c2 if Outcome(y) == Outcome(x) else s2


def correlation(theta: AngleLike, phi: AngleLike) -> float:
    """E[XY] = cos(2 (phi - theta))."""
    return math.cos(2.0 * _delta(theta, phi))


def chsh_value(a: AngleLike, a2: AngleLike, b: AngleLike, b2: AngleLike) -> float:
    """|E(a,b) + E(a,b2) + E(a2,b) - E(a2,b2)|."""
    return abs(correlation(a, b) + correlation(a, b2) + correlation(a2, b) - correlation(a2, b2))
