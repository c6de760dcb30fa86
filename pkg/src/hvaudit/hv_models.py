"""Hidden-variable models of the polarization experiment.

Alice's result depends only on her setting and her local variable U,
``X = f(theta, U)``.  Bob's result depends on his setting and local variable
V, and also on Alice's setting and result, ``Y = g(theta, phi, V, X)``.
U and V are uniform draws on ``[0, 1)``.

For fixed settings, g is described by two response sets: ``v1``, the values
of V giving Y=+1 when X=+1, and ``v2``, the values giving Y=+1 when X=-1.
Reproducing the quantum conditionals forces ``|v1| = cos^2(phi - theta)`` and
``|v2| = sin^2(phi - theta)``, leaving freedom in how they are laid out:

* ``Variant.DISJOINT``: ``v1`` and ``v2`` partition the unit interval.
* ``Variant.MAXIMAL_OVERLAP``: both start at 0, so the shorter one is
  contained in the longer and their intersection is as large as possible.
"""

from __future__ import annotations

import abc
import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from hvaudit.intervals import IntervalSet
from hvaudit.quantum_oracle import AngleLike, Outcome, as_angle

__all__ = [
    "HVValue",
    "Variant",
    "ResponseSets",
    "CounterexampleModel",
    "CRModelInterface",
    "CounterexampleAsCR",
    "threshold_rule",
    "make_disjoint_model",
    "make_overlap_model",
    "make_model",
    "eval_x",
    "eval_y",
    "response_sets",
    "sample_run",
    "sample_runs",
    "x_plus_set",
]


@dataclass(frozen=True, order=True)
class HVValue:
    """A draw of a local hidden variable, a point of ``[0, 1)``."""

    point: float

    def __post_init__(self):
        p = float(self.point)
        if not 0.0 <= p < 1.0:
            raise ValueError(f"hidden-variable value must lie in [0, 1), got {self.point!r}")
        object.__setattr__(self, "point", p)

    def __float__(self) -> float:
        return self.point


def _point(v) -> float:
    return v.point if isinstance(v, HVValue) else HVValue(v).point


class Variant(str, enum.Enum):
    DISJOINT = "disjoint"
    MAXIMAL_OVERLAP = "overlap"


@dataclass(frozen=True)
class ResponseSets:
    v1: IntervalSet
    v2: IntervalSet
    v_cap: IntervalSet

    def to_dict(self) -> dict:
        return {"v1": self.v1.to_list(), "v2": self.v2.to_list(), "v_cap": self.v_cap.to_list()}


@dataclass(frozen=True)
class XRule:
    """Alice's response function ``f``, given by its +1 set for each setting.

    The +1 set must have measure 1/2 for every setting so that P[X=+1] = 1/2.
    """

    name: str
    plus_set: Callable[[float], IntervalSet]


def _lower_half(theta: float) -> IntervalSet:
    return IntervalSet.interval(0.0, 0.5)


def threshold_rule() -> XRule:
    """f(theta, u) = +1 iff u < 1/2, for every theta."""
    return XRule("u < 1/2", _lower_half)


@dataclass(frozen=True)
class CounterexampleModel:
    variant: Variant
    x_rule: XRule = field(default_factory=threshold_rule)

    @property
    def y_rule(self) -> str:
        if self.variant is Variant.DISJOINT:
            return "v1=[0,cos^2), v2=[cos^2,1)"
        return "v1=[0,cos^2), v2=[0,sin^2)"


def make_disjoint_model() -> CounterexampleModel:
    return CounterexampleModel(Variant.DISJOINT)


def make_overlap_model() -> CounterexampleModel:
    return CounterexampleModel(Variant.MAXIMAL_OVERLAP)


def make_model(variant) -> CounterexampleModel:
    return CounterexampleModel(Variant(variant))


def x_plus_set(model: CounterexampleModel, theta: AngleLike) -> IntervalSet:
    return model.x_rule.plus_set(as_angle(theta).radians)


def eval_x(model: CounterexampleModel, theta: AngleLike, u) -> Outcome:
    return Outcome.PLUS if _point(u) in x_plus_set(model, theta) else Outcome.MINUS


def _cos2_sin2(theta: AngleLike, phi: AngleLike) -> tuple[float, float]:
    d = as_angle(phi).radians - as_angle(theta).radians
    return math.cos(d) ** 2, math.sin(d) ** 2


def response_sets(model: CounterexampleModel, theta: AngleLike, phi: AngleLike) -> ResponseSets:
    c2, s2 = _cos2_sin2(theta, phi)
    v1 = IntervalSet.interval(0.0, c2)
    if model.variant is Variant.DISJOINT:
        v2 = IntervalSet.interval(c2, 1.0)
    else:
        v2 = IntervalSet.interval(0.0, s2)
    return ResponseSets(v1=v1, v2=v2, v_cap=v1 & v2)


def eval_y(model: CounterexampleModel, theta: AngleLike, phi: AngleLike, v, x) -> Outcome:
    sets = response_sets(model, theta, phi)
    region = sets.v1 if Outcome(x) is Outcome.PLUS else sets.v2
    return Outcome.PLUS if _point(v) in region else Outcome.MINUS


def sample_run(model: CounterexampleModel, theta: AngleLike, phi: AngleLike,
               rng: np.random.Generator) -> tuple[Outcome, Outcome]:
    """One trial: draw u then v uniformly, return (x, y)."""
    u = rng.random()
    v = rng.random()
    x = eval_x(model, theta, u)
    return x, eval_y(model, theta, phi, v, x)


def sample_runs(model: CounterexampleModel, theta: AngleLike, phi: AngleLike,
                rng: np.random.Generator, size: int) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized trials; returns int8 arrays of x and y outcomes."""
    u = rng.random(size)
    v = rng.random(size)
    x_plus = x_plus_set(model, theta).contains(u)
    sets = response_sets(model, theta, phi)
    y_plus = np.where(x_plus, sets.v1.contains(v), sets.v2.contains(v))
    x = np.where(x_plus, 1, -1).astype(np.int8)
    y = np.where(y_plus, 1, -1).astype(np.int8)
    return x, y


class CRModelInterface(abc.ABC):
    """Conditional laws of a model with local variables U, V and a nonlocal parameter N.

    No model with a genuinely independent nonlocal variable is built here;
    the counter-example plugs in with N = X.
    """

    @abc.abstractmethod
    def nonlocal_distribution(self) -> Mapping[object, float]:
        """P_N as a mapping from parameter values to probabilities."""

    @abc.abstractmethod
    def prob_x(self, theta: AngleLike, phi: AngleLike, u, n, x) -> float:
        """P[X=x | theta, phi, U=u, N=n]."""

    @abc.abstractmethod
    def prob_y(self, theta: AngleLike, phi: AngleLike, v, n, y) -> float:
        """P[Y=y | theta, phi, V=v, N=n]."""

    def averaged_prob_y(self, theta: AngleLike, phi: AngleLike, v, y) -> float:
        """sum_n P_N(n) P[Y=y | theta, phi, V=v, N=n]."""
        return math.fsum(w * self.prob_y(theta, phi, v, n, y) for n, w in self.nonlocal_distribution().items())

    def averaged_prob_x(self, theta: AngleLike, phi: AngleLike, u, x) -> float:
        return math.fsum(w * self.prob_x(theta, phi, u, n, x) for n, w in self.nonlocal_distribution().items())


class CounterexampleAsCR(CRModelInterface):
    """The counter-example seen through the generic interface, with N = X and P[X=+-1] = 1/2."""

    def __init__(self, model: CounterexampleModel):
        self.model = model

    def nonlocal_distribution(self) -> Mapping[Outcome, float]:
        return {Outcome.PLUS: 0.5, Outcome.MINUS: 0.5}

    def prob_x(self, theta, phi, u, n, x) -> float:
        # X = f(theta, U): deterministic, blind to phi and to N
        return 1.0 if eval_x(self.model, theta, u) == Outcome(x) else 0.0

    def prob_y(self, theta, phi, v, n, y) -> float:
        return 1.0 if eval_y(self.model, theta, phi, v, n) == Outcome(y) else 0.0

