"""Exact audits of the counter-example models.

The central quantity is the averaged conditional

    L(theta, phi, v, y) = 1/2 * (P[Y=y | theta, phi, V=v, X=+1] + P[Y=y | theta, phi, V=v, X=-1])

Averaging over Alice's result is supposed to remove any dependence on her
setting ``theta``.  Each conditional here is a 0/1 indicator because g is
deterministic, so L takes only the values 0, 1/2 and 1.  Every probability in
this module comes from interval membership and interval measure; the Monte
Carlo estimators in :mod:`hvaudit.sampler` are the independent cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from hvaudit.hv_models import CounterexampleModel, _point, eval_y, response_sets, x_plus_set
from hvaudit.intervals import IntervalSet
from hvaudit.quantum_oracle import (
    OUTCOMES,
    Angle,
    AngleLike,
    Outcome,
    as_angle,
    conditional_y_given_x,
)

__all__ = [
    "LScanReport",
    "AuditReport",
    "averaged_conditional_L",
    "l_values",
    "theta_scan",
    "default_theta_grid",
    "default_v_grid",
    "check_eq10",
    "check_eq10_over",
    "witness_check",
    "observable_marginal_y",
    "observable_marginal_check",
    "induced_conditional",
    "faithfulness_check",
    "uniform_conditional_check",
    "settings_grid",
]


@dataclass(frozen=True)
class LScanReport:
    phi: Angle
    v: float
    y: Outcome
    grid: tuple[Angle, ...]
    l_values: tuple[float, ...]
    spread: float


@dataclass(frozen=True)
class AuditReport:
    name: str
    quantity: float
    tolerance: float
    passed: bool
    detail: dict = field(default_factory=dict)
    witnesses: tuple = ()

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "quantity": self.quantity,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "witnesses": list(self.witnesses),
            "detail": self.detail,
        }


def _report(name: str, quantity: float, tol: float, detail=None, witnesses=()) -> AuditReport:
    quantity = float(quantity)
    return AuditReport(name, quantity, float(tol), quantity <= tol, detail or {}, tuple(witnesses))


def averaged_conditional_L(model: CounterexampleModel, theta: AngleLike, phi: AngleLike, v, y) -> float:
    y = Outcome(y)
    hits = sum(eval_y(model, theta, phi, v, x) == y for x in OUTCOMES)
    return 0.5 * hits


def l_values(model: CounterexampleModel, theta: AngleLike, phi: AngleLike, v: np.ndarray, y) -> np.ndarray:
    """Vectorized :func:`averaged_conditional_L` over an array of V values."""
    sets = response_sets(model, theta, phi)
    v = np.asarray(v, dtype=float)
    plus_hits = sets.v1.contains(v)
    minus_hits = sets.v2.contains(v)
    if Outcome(y) is Outcome.MINUS:
        plus_hits, minus_hits = ~plus_hits, ~minus_hits
    return 0.5 * (plus_hits.astype(float) + minus_hits.astype(float))


def theta_scan(model: CounterexampleModel, phi: AngleLike, v, y, grid: Sequence[AngleLike]) -> LScanReport:
    if len(grid) == 0:
        raise ValueError("empty scan grid")
    angles = tuple(as_angle(t) for t in grid)
    values = tuple(averaged_conditional_L(model, t, phi, v, y) for t in angles)
    return LScanReport(as_angle(phi), _point(v), Outcome(y), angles, values, max(values) - min(values))


def default_theta_grid(points: int = 50) -> list[float]:
    if points < 1:
        raise ValueError("empty scan grid")
    return [k * math.pi / points for k in range(points)]


def default_v_grid(model: CounterexampleModel, phi: AngleLike, theta_grid: Sequence[AngleLike],
                   points: int = 1000) -> list[float]:
    """``points`` uniform values plus every response-set endpoint met along the theta grid."""
    values = {k / points for k in range(points)}
    for theta in theta_grid:
        sets = response_sets(model, theta, phi)
        for s in (sets.v1, sets.v2, sets.v_cap):
            values.update(e for e in s.endpoints() if e < 1.0)
    return sorted(values)


def _theta_v_matrix(model, phi, y, theta_grid, v_grid) -> np.ndarray:
    v = np.asarray([_point(x) for x in v_grid], dtype=float)
    return np.vstack([l_values(model, t, phi, v, y) for t in theta_grid])


def check_eq10(model: CounterexampleModel, phi: AngleLike, y, theta_grid: Sequence[AngleLike],
               v_grid: Sequence[float], tol: float, max_witnesses: int = 25) -> AuditReport:
    """Largest theta-spread of L over the v grid.

    Each witness records a v together with two settings theta1, theta2 at
    which L differs by more than ``tol``; theta1 is the first grid angle
    attaining the minimum of L, theta2 the first attaining the maximum.
    """
    if len(theta_grid) == 0 or len(v_grid) == 0:
        raise ValueError("empty scan grid")
    y = Outcome(y)
    thetas = [as_angle(t).radians for t in theta_grid]
    v = [_point(x) for x in v_grid]
    table = _theta_v_matrix(model, phi, y, thetas, v)
    spreads = table.max(axis=0) - table.min(axis=0)
    quantity = float(spreads.max())
    bad = np.flatnonzero(spreads > tol)
    order = sorted(bad, key=lambda j: (-spreads[j], v[j]))
    witnesses = []
    for j in order[:max_witnesses]:
        i_lo, i_hi = int(np.argmin(table[:, j])), int(np.argmax(table[:, j]))
        witnesses.append({
            "phi": as_angle(phi).radians, "v": v[j], "y": int(y),
            "theta1": thetas[i_lo], "theta2": thetas[i_hi],
            "L1": float(table[i_lo, j]), "L2": float(table[i_hi, j]),
        })
    observed = {str(val): int(np.count_nonzero(table == val)) for val in (0.0, 0.5, 1.0)}
    detail = {
        "variant": model.variant.value,
        "phi": as_angle(phi).radians,
        "y": int(y),
        "theta_points": len(thetas),
        "v_points": len(v),
        "violating_v": int(bad.size),
        "l_value_counts": observed,
    }
    return _report("eq10_theta_independence", quantity, tol, detail, witnesses)


def check_eq10_over(model: CounterexampleModel, phis: Sequence[AngleLike], theta_grid: Sequence[AngleLike],
                    tol: float, v_points: int = 1000, ys=OUTCOMES, max_witnesses: int = 25) -> AuditReport:
    """:func:`check_eq10` over several Bob settings and both outcomes, merged into one report."""
    if len(phis) == 0:
        raise ValueError("empty scan grid")
    parts = []
    for phi in phis:
        v_grid = default_v_grid(model, phi, theta_grid, v_points)
        for y in ys:
            parts.append(check_eq10(model, phi, y, theta_grid, v_grid, tol, max_witnesses))
    quantity = max(p.quantity for p in parts)
    witnesses = sorted((w for p in parts for w in p.witnesses),
                       key=lambda w: (-(w["L2"] - w["L1"]), w["phi"], -w["y"], w["v"]))[:max_witnesses]
    counts = {k: sum(p.detail["l_value_counts"][k] for p in parts) for k in ("0.0", "0.5", "1.0")}
    detail = {
        "variant": model.variant.value,
        "phis": [as_angle(p).radians for p in phis],
        "ys": [int(Outcome(y)) for y in ys],
        "theta_points": len(theta_grid),
        "v_points_max": max(p.detail["v_points"] for p in parts),
        "evaluations": sum(p.detail["v_points"] * p.detail["theta_points"] for p in parts),
        "violating_v": sum(p.detail["violating_v"] for p in parts),
        "l_value_counts": counts,
    }
    return _report("eq10_theta_independence", quantity, tol, detail, witnesses)


def witness_check(model: CounterexampleModel, phi: AngleLike, v, theta1: AngleLike, theta2: AngleLike,
                  y, tol: float) -> AuditReport:
    """Re-evaluate L at one (v, theta1, theta2) pair; passes when the two values agree within ``tol``."""
    scan = theta_scan(model, phi, v, y, [theta1, theta2])
    l1, l2 = scan.l_values
    witness = {"phi": scan.phi.radians, "v": scan.v, "y": int(scan.y),
               "theta1": scan.grid[0].radians, "theta2": scan.grid[1].radians, "L1": l1, "L2": l2}
    return _report("eq10_pinned_witness", abs(l1 - l2), tol, {"variant": model.variant.value},
                   [witness] if abs(l1 - l2) > tol else [])


def _y_set(model: CounterexampleModel, theta, phi, x, y) -> IntervalSet:
    sets = response_sets(model, theta, phi)
    plus = sets.v1 if Outcome(x) is Outcome.PLUS else sets.v2
    return plus if Outcome(y) is Outcome.PLUS else plus.complement()


def induced_conditional(model: CounterexampleModel, theta: AngleLike, phi: AngleLike, y, x) -> float:
    """Measure of {v : g(theta, phi, v, x) = y}."""
    return _y_set(model, theta, phi, x, y).measure()


def observable_marginal_y(model: CounterexampleModel, theta: AngleLike, phi: AngleLike, y) -> float:
    p_plus = x_plus_set(model, theta).measure()
    return math.fsum((p_plus if x is Outcome.PLUS else 1.0 - p_plus) * induced_conditional(model, theta, phi, y, x)
                     for x in OUTCOMES)


def settings_grid(points: int) -> list[tuple[float, float]]:
    axis = default_theta_grid(points)
    return [(t, p) for t in axis for p in axis]


def observable_marginal_check(model: CounterexampleModel, grid: Sequence[tuple[AngleLike, AngleLike]],
                              tol: float) -> AuditReport:
    if len(grid) == 0:
        raise ValueError("empty scan grid")
    worst, where = 0.0, None
    for theta, phi in grid:
        for y in OUTCOMES:
            dev = abs(observable_marginal_y(model, theta, phi, y) - 0.5)
            if where is None or dev > worst:
                worst, where = dev, {"theta": as_angle(theta).radians, "phi": as_angle(phi).radians, "y": int(y)}
    return _report("observable_y_marginal", worst, tol,
                   {"variant": model.variant.value, "points": len(grid), "worst": where})


def faithfulness_check(model: CounterexampleModel, grid: Sequence[tuple[AngleLike, AngleLike]],
                       tol: float) -> AuditReport:
    if len(grid) == 0:
        raise ValueError("empty scan grid")
    worst, where = 0.0, None
    for theta, phi in grid:
        for x in OUTCOMES:
            for y in OUTCOMES:
                dev = abs(induced_conditional(model, theta, phi, y, x) - conditional_y_given_x(theta, phi, y, x))
                if where is None or dev > worst:
                    worst = dev
                    where = {"theta": as_angle(theta).radians, "phi": as_angle(phi).radians,
                             "x": int(x), "y": int(y)}
    return _report("faithfulness", worst, tol, {"variant": model.variant.value, "points": len(grid), "worst": where})


def uniform_conditional_check(model: CounterexampleModel, theta: AngleLike, phi: AngleLike, tol: float,
                              v_points: int = 1000, max_witnesses: int = 10) -> AuditReport:
    """Is Y uniform given V=v once X is averaged out, i.e. L(v, +1) = 1/2 for every v?

    Checked on a v grid (uniform points plus set endpoints) and by interval
    algebra: L differs from 1/2 exactly on ``v_cap`` (L = 1) and off
    ``v1 | v2`` (L = 0).
    """
    v_grid = np.asarray(default_v_grid(model, phi, [theta], v_points))
    l_plus = l_values(model, theta, phi, v_grid, Outcome.PLUS)
    dev = np.abs(l_plus - 0.5)
    sets = response_sets(model, theta, phi)
    off = sets.v_cap | (sets.v1 | sets.v2).complement()
    algebraic = 0.5 if off.measure() > 0.0 else 0.0
    quantity = max(float(dev.max()), algebraic)
    bad = np.flatnonzero(dev > tol)[:max_witnesses]
    witnesses = [{"theta": as_angle(theta).radians, "phi": as_angle(phi).radians, "v": float(v_grid[j]),
                  "L": float(l_plus[j])} for j in bad]
    detail = {
        "variant": model.variant.value,
        "theta": as_angle(theta).radians,
        "phi": as_angle(phi).radians,
        "v_points": int(v_grid.size),
        "grid_deviation": float(dev.max()),
        "nonuniform_set": off.to_list(),
        "nonuniform_measure": off.measure(),
    }
    return _report("uniform_conditional", quantity, tol, detail, witnesses)

