import math

import numpy as np
import pytest


def state_vector_joint(theta, phi, x, y):
    """P[X=x, Y=y] by projecting (|dd> + |d'd'>)/sqrt(2) onto rotated analyzer vectors."""
    d, d_perp = np.array([1.0, 0.0]), np.array([0.0, 1.0])
    psi = (np.kron(d, d) + np.kron(d_perp, d_perp)) / math.sqrt(2)

    def axis(angle, outcome):
        # |a> = cos|d> + sin|d'>, |a_perp> = -sin|d> + cos|d'>
        along = np.array([math.cos(angle), math.sin(angle)])
        perp = np.array([-math.sin(angle), math.cos(angle)])
        return along if outcome == 1 else perp

    amp = np.kron(axis(theta, x), axis(phi, y)) @ psi
    return float(amp ** 2)


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)


def pytest_terminal_summary(terminalreporter):
    rows = []
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py::test_c" in nodeid and rep.when == "call":
                rows.append((nodeid.split("::")[-1], outcome))
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in sorted(rows):
        _, num, *words = name.split("_")
        terminalreporter.write_line(f"{num.upper():>4}  {'PASS' if outcome == 'passed' else 'FAIL'}  {' '.join(words)}")
