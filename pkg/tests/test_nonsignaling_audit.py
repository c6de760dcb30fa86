import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hvaudit.hv_models import CounterexampleAsCR, eval_y, make_disjoint_model, make_overlap_model, response_sets
from hvaudit.nonsignaling_audit import (
    averaged_conditional_L,
    check_eq10,
    check_eq10_over,
    default_theta_grid,
    default_v_grid,
    faithfulness_check,
    induced_conditional,
    l_values,
    observable_marginal_check,
    observable_marginal_y,
    settings_grid,
    theta_scan,
    uniform_conditional_check,
    witness_check,
)
from hvaudit.quantum_oracle import OUTCOMES

DISJOINT, OVERLAP = make_disjoint_model(), make_overlap_model()
MODELS = [DISJOINT, OVERLAP]
angles = st.floats(min_value=-10.0, max_value=10.0, allow_nan=False)
hv = st.floats(min_value=0.0, max_value=1.0, exclude_max=True)
PI3 = math.pi / 3


def membership_L(model, theta, phi, v, y):
    """L from raw set membership, written out case by case."""
    s = response_sets(model, theta, phi)
    in1, in2 = v in s.v1, v in s.v2
    if y == 1:
        return 0.5 * (in1 + in2)
    return 0.5 * ((not in1) + (not in2))


class TestAveragedL:
    @given(theta=angles, phi=angles, v=hv)
    def test_disjoint_always_half(self, theta, phi, v):
        for y in OUTCOMES:
            assert averaged_conditional_L(DISJOINT, theta, phi, v, y) == 0.5

    def test_overlap_cases(self):
        assert 0.1 in response_sets(OVERLAP, 0, PI3).v_cap
        assert averaged_conditional_L(OVERLAP, 0, PI3, 0.1, 1) == 1.0
        assert averaged_conditional_L(OVERLAP, 0, PI3, 0.5, 1) == 0.5
        assert averaged_conditional_L(OVERLAP, 0, PI3, 0.9, 1) == 0.0

    @pytest.mark.parametrize("model", MODELS)
    @given(theta=angles, phi=angles, v=hv)
    def test_values_and_total_probability(self, model, theta, phi, v):
        ls = [averaged_conditional_L(model, theta, phi, v, y) for y in OUTCOMES]
        assert all(val in (0.0, 0.5, 1.0) for val in ls)
        assert sum(ls) == 1.0
        for y, val in zip(OUTCOMES, ls):
            assert val == membership_L(model, theta, phi, v, y)

    @pytest.mark.parametrize("model", MODELS)
    @given(theta=angles, phi=angles, v=hv)
    def test_agrees_with_generic_averaging(self, model, theta, phi, v):
        cr = CounterexampleAsCR(model)
        for y in OUTCOMES:
            assert cr.averaged_prob_y(theta, phi, v, y) == averaged_conditional_L(model, theta, phi, v, y)

    @pytest.mark.parametrize("model", MODELS)
    def test_vectorized_matches_scalar(self, model):
        v = np.linspace(0, 1, 301, endpoint=False)
        for t, p in [(0.0, PI3), (1.2, 0.3), (0.5, 0.5)]:
            for y in OUTCOMES:
                expected = [averaged_conditional_L(model, t, p, vv, y) for vv in v]
                np.testing.assert_array_equal(l_values(model, t, p, v, y), expected)


class TestThetaScan:
    def test_disjoint_flat(self):
        r = theta_scan(DISJOINT, 0.7, 0.42, 1, default_theta_grid(50))
        assert r.spread == 0.0
        assert len(r.l_values) == 50

    def test_overlap_pinned_pair(self):
        r = theta_scan(OVERLAP, PI3, 0.1, 1, [PI3, 0.0])
        assert r.l_values == (0.5, 1.0)
        assert r.spread == 0.5

    def test_overlap_equal_settings_minus(self):
        # theta = phi: v1 = [0, 1), v2 empty; v = 0.99 gives Y=+1 for X=+1 and Y=-1 for X=-1
        r = theta_scan(OVERLAP, 0.0, 0.99, -1, [0.0])
        assert r.l_values == (0.5,)
        assert r.spread == 0.0

    def test_empty_grid(self):
        with pytest.raises(ValueError, match="empty scan grid"):
            theta_scan(OVERLAP, 0.0, 0.5, 1, [])


class TestCheckEq10:
    def test_disjoint_passes(self):
        tg = default_theta_grid(50)
        r = check_eq10(DISJOINT, 0.7, 1, tg, default_v_grid(DISJOINT, 0.7, tg), 1e-12)
        assert r.passed and r.quantity == 0.0 and r.witnesses == ()

    def test_overlap_fails_with_witnesses(self):
        tg = default_theta_grid(50)
        r = check_eq10(OVERLAP, PI3, 1, tg, default_v_grid(OVERLAP, PI3, tg), 1e-12)
        assert not r.passed
        assert r.quantity == 0.5
        for w in r.witnesses:
            l1 = averaged_conditional_L(OVERLAP, w["theta1"], w["phi"], w["v"], w["y"])
            l2 = averaged_conditional_L(OVERLAP, w["theta2"], w["phi"], w["v"], w["y"])
            assert (l1, l2) == (w["L1"], w["L2"])
            assert abs(l1 - l2) >= 0.5

    def test_overlap_spread_never_reaches_one(self):
        # L = 1 needs v < min(cos^2, sin^2) <= 1/2 and L = 0 needs v >= max(cos^2, sin^2) >= 1/2,
        # so one v cannot see both; confirm by brute force over a fine grid
        thetas = np.linspace(0, math.pi, 181, endpoint=False)
        v = np.linspace(0, 1, 2001, endpoint=False)
        for phi in (0.0, 0.4, PI3, 2.0):
            for y in OUTCOMES:
                table = np.array([[membership_L(OVERLAP, t, phi, vv, y) for vv in v[::10]] for t in thetas])
                assert (table.max(axis=0) - table.min(axis=0)).max() == 0.5

    def test_loose_tolerance(self):
        tg = default_theta_grid(10)
        for model in MODELS:
            r = check_eq10(model, PI3, 1, tg, default_v_grid(model, PI3, tg, 50), 2.0)
            assert r.passed

    def test_empty(self):
        with pytest.raises(ValueError):
            check_eq10(OVERLAP, 0, 1, [], [0.1], 1e-12)
        with pytest.raises(ValueError):
            check_eq10(OVERLAP, 0, 1, [0.0], [], 1e-12)

    def test_over_many_phis(self):
        tg = default_theta_grid(20)
        r = check_eq10_over(OVERLAP, default_theta_grid(4), tg, 1e-12, v_points=100)
        assert not r.passed and r.witnesses
        assert all(r.detail["l_value_counts"][k] > 0 for k in ("0.0", "0.5", "1.0"))

    def test_v_grid_has_endpoints(self):
        tg = [0.0]
        grid = default_v_grid(OVERLAP, PI3, tg, points=10)
        assert response_sets(OVERLAP, 0.0, PI3).v1.pieces[0][1] in grid

    def test_witness_check(self):
        r = witness_check(OVERLAP, PI3, 0.1, 0.0, PI3, 1, 1e-12)
        assert not r.passed
        (w,) = r.witnesses
        assert (w["L1"], w["L2"]) == (1.0, 0.5)
        assert witness_check(DISJOINT, PI3, 0.1, 0.0, PI3, 1, 1e-12).passed


class TestObservableMarginal:
    @pytest.mark.parametrize("model,theta,phi", [(DISJOINT, 0.9, 0.1), (OVERLAP, 0.0, PI3)])
    def test_half(self, model, theta, phi):
        for y in OUTCOMES:
            assert observable_marginal_y(model, theta, phi, y) == pytest.approx(0.5, abs=1e-12)

    def test_overlap_terms(self):
        # x=+1: measure(v1) = 1/4; x=-1: measure(v2) = 3/4; each weighted by 1/2
        assert induced_conditional(OVERLAP, 0, PI3, 1, 1) == pytest.approx(0.25, abs=1e-15)
        assert induced_conditional(OVERLAP, 0, PI3, 1, -1) == pytest.approx(0.75, abs=1e-15)

    def test_grid(self):
        for model in MODELS:
            assert observable_marginal_check(model, settings_grid(10), 1e-12).passed


class TestFaithfulness:
    @pytest.mark.parametrize("model", MODELS)
    def test_grid(self, model):
        r = faithfulness_check(model, settings_grid(20), 1e-12)
        assert r.passed and r.quantity <= 1e-12

    def test_single_point(self):
        for model in MODELS:
            assert faithfulness_check(model, [(0.8, 0.8)], 1e-12).passed

    def test_empty(self):
        with pytest.raises(ValueError):
            faithfulness_check(DISJOINT, [], 1e-12)


class TestUniformConditional:
    @given(theta=angles, phi=angles)
    def test_disjoint(self, theta, phi):
        r = uniform_conditional_check(DISJOINT, theta, phi, 1e-12, v_points=100)
        assert r.passed and r.detail["nonuniform_measure"] == 0.0

    def test_overlap_pi_over_three(self):
        r = uniform_conditional_check(OVERLAP, 0, PI3, 1e-12)
        assert not r.passed
        assert r.quantity == 0.5
        assert r.detail["nonuniform_measure"] == pytest.approx(0.5, abs=1e-12)
        assert r.witnesses and all(w["L"] in (0.0, 1.0) for w in r.witnesses)
        # v = 0.1 sits in v_cap: deviation |1 - 1/2|
        assert abs(averaged_conditional_L(OVERLAP, 0, PI3, 0.1, 1) - 0.5) == 0.5

    def test_overlap_equal_settings(self):
        r = uniform_conditional_check(OVERLAP, 1.1, 1.1, 1e-12)
        assert r.passed and r.quantity == 0.0
