import math

import numpy as np
import pytest

from hvaudit.hv_models import make_disjoint_model, make_overlap_model
from hvaudit.quantum_oracle import OUTCOMES, joint_prob
from hvaudit.sampler import (
    CHUNK,
    estimate_chsh,
    estimate_joint,
    estimate_joint_table,
    estimate_L,
    parse_seed,
    substream,
    wilson_interval,
)

DISJOINT, OVERLAP = make_disjoint_model(), make_overlap_model()
PI3 = math.pi / 3


def wilson_by_quadratic(k, n, z):
    """Roots in p of (k/n - p)^2 = z^2 p (1 - p) / n."""
    ph = k / n
    a = 1 + z * z / n
    b = -(2 * ph + z * z / n)
    c = ph * ph
    lo, hi = sorted(np.roots([a, b, c]).real)
    return lo, hi


class TestWilson:
    def test_zero_successes(self):
        lo, hi = wilson_interval(0, 100, 0.99)
        assert lo == 0.0 and 0 < hi < 1

    def test_all_successes(self):
        lo, hi = wilson_interval(100, 100, 0.99)
        assert hi == 1.0 and 0 < lo < 1

    def test_fifty_of_hundred(self):
        lo, hi = wilson_interval(50, 100, 0.95)
        qlo, qhi = wilson_by_quadratic(50, 100, 1.959964)
        assert lo == pytest.approx(qlo, abs=1e-6)
        assert hi == pytest.approx(qhi, abs=1e-6)
        assert (round(lo, 3), round(hi, 3)) == (0.404, 0.596)

    @pytest.mark.parametrize("k,n", [(1, 7), (13, 40), (999, 1000), (3, 1_000_000)])
    def test_matches_quadratic(self, k, n):
        from statistics import NormalDist

        z = NormalDist().inv_cdf(0.995)
        lo, hi = wilson_interval(k, n, 0.99)
        qlo, qhi = wilson_by_quadratic(k, n, z)
        assert lo == pytest.approx(qlo, abs=1e-9)
        assert hi == pytest.approx(qhi, abs=1e-9)
        assert lo <= k / n <= hi

    def test_errors(self):
        with pytest.raises(ValueError, match="zero trials"):
            wilson_interval(0, 0, 0.99)
        with pytest.raises(ValueError):
            wilson_interval(5, 4, 0.99)
        with pytest.raises(ValueError):
            wilson_interval(1, 4, 1.0)


class TestSeeds:
    @pytest.mark.parametrize("text,value", [("42", 42), ("0x2a", 42), ("0xffffffffffffffff", 2**64 - 1)])
    def test_parse(self, text, value):
        assert parse_seed(text) == value

    def test_parse_range(self):
        with pytest.raises(ValueError):
            parse_seed(str(2**64))
        with pytest.raises(ValueError):
            parse_seed("-1")

    def test_substreams_differ(self):
        assert substream(1, 0).random() != substream(1, 1).random()
        assert substream(1, 0).random() == substream(1, 0).random()


class TestEstimateJoint:
    def test_impossible_cell(self):
        for seed in (0, 1, 2**63):
            e = estimate_joint(DISJOINT, 0.0, 0.0, 1, -1, 5000, seed)
            assert e.successes == 0 and e.p_hat == 0.0 and e.ci_low == 0.0

    @pytest.mark.parametrize("model", [DISJOINT, OVERLAP])
    def test_million_runs(self, model):
        e = estimate_joint(model, 0.0, PI3, 1, 1, 10**6, 20261015)
        assert e.contains(0.125)
        assert e.ci_low <= e.p_hat <= e.ci_high

    def test_deterministic(self):
        a = estimate_joint(OVERLAP, 0.3, 1.2, -1, 1, 100_000, 77)
        b = estimate_joint(OVERLAP, 0.3, 1.2, -1, 1, 100_000, 77)
        assert a == b

    def test_worker_count_irrelevant(self):
        n = 5 * CHUNK + 123
        a = estimate_joint(OVERLAP, 0.3, 1.2, 1, 1, n, 99, workers=1)
        b = estimate_joint(OVERLAP, 0.3, 1.2, 1, 1, n, 99, workers=4)
        assert a == b

    def test_table_matches_single_cells(self):
        n = 2 * CHUNK + 5
        table = estimate_joint_table(OVERLAP, 0.2, 2.0, n, 5, workers=3)
        for (x, y), est in table.items():
            assert est == estimate_joint(OVERLAP, 0.2, 2.0, x, y, n, 5)
        assert sum(e.successes for e in table.values()) == n

    def test_distinct_seeds_differ(self):
        counts = {estimate_joint(OVERLAP, 0.0, PI3, 1, 1, 50_000, s).successes for s in range(10)}
        assert len(counts) > 1

    def test_zero_trials(self):
        with pytest.raises(ValueError, match="zero trials"):
            estimate_joint(DISJOINT, 0, 0, 1, 1, 0, 1)

    def test_coverage(self):
        # 99% intervals over 200 independent seeds should miss about twice
        p = joint_prob(0.0, 1.0, 1, 1)
        misses = sum(not estimate_joint(OVERLAP, 0.0, 1.0, 1, 1, 10_000, s).contains(p) for s in range(200))
        assert misses <= 10


class TestEstimateL:
    def test_disjoint_half(self):
        e = estimate_L(DISJOINT, 0.4, 1.9, 0.3, 1, 100_000, 3)
        assert e.contains(0.5)

    def test_overlap_deterministic_indicators(self):
        e = estimate_L(OVERLAP, 0.0, PI3, 0.1, 1, 10_000, 3)
        assert e.p_hat == 1.0 and e.contains(1.0)
        e = estimate_L(OVERLAP, 0.0, PI3, 0.9, 1, 10_000, 3)
        assert e.p_hat == 0.0

    def test_zero_trials(self):
        with pytest.raises(ValueError):
            estimate_L(OVERLAP, 0, 0, 0.5, 1, 0, 1)


class TestCHSH:
    def test_equal_settings_is_two(self):
        value, lo, hi = estimate_chsh(DISJOINT, 0, 0, 0, 0, 1000, 1)
        assert value == 2.0 and lo <= 2.0 <= hi
