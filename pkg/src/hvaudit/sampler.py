"""Seeded Monte Carlo estimates with Wilson score intervals.

Trials are cut into fixed-size chunks.  Chunk ``k`` draws from its own PCG64
stream derived from ``SeedSequence(seed, spawn_key=(k,))``, so a count does not
depend on how many workers evaluate the chunks or in which order.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from statistics import NormalDist
from typing import Callable

import numpy as np

from hvaudit.hv_models import CounterexampleModel, _point, eval_y, sample_runs, x_plus_set
from hvaudit.quantum_oracle import AngleLike, Outcome

__all__ = [
    "Estimate",
    "CHUNK",
    "substream",
    "wilson_interval",
    "estimate_joint",
    "estimate_joint_table",
    "estimate_L",
    "estimate_correlation",
    "estimate_chsh",
    "parse_seed",
]

CHUNK = 1 << 16
SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class Estimate:
    successes: int
    trials: int
    p_hat: float
    ci_low: float
    ci_high: float
    confidence: float
    seed: int

    def contains(self, p: float) -> bool:
        return self.ci_low <= p <= self.ci_high

    def to_dict(self) -> dict:
        return asdict(self)


def parse_seed(text) -> int:
    """Accept a decimal or 0x-prefixed hexadecimal 64-bit seed."""
    value = int(text, 0) if isinstance(text, str) else int(text)
    if not 0 <= value <= SEED_MASK:
        raise ValueError(f"seed must fit in 64 unsigned bits, got {text!r}")
    return value


def substream(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))


def wilson_interval(successes: int, trials: int, confidence: float = 0.99) -> tuple[float, float]:
    if trials < 1:
        raise ValueError("zero trials")
    if not 0 <= successes <= trials:
        raise ValueError(f"successes={successes} outside [0, {trials}]")
    if not 0.0 < confidence < 1.0:
        raise ValueError("confidence must lie strictly between 0 and 1")
    z = NormalDist().inv_cdf(0.5 + confidence / 2.0)
    p = successes / trials
    z2n = z * z / trials
    center = (p + z2n / 2.0) / (1.0 + z2n)
    half = z * math.sqrt(p * (1.0 - p) / trials + z2n / (4.0 * trials)) / (1.0 + z2n)
    low = 0.0 if successes == 0 else max(0.0, min(p, center - half))
    high = 1.0 if successes == trials else min(1.0, max(p, center + half))
    return low, high


def _count(n: int, seed: int, chunk_count: Callable[[np.random.Generator, int], int], workers: int) -> int:
    sizes = [min(CHUNK, n - start) for start in range(0, n, CHUNK)]

    def run(k: int) -> int:
        return int(chunk_count(substream(seed, k), sizes[k]))

    if workers <= 1 or len(sizes) == 1:
        return sum(run(k) for k in range(len(sizes)))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return sum(pool.map(run, range(len(sizes))))


def _estimate(successes: int, n: int, seed: int, confidence: float) -> Estimate:
    low, high = wilson_interval(successes, n, confidence)
    return Estimate(successes, n, successes / n, low, high, confidence, seed)


def _check(n: int, seed) -> int:
    if n < 1:
        raise ValueError("zero trials")
    return parse_seed(seed)


def estimate_joint(model: CounterexampleModel, theta: AngleLike, phi: AngleLike, x, y, n: int, seed,
                   confidence: float = 0.99, workers: int = 1) -> Estimate:
    """Fraction of ``n`` simulated runs whose outcome pair is ``(x, y)``."""
    seed = _check(n, seed)
    x, y = int(Outcome(x)), int(Outcome(y))

    def chunk(rng, size):
        xs, ys = sample_runs(model, theta, phi, rng, size)
        return np.count_nonzero((xs == x) & (ys == y))

    return _estimate(_count(n, seed, chunk, workers), n, seed, confidence)


def estimate_joint_table(model: CounterexampleModel, theta: AngleLike, phi: AngleLike, n: int, seed,
                         confidence: float = 0.99, workers: int = 1) -> dict:
    """All four cells from one shared set of runs; each entry equals ``estimate_joint`` for that cell."""
    seed = _check(n, seed)
    counts = np.zeros(4, dtype=np.int64)
    sizes = [min(CHUNK, n - start) for start in range(0, n, CHUNK)]

    def run(k):
        xs, ys = sample_runs(model, theta, phi, substream(seed, k), sizes[k])
        # cell index: (x=+1,y=+1)=0, (+1,-1)=1, (-1,+1)=2, (-1,-1)=3
        idx = 2 * (xs < 0) + (ys < 0)
        return np.bincount(idx, minlength=4)

    if workers <= 1:
        parts = map(run, range(len(sizes)))
        counts = sum(parts, counts)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            counts = sum(pool.map(run, range(len(sizes))), counts)
    cells = [(Outcome.PLUS, Outcome.PLUS), (Outcome.PLUS, Outcome.MINUS),
             (Outcome.MINUS, Outcome.PLUS), (Outcome.MINUS, Outcome.MINUS)]
    return {cell: _estimate(int(c), n, seed, confidence) for cell, c in zip(cells, counts)}


def estimate_L(model: CounterexampleModel, theta: AngleLike, phi: AngleLike, v, y, n: int, seed,
               confidence: float = 0.99, workers: int = 1) -> Estimate:
    """Hold V at ``v``, draw X through f with uniform U, and count Y = y."""
    seed = _check(n, seed)
    v = _point(v)
    hit_plus = eval_y(model, theta, phi, v, Outcome.PLUS) == Outcome(y)
    hit_minus = eval_y(model, theta, phi, v, Outcome.MINUS) == Outcome(y)
    plus_set = x_plus_set(model, theta)

    def chunk(rng, size):
        x_plus = plus_set.contains(rng.random(size))
        return np.count_nonzero(np.where(x_plus, hit_plus, hit_minus))

    return _estimate(_count(n, seed, chunk, workers), n, seed, confidence)


def estimate_correlation(model: CounterexampleModel, theta: AngleLike, phi: AngleLike, n: int, seed,
                         confidence: float = 0.99, workers: int = 1) -> tuple[float, float, float]:
    """E[XY] with its interval, mapped from the Wilson interval of P[X = Y] via E = 2p - 1."""
    seed = _check(n, seed)

    def chunk(rng, size):
        xs, ys = sample_runs(model, theta, phi, rng, size)
        return np.count_nonzero(xs == ys)

    est = _estimate(_count(n, seed, chunk, workers), n, seed, confidence)
    return 2.0 * est.p_hat - 1.0, 2.0 * est.ci_low - 1.0, 2.0 * est.ci_high - 1.0


def estimate_chsh(model: CounterexampleModel, a: AngleLike, a2: AngleLike, b: AngleLike, b2: AngleLike,
                  n: int, seed, confidence: float = 0.99, workers: int = 1) -> tuple[float, float, float]:
    """E(a,b) + E(a,b2) + E(a2,b) - E(a2,b2) from ``n`` runs per term.

    The bounds add the per-term intervals (the subtracted term enters with
    its bounds swapped); each term reuses ``seed``.
    """
    terms = [estimate_correlation(model, s, t, n, seed, confidence, workers)
             for s, t in ((a, b), (a, b2), (a2, b), (a2, b2))]
    signs = (1, 1, 1, -1)
    value = sum(sg * e for sg, (e, _, _) in zip(signs, terms))
    low = sum(lo if sg > 0 else -hi for sg, (_, lo, hi) in zip(signs, terms))
    high = sum(hi if sg > 0 else -lo for sg, (_, lo, hi) in zip(signs, terms))
    return value, low, high
