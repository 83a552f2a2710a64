"""Seeded, optionally parallel Monte Carlo means with standard errors.

A master seed is split into per-worker streams with ``SeedSequence.spawn``;
worker ``k`` draws ``n // workers`` samples (the first ``n % workers`` workers
draw one more).  Chunk statistics are merged in worker order, so a given
(seed, workers) pair always yields bit-identical results.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

MAX_SEED = 2**64 - 1


@dataclass(frozen=True)
class EstimateResult:
    mean: float
    stderr: float
    n_samples: int
    seed: int

    def within(self, target: float, k: float = 3.0) -> bool:
        """|mean - target| <= k * stderr."""
        return abs(self.mean - target) <= k * self.stderr


def check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed <= MAX_SEED:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def derive_seed(seed: int, index: int) -> int:
    """Deterministic 64-bit child seed number ``index`` of ``seed``."""
    ss = np.random.SeedSequence(check_seed(seed), spawn_key=(int(index),))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def split_counts(n: int, workers: int) -> list[int]:
    workers = max(1, min(int(workers), n))
    base, extra = divmod(n, workers)
    return [base + (1 if k < extra else 0) for k in range(workers)]


@dataclass(frozen=True)
class _Moments:
    n: int
    mean: np.ndarray
    m2: np.ndarray  # sum of squared deviations

    @classmethod
    def of(cls, values: np.ndarray) -> "_Moments":
        mean = values.mean(axis=0)
        return cls(values.shape[0], mean, ((values - mean) ** 2).sum(axis=0))

    def merge(self, other: "_Moments") -> "_Moments":
        n = self.n + other.n
        delta = other.mean - self.mean
        mean = self.mean + delta * (other.n / n)
        m2 = self.m2 + other.m2 + delta**2 * (self.n * other.n / n)
        return _Moments(n, mean, m2)


def estimate(
    sampler: Callable[[np.random.Generator, int], np.ndarray],
    n_samples: int,
    seed: int,
    workers: int = 1,
) -> list[EstimateResult]:
    """Run ``sampler(rng, k)`` -> array of shape (k, m) and estimate each column's mean.

    The standard error is the sample standard deviation (ddof=1) over sqrt(n).
    """
    if n_samples < 2:
        raise ValueError(f"n_samples must be >= 2, got {n_samples}")
    seed = check_seed(seed)
    counts = split_counts(n_samples, workers)
    children = np.random.SeedSequence(seed).spawn(len(counts))

    def run(k: int) -> _Moments:
        values = np.asarray(sampler(np.random.default_rng(children[k]), counts[k]), dtype=np.float64)
        if values.ndim == 1:
            values = values[:, None]
        return _Moments.of(values)

    if len(counts) == 1:
        parts = [run(0)]
    else:
        with ThreadPoolExecutor(max_workers=len(counts)) as pool:
            parts = list(pool.map(run, range(len(counts))))
    total = parts[0]
    for p in parts[1:]:
        total = total.merge(p)
    var = total.m2 / (total.n - 1)
    stderr = np.sqrt(np.maximum(var, 0.0) / total.n)
    return [
        EstimateResult(float(m), float(s), total.n, seed)
        for m, s in zip(np.atleast_1d(total.mean), np.atleast_1d(stderr))
    ]


def summarize(values: np.ndarray, seed: int, extra_variance: float = 0.0) -> EstimateResult:
    """Mean and standard error of a 1-d sample.

    ``extra_variance`` is added to the squared standard error; nested
    estimators use it to carry the inner (per-sample) uncertainty outward.
    """
    values = np.asarray(values, dtype=np.float64)
    n = values.size
    if n < 2:
        raise ValueError(f"need at least 2 samples, got {n}")
    se2 = values.var(ddof=1) / n + extra_variance
    return EstimateResult(float(values.mean()), math.sqrt(max(se2, 0.0)), n, int(seed))
