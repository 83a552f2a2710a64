import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cryptononlocal.montecarlo import MAX_SEED, EstimateResult, derive_seed, estimate, split_counts, summarize


def normal_sampler(rng, k):
    return rng.standard_normal((k, 2)) + [1.0, -2.0]


class TestSeeds:
    def test_derive_is_deterministic_and_distinct(self):
        kids = [derive_seed(42, i) for i in range(50)]
        assert kids == [derive_seed(42, i) for i in range(50)]
        assert len(set(kids)) == 50
        assert all(0 <= k <= MAX_SEED for k in kids)

    @pytest.mark.parametrize("seed", [-1, 2**64])
    def test_out_of_range(self, seed):
        with pytest.raises(ValueError):
            derive_seed(seed, 0)


@given(n=st.integers(1, 10_000), workers=st.integers(1, 64))
def test_split_counts(n, workers):
    counts = split_counts(n, workers)
    assert sum(counts) == n
    assert max(counts) - min(counts) <= 1
    assert len(counts) == min(n, workers)
    assert counts == sorted(counts, reverse=True)


class TestEstimate:
    def test_pooled_matches_direct(self):
        # merged chunk moments equal the statistics of the concatenated sample
        seed, counts = 9, split_counts(10_001, 4)
        children = np.random.SeedSequence(seed).spawn(4)
        data = np.concatenate([normal_sampler(np.random.default_rng(c), k) for c, k in zip(children, counts)])
        res = estimate(normal_sampler, 10_001, seed, workers=4)
        for col, r in enumerate(res):
            assert r.mean == pytest.approx(data[:, col].mean(), rel=1e-13)
            assert r.stderr == pytest.approx(data[:, col].std(ddof=1) / np.sqrt(10_001), rel=1e-12)

    def test_reproducible(self):
        assert estimate(normal_sampler, 5000, 3, workers=4) == estimate(normal_sampler, 5000, 3, workers=4)
        assert estimate(normal_sampler, 5000, 3) != estimate(normal_sampler, 5000, 4)

    def test_calibrated(self):
        m1, m2 = estimate(normal_sampler, 40_000, 17, workers=2)
        assert m1.within(1.0) and m2.within(-2.0)
        assert m1.stderr == pytest.approx(1 / 200, rel=0.05)

    def test_one_dimensional_sampler(self):
        (r,) = estimate(lambda rng, k: np.ones(k), 10, 0)
        assert (r.mean, r.stderr, r.n_samples) == (1.0, 0.0, 10)

    def test_too_few(self):
        with pytest.raises(ValueError):
            estimate(normal_sampler, 1, 0)


class TestSummarize:
    def test_extra_variance(self):
        r = summarize(np.array([1.0, 3.0]), seed=0, extra_variance=1.0)
        assert r.mean == 2.0
        assert r.stderr == pytest.approx(np.sqrt(2.0 / 2 + 1.0))

    def test_too_few(self):
        with pytest.raises(ValueError):
            summarize(np.array([1.0]), 0)


def test_within():
    r = EstimateResult(1.0, 0.1, 10, 0)
    assert r.within(1.3) and not r.within(1.31)
    assert EstimateResult(0.0, 0.0, 2, 0).within(0.0)
