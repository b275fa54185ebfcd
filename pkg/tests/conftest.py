"""Shared helpers for the test suite."""

import numpy as np
import pytest

from widenet.config import make_config


def small_config(**over):
    """A tiny, fast network config; override any field via kwargs."""
    base = dict(n0=2, widths=[8, 8], c_b=1.0, c_w=1.0, act="relu",
                weights="gaussian", inputs=[[1.0, 0.5]])
    base.update(over)
    return make_config(**base)


def discrete_atoms_chisq(a: np.ndarray, b: np.ndarray, *, decimals: int = 9,
                         min_expected: int = 10) -> float:
    """Chi-square homogeneity p-value for two samples of a discrete law.

    Values are rounded to ``decimals`` places first: different sampling
    paths produce the same atoms up to floating-point rounding, and a raw
    two-sample KS test would treat those near-identical floats as distinct
    values and reject spuriously.
    """
    from collections import Counter
    from scipy import stats

    ca, cb = Counter(np.round(a, decimals)), Counter(np.round(b, decimals))
    keys = sorted(set(ca) | set(cb))
    obs = np.array([[ca.get(k, 0) for k in keys], [cb.get(k, 0) for k in keys]])
    tot = obs.sum(axis=0)
    keep = tot >= min_expected
    pooled = np.column_stack([obs[:, keep], obs[:, ~keep].sum(axis=1)]) \
        if (~keep).any() else obs[:, keep]
    _, p, _, _ = stats.chi2_contingency(pooled)
    return float(p)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
