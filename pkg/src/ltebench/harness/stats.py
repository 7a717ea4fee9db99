"""Small binomial helpers for Monte-Carlo decisions."""

from __future__ import annotations

import math

from scipy import stats


def clopper_pearson(errors: int, n: int, confidence: float = 0.95) -> tuple[float, float]:
    """Two-sided exact binomial interval for errors / n."""
    if n <= 0:
        return 0.0, 1.0
    alpha = 1.0 - confidence
    lo = 0.0 if errors == 0 else stats.beta.ppf(alpha / 2, errors, n - errors + 1)
    hi = 1.0 if errors == n else stats.beta.ppf(1 - alpha / 2, errors + 1, n - errors)
    return float(lo), float(hi)


def upper_bound(errors: int, n: int, confidence: float = 0.95) -> float:
    """One-sided exact upper confidence bound on the error probability."""
    if n <= 0:
        return 1.0
    if errors >= n:
        return 1.0
    return float(stats.beta.ppf(confidence, errors + 1, n - errors))


def paired_improvement_pvalue(worse_only: int, better_only: int) -> float:
    """One-sided exact McNemar p-value that the second configuration errs less.

    ``worse_only`` counts blocks failing only under the first configuration,
    ``better_only`` those failing only under the second.
    """
    n = worse_only + better_only
    if n == 0:
        return 1.0
    return float(stats.binomtest(worse_only, n, 0.5, alternative="greater").pvalue)


def binomial_sigma(p: float, n: int) -> float:
    return math.sqrt(max(p * (1.0 - p), 0.0) / n)
