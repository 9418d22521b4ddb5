"""Binomial confidence intervals."""

from __future__ import annotations

from math import sqrt
from statistics import NormalDist


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion.

    Returns ``(lo, hi)`` clipped to ``[0, 1]``; ``(0.0, 1.0)`` when ``trials`` is 0.
    """
    if trials < 0 or not 0 <= successes <= max(trials, 0):
        raise ValueError(f"need 0 <= successes <= trials, got {successes}/{trials}")
    if not 0.0 < confidence < 1.0:
        raise ValueError("confidence must lie strictly between 0 and 1")
    if trials == 0:
        return 0.0, 1.0
    z = NormalDist().inv_cdf(0.5 + confidence / 2)
    z2 = z * z
    p_hat = successes / trials
    denom = 1 + z2 / trials
    center = (p_hat + z2 / (2 * trials)) / denom
    margin = z / denom * sqrt(p_hat * (1 - p_hat) / trials + z2 / (4 * trials * trials))
    lo = 0.0 if successes == 0 else max(0.0, min(p_hat, center - margin))
    hi = 1.0 if successes == trials else min(1.0, max(p_hat, center + margin))
    return lo, hi
