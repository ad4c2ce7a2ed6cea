"""On-off transmission probability and its inverse threshold.

With Rayleigh fading ``||h_b||^2 ~ Gamma(N, 1)``, so the probability of
transmitting under threshold ``mu`` is the regularized upper incomplete gamma
function at integer shape, ``Q(N, mu) = exp(-mu) * sum_{k<N} mu^k / k!``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigError, ToleranceNotMetError

__all__ = ["ThresholdSolution", "transmission_probability", "solve_threshold"]

MAX_ITERATIONS = 200
_RESCALE = 1e250
_LOG_RESCALE = math.log(_RESCALE)


@dataclass(frozen=True)
class ThresholdSolution:
    mu: float
    achieved_pt: float
    iterations: int
    residual: float


def transmission_probability(n: int, mu: float) -> float:
    """``P{||h_b||^2 > mu}`` for an ``n``-antenna Rayleigh channel.

    The finite sum runs the recursion ``t_{k+1} = t_k * mu / (k + 1)`` on
    rescaled terms, so neither factorials nor ``mu**k`` overflow and
    ``exp(-mu)`` is applied once in log space. Below the mean (``mu < n``)
    the complement is summed instead, which keeps full accuracy when the
    probability is close to one.
    """
    if n < 1:
        raise ConfigError(f"n must be >= 1, got {n}")
    if mu < 0:
        raise ConfigError(f"mu must be >= 0, got {mu}")
    if mu == 0:
        return 1.0
    if math.isinf(mu):
        return 0.0
    if mu < n:
        return 1.0 - _lower_tail(n, mu)
    term = 1.0
    total = 1.0
    log_scale = 0.0
    for k in range(n - 1):
        term *= mu / (k + 1)
        total += term
        if total > _RESCALE:
            term /= _RESCALE
            total /= _RESCALE
            log_scale += _LOG_RESCALE
    p = math.exp(math.log(total) + log_scale - mu)
    return min(max(p, 0.0), 1.0)


def _lower_tail(n: int, mu: float) -> float:
    """``exp(-mu) * sum_{k>=n} mu^k / k!`` for ``mu < n``; the terms shrink geometrically."""
    log_first = -mu + n * math.log(mu) - math.lgamma(n + 1)
    term = 1.0
    total = 1.0
    k = n
    while term > 1e-17 * total:
        k += 1
        term *= mu / k
        total += term
    return math.exp(log_first) * total


def solve_threshold(n: int, delta: float, tol: float = 1e-10) -> ThresholdSolution:
    """Largest on-off threshold meeting ``p_t >= delta``, by bisection.

    ``tol`` bounds the final bracket width in ``mu``.

    Raises:
        ConfigError: ``delta`` outside (0, 1] or ``tol`` not positive.
        ToleranceNotMetError: the bracket did not shrink below ``tol`` within
            :data:`MAX_ITERATIONS` halvings, or ``tol`` is finer than the
            floating-point spacing at the root.
    """
    if not (0.0 < delta <= 1.0):
        raise ConfigError(f"delta must lie in (0, 1], got {delta}")
    if not tol > 0:
        raise ConfigError(f"tol must be positive, got {tol}")
    if delta == 1.0:
        return ThresholdSolution(mu=0.0, achieved_pt=1.0, iterations=0, residual=0.0)

    lo, hi = 0.0, 1.0
    iterations = 0
    while transmission_probability(n, hi) > delta:
        lo, hi = hi, 2.0 * hi
        iterations += 1
        if iterations >= MAX_ITERATIONS:
            raise ToleranceNotMetError("failed to bracket the threshold")

    while hi - lo > tol:
        if iterations >= MAX_ITERATIONS:
            raise ToleranceNotMetError(
                f"bisection stopped at width {hi - lo:.3e} after {iterations} iterations"
            )
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            raise ToleranceNotMetError(f"tolerance {tol:g} is below floating-point resolution at mu = {mid:g}")
        if transmission_probability(n, mid) > delta:
            lo = mid
        else:
            hi = mid
        iterations += 1

    mu = 0.5 * (lo + hi)
    pt = transmission_probability(n, mu)
    return ThresholdSolution(mu=mu, achieved_pt=pt, iterations=iterations, residual=abs(pt - delta))
