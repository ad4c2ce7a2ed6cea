"""Expectations over the legitimate channel gain given the on-off gate.

The gain ``g = ||h_b||^2`` is Gamma(N, 1); conditioning on ``g > mu`` gives a
left-truncated gamma law whose normalizer is the transmission probability.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate, special

from .errors import QuadratureFailure
from .reliability import transmission_probability

__all__ = ["Expectation", "truncated_gamma_pdf", "truncated_gamma_expectation"]

QUAD_EPSREL = 1e-8
FALLBACK_SAMPLES = 10**6


@dataclass(frozen=True)
class Expectation:
    value: float
    abs_error: float
    method: str  # "quadrature" or "monte-carlo"


def truncated_gamma_pdf(g, n: int, mu: float):
    """Density of ``g ~ Gamma(n, 1)`` conditioned on ``g > mu``."""
    g = np.asarray(g, dtype=float)
    norm = transmission_probability(n, mu)
    with np.errstate(divide="ignore"):
        logpdf = special.xlogy(n - 1, g) - g - math.lgamma(n)
    return np.where(g > mu, np.exp(logpdf) / norm, 0.0)


def _quadrature(fn, n: int, mu: float, epsrel: float) -> tuple[float, float]:
    norm = transmission_probability(n, mu)
    log_gamma_n = math.lgamma(n)

    def integrand(t):
        g = mu + t
        return float(fn(g)) * math.exp(special.xlogy(n - 1, g) - g - log_gamma_n)

    # finite piece covers the bulk of the gamma mass, the tail goes to QAGI
    split = max(n - 1.0 - mu, 0.0) + 10.0 * math.sqrt(n) + 10.0
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            head, head_err = integrate.quad(integrand, 0.0, split, epsrel=epsrel, epsabs=0.0, limit=200)
            tail, tail_err = integrate.quad(integrand, split, np.inf, epsrel=epsrel, epsabs=1e-300, limit=200)
        except integrate.IntegrationWarning as exc:
            raise QuadratureFailure(str(exc)) from exc
    value = (head + tail) / norm
    err = (head_err + tail_err) / norm
    if not math.isfinite(value):
        raise QuadratureFailure("non-finite integral")
    return value, err


def _monte_carlo(fn, n: int, mu: float, samples: int, seed: int) -> tuple[float, float]:
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, n])))
    norm = transmission_probability(n, mu)
    # inverse-CDF draw from the truncated law: Q(n, g) = U * Q(n, mu)
    u = 1.0 - rng.random(samples)
    g = special.gammainccinv(n, u * norm)
    vals = np.asarray(fn(g), dtype=float)
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(samples))


def truncated_gamma_expectation(
    fn: Callable,
    n: int,
    mu: float,
    *,
    epsrel: float = QUAD_EPSREL,
    fallback_samples: int = FALLBACK_SAMPLES,
    seed: int = 0,
    method: str = "quadrature",
) -> Expectation:
    """``E[fn(g) | g > mu]`` for ``g ~ Gamma(n, 1)``.

    Adaptive Gauss-Kronrod quadrature is tried first; if it reports a
    convergence problem the Monte Carlo estimate is returned instead and the
    ``method`` field says so. ``fn`` must accept both floats and arrays.
    Pass ``method="monte-carlo"`` to skip the quadrature.
    """
    if method == "quadrature":
        try:
            value, err = _quadrature(fn, n, mu, epsrel)
            return Expectation(value, err, "quadrature")
        except QuadratureFailure:
            pass
    elif method != "monte-carlo":
        raise ValueError(f"unknown method {method!r}")
    value, err = _monte_carlo(fn, n, mu, fallback_samples, seed)
    return Expectation(value, err, "monte-carlo")
