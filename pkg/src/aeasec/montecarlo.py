"""Monte Carlo validation through the full signal model.

Samples are processed in fixed-size blocks. Block ``k`` draws from a Philox
(counter-based) generator keyed by ``(seed, stream, k)``, so the random
numbers behind every sample depend only on the seed and the sample index.
Any number of workers therefore yields bit-identical results: blocks are
reduced in index order.
"""
from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .design import Scheme, closed_form, nast_design
from .errors import ConfigError, InsufficientTransmissionsError
from .model import SystemConfig, complex_normal, eve_projections, eve_sinr

__all__ = [
    "BLOCK_SIZE",
    "MIN_TRANSMISSIONS",
    "McConfig",
    "McReport",
    "block_rng",
    "simulate_sop",
    "simulate_pt",
    "simulate_overall_aea",
]

BLOCK_SIZE = 1 << 15
MIN_TRANSMISSIONS = 100


@dataclass(frozen=True)
class McConfig:
    samples: int = 10**6
    seed: int = 0
    workers: int = 1
    antithetic: bool = False

    def __post_init__(self):
        if int(self.samples) < 1:
            raise ConfigError(f"samples must be >= 1, got {self.samples}")
        if int(self.workers) < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        if not (0 <= int(self.seed) < 2**64):
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed}")


@dataclass(frozen=True)
class McReport:
    estimate: float
    std_error: float
    samples_used: int
    samples_drawn: int
    seed: int
    elapsed: float = field(default=0.0, compare=False)


def block_rng(seed: int, stream: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, stream, block])))


def _run_blocks(work: Callable, mc: McConfig, stream: int) -> np.ndarray:
    """Apply ``work(rng, size)`` to every block and sum the returned tuples in order."""
    n_blocks = -(-mc.samples // BLOCK_SIZE)

    def one(k):
        size = min(BLOCK_SIZE, mc.samples - k * BLOCK_SIZE)
        return np.asarray(work(block_rng(mc.seed, stream, k), size), dtype=float)

    if mc.workers == 1 or n_blocks == 1:
        parts = [one(k) for k in range(n_blocks)]
    else:
        with ThreadPoolExecutor(max_workers=mc.workers) as pool:
            parts = list(pool.map(one, range(n_blocks)))
    total = np.zeros_like(parts[0])
    for p in parts:
        total = total + p
    return total


def _proportion(hits: float, n: float) -> tuple[float, float]:
    p = float(hits) / float(n)
    return p, math.sqrt(max(p * (1.0 - p), 0.0) / n)


def simulate_sop(
    config: SystemConfig,
    scheme,
    mc: McConfig,
    *,
    zero_redundancy: bool = False,
    stream: int = 0,
) -> McReport:
    """Empirical SOP over transmitted blocks.

    Each sample draws Bob's and Eve's channels, applies the on-off gate,
    forms the design (fixed for NAST, per realization for AST), builds the
    beamformer and null-space AN basis, and counts an outage when Eve's SINR
    exceeds the redundancy threshold. ``zero_redundancy`` forces
    ``beta_t = beta_s`` as a test hook.
    """
    start = time.perf_counter()
    scheme = Scheme.parse(scheme)
    nast = nast_design(config)
    if not nast.feasible:
        raise ConfigError("configuration is infeasible: P_max * mu <= beta_m")
    n, p, b, s2 = config.n_antennas, config.p_max, config.beta_m, config.sigma_e_sq
    mu = nast.params.mu

    def work(rng, size):
        h_b = complex_normal(rng, (size, n), mc.antithetic)
        h_e = complex_normal(rng, (size, n), mc.antithetic)
        gain = np.sum(h_b.real**2 + h_b.imag**2, axis=1)
        on = gain > mu
        h_b, h_e, gain = h_b[on], h_e[on], gain[on]
        if scheme is Scheme.NAST:
            phi = np.full(gain.shape, nast.params.phi)
            beta_e = np.full(gain.shape, nast.params.beta_e)
        else:
            phi, beta_t, _ = closed_form(n, p, gain, b)
            beta_e = (beta_t - b) / (1.0 + b)
        if zero_redundancy:
            beta_e = np.zeros_like(beta_e)
        sig, an = eve_projections(h_b, h_e)
        gamma_e = eve_sinr(n, phi, p, s2, sig, an)
        return on.sum(), np.count_nonzero(gamma_e > beta_e)

    sent, outages = _run_blocks(work, mc, stream)
    if sent < MIN_TRANSMISSIONS:
        raise InsufficientTransmissionsError(f"only {int(sent)} of {mc.samples} samples transmitted")
    est, se = _proportion(outages, sent)
    return McReport(est, se, int(sent), mc.samples, mc.seed, time.perf_counter() - start)


def simulate_pt(config: SystemConfig, mu: float, mc: McConfig, *, stream: int = 0) -> McReport:
    """Empirical ``P{||h_b||^2 > mu}``."""
    start = time.perf_counter()
    if mu < 0:
        raise ConfigError(f"mu must be >= 0, got {mu}")
    n = config.n_antennas

    def work(rng, size):
        h_b = complex_normal(rng, (size, n), mc.antithetic)
        gain = np.sum(h_b.real**2 + h_b.imag**2, axis=1)
        return (np.count_nonzero(gain > mu),)

    (hits,) = _run_blocks(work, mc, stream)
    est, se = _proportion(hits, mc.samples)
    return McReport(est, se, mc.samples, mc.samples, mc.seed, time.perf_counter() - start)


def simulate_overall_aea(
    config: SystemConfig,
    scheme,
    mc: McConfig,
    *,
    gain_sampler: Callable | None = None,
    stream: int = 0,
) -> McReport:
    """Sample mean of the achieved AEA over transmitted realizations.

    ``gain_sampler(rng, size)`` replaces the channel draw with arbitrary
    gains (test hook).
    """
    start = time.perf_counter()
    scheme = Scheme.parse(scheme)
    nast = nast_design(config)
    if not nast.feasible:
        raise ConfigError("configuration is infeasible: P_max * mu <= beta_m")
    n, p, b, mu = config.n_antennas, config.p_max, config.beta_m, nast.params.mu

    def work(rng, size):
        if gain_sampler is None:
            h_b = complex_normal(rng, (size, n), mc.antithetic)
            gain = np.sum(h_b.real**2 + h_b.imag**2, axis=1)
        else:
            gain = np.asarray(gain_sampler(rng, size), dtype=float)
        gain = gain[gain > mu]
        if scheme is Scheme.NAST:
            aea = np.full(gain.shape, nast.aea)
        else:
            aea = closed_form(n, p, gain, b)[2]
        dev = aea - ref
        return gain.size, dev.sum(), np.square(dev).sum()

    # moments about the fixed NAST value avoid cancellation in the variance
    ref = nast.aea
    sent, total, total_sq = _run_blocks(work, mc, stream)
    if sent < MIN_TRANSMISSIONS:
        raise InsufficientTransmissionsError(f"only {int(sent)} of {mc.samples} samples transmitted")
    shift = float(total) / float(sent)
    var = max(float(total_sq) / sent - shift**2, 0.0) * sent / max(sent - 1, 1)
    return McReport(
        ref + shift, math.sqrt(var / sent), int(sent), mc.samples, mc.seed, time.perf_counter() - start
    )
