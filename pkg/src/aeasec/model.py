"""Signal model: channel sampling, beamforming, null-space AN and SINRs.

All powers are linear and normalized to Bob's unit receiver-noise variance.
Complex Gaussian entries follow CN(0, 1): real and imaginary parts are
independent N(0, 1/2).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from numpy.random import Generator
from numpy.typing import ArrayLike, NDArray

from .errors import ConfigError, InvalidPhiError, NegativeInputError, ZeroChannelError

__all__ = [
    "SystemConfig",
    "ChannelRealization",
    "EveRealization",
    "DesignParams",
    "Precoder",
    "complex_normal",
    "sample_bob_channel",
    "sample_eve_channel",
    "build_precoder",
    "eve_projections",
    "bob_sinr",
    "eve_sinr",
    "sinr_bob",
    "sinr_eve",
    "rate_to_threshold",
    "threshold_to_rate",
    "db_to_linear",
]

_LN2 = math.log(2.0)


def db_to_linear(value_db: float) -> float:
    return 10.0 ** (value_db / 10.0)


@dataclass(frozen=True)
class SystemConfig:
    """Scenario constants shared by every design and evaluation routine.

    Attributes:
        n_antennas: Transmit antenna count N.
        p_max: Power budget (linear, noise-normalized).
        sigma_e_sq: Eavesdropper receiver-noise power.
        delta: Minimum transmission probability.
        beta_m: Secrecy SINR floor, ``2**R_m - 1``.
    """

    n_antennas: int
    p_max: float
    sigma_e_sq: float = 0.0
    delta: float = 0.9
    beta_m: float = 1.0

    def __post_init__(self):
        if isinstance(self.n_antennas, bool) or int(self.n_antennas) != self.n_antennas:
            raise ConfigError(f"n_antennas must be an integer, got {self.n_antennas!r}")
        object.__setattr__(self, "n_antennas", int(self.n_antennas))
        if self.n_antennas < 1:
            raise ConfigError(f"n_antennas must be >= 1, got {self.n_antennas}")
        if not (math.isfinite(self.p_max) and self.p_max > 0):
            raise ConfigError(f"p_max must be positive and finite, got {self.p_max}")
        if not (0.0 < self.delta <= 1.0):
            raise ConfigError(f"delta must lie in (0, 1], got {self.delta}")
        if not (math.isfinite(self.beta_m) and self.beta_m >= 0):
            raise ConfigError(f"beta_m must be >= 0, got {self.beta_m}")
        if not (math.isfinite(self.sigma_e_sq) and self.sigma_e_sq >= 0):
            raise ConfigError(f"sigma_e_sq must be >= 0, got {self.sigma_e_sq}")

    @classmethod
    def from_db(cls, n_antennas: int, p_max_db: float, **kwargs) -> "SystemConfig":
        return cls(n_antennas=n_antennas, p_max=db_to_linear(p_max_db), **kwargs)

    @property
    def p_max_db(self) -> float:
        return 10.0 * math.log10(self.p_max)

    def replace(self, **changes) -> "SystemConfig":
        return replace(self, **changes)


@dataclass(frozen=True)
class ChannelRealization:
    """Legitimate channel vector with its cached gain ``||h_b||^2``."""

    h_b: NDArray[np.complex128]
    gain: float = field(init=False)

    def __post_init__(self):
        h = np.atleast_1d(np.asarray(self.h_b, dtype=np.complex128))
        if h.ndim != 1:
            raise ValueError("h_b must be a vector")
        object.__setattr__(self, "h_b", h)
        object.__setattr__(self, "gain", float(np.sum(h.real**2 + h.imag**2)))

    @property
    def n(self) -> int:
        return self.h_b.shape[0]


@dataclass(frozen=True)
class EveRealization:
    h_e: NDArray[np.complex128]

    def __post_init__(self):
        h = np.atleast_1d(np.asarray(self.h_e, dtype=np.complex128))
        if h.ndim != 1 or not np.all(np.isfinite(h)):
            raise ValueError("h_e must be a finite vector")
        object.__setattr__(self, "h_e", h)


@dataclass(frozen=True)
class DesignParams:
    """A transmit design.

    ``beta_e`` is derived from the codeword and secrecy thresholds, so the
    redundancy relation ``beta_e * (1 + beta_s) = beta_t - beta_s`` holds by
    construction.
    """

    p_total: float
    phi: float
    beta_t: float
    beta_s: float
    mu: float = 0.0

    def __post_init__(self):
        if not self.p_total > 0:
            raise ConfigError(f"p_total must be positive, got {self.p_total}")
        if not (0.0 < self.phi <= 1.0):
            raise InvalidPhiError(f"phi must lie in (0, 1], got {self.phi}")
        if not (0.0 <= self.beta_s <= self.beta_t):
            raise ConfigError(
                f"need 0 <= beta_s <= beta_t, got beta_s={self.beta_s}, beta_t={self.beta_t}"
            )
        if self.mu < 0:
            raise ConfigError(f"mu must be >= 0, got {self.mu}")

    @property
    def beta_e(self) -> float:
        return (self.beta_t - self.beta_s) / (1.0 + self.beta_s)

    @property
    def p_signal(self) -> float:
        return self.phi * self.p_total

    @property
    def p_an(self) -> float:
        return (1.0 - self.phi) * self.p_total


@dataclass(frozen=True)
class Precoder:
    """Beamformer ``w`` and orthonormal null-space basis ``G`` (N x (N-1))."""

    w: NDArray[np.complex128]
    g_basis: NDArray[np.complex128]


def complex_normal(rng: Generator, shape, antithetic: bool = False) -> NDArray[np.complex128]:
    """Draw CN(0, 1) entries.

    The default path builds each entry as ``(x + iy)/sqrt(2)`` from two
    standard normals. With ``antithetic=True`` the leading axis is split in
    two halves drawn in polar form, the second half reusing the phases of the
    first with the exponential modulus driven by ``1 - U`` instead of ``U``.
    The marginal law is identical.
    """
    shape = tuple(np.atleast_1d(shape))
    if not antithetic:
        z = rng.standard_normal(shape + (2,))
        return (z[..., 0] + 1j * z[..., 1]) * np.sqrt(0.5)
    lead = shape[0]
    half = (lead + 1) // 2
    # midpoint lattice on (0, 1): u and 1 - u are both exact and never 0 or 1
    u = (rng.integers(0, 2**52, size=(half,) + shape[1:]) + 0.5) * 2.0**-52
    theta = rng.random((half,) + shape[1:]) * (2.0 * np.pi)
    u = np.concatenate([u, 1.0 - u])[:lead]
    theta = np.concatenate([theta, theta])[:lead]
    radius = np.sqrt(-np.log1p(-u))
    return radius * np.exp(1j * theta)


def sample_bob_channel(n: int, rng: Generator, forced: ArrayLike | None = None) -> ChannelRealization:
    """Draw ``h_b ~ CN(0, I_n)``; ``forced`` bypasses the generator for tests."""
    if n < 1:
        raise ConfigError(f"n must be >= 1, got {n}")
    if forced is not None:
        h = np.atleast_1d(np.asarray(forced, dtype=np.complex128))
        if h.shape != (n,):
            raise ValueError(f"forced channel must have shape ({n},)")
        return ChannelRealization(h)
    return ChannelRealization(complex_normal(rng, (n,)))


def sample_eve_channel(n: int, rng: Generator, forced: ArrayLike | None = None) -> EveRealization:
    if n < 1:
        raise ConfigError(f"n must be >= 1, got {n}")
    if forced is not None:
        h = np.atleast_1d(np.asarray(forced, dtype=np.complex128))
        if h.shape != (n,):
            raise ValueError(f"forced channel must have shape ({n},)")
        return EveRealization(h)
    return EveRealization(complex_normal(rng, (n,)))


def _reflector(u: NDArray[np.complex128]):
    """Householder vector ``v`` with ``(I - 2 v v^H / |v|^2) u = -e^{i arg u_0} e_1``.

    ``u`` has unit-norm rows, shape (..., N). Returns ``(v, |v|^2)``.
    """
    lead = u[..., 0]
    mag = np.abs(lead)
    phase = np.where(mag > 0, lead / np.where(mag > 0, mag, 1.0), 1.0)
    v = u.copy()
    v[..., 0] += phase
    # |v|^2 = 2 (1 + |u_0|) >= 2, no cancellation
    vnorm2 = 2.0 * (1.0 + mag)
    return v, vnorm2


def build_precoder(h_b: ChannelRealization) -> Precoder:
    """MRT beamformer and null-space AN basis for one channel.

    ``w = conj(h_b)/||h_b||`` so that ``h_b^T w = ||h_b||``. ``G`` is the
    trailing N-1 columns of the Householder reflector that maps ``w`` onto
    the first axis, hence ``h_b^T G = 0`` and ``G^H G = I``.
    """
    if h_b.gain <= 0:
        raise ZeroChannelError("legitimate channel has zero gain")
    w = np.conj(h_b.h_b) / math.sqrt(h_b.gain)
    n = w.shape[0]
    if n == 1:
        return Precoder(w=w, g_basis=np.zeros((1, 0), dtype=np.complex128))
    v, vnorm2 = _reflector(w)
    reflector = np.eye(n, dtype=np.complex128) - (2.0 / vnorm2) * np.outer(v, np.conj(v))
    return Precoder(w=w, g_basis=reflector[:, 1:])


def eve_projections(h_b: NDArray, h_e: NDArray):
    """Batched ``|h_e^T w|^2`` and ``||h_e^T G||^2`` for rows of ``h_b``, ``h_e``.

    Uses the same reflector as :func:`build_precoder`, applied implicitly so
    no N x N matrix is formed per sample. Shapes are (B, N); rows of ``h_b``
    must be nonzero.
    """
    h_b = np.asarray(h_b, dtype=np.complex128)
    h_e = np.asarray(h_e, dtype=np.complex128)
    norm = np.sqrt(np.sum(h_b.real**2 + h_b.imag**2, axis=-1, keepdims=True))
    w = np.conj(h_b) / norm
    proj_w = np.sum(h_e * w, axis=-1)
    signal_gain = proj_w.real**2 + proj_w.imag**2
    if h_b.shape[-1] == 1:
        return signal_gain, np.zeros_like(signal_gain)
    v, vnorm2 = _reflector(w)
    coeff = (2.0 / vnorm2) * np.sum(h_e * v, axis=-1)
    row = h_e[..., 1:] - coeff[..., None] * np.conj(v[..., 1:])
    an_gain = np.sum(row.real**2 + row.imag**2, axis=-1)
    return signal_gain, an_gain


def bob_sinr(n: int, phi, p_total, gain):
    """Bob's SINR; for a single antenna the AN leaks into Bob's receiver."""
    phi = np.asarray(phi, dtype=float)
    gain = np.asarray(gain, dtype=float)
    if n >= 2:
        return phi * p_total * gain
    return phi * p_total * gain / ((1.0 - phi) * p_total * gain + 1.0)


def eve_sinr(n: int, phi, p_total, sigma_e_sq, signal_gain, an_gain=0.0):
    """Eve's SINR from projected gains; +inf where the denominator vanishes."""
    phi = np.asarray(phi, dtype=float)
    signal_gain = np.asarray(signal_gain, dtype=float)
    num = phi * p_total * signal_gain
    if n >= 2:
        den = (1.0 - phi) * p_total * np.asarray(an_gain, dtype=float) / (n - 1) + sigma_e_sq
    else:
        den = (1.0 - phi) * p_total * signal_gain + sigma_e_sq
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(den > 0, num / np.where(den > 0, den, 1.0), np.inf)
    return out


def sinr_bob(params: DesignParams, h_b: ChannelRealization, config: SystemConfig) -> float:
    return float(bob_sinr(config.n_antennas, params.phi, params.p_total, h_b.gain))


def sinr_eve(
    params: DesignParams, pre: Precoder, h_e: EveRealization, config: SystemConfig
) -> float:
    proj_w = np.dot(h_e.h_e, pre.w)
    signal_gain = abs(proj_w) ** 2
    proj_g = h_e.h_e @ pre.g_basis
    an_gain = float(np.sum(np.abs(proj_g) ** 2))
    return float(
        eve_sinr(config.n_antennas, params.phi, params.p_total, config.sigma_e_sq, signal_gain, an_gain)
    )


def rate_to_threshold(r: float) -> float:
    """SINR threshold ``2**r - 1`` for a rate in bits per channel use."""
    if r < 0:
        raise NegativeInputError(f"rate must be >= 0, got {r}")
    return math.expm1(r * _LN2)


def threshold_to_rate(beta: float) -> float:
    if beta < 0:
        raise NegativeInputError(f"threshold must be >= 0, got {beta}")
    return math.log1p(beta) / _LN2
