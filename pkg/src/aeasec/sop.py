"""Secrecy outage probability (SOP) against a single-antenna Rayleigh eavesdropper.

Once Eve's statistics are fixed, the SOP of a design depends on it only
through its AEA, the power split and the total power. The ECSI-based
baseline here minimizes that SOP directly and serves as the reference the
ECSI-free designs are compared against.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .design import Scheme, aea_at_phi, aea_of, closed_form, nast_design
from .errors import ConfigError, InvalidPhiError
from .expectation import truncated_gamma_expectation
from .model import DesignParams, SystemConfig, bob_sinr
from .search import grid_then_golden

__all__ = [
    "SopResult",
    "BaselineDesign",
    "sop_given_aea",
    "sop_of_design",
    "worst_case_sop",
    "overall_sop",
    "baseline_at_gain",
    "ecsi_baseline",
]

GRID_STEP = 1e-3
GOLDEN_TOL = 1e-6
_CHUNK = 512


@dataclass(frozen=True)
class SopResult:
    p_so: float
    regime: str  # "worst-case" or "noisy"
    n_antennas: int
    aea_used: float
    phi_used: float
    p_used: float


@dataclass(frozen=True)
class BaselineDesign:
    """Outcome of the ECSI-based search.

    For AST the design changes with every realization, so ``params`` holds
    the design at the threshold gain and ``p_so`` the overall average.
    """

    params: DesignParams | None
    p_so: float
    search_resolution: float
    method: str = "closed-form"


def sop_given_aea(n: int, aea, phi, p_total: float, sigma_e_sq: float):
    """SOP of a design with AEA ``aea`` and split ``phi`` (array friendly).

    For N >= 2:
    ``exp(-sigma^2 aea / (P (1 - phi))) * (1 + aea / (N - 1))**(1 - N)``.

    For N = 1 Eve's SINR never reaches ``phi / (1 - phi)``, so the outage is
    impossible once ``aea >= 1``; below that
    ``exp(-sigma^2 aea / (P (1 - phi) (1 - aea)))``.

    ``phi = 1`` is accepted only together with ``aea = 0`` (no AN, no
    redundancy), which is a certain outage.
    """
    aea = np.asarray(aea, dtype=float)
    phi = np.asarray(phi, dtype=float)
    if np.any(aea < 0):
        raise ConfigError("aea must be >= 0")
    if np.any((phi <= 0) | (phi > 1)) or np.any((phi == 1) & (aea > 0)):
        raise InvalidPhiError("phi must lie in (0, 1)")
    an_power = p_total * np.where(phi < 1, 1.0 - phi, 1.0)
    if n >= 2:
        noise_term = sigma_e_sq * aea / an_power
        out = np.exp(-noise_term) * np.power(1.0 + aea / (n - 1), 1 - n)
    else:
        below = aea < 1
        with np.errstate(divide="ignore", invalid="ignore"):
            noise_term = np.where(below, sigma_e_sq * aea / (an_power * np.where(below, 1.0 - aea, 1.0)), 0.0)
        out = np.where(below, np.exp(-noise_term), 0.0)
    out = np.clip(out, 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


def sop_of_design(config: SystemConfig, params: DesignParams) -> SopResult:
    aea = aea_of(params)
    p_so = sop_given_aea(config.n_antennas, aea, params.phi, params.p_total, config.sigma_e_sq)
    regime = "worst-case" if config.sigma_e_sq == 0 else "noisy"
    return SopResult(p_so, regime, config.n_antennas, aea, params.phi, params.p_total)


def worst_case_sop(params: DesignParams, n: int) -> float:
    """SOP with Eve's noise ignored, ``(1 + aea / (N - 1))**(1 - N)``."""
    if n < 2:
        raise ConfigError("worst_case_sop needs n >= 2")
    if params.phi >= 1 and params.beta_e > 0:
        raise InvalidPhiError("phi must be < 1")
    return sop_given_aea(n, aea_of(params), params.phi, params.p_total, 0.0)


def overall_sop(config: SystemConfig, scheme, method: str = "quadrature") -> float:
    """Average SOP over transmitted realizations; 1 for infeasible configs."""
    return _overall_sop(config, scheme, method)[0]


def _overall_sop(config: SystemConfig, scheme, method: str = "quadrature"):
    scheme = Scheme.parse(scheme)
    nast = nast_design(config)
    if not nast.feasible:
        return 1.0, 0.0, "infeasible"
    n, p, b, s2 = config.n_antennas, config.p_max, config.beta_m, config.sigma_e_sq
    if scheme is Scheme.NAST:
        return sop_given_aea(n, nast.aea, nast.params.phi, p, s2), 0.0, "closed-form"

    def per_gain(g):
        phi, _, aea = closed_form(n, p, g, b)
        return sop_given_aea(n, aea, phi, p, s2)

    res = truncated_gamma_expectation(per_gain, n, nast.params.mu, method=method)
    # quadrature of an integrand pinned at 1 can land an ulp above it
    return min(max(res.value, 0.0), 1.0), res.abs_error, res.method


def _sop_over_phi(config: SystemConfig, gain):
    """``phi -> SOP`` at each gain; ``gain`` has shape (batch, 1)."""
    n, p, b, s2 = config.n_antennas, config.p_max, config.beta_m, config.sigma_e_sq

    def objective(phi):
        aea = aea_at_phi(phi, n, p, gain, b)
        valid = aea > 0
        safe = np.where(valid, aea, 0.0)
        return np.where(valid, sop_given_aea(n, safe, phi, p, s2), 1.0)

    return objective


def baseline_at_gain(config: SystemConfig, gain, step: float = GRID_STEP, tol: float = GOLDEN_TOL):
    """SOP-minimizing split at each gain level, with Eve's statistics known.

    Power, secrecy threshold and codeword threshold are pinned the same way
    as in the AEA designs; only ``phi`` is searched. Returns ``(phi, p_so)``
    arrays matching ``gain``.
    """
    g = np.atleast_1d(np.asarray(gain, dtype=float)).ravel()
    phi = np.empty_like(g)
    val = np.empty_like(g)
    for start in range(0, g.size, _CHUNK):
        part = g[start:start + _CHUNK]
        sl = slice(start, start + part.size)
        phi[sl], val[sl] = grid_then_golden(
            _sop_over_phi(config, part[:, None]), step=step, tol=tol, batch=part.size
        )
    shape = np.shape(gain)
    return phi.reshape(shape), val.reshape(shape)


def _params_at(config: SystemConfig, phi: float, gain: float, mu: float) -> DesignParams:
    beta_t = float(bob_sinr(config.n_antennas, phi, config.p_max, gain))
    beta_t = max(beta_t, config.beta_m)
    return DesignParams(p_total=config.p_max, phi=phi, beta_t=beta_t, beta_s=config.beta_m, mu=mu)


def ecsi_baseline(
    config: SystemConfig,
    scheme,
    step: float = GRID_STEP,
    tol: float = GOLDEN_TOL,
    method: str = "quadrature",
) -> BaselineDesign:
    """Minimum SOP reachable when the transmitter knows Eve's channel statistics.

    NAST searches one split for the threshold gain (the SOP of a fixed
    design does not depend on ``h_b``, so averaging over the gated gain law
    leaves it unchanged). AST searches a split per realization and averages
    the minimum over gated gains.
    """
    scheme = Scheme.parse(scheme)
    nast = nast_design(config)
    mu = nast.params.mu
    if not nast.feasible:
        return BaselineDesign(nast.params, 1.0, step, "infeasible")
    phi_mu, sop_mu = (float(x) for x in baseline_at_gain(config, mu, step, tol))
    params = _params_at(config, phi_mu, mu, mu)
    if scheme is Scheme.NAST:
        return BaselineDesign(params, sop_mu, step, "closed-form")

    def per_gain(g):
        return baseline_at_gain(config, g, step, tol)[1]

    res = truncated_gamma_expectation(per_gain, config.n_antennas, mu, method=method)
    return BaselineDesign(params, res.value, step, res.method)
