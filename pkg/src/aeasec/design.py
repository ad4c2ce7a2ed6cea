"""Closed-form designs maximizing the anti-eavesdropping ability (AEA).

The AEA of a design is ``((1 - phi) / phi) * (beta_t - beta_s) / (1 + beta_s)``,
the AN-to-signal power ratio times the redundancy threshold. It needs no
knowledge of the eavesdropper's channel.

Two schemes are provided:

* NAST (non-adaptive): one design from channel statistics. Full power,
  secrecy threshold at its floor, on-off threshold at the largest value
  meeting the delay constraint, and the codeword threshold on the
  reliability boundary.
* AST (adaptive): the same structure solved per channel realization, with
  the realized gain ``||h_b||^2`` in place of the on-off threshold.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, InvalidPhiError
from .expectation import truncated_gamma_expectation
from .model import DesignParams, SystemConfig, bob_sinr
from .reliability import solve_threshold

__all__ = [
    "Scheme",
    "NastDesign",
    "AstDesign",
    "OverallAea",
    "aea_of",
    "aea_at_phi",
    "closed_form",
    "nast_design",
    "nast_design_multi",
    "nast_design_single",
    "ast_design",
    "on_off_threshold",
    "overall_aea",
]


class Scheme(str, enum.Enum):
    NAST = "nast"
    AST = "ast"

    @classmethod
    def parse(cls, value) -> "Scheme":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ConfigError(f"unknown scheme {value!r}; expected 'nast' or 'ast'") from None


@dataclass(frozen=True)
class NastDesign:
    """Non-adaptive design. ``params`` carries ``phi=1`` and no redundancy when infeasible."""

    params: DesignParams
    aea: float
    feasible: bool


@dataclass(frozen=True)
class AstDesign:
    params: DesignParams
    aea: float
    gain_used: float


@dataclass(frozen=True)
class OverallAea:
    value: float
    scheme: Scheme
    method: str
    abs_error_estimate: float
    feasible: bool = True


def aea_of(params: DesignParams) -> float:
    """AEA of an arbitrary design."""
    if not (0.0 < params.phi <= 1.0):
        raise InvalidPhiError(f"phi must lie in (0, 1], got {params.phi}")
    if params.phi == 1.0:
        return 0.0
    return (1.0 - params.phi) / params.phi * params.beta_e


def aea_at_phi(phi, n: int, p_total: float, gain, beta_m: float):
    """AEA as a function of the power split alone.

    The codeword threshold sits on the reliability boundary (Bob's SINR at
    ``gain``) and the secrecy threshold at ``beta_m``. Values go negative
    where that boundary falls below ``beta_m``, i.e. no valid code exists.
    """
    phi = np.asarray(phi, dtype=float)
    beta_t = bob_sinr(n, phi, p_total, gain)
    return (1.0 - phi) / phi * (beta_t - beta_m) / (1.0 + beta_m)


def closed_form(n: int, p_total: float, gain, beta_m: float):
    """Optimal ``(phi, beta_t, aea)`` at gain level ``gain`` (array friendly).

    Infeasible entries (``p_total * gain <= beta_m``) come back with
    ``phi = 1``, ``beta_t = beta_m`` and zero AEA.
    """
    a = p_total * np.asarray(gain, dtype=float)
    b = beta_m
    feasible = a > b
    a_safe = np.where(feasible, a, 1.0 + b)
    root_ab = np.sqrt(a_safe * b)
    gap_sq = (np.sqrt(a_safe) - math.sqrt(b)) ** 2
    if n >= 2:
        phi = np.sqrt(b / a_safe)
        aea = gap_sq / (1.0 + b)
    else:
        phi = np.sqrt(b / a_safe) * (1.0 + a_safe) / (1.0 + root_ab)
        aea = gap_sq / ((1.0 + b) * (1.0 + a_safe))
    phi = np.where(feasible, np.minimum(phi, 1.0), 1.0)
    beta_t = np.where(feasible, np.maximum(root_ab, b), b)
    aea = np.where(feasible, aea, 0.0)
    return phi, beta_t, aea


def _check_floor(config: SystemConfig):
    if config.beta_m <= 0:
        raise ConfigError("beta_m must be > 0 for AEA designs (the optimum degenerates to phi -> 0)")


def on_off_threshold(config: SystemConfig) -> float:
    """Largest gain threshold whose transmission probability is still ``delta``."""
    if config.n_antennas == 1:
        return math.log(1.0 / config.delta)
    return solve_threshold(config.n_antennas, config.delta).mu


def _nast(config: SystemConfig, mu: float) -> NastDesign:
    phi, beta_t, aea = (float(x) for x in closed_form(config.n_antennas, config.p_max, mu, config.beta_m))
    feasible = config.p_max * mu > config.beta_m
    params = DesignParams(p_total=config.p_max, phi=phi, beta_t=beta_t, beta_s=config.beta_m, mu=mu)
    return NastDesign(params=params, aea=aea, feasible=feasible)


def nast_design_multi(config: SystemConfig) -> NastDesign:
    """Multi-antenna NAST optimum.

    ``phi* = sqrt(beta_m / (P_max mu))`` and
    ``aea* = (sqrt(P_max mu) - sqrt(beta_m))**2 / (1 + beta_m)``.
    """
    if config.n_antennas < 2:
        raise ConfigError("nast_design_multi needs n_antennas >= 2")
    _check_floor(config)
    return _nast(config, on_off_threshold(config))


def nast_design_single(config: SystemConfig) -> NastDesign:
    """Single-antenna NAST optimum; AN leaks into Bob so the gain saturates."""
    if config.n_antennas != 1:
        raise ConfigError("nast_design_single needs n_antennas == 1")
    _check_floor(config)
    return _nast(config, on_off_threshold(config))


def nast_design(config: SystemConfig) -> NastDesign:
    if config.n_antennas == 1:
        return nast_design_single(config)
    return nast_design_multi(config)


def ast_design(config: SystemConfig, gain: float, mu: float | None = None) -> AstDesign:
    """Adaptive design for one realization with channel gain ``gain``.

    ``mu`` is the on-off threshold recorded in the returned params; it is
    solved from ``config.delta`` when omitted.
    """
    if not gain > 0:
        raise ConfigError(f"gain must be positive, got {gain}")
    _check_floor(config)
    if mu is None:
        mu = on_off_threshold(config)
    phi, beta_t, aea = (float(x) for x in closed_form(config.n_antennas, config.p_max, gain, config.beta_m))
    params = DesignParams(p_total=config.p_max, phi=phi, beta_t=beta_t, beta_s=config.beta_m, mu=mu)
    return AstDesign(params=params, aea=aea, gain_used=float(gain))


def overall_aea(config: SystemConfig, scheme, method: str = "quadrature") -> OverallAea:
    """Expected AEA over transmitted realizations.

    NAST is channel independent, so the expectation is the closed-form value.
    AST averages the per-realization optimum over the gated gain law.
    """
    scheme = Scheme.parse(scheme)
    nast = nast_design(config)
    if not nast.feasible:
        return OverallAea(0.0, scheme, "infeasible", 0.0, feasible=False)
    if scheme is Scheme.NAST:
        return OverallAea(nast.aea, scheme, "closed-form", 0.0)
    n, p, b, mu = config.n_antennas, config.p_max, config.beta_m, nast.params.mu

    def per_gain(g):
        return closed_form(n, p, g, b)[2]

    res = truncated_gamma_expectation(per_gain, n, mu, method=method)
    return OverallAea(res.value, scheme, res.method, res.abs_error)
