"""Secure transmission design without eavesdropper CSI.

Closed-form designs that maximize the anti-eavesdropping ability (AEA), the
secrecy outage probability they induce against a Rayleigh eavesdropper, an
ECSI-based reference optimizer, and Monte Carlo validation through the full
artificial-noise signal model.
"""
from .design import (
    AstDesign,
    NastDesign,
    OverallAea,
    Scheme,
    aea_of,
    ast_design,
    nast_design,
    nast_design_multi,
    nast_design_single,
    overall_aea,
)
from .errors import (
    ConfigError,
    InsufficientTransmissionsError,
    InvalidPhiError,
    NegativeInputError,
    QuadratureFailure,
    ToleranceNotMetError,
    ZeroChannelError,
)
from .model import (
    ChannelRealization,
    DesignParams,
    EveRealization,
    Precoder,
    SystemConfig,
    build_precoder,
    rate_to_threshold,
    sample_bob_channel,
    sample_eve_channel,
    sinr_bob,
    sinr_eve,
    threshold_to_rate,
)
from .montecarlo import McConfig, McReport, simulate_overall_aea, simulate_pt, simulate_sop
from .reliability import ThresholdSolution, solve_threshold, transmission_probability
from .sop import BaselineDesign, SopResult, ecsi_baseline, overall_sop, sop_given_aea, worst_case_sop

__version__ = "0.1.0"

__all__ = [
    "AstDesign",
    "NastDesign",
    "OverallAea",
    "Scheme",
    "aea_of",
    "ast_design",
    "nast_design",
    "nast_design_multi",
    "nast_design_single",
    "overall_aea",
    "ConfigError",
    "InsufficientTransmissionsError",
    "InvalidPhiError",
    "NegativeInputError",
    "QuadratureFailure",
    "ToleranceNotMetError",
    "ZeroChannelError",
    "ChannelRealization",
    "DesignParams",
    "EveRealization",
    "Precoder",
    "SystemConfig",
    "build_precoder",
    "rate_to_threshold",
    "sample_bob_channel",
    "sample_eve_channel",
    "sinr_bob",
    "sinr_eve",
    "threshold_to_rate",
    "McConfig",
    "McReport",
    "simulate_overall_aea",
    "simulate_pt",
    "simulate_sop",
    "ThresholdSolution",
    "solve_threshold",
    "transmission_probability",
    "BaselineDesign",
    "SopResult",
    "ecsi_baseline",
    "overall_sop",
    "sop_given_aea",
    "worst_case_sop",
]
