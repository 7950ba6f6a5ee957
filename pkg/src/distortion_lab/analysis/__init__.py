"""Distortion oracles, lower-bound generators and prediction-error sweeps."""

from .generators import (
    Check,
    GeneratedInstance,
    gen_fullval_lb,
    gen_hybrid_lb,
    gen_matching_lb,
    gen_optcand_lb,
    gen_tradeoff_lb,
)
from .mechanisms import (
    MECHANISMS,
    MechanismMismatch,
    consistency_of,
    optimum,
    theoretical_bound,
    robustness_of,
    run_mechanism,
)
from .oracle import DistortionReport, SizeLimitError, VertexProfile, worst_ratio

__all__ = [
    "Check",
    "DistortionReport",
    "GeneratedInstance",
    "MECHANISMS",
    "MechanismMismatch",
    "SizeLimitError",
    "VertexProfile",
    "consistency_of",
    "gen_fullval_lb",
    "gen_hybrid_lb",
    "gen_matching_lb",
    "gen_optcand_lb",
    "gen_tradeoff_lb",
    "optimum",
    "theoretical_bound",
    "robustness_of",
    "run_mechanism",
    "worst_ratio",
]
