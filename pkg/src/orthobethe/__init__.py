"""Exact algebraic Bethe ansatz for o(2n+1)-invariant spin chains."""

from .bethe import action_formula, build_bethe, build_bethe_alt, verify_action
from .monodromy import Chain, ChainSpec, build_monodromy, check_central, check_rtt
from .partitions import BetheParams
from .rmatrix import ModelParams, build_r, check_unitarity, check_yang_baxter
from .scalarfield import BACKEND, Q, RationalFunction

__all__ = [
    "BACKEND", "BetheParams", "Chain", "ChainSpec", "ModelParams", "Q", "RationalFunction",
    "action_formula", "build_bethe", "build_bethe_alt", "build_monodromy", "build_r",
    "check_central", "check_rtt", "check_unitarity", "check_yang_baxter", "verify_action",
]
__version__ = "0.1.0"
