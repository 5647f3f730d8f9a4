"""Defender-attacker game for trigger-based black-box model watermarking."""

from .game_core import (
    CostParameters,
    PayoffMatrix,
    Scenario,
    alice_payoff,
    asr,
    bob_payoff,
    build_payoff_matrix,
    coo,
    csr_general,
    csr_simplified,
    validate_scenario,
)
from .equilibrium import (
    MixedProfile,
    best_responses,
    expansion_deltas,
    indifference_residuals,
    mixed_2x2_closed_form,
    mixed_2x2_from_matrix,
    mixed_2x2_simplified,
    payoff_deltas,
    pure_equilibria,
    solve,
    structural_deltas,
    support_enumeration,
)
from .profiles import ModelProfile, estimate_profile, fit_lambda, lambda_coefficients
from .region import SweepSpec, Axis, classify_scenario, feasibility_interval, scan

__version__ = "0.1.0"
