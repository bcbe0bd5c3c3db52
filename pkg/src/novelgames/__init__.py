"""Simulation-based evaluation of novel m-in-a-row grid games."""

from .agents import AgentConfig, MoveUtility, Policy, PolicyKind, heuristic_utilities, policy_from_name
from .catalog import Catalog, CatalogEntry, generate_catalog, load_catalog, save_catalog
from .core import (
    BoardGeometry,
    Direction,
    GameSpec,
    GameState,
    OpeningRule,
    Player,
    Polarity,
    Status,
    WinRule,
    apply_move,
    initial_state,
    legal_moves,
    validate_spec,
)
from .dsl import parse_spec, print_spec
from .estimator import (
    EstimatorConfig,
    Mode,
    OutcomeDistribution,
    estimate_outcomes,
    expected_payoff,
    outcome_entropy,
)

__all__ = [
    "AgentConfig", "BoardGeometry", "Catalog", "CatalogEntry", "Direction", "EstimatorConfig",
    "GameSpec", "GameState", "Mode", "MoveUtility", "OpeningRule", "OutcomeDistribution",
    "Player", "Polarity", "Policy", "PolicyKind", "Status", "WinRule", "apply_move",
    "estimate_outcomes", "expected_payoff", "generate_catalog", "heuristic_utilities",
    "initial_state", "legal_moves", "load_catalog", "outcome_entropy", "parse_spec",
    "policy_from_name", "print_spec", "save_catalog", "validate_spec",
]
