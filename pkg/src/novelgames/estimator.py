"""Seeded game simulation and the outcome / fun features derived from it."""

from __future__ import annotations

import enum
import hashlib
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .agents import Policy, PolicyKind
from .core import (
    Cell,
    GameSpec,
    Player,
    Status,
    apply_move,
    effective_board_size,
    initial_state,
)

DEFAULT_K = 20


class Mode(enum.Enum):
    PARTIAL = "partial"
    FULL = "full"


def derive_seed(master_seed: int, game_id: str, sim_index: int, role: str) -> int:
    """Stable 64-bit stream seed, independent of execution order."""
    key = f"{int(master_seed)}\x1f{game_id}\x1f{int(sim_index)}\x1f{role}".encode()
    return int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "little")


def derive_rng(master_seed: int, game_id: str, sim_index: int, role: str) -> np.random.Generator:
    return np.random.default_rng(derive_seed(master_seed, game_id, sim_index, role))


@dataclass(frozen=True)
class EstimatorConfig:
    first_policy: Policy = field(default_factory=lambda: Policy(PolicyKind.SUBGOAL))
    second_policy: Policy = field(default_factory=lambda: Policy(PolicyKind.SUBGOAL))
    num_simulations: int = DEFAULT_K
    mode: Mode = Mode.PARTIAL
    master_seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.num_simulations < 1:
            raise ValueError("num_simulations must be >= 1")


@dataclass(frozen=True)
class OutcomeDistribution:
    first_wins: int
    second_wins: int
    draws: int

    @property
    def k(self) -> int:
        return self.first_wins + self.second_wins + self.draws

    @classmethod
    def from_statuses(cls, statuses) -> "OutcomeDistribution":
        statuses = list(statuses)
        return cls(statuses.count(Status.FIRST_WINS), statuses.count(Status.SECOND_WINS),
                   statuses.count(Status.DRAW))


@dataclass
class SimulationRecord:
    game_id: str
    sim_index: int
    move_cap: int
    moves: list[Cell]
    outcome: Status
    length: int

    def to_json(self) -> dict:
        return {
            "game_id": self.game_id,
            "sim_index": self.sim_index,
            "move_cap": self.move_cap,
            "moves": [list(m) for m in self.moves],
            "outcome": self.outcome.value,
            "length": self.length,
        }

    @classmethod
    def from_json(cls, data: dict) -> "SimulationRecord":
        return cls(data["game_id"], int(data["sim_index"]), int(data["move_cap"]),
                   [(int(r), int(c)) for r, c in data["moves"]], Status(data["outcome"]),
                   int(data["length"]))


@dataclass(frozen=True)
class FunFeatures:
    outcome_entropy: float
    advantage: float
    expected_length: float
    external_score: float | None = None


def simulate_game(spec: GameSpec, first_policy: Policy, second_policy: Policy, move_cap: int,
                  rng: np.random.Generator, sim_index: int = 0) -> SimulationRecord:
    if move_cap < 1:
        raise ValueError("move_cap must be >= 1")
    state = initial_state(spec)
    policies = {Player.FIRST: first_policy, Player.SECOND: second_policy}
    moves: list[Cell] = []
    while not state.status.is_terminal and state.ply_count < move_cap:
        cell = policies[state.to_move].choose_move(state, spec, rng)
        state = apply_move(state, cell, spec)
        moves.append(cell)
    outcome = state.status if state.status.is_terminal else Status.DRAW
    return SimulationRecord(spec.id, sim_index, move_cap, moves, outcome, state.ply_count)


def _run_one(spec: GameSpec, config: EstimatorConfig, i: int, role: str) -> SimulationRecord:
    rng = derive_rng(config.master_seed, spec.id, i, role)
    size = effective_board_size(spec)
    cap = int(rng.integers(1, size + 1)) if config.mode is Mode.PARTIAL else size
    return simulate_game(spec, config.first_policy, config.second_policy, cap, rng, sim_index=i)


def _run_batch(args) -> list[SimulationRecord]:
    spec, config, indices, role = args
    return [_run_one(spec, config, i, role) for i in indices]


def run_simulations(spec: GameSpec, config: EstimatorConfig, role: str = "outcomes") -> list[SimulationRecord]:
    k = config.num_simulations
    if config.workers <= 1 or k == 1:
        return [_run_one(spec, config, i, role) for i in range(k)]
    chunks = [list(range(k))[w::config.workers] for w in range(config.workers)]
    with ProcessPoolExecutor(config.workers) as pool:
        batches = pool.map(_run_batch, [(spec, config, c, role) for c in chunks if c])
        records = [r for batch in batches for r in batch]
    return sorted(records, key=lambda r: r.sim_index)


def estimate_outcomes(spec: GameSpec, config: EstimatorConfig) -> tuple[OutcomeDistribution, list[SimulationRecord]]:
    records = run_simulations(spec, config)
    return OutcomeDistribution.from_statuses(r.outcome for r in records), records


def expected_payoff(dist: OutcomeDistribution) -> float:
    if dist.k == 0:
        raise ValueError("empty outcome distribution")
    return (dist.first_wins - dist.second_wins) / dist.k


def outcome_entropy(dist: OutcomeDistribution) -> float:
    if dist.k == 0:
        raise ValueError("empty outcome distribution")
    h = 0.0
    for n in (dist.first_wins, dist.second_wins, dist.draws):
        if n:
            p = n / dist.k
            h -= p * math.log2(p)
    return h


def p_first_given_not_draw(dist: OutcomeDistribution) -> float | None:
    decided = dist.first_wins + dist.second_wins
    return dist.first_wins / decided if decided else None


def advantage_vs_random(spec: GameSpec, k_per_ordering: int = DEFAULT_K, master_seed: int = 0,
                        workers: int = 1, agent: Policy | None = None,
                        opponent: Policy | None = None) -> float:
    """Mean payoff of the subgoal agent against a uniform-random agent, seats averaged.

    ``agent`` and ``opponent`` swap in other policies for either side.
    """
    agent = agent or Policy(PolicyKind.SUBGOAL)
    opponent = opponent or Policy(PolicyKind.RANDOM)
    as_first = EstimatorConfig(agent, opponent, k_per_ordering, Mode.FULL, master_seed, workers)
    as_second = EstimatorConfig(opponent, agent, k_per_ordering, Mode.FULL, master_seed, workers)
    d1 = OutcomeDistribution.from_statuses(
        r.outcome for r in run_simulations(spec, as_first, "advantage-first"))
    d2 = OutcomeDistribution.from_statuses(
        r.outcome for r in run_simulations(spec, as_second, "advantage-second"))
    return 0.5 * expected_payoff(d1) - 0.5 * expected_payoff(d2)


def expected_length(spec: GameSpec, k: int = DEFAULT_K, master_seed: int = 0, workers: int = 1) -> float:
    config = EstimatorConfig(num_simulations=k, mode=Mode.FULL, master_seed=master_seed, workers=workers)
    records = run_simulations(spec, config, "length")
    return sum(r.length for r in records) / len(records)


def fun_features(spec: GameSpec, k: int = DEFAULT_K, master_seed: int = 0,
                 external_score: float | None = None, workers: int = 1) -> FunFeatures:
    dist, _ = estimate_outcomes(spec, EstimatorConfig(num_simulations=k, master_seed=master_seed,
                                                      workers=workers))
    return FunFeatures(
        outcome_entropy=outcome_entropy(dist),
        advantage=advantage_vs_random(spec, k, master_seed, workers),
        expected_length=expected_length(spec, k, master_seed, workers),
        external_score=external_score,
    )
