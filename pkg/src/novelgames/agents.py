"""Move-selection policies: the subgoal heuristic agent and its baselines.

The subgoal agent scores every open cell with

    V(p) = 2 ** ((1 - d) + n1 + n2)

where ``d`` is the normalized distance to the board center, ``n1`` the run the
mover would make by playing there and ``n2`` the run it denies the opponent,
then samples from a softmax over ``V``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import _kernels as K
from .core import (
    Cell,
    Direction,
    GameSpec,
    GameState,
    IllegalMove,
    Player,
    Polarity,
    effective_board_size,
    legal_moves,
    longest_run,
)

TERMINAL_VALUE = 1e6
# Each ply between the root and a terminal state shaves this much off the sentinel,
# so a win now outranks a forced win later by far more than the softmax can blur.
PLY_PENALTY = 100.0

_DIRECTION_ORDER = (Direction.HORIZONTAL, Direction.VERTICAL,
                    Direction.DIAGONAL_RISING, Direction.DIAGONAL_FALLING)


@dataclass(frozen=True)
class AgentConfig:
    softmax_temperature: float = 1.0
    defense_discount: float = 0.5
    lookahead_depth: int = 5
    lookahead_beam: int = 5
    mcs_rollouts_per_move: int = 20

    def __post_init__(self):
        if self.softmax_temperature < 0:
            raise ValueError("softmax_temperature must be >= 0 (0 means greedy)")
        if self.defense_discount <= 0:
            raise ValueError("defense_discount must be positive")
        for name in ("lookahead_depth", "lookahead_beam", "mcs_rollouts_per_move"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")


@dataclass(frozen=True)
class MoveUtility:
    cell: Cell
    d: float
    n1: float
    n2_adjusted: float

    @property
    def exponent(self) -> float:
        return (1.0 - self.d) + self.n1 + self.n2_adjusted

    @property
    def v(self) -> float:
        return 2.0 ** self.exponent


# -- board encoding for the kernels ------------------------------------------

@dataclass(frozen=True)
class _SpecArrays:
    infinite: bool
    dirmask: np.ndarray
    target: np.ndarray
    loses: np.ndarray
    first_turn: np.ndarray
    center_r: float
    center_c: float
    maxdist: float


@lru_cache(maxsize=1024)
def _spec_arrays(spec: GameSpec) -> _SpecArrays:
    rules = (spec.first_rule, spec.second_rule)
    dirmask = np.array([[d in r.directions for d in _DIRECTION_ORDER] for r in rules], dtype=np.bool_)
    target = np.array([r.target_run for r in rules], dtype=np.int64)
    loses = np.array([r.polarity is Polarity.COMPLETING_LOSES for r in rules], dtype=np.bool_)
    first_turn = np.array([spec.opening.first, spec.opening.second], dtype=np.int64)
    geo = spec.geometry
    if geo.is_infinite:
        cr = cc = maxdist = 0.0
    else:
        cr, cc = (geo.rows - 1) / 2, (geo.cols - 1) / 2
        maxdist = math.hypot(cr, cc)
    for a in (dirmask, target, loses, first_turn):
        a.setflags(write=False)
    return _SpecArrays(geo.is_infinite, dirmask, target, loses, first_turn, cr, cc, maxdist)


def _encode(state: GameState, spec: GameSpec, pad: int = 1) -> tuple[np.ndarray, int, int]:
    """Board window plus the (row, col) offset mapping window cells back to board cells."""
    geo = spec.geometry
    if not geo.is_infinite:
        board = np.zeros((geo.rows, geo.cols), dtype=np.int8)
        r0 = c0 = 0
    else:
        if state.occupancy:
            rs = [r for r, _ in state.occupancy]
            cs = [c for _, c in state.occupancy]
            r0, c0 = min(rs) - pad, min(cs) - pad
            board = np.zeros((max(rs) - r0 + pad + 1, max(cs) - c0 + pad + 1), dtype=np.int8)
        else:
            r0 = c0 = -pad
            board = np.zeros((2 * pad + 1, 2 * pad + 1), dtype=np.int8)
    for (r, c), p in state.occupancy.items():
        board[r - r0, c - c0] = int(p)
    return board, r0, c0


def _terms(board, mover: int, sa: _SpecArrays, discount: float):
    return K.utility_terms(board, mover, sa.infinite, sa.dirmask, sa.target, sa.loses,
                           discount, sa.center_r, sa.center_c, sa.maxdist)


def _best_exponent(board, mover: int, sa: _SpecArrays, discount: float) -> float:
    return K.best_exponent(board, mover, sa.infinite, sa.dirmask, sa.target, sa.loses,
                           discount, sa.center_r, sa.center_c, sa.maxdist)


def _utility_arrays(state: GameState, spec: GameSpec, mover: Player, discount: float):
    """Legal cells and their exponents, in legal_moves order."""
    if spec.geometry.is_infinite and not state.occupancy:
        cells = np.zeros((1, 2), dtype=np.int64)
        d = np.zeros(1)
        n1 = np.array([_progress_from_run(1, spec, mover)])
        n2 = np.array([_blocking_from_run(1, spec, mover.other, discount)])
        return cells, d, n1, n2
    board, r0, c0 = _encode(state, spec)
    cells, d, n1, n2 = _terms(board, int(mover), _spec_arrays(spec), discount)
    cells = cells + np.array([r0, c0])
    return cells, d, n1, n2


# -- heuristic components ------------------------------------------------------

def center_distance(cell: Cell, state: GameState, spec: GameSpec) -> float:
    geo = spec.geometry
    r, c = cell
    if not geo.is_infinite:
        cr, cc = (geo.rows - 1) / 2, (geo.cols - 1) / 2
        corner = math.hypot(cr, cc)
        return math.hypot(r - cr, c - cc) / corner if corner > 0 else 0.0
    if not state.occupancy:
        return 0.0
    n = len(state.occupancy)
    cr = sum(p[0] for p in state.occupancy) / n
    cc = sum(p[1] for p in state.occupancy) / n
    farthest = max(math.hypot(a - cr, b - cc) for a, b in legal_moves(state, spec))
    return math.hypot(r - cr, c - cc) / farthest if farthest > 0 else 0.0


def _progress_from_run(run: int, spec: GameSpec, mover: Player) -> float:
    rule = spec.rule(mover)
    m = rule.target_run
    if rule.polarity is Polarity.COMPLETING_LOSES:
        return -(m + 1.0) if run >= m else 0.0
    return m + 1.0 if run >= m else float(run)


def _blocking_from_run(run: int, spec: GameSpec, opponent: Player, discount: float) -> float:
    rule = spec.rule(opponent)
    if rule.polarity is Polarity.COMPLETING_LOSES:
        return 0.0
    m = rule.target_run
    return float(m) if run >= m else run - discount


def progress_score(state: GameState, cell: Cell, mover: Player, spec: GameSpec) -> float:
    """n1: the mover's longest run through ``cell``, plus 1 when it completes the target.

    Under a completing-loses rule the sign flips for a completing run and shorter
    runs are worth nothing.
    """
    run = longest_run(state.occupancy, cell, mover, spec.rule(mover).directions)
    return _progress_from_run(run, spec, mover)


def blocking_score(state: GameState, cell: Cell, mover: Player, spec: GameSpec,
                   discount: float = 0.5) -> float:
    """n2: the run the opponent would get at ``cell``, discounted unless it is a win."""
    opponent = mover.other
    run = longest_run(state.occupancy, cell, opponent, spec.rule(opponent).directions)
    return _blocking_from_run(run, spec, opponent, discount)


def heuristic_utilities(state: GameState, spec: GameSpec, mover: Player | None = None,
                        config: AgentConfig = AgentConfig()) -> list[MoveUtility]:
    if state.status.is_terminal:
        raise IllegalMove("game is over")
    mover = state.to_move if mover is None else mover
    cells, d, n1, n2 = _utility_arrays(state, spec, mover, config.defense_discount)
    return [MoveUtility((int(cells[i, 0]), int(cells[i, 1])), float(d[i]), float(n1[i]), float(n2[i]))
            for i in range(len(cells))]


# -- softmax -------------------------------------------------------------------

def softmax_probabilities(values: Sequence[float], temperature: float = 1.0) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ValueError("softmax over an empty set")
    if temperature == 0:
        probs = np.zeros_like(values)
        probs[int(np.argmax(values))] = 1.0
        return probs
    z = (values - values.max()) / temperature
    w = np.exp(z)
    return w / w.sum()


def _sample_index(values, temperature: float, rng: np.random.Generator) -> int:
    probs = softmax_probabilities(values, temperature)
    if len(probs) == 1:
        return 0
    u = rng.random()
    idx = int(np.searchsorted(np.cumsum(probs), u, side="right"))
    return min(idx, len(probs) - 1)


def softmax_select(utilities: Sequence[MoveUtility], temperature: float,
                   rng: np.random.Generator) -> Cell:
    if not utilities:
        raise ValueError("no moves to choose from")
    idx = _sample_index([u.v for u in utilities], temperature, rng)
    return utilities[idx].cell


# -- policies --------------------------------------------------------------------

def choose_move_subgoal(state: GameState, spec: GameSpec, config: AgentConfig,
                        rng: np.random.Generator) -> Cell:
    cells, d, n1, n2 = _utility_arrays(state, spec, state.to_move, config.defense_discount)
    v = np.exp2((1.0 - d) + n1 + n2)
    idx = _sample_index(v, config.softmax_temperature, rng)
    return int(cells[idx, 0]), int(cells[idx, 1])


def choose_move_random(state: GameState, spec: GameSpec, rng: np.random.Generator) -> Cell:
    moves = legal_moves(state, spec)
    if len(moves) == 1:
        return moves[0]
    return moves[int(rng.integers(len(moves)))]


def _advance(to_move: int, remaining: int, moved: tuple[bool, bool], first_turn) -> tuple[int, int, tuple[bool, bool]]:
    moved = (True, moved[1]) if to_move == 1 else (moved[0], True)
    remaining -= 1
    if remaining == 0:
        to_move = 3 - to_move
        remaining = 1 if moved[to_move - 1] else int(first_turn[to_move - 1])
    return to_move, remaining, moved


@dataclass
class LookaheadResult:
    cells: list[Cell]
    values: list[float]
    leaves: int = 0
    nodes: int = 0


def lookahead_values(state: GameState, spec: GameSpec, config: AgentConfig = AgentConfig()) -> LookaheadResult:
    """Beam-limited alternating search scored by the subgoal exponents.

    Each ply expands the ``lookahead_beam`` highest-exponent moves of the player to
    move. Wins and losses score +/-TERMINAL_VALUE for the root player, shrunk by
    PLY_PENALTY per ply so nearer wins (and later losses) rank first; draws score 0
    and depth-limit leaves the root player's best exponent minus the opponent's.
    """
    sa = _spec_arrays(spec)
    discount = config.defense_discount
    depth = config.lookahead_depth
    beam = config.lookahead_beam
    root = int(state.to_move)
    if spec.geometry.is_infinite and not state.occupancy:
        return LookaheadResult([(0, 0)], [0.0])
    board, r0, c0 = _encode(state, spec, pad=depth + 1)
    size = board.size if not sa.infinite else None
    moved = (state.count(Player.FIRST) > 0, state.count(Player.SECOND) > 0)
    result = LookaheadResult([], [])

    def expand(board, mover):
        cells, d, n1, n2 = _terms(board, mover, sa, discount)
        order = np.argsort(-((1.0 - d) + n1 + n2), kind="stable")[:beam]
        return cells[order]

    def place(board, cell, mover, occupied, ply):
        """Returns the value of the position if placing ``cell`` ends the game, else None."""
        r, c = cell
        board[r, c] = mover
        if K.is_win(board, r, c, mover, sa.dirmask[mover - 1], sa.target[mover - 1]):
            winner = 3 - mover if sa.loses[mover - 1] else mover
            value = TERMINAL_VALUE - PLY_PENALTY * ply
            return value if winner == root else -value
        if size is not None and occupied + 1 >= size:
            return 0.0
        return None

    def search(board, to_move, remaining, moved, plies_left, occupied):
        result.nodes += 1
        if plies_left == 0:
            result.leaves += 1
            return (_best_exponent(board, root, sa, discount)
                    - _best_exponent(board, 3 - root, sa, discount))
        best = None
        for cell in expand(board, to_move):
            value = place(board, cell, to_move, occupied, depth - plies_left)
            if value is None:
                nt, nr, nm = _advance(to_move, remaining, moved, sa.first_turn)
                value = search(board, nt, nr, nm, plies_left - 1, occupied + 1)
            board[cell[0], cell[1]] = 0
            if best is None or (value > best if to_move == root else value < best):
                best = value
        return best

    occupied = len(state.occupancy)
    for cell in expand(board, root):
        value = place(board, cell, root, occupied, 0)
        if value is None:
            nt, nr, nm = _advance(root, state.placements_remaining, moved, sa.first_turn)
            value = search(board, nt, nr, nm, depth - 1, occupied + 1)
        board[cell[0], cell[1]] = 0
        result.cells.append((int(cell[0]) + r0, int(cell[1]) + c0))
        result.values.append(float(value))
    return result


def choose_move_lookahead(state: GameState, spec: GameSpec, config: AgentConfig,
                          rng: np.random.Generator) -> Cell:
    res = lookahead_values(state, spec, config)
    return res.cells[_sample_index(res.values, config.softmax_temperature, rng)]


def mcs_estimates(state: GameState, spec: GameSpec, config: AgentConfig,
                  rng: np.random.Generator) -> tuple[list[Cell], np.ndarray]:
    """Mean rollout payoff to the mover for every legal move.

    Rollouts are uniform-random to a terminal state, or to the effective board size
    in total plies on unbounded boards.
    """
    sa = _spec_arrays(spec)
    cap = effective_board_size(spec)
    moves = legal_moves(state, spec)
    k = config.mcs_rollouts_per_move
    steps = max(cap - state.ply_count, 1)
    if sa.infinite:
        board, r0, c0 = _encode(state, spec, pad=steps + 1)
    else:
        board, r0, c0 = _encode(state, spec)
    cands = np.array(moves, dtype=np.int64) - np.array([r0, c0])
    uniforms = rng.random((len(moves), k, steps))
    if state.occupancy:
        rows = [r - r0 for r, _ in state.occupancy]
        cols = [c - c0 for _, c in state.occupancy]
        bbox = np.array([min(rows), max(rows), min(cols), max(cols)], dtype=np.int64)
    else:
        bbox = np.array([board.shape[0], -1, board.shape[1], -1], dtype=np.int64)
    moved = np.array([state.count(Player.FIRST) > 0, state.count(Player.SECOND) > 0])
    values = K.mcs_values(board, cands, int(state.to_move), state.placements_remaining, moved,
                          sa.first_turn, sa.dirmask, sa.target, sa.loses, sa.infinite,
                          len(state.occupancy), state.ply_count, cap, uniforms, bbox)
    return moves, values


def choose_move_mcs(state: GameState, spec: GameSpec, config: AgentConfig,
                    rng: np.random.Generator) -> Cell:
    moves, values = mcs_estimates(state, spec, config, rng)
    return moves[_sample_index(values, config.softmax_temperature, rng)]


class PolicyKind(enum.Enum):
    SUBGOAL = "subgoal"
    RANDOM = "random"
    LOOKAHEAD = "lookahead5"
    MCS = "mcs"


@dataclass(frozen=True)
class Policy:
    kind: PolicyKind
    config: AgentConfig = field(default_factory=AgentConfig)

    @property
    def name(self) -> str:
        return self.kind.value

    def choose_move(self, state: GameState, spec: GameSpec, rng: np.random.Generator) -> Cell:
        if self.kind is PolicyKind.SUBGOAL:
            return choose_move_subgoal(state, spec, self.config, rng)
        if self.kind is PolicyKind.RANDOM:
            return choose_move_random(state, spec, rng)
        if self.kind is PolicyKind.LOOKAHEAD:
            return choose_move_lookahead(state, spec, self.config, rng)
        return choose_move_mcs(state, spec, self.config, rng)


POLICY_NAMES = tuple(k.value for k in PolicyKind)


def policy_from_name(name: str, config: AgentConfig | None = None) -> Policy:
    try:
        kind = PolicyKind(name)
    except ValueError:
        raise ValueError(f"unknown policy {name!r}; choose from {', '.join(POLICY_NAMES)}") from None
    return Policy(kind, config or AgentConfig())
