"""Game specifications, states and the transition function for m-in-a-row grid games."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Mapping

Cell = tuple[int, int]

MAX_DIM = 100


class Player(enum.IntEnum):
    FIRST = 1
    SECOND = 2

    @property
    def other(self) -> "Player":
        return Player.SECOND if self is Player.FIRST else Player.FIRST

    @property
    def label(self) -> str:
        return self.name.lower()

    @classmethod
    def parse(cls, text: str) -> "Player":
        return cls[text.upper()]


class Direction(enum.Enum):
    HORIZONTAL = (0, 1)
    VERTICAL = (1, 0)
    DIAGONAL_RISING = (-1, 1)
    DIAGONAL_FALLING = (1, 1)

    @property
    def delta(self) -> Cell:
        return self.value

    @property
    def label(self) -> str:
        return self.name.lower().replace("_", "-")

    @classmethod
    def parse(cls, text: str) -> "Direction":
        return cls[text.upper().replace("-", "_")]


ALL_DIRECTIONS = frozenset(Direction)
DIAGONALS = frozenset({Direction.DIAGONAL_RISING, Direction.DIAGONAL_FALLING})
ORTHOGONALS = frozenset({Direction.HORIZONTAL, Direction.VERTICAL})


class Polarity(enum.Enum):
    COMPLETING_WINS = "completing_wins"
    COMPLETING_LOSES = "completing_loses"


class Status(enum.Enum):
    ONGOING = "ongoing"
    FIRST_WINS = "first_wins"
    SECOND_WINS = "second_wins"
    DRAW = "draw"

    @property
    def winner(self) -> Player | None:
        if self is Status.FIRST_WINS:
            return Player.FIRST
        if self is Status.SECOND_WINS:
            return Player.SECOND
        return None

    @property
    def is_terminal(self) -> bool:
        return self is not Status.ONGOING

    @classmethod
    def won_by(cls, player: Player) -> "Status":
        return cls.FIRST_WINS if player is Player.FIRST else cls.SECOND_WINS


class SpecError(ValueError):
    """Raised when a game specification fails validation."""

    def __init__(self, errors: list[str]):
        super().__init__("; ".join(errors))
        self.errors = errors


class IllegalMove(ValueError):
    pass


@dataclass(frozen=True)
class BoardGeometry:
    """Finite ``rows x cols`` board, or an unbounded grid when ``rows`` is None."""

    rows: int | None = None
    cols: int | None = None

    @classmethod
    def finite(cls, rows: int, cols: int) -> "BoardGeometry":
        return cls(rows, cols)

    @classmethod
    def infinite(cls) -> "BoardGeometry":
        return cls(None, None)

    @property
    def is_infinite(self) -> bool:
        return self.rows is None

    @property
    def size(self) -> int | None:
        return None if self.is_infinite else self.rows * self.cols

    def contains(self, cell: Cell) -> bool:
        if self.is_infinite:
            return True
        r, c = cell
        return 0 <= r < self.rows and 0 <= c < self.cols


@dataclass(frozen=True)
class WinRule:
    target_run: int
    directions: frozenset[Direction] = ALL_DIRECTIONS
    polarity: Polarity = Polarity.COMPLETING_WINS

    def __post_init__(self):
        object.__setattr__(self, "directions", frozenset(self.directions))


@dataclass(frozen=True)
class OpeningRule:
    first: int = 1
    second: int = 1

    def placements(self, player: Player) -> int:
        return self.first if player is Player.FIRST else self.second


@dataclass(frozen=True)
class GameSpec:
    id: str
    category: str
    geometry: BoardGeometry
    first_rule: WinRule
    second_rule: WinRule
    opening: OpeningRule = field(default_factory=OpeningRule)

    def rule(self, player: Player) -> WinRule:
        return self.first_rule if player is Player.FIRST else self.second_rule

    @property
    def rules(self) -> dict[Player, WinRule]:
        return {Player.FIRST: self.first_rule, Player.SECOND: self.second_rule}

    @classmethod
    def symmetric(cls, geometry: BoardGeometry, target_run: int, *, id: str = "custom",
                  category: str = "custom", directions=ALL_DIRECTIONS,
                  polarity: Polarity = Polarity.COMPLETING_WINS,
                  opening: OpeningRule | None = None) -> "GameSpec":
        rule = WinRule(target_run, frozenset(directions), polarity)
        return cls(id, category, geometry, rule, rule, opening or OpeningRule())


@dataclass
class ValidationReport:
    errors: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors


def _rule_fits(rule: WinRule, rows: int, cols: int) -> bool:
    m = rule.target_run
    dirs = rule.directions
    return ((Direction.HORIZONTAL in dirs and m <= cols)
            or (Direction.VERTICAL in dirs and m <= rows)
            or (bool(dirs & DIAGONALS) and m <= min(rows, cols)))


def validate_spec(spec: GameSpec) -> ValidationReport:
    report = ValidationReport()
    geo = spec.geometry
    if not geo.is_infinite:
        if geo.cols is None:
            report.errors.append("board: rows given without cols")
        elif not (1 <= geo.rows <= MAX_DIM and 1 <= geo.cols <= MAX_DIM):
            report.errors.append(
                f"board: dimensions {geo.rows}x{geo.cols} outside 1..{MAX_DIM}")
    for player, rule in spec.rules.items():
        who = player.label
        if rule.target_run < 2:
            report.errors.append(f"{who}: target_run {rule.target_run} < 2")
        if not rule.directions:
            report.errors.append(f"{who}: empty direction set")
    placements = (spec.opening.first, spec.opening.second)
    for player, n in zip(Player, placements):
        if n not in (1, 2):
            report.errors.append(f"opening: {player.label} placements {n} not in {{1, 2}}")
    if placements == (2, 2):
        report.errors.append("opening: at most one player may place 2 pieces")
    if report.errors or geo.is_infinite:
        return report
    for player, rule in spec.rules.items():
        if not _rule_fits(rule, geo.rows, geo.cols):
            report.warnings.append(
                f"{player.label}: {rule.target_run} in a row cannot fit on "
                f"{geo.rows}x{geo.cols} along the allowed directions (unwinnable)")
    return report


def check_spec(spec: GameSpec) -> GameSpec:
    report = validate_spec(spec)
    if report.errors:
        raise SpecError(report.errors)
    return spec


@dataclass(frozen=True)
class GameState:
    """Immutable snapshot; ``occupancy`` must not be mutated after construction."""

    occupancy: Mapping[Cell, Player]
    to_move: Player
    placements_remaining: int
    ply_count: int
    status: Status = Status.ONGOING

    def pieces(self, player: Player) -> list[Cell]:
        return [c for c, p in self.occupancy.items() if p is player]

    def count(self, player: Player) -> int:
        return sum(1 for p in self.occupancy.values() if p is player)


def initial_state(spec: GameSpec) -> GameState:
    check_spec(spec)
    return GameState({}, Player.FIRST, spec.opening.first, 0, Status.ONGOING)


def legal_moves(state: GameState, spec: GameSpec) -> list[Cell]:
    if state.status.is_terminal:
        raise IllegalMove("game is over")
    occ = state.occupancy
    geo = spec.geometry
    if not geo.is_infinite:
        return [(r, c) for r in range(geo.rows) for c in range(geo.cols) if (r, c) not in occ]
    if not occ:
        return [(0, 0)]
    cells = set()
    for r, c in occ:
        for dr in (-1, 0, 1):
            for dc in (-1, 0, 1):
                cell = (r + dr, c + dc)
                if cell not in occ:
                    cells.add(cell)
    return sorted(cells)


def run_length(occupancy: Mapping[Cell, Player], cell: Cell, player: Player,
               direction: Direction) -> int:
    """Length of ``player``'s contiguous line through ``cell`` (counted as owned) along ``direction``."""
    dr, dc = direction.delta
    r, c = cell
    n = 1
    for sign in (1, -1):
        rr, cc = r + sign * dr, c + sign * dc
        while occupancy.get((rr, cc)) is player:
            n += 1
            rr += sign * dr
            cc += sign * dc
    return n


def longest_run(occupancy: Mapping[Cell, Player], cell: Cell, player: Player,
                directions: Iterable[Direction]) -> int:
    return max((run_length(occupancy, cell, player, d) for d in directions), default=0)


def terminal_status(occupancy: Mapping[Cell, Player], spec: GameSpec, last_move: Cell,
                    last_mover: Player) -> Status:
    rule = spec.rule(last_mover)
    if longest_run(occupancy, last_move, last_mover, rule.directions) >= rule.target_run:
        if rule.polarity is Polarity.COMPLETING_WINS:
            return Status.won_by(last_mover)
        return Status.won_by(last_mover.other)
    size = spec.geometry.size
    if size is not None and len(occupancy) >= size:
        return Status.DRAW
    return Status.ONGOING


def _in_window(occ: Mapping[Cell, Player], cell: Cell) -> bool:
    if not occ:
        return cell == (0, 0)
    r, c = cell
    return any((r + dr, c + dc) in occ for dr in (-1, 0, 1) for dc in (-1, 0, 1))


def apply_move(state: GameState, cell: Cell, spec: GameSpec) -> GameState:
    if state.status.is_terminal:
        raise IllegalMove("game is over")
    cell = (int(cell[0]), int(cell[1]))
    if not spec.geometry.contains(cell):
        raise IllegalMove(f"cell {cell} is off the board")
    if cell in state.occupancy:
        raise IllegalMove(f"cell {cell} is occupied")
    if spec.geometry.is_infinite and not _in_window(state.occupancy, cell):
        raise IllegalMove(f"cell {cell} is outside the playable neighbourhood")
    mover = state.to_move
    occ = dict(state.occupancy)
    occ[cell] = mover
    status = terminal_status(occ, spec, cell, mover)
    remaining = state.placements_remaining - 1
    to_move = mover
    if remaining == 0:
        to_move = mover.other
        has_moved = any(p is to_move for p in occ.values())
        remaining = 1 if has_moved else spec.opening.placements(to_move)
    return GameState(occ, to_move, remaining, state.ply_count + 1, status)


def replay(spec: GameSpec, moves: Iterable[Cell]) -> GameState:
    state = initial_state(spec)
    for cell in moves:
        state = apply_move(state, cell, spec)
    return state


# Canonical JSON encoding shared by every module.

def spec_to_json(spec: GameSpec) -> dict:
    geo = spec.geometry
    geometry = ({"kind": "infinite"} if geo.is_infinite
                else {"kind": "finite", "rows": geo.rows, "cols": geo.cols})

    def rule_json(rule: WinRule) -> dict:
        return {
            "target_run": rule.target_run,
            "directions": [d.label for d in Direction if d in rule.directions],
            "polarity": rule.polarity.value,
        }

    return {
        "id": spec.id,
        "category": spec.category,
        "geometry": geometry,
        "rules": {"first": rule_json(spec.first_rule), "second": rule_json(spec.second_rule)},
        "opening": {"first_turn_placements": {"first": spec.opening.first,
                                              "second": spec.opening.second}},
    }


def spec_from_json(data: dict) -> GameSpec:
    geo = data["geometry"]
    if geo["kind"] == "infinite":
        geometry = BoardGeometry.infinite()
    elif geo["kind"] == "finite":
        geometry = BoardGeometry.finite(int(geo["rows"]), int(geo["cols"]))
    else:
        raise ValueError(f"unknown geometry kind {geo['kind']!r}")

    def rule(d: dict) -> WinRule:
        return WinRule(int(d["target_run"]),
                       frozenset(Direction.parse(x) for x in d.get("directions", [x.label for x in Direction])),
                       Polarity(d.get("polarity", Polarity.COMPLETING_WINS.value)))

    placements = data.get("opening", {}).get("first_turn_placements", {})
    return GameSpec(
        id=str(data.get("id", "custom")),
        category=str(data.get("category", "custom")),
        geometry=geometry,
        first_rule=rule(data["rules"]["first"]),
        second_rule=rule(data["rules"]["second"]),
        opening=OpeningRule(int(placements.get("first", 1)), int(placements.get("second", 1))),
    )


def state_to_json(state: GameState) -> dict:
    return {
        "occupancy": [[[r, c], p.label] for (r, c), p in sorted(state.occupancy.items())],
        "to_move": state.to_move.label,
        "placements_remaining": state.placements_remaining,
        "ply_count": state.ply_count,
        "status": state.status.value,
    }


def state_from_json(data: dict) -> GameState:
    occ = {(int(rc[0]), int(rc[1])): Player.parse(p) for rc, p in data["occupancy"]}
    return GameState(occ, Player.parse(data["to_move"]), int(data["placements_remaining"]),
                     int(data["ply_count"]), Status(data["status"]))


def effective_board_size(spec: GameSpec) -> int:
    """Cell count bounding a playout; ``m_max ** 2`` stands in on unbounded boards."""
    if spec.geometry.is_infinite:
        return max(spec.first_rule.target_run, spec.second_rule.target_run) ** 2
    return spec.geometry.size
