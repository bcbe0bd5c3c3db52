"""Independent reference computations used to freeze expected values.

Nothing here imports the engine: boards are plain tuples and bitmasks.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

TTT_LINES = [
    (0, 1, 2), (3, 4, 5), (6, 7, 8),
    (0, 3, 6), (1, 4, 7), (2, 5, 8),
    (0, 4, 8), (2, 4, 6),
]


def _ttt_winner(board) -> int:
    for a, b, c in TTT_LINES:
        if board[a] and board[a] == board[b] == board[c]:
            return board[a]
    return 0


def enumerate_tictactoe() -> tuple[int, int, int, int]:
    """(completed games, first wins, second wins, draws) over every legal move sequence."""
    counts = [0, 0, 0]

    def rec(board, player):
        w = _ttt_winner(board)
        if w:
            counts[w - 1] += 1
            return
        if all(board):
            counts[2] += 1
            return
        for i in range(9):
            if not board[i]:
                board[i] = player
                rec(board, 3 - player)
                board[i] = 0

    rec([0] * 9, 1)
    return sum(counts), counts[0], counts[1], counts[2]


def weighted_tictactoe_payoff() -> Fraction:
    """Expected random-play payoff: each completed sequence weighted by 1/(9*8*...)."""
    total = Fraction(0)

    def rec(board, player, weight):
        nonlocal total
        w = _ttt_winner(board)
        if w:
            total += weight if w == 1 else -weight
            return
        empty = [i for i in range(9) if not board[i]]
        for i in empty:
            board[i] = player
            rec(board, 3 - player, weight / len(empty))
            board[i] = 0

    rec([0] * 9, 1, Fraction(1))
    return total


@lru_cache(maxsize=None)
def _random_play(board: tuple, player: int) -> tuple[Fraction, Fraction, Fraction]:
    w = _ttt_winner(board)
    if w == 1:
        return Fraction(1), Fraction(0), Fraction(0)
    if w == 2:
        return Fraction(0), Fraction(1), Fraction(0)
    empty = [i for i in range(9) if not board[i]]
    if not empty:
        return Fraction(0), Fraction(0), Fraction(1)
    total = [Fraction(0)] * 3
    for i in empty:
        child = board[:i] + (player,) + board[i + 1:]
        for j, p in enumerate(_random_play(child, 3 - player)):
            total[j] += p / len(empty)
    return tuple(total)


def random_tictactoe_outcomes(board=(0,) * 9, player=1):
    """Exact (P first wins, P second wins, P draw) under uniform-random play."""
    return _random_play(tuple(board), player)


def softmax(values, temperature=1.0):
    w = [math.exp(v / temperature) for v in values]
    s = sum(w)
    return [x / s for x in w]


def naive_run(occupied: set, cell, delta) -> int:
    """Contiguous count through ``cell`` (treated as owned) along +/-delta."""
    n = 1
    for sign in (1, -1):
        r, c = cell
        while True:
            r += sign * delta[0]
            c += sign * delta[1]
            if (r, c) not in occupied:
                break
            n += 1
    return n
