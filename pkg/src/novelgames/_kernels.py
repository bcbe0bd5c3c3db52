"""Numba kernels for the hot loops: per-cell heuristic terms, win checks and random rollouts.

Boards are int8 windows: 0 empty, 1 first player, 2 second player. Player-indexed
arrays (direction masks, targets, polarity flags) use index ``player - 1``.
Directions are ordered horizontal, vertical, diagonal-rising, diagonal-falling.
"""

import math

import numpy as np
from numba import njit

DR = np.array([0, 1, -1, 1], dtype=np.int64)
DC = np.array([1, 0, 1, 1], dtype=np.int64)


@njit(cache=True)
def _run(board, r, c, player, k):
    rows, cols = board.shape
    dr = DR[k]
    dc = DC[k]
    n = 1
    rr, cc = r + dr, c + dc
    while 0 <= rr < rows and 0 <= cc < cols and board[rr, cc] == player:
        n += 1
        rr += dr
        cc += dc
    rr, cc = r - dr, c - dc
    while 0 <= rr < rows and 0 <= cc < cols and board[rr, cc] == player:
        n += 1
        rr -= dr
        cc -= dc
    return n


@njit(cache=True)
def longest_run(board, r, c, player, dirmask):
    best = 0
    for k in range(4):
        if dirmask[k]:
            n = _run(board, r, c, player, k)
            if n > best:
                best = n
    return best


@njit(cache=True)
def is_win(board, r, c, player, dirmask, target):
    return longest_run(board, r, c, player, dirmask) >= target


@njit(cache=True)
def _is_legal(board, r, c, infinite):
    if board[r, c] != 0:
        return False
    if not infinite:
        return True
    rows, cols = board.shape
    for dr in range(-1, 2):
        for dc in range(-1, 2):
            rr = r + dr
            cc = c + dc
            if 0 <= rr < rows and 0 <= cc < cols and board[rr, cc] != 0:
                return True
    return False


@njit(cache=True)
def legal_cells(board, infinite):
    rows, cols = board.shape
    out = np.empty((rows * cols, 2), dtype=np.int64)
    n = 0
    for r in range(rows):
        for c in range(cols):
            if _is_legal(board, r, c, infinite):
                out[n, 0] = r
                out[n, 1] = c
                n += 1
    return out[:n]


@njit(cache=True)
def _progress(board, r, c, mover, dirmask, target, loses):
    run = longest_run(board, r, c, mover, dirmask[mover - 1])
    m = target[mover - 1]
    if run >= m:
        return -(m + 1.0) if loses[mover - 1] else m + 1.0
    return 0.0 if loses[mover - 1] else float(run)


@njit(cache=True)
def _blocking(board, r, c, opp, dirmask, target, loses, discount):
    if loses[opp - 1]:
        return 0.0
    run = longest_run(board, r, c, opp, dirmask[opp - 1])
    m = target[opp - 1]
    if run >= m:
        return float(m)
    return run - discount


@njit(cache=True)
def _distances(board, cells, infinite, center_r, center_c, maxdist):
    n = cells.shape[0]
    d = np.zeros(n)
    if infinite:
        rows, cols = board.shape
        sr = 0.0
        sc = 0.0
        cnt = 0
        for r in range(rows):
            for c in range(cols):
                if board[r, c] != 0:
                    sr += r
                    sc += c
                    cnt += 1
        if cnt == 0:
            return d
        center_r = sr / cnt
        center_c = sc / cnt
        maxdist = 0.0
    for i in range(n):
        d[i] = math.sqrt((cells[i, 0] - center_r) ** 2 + (cells[i, 1] - center_c) ** 2)
        if infinite and d[i] > maxdist:
            maxdist = d[i]
    if maxdist > 0.0:
        for i in range(n):
            d[i] = d[i] / maxdist
    else:
        d[:] = 0.0
    return d


@njit(cache=True)
def utility_terms(board, mover, infinite, dirmask, target, loses, discount,
                  center_r, center_c, maxdist):
    """Legal cells (row-major) with their distance, progress and blocking terms."""
    cells = legal_cells(board, infinite)
    n = cells.shape[0]
    d = _distances(board, cells, infinite, center_r, center_c, maxdist)
    n1 = np.empty(n)
    n2 = np.empty(n)
    opp = 3 - mover
    for i in range(n):
        r = cells[i, 0]
        c = cells[i, 1]
        n1[i] = _progress(board, r, c, mover, dirmask, target, loses)
        n2[i] = _blocking(board, r, c, opp, dirmask, target, loses, discount)
    return cells, d, n1, n2


@njit(cache=True)
def best_exponent(board, mover, infinite, dirmask, target, loses, discount,
                  center_r, center_c, maxdist):
    cells, d, n1, n2 = utility_terms(board, mover, infinite, dirmask, target, loses,
                                     discount, center_r, center_c, maxdist)
    best = -np.inf
    for i in range(cells.shape[0]):
        e = (1.0 - d[i]) + n1[i] + n2[i]
        if e > best:
            best = e
    return best


@njit(cache=True)
def _next_turn(to_move, remaining, moved, first_turn):
    remaining -= 1
    if remaining == 0:
        to_move = 3 - to_move
        remaining = 1 if moved[to_move - 1] else first_turn[to_move - 1]
    return to_move, remaining


@njit(cache=True)
def _playout(board, to_move, remaining, moved, first_turn, dirmask, target, loses,
             infinite, occupied, ply, cap, uniforms, bbox, trail, buf):
    """Uniform-random playout; placed cells are written to ``trail``.

    Returns (status, placed) with status 1/2 for a first/second win and 3 for a
    draw (board full or ``cap`` total plies reached).
    """
    rows, cols = board.shape
    size = rows * cols
    m0 = moved[0]
    m1 = moved[1]
    rmin, rmax, cmin, cmax = bbox[0], bbox[1], bbox[2], bbox[3]
    placed = 0
    while ply < cap:
        if not infinite and occupied >= size:
            return 3, placed
        n = 0
        if infinite:
            for r in range(max(rmin - 1, 0), min(rmax + 2, rows)):
                for c in range(max(cmin - 1, 0), min(cmax + 2, cols)):
                    if _is_legal(board, r, c, True):
                        buf[n, 0] = r
                        buf[n, 1] = c
                        n += 1
        else:
            for r in range(rows):
                for c in range(cols):
                    if board[r, c] == 0:
                        buf[n, 0] = r
                        buf[n, 1] = c
                        n += 1
        if n == 0:
            return 3, placed
        j = min(int(uniforms[placed] * n), n - 1)
        r = buf[j, 0]
        c = buf[j, 1]
        board[r, c] = to_move
        trail[placed, 0] = r
        trail[placed, 1] = c
        placed += 1
        occupied += 1
        ply += 1
        rmin = min(rmin, r)
        rmax = max(rmax, r)
        cmin = min(cmin, c)
        cmax = max(cmax, c)
        if is_win(board, r, c, to_move, dirmask[to_move - 1], target[to_move - 1]):
            if loses[to_move - 1]:
                return 3 - to_move, placed
            return to_move, placed
        if to_move == 1:
            m0 = True
        else:
            m1 = True
        remaining -= 1
        if remaining == 0:
            to_move = 3 - to_move
            done = m0 if to_move == 1 else m1
            remaining = 1 if done else first_turn[to_move - 1]
    return 3, placed


@njit(cache=True)
def _payoff(status, mover):
    if status == 3:
        return 0.0
    return 1.0 if status == mover else -1.0


@njit(cache=True)
def mcs_values(board, cands, to_move, remaining, moved, first_turn, dirmask, target,
               loses, infinite, occupied, ply, cap, uniforms, bbox):
    """Mean payoff to ``to_move`` of each candidate under random-vs-random rollouts.

    ``uniforms`` has shape (candidates, rollouts, steps). ``board`` is restored on exit.
    """
    rows, cols = board.shape
    n = cands.shape[0]
    k = uniforms.shape[1]
    out = np.zeros(n)
    trail = np.empty((rows * cols, 2), dtype=np.int64)
    buf = np.empty((rows * cols, 2), dtype=np.int64)
    child_bbox = np.empty(4, dtype=np.int64)
    child_moved = moved.copy()
    child_moved[to_move - 1] = True
    for i in range(n):
        r = cands[i, 0]
        c = cands[i, 1]
        board[r, c] = to_move
        status = 0
        if is_win(board, r, c, to_move, dirmask[to_move - 1], target[to_move - 1]):
            status = 3 - to_move if loses[to_move - 1] else to_move
        elif ply + 1 >= cap or (not infinite and occupied + 1 >= rows * cols):
            status = 3
        if status != 0:
            out[i] = _payoff(status, to_move)
            board[r, c] = 0
            continue
        nt, nrem = _next_turn(to_move, remaining, child_moved, first_turn)
        child_bbox[0] = min(bbox[0], r)
        child_bbox[1] = max(bbox[1], r)
        child_bbox[2] = min(bbox[2], c)
        child_bbox[3] = max(bbox[3], c)
        total = 0.0
        for j in range(k):
            st, placed = _playout(board, nt, nrem, child_moved, first_turn, dirmask, target,
                                  loses, infinite, occupied + 1, ply + 1, cap, uniforms[i, j],
                                  child_bbox, trail, buf)
            for q in range(placed):
                board[trail[q, 0], trail[q, 1]] = 0
            total += _payoff(st, to_move)
        out[i] = total / k
        board[r, c] = 0
    return out
