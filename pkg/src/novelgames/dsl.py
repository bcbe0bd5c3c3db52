"""A small line-oriented language for game rules.

    board 5x5; win first=4 second=3
    directions first = horizontal, vertical   # no diagonal wins for the first player
    polarity = loses
    opening second = 2

Statements end at a newline or ``;``; ``#`` starts a comment. Only ``board`` and
``win`` are required; everything else defaults to all directions, completing
wins, and one placement per opening turn.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .core import (
    ALL_DIRECTIONS,
    DIAGONALS,
    BoardGeometry,
    Direction,
    GameSpec,
    OpeningRule,
    Polarity,
    WinRule,
)

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<comment>\#[^\n]*)
  | (?P<newline>\n)
  | (?P<dims>\d+x\d+\b)
  | (?P<number>\d+(?![A-Za-z_]))
  | (?P<word>[A-Za-z_][A-Za-z0-9_-]*)
  | (?P<punct>[=,:;])
""", re.VERBOSE)

_DIRECTION_WORDS = {
    "horizontal": frozenset({Direction.HORIZONTAL}),
    "vertical": frozenset({Direction.VERTICAL}),
    "diagonal": DIAGONALS,
}
_WHO = ("first", "second", "both")
_KEYWORDS = ("board", "win", "directions", "polarity", "opening")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


@dataclass(frozen=True)
class DslError:
    line: int
    col: int
    message: str

    def __str__(self):
        return f"{self.line}:{self.col}: {self.message}"


class DslSyntaxError(ValueError):
    def __init__(self, errors: list[DslError]):
        super().__init__("\n".join(str(e) for e in errors))
        self.errors = errors


def tokenize(text: str) -> tuple[list[Token], list[DslError]]:
    tokens, errors = [], []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            errors.append(DslError(line, col, f"unexpected character {text[pos]!r}"))
            pos += 1
            continue
        kind = m.lastgroup
        if kind == "newline":
            tokens.append(Token("sep", "\n", line, col))
            line += 1
            line_start = m.end()
        elif kind == "punct":
            tokens.append(Token("sep" if m.group() == ";" else m.group(), m.group(), line, col))
        elif kind not in ("ws", "comment"):
            tokens.append(Token(kind, m.group(), line, col))
        pos = m.end()
    return tokens, errors


def _statements(tokens: list[Token]) -> list[list[Token]]:
    out, cur = [], []
    for tok in tokens:
        if tok.kind == "sep":
            if cur:
                out.append(cur)
            cur = []
        else:
            cur.append(tok)
    if cur:
        out.append(cur)
    return out


class _Fail(Exception):
    def __init__(self, tok: Token | None, message: str):
        self.tok = tok
        self.message = message


class _Cursor:
    def __init__(self, toks: list[Token]):
        self.toks = toks
        self.i = 0

    def peek(self) -> Token | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def next(self, what: str) -> Token:
        tok = self.peek()
        if tok is None:
            last = self.toks[-1]
            raise _Fail(Token("eol", "", last.line, last.col + len(last.text)), f"expected {what}")
        self.i += 1
        return tok

    def expect(self, kind: str, what: str) -> Token:
        tok = self.next(what)
        if tok.kind != kind:
            raise _Fail(tok, f"expected {what}, got {tok.text!r}")
        return tok

    def word(self, choices, what: str) -> Token:
        tok = self.next(what)
        if tok.kind != "word" or tok.text not in choices:
            raise _Fail(tok, f"expected {what}, got {tok.text!r}")
        return tok

    def end(self):
        tok = self.peek()
        if tok is not None:
            raise _Fail(tok, f"unexpected {tok.text!r}")


def _who(cur: _Cursor, allow_both: bool = True) -> tuple[str, ...]:
    tok = cur.peek()
    choices = _WHO if allow_both else _WHO[:2]
    if tok is not None and tok.kind == "word" and tok.text in choices:
        cur.i += 1
        return ("first", "second") if tok.text == "both" else (tok.text,)
    if not allow_both:
        raise _Fail(tok or cur.toks[-1], "expected first or second")
    return ("first", "second")


def _target(tok: Token) -> int:
    m = int(tok.text)
    if m < 2:
        raise _Fail(tok, f"target run {m} must be at least 2")
    return m


def parse_spec(text: str, game_id: str = "custom", category: str = "custom") -> GameSpec:
    """Parse DSL text; raises DslSyntaxError listing every positioned error."""
    tokens, errors = tokenize(text)
    geometry = None
    targets: dict[str, int] = {}
    directions: dict[str, frozenset] = {}
    polarity: dict[str, Polarity] = {}
    opening: dict[str, int] = {}
    seen: dict[str, Token] = {}

    def claim(key: str, tok: Token):
        if key in seen:
            prev = seen[key]
            raise _Fail(tok, f"duplicate {key} clause (first given at {prev.line}:{prev.col})")
        seen[key] = tok

    for stmt in _statements(tokens):
        cur = _Cursor(stmt)
        head = stmt[0]
        try:
            if head.kind != "word" or head.text not in _KEYWORDS:
                raise _Fail(head, f"unknown keyword {head.text!r}")
            cur.i = 1
            if head.text == "board":
                claim("board", head)
                tok = cur.next("board size")
                if tok.kind == "dims":
                    rows, cols = (int(x) for x in tok.text.split("x"))
                    geometry = BoardGeometry.finite(rows, cols)
                elif tok.kind == "word" and tok.text == "infinite":
                    geometry = BoardGeometry.infinite()
                else:
                    raise _Fail(tok, f"expected <rows>x<cols> or 'infinite', got {tok.text!r}")
            elif head.text == "win":
                claim("win", head)
                tok = cur.peek()
                if tok is not None and tok.kind == "number":
                    m = _target(cur.next("number"))
                    targets = {"first": m, "second": m}
                else:
                    got = {}
                    while cur.peek() is not None:
                        who = cur.word(("first", "second"), "first or second")
                        if who.text in got:
                            raise _Fail(who, f"duplicate target for {who.text}")
                        cur.expect("=", "'='")
                        got[who.text] = _target(cur.expect("number", "an integer"))
                        nxt = cur.peek()
                        if nxt is not None and nxt.kind == ",":
                            cur.i += 1
                    missing = [w for w in ("first", "second") if w not in got]
                    if missing:
                        raise _Fail(head, f"win clause is missing {' and '.join(missing)}")
                    targets = got
            elif head.text == "directions":
                players = _who(cur)
                for p in players:
                    claim(f"directions {p}", head)
                cur.expect("=", "'='")
                dirs = set()
                while True:
                    tok = cur.next("a direction")
                    if tok.kind != "word" or tok.text not in _DIRECTION_WORDS:
                        raise _Fail(tok, f"expected horizontal, vertical or diagonal, got {tok.text!r}")
                    dirs |= _DIRECTION_WORDS[tok.text]
                    nxt = cur.peek()
                    if nxt is None:
                        break
                    cur.expect(",", "','")
                for p in players:
                    directions[p] = frozenset(dirs)
            elif head.text == "polarity":
                players = _who(cur)
                cur.expect("=", "'='")
                tok = cur.next("wins or loses")
                if tok.kind == "word" and tok.text in ("first", "second") and players == ("first", "second"):
                    players = (tok.text,)
                    cur.expect(":", "':'")
                    tok = cur.next("wins or loses")
                if tok.kind != "word" or tok.text not in ("wins", "loses"):
                    raise _Fail(tok, f"expected wins or loses, got {tok.text!r}")
                for p in players:
                    claim(f"polarity {p}", head)
                    polarity[p] = Polarity.COMPLETING_WINS if tok.text == "wins" else Polarity.COMPLETING_LOSES
            else:
                (p,) = _who(cur, allow_both=False)
                claim(f"opening {p}", head)
                cur.expect("=", "'='")
                tok = cur.expect("number", "an integer")
                if int(tok.text) not in (1, 2):
                    raise _Fail(tok, f"opening placements must be 1 or 2, got {tok.text}")
                opening[p] = int(tok.text)
            cur.end()
        except _Fail as fail:
            errors.append(DslError(fail.tok.line, fail.tok.col, fail.message))

    if not errors:
        for key in ("board", "win"):
            if key not in seen:
                errors.append(DslError(1, 1, f"missing {key} clause"))
    if errors:
        raise DslSyntaxError(sorted(errors, key=lambda e: (e.line, e.col)))

    def rule(p: str) -> WinRule:
        return WinRule(targets[p], directions.get(p, ALL_DIRECTIONS),
                       polarity.get(p, Polarity.COMPLETING_WINS))

    return GameSpec(game_id, category, geometry, rule("first"), rule("second"),
                    OpeningRule(opening.get("first", 1), opening.get("second", 1)))


def _direction_words(dirs: frozenset) -> str:
    if dirs & DIAGONALS and not DIAGONALS <= dirs:
        raise ValueError("a single diagonal direction cannot be written in the DSL")
    words = [w for w, ds in _DIRECTION_WORDS.items() if ds <= dirs]
    return ", ".join(words)


def print_spec(spec: GameSpec) -> str:
    """Canonical DSL text; clauses equal to their defaults are omitted."""
    geo = spec.geometry
    parts = ["board infinite" if geo.is_infinite else f"board {geo.rows}x{geo.cols}"]
    f, s = spec.first_rule, spec.second_rule
    if f.target_run == s.target_run:
        parts.append(f"win {f.target_run}")
    else:
        parts.append(f"win first={f.target_run} second={s.target_run}")
    if f.directions == s.directions:
        if f.directions != ALL_DIRECTIONS:
            parts.append(f"directions = {_direction_words(f.directions)}")
    else:
        for who, r in (("first", f), ("second", s)):
            if r.directions != ALL_DIRECTIONS:
                parts.append(f"directions {who} = {_direction_words(r.directions)}")
    word = {Polarity.COMPLETING_WINS: "wins", Polarity.COMPLETING_LOSES: "loses"}
    if f.polarity == s.polarity:
        if f.polarity is not Polarity.COMPLETING_WINS:
            parts.append(f"polarity = {word[f.polarity]}")
    else:
        for who, r in (("first", f), ("second", s)):
            if r.polarity is not Polarity.COMPLETING_WINS:
                parts.append(f"polarity {who} = {word[r.polarity]}")
    for who, n in (("first", spec.opening.first), ("second", spec.opening.second)):
        if n != 1:
            parts.append(f"opening {who} = {n}")
    return "; ".join(parts)
