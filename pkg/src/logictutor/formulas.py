"""Propositional formulas: expression tree, text parser, canonical printer.

Grammar (tightest first): ¬  >  ∧  >  ∨  >  →  >  ↔, with →/↔
right-associative and ∧/∨ left-associative.  Variables are single
uppercase letters.  ASCII aliases: ^ v -> <-> ~ -
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

AND = "and"
OR = "or"
IMPLIES = "implies"
IFF = "iff"

BINARY_OPS = (AND, OR, IMPLIES, IFF)

_OP_SYMBOL = {AND: "∧", OR: "∨", IMPLIES: "→", IFF: "↔"}

# Binding strength; negation binds tighter than any binary operator.
_PRECEDENCE = {IFF: 1, IMPLIES: 2, OR: 3, AND: 4}
_NOT_PRECEDENCE = 5
_RIGHT_ASSOC = (IMPLIES, IFF)


@dataclass(frozen=True)
class Var:
    name: str

    def __post_init__(self):
        if len(self.name) != 1 or not "A" <= self.name <= "Z":
            raise ValueError(f"variable must be a single uppercase letter, got {self.name!r}")

    def __repr__(self):
        return self.name


@dataclass(frozen=True)
class Not:
    child: "Formula"

    def __repr__(self):
        return f"¬{self.child!r}"


@dataclass(frozen=True)
class Bin:
    op: str
    left: "Formula"
    right: "Formula"

    def __post_init__(self):
        if self.op not in BINARY_OPS:
            raise ValueError(f"unknown binary operator {self.op!r}")

    def __repr__(self):
        return f"({self.left!r} {_OP_SYMBOL[self.op]} {self.right!r})"


Formula = Union[Var, Not, Bin]


class FormulaSyntaxError(ValueError):
    """Raised on malformed formula text; carries the offending position."""

    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})")
        self.position = position


_TOKEN_ALIASES = [
    ("<->", "iff"),
    ("↔", "iff"),
    ("->", "implies"),
    ("→", "implies"),
    ("∧", "and"),
    ("^", "and"),
    ("∨", "or"),
    ("v", "or"),
    ("¬", "not"),
    ("~", "not"),
    ("-", "not"),
    ("(", "("),
    (")", ")"),
]


def _tokenize(text):
    tokens = []  # (kind, value, position)
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if "A" <= ch <= "Z":
            tokens.append(("var", ch, i))
            i += 1
            continue
        for literal, kind in _TOKEN_ALIASES:
            if text.startswith(literal, i):
                tokens.append((kind, literal, i))
                i += len(literal)
                break
        else:
            raise FormulaSyntaxError(f"unknown token {ch!r}", i)
    return tokens


class _Parser:
    def __init__(self, tokens, length):
        self.tokens = tokens
        self.pos = 0
        self.length = length

    def peek(self):
        if self.pos < len(self.tokens):
            return self.tokens[self.pos][0]
        return None

    def next_position(self):
        if self.pos < len(self.tokens):
            return self.tokens[self.pos][2]
        return self.length

    def advance(self):
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def expect(self, kind, what):
        if self.peek() != kind:
            raise FormulaSyntaxError(f"expected {what}", self.next_position())
        return self.advance()

    def parse(self):
        if not self.tokens:
            raise FormulaSyntaxError("empty input", 0)
        formula = self.iff()
        if self.pos < len(self.tokens):
            kind, value, position = self.tokens[self.pos]
            raise FormulaSyntaxError(f"unexpected {value!r}", position)
        return formula

    def iff(self):
        left = self.implies()
        if self.peek() == "iff":
            self.advance()
            return Bin(IFF, left, self.iff())
        return left

    def implies(self):
        left = self.disjunction()
        if self.peek() == "implies":
            self.advance()
            return Bin(IMPLIES, left, self.implies())
        return left

    def disjunction(self):
        left = self.conjunction()
        while self.peek() == "or":
            self.advance()
            left = Bin(OR, left, self.conjunction())
        return left

    def conjunction(self):
        left = self.negation()
        while self.peek() == "and":
            self.advance()
            left = Bin(AND, left, self.negation())
        return left

    def negation(self):
        if self.peek() == "not":
            self.advance()
            return Not(self.negation())
        return self.atom()

    def atom(self):
        kind = self.peek()
        if kind == "var":
            return Var(self.advance()[1])
        if kind == "(":
            _, _, open_pos = self.advance()
            inner = self.iff()
            if self.peek() != ")":
                raise FormulaSyntaxError("unbalanced parenthesis", open_pos)
            self.advance()
            return inner
        raise FormulaSyntaxError("expected a variable, '¬' or '('", self.next_position())


def parse_formula(text: str) -> Formula:
    """Parse formula text into its unique expression tree.

    Raises FormulaSyntaxError (with position) on empty input, unknown
    tokens, or unbalanced parentheses.
    """
    return _Parser(_tokenize(text), len(text)).parse()


def _precedence(f):
    if isinstance(f, Bin):
        return _PRECEDENCE[f.op]
    return _NOT_PRECEDENCE if isinstance(f, Not) else _NOT_PRECEDENCE + 1


def format_formula(f: Formula) -> str:
    """Canonical text with minimal parentheses; inverse of parse_formula."""
    if isinstance(f, Var):
        return f.name
    if isinstance(f, Not):
        child = format_formula(f.child)
        if isinstance(f.child, Bin):
            child = f"({child})"
        return f"¬{child}"
    own = _PRECEDENCE[f.op]
    left, right = format_formula(f.left), format_formula(f.right)
    # A child at equal precedence keeps its natural side of the
    # associativity; the other side must be wrapped to round-trip.
    left_min = own + 1 if f.op in _RIGHT_ASSOC else own
    right_min = own if f.op in _RIGHT_ASSOC else own + 1
    if _precedence(f.left) < left_min:
        left = f"({left})"
    if _precedence(f.right) < right_min:
        right = f"({right})"
    return f"{left} {_OP_SYMBOL[f.op]} {right}"


def variables(f: Formula) -> frozenset[str]:
    """Variable names appearing in f."""
    if isinstance(f, Var):
        return frozenset((f.name,))
    if isinstance(f, Not):
        return variables(f.child)
    return variables(f.left) | variables(f.right)
