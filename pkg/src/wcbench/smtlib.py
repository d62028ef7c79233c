"""Parsing, representation and canonical printing of the SMT-LIB constraint fragment.

The fragment covers quantifier-free integer comparisons over input
variables ``in0, in1, ...``: ``assert``, ``and``/``or``/``not``, the five
comparators ``<= < >= > =`` and the arithmetic operators ``+ - *`` with
integer literals.  The literal string ``None`` denotes the vacuously true
constraint (the placeholder used for input size 1).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import reduce
from typing import Iterator, Mapping, Union


class ParseError(ValueError):
    """Base class for parse failures; carries the byte offset of the fault."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class UnbalancedParens(ParseError):
    pass


class UnknownOperator(ParseError):
    pass


class MalformedVariable(ParseError):
    pass


class MultipleAsserts(ParseError):
    pass


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Variable:
    name: str


@dataclass(frozen=True)
class IntConst:
    value: int


@dataclass(frozen=True)
class Add:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Sub:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Mul:
    left: "Term"
    right: "Term"


Term = Union[Variable, IntConst, Add, Sub, Mul]

COMPARATORS = ("<=", "<", ">=", ">", "=")


@dataclass(frozen=True)
class Atom:
    op: str  # one of COMPARATORS
    lhs: Term
    rhs: Term

    def __post_init__(self):
        if self.op not in COMPARATORS:
            raise ValueError(f"bad comparator {self.op!r}")


@dataclass(frozen=True)
class TrueFormula:
    """The vacuous constraint; rendered as the literal ``None``."""


@dataclass(frozen=True)
class AtomNode:
    atom: Atom


@dataclass(frozen=True)
class And:
    children: tuple  # of Formula, length >= 2

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if len(self.children) < 2:
            raise ValueError("And requires >= 2 children")


@dataclass(frozen=True)
class Or:
    children: tuple

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if len(self.children) < 2:
            raise ValueError("Or requires >= 2 children")


@dataclass(frozen=True)
class Not:
    child: "Formula"


Formula = Union[TrueFormula, AtomNode, And, Or, Not]

TRUE = TrueFormula()

_VAR_RE = re.compile(r"in(?:0|[1-9][0-9]*)\Z")
_INT_RE = re.compile(r"-?[0-9]+\Z")
_ARITH_OPS = {"+": Add, "-": Sub, "*": Mul}


def is_valid_var(name: str) -> bool:
    return _VAR_RE.match(name) is not None


def var(i: int) -> Variable:
    return Variable(f"in{i}")


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

def _tokenize(text: str) -> Iterator[tuple[str, int]]:
    for m in re.finditer(r"[()]|[^\s()]+", text):
        yield m.group(0), m.start()


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = list(_tokenize(text))
        self.pos = 0

    def peek(self):
        if self.pos < len(self.tokens):
            return self.tokens[self.pos]
        return None, len(self.text)

    def next(self) -> tuple[str, int]:
        tok, off = self.peek()
        if tok is None:
            raise UnbalancedParens("unexpected end of input", off)
        self.pos += 1
        return tok, off

    def parse_sexpr(self):
        """Returns a nested list-of-(token, offset) structure."""
        tok, off = self.next()
        if tok == "(":
            items = []
            while True:
                nxt, noff = self.peek()
                if nxt is None:
                    raise UnbalancedParens("missing closing parenthesis", noff)
                if nxt == ")":
                    self.pos += 1
                    return items, off
                items.append(self.parse_sexpr())
        if tok == ")":
            raise UnbalancedParens("unmatched closing parenthesis", off)
        return tok, off


def _parse_term(node) -> Term:
    expr, off = node
    if isinstance(expr, list):
        if not expr:
            raise UnknownOperator("empty term", off)
        head, hoff = expr[0]
        if isinstance(head, list):
            raise UnknownOperator("operator position holds a subexpression", hoff)
        if head in _ARITH_OPS:
            if len(expr) != 3:
                raise UnknownOperator(f"operator {head!r} takes two operands", hoff)
            return _ARITH_OPS[head](_parse_term(expr[1]), _parse_term(expr[2]))
        raise UnknownOperator(f"unknown term operator {head!r}", hoff)
    if _INT_RE.match(expr):
        return IntConst(int(expr))
    if expr.startswith("in"):
        if not is_valid_var(expr):
            raise MalformedVariable(f"malformed variable {expr!r}", off)
        return Variable(expr)
    raise MalformedVariable(f"expected variable or integer, got {expr!r}", off)


def _parse_formula(node) -> Formula:
    expr, off = node
    if not isinstance(expr, list):
        raise UnknownOperator(f"expected a formula, got atom token {expr!r}", off)
    if not expr:
        raise UnknownOperator("empty expression", off)
    head, hoff = expr[0]
    if isinstance(head, list):
        raise UnknownOperator("operator position holds a subexpression", hoff)
    if head in ("and", "or"):
        if len(expr) < 3:
            raise UnknownOperator(f"{head!r} requires at least two operands", hoff)
        children = tuple(_parse_formula(c) for c in expr[1:])
        return And(children) if head == "and" else Or(children)
    if head == "not":
        if len(expr) != 2:
            raise UnknownOperator("'not' takes exactly one operand", hoff)
        return Not(_parse_formula(expr[1]))
    if head in COMPARATORS:
        if len(expr) != 3:
            raise UnknownOperator(f"comparator {head!r} takes two operands", hoff)
        return AtomNode(Atom(head, _parse_term(expr[1]), _parse_term(expr[2])))
    if head == "assert":
        raise MultipleAsserts("nested 'assert' is not allowed", hoff)
    raise UnknownOperator(f"unknown operator {head!r}", hoff)


def parse_formula(text: str) -> Formula:
    """Parse a single ``(assert ...)`` expression (or the literal ``None``).

    Whitespace between tokens is ignored entirely.  Raises a ParseError
    subclass carrying the byte offset of the offending token.
    """
    if text.strip().lower() == "none":
        return TRUE
    parser = _Parser(text)
    tok, off = parser.peek()
    if tok is None:
        raise UnbalancedParens("empty input", off)
    expr, off = parser.parse_sexpr()
    trailing, toff = parser.peek()
    if trailing is not None:
        if trailing == "(":
            # most likely a second (assert ...) form
            raise MultipleAsserts("more than one top-level expression", toff)
        raise UnbalancedParens(f"unexpected trailing token {trailing!r}", toff)
    if not isinstance(expr, list) or not expr:
        raise UnknownOperator("expected an (assert ...) expression", off)
    head, hoff = expr[0]
    if head != "assert":
        raise UnknownOperator(f"expected 'assert' at top level, got {head!r}", hoff)
    if len(expr) != 2:
        if len(expr) > 2 and isinstance(expr[1][0], list):
            raise MultipleAsserts("'assert' with multiple bodies", hoff)
        raise UnknownOperator("'assert' takes exactly one body", hoff)
    return _parse_formula(expr[1])


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------

def _term_str(t: Term) -> str:
    if isinstance(t, Variable):
        return t.name
    if isinstance(t, IntConst):
        return str(t.value)
    op = {Add: "+", Sub: "-", Mul: "*"}[type(t)]
    return f"({op} {_term_str(t.left)} {_term_str(t.right)})"


def _body_str(f: Formula) -> str:
    if isinstance(f, TrueFormula):
        raise ValueError("the vacuous constraint has no body form")
    if isinstance(f, AtomNode):
        a = f.atom
        return f"({a.op} {_term_str(a.lhs)} {_term_str(a.rhs)})"
    if isinstance(f, Not):
        return f"(not {_body_str(f.child)})"
    op = "and" if isinstance(f, And) else "or"
    return reduce(lambda acc, s: f"({op} {acc} {s})",
                  [_body_str(c) for c in f.children])


def serialize_canonical(f: Formula) -> str:
    """Single-spaced ``(assert ...)`` text; n-ary And/Or print left-folded.

    The vacuous constraint serializes to the literal ``None``.
    """
    if isinstance(f, TrueFormula):
        return "None"
    return f"(assert {_body_str(f)})"


def fold_binary(f: Formula) -> Formula:
    """Normalize n-ary And/Or nodes into left-folded binary nesting."""
    if isinstance(f, (And, Or)):
        ctor = type(f)
        kids = [fold_binary(c) for c in f.children]
        return reduce(lambda acc, c: ctor((acc, c)), kids)
    if isinstance(f, Not):
        return Not(fold_binary(f.child))
    return f


# ---------------------------------------------------------------------------
# Structural helpers
# ---------------------------------------------------------------------------

def flatten_conjunction(f: Formula) -> list[Formula]:
    """Leaf list of nested And nodes, left-to-right; True flattens to []."""
    if isinstance(f, TrueFormula):
        return []
    if isinstance(f, And):
        out: list[Formula] = []
        for c in f.children:
            out.extend(flatten_conjunction(c))
        return out
    return [f]


def _term_vars(t: Term, acc: set):
    if isinstance(t, Variable):
        acc.add(t.name)
    elif isinstance(t, (Add, Sub, Mul)):
        _term_vars(t.left, acc)
        _term_vars(t.right, acc)


def free_vars(f: Formula) -> set[str]:
    acc: set[str] = set()
    stack = [f]
    while stack:
        node = stack.pop()
        if isinstance(node, AtomNode):
            _term_vars(node.atom.lhs, acc)
            _term_vars(node.atom.rhs, acc)
        elif isinstance(node, (And, Or)):
            stack.extend(node.children)
        elif isinstance(node, Not):
            stack.append(node.child)
    return acc


def conjoin(parts: list[Formula]) -> Formula:
    """Conjunction of a leaf list: [] -> True, [x] -> x, else And."""
    if not parts:
        return TRUE
    if len(parts) == 1:
        return parts[0]
    return And(tuple(parts))


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def eval_term(t: Term, env: Mapping[str, int]) -> int:
    if isinstance(t, Variable):
        return env[t.name]
    if isinstance(t, IntConst):
        return t.value
    l, r = eval_term(t.left, env), eval_term(t.right, env)
    if isinstance(t, Add):
        return l + r
    if isinstance(t, Sub):
        return l - r
    return l * r


_CMP = {
    "<=": lambda a, b: a <= b,
    "<": lambda a, b: a < b,
    ">=": lambda a, b: a >= b,
    ">": lambda a, b: a > b,
    "=": lambda a, b: a == b,
}


def eval_formula(f: Formula, env: Mapping[str, int]) -> bool:
    """Evaluate under a total assignment (missing variables raise KeyError)."""
    if isinstance(f, TrueFormula):
        return True
    if isinstance(f, AtomNode):
        a = f.atom
        return _CMP[a.op](eval_term(a.lhs, env), eval_term(a.rhs, env))
    if isinstance(f, And):
        return all(eval_formula(c, env) for c in f.children)
    if isinstance(f, Or):
        return any(eval_formula(c, env) for c in f.children)
    return not eval_formula(f.child, env)
