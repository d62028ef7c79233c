"""Difference-logic decision procedure and a finite-domain brute-force oracle.

Conjunctions of atoms of the form ``x - y <= c`` (with a distinguished ZERO
node for variable-vs-constant atoms) are decided by negative-cycle detection
over the constraint graph.  Anything outside that fragment is reported as
Unsupported rather than guessed at.
"""

from __future__ import annotations


from dataclasses import dataclass
from typing import Iterable, Optional, Union

from .smtlib import (
    Atom,
    AtomNode,
    Formula,
    IntConst,
    Term,
    Variable,
    eval_formula,
    free_vars,
)

ZERO = "ZERO"  # distinguished node pinned to value 0

BRUTE_FORCE_GUARD = 10**7


class DomainTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class DiffConstraint:
    """x - y <= c over integer-valued nodes (variables or ZERO)."""

    x: str
    y: str
    c: int


@dataclass(frozen=True)
class Feasible:
    model: dict  # variable -> int, ZERO excluded


@dataclass(frozen=True)
class Infeasible:
    cycle: tuple  # DiffConstraints whose constants sum to a negative number


@dataclass(frozen=True)
class Unsupported:
    reason: str


FeasibilityResult = Union[Feasible, Infeasible, Unsupported]


# ---------------------------------------------------------------------------
# Atom normalization
# ---------------------------------------------------------------------------

def _as_node(t: Term) -> Optional[tuple[str, int]]:
    """Map a term to (node, offset): variable -> (name, 0), const -> (ZERO, value)."""
    if isinstance(t, Variable):
        return t.name, 0
    if isinstance(t, IntConst):
        return ZERO, t.value
    return None


def normalize_atom(atom: Atom) -> Union[list[DiffConstraint], Unsupported]:
    """Normalize one comparison atom into <= constraints, or Unsupported.

    Supported shapes: var/const vs var/const.  Arithmetic inside terms
    (including var + var) leaves the difference-logic fragment.
    """
    lhs, rhs = _as_node(atom.lhs), _as_node(atom.rhs)
    if lhs is None or rhs is None:
        return Unsupported("atom contains arithmetic outside difference logic")
    (lx, lc), (rx, rc) = lhs, rhs
    # lhs OP rhs  with lhs = lx + lc, rhs = rx + rc
    # lx - rx <= k  where k absorbs the constant offsets
    def le(x, y, k):
        return DiffConstraint(x, y, k)

    base = rc - lc
    if atom.op == "<=":
        return [le(lx, rx, base)]
    if atom.op == "<":
        return [le(lx, rx, base - 1)]
    if atom.op == ">=":
        return [le(rx, lx, -base)]
    if atom.op == ">":
        return [le(rx, lx, -base - 1)]
    # equality: two opposing <=
    return [le(lx, rx, base), le(rx, lx, -base)]


def normalize_atoms(atoms: Iterable[Atom]) -> Union[list[DiffConstraint], Unsupported]:
    out: list[DiffConstraint] = []
    for atom in atoms:
        res = normalize_atom(atom)
        if isinstance(res, Unsupported):
            return res
        out.extend(res)
    return out


def formula_to_constraints(f: Formula) -> Union[list[DiffConstraint], Unsupported]:
    """Conjunctive formula -> difference constraints; Unsupported otherwise."""
    from .smtlib import flatten_conjunction

    atoms = []
    for leaf in flatten_conjunction(f):
        if not isinstance(leaf, AtomNode):
            return Unsupported("non-atomic conjunct (or/not) outside the fragment")
        atoms.append(leaf.atom)
    return normalize_atoms(atoms)


# ---------------------------------------------------------------------------
# Feasibility via negative-cycle detection
# ---------------------------------------------------------------------------

def check_feasible(cs: list[DiffConstraint]) -> FeasibilityResult:
    """Bellman-Ford over the constraint graph (edge y -> x, weight c).

    Infeasible iff a negative cycle exists; the witness cycle is returned as
    the list of constraints along it.  Otherwise an integer model anchored at
    ZERO = 0 is extracted from the shortest-path distances.
    """
    for con in cs:
        if con.x == con.y:
            if con.c < 0:
                return Infeasible((con,))
            # x - x <= c with c >= 0 is vacuous
    edges = [(con.y, con.x, con.c, con) for con in cs if con.x != con.y]
    nodes = {ZERO}
    for con in cs:
        nodes.add(con.x)
        nodes.add(con.y)
    # virtual super-source: initialize every distance to 0 (equivalent to a
    # zero-weight edge from the source to every node)
    dist = {v: 0 for v in nodes}
    pred: dict[str, tuple[str, DiffConstraint]] = {}
    touched = None
    for _ in range(len(nodes)):
        touched = None
        for u, v, w, con in edges:
            if dist[u] + w < dist[v]:
                dist[v] = dist[u] + w
                pred[v] = (u, con)
                touched = v
        if touched is None:
            break
    if touched is not None:
        # walk predecessors |V| times to land inside the cycle, then unroll it
        node = touched
        for _ in range(len(nodes)):
            node = pred[node][0]
        cycle = []
        cur = node
        while True:
            prev, con = pred[cur]
            cycle.append(con)
            cur = prev
            if cur == node:
                break
        cycle.reverse()
        return Infeasible(tuple(cycle))
    shift = dist[ZERO]
    model = {v: dist[v] - shift for v in nodes if v != ZERO}
    return Feasible(model)


def model_satisfies(model: dict, cs: list[DiffConstraint]) -> bool:
    def val(n):
        return 0 if n == ZERO else model[n]

    return all(val(c.x) - val(c.y) <= c.c for c in cs)


# ---------------------------------------------------------------------------
# Brute-force oracle
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Sat:
    model: dict


@dataclass(frozen=True)
class Unsat:
    pass


def _eval_term_grid(t, env, np):
    if isinstance(t, Variable):
        return env[t.name]
    if isinstance(t, IntConst):
        return t.value
    left, right = _eval_term_grid(t.left, env, np), _eval_term_grid(t.right, env, np)
    from .smtlib import Add, Sub

    if isinstance(t, Add):
        return left + right
    if isinstance(t, Sub):
        return left - right
    return left * right


def _eval_grid(f, env, np):
    from functools import reduce

    from .smtlib import And, Not, Or, TrueFormula

    if isinstance(f, TrueFormula):
        return True
    if isinstance(f, AtomNode):
        lhs = _eval_term_grid(f.atom.lhs, env, np)
        rhs = _eval_term_grid(f.atom.rhs, env, np)
        return {"<=": lhs <= rhs, "<": lhs < rhs, ">=": lhs >= rhs,
                ">": lhs > rhs, "=": lhs == rhs}[f.atom.op]
    if isinstance(f, And):
        return reduce(np.logical_and, (_eval_grid(c, env, np) for c in f.children))
    if isinstance(f, Or):
        return reduce(np.logical_or, (_eval_grid(c, env, np) for c in f.children))
    if isinstance(f, Not):
        return np.logical_not(_eval_grid(f.child, env, np))
    raise TypeError(f"unknown formula node {f!r}")


def brute_force_sat(f: Formula, domain_lo: int, domain_hi: int) -> Union[Sat, Unsat]:
    """Exhaustive satisfiability over [domain_lo, domain_hi]^vars.

    Returns the lexicographically first satisfying assignment (variables in
    name-sorted order).  Guarded at 10^7 assignments.  The whole grid is
    evaluated vectorized; C order of the flattened mask coincides with
    lexicographic enumeration order.
    """
    import numpy as np

    names = sorted(free_vars(f))
    width = domain_hi - domain_lo + 1
    if width <= 0:
        raise DomainTooLarge("empty domain")
    if width ** max(len(names), 1) > BRUTE_FORCE_GUARD:
        raise DomainTooLarge(
            f"{width}^{len(names)} assignments exceed the {BRUTE_FORCE_GUARD} guard")
    if not names:
        return Sat({}) if eval_formula(f, {}) else Unsat()
    values = np.arange(domain_lo, domain_hi + 1, dtype=np.int64)
    grids = np.meshgrid(*([values] * len(names)), indexing="ij", sparse=True)
    shape = (width,) * len(names)
    mask = np.broadcast_to(_eval_grid(f, dict(zip(names, grids)), np), shape)
    first = int(np.argmax(mask.reshape(-1)))
    if not mask.reshape(-1)[first]:
        return Unsat()
    coords = np.unravel_index(first, shape)
    return Sat({name: int(domain_lo + c) for name, c in zip(names, coords)})


def max_abs_const(f: Formula) -> int:
    """Largest absolute integer literal appearing anywhere in the formula."""
    from .smtlib import Add, Mul, Sub

    consts = [0]

    def walk_term(t):
        if isinstance(t, IntConst):
            consts.append(abs(t.value))
        elif isinstance(t, (Add, Sub, Mul)):
            walk_term(t.left)
            walk_term(t.right)

    stack = [f]
    while stack:
        node = stack.pop()
        if isinstance(node, AtomNode):
            walk_term(node.atom.lhs)
            walk_term(node.atom.rhs)
        elif hasattr(node, "children"):
            stack.extend(node.children)
        elif hasattr(node, "child"):
            stack.append(node.child)
    return max(consts)


def atoms_in_fragment(f: Formula) -> bool:
    """True when every atom is a plain difference-logic comparison, whatever
    the boolean structure above it."""
    from .smtlib import TrueFormula

    stack = [f]
    while stack:
        node = stack.pop()
        if isinstance(node, AtomNode):
            if isinstance(normalize_atom(node.atom), Unsupported):
                return False
        elif isinstance(node, TrueFormula):
            continue
        elif hasattr(node, "children"):
            stack.extend(node.children)
        elif hasattr(node, "child"):
            stack.append(node.child)
        else:
            return False
    return True


def small_model_bound(f: Formula) -> int:
    """(v+1)*(K+1) span from the difference-logic small-model property."""
    v = len(free_vars(f))
    return (v + 1) * (max_abs_const(f) + 1)
