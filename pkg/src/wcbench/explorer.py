"""Desk-scale symbolic worst-case executor.

Enumerates the feasible execution paths of a toy program at a given input
size, attaches a cost to each path, and returns the maximum-cost path
condition.  This is the independent oracle the constraint generators are
certified against.

Toy programs come in two forms: a statement IR built per input size
(guard-chain programs) and a native trace function (programs such as
QuickSort whose control flow depends on data-driven recursion, which a
static IR cannot express).  Both run under the same forking executor.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Union

from . import difflogic
from .difflogic import Feasible, Infeasible, Unsupported
from .smtlib import Atom, AtomNode, Formula, conjoin, free_vars, var

PATH_BUDGET = 2**20


class PathBudgetExceeded(RuntimeError):
    pass


class UnsupportedCondition(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# Statement IR
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Nop:
    pass


@dataclass(frozen=True)
class Charge:
    units: int


@dataclass(frozen=True)
class Seq:
    stmts: tuple

    def __post_init__(self):
        object.__setattr__(self, "stmts", tuple(self.stmts))


@dataclass(frozen=True)
class If:
    cond: Atom
    then: "Stmt"
    orelse: "Stmt"


@dataclass(frozen=True)
class BoundedLoop:
    count: int  # concrete at build time
    body: "Stmt"


Stmt = Union[Nop, Charge, Seq, If, BoundedLoop]


@dataclass(frozen=True)
class ToyProgram:
    name: str
    cost_model: dict = field(default_factory=lambda: {"charge": 1, "branch": 0})
    build: Optional[Callable[[int], Stmt]] = None
    trace_fn: Optional[Callable[["ExecContext", int], None]] = None

    def __post_init__(self):
        if (self.build is None) == (self.trace_fn is None):
            raise ValueError("exactly one of build/trace_fn must be given")


@dataclass(frozen=True)
class PathResult:
    condition: Formula
    cost: int
    trace: tuple  # branch decisions, True = condition taken


_NEGATE = {"<=": ">", "<": ">=", ">=": "<", ">": "<="}


def negate_atom(atom: Atom) -> Atom:
    if atom.op == "=":
        raise UnsupportedCondition(
            "equality branches have no single-comparator negation; "
            "split them into <= and >= guards")
    return Atom(_NEGATE[atom.op], atom.lhs, atom.rhs)


class _Fork(Exception):
    def __init__(self, atom: Atom, ctx: "ExecContext"):
        self.atom = atom
        self.ctx = ctx


class ExecContext:
    """One execution attempt replaying a forced decision prefix."""

    def __init__(self, prefix: tuple, cost_model: dict):
        self.prefix = prefix
        self.cost_model = cost_model
        self.ptr = 0
        self.cost = 0
        self.atoms: list[Atom] = []

    def branch(self, atom: Atom) -> bool:
        if not free_vars(AtomNode(atom)):
            # concrete condition: evaluate, no fork
            from .smtlib import eval_formula
            self.cost += self.cost_model.get("branch", 0)
            return eval_formula(AtomNode(atom), {})
        if self.ptr >= len(self.prefix):
            raise _Fork(atom, self)
        outcome = self.prefix[self.ptr]
        self.ptr += 1
        self.cost += self.cost_model.get("branch", 0)
        self.atoms.append(atom if outcome else negate_atom(atom))
        return outcome

    def charge(self, units: int):
        self.cost += units * self.cost_model.get("charge", 1)


def _interpret(stmt: Stmt, ctx: ExecContext):
    if isinstance(stmt, Nop):
        return
    if isinstance(stmt, Charge):
        ctx.charge(stmt.units)
    elif isinstance(stmt, Seq):
        for s in stmt.stmts:
            _interpret(s, ctx)
    elif isinstance(stmt, If):
        taken = ctx.branch(stmt.cond)
        _interpret(stmt.then if taken else stmt.orelse, ctx)
    elif isinstance(stmt, BoundedLoop):
        for _ in range(stmt.count):
            _interpret(stmt.body, ctx)
    else:
        raise TypeError(f"unknown statement {stmt!r}")


def _feasible_prefix(atoms: list[Atom]) -> bool:
    cs = difflogic.normalize_atoms(atoms)
    if isinstance(cs, Unsupported):
        f = conjoin([AtomNode(a) for a in atoms])
        bound = difflogic.small_model_bound(f)
        try:
            res = difflogic.brute_force_sat(f, -bound, bound)
        except difflogic.DomainTooLarge as exc:
            raise UnsupportedCondition(
                f"path condition outside difference logic and too large to "
                f"enumerate: {exc}") from exc
        return isinstance(res, difflogic.Sat)
    return isinstance(difflogic.check_feasible(cs), Feasible)


def _run_once(program: ToyProgram, n: int, prefix: tuple) -> ExecContext:
    ctx = ExecContext(prefix, program.cost_model)
    if program.trace_fn is not None:
        program.trace_fn(ctx, n)
    else:
        _interpret(program.build(n), ctx)
    return ctx


def enumerate_paths(program: ToyProgram, n: int, prune: bool = True) -> list[PathResult]:
    """Exhaustive depth-first path enumeration, forking at symbolic branches.

    With prune=True (default), prefixes whose condition is infeasible are
    dropped immediately; prune=False keeps them (used to validate pruning
    soundness).  Results are sorted by trace, condition-taken first.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    results: list[PathResult] = []
    stack: list[tuple] = [()]
    steps = 0
    while stack:
        steps += 1
        if steps > PATH_BUDGET:
            raise PathBudgetExceeded(f"more than {PATH_BUDGET} enumeration steps")
        prefix = stack.pop()
        try:
            ctx = _run_once(program, n, prefix)
        except _Fork as fork:
            base = fork.ctx.atoms
            # push False first so True is explored first (DFS pops last)
            for outcome in (False, True):
                cond = fork.atom if outcome else negate_atom(fork.atom)
                if prune and not _feasible_prefix(base + [cond]):
                    continue
                stack.append(prefix + (outcome,))
        else:
            results.append(PathResult(
                condition=conjoin([AtomNode(a) for a in ctx.atoms]),
                cost=ctx.cost,
                trace=prefix,
            ))
    results.sort(key=lambda r: _trace_key(r.trace))
    return results


def _trace_key(trace: tuple) -> tuple:
    # condition-taken (True) sorts before not-taken
    return tuple(0 if d else 1 for d in trace)


def worst_case(program: ToyProgram, n: int) -> PathResult:
    """Maximum-cost path; cost ties broken by lexicographically least trace."""
    paths = enumerate_paths(program, n)
    return max(paths, key=lambda r: (r.cost, tuple(-k for k in _trace_key(r.trace))))


def path_growth(program: ToyProgram, n_range) -> list[tuple[int, int]]:
    return [(n, len(enumerate_paths(program, n))) for n in n_range]


# ---------------------------------------------------------------------------
# Shipped toy programs
# ---------------------------------------------------------------------------

def _toy_quicksort(ctx: ExecContext, n: int):
    # last-element pivot, Lomuto partition; cost = comparison count
    arr = [var(i) for i in range(n)]

    def sort(lo: int, hi: int):
        if lo >= hi:
            return
        pivot = arr[hi]
        i = lo
        for j in range(lo, hi):
            ctx.charge(1)
            if ctx.branch(Atom("<=", arr[j], pivot)):
                arr[i], arr[j] = arr[j], arr[i]
                i += 1
        arr[i], arr[hi] = arr[hi], arr[i]
        sort(lo, i - 1)
        sort(i + 1, hi)

    sort(0, n - 1)


def _toy_bubblesort(ctx: ExecContext, n: int):
    # cost = swap count (inversions of the original order)
    arr = [var(i) for i in range(n)]
    for p in range(n - 1):
        for j in range(n - 1 - p):
            if ctx.branch(Atom(">", arr[j], arr[j + 1])):
                arr[j], arr[j + 1] = arr[j + 1], arr[j]
                ctx.charge(1)


def _build_same_hundred(n: int) -> Stmt:
    # guard every element, equality split into <= / >=; all pass -> heavy loop
    body: Stmt = BoundedLoop(n, Charge(1))
    from .smtlib import IntConst

    for i in reversed(range(n)):
        body = If(Atom("<=", var(i), IntConst(100)),
                  If(Atom(">=", var(i), IntConst(100)), body, Nop()),
                  Nop())
    return body


def _build_ascending_last(n: int) -> Stmt:
    if n < 2:
        return Charge(1)
    return If(Atom(">", var(n - 1), var(n - 2)), BoundedLoop(n, Charge(1)), Nop())


TOY_PROGRAMS: dict[str, ToyProgram] = {
    "QuickSort": ToyProgram("QuickSort", trace_fn=_toy_quicksort),
    "BubbleSort": ToyProgram("BubbleSort", trace_fn=_toy_bubblesort),
    "SameHundred": ToyProgram("SameHundred", build=_build_same_hundred),
    "SimpleAscendingLast": ToyProgram("SimpleAscendingLast",
                                      build=_build_ascending_last),
}


def get_toy(name: str) -> ToyProgram:
    try:
        return TOY_PROGRAMS[name]
    except KeyError:
        raise KeyError(
            f"no toy program for {name!r}; available: {sorted(TOY_PROGRAMS)}"
        ) from None
