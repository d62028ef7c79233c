"""Semantic equivalence of constraints via the bidirectional UNSAT test.

Two formulas are equivalent iff (a and not b) and (b and not a) are both
unsatisfiable.  Three strategies are available: per-atom difference-logic
decomposition (exact on the conjunctive fragment), an external SMT solver
child process, and finite-domain refutation.
"""

from __future__ import annotations

import json
import os
import shlex
import subprocess
import threading
from dataclasses import dataclass, field
from typing import Optional, Union

from . import difflogic, smtlib
from .difflogic import Feasible, Unsupported, ZERO
from .smtlib import Atom, AtomNode, Formula, TrueFormula, eval_formula, free_vars

DEFAULT_TIMEOUT_MS = 5000
SOLVER_CMD_ENV = "WARP_SOLVER_CMD"


class SolverSpawnFailure(RuntimeError):
    pass


class ProtocolError(RuntimeError):
    pass


@dataclass(frozen=True)
class Equivalent:
    pass


@dataclass(frozen=True)
class NotEquivalent:
    witness: dict  # variable -> int; satisfies one formula, falsifies the other
    direction: str  # "a_not_implies_b" | "b_not_implies_a"


@dataclass(frozen=True)
class Unknown:
    reason: str


Verdict = Union[Equivalent, NotEquivalent, Unknown]


@dataclass
class SolverConfig:
    external_solver_command: list = field(
        default_factory=lambda: shlex.split(os.environ.get(SOLVER_CMD_ENV, "z3 -in")))
    timeout_ms: int = DEFAULT_TIMEOUT_MS
    strategy_order: tuple = ("diff_logic", "brute_force")
    max_concurrent_children: int = 4

    def __post_init__(self):
        if self.timeout_ms <= 0:
            raise ValueError("timeout_ms must be positive")
        if not self.strategy_order:
            raise ValueError("strategy_order must be non-empty")
        unknown = set(self.strategy_order) - {"diff_logic", "brute_force",
                                              "external"}
        if unknown:
            raise ValueError(f"unknown strategies: {sorted(unknown)}")
        self._pool = threading.Semaphore(self.max_concurrent_children)


def load_config(path: Optional[str] = None) -> SolverConfig:
    """SolverConfig from an optional JSON file; WARP_SOLVER_CMD wins over both."""
    kwargs = {}
    if path:
        with open(path) as fh:
            data = json.load(fh)
        for key in ("external_solver_command", "timeout_ms", "strategy_order",
                    "max_concurrent_children"):
            if key in data:
                kwargs[key] = tuple(data[key]) if key == "strategy_order" else data[key]
    cfg = SolverConfig(**kwargs)
    env_cmd = os.environ.get(SOLVER_CMD_ENV)
    if env_cmd:
        cfg.external_solver_command = shlex.split(env_cmd)
    return cfg


# ---------------------------------------------------------------------------
# Difference-logic strategy
# ---------------------------------------------------------------------------

def _negation_atoms(atom: Atom) -> list[Atom]:
    """Atoms whose disjunction is the negation of the given comparison."""
    neg = {"<=": [">"], "<": [">="], ">=": ["<"], ">": ["<="], "=": ["<", ">"]}
    return [Atom(op, atom.lhs, atom.rhs) for op in neg[atom.op]]


def _conjunct_atoms(f: Formula) -> Union[list[Atom], Unsupported]:
    atoms = []
    for leaf in smtlib.flatten_conjunction(f):
        if not isinstance(leaf, AtomNode):
            return Unsupported("conjunct is not a comparison atom")
        atoms.append(leaf.atom)
    return atoms


def _implies_with_witness(a: Formula, b: Formula):
    """(True, None) if a implies b; (False, witness) otherwise; Unsupported."""
    ca = difflogic.formula_to_constraints(a)
    if isinstance(ca, Unsupported):
        return ca
    b_atoms = _conjunct_atoms(b)
    if isinstance(b_atoms, Unsupported):
        return b_atoms
    for beta in b_atoms:
        for neg in _negation_atoms(beta):
            cneg = difflogic.normalize_atom(neg)
            if isinstance(cneg, Unsupported):
                return cneg
            res = difflogic.check_feasible(ca + cneg)
            if isinstance(res, Feasible):
                witness = dict(res.model)
                for name in free_vars(a) | free_vars(b):
                    witness.setdefault(name, 0)
                return False, witness
    return True, None


def implies_conjunctive(a: Formula, b: Formula) -> Union[bool, Unsupported]:
    """a entails b, both conjunctions of difference-logic atoms."""
    res = _implies_with_witness(a, b)
    if isinstance(res, Unsupported):
        return res
    return res[0]


def _diff_logic_verdict(a: Formula, b: Formula) -> Optional[Verdict]:
    fwd = _implies_with_witness(a, b)
    if isinstance(fwd, Unsupported):
        return None
    ok, witness = fwd
    if not ok:
        return NotEquivalent(witness, "a_not_implies_b")
    back = _implies_with_witness(b, a)
    if isinstance(back, Unsupported):
        return None
    ok, witness = back
    if not ok:
        return NotEquivalent(witness, "b_not_implies_a")
    return Equivalent()


# ---------------------------------------------------------------------------
# Finite-domain refutation strategy
# ---------------------------------------------------------------------------

_BRUTE_GUARD = 10**7


def _brute_force_verdict(a: Formula, b: Formula) -> Verdict:
    names = sorted(free_vars(a) | free_vars(b))
    # (v+1)*(K+2): the small-model span over the union of variables, with one
    # unit of slack because negating a difference atom shifts its constant
    k = max(difflogic.max_abs_const(a), difflogic.max_abs_const(b))
    bound = (len(names) + 1) * (k + 2)
    width = 2 * bound + 1
    if width ** max(len(names), 1) > _BRUTE_GUARD:
        return Unknown("finite domain too large to enumerate")
    if not names:
        va, vb = eval_formula(a, {}), eval_formula(b, {})
        if va != vb:
            return NotEquivalent({}, "a_not_implies_b" if va else "b_not_implies_a")
    else:
        import numpy as np

        values = np.arange(-bound, bound + 1, dtype=np.int64)
        grids = np.meshgrid(*([values] * len(names)), indexing="ij", sparse=True)
        env = dict(zip(names, grids))
        shape = (width,) * len(names)
        mask_a = np.broadcast_to(difflogic._eval_grid(a, env, np), shape)
        mask_b = np.broadcast_to(difflogic._eval_grid(b, env, np), shape)
        differ = np.logical_xor(mask_a, mask_b).reshape(-1)
        first = int(np.argmax(differ))
        if differ[first]:
            coords = np.unravel_index(first, shape)
            witness = {name: int(-bound + c) for name, c in zip(names, coords)}
            direction = ("a_not_implies_b" if eval_formula(a, witness)
                         else "b_not_implies_a")
            return NotEquivalent(witness, direction)
    # the small-model bound certifies completeness for boolean combinations
    # of difference atoms; anything with richer arithmetic stays inconclusive
    if difflogic.atoms_in_fragment(a) and difflogic.atoms_in_fragment(b):
        return Equivalent()
    return Unknown("no witness in the finite domain; formulas leave the fragment")


# ---------------------------------------------------------------------------
# External solver strategy
# ---------------------------------------------------------------------------

def smt_body(f: Formula) -> str:
    if isinstance(f, TrueFormula):
        return "true"
    return smtlib.serialize_canonical(f)[len("(assert "):-1]


def build_check_script(assertions: list[str], variables: set[str],
                       get_model: bool = False) -> str:
    lines = ["(set-logic QF_LIA)"]
    lines += [f"(declare-const {v} Int)" for v in sorted(variables)]
    lines += [f"(assert {a})" for a in assertions]
    lines.append("(check-sat)")
    if get_model:
        lines.append("(get-model)")
    return "\n".join(lines) + "\n"


def external_check_sat(script: str, cfg: SolverConfig) -> str:
    """Run the configured solver on a complete SMT-LIB session.

    Returns the first status token ("sat"/"unsat"/"unknown"); a timeout maps
    to "unknown".
    """
    out = _run_solver(script, cfg)
    if out is None:
        return "unknown"
    for token in out.split():
        if token in ("sat", "unsat", "unknown"):
            return token
    raise ProtocolError(f"no status token in solver reply: {out[:200]!r}")


def _run_solver(script: str, cfg: SolverConfig) -> Optional[str]:
    with cfg._pool:
        try:
            proc = subprocess.run(
                cfg.external_solver_command,
                input=script,
                capture_output=True,
                text=True,
                timeout=cfg.timeout_ms / 1000.0,
            )
        except subprocess.TimeoutExpired:
            return None
        except (OSError, FileNotFoundError) as exc:
            raise SolverSpawnFailure(
                f"cannot launch {cfg.external_solver_command!r}: {exc}") from exc
    return proc.stdout


_MODEL_RE = None


def _parse_model(out: str) -> dict:
    import re

    global _MODEL_RE
    if _MODEL_RE is None:
        _MODEL_RE = re.compile(
            r"define-fun\s+(in\d+)\s*\(\s*\)\s*Int\s*(\(-\s*\d+\s*\)|-?\d+)")
    model = {}
    for name, raw in _MODEL_RE.findall(out):
        raw = raw.strip()
        if raw.startswith("("):
            model[name] = -int(raw.strip("()- \t"))
        else:
            model[name] = int(raw)
    return model


def _external_direction(premise: Formula, conclusion: Formula,
                        cfg: SolverConfig) -> tuple[str, Optional[dict]]:
    """check-sat of (premise and not conclusion), with a model when sat."""
    variables = free_vars(premise) | free_vars(conclusion)
    script = build_check_script(
        [smt_body(premise), f"(not {smt_body(conclusion)})"], variables,
        get_model=True)
    out = _run_solver(script, cfg)
    if out is None:
        return "unknown", None
    status = None
    for token in out.split():
        if token in ("sat", "unsat", "unknown"):
            status = token
            break
    if status is None:
        raise ProtocolError(f"no status token in solver reply: {out[:200]!r}")
    if status == "sat":
        model = _parse_model(out)
        for name in variables:
            model.setdefault(name, 0)
        return status, model
    return status, None


def _external_verdict(a: Formula, b: Formula, cfg: SolverConfig) -> Verdict:
    fwd, model = _external_direction(a, b, cfg)
    if fwd == "sat":
        return NotEquivalent(model, "a_not_implies_b")
    if fwd == "unknown":
        return Unknown("external solver returned unknown or timed out")
    back, model = _external_direction(b, a, cfg)
    if back == "sat":
        return NotEquivalent(model, "b_not_implies_a")
    if back == "unknown":
        return Unknown("external solver returned unknown or timed out")
    return Equivalent()


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def _normalized_conjunct_set(f: Formula) -> Optional[frozenset]:
    leaves = smtlib.flatten_conjunction(f)
    if all(isinstance(l, AtomNode) for l in leaves):
        return frozenset(smtlib.serialize_canonical(l) for l in leaves)
    return None


def check_feasibility(f: Formula, cfg: Optional[SolverConfig] = None) -> str:
    """Satisfiability of a single formula: "sat", "unsat" or "unknown".

    Difference-logic decomposition when the formula is in the fragment,
    otherwise finite enumeration over the small-model domain (conclusive for
    "sat" only, since the bound is justified inside the fragment).
    """
    constraints = difflogic.formula_to_constraints(f)
    if not isinstance(constraints, Unsupported):
        res = difflogic.check_feasible(constraints)
        return "sat" if isinstance(res, Feasible) else "unsat"
    bound = difflogic.small_model_bound(f)
    try:
        res = difflogic.brute_force_sat(f, -bound, bound)
    except difflogic.DomainTooLarge:
        return "unknown"
    if isinstance(res, difflogic.Sat):
        return "sat"
    return "unknown"


def check_equivalence(a: Formula, b: Formula,
                      cfg: Optional[SolverConfig] = None) -> Verdict:
    """Equivalent iff both (a and not b) and (b and not a) are UNSAT.

    Strategies are tried in cfg.strategy_order; the first conclusive verdict
    wins.  Conjunctions whose atom multisets coincide short-circuit to
    Equivalent without touching a solver.
    """
    if cfg is None:
        cfg = SolverConfig()
    sa, sb = _normalized_conjunct_set(a), _normalized_conjunct_set(b)
    if sa is not None and sa == sb:
        return Equivalent()
    last: Verdict = Unknown("no strategy produced a verdict")
    for strategy in cfg.strategy_order:
        if strategy == "diff_logic":
            verdict = _diff_logic_verdict(a, b)
            if verdict is None:
                continue
        elif strategy == "brute_force":
            verdict = _brute_force_verdict(a, b)
        elif strategy == "external":
            verdict = _external_verdict(a, b, cfg)
        else:
            raise ValueError(f"unknown strategy {strategy!r}")
        if not isinstance(verdict, Unknown):
            return verdict
        last = verdict
    return last
