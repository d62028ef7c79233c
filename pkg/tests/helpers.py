"""Shared random-formula builders and mutation helpers for the test suite."""

from __future__ import annotations

import random

from wcbench.smtlib import And, Atom, AtomNode, Formula, IntConst, conjoin, var


def random_conjunction(rng: random.Random, n_vars: int, const_range=(-3, 3),
                       ops=("<=", "<", "="), n_atoms=None,
                       allow_consts=True) -> Formula:
    """Random conjunction of difference-logic atoms over in0..in{n_vars-1}."""
    if n_atoms is None:
        n_atoms = rng.randint(1, n_vars + 2)
    atoms = []
    for _ in range(n_atoms):
        op = rng.choice(ops)
        i = rng.randrange(n_vars)
        if allow_consts and rng.random() < 0.3:
            atoms.append(Atom(op, var(i), IntConst(rng.randint(*const_range))))
        else:
            j = rng.randrange(n_vars)
            while n_vars > 1 and j == i:
                j = rng.randrange(n_vars)
            atoms.append(Atom(op, var(i), var(j)))
    return conjoin([AtomNode(a) for a in atoms])


def irredundant_chain(rng: random.Random, n_vars: int,
                      with_bounds: bool = True) -> list[Atom]:
    """Atom list where removing any single atom strictly weakens the whole.

    A shuffled <=-chain over distinct variables, optionally with one
    non-negative upper bound per extra variable; the all-zeros point
    satisfies every atom.
    """
    order = list(range(n_vars))
    rng.shuffle(order)
    atoms = [Atom("<=", var(order[i]), var(order[i + 1]))
             for i in range(n_vars - 1)]
    if with_bounds and rng.random() < 0.5:
        k = rng.randrange(n_vars)
        atoms.append(Atom("<=", var(k), IntConst(rng.randint(0, 3))))
    return atoms


# ---------------------------------------------------------------------------
# Equivalence-preserving mutations
# ---------------------------------------------------------------------------

_MIRROR = {"<=": ">=", "<": ">", ">=": "<=", ">": "<", "=": "="}


def mirror_atom(atom: Atom) -> Atom:
    return Atom(_MIRROR[atom.op], atom.rhs, atom.lhs)


def random_tree(rng: random.Random, leaves: list[Formula]) -> Formula:
    """Random binary And-grouping of the given conjuncts."""
    nodes = list(leaves)
    if not nodes:
        return conjoin([])
    while len(nodes) > 1:
        i = rng.randrange(len(nodes) - 1)
        merged = And((nodes[i], nodes[i + 1]))
        nodes[i:i + 2] = [merged]
    return nodes[0]


def equivalent_mutation(rng: random.Random, atoms: list[Atom]) -> Formula:
    """Permute, duplicate, mirror and re-associate; semantics preserved."""
    out = list(atoms)
    rng.shuffle(out)
    for _ in range(rng.randint(0, 2)):
        out.insert(rng.randrange(len(out) + 1), rng.choice(atoms))
    out = [mirror_atom(a) if rng.random() < 0.5 else a for a in out]
    return random_tree(rng, [AtomNode(a) for a in out])
