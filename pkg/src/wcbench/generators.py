"""Ground-truth worst-case constraint generators for the registered programs.

Each program maps an input size n to the path constraint under which it does
maximal work.  Only QuickSort's family is documented in full elsewhere; the
others are reconstructed from one-line behavioural descriptions and certified
against the symbolic explorer / finite-domain oracles in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .smtlib import (
    TRUE,
    Add,
    Atom,
    AtomNode,
    Formula,
    IntConst,
    Sub,
    conjoin,
    flatten_conjunction,
    var,
)


class UnsupportedSize(ValueError):
    pass


@dataclass(frozen=True)
class ProgramSpec:
    name: str
    description: str
    generator: Callable[[int], Formula]
    min_n: int = 1
    max_supported_n: int = 64  # benchmark caps targets at 30; slack for stress tests


def _atom(op: str, lhs, rhs) -> Formula:
    return AtomNode(Atom(op, lhs, rhs))


def _quicksort(n: int) -> Formula:
    # (<= in_i in_j) for j = n-1 .. 1, i = 0 .. j-1: the sorted-order path of
    # last-element-pivot partitioning, in the order the comparisons happen.
    atoms = [_atom("<=", var(i), var(j))
             for j in range(n - 1, 0, -1)
             for i in range(j)]
    return conjoin(atoms)


def _same_hundred(n: int) -> Formula:
    return conjoin([_atom("=", var(i), IntConst(100)) for i in range(n)])


def _weird_fibonacci(n: int) -> Formula:
    return conjoin([_atom("=", var(i), Add(var(i - 1), var(i - 2)))
                    for i in range(2, n)])


def _weird_const_diff(n: int) -> Formula:
    return conjoin([_atom("=", Sub(var(i), var(i - 1)), Sub(var(i - 1), var(i - 2)))
                    for i in range(2, n)])


def _simple_ascending_last(n: int) -> Formula:
    if n < 2:
        return TRUE
    return _atom(">", var(n - 1), var(n - 2))


def _bubble_sort(n: int) -> Formula:
    # full reverse order maximizes swaps; adjacent strict chain suffices
    return conjoin([_atom(">", var(i), var(i + 1)) for i in range(n - 1)])


_REGISTRY: dict[str, ProgramSpec] = {}


def register(spec: ProgramSpec) -> ProgramSpec:
    if spec.name in _REGISTRY:
        raise ValueError(f"program {spec.name!r} already registered")
    _REGISTRY[spec.name] = spec
    return spec


for _name, _desc, _fn in [
    ("QuickSort",
     "Recursive pivot-based sort; worst case is sorted input order", _quicksort),
    ("SameHundred",
     "Heavy computation when all elements equal 100", _same_hundred),
    ("WeirdFibonacci",
     "Heavy computation when the input is a Fibonacci-like progression",
     _weird_fibonacci),
    ("WeirdConstDiff",
     "Heavy computation when consecutive differences are constant",
     _weird_const_diff),
    ("SimpleAscendingLast",
     "Heavy computation when the last element exceeds its predecessor",
     _simple_ascending_last),
    ("BubbleSort",
     "Adjacent-swap sort; worst case is fully reversed input order", _bubble_sort),
]:
    register(ProgramSpec(_name, _desc, generator=_fn))


def list_programs() -> list[ProgramSpec]:
    return list(_REGISTRY.values())


def get_program(name: str) -> ProgramSpec:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown program {name!r}; known: {sorted(_REGISTRY)}") from None


def generate(program: ProgramSpec, n: int) -> Formula:
    if n < 1:
        raise UnsupportedSize(f"n must be >= 1, got {n}")
    if n > program.max_supported_n:
        raise UnsupportedSize(
            f"{program.name} supports n <= {program.max_supported_n}, got {n}")
    if n < program.min_n:
        return TRUE
    return program.generator(n)


def atom_count(program: ProgramSpec, n: int) -> int:
    return len(flatten_conjunction(generate(program, n)))
