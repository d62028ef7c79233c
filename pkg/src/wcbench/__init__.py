"""Workbench for worst-case path-constraint analysis.

Generates ground-truth worst-case SMT-LIB constraints for parametric
programs, verifies candidate constraints via bidirectional-UNSAT
equivalence, computes solver-guided rewards for RL loops, builds tiered
extrapolation benchmarks, and evaluates model outputs.
"""

__version__ = "0.1.0"
