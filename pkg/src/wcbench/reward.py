"""Solver-guided reward: template checking, answer extraction, scoring.

The scalar reward is 0.1 * syntactic + 0.9 * semantic.  The syntactic
component requires the completion to consist of exactly one <think> block
followed by exactly one <answer> block; the semantic component requires the
extracted answer to be equivalent to the ground-truth constraint.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from .equivalence import Equivalent, SolverConfig, Verdict, Unknown, check_equivalence
from .smtlib import Formula, ParseError, parse_formula

# exactly <think>...</think> then <answer>...</answer>, nothing else at top
# level; same-name tags may not nest inside their own block
_TEMPLATE_RE = re.compile(
    r"\A<think>(?:(?!</?think>).)*</think>\s*"
    r"<answer>(?:(?!</?answer>).)*</answer>\Z",
    re.DOTALL,
)

_ANSWER_RE = re.compile(r"<answer>(.*?)</answer>", re.DOTALL)

# the only representable rewards; keyed by (syntactic_ok, semantic_ok)
REWARD_TABLE = {
    (False, False): 0.0,
    (True, False): 0.1,
    (False, True): 0.9,
    (True, True): 1.0,
}


@dataclass(frozen=True)
class RewardBreakdown:
    syntactic_ok: bool
    semantic_ok: bool
    extracted_answer: Optional[str]
    reward: float
    verdict_detail: str


def check_template(text: str) -> bool:
    return _TEMPLATE_RE.match(text.strip()) is not None


def extract_answer(text: str) -> Optional[str]:
    """Contents of the last complete <answer> block, trimmed; None if absent."""
    matches = _ANSWER_RE.findall(text)
    if not matches:
        return None
    return matches[-1].strip()


def compute_reward(completion: str, ground_truth: Formula,
                   cfg: Optional[SolverConfig] = None,
                   strict_semantic_requires_template: bool = False) -> RewardBreakdown:
    """Score a completion against the ground-truth constraint.

    Parse failures and inconclusive solver verdicts fold into a zero
    semantic component.  With strict_semantic_requires_template the semantic
    component is additionally gated on the syntactic check.
    """
    syntactic_ok = check_template(completion)
    answer = extract_answer(completion)
    semantic_ok = False
    detail = "no_answer"
    if answer is not None:
        try:
            candidate = parse_formula(answer)
        except ParseError as exc:
            detail = f"parse_error: {exc}"
        else:
            verdict = check_equivalence(candidate, ground_truth, cfg)
            semantic_ok = isinstance(verdict, Equivalent)
            detail = _verdict_detail(verdict)
    if strict_semantic_requires_template and not syntactic_ok:
        semantic_ok = False
    return RewardBreakdown(
        syntactic_ok=syntactic_ok,
        semantic_ok=semantic_ok,
        extracted_answer=answer,
        reward=REWARD_TABLE[(syntactic_ok, semantic_ok)],
        verdict_detail=detail,
    )


def _verdict_detail(verdict: Verdict) -> str:
    if isinstance(verdict, Equivalent):
        return "equivalent"
    if isinstance(verdict, Unknown):
        return f"unknown: {verdict.reason}"
    return f"not_equivalent ({verdict.direction})"
