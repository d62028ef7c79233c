"""Tiered extrapolation benchmark construction, prompts and profiling.

Instances pair example constraints at small input sizes with a held-out
larger target size; difficulty is the jump from the largest example to the
target (small <= 5, medium 6-15, large > 15).  Prompts are budgeted: an
over-budget example list is reduced to first/median/last, and instances
still over budget are excluded.
"""

from __future__ import annotations

import json
import random
import re
import statistics
from dataclasses import dataclass, field
from enum import Enum
from typing import Union

from . import generators
from .smtlib import free_vars, parse_formula, serialize_canonical

MAX_TARGET_N = 30
MIN_EXAMPLES = 3
DEFAULT_TOKEN_BUDGET = 2048


class Tier(str, Enum):
    SMALL = "small"
    MEDIUM = "medium"
    LARGE = "large"


def classify_tier(jump: int) -> Tier:
    if jump < 1:
        raise ValueError(f"jump must be >= 1, got {jump}")
    if jump <= 5:
        return Tier.SMALL
    if jump <= 15:
        return Tier.MEDIUM
    return Tier.LARGE


class Excluded:
    """Sentinel: the instance cannot fit the token budget even when reduced."""

    def __repr__(self):
        return "Excluded"


EXCLUDED = Excluded()


class UnknownProgram(KeyError):
    pass


class InfeasibleTierMix(ValueError):
    pass


class InvalidInstance(ValueError):
    pass


@dataclass(frozen=True)
class BenchmarkInstance:
    id: str
    program: str
    examples: tuple  # of (n, constraint_text), ascending n; "None" allowed
    target_n: int
    solution_text: str
    tier: Tier
    jump: int

    def validate(self):
        ns = [n for n, _ in self.examples]
        if ns != sorted(ns) or len(set(ns)) != len(ns):
            raise InvalidInstance(f"{self.id}: examples not strictly ascending")
        if len(self.examples) < MIN_EXAMPLES:
            raise InvalidInstance(f"{self.id}: fewer than {MIN_EXAMPLES} examples")
        if not ns or self.target_n <= max(ns):
            raise InvalidInstance(f"{self.id}: target_n must exceed all example n")
        if self.target_n > MAX_TARGET_N:
            raise InvalidInstance(f"{self.id}: target_n exceeds {MAX_TARGET_N}")
        if self.jump != self.target_n - max(ns):
            raise InvalidInstance(f"{self.id}: jump field inconsistent")
        if classify_tier(self.jump) != self.tier:
            raise InvalidInstance(f"{self.id}: tier inconsistent with jump")
        solution = parse_formula(self.solution_text)
        allowed = {f"in{i}" for i in range(self.target_n)}
        if not free_vars(solution) <= allowed:
            raise InvalidInstance(f"{self.id}: solution uses variables beyond in"
                                  f"{self.target_n - 1}")

    def to_json(self) -> str:
        return json.dumps({
            "id": self.id,
            "program": self.program,
            "examples": [{"n": n, "constraint": c} for n, c in self.examples],
            "target_n": self.target_n,
            "solution": self.solution_text,
            "tier": self.tier.value,
            "jump": self.jump,
        }, sort_keys=True)

    @classmethod
    def from_json(cls, line: str) -> "BenchmarkInstance":
        data = json.loads(line)
        inst = cls(
            id=data["id"],
            program=data["program"],
            examples=tuple((e["n"], e["constraint"]) for e in data["examples"]),
            target_n=data["target_n"],
            solution_text=data["solution"],
            tier=Tier(data["tier"]),
            jump=data["jump"],
        )
        inst.validate()
        return inst


@dataclass
class BuildConfig:
    programs: list
    tier_mix: dict = field(default_factory=lambda: {Tier.SMALL: 10,
                                                    Tier.MEDIUM: 10,
                                                    Tier.LARGE: 5})
    token_budget: int = DEFAULT_TOKEN_BUDGET
    seed: int = 0
    max_target_n: int = MAX_TARGET_N

    def __post_init__(self):
        if self.token_budget <= 0:
            raise ValueError("token_budget must be positive")
        self.tier_mix = {Tier(k): int(v) for k, v in self.tier_mix.items()}
        if any(v < 0 for v in self.tier_mix.values()):
            raise ValueError("tier counts must be >= 0")


@dataclass
class BuildReport:
    requested: int
    emitted: int
    excluded: int
    per_tier: dict


# ---------------------------------------------------------------------------
# Token estimation
# ---------------------------------------------------------------------------

_LEXEME_RE = re.compile(r"[()]|[^\s()]+")


def estimate_tokens(text: str) -> int:
    """Deterministic estimate: parens and non-space runs each count once.

    For pure prose this equals a whitespace split; for S-expressions it
    counts lexemes.  Absolute counts differ from any real model tokenizer;
    only relative budgeting matters here.
    """
    return len(_LEXEME_RE.findall(text))


# ---------------------------------------------------------------------------
# Prompt rendering
# ---------------------------------------------------------------------------

PROMPT_HEADER = "Given the following examples of constraints for increasing input sizes:"

TRAINING_TEMPLATE = """A conversation between User and Assistant. The user asks a question, and the Assistant solves it.
User: Your role is to take a known pattern of symbolic constraints that represent the longest execution path of a program and generalize it for any given input size N.
When you receive an input value N, you must generate a canonical SMT-LIB constraint string that adheres to the following rules:
(assert (op (op (op var_1 var_2)) (op (op var_3 var_4)) (op (op var_5 var_6)) (op var_7 var_8)))
where op is a logical operator (e.g., 'and', 'or', 'not') and var_i are variables or constants.
All per-variable constraints must be combined using a top-level (assert (and ...)) clause.
The output must be in exact, canonical SMT-LIB format without extra commentary in the constraint string.
Show your work in <think> </think> tags. And return the final SMT-LIB constraint string in <answer> </answer> tags.
For example: <answer>(assert (and  ( >=  in0 97)  ( <=  in0 122)))</answer>.
Here are the known constraints:
[EXAMPLES]
What is the constraint for N=[QUESTION]?
Assistant: Let me solve this step by step.
<think>"""


def _example_lines(examples) -> str:
    return "\n".join(f"N={n}: {text}" for n, text in examples)


def render_prompt_for_examples(examples, target_n: int) -> str:
    return "\n".join([
        PROMPT_HEADER,
        _example_lines(examples),
        f"What is the constraint for N={target_n}?",
    ])


def render_eval_prompt(instance: BenchmarkInstance) -> str:
    return render_prompt_for_examples(instance.examples, instance.target_n)


def render_training_prompt(instance: BenchmarkInstance) -> str:
    return (TRAINING_TEMPLATE
            .replace("[EXAMPLES]", _example_lines(instance.examples))
            .replace("[QUESTION]", str(instance.target_n)))


# ---------------------------------------------------------------------------
# Example reduction
# ---------------------------------------------------------------------------

def reduce_examples(examples, budget: int, target_n: int) -> Union[list, Excluded]:
    """All examples if the rendered prompt fits; else first/median/last; else EXCLUDED.

    Median is the lower median for even counts.  The output is always an
    order-preserving subsequence of the input.
    """
    if not examples:
        raise ValueError("examples must be non-empty")
    examples = list(examples)
    if estimate_tokens(render_prompt_for_examples(examples, target_n)) <= budget:
        return examples
    k = len(examples)
    picks = sorted({0, (k - 1) // 2, k - 1})
    reduced = [examples[i] for i in picks]
    if estimate_tokens(render_prompt_for_examples(reduced, target_n)) <= budget:
        return reduced
    return EXCLUDED


# ---------------------------------------------------------------------------
# Benchmark construction
# ---------------------------------------------------------------------------

_JUMP_RANGE = {Tier.SMALL: (1, 5), Tier.MEDIUM: (6, 15), Tier.LARGE: (16, None)}


def _constraint_text(program, n: int) -> str:
    return serialize_canonical(generators.generate(program, n))


def _sample_instance(program, rng: random.Random, tier: Tier, idx: int,
                     cfg: BuildConfig) -> BenchmarkInstance:
    lo, hi = _JUMP_RANGE[tier]
    hi = hi if hi is not None else cfg.max_target_n - MIN_EXAMPLES
    # need max example n >= MIN_EXAMPLES so that >= 3 ascending examples exist
    valid = [(j, t) for j in range(lo, hi + 1)
             for t in range(j + MIN_EXAMPLES, cfg.max_target_n + 1)]
    if not valid:
        raise InfeasibleTierMix(
            f"no ({tier.value}) jump/target combination fits max_target_n="
            f"{cfg.max_target_n} with >= {MIN_EXAMPLES} examples")
    jump, target = rng.choice(valid)
    max_example = target - jump
    count = rng.randint(MIN_EXAMPLES, min(max_example, 18))
    pool = list(range(1, max_example))
    chosen = sorted(rng.sample(pool, count - 1)) + [max_example]
    examples = tuple((n, _constraint_text(program, n)) for n in chosen)
    return BenchmarkInstance(
        id=f"{program.name.lower()}-{tier.value}-t{target}-{idx:04d}",
        program=program.name,
        examples=examples,
        target_n=target,
        solution_text=_constraint_text(program, target),
        tier=tier,
        jump=jump,
    )


def build_benchmark(cfg: BuildConfig, out_path: str) -> BuildReport:
    """Seeded, deterministic benchmark build; writes newline-delimited JSON."""
    progs = []
    for name in cfg.programs:
        try:
            progs.append(generators.get_program(name))
        except KeyError as exc:
            raise UnknownProgram(str(exc)) from exc
    rng = random.Random(cfg.seed)
    emitted, excluded = [], 0
    per_tier = {t: 0 for t in Tier}
    idx = 0
    for tier in (Tier.SMALL, Tier.MEDIUM, Tier.LARGE):
        want = cfg.tier_mix.get(tier, 0)
        got = 0
        attempts = 0
        while got < want:
            attempts += 1
            if attempts > want * 50 + 100:
                raise InfeasibleTierMix(
                    f"cannot produce {want} {tier.value} instances under the "
                    f"token budget")
            program = progs[rng.randrange(len(progs))]
            inst = _sample_instance(program, rng, tier, idx, cfg)
            idx += 1
            reduced = reduce_examples(inst.examples, cfg.token_budget, inst.target_n)
            if isinstance(reduced, Excluded):
                excluded += 1
                continue
            if len(reduced) != len(inst.examples):
                inst = BenchmarkInstance(
                    id=inst.id, program=inst.program, examples=tuple(reduced),
                    target_n=inst.target_n, solution_text=inst.solution_text,
                    tier=classify_tier(inst.target_n - reduced[-1][0]),
                    jump=inst.target_n - reduced[-1][0])
            inst.validate()
            emitted.append(inst)
            per_tier[inst.tier] += 1
            got += 1
    emitted.sort(key=lambda i: i.id)
    with open(out_path, "w") as fh:
        for inst in emitted:
            fh.write(inst.to_json() + "\n")
    return BuildReport(
        requested=sum(cfg.tier_mix.values()),
        emitted=len(emitted),
        excluded=excluded,
        per_tier={t.value: c for t, c in per_tier.items()},
    )


def load_benchmark(path: str) -> list[BenchmarkInstance]:
    """Read and re-validate every instance; reports the first malformed line."""
    out = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                out.append(BenchmarkInstance.from_json(line))
            except (json.JSONDecodeError, KeyError, InvalidInstance) as exc:
                raise InvalidInstance(f"{path}:{lineno}: {exc}") from exc
    return out


# ---------------------------------------------------------------------------
# Profiling
# ---------------------------------------------------------------------------

def _describe(values: list) -> dict:
    if not values:
        return {"min": 0, "max": 0, "mean": 0.0, "median": 0.0, "stdev": 0.0}
    return {
        "min": min(values),
        "max": max(values),
        "mean": round(statistics.mean(values), 2),
        "median": statistics.median(values),
        "stdev": round(statistics.stdev(values), 2) if len(values) > 1 else 0.0,
    }


def profile(instances: list[BenchmarkInstance]) -> dict:
    """Appendix-style profile: counts, tier split, target and token statistics."""
    total = len(instances)
    per_tier = {t.value: 0 for t in Tier}
    for inst in instances:
        per_tier[inst.tier.value] += 1
    question_tokens = [estimate_tokens(render_eval_prompt(i)) for i in instances]
    answer_tokens = [estimate_tokens(i.solution_text) for i in instances]
    return {
        "instances": total,
        "tiers": {
            t: {"count": c,
                "percent": round(100.0 * c / total, 2) if total else 0.0}
            for t, c in per_tier.items()
        },
        "target_n": _describe([i.target_n for i in instances]),
        "unique_targets": sorted({i.target_n for i in instances}),
        "examples_per_instance": _describe([len(i.examples) for i in instances]),
        "question_tokens": _describe(question_tokens),
        "answer_tokens": _describe(answer_tokens),
    }
