"""Evaluation harness: score completions against a benchmark and aggregate.

Completions come either from a prerecorded newline-delimited JSON file keyed
by (instance id, trial) or from a live chat-completions endpoint.  An
instance counts as correct when its extracted answer parses and is
solver-verified equivalent to the held-out solution.
"""

from __future__ import annotations

import json
import statistics
import time
from dataclasses import dataclass
from typing import Optional, Union

from .benchmark import BenchmarkInstance, render_eval_prompt
from .equivalence import Equivalent, SolverConfig, Unknown, check_equivalence
from .reward import extract_answer
from .smtlib import ParseError, parse_formula

FAILURE_CLASSES = ("no_answer", "parse_error", "not_equivalent", "solver_unknown")

EVAL_INSTRUCTIONS = """All per-variable constraints must be combined using a top-level (assert (and ...)) clause.
The output must be in exact, canonical SMT-LIB format without extra commentary in the constraint string.
Show your work in <think> </think> tags. And return the final SMT-LIB constraint string in <answer> </answer> tags.
For example: <answer>(assert (and  ( >=  in0 97)  ( <=  in0 122)))</answer>.
[Question]"""


class EndpointUnreachable(RuntimeError):
    pass


class MissingCompletion(KeyError):
    pass


@dataclass
class ModelEndpoint:
    base_url: str
    model_name: str
    api_key: str = ""
    max_retries: int = 3
    request_timeout_ms: int = 60000
    temperature: float = 0.0

    def __post_init__(self):
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")
        if self.request_timeout_ms <= 0:
            raise ValueError("request_timeout_ms must be positive")


@dataclass
class CompletionsFile:
    path: str

    def load(self) -> dict:
        table = {}
        with open(self.path) as fh:
            for line in fh:
                if not line.strip():
                    continue
                rec = json.loads(line)
                table[(rec["instance_id"], int(rec["trial"]))] = rec["completion"]
        return table


@dataclass
class EvalReport:
    trials: list  # per-trial accuracy in [0, 1]
    mean: float
    stddev: float
    per_tier: dict  # tier -> mean accuracy
    per_program: dict
    failures: list  # (trial, instance_id, failure_class)
    instances: int
    single_trial: bool = False

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "mean": self.mean,
            "stddev": self.stddev,
            "per_tier": self.per_tier,
            "per_program": self.per_program,
            "failures": [list(f) for f in self.failures],
            "instances": self.instances,
            "single_trial": self.single_trial,
        }


def render_eval_request(instance: BenchmarkInstance,
                        endpoint: Optional[ModelEndpoint] = None) -> dict:
    """Chat payload: fixed system message plus the instruction set with the
    benchmark prompt in the [Question] slot.  No output-length cap is set."""
    user = EVAL_INSTRUCTIONS.replace("[Question]", render_eval_prompt(instance))
    payload = {
        "messages": [
            {"role": "system", "content": "You are a helpful assistant."},
            {"role": "user", "content": user},
        ],
    }
    if endpoint is not None:
        payload["model"] = endpoint.model_name
        payload["temperature"] = endpoint.temperature
    return payload


def score_instance(instance: BenchmarkInstance, completion: str,
                   cfg: Optional[SolverConfig] = None) -> tuple[bool, Optional[str]]:
    """(correct, failure_class); inconclusive verdicts count as incorrect."""
    answer = extract_answer(completion)
    if answer is None:
        return False, "no_answer"
    try:
        candidate = parse_formula(answer)
    except ParseError:
        return False, "parse_error"
    solution = parse_formula(instance.solution_text)
    verdict = check_equivalence(candidate, solution, cfg)
    if isinstance(verdict, Equivalent):
        return True, None
    if isinstance(verdict, Unknown):
        return False, "solver_unknown"
    return False, "not_equivalent"


def _query_endpoint(endpoint: ModelEndpoint, payload: dict) -> str:
    import requests

    headers = {"Content-Type": "application/json"}
    if endpoint.api_key:
        headers["Authorization"] = f"Bearer {endpoint.api_key}"
    url = endpoint.base_url.rstrip("/") + "/chat/completions"
    last_exc = None
    for attempt in range(endpoint.max_retries + 1):
        try:
            resp = requests.post(url, json=payload, headers=headers,
                                 timeout=endpoint.request_timeout_ms / 1000.0)
            resp.raise_for_status()
            data = resp.json()
            return data["choices"][0]["message"]["content"]
        except Exception as exc:  # noqa: BLE001 - retry then surface
            last_exc = exc
            time.sleep(min(2 ** attempt, 10))
    raise EndpointUnreachable(f"{url}: {last_exc}")


def run_eval(instances: list[BenchmarkInstance],
             source: Union[ModelEndpoint, CompletionsFile],
             trials: int = 3,
             cfg: Optional[SolverConfig] = None) -> EvalReport:
    if trials < 1:
        raise ValueError("trials must be >= 1")
    recorded = source.load() if isinstance(source, CompletionsFile) else None
    per_trial_flags: list[dict] = []
    failures = []
    for trial in range(1, trials + 1):
        flags = {}
        for inst in instances:
            if recorded is not None:
                key = (inst.id, trial)
                if key not in recorded:
                    raise MissingCompletion(f"no completion for {key}")
                completion = recorded[key]
            else:
                completion = _query_endpoint(source, render_eval_request(inst, source))
            ok, failure = score_instance(inst, completion, cfg)
            flags[inst.id] = ok
            if not ok:
                failures.append((trial, inst.id, failure))
        per_trial_flags.append(flags)
    return aggregate(instances, per_trial_flags, failures)


def aggregate(instances: list[BenchmarkInstance],
              per_trial_flags: list[dict],
              failures: list) -> EvalReport:
    """Mean and sample standard deviation over per-trial accuracies; tier and
    program breakdowns are computed per trial, then averaged."""
    trials = []
    for flags in per_trial_flags:
        correct = sum(1 for ok in flags.values() if ok)
        trials.append(correct / len(instances) if instances else 0.0)
    mean = statistics.mean(trials)
    stddev = statistics.stdev(trials) if len(trials) > 1 else 0.0

    def breakdown(key_fn) -> dict:
        keys = sorted({key_fn(i) for i in instances})
        out = {}
        for key in keys:
            members = [i.id for i in instances if key_fn(i) == key]
            per_trial = [sum(1 for m in members if flags[m]) / len(members)
                         for flags in per_trial_flags]
            out[key] = round(statistics.mean(per_trial), 4)
        return out

    return EvalReport(
        trials=trials,
        mean=mean,
        stddev=stddev,
        per_tier=breakdown(lambda i: i.tier.value),
        per_program=breakdown(lambda i: i.program),
        failures=failures,
        instances=len(instances),
        single_trial=(len(trials) == 1),
    )


def aggregate_accuracies(trial_accuracies: list) -> tuple[float, float]:
    """Plain mean and sample stddev of already-computed trial accuracies."""
    if not trial_accuracies:
        raise ValueError("need at least one trial")
    mean = statistics.mean(trial_accuracies)
    stddev = statistics.stdev(trial_accuracies) if len(trial_accuracies) > 1 else 0.0
    return mean, stddev
