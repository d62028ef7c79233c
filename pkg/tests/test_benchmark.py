"""Benchmark builder: tiers, token budgeting, reduction, determinism."""

import json

import pytest

from wcbench.benchmark import (
    EXCLUDED,
    BenchmarkInstance,
    BuildConfig,
    Excluded,
    InfeasibleTierMix,
    InvalidInstance,
    Tier,
    UnknownProgram,
    build_benchmark,
    classify_tier,
    estimate_tokens,
    load_benchmark,
    profile,
    reduce_examples,
    render_eval_prompt,
    render_prompt_for_examples,
    render_training_prompt,
)
from wcbench.equivalence import Equivalent, check_equivalence
from wcbench.smtlib import parse_formula


def _example(n, program="QuickSort"):
    from wcbench import generators
    from wcbench.smtlib import serialize_canonical

    prog = generators.get_program(program)
    return (n, serialize_canonical(generators.generate(prog, n)))


def quicksort_example(n):
    return _example(n)


def make_instance(example_ns=(1, 2, 3), target=4, program="QuickSort"):
    from wcbench import generators
    from wcbench.smtlib import serialize_canonical

    prog = generators.get_program(program)
    jump = target - max(example_ns)
    return BenchmarkInstance(
        id=f"{program.lower()}-test-{target}",
        program=program,
        examples=tuple(_example(n, program) for n in example_ns),
        target_n=target,
        solution_text=serialize_canonical(generators.generate(prog, target)),
        tier=classify_tier(jump),
        jump=jump,
    )


# ---------------------------------------------------------------------------
# Tiers
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("jump,tier", [
    (1, Tier.SMALL), (5, Tier.SMALL),
    (6, Tier.MEDIUM), (15, Tier.MEDIUM),
    (16, Tier.LARGE), (29, Tier.LARGE),
])
def test_classify_tier_boundaries(jump, tier):
    assert classify_tier(jump) == tier


def test_classify_tier_rejects_nonpositive_jump():
    with pytest.raises(ValueError):
        classify_tier(0)


def test_tier_example_from_sizes():
    # examples up to n=5 with target 11 is a jump of 6: medium
    assert classify_tier(11 - 5) == Tier.MEDIUM


# ---------------------------------------------------------------------------
# Token estimation
# ---------------------------------------------------------------------------

def test_estimate_tokens_counts_lexemes():
    assert estimate_tokens("(assert (<= in0 in1))") == 8
    assert estimate_tokens("What is the constraint for N=11?") == 6
    assert estimate_tokens("") == 0
    assert estimate_tokens("   ") == 0


# ---------------------------------------------------------------------------
# Prompts
# ---------------------------------------------------------------------------

def test_render_eval_prompt_shape():
    inst = make_instance()
    prompt = render_eval_prompt(inst)
    lines = prompt.splitlines()
    assert lines[0] == ("Given the following examples of constraints for "
                        "increasing input sizes:")
    assert lines[1] == "N=1: None"
    assert lines[2] == "N=2: (assert (<= in0 in1))"
    assert lines[3].startswith("N=3: (assert (and ")
    assert lines[4] == "What is the constraint for N=4?"


def test_render_training_prompt():
    inst = make_instance()
    prompt = render_training_prompt(inst)
    assert "[EXAMPLES]" not in prompt and "[QUESTION]" not in prompt
    assert "N=2: (assert (<= in0 in1))" in prompt
    assert "What is the constraint for N=4?" in prompt
    assert "<answer>(assert (and  ( >=  in0 97)  ( <=  in0 122)))</answer>" in prompt
    assert prompt.endswith("Assistant: Let me solve this step by step.\n<think>")


# ---------------------------------------------------------------------------
# Reduction
# ---------------------------------------------------------------------------

def test_reduce_keeps_all_when_under_budget():
    examples = [quicksort_example(n) for n in (1, 2, 3)]
    assert reduce_examples(examples, 10_000, 4) == examples


def test_reduce_picks_first_lower_median_last():
    examples = [quicksort_example(n) for n in range(1, 8)]  # 7 examples
    full = estimate_tokens(render_prompt_for_examples(examples, 9))
    reduced = reduce_examples(examples, full - 1, 9)
    assert [n for n, _ in reduced] == [1, 4, 7]


def test_reduce_lower_median_on_even_count():
    examples = [quicksort_example(n) for n in range(1, 7)]  # 6 examples
    full = estimate_tokens(render_prompt_for_examples(examples, 8))
    reduced = reduce_examples(examples, full - 1, 8)
    assert [n for n, _ in reduced] == [1, 3, 6]


def test_reduce_excludes_when_still_over_budget():
    examples = [quicksort_example(n) for n in (10, 15, 20)]
    assert isinstance(reduce_examples(examples, 5, 25), Excluded)
    assert reduce_examples(examples, 5, 25) is EXCLUDED


def test_reduce_output_is_subsequence():
    examples = [quicksort_example(n) for n in range(1, 10)]
    reduced = reduce_examples(examples, 60, 12)
    if not isinstance(reduced, Excluded):
        it = iter(examples)
        assert all(e in it for e in reduced)


# ---------------------------------------------------------------------------
# Instance validation
# ---------------------------------------------------------------------------

def test_instance_roundtrips_through_json():
    inst = make_instance()
    again = BenchmarkInstance.from_json(inst.to_json())
    assert again == inst


def test_instance_validation_failures():
    good = make_instance()
    bad_order = BenchmarkInstance(
        id=good.id, program=good.program,
        examples=(good.examples[1], good.examples[0], good.examples[2]),
        target_n=good.target_n, solution_text=good.solution_text,
        tier=good.tier, jump=good.jump)
    with pytest.raises(InvalidInstance):
        bad_order.validate()
    too_few = BenchmarkInstance(
        id=good.id, program=good.program, examples=good.examples[:2],
        target_n=good.target_n, solution_text=good.solution_text,
        tier=good.tier, jump=good.jump)
    with pytest.raises(InvalidInstance):
        too_few.validate()
    target_too_big = BenchmarkInstance(
        id=good.id, program=good.program, examples=good.examples,
        target_n=31, solution_text=good.solution_text,
        tier=Tier.LARGE, jump=28)
    with pytest.raises(InvalidInstance):
        target_too_big.validate()
    wrong_tier = BenchmarkInstance(
        id=good.id, program=good.program, examples=good.examples,
        target_n=good.target_n, solution_text=good.solution_text,
        tier=Tier.LARGE, jump=good.jump)
    with pytest.raises(InvalidInstance):
        wrong_tier.validate()
    stray_vars = BenchmarkInstance(
        id=good.id, program=good.program, examples=good.examples,
        target_n=good.target_n, solution_text="(assert (<= in0 in9))",
        tier=good.tier, jump=good.jump)
    with pytest.raises(InvalidInstance):
        stray_vars.validate()


# ---------------------------------------------------------------------------
# Build
# ---------------------------------------------------------------------------

def _build(tmp_path, name="bench.jsonl", **kw):
    cfg = BuildConfig(
        programs=kw.pop("programs", ["QuickSort", "BubbleSort", "SameHundred"]),
        tier_mix=kw.pop("tier_mix", {"small": 4, "medium": 4, "large": 2}),
        seed=kw.pop("seed", 42),
        **kw)
    out = tmp_path / name
    report = build_benchmark(cfg, str(out))
    return report, out


def test_build_respects_tier_mix(tmp_path):
    report, out = _build(tmp_path)
    assert report.emitted == 10
    instances = load_benchmark(str(out))
    by_tier = {t.value: 0 for t in Tier}
    for inst in instances:
        by_tier[inst.tier.value] += 1
    assert by_tier == {"small": 4, "medium": 4, "large": 2}


def test_build_is_deterministic(tmp_path):
    _, out1 = _build(tmp_path, name="a.jsonl")
    _, out2 = _build(tmp_path, name="b.jsonl")
    assert out1.read_bytes() == out2.read_bytes()
    _, out3 = _build(tmp_path, name="c.jsonl", seed=43)
    assert out1.read_bytes() != out3.read_bytes()


def test_build_solutions_match_generators(tmp_path):
    from wcbench import generators

    _, out = _build(tmp_path)
    for inst in load_benchmark(str(out)):
        prog = generators.get_program(inst.program)
        truth = generators.generate(prog, inst.target_n)
        verdict = check_equivalence(parse_formula(inst.solution_text), truth)
        assert isinstance(verdict, Equivalent), inst.id


def test_build_unknown_program(tmp_path):
    with pytest.raises(UnknownProgram):
        _build(tmp_path, programs=["NoSuchProgram"])


def test_build_infeasible_tier_mix(tmp_path):
    with pytest.raises(InfeasibleTierMix):
        _build(tmp_path, tier_mix={"large": 2}, max_target_n=10)


def test_build_excludes_over_budget_instances(tmp_path):
    report, out = _build(tmp_path, programs=["QuickSort"],
                         tier_mix={"small": 3}, token_budget=120)
    instances = load_benchmark(str(out))
    assert report.emitted == len(instances) == 3
    for inst in instances:
        prompt_tokens = estimate_tokens(render_eval_prompt(inst))
        assert prompt_tokens <= 120


def test_load_reports_first_malformed_line(tmp_path):
    path = tmp_path / "broken.jsonl"
    path.write_text(make_instance().to_json() + "\nnot json\n")
    with pytest.raises(InvalidInstance) as err:
        load_benchmark(str(path))
    assert ":2:" in str(err.value)


# ---------------------------------------------------------------------------
# Profile
# ---------------------------------------------------------------------------

def test_profile_counts_and_percentages(tmp_path):
    _, out = _build(tmp_path)
    stats = profile(load_benchmark(str(out)))
    assert stats["instances"] == 10
    assert stats["tiers"]["small"] == {"count": 4, "percent": 40.0}
    assert stats["tiers"]["large"] == {"count": 2, "percent": 20.0}
    assert stats["target_n"]["max"] <= 30
    assert stats["examples_per_instance"]["min"] >= 3
    assert stats["question_tokens"]["max"] <= 2048


def test_profile_empty():
    stats = profile([])
    assert stats["instances"] == 0
    assert stats["tiers"]["small"]["percent"] == 0.0
