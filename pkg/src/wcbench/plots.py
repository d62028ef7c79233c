"""Figure rendering for benchmark profiles and evaluation reports."""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .benchmark import BenchmarkInstance, estimate_tokens, render_eval_prompt


def _save(fig, out_dir: str, name: str) -> str:
    path = os.path.join(out_dir, name)
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return path


def render_profile_figures(instances: list[BenchmarkInstance],
                           out_dir: str) -> list[str]:
    os.makedirs(out_dir, exist_ok=True)
    written = []

    tiers = ["small", "medium", "large"]
    counts = [sum(1 for i in instances if i.tier.value == t) for t in tiers]
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.bar(tiers, counts, color=["#4c9f70", "#e0a84c", "#c75146"])
    ax.set_ylabel("instances")
    ax.set_title("Instances per difficulty tier")
    written.append(_save(fig, out_dir, "tier_distribution.png"))

    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.hist([i.target_n for i in instances], bins=range(4, 32), color="#4c72b0",
            edgecolor="white")
    ax.set_xlabel("target N")
    ax.set_ylabel("instances")
    ax.set_title("Target N distribution")
    written.append(_save(fig, out_dir, "target_n_distribution.png"))

    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.hist([len(i.examples) for i in instances], bins=range(3, 20),
            color="#55a868", edgecolor="white")
    ax.set_xlabel("examples per instance")
    ax.set_ylabel("instances")
    ax.set_title("Example-count distribution")
    written.append(_save(fig, out_dir, "example_count_distribution.png"))

    fig, ax = plt.subplots(figsize=(6, 3.5))
    q = [estimate_tokens(render_eval_prompt(i)) for i in instances]
    a = [estimate_tokens(i.solution_text) for i in instances]
    ax.hist([q, a], bins=20, label=["question", "answer"],
            color=["#4c72b0", "#dd8452"])
    ax.set_xlabel("estimated tokens")
    ax.set_ylabel("instances")
    ax.legend()
    ax.set_title("Token estimate distributions")
    written.append(_save(fig, out_dir, "token_distributions.png"))
    return written


def render_eval_figures(report: dict, out_dir: str) -> list[str]:
    os.makedirs(out_dir, exist_ok=True)
    written = []

    fig, ax = plt.subplots(figsize=(5, 3.5))
    trials = report["trials"]
    ax.bar([f"trial {i}" for i in range(1, len(trials) + 1)],
           [100 * t for t in trials], color="#4c72b0")
    ax.axhline(100 * report["mean"], color="#c44e52", linestyle="--",
               label=f"mean {100 * report['mean']:.2f}%")
    ax.set_ylabel("accuracy (%)")
    ax.set_title("Accuracy per trial")
    ax.legend()
    written.append(_save(fig, out_dir, "accuracy_per_trial.png"))

    fig, ax = plt.subplots(figsize=(5, 3.5))
    tiers = list(report["per_tier"])
    ax.bar(tiers, [100 * report["per_tier"][t] for t in tiers], color="#55a868")
    ax.set_ylabel("accuracy (%)")
    ax.set_title("Accuracy per tier")
    written.append(_save(fig, out_dir, "accuracy_per_tier.png"))

    fig, ax = plt.subplots(figsize=(6, 3.5))
    progs = list(report["per_program"])
    ax.barh(progs, [100 * report["per_program"][p] for p in progs],
            color="#8172b3")
    ax.set_xlabel("accuracy (%)")
    ax.set_title("Accuracy per program")
    written.append(_save(fig, out_dir, "accuracy_per_program.png"))
    return written
