#!/usr/bin/env python3
"""Score a canned completion group and print its GRPO advantages.

Uses the service at WARP_SGF_URL when set; otherwise launches
``wcbench serve`` on a local port for the duration of the run.
"""

import os
import subprocess
import sys
import time

from py_client import RewardClient, group_advantages

GROUND_TRUTH = ("(assert (and (and (<= in0 in2) (<= in1 in2)) "
                "(<= in0 in1)))")

COMPLETIONS = [
    # perfect: template plus an equivalent (reordered) constraint
    "<think>extend the sorted-order pattern</think>"
    "<answer>(assert (and (<= in0 in1) (and (<= in1 in2) "
    "(<= in0 in2))))</answer>",
    # right constraint, no template
    "here you go: <answer>" + GROUND_TRUTH + "</answer>",
    # template kept, constraint too weak
    "<think>looks linear</think><answer>(assert (<= in0 in1))</answer>",
    # no tags at all
    "(assert (<= in0 in1))",
]


def ensure_service():
    url = os.environ.get("WARP_SGF_URL")
    if url:
        return url, None
    bind = "127.0.0.1:8841"
    proc = subprocess.Popen(
        ["wcbench", "serve", "--mode", "http", "--bind", bind],
        stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL)
    time.sleep(1.0)
    return f"http://{bind}", proc


def main() -> int:
    url, proc = ensure_service()
    try:
        client = RewardClient(base_url=url)
        rewards = client.group_rewards(COMPLETIONS, GROUND_TRUTH)
        advantages = group_advantages(rewards)
        print(f"service: {url}")
        print("idx\treward\tadvantage")
        for i, (r, a) in enumerate(zip(rewards, advantages)):
            print(f"{i}\t{r:.1f}\t{a:+.4f}")
    finally:
        if proc is not None:
            proc.terminate()
            proc.wait(timeout=5)
    return 0


if __name__ == "__main__":
    sys.exit(main())
