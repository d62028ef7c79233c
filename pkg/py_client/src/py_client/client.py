"""Reward-service HTTP client and GRPO-style group advantages.

The client speaks only the service's public HTTP interface:
POST /v1/reward for single requests and POST /v1/reward/batch for
order-preserving batches.  The service URL comes from the constructor or the
WARP_SGF_URL environment variable.
"""

from __future__ import annotations

import os
import statistics
from dataclasses import dataclass, field
from typing import Optional

import requests

DEFAULT_URL_ENV = "WARP_SGF_URL"
ADVANTAGE_EPS = 1e-8


class RewardServiceError(RuntimeError):
    """The service was unreachable or answered outside its protocol."""


@dataclass
class RewardClient:
    base_url: Optional[str] = None
    timeout_s: float = 30.0
    session: requests.Session = field(default_factory=requests.Session)

    def __post_init__(self):
        if self.base_url is None:
            self.base_url = os.environ.get(DEFAULT_URL_ENV)
        if not self.base_url:
            raise ValueError(
                f"no service URL: pass base_url or set {DEFAULT_URL_ENV}")
        self.base_url = self.base_url.rstrip("/")

    def _post(self, path: str, payload) -> dict:
        url = f"{self.base_url}{path}"
        try:
            resp = self.session.post(url, json=payload, timeout=self.timeout_s)
        except requests.RequestException as exc:
            raise RewardServiceError(f"cannot reach {url}: {exc}") from exc
        if resp.status_code != 200:
            raise RewardServiceError(
                f"{url} answered {resp.status_code}: {resp.text[:200]}")
        try:
            return resp.json()
        except ValueError as exc:
            raise RewardServiceError(f"{url} returned non-JSON body") from exc

    def reward(self, completion: str, ground_truth: str,
               tag: Optional[str] = None) -> dict:
        """Score one completion; returns the service's response object."""
        body = {"completion": completion, "ground_truth": ground_truth}
        if tag is not None:
            body["tag"] = tag
        return self._post("/v1/reward", body)

    def reward_batch(self, items: list) -> list:
        """Score a batch; responses come back in request order.

        Each item is a dict with at least 'completion' and 'ground_truth'.
        """
        data = self._post("/v1/reward/batch", {"requests": list(items)})
        responses = data.get("responses")
        if not isinstance(responses, list) or len(responses) != len(items):
            raise RewardServiceError(
                "batch reply malformed or not the same length as the request")
        return responses

    def group_rewards(self, completions: list, ground_truth: str) -> list:
        """Scalar rewards for one prompt's completion group."""
        responses = self.reward_batch(
            [{"completion": c, "ground_truth": ground_truth}
             for c in completions])
        rewards = []
        for resp in responses:
            if "reward" not in resp:
                raise RewardServiceError(f"request rejected: {resp}")
            rewards.append(float(resp["reward"]))
        return rewards


def group_advantages(rewards: list, eps: float = ADVANTAGE_EPS) -> list:
    """GRPO-style advantages: (r_i - mean) / (sample stddev + eps).

    A group with no variance (including a single completion) gets all-zero
    advantages rather than amplifying noise through the epsilon.
    """
    if not rewards:
        raise ValueError("rewards must be non-empty")
    rewards = [float(r) for r in rewards]
    mean = statistics.mean(rewards)
    stddev = statistics.stdev(rewards) if len(rewards) > 1 else 0.0
    if stddev == 0.0:
        return [0.0] * len(rewards)
    return [(r - mean) / (stddev + eps) for r in rewards]
