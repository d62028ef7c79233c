"""Client unit tests: URL handling, HTTP calls, group advantages, parity."""

import math

import pytest

from py_client import DEFAULT_URL_ENV, RewardClient, RewardServiceError, group_advantages

GT = "(assert (and (and (<= in0 in2) (<= in1 in2)) (<= in0 in1)))"
RIGHT = "<think>t</think><answer>" + GT + "</answer>"
TEMPLATE_ONLY = "<think>t</think><answer>(assert (< in0 in1))</answer>"
NOTHING = "free text"


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------

def test_base_url_from_env(monkeypatch):
    monkeypatch.setenv(DEFAULT_URL_ENV, "http://example.invalid:1234/")
    client = RewardClient()
    assert client.base_url == "http://example.invalid:1234"


def test_missing_url_raises(monkeypatch):
    monkeypatch.delenv(DEFAULT_URL_ENV, raising=False)
    with pytest.raises(ValueError):
        RewardClient()


def test_explicit_url_wins(monkeypatch):
    monkeypatch.setenv(DEFAULT_URL_ENV, "http://wrong.invalid")
    client = RewardClient(base_url="http://right.invalid/")
    assert client.base_url == "http://right.invalid"


def test_unreachable_service(monkeypatch):
    client = RewardClient(base_url="http://127.0.0.1:1", timeout_s=0.5)
    with pytest.raises(RewardServiceError):
        client.reward(RIGHT, GT)


# ---------------------------------------------------------------------------
# Against a live service
# ---------------------------------------------------------------------------

def test_single_reward(reward_service):
    url, _ = reward_service
    client = RewardClient(base_url=url)
    resp = client.reward(RIGHT, GT, tag="t1")
    assert resp["reward"] == 1.0
    assert resp["tag"] == "t1"


def test_batch_preserves_order(reward_service):
    url, _ = reward_service
    client = RewardClient(base_url=url)
    items = [{"completion": RIGHT, "ground_truth": GT, "tag": str(i)}
             for i in range(10)]
    items[4]["completion"] = NOTHING
    out = client.reward_batch(items)
    assert [r["tag"] for r in out] == [str(i) for i in range(10)]
    assert out[4]["reward"] == 0.0


def test_group_rewards(reward_service):
    url, _ = reward_service
    client = RewardClient(base_url=url)
    rewards = client.group_rewards([RIGHT, TEMPLATE_ONLY, NOTHING], GT)
    assert rewards == [1.0, 0.1, 0.0]


def test_group_rewards_surfaces_request_errors(reward_service):
    url, _ = reward_service
    client = RewardClient(base_url=url)
    with pytest.raises(RewardServiceError):
        client.group_rewards(["x"], "(assert")  # ground truth does not parse


def test_http_error_status_raises(reward_service):
    url, _ = reward_service
    client = RewardClient(base_url=url)
    with pytest.raises(RewardServiceError):
        client._post("/v1/nothing", {})


# ---------------------------------------------------------------------------
# Group advantages
# ---------------------------------------------------------------------------

def test_advantages_zero_mean_unit_spread():
    adv = group_advantages([1.0, 0.0])
    # mean 0.5, sample stddev ~0.7071
    assert abs(adv[0] - 0.5 / (math.sqrt(0.5) + 1e-8)) < 1e-12
    assert abs(sum(adv)) < 1e-12
    assert adv[0] > 0 > adv[1]


def test_advantages_use_sample_stddev():
    rewards = [1.0, 0.1, 0.1, 0.0]
    import statistics

    mean = statistics.mean(rewards)
    sd = statistics.stdev(rewards)
    expected = [(r - mean) / (sd + 1e-8) for r in rewards]
    assert group_advantages(rewards) == expected


def test_advantages_zero_variance_group_is_all_zero():
    assert group_advantages([0.7, 0.7, 0.7]) == [0.0, 0.0, 0.0]
    assert group_advantages([1.0]) == [0.0]


def test_advantages_reject_empty():
    with pytest.raises(ValueError):
        group_advantages([])


def test_advantages_ordering_matches_rewards():
    rewards = [0.0, 1.0, 0.1, 0.9]
    adv = group_advantages(rewards)
    assert sorted(range(4), key=lambda i: adv[i]) == \
        sorted(range(4), key=lambda i: rewards[i])


# ---------------------------------------------------------------------------
# [SECONDARY] acceptance: HTTP parity with direct service invocation
# ---------------------------------------------------------------------------

def test_secondary_acceptance_http_matches_direct_invocation(reward_service):
    from wcbench.service import handle_request

    url, service_cfg = reward_service
    client = RewardClient(base_url=url)
    answers = [
        GT,
        "(assert (and (<= in0 in1) (and (<= in1 in2) (<= in0 in2))))",
        "(assert (<= in0 in1))",
        "(assert (< in0 in1))",
        "None",
    ]
    canned = []
    for i in range(20):
        answer = answers[i % len(answers)]
        shape = i % 4
        if shape == 0:
            completion = f"<think>step {i}</think><answer>{answer}</answer>"
        elif shape == 1:
            completion = f"untemplated <answer>{answer}</answer>"
        elif shape == 2:
            completion = f"<think>unclosed {answer}"
        else:
            completion = f"<think>t</think><answer>{answer}</answer> extra"
        canned.append({"completion": completion, "ground_truth": GT,
                       "tag": f"case-{i}"})

    via_http = client.reward_batch(canned)
    direct = [handle_request(dict(req), service_cfg) for req in canned]
    assert via_http == direct
    assert len(via_http) == 20
    print("PASS: SECONDARY py_client: 20 canned requests over HTTP match "
          "direct service invocation exactly")
