"""Reward service: line-delimited JSON over stdio, or HTTP for RL trainers.

Endpoints: POST /v1/reward (single request) and POST /v1/reward/batch
(arrays, order-preserving).  Requests are stateless; malformed input yields
a per-request error object, never a crash.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Optional

from .equivalence import SolverConfig
from .reward import compute_reward
from .smtlib import ParseError, parse_formula


@dataclass
class ServiceConfig:
    solver: SolverConfig
    strict_semantic_requires_template: bool = False


def handle_request(obj: dict, cfg: ServiceConfig) -> dict:
    """One reward request -> one response object (or an error object)."""
    if not isinstance(obj, dict):
        return {"error": "request must be a JSON object"}
    completion = obj.get("completion")
    ground_truth = obj.get("ground_truth")
    if not isinstance(completion, str) or not isinstance(ground_truth, str):
        return {"error": "fields 'completion' and 'ground_truth' (strings) required"}
    try:
        gt = parse_formula(ground_truth)
    except ParseError as exc:
        return {"error": f"ground_truth does not parse: {exc}"}
    breakdown = compute_reward(
        completion, gt, cfg.solver,
        strict_semantic_requires_template=cfg.strict_semantic_requires_template)
    resp = {
        "reward": breakdown.reward,
        "syntactic": breakdown.syntactic_ok,
        "semantic": breakdown.semantic_ok,
        "detail": breakdown.verdict_detail,
        "extracted_answer": breakdown.extracted_answer,
    }
    if "tag" in obj:
        resp["tag"] = obj["tag"]
    return resp


def handle_batch(objs: list, cfg: ServiceConfig) -> list:
    return [handle_request(o, cfg) for o in objs]


# ---------------------------------------------------------------------------
# stdio mode
# ---------------------------------------------------------------------------

def serve_stdio(cfg: ServiceConfig, stdin=None, stdout=None):
    """One JSON request per input line, one JSON response per output line."""
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout
    for lineno, line in enumerate(stdin, 1):
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError:
            resp = {"error": "parse", "line": lineno}
        else:
            if isinstance(obj, list):
                resp = handle_batch(obj, cfg)
            else:
                resp = handle_request(obj, cfg)
        stdout.write(json.dumps(resp) + "\n")
        stdout.flush()


# ---------------------------------------------------------------------------
# HTTP mode
# ---------------------------------------------------------------------------

def _make_handler(cfg: ServiceConfig):
    class RewardHandler(BaseHTTPRequestHandler):
        def log_message(self, fmt, *args):  # keep test output quiet
            pass

        def _reply(self, status: int, payload):
            body = json.dumps(payload).encode()
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def do_POST(self):
            length = int(self.headers.get("Content-Length", 0))
            raw = self.rfile.read(length)
            try:
                obj = json.loads(raw)
            except json.JSONDecodeError:
                self._reply(400, {"error": "invalid JSON body"})
                return
            if self.path == "/v1/reward":
                self._reply(200, handle_request(obj, cfg))
            elif self.path == "/v1/reward/batch":
                items = obj.get("requests") if isinstance(obj, dict) else obj
                if not isinstance(items, list):
                    self._reply(400, {"error": "batch body must be a list or "
                                               "{'requests': [...]}"})
                    return
                self._reply(200, {"responses": handle_batch(items, cfg)})
            else:
                self._reply(404, {"error": f"unknown path {self.path}"})

    return RewardHandler


def make_http_server(bind: str, cfg: ServiceConfig) -> ThreadingHTTPServer:
    host, _, port = bind.rpartition(":")
    server = ThreadingHTTPServer((host or "127.0.0.1", int(port)),
                                 _make_handler(cfg))
    return server


def serve_http(bind: str, cfg: ServiceConfig):
    server = make_http_server(bind, cfg)
    try:
        server.serve_forever()
    finally:
        server.server_close()


def serve(mode: str, bind: str = "127.0.0.1:8841",
          cfg: Optional[ServiceConfig] = None):
    if cfg is None:
        cfg = ServiceConfig(solver=SolverConfig())
    if mode == "stdio":
        serve_stdio(cfg)
    elif mode == "http":
        serve_http(bind, cfg)
    else:
        raise ValueError(f"unknown mode {mode!r}")
