import pathlib
import sys
import threading

import pytest

from wcbench.equivalence import SolverConfig
from wcbench.service import ServiceConfig, make_http_server


@pytest.fixture(scope="session")
def fake_solver_cmd():
    """Command line for the enumeration-backed stand-in SMT solver."""
    path = pathlib.Path(__file__).with_name("fake_solver.py")
    return [sys.executable, str(path)]


@pytest.fixture()
def reward_server():
    """Reward service on an ephemeral port; yields its base URL."""
    server = make_http_server("127.0.0.1:0", ServiceConfig(solver=SolverConfig()))
    port = server.server_address[1]
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        yield f"http://127.0.0.1:{port}"
    finally:
        server.shutdown()
        server.server_close()
