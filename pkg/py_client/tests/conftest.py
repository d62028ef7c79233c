import threading

import pytest


@pytest.fixture()
def reward_service():
    """Live reward service on an ephemeral port.

    The service package is a test-only dependency here; the client under test
    talks to it exclusively over HTTP.
    """
    from wcbench.equivalence import SolverConfig
    from wcbench.service import ServiceConfig, make_http_server

    cfg = ServiceConfig(solver=SolverConfig())
    server = make_http_server("127.0.0.1:0", cfg)
    port = server.server_address[1]
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        yield f"http://127.0.0.1:{port}", cfg
    finally:
        server.shutdown()
        server.server_close()
