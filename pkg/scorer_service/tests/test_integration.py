"""End-to-end: the capsal extraction client against a live service.

Starts uvicorn on a local port with the random-tiny model and lets the
primary toolkit resolve an ambiguous phrase over the wire. Skipped when
capsal is not installed alongside.
"""

import socket
import threading
import time

import pytest

capsal_extraction = pytest.importorskip("capsal.extraction")

import uvicorn  # noqa: E402

from mlm_scorer.app import create_app  # noqa: E402


@pytest.fixture(scope="module")
def live_endpoint():
    with socket.socket() as probe:
        probe.bind(("127.0.0.1", 0))
        port = probe.getsockname()[1]
    config = uvicorn.Config(
        create_app(model_id="random-tiny", batch_size=4),
        host="127.0.0.1",
        port=port,
        log_level="error",
    )
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.time() + 30
    import requests

    endpoint = f"http://127.0.0.1:{port}"
    while time.time() < deadline:
        try:
            if requests.get(f"{endpoint}/v1/health", timeout=1).status_code == 200:
                break
        except requests.RequestException:
            time.sleep(0.1)
    else:
        pytest.fail("service did not become healthy")
    yield endpoint
    server.should_exit = True
    thread.join(timeout=10)


def ambiguous_request():
    from capsal.extraction import Candidate, DisambiguationRequest
    from capsal.wordnet.tree import SynsetId

    return DisambiguationRequest(
        caption_text="a snake in the market",
        span=(2, 7),
        candidates=(
            Candidate(SynsetId("snake.n.01", 1), SynsetId("snake.n.01", 1), "snake"),
            Candidate(SynsetId("snake.n.02", 2), SynsetId("person.n.01", 3), "snake"),
        ),
    )


def test_remote_scorer_round_trip(live_endpoint):
    from capsal.scorer_client import RemoteScorer

    scorer = RemoteScorer(live_endpoint)
    request = ambiguous_request()
    scores = scorer.score(request)
    assert len(scores) == len(request.candidates)
    assert scores == scorer.score(request)  # deterministic over the wire


def test_resolution_through_live_service(live_endpoint):
    from capsal.extraction import ResilientScorer, resolve
    from capsal.scorer_client import RemoteScorer

    scorer = ResilientScorer(primary=RemoteScorer(live_endpoint))
    chosen = resolve(ambiguous_request(), scorer)
    assert chosen.synset.lemma_key in ("snake.n.01", "snake.n.02")
    assert scorer.degradations == 0
