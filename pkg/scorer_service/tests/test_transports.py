import json
import subprocess
import sys
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from scorer_service.backend import NgramBackend
from scorer_service.http_app import build_app
from scorer_service.service import ScorerService

DATA = Path(__file__).parent / "data"
TRAIN = DATA / "train.tgt"


def service_command(extra=()):
    return [
        sys.executable, "-m", "scorer_service",
        "--transport", "stdio", "--backend", "ngram",
        "--order", "2", "--train", str(TRAIN), *extra,
    ]


def exchange(proc, payload):
    proc.stdin.write(json.dumps(payload) + "\n")
    proc.stdin.flush()
    return json.loads(proc.stdout.readline())


@pytest.fixture
def stdio_proc():
    proc = subprocess.Popen(
        service_command(),
        stdin=subprocess.PIPE,
        stdout=subprocess.PIPE,
        text=True,
    )
    yield proc
    proc.stdin.close()
    proc.wait(timeout=10)


def test_stdio_score_and_refine(stdio_proc):
    reply = exchange(
        stdio_proc,
        {"id": "1", "mode": "score_at", "source_prefix": [], "target": ["the", "cat"],
         "prefix_len": 0, "max_candidates": 1},
    )
    assert reply["id"] == "1"
    assert reply["error"] is None
    assert reply["candidates"][0]["logprob"] < 0
    reply = exchange(
        stdio_proc,
        {"id": "2", "mode": "refine", "source_prefix": ["s"],
         "target": ["the", "the", "cat"], "prefix_len": 0, "max_candidates": 4},
    )
    assert reply["id"] == "2"
    assert ["the", "cat"] in [c["tokens"] for c in reply["candidates"]]


def test_stdio_unknown_mode_keeps_stream_alive(stdio_proc):
    reply = exchange(
        stdio_proc,
        {"id": "9", "mode": "x", "source_prefix": [], "target": ["a"],
         "prefix_len": 0, "max_candidates": 1},
    )
    assert reply == {"id": "9", "candidates": [], "error": "unknown mode"}
    # the worker still answers afterwards
    reply = exchange(
        stdio_proc,
        {"id": "10", "mode": "score_at", "source_prefix": [], "target": [],
         "prefix_len": 0, "max_candidates": 1},
    )
    assert reply["id"] == "10" and reply["error"] is None


def test_stdio_malformed_line_yields_error_response(stdio_proc):
    stdio_proc.stdin.write("this is not json\n")
    stdio_proc.stdin.flush()
    reply = json.loads(stdio_proc.stdout.readline())
    assert reply["error"]
    assert reply["candidates"] == []


@pytest.fixture(scope="module")
def http_client():
    service = ScorerService(NgramBackend(order=2, train_path=str(TRAIN)))
    return TestClient(build_app(service))


def test_http_score_endpoint(http_client):
    payload = {"id": "h1", "mode": "score_at", "source_prefix": [], "target": [],
               "prefix_len": 0, "max_candidates": 1}
    for path in ("/score", "/"):
        reply = http_client.post(path, json=payload)
        assert reply.status_code == 200
        assert reply.json() == {
            "id": "h1",
            "candidates": [{"tokens": [], "logprob": 0.0}],
            "error": None,
        }


def test_http_refine_honours_prefix(http_client):
    payload = {"id": "h2", "mode": "refine", "source_prefix": ["s"],
               "target": ["dog", "dog", "dog"], "prefix_len": 2, "max_candidates": 8}
    reply = http_client.post("/score", json=payload).json()
    assert reply["error"] is None
    for candidate in reply["candidates"]:
        assert candidate["tokens"][:2] == ["dog", "dog"]


def test_http_and_stdio_bodies_match(http_client, stdio_proc):
    payload = {"id": "same", "mode": "refine", "source_prefix": [],
               "target": ["a", "a", "cat"], "prefix_len": 0, "max_candidates": 4}
    http_body = http_client.post("/score", json=payload).text
    stdio_proc.stdin.write(json.dumps(payload) + "\n")
    stdio_proc.stdin.flush()
    stdio_body = stdio_proc.stdout.readline().rstrip("\n")
    assert http_body == stdio_body
