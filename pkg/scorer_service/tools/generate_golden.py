#!/usr/bin/env python3
"""Regenerate the shared golden exchange fixtures from the live service.

Writes tests/data/golden_requests.jsonl and golden_responses.jsonl in
the toolkit repository root (two parallel files, line i of one answers
line i of the other). The backend is the stock n-gram model trained on
scorer_service/tests/data/train.tgt, so the fixtures are reproducible.
"""

from __future__ import annotations

import sys
from pathlib import Path

from scorer_service.backend import NgramBackend
from scorer_service.service import ScorerService
from scorer_service.wire import WireRequest, serialize_request, serialize_response

SERVICE_ROOT = Path(__file__).resolve().parents[1]
REPO_ROOT = SERVICE_ROOT.parent
TRAIN = SERVICE_ROOT / "tests" / "data" / "train.tgt"

# Only well-formed exchanges belong here: the toolkit's parser round-trips
# every line, and the service must answer each byte-identically. The
# unknown-mode error contract is covered by the service's own tests.
REQUESTS = [
    WireRequest("g1", "score_at", ("s1", "s2"), (), 0, 1),
    WireRequest("g2", "score_at", ("s1",), ("the", "cat", "sat"), 0, 1),
    WireRequest("g3", "score_nat", ("s1",), ("the", "cat", "the", "cat"), 0, 1),
    WireRequest("g4", "refine", ("s1",), ("the", "the", "cat", "sat"), 0, 4),
    WireRequest("g5", "refine", ("s1", "s2"), ("dog", "dog", "dog"), 2, 8),
    WireRequest("g6", "refine", (), ("a", "bird", "bird", "flew"), 1, 2),
]


def main() -> int:
    service = ScorerService(NgramBackend(order=2, train_path=str(TRAIN)))
    out_dir = REPO_ROOT / "tests" / "data"
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "golden_requests.jsonl", "w", encoding="utf-8") as req_out, open(
        out_dir / "golden_responses.jsonl", "w", encoding="utf-8"
    ) as resp_out:
        for request in REQUESTS:
            req_out.write(serialize_request(request) + "\n")
            resp_out.write(serialize_response(service.handle(request)) + "\n")
    print(f"wrote {len(REQUESTS)} exchanges to {out_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
