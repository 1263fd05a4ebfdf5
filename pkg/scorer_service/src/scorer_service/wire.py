"""Wire schema of the scorer protocol, one JSON object per message.

  request:  {"id": str, "mode": "score_at"|"score_nat"|"refine",
             "source_prefix": [str], "target": [str],
             "prefix_len": int, "max_candidates": int}
  response: {"id": str, "candidates": [{"tokens": [str], "logprob": float}],
             "error": str|null}

Serialization is canonical: schema key order, compact separators, UTF-8.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

MODES = ("score_at", "score_nat", "refine")


class WireError(ValueError):
    """The incoming message does not follow the schema."""


@dataclass(frozen=True)
class WireRequest:
    id: str
    mode: str
    source_prefix: tuple[str, ...] = ()
    target: tuple[str, ...] = ()
    prefix_len: int = 0
    max_candidates: int = 1


@dataclass(frozen=True)
class WireResponse:
    id: str
    candidates: tuple[tuple[tuple[str, ...], float], ...] = ()
    error: str | None = None


def _tokens(value, name):
    if not isinstance(value, list) or any(not isinstance(t, str) for t in value):
        raise WireError(f"{name} must be a list of strings")
    return tuple(value)


def parse_request(line: str) -> WireRequest:
    try:
        body = json.loads(line)
    except json.JSONDecodeError as exc:
        raise WireError(f"bad request JSON: {exc}") from None
    if not isinstance(body, dict) or "id" not in body:
        raise WireError("request must be a JSON object with an id")
    mode = body.get("mode")
    if not isinstance(mode, str):
        raise WireError("mode must be a string")
    try:
        prefix_len = int(body.get("prefix_len", 0))
        max_candidates = int(body.get("max_candidates", 1))
    except (TypeError, ValueError):
        raise WireError("prefix_len and max_candidates must be integers") from None
    return WireRequest(
        id=str(body["id"]),
        mode=mode,
        source_prefix=_tokens(body.get("source_prefix", []), "source_prefix"),
        target=_tokens(body.get("target", []), "target"),
        prefix_len=prefix_len,
        max_candidates=max_candidates,
    )


def serialize_response(response: WireResponse) -> str:
    return json.dumps(
        {
            "id": response.id,
            "candidates": [
                {"tokens": list(tokens), "logprob": logprob}
                for tokens, logprob in response.candidates
            ],
            "error": response.error,
        },
        ensure_ascii=False,
        separators=(",", ":"),
    )


def serialize_request(request: WireRequest) -> str:
    return json.dumps(
        {
            "id": request.id,
            "mode": request.mode,
            "source_prefix": list(request.source_prefix),
            "target": list(request.target),
            "prefix_len": request.prefix_len,
            "max_candidates": request.max_candidates,
        },
        ensure_ascii=False,
        separators=(",", ":"),
    )
