"""Refiner/scorer abstractions and the external scorer wire protocol.

One JSON object per message, identical schema on both transports:

  request:  {"id": str, "mode": "score_at"|"score_nat"|"refine",
             "source_prefix": [str], "target": [str],
             "prefix_len": int, "max_candidates": int}
  response: {"id": str, "candidates": [{"tokens": [str], "logprob": float}],
             "error": str|null}

Token lists cross the wire untouched, so subword conventions never leak
into the scorer contract.
"""

from __future__ import annotations

import json
import math
import os
import select
import shlex
import subprocess
import time
from collections import Counter
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import requests

MODES = ("score_at", "score_nat", "refine")

BOS = "<s>"


class TransportError(RuntimeError):
    """The scorer endpoint went away or did not answer in time."""


class ProtocolError(RuntimeError):
    """The scorer answered with a malformed or mismatched message."""


class Candidate(NamedTuple):
    tokens: tuple[str, ...]
    logprob: float


@dataclass(frozen=True)
class ScorerRequest:
    id: str
    mode: str
    source_prefix: tuple[str, ...]
    target: tuple[str, ...]
    prefix_len: int = 0
    max_candidates: int = 1

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode: {self.mode!r}")
        if not 0 <= self.prefix_len <= len(self.target):
            raise ValueError(
                f"prefix_len {self.prefix_len} out of range for target of {len(self.target)} tokens"
            )
        if self.max_candidates < 1:
            raise ValueError(f"max_candidates must be >= 1, got {self.max_candidates}")


@dataclass(frozen=True)
class ScorerResponse:
    id: str
    candidates: tuple[Candidate, ...] = ()
    error: str | None = None

    def __post_init__(self):
        last = 0.0
        for i, cand in enumerate(self.candidates):
            if cand.logprob > 0:
                raise ValueError(f"candidate logprob must be <= 0, got {cand.logprob}")
            if i > 0 and cand.logprob > last:
                raise ValueError("candidates must be sorted by descending logprob")
            last = cand.logprob


def _dumps(obj: dict) -> str:
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


def request_to_json(request: ScorerRequest) -> str:
    return _dumps(
        {
            "id": request.id,
            "mode": request.mode,
            "source_prefix": list(request.source_prefix),
            "target": list(request.target),
            "prefix_len": request.prefix_len,
            "max_candidates": request.max_candidates,
        }
    )


def response_to_json(response: ScorerResponse) -> str:
    return _dumps(
        {
            "id": response.id,
            "candidates": [
                {"tokens": list(c.tokens), "logprob": c.logprob} for c in response.candidates
            ],
            "error": response.error,
        }
    )


def _token_list(value, name: str) -> tuple[str, ...]:
    if not isinstance(value, list) or any(not isinstance(tok, str) for tok in value):
        raise ProtocolError(f"{name} must be a list of strings")
    return tuple(value)


def request_from_json(text: str) -> ScorerRequest:
    try:
        body = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProtocolError(f"bad request JSON: {exc}") from None
    if not isinstance(body, dict):
        raise ProtocolError("request body must be a JSON object")
    try:
        return ScorerRequest(
            id=str(body["id"]),
            mode=body["mode"],
            source_prefix=_token_list(body.get("source_prefix", []), "source_prefix"),
            target=_token_list(body.get("target", []), "target"),
            prefix_len=int(body.get("prefix_len", 0)),
            max_candidates=int(body.get("max_candidates", 1)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ProtocolError(f"bad request: {exc}") from None


def response_from_json(text: str) -> ScorerResponse:
    try:
        body = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProtocolError(f"bad response JSON: {exc}") from None
    if not isinstance(body, dict) or "id" not in body:
        raise ProtocolError("response body must be a JSON object with an id")
    raw = body.get("candidates", [])
    if not isinstance(raw, list):
        raise ProtocolError("candidates must be a list")
    candidates = []
    for item in raw:
        if not isinstance(item, dict):
            raise ProtocolError("each candidate must be an object")
        if not isinstance(item.get("logprob"), (int, float)):
            raise ProtocolError("candidate logprob must be a number")
        candidates.append(
            Candidate(_token_list(item.get("tokens", []), "tokens"), float(item["logprob"]))
        )
    error = body.get("error")
    if error is not None and not isinstance(error, str):
        raise ProtocolError("error must be a string or null")
    try:
        return ScorerResponse(str(body["id"]), tuple(candidates), error)
    except ValueError as exc:
        raise ProtocolError(str(exc)) from None


def collapse_adjacent_repeats(tokens: Sequence[str], prefix_len: int = 0) -> tuple[str, ...]:
    """Drop tokens that repeat the previously kept one, after the locked
    prefix; prefix tokens are kept verbatim."""
    out = list(tokens[:prefix_len])
    for tok in tokens[prefix_len:]:
        if out and tok == out[-1]:
            continue
        out.append(tok)
    return tuple(out)


def _require_mode(request: ScorerRequest, mode: str) -> None:
    if request.mode != mode:
        raise ValueError(f"expected a {mode!r} request, got {request.mode!r}")


class IdentityRefiner:
    """Returns the initialization unchanged; a no-op refinement stand-in."""

    def handle(self, request: ScorerRequest) -> ScorerResponse:
        _require_mode(request, "refine")
        return ScorerResponse(request.id, (Candidate(request.target, 0.0),))


class DedupRefiner:
    """Deterministic repetition remover for adjacent duplicate tokens."""

    def handle(self, request: ScorerRequest) -> ScorerResponse:
        _require_mode(request, "refine")
        collapsed = collapse_adjacent_repeats(request.target, request.prefix_len)
        return ScorerResponse(request.id, (Candidate(collapsed, 0.0),))


class NgramModel:
    """Add-one-smoothed n-gram language model over target-side tokens."""

    def __init__(self, order: int = 2, vocabulary: Sequence[str] | None = None):
        if order < 1:
            raise ValueError(f"order must be >= 1, got {order}")
        self.order = order
        self.vocab: set[str] = set(vocabulary or ())
        self.ngram_counts: Counter = Counter()
        self.context_counts: Counter = Counter()

    def train(self, sentences) -> None:
        for sentence in sentences:
            self.vocab.update(sentence)
            history = (BOS,) * (self.order - 1)
            for token in sentence:
                self.ngram_counts[history + (token,)] += 1
                self.context_counts[history] += 1
                if self.order > 1:
                    history = history[1:] + (token,)

    def sequence_logprob(self, tokens: Sequence[str]) -> float:
        """Sum of smoothed per-token log-probabilities; 0.0 for an empty
        sequence. The conditioning source side is not modelled."""
        if not self.vocab:
            raise ValueError("untrained n-gram model: train it or provide a vocabulary")
        vocab_size = len(self.vocab)
        logprob = 0.0
        history = (BOS,) * (self.order - 1)
        for token in tokens:
            count = self.ngram_counts[history + (token,)]
            context = self.context_counts[history]
            logprob += math.log((count + 1) / (context + vocab_size))
            if self.order > 1:
                history = history[1:] + (token,)
        return logprob


class NgramScorer:
    """Sequence scorer backed by an n-gram model (the source is ignored)."""

    def __init__(self, model: NgramModel):
        self.model = model

    def handle(self, request: ScorerRequest) -> ScorerResponse:
        if request.mode not in ("score_at", "score_nat"):
            raise ValueError(f"expected a scoring request, got {request.mode!r}")
        logprob = self.model.sequence_logprob(request.target)
        return ScorerResponse(request.id, (Candidate(request.target, logprob),))


class NgramRefiner:
    """Local refiner: proposes small edits and ranks them with an n-gram
    model. Proposals are the unchanged target and the adjacent-repeat
    collapse; both honour the locked prefix."""

    def __init__(self, model: NgramModel):
        self.model = model

    def handle(self, request: ScorerRequest) -> ScorerResponse:
        _require_mode(request, "refine")
        proposals = [request.target]
        collapsed = collapse_adjacent_repeats(request.target, request.prefix_len)
        if collapsed != request.target:
            proposals.append(collapsed)
        scored = [
            (self.model.sequence_logprob(tokens), -idx, tokens)
            for idx, tokens in enumerate(proposals)
        ]
        scored.sort(reverse=True)
        candidates = tuple(
            Candidate(tokens, lp) for lp, _, tokens in scored[: request.max_candidates]
        )
        return ScorerResponse(request.id, candidates)


def _checked(request: ScorerRequest, response: ScorerResponse) -> ScorerResponse:
    if response.id != request.id:
        raise ProtocolError(
            f"response id {response.id!r} does not match request id {request.id!r}"
        )
    return response


class SubprocessScorer:
    """Line-delimited JSON exchange with a persistent worker subprocess.

    One request in flight at a time; pool several instances for
    concurrency. The worker is respawned after a transport failure.
    """

    def __init__(self, command: str | Sequence[str], timeout: float = 30.0):
        self.argv = shlex.split(command) if isinstance(command, str) else list(command)
        self.timeout = timeout
        self._proc: subprocess.Popen | None = None
        self._buffer = b""

    def _ensure_worker(self) -> subprocess.Popen:
        if self._proc is None or self._proc.poll() is not None:
            self._proc = subprocess.Popen(
                self.argv,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                bufsize=0,
            )
            self._buffer = b""
        return self._proc

    def _abort(self) -> None:
        if self._proc is not None:
            self._proc.kill()
            self._proc.wait()
            self._proc = None
        self._buffer = b""

    def _read_line(self, deadline: float, request_id: str) -> bytes:
        proc = self._proc
        assert proc is not None and proc.stdout is not None
        fd = proc.stdout.fileno()
        while b"\n" not in self._buffer:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                self._abort()
                raise TransportError(f"timeout waiting for response to request {request_id!r}")
            ready, _, _ = select.select([fd], [], [], remaining)
            if not ready:
                continue
            chunk = os.read(fd, 65536)
            if not chunk:
                self._abort()
                raise TransportError(
                    f"scorer process closed the stream during request {request_id!r}"
                )
            self._buffer += chunk
        line, self._buffer = self._buffer.split(b"\n", 1)
        return line

    def handle(self, request: ScorerRequest) -> ScorerResponse:
        proc = self._ensure_worker()
        payload = (request_to_json(request) + "\n").encode("utf-8")
        try:
            assert proc.stdin is not None
            proc.stdin.write(payload)
            proc.stdin.flush()
        except (BrokenPipeError, OSError):
            self._abort()
            raise TransportError(
                f"scorer process is gone; could not send request {request.id!r}"
            ) from None
        line = self._read_line(time.monotonic() + self.timeout, request.id)
        return _checked(request, response_from_json(line.decode("utf-8")))

    def close(self) -> None:
        if self._proc is not None and self._proc.poll() is None:
            try:
                self._proc.stdin.close()
                self._proc.wait(timeout=5)
            except (OSError, subprocess.TimeoutExpired):
                self._proc.kill()
                self._proc.wait()
        self._proc = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


class HttpScorer:
    """Stateless HTTP transport: one POST per request."""

    def __init__(self, url: str, timeout: float = 30.0):
        self.url = url
        self.timeout = timeout
        self._session = requests.Session()

    def handle(self, request: ScorerRequest) -> ScorerResponse:
        try:
            reply = self._session.post(
                self.url,
                data=request_to_json(request).encode("utf-8"),
                headers={"Content-Type": "application/json"},
                timeout=self.timeout,
            )
        except requests.RequestException as exc:
            raise TransportError(f"request {request.id!r} failed: {exc}") from None
        if reply.status_code != 200:
            raise TransportError(
                f"request {request.id!r} got HTTP {reply.status_code} from {self.url}"
            )
        return _checked(request, response_from_json(reply.text))

    def close(self) -> None:
        self._session.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
