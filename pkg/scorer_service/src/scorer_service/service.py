"""Request dispatch shared by both transports.

Every failure becomes an error response with the request id echoed;
the transport never drops a message.
"""

from __future__ import annotations

from .wire import MODES, WireRequest, WireResponse


class ScorerService:
    def __init__(self, backend, max_candidates: int = 8):
        self.backend = backend
        self.max_candidates = max_candidates

    def handle(self, request: WireRequest) -> WireResponse:
        if request.mode not in MODES:
            return WireResponse(request.id, (), "unknown mode")
        try:
            if request.mode in ("score_at", "score_nat"):
                return self._score(request)
            return self._refine(request)
        except Exception as exc:  # never let a bad request kill the loop
            return WireResponse(request.id, (), str(exc))

    def _score(self, request: WireRequest) -> WireResponse:
        logprob = self.backend.score(request.target)
        return WireResponse(request.id, ((request.target, logprob),), None)

    def _refine(self, request: WireRequest) -> WireResponse:
        if not 0 <= request.prefix_len <= len(request.target):
            return WireResponse(request.id, (), "prefix_len out of range")
        limit = max(1, min(request.max_candidates, self.max_candidates))
        proposals = self.backend.refine_proposals(request.target, request.prefix_len)
        scored = [
            (self.backend.score(tokens), -index, tokens)
            for index, tokens in enumerate(proposals)
        ]
        scored.sort(reverse=True)
        candidates = tuple((tokens, logprob) for logprob, _, tokens in scored[:limit])
        return WireResponse(request.id, candidates, None)
