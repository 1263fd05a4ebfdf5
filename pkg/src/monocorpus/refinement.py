"""Chunk-wise refinement of reordered targets.

The reordered target grows chunk by chunk: at step i the refiner sees
the source chunks 1..i and an initialization made of the previous output
plus chunk i's target tokens. Returned candidates are reranked by a
joint autoregressive/non-autoregressive log-probability and the best one
becomes the next prefix (locked verbatim in fixed-prefix mode).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from .chunking import ReorderedPair
from .scorers import ProtocolError, ScorerRequest, TransportError

SimilarityFn = Callable[[Sequence[str], Sequence[str]], float]

PREFIX_MODES = ("fixed", "alterable")


class RefinementError(RuntimeError):
    """Refinement failed; ``step`` is the 1-based chunk index."""

    def __init__(self, message: str, step: int):
        super().__init__(f"step {step}: {message}")
        self.step = step


@dataclass(frozen=True)
class RefineConfig:
    prefix_mode: str = "fixed"
    alpha: float = 0.0
    max_candidates: int = 4

    def __post_init__(self):
        if self.prefix_mode not in PREFIX_MODES:
            raise ValueError(f"unknown prefix mode: {self.prefix_mode!r}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha}")
        if self.max_candidates < 1:
            raise ValueError(f"max_candidates must be >= 1, got {self.max_candidates}")


@dataclass(frozen=True)
class StepRecord:
    step: int
    src_extent: int  # number of visible source tokens
    initialization: tuple[str, ...]
    chosen: tuple[str, ...]
    nat_logprob: float
    at_logprob: float | None
    joint_logprob: float
    candidates: int
    discarded: int

    def to_dict(self) -> dict:
        return {
            "step": self.step,
            "src_extent": self.src_extent,
            "initialization": list(self.initialization),
            "chosen": list(self.chosen),
            "nat_logprob": self.nat_logprob,
            "at_logprob": self.at_logprob,
            "joint_logprob": self.joint_logprob,
            "candidates": self.candidates,
            "discarded": self.discarded,
        }


@dataclass(frozen=True)
class RefinedPair:
    reordered: ReorderedPair
    refined_target: tuple[str, ...]
    step_log: tuple[StepRecord, ...]


def joint_logprob(at_lp: float, nat_lp: float, alpha: float) -> float:
    """Log of the joint probability p_AT^alpha * p_NAT^(1-alpha)."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    return alpha * at_lp + (1.0 - alpha) * nat_lp


def refine_pair(
    reordered: ReorderedPair,
    refiner,
    at_scorer=None,
    config: RefineConfig = RefineConfig(),
    pair_id: str = "0",
) -> RefinedPair:
    """Refine one reordered pair chunk by chunk.

    ``refiner`` must answer ``refine`` requests; ``at_scorer``, when
    given, answers ``score_at`` requests and its log-probability enters
    the reranking with weight ``config.alpha``. Candidates that break a
    fixed prefix are discarded; an empty chunk target skips the refiner
    call entirely.
    """
    source = reordered.pair.source
    output: list[str] = []
    step_log: list[StepRecord] = []
    for i, chunk in enumerate(reordered.chunking.chunks, start=1):
        chunk_tokens = [reordered.pair.target[t - 1] for t in chunk.tgt_positions]
        src_extent = chunk.src_span[1]
        if not chunk_tokens:
            step_log.append(
                StepRecord(i, src_extent, tuple(output), tuple(output), 0.0, None, 0.0, 0, 0)
            )
            continue
        prefix = tuple(output)
        prefix_len = len(prefix) if config.prefix_mode == "fixed" else 0
        initialization = prefix + tuple(chunk_tokens)
        request = ScorerRequest(
            id=f"{pair_id}:{i}",
            mode="refine",
            source_prefix=tuple(source[:src_extent]),
            target=initialization,
            prefix_len=prefix_len,
            max_candidates=config.max_candidates,
        )
        try:
            response = refiner.handle(request)
        except (TransportError, ProtocolError) as exc:
            raise RefinementError(str(exc), step=i) from exc
        if response.error:
            raise RefinementError(f"refiner error: {response.error}", step=i)
        if not response.candidates:
            raise RefinementError("refiner returned no candidates", step=i)
        kept = [
            cand
            for cand in response.candidates
            if config.prefix_mode != "fixed" or cand.tokens[: len(prefix)] == prefix
        ]
        discarded = len(response.candidates) - len(kept)
        if not kept:
            raise RefinementError("all candidates violate the fixed prefix", step=i)
        best = None
        best_score = None
        best_at = None
        for cand in kept:
            at_lp = None
            if at_scorer is not None:
                at_request = ScorerRequest(
                    id=f"{pair_id}:{i}:at",
                    mode="score_at",
                    source_prefix=tuple(source[:src_extent]),
                    target=cand.tokens,
                )
                try:
                    at_response = at_scorer.handle(at_request)
                except (TransportError, ProtocolError) as exc:
                    raise RefinementError(str(exc), step=i) from exc
                if at_response.error or not at_response.candidates:
                    raise RefinementError(
                        f"scorer error: {at_response.error or 'no candidates'}", step=i
                    )
                at_lp = at_response.candidates[0].logprob
                score = joint_logprob(at_lp, cand.logprob, config.alpha)
            else:
                score = cand.logprob
            if best_score is None or score > best_score:
                best, best_score, best_at = cand, score, at_lp
        assert best is not None and best_score is not None
        output = list(best.tokens)
        step_log.append(
            StepRecord(
                step=i,
                src_extent=src_extent,
                initialization=initialization,
                chosen=best.tokens,
                nat_logprob=best.logprob,
                at_logprob=best_at,
                joint_logprob=best_score,
                candidates=len(kept),
                discarded=discarded,
            )
        )
    return RefinedPair(reordered, tuple(output), tuple(step_log))


def token_f1(hypothesis: Sequence[str], reference: Sequence[str]) -> float:
    """Token-level F1 on bag-of-token overlap; 1.0 for identical sequences."""
    if not hypothesis or not reference:
        return 1.0 if not hypothesis and not reference else 0.0
    counts: dict[str, int] = {}
    for tok in reference:
        counts[tok] = counts.get(tok, 0) + 1
    common = 0
    for tok in hypothesis:
        if counts.get(tok, 0) > 0:
            counts[tok] -= 1
            common += 1
    if common == 0:
        return 0.0
    precision = common / len(hypothesis)
    recall = common / len(reference)
    return 2 * precision * recall / (precision + recall)


def below_mean_mask(scores: Sequence[float]) -> list[bool]:
    """True where a score is at or above the arithmetic mean."""
    if not scores:
        raise ValueError("no scores to filter")
    mean = sum(scores) / len(scores)
    return [score >= mean for score in scores]


def filter_below_mean(
    candidates: Sequence[tuple[RefinedPair, Sequence[str]]],
    similarity: SimilarityFn = token_f1,
) -> tuple[list[RefinedPair], list[float], float]:
    """Drop refined pairs scoring strictly below the corpus mean
    similarity to their references. Returns (kept, scores, kept_fraction).
    """
    scores = [
        similarity(refined.refined_target, reference) for refined, reference in candidates
    ]
    mask = below_mean_mask(scores)
    kept = [refined for (refined, _), keep in zip(candidates, mask) if keep]
    return kept, scores, len(kept) / len(candidates)
