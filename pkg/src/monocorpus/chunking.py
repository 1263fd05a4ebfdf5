"""Chunking methods and monotonic target reordering.

Two chunkers produce bi-chunk sequences: a fixed-size splitter that cuts
the source every K surface words, and an alignment-aware one that grows
chunks from the finest consistent partition until minimum-size
thresholds hold. Reordering concatenates each chunk's target tokens in
source-chunk order, preserving the original order inside a chunk.
"""

from __future__ import annotations

from dataclasses import dataclass

from .alignment_model import BiChunk, fill_vacancies, finest_consistent_partition
from .corpus_io import Alignment, SentencePair, word_groups


@dataclass(frozen=True)
class Chunking:
    pair: SentencePair
    chunks: tuple[BiChunk, ...]
    method: str  # "fixed" | "align_aware"


@dataclass(frozen=True)
class ReorderedPair:
    """Target permuted chunk-monotonically.

    ``permutation[i]`` is the 1-based reordered position of original
    target position i+1.
    """

    pair: SentencePair
    chunking: Chunking
    reordered_target: tuple[str, ...]
    permutation: tuple[int, ...]


def chunk_fixed(pair: SentencePair, alignment: Alignment, k: int) -> Chunking:
    """Cut the source every ``k`` surface words; expects a vacancy-filled
    alignment.

    Each target position is claimed by the earliest chunk linking it, so
    a later chunk whose links were all claimed can come out empty.
    """
    if k < 1:
        raise ValueError(f"chunk size must be >= 1, got {k}")
    groups = word_groups(pair.source, pair.convention)
    spans: list[tuple[int, int]] = []
    for g in range(0, len(groups), k):
        block = groups[g : g + k]
        spans.append((block[0][0], block[-1][1]))
    chunk_of_src = [0] * (alignment.src_len + 1)
    for idx, (lo, hi) in enumerate(spans):
        for s in range(lo, hi + 1):
            chunk_of_src[s] = idx
    owner = [len(spans)] * (alignment.tgt_len + 1)
    for s, t in alignment.links:
        c = chunk_of_src[s]
        if c < owner[t]:
            owner[t] = c
    tgt_sets: list[list[int]] = [[] for _ in spans]
    for t in range(1, alignment.tgt_len + 1):
        if owner[t] < len(spans):
            tgt_sets[owner[t]].append(t)
    chunks = tuple(
        BiChunk(span, tuple(tgt)) for span, tgt in zip(spans, tgt_sets)
    )
    return Chunking(pair, chunks, "fixed")


def _complete_word_group_links(pair: SentencePair, alignment: Alignment) -> Alignment:
    """Share links across subword groups so no surface word is split.

    Any link between a source word group and a target word group is
    expanded to the full cross product of the two groups; the finest
    consistent partition of the result keeps each group in one chunk.
    """
    if pair.convention == "none":
        return alignment
    src_groups = word_groups(pair.source, pair.convention)
    tgt_groups = word_groups(pair.target, pair.convention)
    if len(src_groups) == alignment.src_len and len(tgt_groups) == alignment.tgt_len:
        return alignment
    src_gid = [0] * (alignment.src_len + 1)
    for gid, (lo, hi) in enumerate(src_groups):
        for p in range(lo, hi + 1):
            src_gid[p] = gid
    tgt_gid = [0] * (alignment.tgt_len + 1)
    for gid, (lo, hi) in enumerate(tgt_groups):
        for p in range(lo, hi + 1):
            tgt_gid[p] = gid
    group_links = {(src_gid[s], tgt_gid[t]) for s, t in alignment.links}
    links = [
        (s, t)
        for gs, gt in group_links
        for s in range(src_groups[gs][0], src_groups[gs][1] + 1)
        for t in range(tgt_groups[gt][0], tgt_groups[gt][1] + 1)
    ]
    return Alignment(tuple(sorted(links)), alignment.src_len, alignment.tgt_len)


def _whole_sentence_chunking(pair: SentencePair, method: str) -> Chunking:
    chunk = BiChunk((1, len(pair.source)), tuple(range(1, len(pair.target) + 1)))
    return Chunking(pair, (chunk,), method)


def chunk_align_aware(
    pair: SentencePair, alignment: Alignment, min_src: int, min_tgt: int
) -> Chunking:
    """Alignment-aware adaptive chunking.

    Pipeline: fill alignment vacancies, share links across split subword
    groups, take the finest consistent partition, merge undersized
    chunks until every chunk has at least ``min_src`` source and
    ``min_tgt`` target tokens (or a single chunk remains), then collapse
    monotonically adjacent neighbours.
    """
    if min_src < 1 or min_tgt < 1:
        raise ValueError("minimum chunk sizes must be >= 1")
    if not alignment.links:
        return _whole_sentence_chunking(pair, "align_aware")
    filled = fill_vacancies(alignment)
    completed = _complete_word_group_links(pair, filled)
    chunks = finest_consistent_partition(completed)
    while len(chunks) > 1 and _first_undersized(chunks, min_src, min_tgt) is not None:
        chunks = size_merge_step(chunks, min_src, min_tgt)
    chunks = monotonic_adjacency_merge(chunks)
    return Chunking(pair, tuple(chunks), "align_aware")


def _first_undersized(chunks: list[BiChunk], min_src: int, min_tgt: int) -> int | None:
    for i, chunk in enumerate(chunks):
        if chunk.src_size < min_src or chunk.tgt_size < min_tgt:
            return i
    return None


def _target_gap(a: BiChunk, b: BiChunk) -> int:
    lo = max(a.tgt_min, b.tgt_min)
    hi = min(a.tgt_max, b.tgt_max)
    return max(0, lo - hi - 1)


def _merge_pair(a: BiChunk, b: BiChunk) -> BiChunk:
    if a.src_span[1] + 1 != b.src_span[0]:
        raise ValueError("refusing to merge chunks with non-contiguous source spans")
    return BiChunk(
        (a.src_span[0], b.src_span[1]),
        tuple(sorted(a.tgt_positions + b.tgt_positions)),
    )


def size_merge_step(chunks: list[BiChunk], min_src: int, min_tgt: int) -> list[BiChunk]:
    """Apply one merge for the leftmost undersized chunk.

    Candidate partners are the source-adjacent neighbours, ranked by
    target-interval gap, then smaller merged size, then leftmost.
    """
    i = _first_undersized(list(chunks), min_src, min_tgt)
    if i is None:
        raise ValueError("no chunk violates the size thresholds")
    candidates = [j for j in (i - 1, i + 1) if 0 <= j < len(chunks)]

    def rank(j: int) -> tuple[int, int, int]:
        gap = _target_gap(chunks[i], chunks[j])
        merged_size = (
            chunks[i].src_size + chunks[j].src_size + chunks[i].tgt_size + chunks[j].tgt_size
        )
        return (gap, merged_size, j)

    j = min(candidates, key=rank)
    left, right = min(i, j), max(i, j)
    merged = _merge_pair(chunks[left], chunks[right])
    return list(chunks[:left]) + [merged] + list(chunks[right + 1 :])


def monotonic_adjacency_merge(chunks: list[BiChunk]) -> list[BiChunk]:
    """Collapse source-adjacent chunks whose target intervals continue
    each other in order (max target of left + 1 == min target of right).
    Applied to fixpoint."""
    result: list[BiChunk] = []
    for chunk in chunks:
        while (
            result
            and result[-1].tgt_positions
            and chunk.tgt_positions
            and result[-1].tgt_max + 1 == chunk.tgt_min
        ):
            chunk = _merge_pair(result.pop(), chunk)
        result.append(chunk)
    return result


def reorder_target(chunking: Chunking) -> ReorderedPair:
    """Concatenate chunk targets in source order, keeping within-chunk
    original order."""
    target = chunking.pair.target
    permutation = [0] * len(target)
    reordered: list[str] = []
    for chunk in chunking.chunks:
        for t in chunk.tgt_positions:
            reordered.append(target[t - 1])
            permutation[t - 1] = len(reordered)
    return ReorderedPair(chunking.pair, chunking, tuple(reordered), tuple(permutation))


def is_reordering_applicable(chunking: Chunking) -> bool:
    """True iff reordering would move at least one target position.

    Defined on positions, not token strings, so a permutation that
    happens to reproduce identical tokens still counts as a change.
    """
    expected = 1
    for chunk in chunking.chunks:
        for t in chunk.tgt_positions:
            if t != expected:
                return True
            expected += 1
    return False
