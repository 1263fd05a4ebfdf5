"""Alignment completion and the finest consistent bi-chunk partition.

A bi-chunk pairs a contiguous source span with the set of target
positions aligned to it. A chunk is consistent when its tokens are
aligned only to each other, never across the chunk boundary.
"""

from __future__ import annotations

from dataclasses import dataclass

from .corpus_io import Alignment


@dataclass(frozen=True)
class BiChunk:
    """Contiguous 1-based source span paired with its target positions."""

    src_span: tuple[int, int]
    tgt_positions: tuple[int, ...]  # sorted ascending

    @property
    def src_size(self) -> int:
        return self.src_span[1] - self.src_span[0] + 1

    @property
    def tgt_size(self) -> int:
        return len(self.tgt_positions)

    @property
    def tgt_min(self) -> int:
        return self.tgt_positions[0]

    @property
    def tgt_max(self) -> int:
        return self.tgt_positions[-1]


def partner_lists(alignment: Alignment) -> tuple[list[list[int]], list[list[int]]]:
    """Per-position partner lists, index 0 unused: (src->tgts, tgt->srcs)."""
    src_to = [[] for _ in range(alignment.src_len + 1)]
    tgt_to = [[] for _ in range(alignment.tgt_len + 1)]
    for s, t in alignment.links:
        src_to[s].append(t)
        tgt_to[t].append(s)
    return src_to, tgt_to


def _fill_side(partners: list[list[int]]) -> list[list[int]]:
    """Give every unaligned position the partner set of its nearest
    preceding aligned neighbour (nearest following for head positions)."""
    n = len(partners) - 1
    nearest_prev = [0] * (n + 1)
    prev = 0
    for p in range(1, n + 1):
        if partners[p]:
            prev = p
        nearest_prev[p] = prev
    filled = [list(ps) for ps in partners]
    nxt = 0
    for p in range(n, 0, -1):
        if partners[p]:
            nxt = p
        else:
            filled[p] = list(partners[nearest_prev[p] or nxt])
    return filled


def fill_vacancies(alignment: Alignment) -> Alignment:
    """Complete an alignment so every position on both sides is linked.

    Target positions are filled first, then source positions; an
    unaligned position copies the full partner set of its nearest
    preceding aligned position, or the nearest following one when
    nothing precedes. Idempotent.
    """
    if not alignment.links:
        raise ValueError("cannot fill vacancies of an empty alignment")
    _, tgt_to = partner_lists(alignment)
    tgt_filled = _fill_side(tgt_to)
    links = {(s, t) for t in range(1, alignment.tgt_len + 1) for s in tgt_filled[t]}
    src_to = [[] for _ in range(alignment.src_len + 1)]
    for s, t in links:
        src_to[s].append(t)
    src_filled = _fill_side(src_to)
    links = {(s, t) for s in range(1, alignment.src_len + 1) for t in src_filled[s]}
    return Alignment(tuple(sorted(links)), alignment.src_len, alignment.tgt_len)


def is_total(alignment: Alignment) -> bool:
    srcs = {s for s, _ in alignment.links}
    tgts = {t for _, t in alignment.links}
    return len(srcs) == alignment.src_len and len(tgts) == alignment.tgt_len


def is_consistent(alignment: Alignment, chunk: BiChunk) -> bool:
    """True iff no link crosses the chunk boundary in either direction."""
    lo, hi = chunk.src_span
    tgt_set = set(chunk.tgt_positions)
    for s, t in alignment.links:
        inside_src = lo <= s <= hi
        inside_tgt = t in tgt_set
        if inside_src != inside_tgt:
            return False
    return True


def finest_consistent_partition(alignment: Alignment) -> list[BiChunk]:
    """Finest partition of the source into contiguous consistent chunks.

    Left-to-right sweep over a total alignment: a chunk closes as soon
    as every target position touched so far has all of its links inside
    the current span. Every consistent partition coarsens the result.
    """
    src_to, tgt_to = partner_lists(alignment)
    deg = [len(ps) for ps in tgt_to]
    seen = [0] * (alignment.tgt_len + 1)
    chunks: list[BiChunk] = []
    lo = 1
    open_targets = 0
    touched: list[int] = []
    for s in range(1, alignment.src_len + 1):
        for t in src_to[s]:
            if seen[t] == 0:
                open_targets += 1
                touched.append(t)
            seen[t] += 1
            if seen[t] == deg[t]:
                open_targets -= 1
        if open_targets == 0 and touched:
            touched.sort()
            chunks.append(BiChunk((lo, s), tuple(touched)))
            touched = []
            lo = s + 1
    if touched or lo <= alignment.src_len:
        raise ValueError("alignment is not total; fill vacancies first")
    return chunks
