"""Parallel corpus, alignment, and chunk-annotation file handling.

File formats:
  * parallel text: UTF-8, one sentence per line, tokens separated by
    single spaces, LF line endings
  * alignments: Pharaoh format, whitespace-separated ``s-t`` items per
    line, 0- or 1-based on disk, always 1-based in memory
  * annotations: JSON lines, one record per sentence pair with fields
    ``src_chunks`` (inclusive [start, end] spans), ``tgt_chunks`` (lists
    of original target positions) and ``reordered`` (token list)
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

PREFIX_MARKER = "▁"  # sentencepiece-style word-start marker
SUFFIX_MARKER = "@@"  # BPE-style continuation marker

CONVENTIONS = ("prefix", "suffix", "none")


class CorpusFormatError(ValueError):
    """Malformed corpus input. Message names file and line when known."""

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        if path is not None and line is not None:
            message = f"{path}:{line}: {message}"
        elif path is not None:
            message = f"{path}: {message}"
        super().__init__(message)
        self.path = path
        self.line = line


@dataclass(frozen=True)
class SentencePair:
    """A tokenized source/target sentence pair.

    Tokens are kept verbatim, including any subword markers; the
    convention says how those markers group tokens into surface words.
    """

    source: tuple[str, ...]
    target: tuple[str, ...]
    convention: str = "none"


@dataclass(frozen=True)
class Alignment:
    """Set of 1-based (source, target) position links for one pair.

    ``links`` is stored sorted and without duplicates so that iteration
    order is deterministic.
    """

    links: tuple[tuple[int, int], ...]
    src_len: int
    tgt_len: int

    @classmethod
    def from_links(cls, links: Iterable[tuple[int, int]], src_len: int, tgt_len: int) -> "Alignment":
        uniq = sorted(set(links))
        for s, t in uniq:
            if not (1 <= s <= src_len and 1 <= t <= tgt_len):
                raise ValueError(f"link {s}-{t} out of range for lengths ({src_len}, {tgt_len})")
        return cls(tuple(uniq), src_len, tgt_len)


def _check_tokens(tokens: Sequence[str], path: str, line_no: int) -> None:
    if not tokens:
        raise CorpusFormatError("empty line", path, line_no)


def parse_sentence_line(line: str, path: str = "<string>", line_no: int = 0) -> list[str]:
    """Split one corpus line into tokens, rejecting empty lines."""
    tokens = line.split()
    _check_tokens(tokens, path, line_no)
    return tokens


def word_groups(tokens: Sequence[str], convention: str) -> list[tuple[int, int]]:
    """Partition token positions into maximal same-word runs.

    Returns inclusive 1-based (start, end) spans. Under ``none`` every
    token is its own group.
    """
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown subword convention: {convention!r}")
    n = len(tokens)
    if convention == "none":
        return [(i, i) for i in range(1, n + 1)]
    starts = [1]
    if convention == "prefix":
        for i in range(2, n + 1):
            if tokens[i - 1].startswith(PREFIX_MARKER):
                starts.append(i)
    else:  # suffix: token i continues into i+1 when it ends with the marker
        for i in range(2, n + 1):
            if not tokens[i - 2].endswith(SUFFIX_MARKER):
                starts.append(i)
    starts.append(n + 1)
    return [(starts[g], starts[g + 1] - 1) for g in range(len(starts) - 1)]


def _count_lines(path: str) -> int:
    with open(path, "r", encoding="utf-8") as handle:
        return sum(1 for _ in handle)


def read_parallel(src_path: str, tgt_path: str, convention: str = "none") -> list[SentencePair]:
    """Read a parallel corpus; line i of each file becomes pair i."""
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown subword convention: {convention!r}")
    pairs: list[SentencePair] = []
    with open(src_path, "r", encoding="utf-8") as src, open(tgt_path, "r", encoding="utf-8") as tgt:
        for line_no, (src_line, tgt_line) in enumerate(zip(src, tgt), start=1):
            source = parse_sentence_line(src_line, src_path, line_no)
            target = parse_sentence_line(tgt_line, tgt_path, line_no)
            pairs.append(SentencePair(tuple(source), tuple(target), convention))
        if src.readline() or tgt.readline():
            n_src, n_tgt = _count_lines(src_path), _count_lines(tgt_path)
            raise CorpusFormatError(
                f"line count mismatch: {src_path} has {n_src} lines, {tgt_path} has {n_tgt}"
            )
    return pairs


def write_parallel(pairs: Iterable[SentencePair], src_path: str, tgt_path: str) -> None:
    with open(src_path, "w", encoding="utf-8") as src, open(tgt_path, "w", encoding="utf-8") as tgt:
        for pair in pairs:
            src.write(" ".join(pair.source) + "\n")
            tgt.write(" ".join(pair.target) + "\n")


def parse_alignment_line(
    line: str,
    indexing: str,
    src_len: int,
    tgt_len: int,
    path: str = "<string>",
    line_no: int = 0,
) -> Alignment:
    """Parse one Pharaoh line into a 1-based Alignment.

    An empty line is a fully unaligned pair (empty link set).
    """
    if indexing not in ("zero-based", "one-based"):
        raise ValueError(f"unknown indexing: {indexing!r}")
    shift = 1 if indexing == "zero-based" else 0
    links: list[tuple[int, int]] = []
    for item in line.split():
        s_str, sep, t_str = item.partition("-")
        if not sep or not s_str or not t_str:
            raise CorpusFormatError(f"malformed alignment item {item!r}", path, line_no)
        try:
            s, t = int(s_str) + shift, int(t_str) + shift
        except ValueError:
            raise CorpusFormatError(f"malformed alignment item {item!r}", path, line_no) from None
        if not (1 <= s <= src_len and 1 <= t <= tgt_len):
            raise CorpusFormatError(
                f"alignment link {item!r} out of range for pair lengths ({src_len}, {tgt_len})",
                path,
                line_no,
            )
        links.append((s, t))
    return Alignment(tuple(sorted(set(links))), src_len, tgt_len)


def read_alignments(path: str, indexing: str, pairs: Sequence[SentencePair]) -> list[Alignment]:
    """Read one Pharaoh alignment line per sentence pair."""
    alignments: list[Alignment] = []
    with open(path, "r", encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if line_no > len(pairs):
                break
            pair = pairs[line_no - 1]
            alignments.append(
                parse_alignment_line(
                    line, indexing, len(pair.source), len(pair.target), path, line_no
                )
            )
    if len(alignments) != len(pairs):
        n_align = _count_lines(path)
        raise CorpusFormatError(
            f"line count mismatch: {path} has {n_align} lines, corpus has {len(pairs)} pairs"
        )
    return alignments


def format_alignment_line(alignment: Alignment, indexing: str = "zero-based") -> str:
    if indexing not in ("zero-based", "one-based"):
        raise ValueError(f"unknown indexing: {indexing!r}")
    shift = -1 if indexing == "zero-based" else 0
    return " ".join(f"{s + shift}-{t + shift}" for s, t in alignment.links)


def write_alignments(alignments: Iterable[Alignment], path: str, indexing: str = "zero-based") -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for alignment in alignments:
            handle.write(format_alignment_line(alignment, indexing) + "\n")


def annotation_record(
    src_chunks: Sequence[tuple[int, int]],
    tgt_chunks: Sequence[Sequence[int]],
    reordered: Sequence[str],
    applicable: bool,
    unaligned: bool,
) -> dict:
    """Build one annotation record with a fixed key order."""
    return {
        "src_chunks": [[lo, hi] for lo, hi in src_chunks],
        "tgt_chunks": [list(chunk) for chunk in tgt_chunks],
        "reordered": list(reordered),
        "applicable": applicable,
        "unaligned": unaligned,
    }


def format_annotation(record: dict) -> str:
    return json.dumps(record, ensure_ascii=False, separators=(",", ":"))


def read_annotations(path: str) -> Iterator[dict]:
    """Yield annotation records, validating the required fields."""
    with open(path, "r", encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"bad annotation JSON: {exc}", path, line_no) from None
            for key in ("src_chunks", "tgt_chunks", "reordered"):
                if key not in record:
                    raise CorpusFormatError(f"annotation missing field {key!r}", path, line_no)
            yield record
