import pytest

from monocorpus import (
    Alignment,
    CorpusFormatError,
    SentencePair,
    read_alignments,
    read_parallel,
    word_groups,
    write_alignments,
    write_parallel,
)
from monocorpus.corpus_io import format_annotation, parse_alignment_line, read_annotations


def _write(path, lines):
    path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")


def test_read_parallel_basic(tmp_path):
    src = tmp_path / "c.src"
    tgt = tmp_path / "c.tgt"
    _write(src, ["a b c"])
    _write(tgt, ["x y"])
    pairs = read_parallel(str(src), str(tgt))
    assert pairs == [SentencePair(("a", "b", "c"), ("x", "y"), "none")]


def test_read_parallel_line_count_mismatch(tmp_path):
    src = tmp_path / "c.src"
    tgt = tmp_path / "c.tgt"
    _write(src, ["a", "b", "c"])
    _write(tgt, ["x", "y", "z", "w"])
    with pytest.raises(CorpusFormatError, match="3.*4"):
        read_parallel(str(src), str(tgt))


def test_read_parallel_empty_line_names_position(tmp_path):
    src = tmp_path / "c.src"
    tgt = tmp_path / "c.tgt"
    _write(src, ["a", "", "c"])
    _write(tgt, ["x", "y", "z"])
    with pytest.raises(CorpusFormatError, match=r"c\.src:2"):
        read_parallel(str(src), str(tgt))


def test_read_parallel_prefix_convention(tmp_path):
    src = tmp_path / "c.src"
    tgt = tmp_path / "c.tgt"
    _write(src, ["▁I ▁was"])
    _write(tgt, ["x"])
    (pair,) = read_parallel(str(src), str(tgt), convention="prefix")
    assert len(pair.source) == 2
    assert word_groups(pair.source, "prefix") == [(1, 1), (2, 2)]


def test_word_groups_prefix():
    assert word_groups(["▁un", "related", "▁word"], "prefix") == [(1, 2), (3, 3)]


def test_word_groups_suffix():
    assert word_groups(["un@@", "related", "word"], "suffix") == [(1, 2), (3, 3)]


def test_word_groups_none_is_singletons():
    assert word_groups(["a", "b", "c"], "none") == [(1, 1), (2, 2), (3, 3)]


def test_word_groups_partition_properties():
    tokens = ["▁a", "b", "c", "▁d", "e"]
    groups = word_groups(tokens, "prefix")
    covered = [p for lo, hi in groups for p in range(lo, hi + 1)]
    assert covered == list(range(1, len(tokens) + 1))


def test_parse_alignment_zero_based():
    alignment = parse_alignment_line("0-0 1-2 2-1", "zero-based", 3, 3)
    assert alignment.links == ((1, 1), (2, 3), (3, 2))


def test_parse_alignment_out_of_range():
    with pytest.raises(CorpusFormatError, match="3-0"):
        parse_alignment_line("3-0", "zero-based", 3, 3)


def test_parse_alignment_empty_line_is_unaligned_pair():
    alignment = parse_alignment_line("", "zero-based", 3, 3)
    assert alignment.links == ()


def test_parse_alignment_malformed_item():
    with pytest.raises(CorpusFormatError, match="malformed"):
        parse_alignment_line("1-2 3x4", "zero-based", 5, 5)


def test_parse_alignment_one_based():
    alignment = parse_alignment_line("1-1 3-2", "one-based", 3, 2)
    assert alignment.links == ((1, 1), (3, 2))


def test_read_alignments_carries_pair_lengths(tmp_path):
    src = tmp_path / "c.src"
    tgt = tmp_path / "c.tgt"
    aln = tmp_path / "c.aln"
    _write(src, ["a b c", "d e"])
    _write(tgt, ["x y", "z"])
    _write(aln, ["0-0 2-1", ""])
    pairs = read_parallel(str(src), str(tgt))
    alignments = read_alignments(str(aln), "zero-based", pairs)
    assert alignments[0] == Alignment(((1, 1), (3, 2)), 3, 2)
    assert alignments[1] == Alignment((), 2, 1)


def test_read_alignments_reports_line_of_bad_link(tmp_path):
    src = tmp_path / "c.src"
    tgt = tmp_path / "c.tgt"
    aln = tmp_path / "c.aln"
    _write(src, ["a b", "c d"])
    _write(tgt, ["x y", "z w"])
    _write(aln, ["0-0", "5-0"])
    pairs = read_parallel(str(src), str(tgt))
    with pytest.raises(CorpusFormatError, match=r"c\.aln:2"):
        read_alignments(str(aln), "zero-based", pairs)


def test_parallel_round_trip(tmp_path):
    pairs = [
        SentencePair(("a", "b"), ("x",), "none"),
        SentencePair(("▁c",), ("y", "z"), "none"),
    ]
    src, tgt = tmp_path / "r.src", tmp_path / "r.tgt"
    write_parallel(pairs, str(src), str(tgt))
    assert read_parallel(str(src), str(tgt)) == pairs


def test_alignment_round_trip(tmp_path):
    pairs = [SentencePair(("a", "b", "c"), ("x", "y"), "none")]
    alignments = [Alignment(((1, 2), (3, 1)), 3, 2)]
    path = tmp_path / "r.aln"
    for base in ("zero-based", "one-based"):
        write_alignments(alignments, str(path), base)
        assert read_alignments(str(path), base, pairs) == alignments


def test_annotation_round_trip(tmp_path):
    record = {
        "src_chunks": [[1, 2], [3, 4]],
        "tgt_chunks": [[3, 4], [1, 2]],
        "reordered": ["t3", "t4", "t1", "t2"],
        "applicable": True,
        "unaligned": False,
    }
    path = tmp_path / "a.jsonl"
    path.write_text(format_annotation(record) + "\n", encoding="utf-8")
    assert list(read_annotations(str(path))) == [record]


def test_annotation_missing_field(tmp_path):
    path = tmp_path / "a.jsonl"
    path.write_text('{"src_chunks": []}\n', encoding="utf-8")
    with pytest.raises(CorpusFormatError, match="tgt_chunks"):
        list(read_annotations(str(path)))
