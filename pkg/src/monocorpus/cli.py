"""Command-line front end: analyze, chunk, reorder, refine, filter,
metrics, combine.

Processing is streaming and line-oriented so multi-million-pair corpora
fit in bounded memory. With ``--jobs N`` sentence records are processed
by a worker pool; output order always matches input order, so results
are byte-identical for any worker count.

Exit codes: 0 success, 1 data or protocol error, 2 usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from multiprocessing import Pool

from .alignment_model import BiChunk, fill_vacancies
from .chunking import (
    Chunking,
    chunk_align_aware,
    chunk_fixed,
    is_reordering_applicable,
    reorder_target,
)
from .corpus_io import (
    CONVENTIONS,
    Alignment,
    CorpusFormatError,
    SentencePair,
    annotation_record,
    format_annotation,
    parse_alignment_line,
    parse_sentence_line,
    read_annotations,
)
from .metrics import (
    MonotonicityReport,
    UndefinedMetricError,
    k_anticipation_rate,
    kendall_tau,
    seq_rep_n,
    spearman_rho,
)
from .refinement import RefineConfig, RefinementError, below_mean_mask, refine_pair, token_f1
from .scorers import (
    DedupRefiner,
    HttpScorer,
    IdentityRefiner,
    NgramModel,
    NgramRefiner,
    NgramScorer,
    ProtocolError,
    SubprocessScorer,
    TransportError,
)

@dataclass(frozen=True)
class RecordConfig:
    """Per-record processing options shipped to pool workers."""

    op: str  # "pipeline" | "analyze"
    src_path: str
    tgt_path: str
    align_path: str
    indexing: str
    convention: str
    skip_bad: bool
    method: str = "alignaw"
    k: int = 8
    min_src: int = 2
    min_tgt: int = 2
    tau_unit: str = "links"


def _count_remaining(handle) -> int:
    return sum(1 for _ in handle)


def _records(cfg: RecordConfig):
    """Yield (line_no, src_line, tgt_line, align_line), checking that the
    three files have equal line counts."""
    with open(cfg.src_path, encoding="utf-8") as src, open(
        cfg.tgt_path, encoding="utf-8"
    ) as tgt, open(cfg.align_path, encoding="utf-8") as align:
        line_no = 0
        while True:
            lines = (src.readline(), tgt.readline(), align.readline())
            if lines[0] == "" and lines[1] == "" and lines[2] == "":
                return
            if "" in lines:
                counts = [
                    line_no + (1 if line else 0) + _count_remaining(handle)
                    for line, handle in zip(lines, (src, tgt, align))
                ]
                raise CorpusFormatError(
                    "line count mismatch: "
                    f"{cfg.src_path} has {counts[0]} lines, "
                    f"{cfg.tgt_path} has {counts[1]}, "
                    f"{cfg.align_path} has {counts[2]}"
                )
            line_no += 1
            yield (line_no, lines[0], lines[1], lines[2])


def _parse_record(cfg: RecordConfig, record) -> tuple[int, SentencePair, Alignment]:
    line_no, src_line, tgt_line, align_line = record
    source = parse_sentence_line(src_line, cfg.src_path, line_no)
    target = parse_sentence_line(tgt_line, cfg.tgt_path, line_no)
    pair = SentencePair(tuple(source), tuple(target), cfg.convention)
    alignment = parse_alignment_line(
        align_line, cfg.indexing, len(source), len(target), cfg.align_path, line_no
    )
    return line_no, pair, alignment


def _build_chunking(cfg: RecordConfig, pair: SentencePair, alignment: Alignment) -> Chunking:
    if cfg.method == "fixed":
        return chunk_fixed(pair, fill_vacancies(alignment), cfg.k)
    return chunk_align_aware(pair, alignment, cfg.min_src, cfg.min_tgt)


def _process_record(cfg: RecordConfig, record):
    try:
        line_no, pair, alignment = _parse_record(cfg, record)
    except CorpusFormatError as exc:
        if cfg.skip_bad:
            return ("skip", record[0], str(exc))
        raise
    if cfg.op == "analyze":
        try:
            tau = kendall_tau(alignment, unit=cfg.tau_unit)
        except UndefinedMetricError:
            tau = None
        try:
            rho = spearman_rho(alignment)
        except UndefinedMetricError:
            rho = None
        return ("ok", len(pair.source), tau, rho)
    if not alignment.links:
        record_json = format_annotation(
            annotation_record(
                [(1, len(pair.source))],
                [list(range(1, len(pair.target) + 1))],
                pair.target,
                applicable=False,
                unaligned=True,
            )
        )
        return ("ok", " ".join(pair.target), record_json, False, True)
    chunking = _build_chunking(cfg, pair, alignment)
    reordered = reorder_target(chunking)
    applicable = is_reordering_applicable(chunking)
    record_json = format_annotation(
        annotation_record(
            [c.src_span for c in chunking.chunks],
            [c.tgt_positions for c in chunking.chunks],
            reordered.reordered_target,
            applicable=applicable,
            unaligned=False,
        )
    )
    return ("ok", " ".join(reordered.reordered_target), record_json, applicable, False)


_POOL_CFG: RecordConfig | None = None


def _init_pool(cfg: RecordConfig) -> None:
    global _POOL_CFG
    _POOL_CFG = cfg


def _pool_worker(record):
    assert _POOL_CFG is not None
    return _process_record(_POOL_CFG, record)


def _run_records(cfg: RecordConfig, jobs: int):
    records = _records(cfg)
    if jobs <= 1:
        for record in records:
            yield _process_record(cfg, record)
        return
    with Pool(jobs, initializer=_init_pool, initargs=(cfg,)) as pool:
        yield from pool.imap(_pool_worker, records, chunksize=128)


def _emit_report(report: dict, out_path: str | None) -> None:
    text = json.dumps(report, ensure_ascii=False, indent=2)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as handle:
            handle.write(text + "\n")
    else:
        print(text)


def _log_skip(line_no: int, message: str) -> None:
    print(f"skipping pair {line_no}: {message}", file=sys.stderr)


# ---------------------------------------------------------------- analyze


def cmd_analyze(args) -> int:
    cfg = _record_config(args, op="analyze")
    report = MonotonicityReport(tau_unit=args.tau_unit, bucket_width=args.buckets)
    for result in _run_records(cfg, args.jobs):
        if result[0] == "skip":
            _log_skip(result[1], result[2])
            continue
        _, src_len, tau, rho = result
        report.add_sentence(src_len, tau, rho)
    _emit_report(report.to_dict(), args.out)
    return 0


# ----------------------------------------------------------- chunk/reorder


def cmd_chunk(args) -> int:
    cfg = _record_config(args, op="pipeline")
    out = open(args.out, "w", encoding="utf-8") if args.out else sys.stdout
    try:
        for result in _run_records(cfg, args.jobs):
            if result[0] == "skip":
                _log_skip(result[1], result[2])
                continue
            out.write(result[2] + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def cmd_reorder(args) -> int:
    cfg = _record_config(args, op="pipeline")
    pairs = reordered = unaligned = 0
    with open(args.out + ".tgt", "w", encoding="utf-8") as tgt_out, open(
        args.out + ".jsonl", "w", encoding="utf-8"
    ) as ann_out:
        for result in _run_records(cfg, args.jobs):
            if result[0] == "skip":
                _log_skip(result[1], result[2])
                continue
            _, line, record_json, applicable, is_unaligned = result
            tgt_out.write(line + "\n")
            ann_out.write(record_json + "\n")
            pairs += 1
            reordered += applicable
            unaligned += is_unaligned
    stats = {
        "pairs": pairs,
        "reordered": reordered,
        "fraction_reordered": reordered / pairs if pairs else 0.0,
        "unaligned": unaligned,
    }
    print(json.dumps(stats, indent=2))
    return 0


# ----------------------------------------------------------------- refine


class _PerThread:
    """One lazily created scorer per worker thread."""

    def __init__(self, factory):
        self._factory = factory
        self._local = threading.local()
        self._instances = []
        self._lock = threading.Lock()

    def get(self):
        instance = getattr(self._local, "instance", None)
        if instance is None:
            instance = self._factory()
            self._local.instance = instance
            with self._lock:
                self._instances.append(instance)
        return instance

    def close(self) -> None:
        for instance in self._instances:
            if hasattr(instance, "close"):
                instance.close()
        self._instances.clear()


def _train_ngram(path: str, order: int) -> NgramModel:
    model = NgramModel(order=order)
    with open(path, encoding="utf-8") as handle:
        model.train(line.split() for line in handle)
    if not model.vocab:
        raise CorpusFormatError(f"n-gram training file {path} is empty")
    return model


def _scorer_factory(spec: str, args, role: str) -> _PerThread:
    if spec == "identity":
        instance = IdentityRefiner()
        return _PerThread(lambda: instance)
    if spec == "dedup":
        instance = DedupRefiner()
        return _PerThread(lambda: instance)
    if spec == "ngram":
        model = _train_ngram(args.ngram_train or args.tgt, args.ngram_order)
        shared = NgramRefiner(model) if role == "refiner" else NgramScorer(model)
        return _PerThread(lambda: shared)
    if spec.startswith("cmd:"):
        command = spec[len("cmd:") :]
        return _PerThread(lambda: SubprocessScorer(command, timeout=args.timeout_s))
    if spec.startswith("http:") or spec.startswith("https:"):
        return _PerThread(lambda: HttpScorer(spec, timeout=args.timeout_s))
    raise CorpusFormatError(f"unknown scorer spec: {spec!r}")


def _annotation_chunking(pair: SentencePair, record: dict) -> tuple[Chunking, bool]:
    chunks = tuple(
        BiChunk((int(lo), int(hi)), tuple(int(t) for t in tgt))
        for (lo, hi), tgt in zip(record["src_chunks"], record["tgt_chunks"])
    )
    return Chunking(pair, chunks, "annotations"), bool(record.get("unaligned", False))


def cmd_refine(args) -> int:
    cfg = _record_config(args, op="pipeline")
    refiner_pool = _scorer_factory(args.scorer, args, role="refiner")
    at_pool = _scorer_factory(args.at_scorer, args, role="scorer") if args.at_scorer else None
    config = RefineConfig(
        prefix_mode=args.prefix_mode, alpha=args.alpha, max_candidates=args.max_candidates
    )

    annotations = None
    if args.annotations:
        annotations = read_annotations(args.annotations)

    def one(record):
        line_no, pair, alignment = _parse_record(cfg, record)
        if annotations is not None:
            chunking, unaligned = _annotation_chunking(pair, next_annotation(line_no))
        else:
            unaligned = not alignment.links
            chunking = None if unaligned else _build_chunking(cfg, pair, alignment)
        if unaligned or chunking is None:
            return (line_no, " ".join(pair.target), {"line": line_no, "unaligned": True, "steps": []})
        reordered = reorder_target(chunking)
        refined = refine_pair(
            reordered,
            refiner_pool.get(),
            at_pool.get() if at_pool else None,
            config,
            pair_id=str(line_no),
        )
        steps = {
            "line": line_no,
            "unaligned": False,
            "steps": [step.to_dict() for step in refined.step_log],
        }
        return (line_no, " ".join(refined.refined_target), steps)

    # Annotation records must be consumed in input order even when the
    # thread pool runs pairs concurrently, so they are pre-fetched here.
    annotation_cache: dict[int, dict] = {}
    annotation_cursor = [0]

    def next_annotation(line_no: int) -> dict:
        while annotation_cursor[0] < line_no:
            assert annotations is not None
            annotation_cursor[0] += 1
            annotation_cache[annotation_cursor[0]] = next(annotations)
        return annotation_cache.pop(line_no)

    def guarded(record):
        try:
            return one(record)
        except CorpusFormatError as exc:
            if cfg.skip_bad:
                return ("skip", record[0], str(exc))
            raise

    records = _records(cfg)
    try:
        with open(args.out + ".tgt", "w", encoding="utf-8") as tgt_out, open(
            args.out + ".steps.jsonl", "w", encoding="utf-8"
        ) as steps_out:
            if args.jobs <= 1 or annotations is not None:
                results = map(guarded, records)
                _write_refine_results(results, tgt_out, steps_out)
            else:
                with ThreadPoolExecutor(max_workers=args.jobs) as executor:
                    results = executor.map(guarded, records)
                    _write_refine_results(results, tgt_out, steps_out)
    finally:
        refiner_pool.close()
        if at_pool:
            at_pool.close()
    return 0


def _write_refine_results(results, tgt_out, steps_out) -> None:
    for result in results:
        if result[0] == "skip":
            _log_skip(result[1], result[2])
            continue
        _, line, steps = result
        tgt_out.write(line + "\n")
        steps_out.write(json.dumps(steps, ensure_ascii=False, separators=(",", ":")) + "\n")


# ----------------------------------------------------------------- filter


def cmd_filter(args) -> int:
    scores: list[float] = []
    with open(args.tgt, encoding="utf-8") as hyp, open(args.ref, encoding="utf-8") as ref:
        for line_no, (hyp_line, ref_line) in enumerate(zip(hyp, ref), start=1):
            scores.append(token_f1(hyp_line.split(), ref_line.split()))
        if hyp.readline() or ref.readline():
            raise CorpusFormatError(
                f"line count mismatch between {args.tgt} and {args.ref}"
            )
    if not scores:
        raise CorpusFormatError("nothing to filter: input is empty")
    mask = below_mean_mask(scores)
    kept = 0
    with open(args.src, encoding="utf-8") as src, open(args.tgt, encoding="utf-8") as hyp, open(
        args.out + ".src", "w", encoding="utf-8"
    ) as src_out, open(args.out + ".tgt", "w", encoding="utf-8") as tgt_out:
        for keep, src_line, hyp_line in zip(mask, src, hyp):
            if keep:
                src_out.write(src_line)
                tgt_out.write(hyp_line)
                kept += 1
    stats = {
        "pairs": len(scores),
        "kept": kept,
        "fraction_kept": kept / len(scores),
        "mean_similarity": sum(scores) / len(scores),
    }
    print(json.dumps(stats, indent=2))
    return 0


# ---------------------------------------------------------------- metrics


def cmd_metrics_rep(args) -> int:
    orders = _int_list(args.n)
    sums = {n: 0.0 for n in orders}
    counted = {n: 0 for n in orders}
    skipped = {n: 0 for n in orders}
    with open(args.tgt, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            tokens = parse_sentence_line(line, args.tgt, line_no)
            for n in orders:
                try:
                    sums[n] += seq_rep_n(tokens, n)
                    counted[n] += 1
                except UndefinedMetricError:
                    skipped[n] += 1
    report = {
        "rates": {str(n): (sums[n] / counted[n] if counted[n] else None) for n in orders},
        "sentences": {str(n): counted[n] for n in orders},
        "skipped": {str(n): skipped[n] for n in orders},
    }
    _emit_report(report, args.out)
    return 0


def cmd_metrics_kar(args) -> int:
    ks = _int_list(args.k)
    cfg = _record_config(args, op="pipeline")
    sums = {k: 0.0 for k in ks}
    counted = skipped = 0
    for record in _records(cfg):
        try:
            _, _, alignment = _parse_record(cfg, record)
        except CorpusFormatError as exc:
            if cfg.skip_bad:
                _log_skip(record[0], str(exc))
                continue
            raise
        if not alignment.links:
            skipped += 1
            continue
        filled = fill_vacancies(alignment)
        for k in ks:
            sums[k] += k_anticipation_rate(filled, k, catchup=args.catchup_er)
        counted += 1
    report = {
        "rates": {str(k): (sums[k] / counted if counted else None) for k in ks},
        "sentences": counted,
        "skipped_unaligned": skipped,
        "catchup_er": args.catchup_er,
    }
    _emit_report(report, args.out)
    return 0


def cmd_metrics_er(args) -> int:
    src_total = tgt_total = pairs = 0
    with open(args.src, encoding="utf-8") as src, open(args.tgt, encoding="utf-8") as tgt:
        for line_no, (src_line, tgt_line) in enumerate(zip(src, tgt), start=1):
            src_total += len(parse_sentence_line(src_line, args.src, line_no))
            tgt_total += len(parse_sentence_line(tgt_line, args.tgt, line_no))
            pairs += 1
        if src.readline() or tgt.readline():
            raise CorpusFormatError(f"line count mismatch between {args.src} and {args.tgt}")
    if src_total == 0:
        raise CorpusFormatError("emission rate undefined on an empty corpus")
    report = {
        "emission_rate": tgt_total / src_total,
        "pairs": pairs,
        "src_tokens": src_total,
        "tgt_tokens": tgt_total,
    }
    _emit_report(report, args.out)
    return 0


# ---------------------------------------------------------------- combine


def cmd_combine(args) -> int:
    if len(args.src) != len(args.tgt):
        raise CorpusFormatError("combine needs matching --src/--tgt counts")
    seen: set[bytes] = set()
    written = read = 0
    with open(args.out + ".src", "w", encoding="utf-8") as src_out, open(
        args.out + ".tgt", "w", encoding="utf-8"
    ) as tgt_out:
        for src_path, tgt_path in zip(args.src, args.tgt):
            with open(src_path, encoding="utf-8") as src, open(tgt_path, encoding="utf-8") as tgt:
                for line_no, (src_line, tgt_line) in enumerate(zip(src, tgt), start=1):
                    read += 1
                    key = hashlib.blake2b(
                        (src_line.rstrip("\n") + "\n" + tgt_line.rstrip("\n")).encode("utf-8"),
                        digest_size=16,
                    ).digest()
                    if key in seen:
                        continue
                    seen.add(key)
                    src_out.write(src_line.rstrip("\n") + "\n")
                    tgt_out.write(tgt_line.rstrip("\n") + "\n")
                    written += 1
                if src.readline() or tgt.readline():
                    raise CorpusFormatError(
                        f"line count mismatch between {src_path} and {tgt_path}"
                    )
    stats = {"read": read, "unique": written}
    print(json.dumps(stats, indent=2))
    return 0


# ------------------------------------------------------------------ wiring


def _int_list(text: str) -> list[int]:
    try:
        values = [int(part) for part in text.split(",") if part]
    except ValueError:
        raise CorpusFormatError(f"expected a comma-separated integer list, got {text!r}") from None
    if not values or any(v < 1 for v in values):
        raise CorpusFormatError(f"expected positive integers, got {text!r}")
    return values


def _record_config(args, op: str) -> RecordConfig:
    return RecordConfig(
        op=op,
        src_path=args.src,
        tgt_path=args.tgt,
        align_path=args.align,
        indexing="zero-based" if args.align_base == 0 else "one-based",
        convention=args.convention,
        skip_bad=args.skip_bad_lines,
        method=getattr(args, "method", "alignaw") or "alignaw",
        k=getattr(args, "k", 8) or 8,
        min_src=getattr(args, "min_src", 2),
        min_tgt=getattr(args, "min_tgt", 2),
        tau_unit=getattr(args, "tau_unit", "links"),
    )


def _add_io_flags(parser, align_required=True) -> None:
    parser.add_argument("--src", required=True, help="source corpus file")
    parser.add_argument("--tgt", required=True, help="target corpus file")
    parser.add_argument("--align", required=align_required, help="Pharaoh alignment file")
    parser.add_argument(
        "--align-base", type=int, choices=(0, 1), default=0, help="alignment index base"
    )
    parser.add_argument(
        "--convention",
        choices=CONVENTIONS,
        default="none",
        help="subword marker convention of both sides",
    )
    parser.add_argument(
        "--skip-bad-lines",
        action="store_true",
        help="drop pairs with malformed lines instead of aborting",
    )


def _add_method_flags(parser) -> None:
    parser.add_argument("--method", choices=("fixed", "alignaw"), help="chunking method")
    parser.add_argument("--k", type=int, default=None, help="fixed chunk size in words")
    parser.add_argument("--min-src", type=int, default=2, help="minimum source chunk tokens")
    parser.add_argument("--min-tgt", type=int, default=2, help="minimum target chunk tokens")


def _add_common_flags(parser) -> None:
    parser.add_argument("--jobs", type=int, default=1, help="worker count")
    parser.add_argument(
        "--seed",
        type=int,
        default=0,
        help="seed for randomized sampling (current subcommands are deterministic)",
    )
    parser.add_argument("--out", default=None, help="output path or prefix")


def _add_scorer_flags(parser) -> None:
    parser.add_argument(
        "--scorer",
        default="identity",
        help="refiner: identity | dedup | ngram | cmd:<argv> | http:<url>",
    )
    parser.add_argument(
        "--at-scorer",
        default=None,
        help="optional autoregressive scorer for joint reranking: ngram | cmd:<argv> | http:<url>",
    )
    parser.add_argument("--alpha", type=float, default=0.25, help="joint probability weight")
    parser.add_argument(
        "--prefix-mode", choices=("fixed", "alterable"), default="fixed", help="prefix handling"
    )
    parser.add_argument("--max-candidates", type=int, default=4)
    parser.add_argument("--timeout-s", type=float, default=30.0, help="scorer timeout in seconds")
    parser.add_argument("--ngram-train", default=None, help="n-gram training file (default: --tgt)")
    parser.add_argument("--ngram-order", type=int, default=2, choices=(1, 2, 3))
    parser.add_argument(
        "--annotations", default=None, help="reuse chunk annotations instead of chunking again"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="monocorpus",
        description="Monotonic reordering, refinement, and monotonicity metrics "
        "for parallel corpora.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="corpus monotonicity report")
    _add_io_flags(p)
    _add_common_flags(p)
    p.add_argument("--buckets", type=int, default=10, help="source-length bucket width")
    p.add_argument("--tau-unit", choices=("links", "tokens"), default="links")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("chunk", help="emit chunk annotations as JSON lines")
    _add_io_flags(p)
    _add_method_flags(p)
    _add_common_flags(p)
    p.set_defaults(func=cmd_chunk)

    p = sub.add_parser("reorder", help="monotonically reorder the target side")
    _add_io_flags(p)
    _add_method_flags(p)
    _add_common_flags(p)
    p.set_defaults(func=cmd_reorder)

    p = sub.add_parser("refine", help="chunk-wise refinement of reordered targets")
    _add_io_flags(p)
    _add_method_flags(p)
    _add_common_flags(p)
    _add_scorer_flags(p)
    p.set_defaults(func=cmd_refine)

    p = sub.add_parser("filter", help="drop pairs scoring below the mean similarity")
    p.add_argument("--src", required=True)
    p.add_argument("--tgt", required=True, help="hypothesis (refined) target file")
    p.add_argument("--ref", required=True, help="reference target file")
    _add_common_flags(p)
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("metrics", help="repetition, anticipation, and emission metrics")
    msub = p.add_subparsers(dest="metric", required=True)

    mp = msub.add_parser("rep", help="n-gram repetition rate")
    mp.add_argument("--tgt", required=True, help="token file to measure")
    mp.add_argument("--n", default="1,2,3,4", help="comma-separated n-gram orders")
    _add_common_flags(mp)
    mp.set_defaults(func=cmd_metrics_rep)

    mp = msub.add_parser("kar", help="k-anticipation rate")
    _add_io_flags(mp)
    mp.add_argument("--k", default="4,6,8,10,12", help="comma-separated wait-k values")
    mp.add_argument("--catchup-er", type=float, default=None, help="catchup emission rate")
    _add_common_flags(mp)
    mp.set_defaults(func=cmd_metrics_kar)

    mp = msub.add_parser("er", help="emission rate")
    mp.add_argument("--src", required=True)
    mp.add_argument("--tgt", required=True)
    _add_common_flags(mp)
    mp.set_defaults(func=cmd_metrics_er)

    p = sub.add_parser("combine", help="pool corpora keeping unique (source, target) pairs")
    p.add_argument("--src", action="append", required=True, help="repeatable source file")
    p.add_argument("--tgt", action="append", required=True, help="repeatable target file")
    _add_common_flags(p)
    p.set_defaults(func=cmd_combine)

    return parser


def _validate(parser: argparse.ArgumentParser, args) -> None:
    if getattr(args, "jobs", 1) < 1:
        parser.error("--jobs must be >= 1")
    if args.command in ("chunk", "reorder", "refine") and not getattr(args, "annotations", None):
        if not args.method:
            parser.error(f"{args.command} requires --method fixed|alignaw")
        if args.method == "fixed":
            if args.k is None:
                parser.error("--method fixed requires --k")
            if args.k < 1:
                parser.error("--k must be >= 1")
        if args.method == "alignaw" and (args.min_src < 1 or args.min_tgt < 1):
            parser.error("--min-src/--min-tgt must be >= 1")
    if args.command in ("reorder", "refine", "filter", "combine") and not args.out:
        parser.error(f"{args.command} requires --out")
    if args.command == "refine":
        if not 0.0 <= args.alpha <= 1.0:
            parser.error("--alpha must be in [0, 1]")
        if args.max_candidates < 1:
            parser.error("--max-candidates must be >= 1")
        if args.timeout_s <= 0:
            parser.error("--timeout-s must be > 0")
    if args.command == "metrics" and args.metric == "kar":
        if args.catchup_er is not None and args.catchup_er <= 0:
            parser.error("--catchup-er must be > 0")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _validate(parser, args)
    try:
        return args.func(args)
    except (
        CorpusFormatError,
        UndefinedMetricError,
        TransportError,
        ProtocolError,
        RefinementError,
        FileNotFoundError,
        ValueError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
