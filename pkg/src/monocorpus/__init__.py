"""Toolkit for turning offline parallel corpora into monotonically
reordered and refined training data for simultaneous translation."""

from .alignment_model import BiChunk, fill_vacancies, finest_consistent_partition, is_consistent
from .chunking import (
    Chunking,
    ReorderedPair,
    chunk_align_aware,
    chunk_fixed,
    is_reordering_applicable,
    monotonic_adjacency_merge,
    reorder_target,
    size_merge_step,
)
from .corpus_io import (
    Alignment,
    CorpusFormatError,
    SentencePair,
    read_alignments,
    read_parallel,
    word_groups,
    write_alignments,
    write_parallel,
)
from .metrics import (
    UndefinedMetricError,
    emission_rate,
    k_anticipation_rate,
    kendall_tau,
    monotonicity_report,
    seq_rep_n,
    spearman_rho,
)
from .refinement import (
    RefineConfig,
    RefinedPair,
    RefinementError,
    filter_below_mean,
    joint_logprob,
    refine_pair,
    token_f1,
)
from .scorers import (
    Candidate,
    DedupRefiner,
    HttpScorer,
    IdentityRefiner,
    NgramModel,
    NgramRefiner,
    NgramScorer,
    ProtocolError,
    ScorerRequest,
    ScorerResponse,
    SubprocessScorer,
    TransportError,
)

__version__ = "0.1.0"
