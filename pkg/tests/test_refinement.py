import random

import pytest

from monocorpus import (
    Alignment,
    BiChunk,
    DedupRefiner,
    IdentityRefiner,
    RefineConfig,
    RefinementError,
    SentencePair,
    chunk_align_aware,
    filter_below_mean,
    joint_logprob,
    refine_pair,
    reorder_target,
    seq_rep_n,
    token_f1,
)
from monocorpus.chunking import Chunking
from monocorpus.refinement import below_mean_mask
from monocorpus.scorers import Candidate, ScorerResponse, TransportError
from oracles import random_links_alignment


def make_pair(src_len, tgt_tokens):
    return SentencePair(
        tuple(f"s{i}" for i in range(1, src_len + 1)), tuple(tgt_tokens), "none"
    )


def single_chunk_reordered(tgt_tokens):
    pair = make_pair(1, tgt_tokens)
    chunking = Chunking(pair, (BiChunk((1, 1), tuple(range(1, len(tgt_tokens) + 1))),), "x")
    return reorder_target(chunking)


class ScriptedRefiner:
    """Returns one scripted response per step."""

    def __init__(self, responses):
        self.responses = list(responses)
        self.calls = 0

    def handle(self, request):
        self.calls += 1
        scripted = self.responses.pop(0)
        if isinstance(scripted, Exception):
            raise scripted
        return ScorerResponse(request.id, scripted)


class ScriptedScorer:
    """score_at stub mapping token tuples to fixed logprobs."""

    def __init__(self, table):
        self.table = table

    def handle(self, request):
        return ScorerResponse(request.id, (Candidate(request.target, self.table[request.target]),))


# ---------------------------------------------------------- joint logprob


def test_joint_boundaries():
    assert joint_logprob(-4.0, -2.0, 0.0) == -2.0
    assert joint_logprob(-4.0, -2.0, 1.0) == -4.0


def test_joint_worked_value():
    assert joint_logprob(-4.0, -2.0, 0.25) == -2.5


def test_joint_linear_and_monotone():
    rng = random.Random(1)
    for _ in range(100):
        at, nat = -rng.random() * 5, -rng.random() * 5
        a = rng.random()
        assert joint_logprob(at, nat, a) == pytest.approx(a * at + (1 - a) * nat)
        assert joint_logprob(at + 1e-3, nat, 0.5) >= joint_logprob(at, nat, 0.5)
        assert joint_logprob(at, nat + 1e-3, 0.5) >= joint_logprob(at, nat, 0.5)


def test_joint_rejects_bad_alpha():
    with pytest.raises(ValueError):
        joint_logprob(-1.0, -1.0, 1.5)
    with pytest.raises(ValueError):
        RefineConfig(alpha=-0.1)


# ------------------------------------------------------------ refine_pair


def test_identity_refiner_reproduces_reordering():
    rng = random.Random(7)
    for _ in range(100):
        src_len, tgt_len = rng.randint(1, 9), rng.randint(1, 9)
        pair = make_pair(src_len, [f"t{i}" for i in range(1, tgt_len + 1)])
        alignment = random_links_alignment(rng, src_len, tgt_len)
        chunking = chunk_align_aware(pair, alignment, 2, 2)
        reordered = reorder_target(chunking)
        for mode in ("fixed", "alterable"):
            refined = refine_pair(
                reordered, IdentityRefiner(), config=RefineConfig(prefix_mode=mode)
            )
            assert refined.refined_target == reordered.reordered_target
            assert len(refined.step_log) == len(chunking.chunks)


def test_dedup_refiner_single_chunk():
    reordered = single_chunk_reordered(["a", "a", "b"])
    refined = refine_pair(reordered, DedupRefiner())
    assert refined.refined_target == ("a", "b")


def test_fixed_prefix_grows_monotonically():
    rng = random.Random(19)
    for _ in range(50):
        src_len, tgt_len = rng.randint(2, 8), rng.randint(2, 8)
        pair = make_pair(src_len, [rng.choice("xyz") for _ in range(tgt_len)])
        alignment = random_links_alignment(rng, src_len, tgt_len)
        chunking = chunk_align_aware(pair, alignment, 1, 1)
        refined = refine_pair(
            reorder_target(chunking), DedupRefiner(), config=RefineConfig(prefix_mode="fixed")
        )
        previous = ()
        for record in refined.step_log:
            assert record.chosen[: len(previous)] == previous
            previous = record.chosen


def test_alterable_prefix_allows_rewrites_fixed_rejects():
    pair = make_pair(2, ["a", "b"])
    chunking = Chunking(
        pair, (BiChunk((1, 1), (1,)), BiChunk((2, 2), (2,))), "x"
    )
    reordered = reorder_target(chunking)
    rewrite = (Candidate(("z", "b"), -0.5),)  # rewrites the step-1 prefix "a"
    alterable = refine_pair(
        reordered,
        ScriptedRefiner([(Candidate(("a",), 0.0),), rewrite]),
        config=RefineConfig(prefix_mode="alterable"),
    )
    assert alterable.refined_target == ("z", "b")
    assert alterable.step_log[1].chosen == ("z", "b")
    with pytest.raises(RefinementError, match="step 2"):
        refine_pair(
            reordered,
            ScriptedRefiner([(Candidate(("a",), 0.0),), rewrite]),
            config=RefineConfig(prefix_mode="fixed"),
        )


def test_fixed_mode_discards_violations_but_keeps_valid_candidates():
    pair = make_pair(2, ["a", "b"])
    chunking = Chunking(pair, (BiChunk((1, 1), (1,)), BiChunk((2, 2), (2,))), "x")
    reordered = reorder_target(chunking)
    step2 = (Candidate(("z", "b"), -0.1), Candidate(("a", "b"), -0.7))
    refined = refine_pair(
        reordered,
        ScriptedRefiner([(Candidate(("a",), 0.0),), step2]),
        config=RefineConfig(prefix_mode="fixed"),
    )
    assert refined.refined_target == ("a", "b")
    assert refined.step_log[1].discarded == 1


def test_transport_failure_carries_step_index():
    reordered = single_chunk_reordered(["a"])
    with pytest.raises(RefinementError, match="step 1"):
        refine_pair(reordered, ScriptedRefiner([TransportError("boom")]))


def test_refiner_error_response_raises():
    class Erroring:
        def handle(self, request):
            return ScorerResponse(request.id, (), error="backend down")

    reordered = single_chunk_reordered(["a"])
    with pytest.raises(RefinementError, match="backend down"):
        refine_pair(reordered, Erroring())


def test_empty_chunk_target_skips_refiner():
    pair = make_pair(2, ["a"])
    chunking = Chunking(pair, (BiChunk((1, 1), (1,)), BiChunk((2, 2), ())), "fixed")
    reordered = reorder_target(chunking)
    refiner = ScriptedRefiner([(Candidate(("a",), 0.0),)])
    refined = refine_pair(reordered, refiner)
    assert refiner.calls == 1
    assert refined.refined_target == ("a",)
    assert len(refined.step_log) == 2


def test_joint_reranking_alpha_boundaries_pick_expected_candidate():
    # two candidates: NAT prefers the first, AT prefers the second
    cand_nat = Candidate(("n",), -0.5)
    cand_at = Candidate(("t",), -3.0)
    at_table = {("n",): -5.0, ("t",): -0.1}
    reordered = single_chunk_reordered(["x"])
    for alpha, expected in ((0.0, ("n",)), (1.0, ("t",))):
        refined = refine_pair(
            reordered,
            ScriptedRefiner([(cand_nat, cand_at)]),
            at_scorer=ScriptedScorer(at_table),
            config=RefineConfig(alpha=alpha),
        )
        assert refined.refined_target == expected
        assert refined.step_log[0].at_logprob == at_table[expected]


# ---------------------------------------------------------------- filters


def test_token_f1_identity():
    assert token_f1(["a", "b"], ["a", "b"]) == 1.0


def test_token_f1_disjoint():
    assert token_f1(["a"], ["b"]) == 0.0


def test_token_f1_partial():
    assert token_f1(["a", "b"], ["a", "c"]) == pytest.approx(0.5)


def test_below_mean_mask_constant_scores_keeps_all():
    assert below_mean_mask([0.9, 0.9, 0.9]) == [True, True, True]


def test_below_mean_mask_drops_strictly_below():
    assert below_mean_mask([1.0, 0.0]) == [True, False]


def test_filter_below_mean_end_to_end():
    kept_pair = refine_pair(single_chunk_reordered(["a", "b"]), IdentityRefiner())
    dropped_pair = refine_pair(single_chunk_reordered(["z", "w"]), IdentityRefiner())
    kept, scores, fraction = filter_below_mean(
        [(kept_pair, ["a", "b"]), (dropped_pair, ["a", "b"])]
    )
    assert scores == [1.0, 0.0]
    assert kept == [kept_pair]
    assert fraction == 0.5


def test_filter_keeps_a_maximum_scorer():
    rng = random.Random(23)
    for _ in range(100):
        scores = [rng.random() for _ in range(rng.randint(1, 10))]
        mask = below_mean_mask(scores)
        best = max(range(len(scores)), key=lambda i: scores[i])
        assert mask[best]


def test_dedup_strictly_reduces_seq_rep_1():
    rng = random.Random(29)
    for _ in range(100):
        tokens = []
        for _ in range(rng.randint(2, 10)):
            tokens.extend([rng.choice("ab")] * rng.randint(1, 3))
        if all(x != y for x, y in zip(tokens, tokens[1:])):
            tokens.append(tokens[-1])  # force at least one adjacent duplicate
        refined = refine_pair(single_chunk_reordered(tokens), DedupRefiner())
        assert seq_rep_n(refined.refined_target, 1) < seq_rep_n(tokens, 1)
