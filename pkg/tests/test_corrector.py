import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from maskgec.corpus import MASK_TOKEN
from maskgec.corrector import (
    DataFlow,
    build_dataflow,
    correct,
    correct_text,
    rank_candidates,
    recommend_topk,
)
from maskgec.errors import SlotOutOfRange, UnknownErrorType
from maskgec.oracle import CachedOracle, train_ngram_oracle
from tests.conftest import RecordingOracle


def test_dataflow_one_variant_per_word(tagalog):
    flow = build_dataflow(["si", "juan", "kumain"], 0, "article", tagalog)
    assert len(flow.variants) == 6
    assert [w for w, _ in flow.variants] == list(tagalog.candidates("article"))
    for word, tokens in flow.variants:
        assert tokens[0] == word
        assert tokens[1:] == ("juan", "kumain")


def test_dataflow_includes_original_without_special_place(tagalog):
    flow = build_dataflow(["hindi", "siya", "aalis"], 0, "negative_adverb", tagalog)
    words = [w for w, _ in flow.variants]
    assert len(words) == 5
    assert "hindi" in words
    assert words == list(tagalog.candidates("negative_adverb"))


def test_slot_out_of_range(tagalog):
    with pytest.raises(SlotOutOfRange):
        build_dataflow(["a", "b"], 2, "article", tagalog)
    with pytest.raises(SlotOutOfRange):
        build_dataflow(["a", "b"], -1, "article", tagalog)
    with pytest.raises(UnknownErrorType):
        build_dataflow(["a", "b"], 0, "nope", tagalog)


def test_uniform_ties_break_lexicographically(tagalog, uniform10):
    flow = build_dataflow([MASK_TOKEN, "x"], 0, "article", tagalog)
    ranked = rank_candidates(flow, uniform10, 0.5)
    assert ranked.words() == ["ang", "ng", "ni", "nina", "si", "sina"]


def test_training_word_ranks_first(tagalog):
    oracle = train_ngram_oracle("hindi siya aalis")
    flow = build_dataflow(["hindi", "siya", "aalis"], 0, "negative_adverb", tagalog)
    ranked = rank_candidates(flow, oracle, 0.5)
    assert ranked.words()[0] == "hindi"

    # brute-force re-scoring per variant straight from the oracle conditionals
    def brute_fused(tokens):
        n = len(tokens)
        first = -sum(
            oracle.conditional_logprob(tokens, t, tokens[t]) for t in range(n)
        ) / n
        terms = []
        for t in range(n):
            if t == 0:
                terms.append(oracle.conditional_logprob(tokens, 0, tokens[0], False, True))
            elif t == n - 1:
                terms.append(oracle.conditional_logprob(tokens, t, tokens[t], True, False))
            else:
                left = math.exp(oracle.conditional_logprob(tokens, t, tokens[t], True, False))
                right = math.exp(oracle.conditional_logprob(tokens, t, tokens[t], False, True))
                terms.append(math.log(0.5 * (left + right)))
        second = -sum(terms) / n
        return 0.5 * first + 0.5 * second

    brute = sorted(
        ((brute_fused(list(tokens)), word) for word, tokens in flow.variants)
    )
    assert ranked.words() == [word for _, word in brute]


def test_ranking_invariant_to_variant_order(tagalog, uniform10):
    flow = build_dataflow([MASK_TOKEN, "siya"], 0, "negative_adverb", tagalog)
    reversed_flow = DataFlow(
        flow.base_tokens, flow.slot_index, flow.error_type, tuple(reversed(flow.variants))
    )
    assert rank_candidates(flow, uniform10, 0.5) == rank_candidates(
        reversed_flow, uniform10, 0.5
    )


def test_correct_unchanged_when_original_wins(tagalog):
    oracle = train_ngram_oracle("hindi siya aalis\nwag kang umalis\n")
    result = correct(["hindi", "siya", "aalis"], 0, "negative_adverb", tagalog, oracle)
    assert result.predicted_word == "hindi"
    assert result.original_word == "hindi"
    assert result.changed is False


def test_correct_masked_slot(tagalog):
    oracle = train_ngram_oracle("hindi siya aalis")
    result = correct([MASK_TOKEN, "siya", "aalis"], 0, "negative_adverb", tagalog, oracle)
    assert result.original_word is None
    assert result.changed is False
    assert result.predicted_word == "hindi"


def test_correct_restores_planted_error(tagalog):
    oracle = train_ngram_oracle(
        "hindi siya aalis\nsi juan ang kumain\nwag kang tumakbo\n"
    )
    result = correct(["wag", "siya", "aalis"], 0, "negative_adverb", tagalog, oracle)
    assert result.predicted_word == "hindi"
    assert result.changed is True


def test_predicted_word_always_in_set(tagalog, uniform10):
    result = correct(["whatever", "siya"], 0, "negative_adverb", tagalog, uniform10)
    assert result.predicted_word in tagalog.candidates("negative_adverb")


def test_topk_full_set_and_k1(tagalog, uniform10):
    tokens = [MASK_TOKEN, "siya"]
    full = recommend_topk(tokens, 0, "article", tagalog, uniform10, k=99)
    assert full == ["ang", "ng", "ni", "nina", "si", "sina"]
    top1 = recommend_topk(tokens, 0, "article", tagalog, uniform10, k=1)
    assert top1 == [correct(tokens, 0, "article", tagalog, uniform10).predicted_word]
    assert recommend_topk(tokens, 0, "article", tagalog, uniform10, k=3) == [
        "ang", "ng", "ni",
    ]
    with pytest.raises(ValueError):
        recommend_topk(tokens, 0, "article", tagalog, uniform10, k=0)


@given(st.integers(min_value=1, max_value=6))
@settings(max_examples=20)
def test_topk_prefix_property(k):
    from maskgec.registry import load_bundled_registry
    from maskgec.oracle import UniformOracle

    registry = load_bundled_registry()
    oracle = train_ngram_oracle("si juan ang kumain ng isda")
    tokens = [MASK_TOKEN, "juan", "kumain"]
    smaller = recommend_topk(tokens, 0, "article", registry, oracle, k=k)
    larger = recommend_topk(tokens, 0, "article", registry, oracle, k=k + 1)
    assert larger[: len(smaller)] == smaller


def test_correct_text_no_matches(tagalog, uniform10):
    assert correct_text(["walang", "laman"], tagalog, uniform10) == []


def test_correct_text_multi_type_word(tagalog, uniform10):
    corrections = correct_text(["iyong", "bahay"], tagalog, uniform10)
    assert [c.error_type for c in corrections] == ["personal_pronouns", "demonstrative"]
    assert all(c.slot_index == 0 for c in corrections)


def test_correct_text_no_cascading(tagalog):
    oracle = train_ngram_oracle("hindi siya aalis\nwag kang tumakbo\n")
    tokens = ["hindi", "kang", "tumakbo"]
    first_run = correct_text(tokens, tagalog, oracle)
    second_run = correct_text(tokens, tagalog, oracle)
    assert first_run == second_run
    # every correction was judged against the original token sequence
    for c in first_run:
        assert c.original_word == tokens[c.slot_index]


def test_point_query_budget(tagalog):
    oracle = RecordingOracle(train_ngram_oracle("hindi siya aalis"))
    flow = build_dataflow([MASK_TOKEN, "siya", "aalis"], 0, "negative_adverb", tagalog)
    rank_candidates(flow, oracle, 0.5)
    k, n = len(flow.variants), 3
    assert oracle.point_queries <= k * (3 * n - 2)


def test_cached_ranking_matches_uncached(tagalog):
    raw = train_ngram_oracle("hindi siya aalis\nwag kang tumakbo\n")
    flow = build_dataflow([MASK_TOKEN, "siya", "aalis"], 0, "negative_adverb", tagalog)
    assert rank_candidates(flow, CachedOracle(raw), 0.5) == rank_candidates(flow, raw, 0.5)
