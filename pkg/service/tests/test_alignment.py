import pytest

from mlm_service.alignment import TokenizationMismatch, align_words_to_subwords


def test_single_word_single_span(served):
    pieces, spans = align_words_to_subwords(["playing"], served.tokenizer)
    assert pieces == ["play", "##ing"]
    assert spans == [(0, 2)]


def test_one_piece_per_word(served):
    words = ["the", "cat", "sat"]
    pieces, spans = align_words_to_subwords(words, served.tokenizer)
    assert pieces == words
    assert spans == [(0, 1), (1, 2), (2, 3)]


def test_spans_cover_and_are_contiguous(served):
    words = ["the", "playing", "cat", "zebra", "plays"]
    pieces, spans = align_words_to_subwords(words, served.tokenizer)
    assert len(spans) == len(words)
    cursor = 0
    for start, end in spans:
        assert start == cursor and end > start
        cursor = end
    assert cursor == len(pieces)
    # concatenated spans reconstruct the full piece sequence
    rebuilt = [p for start, end in spans for p in pieces[start:end]]
    assert rebuilt == pieces


def test_unknown_word_becomes_unk(served):
    pieces, spans = align_words_to_subwords(["qqqq"], served.tokenizer)
    assert pieces == ["[UNK]"]
    assert spans == [(0, 1)]


def test_empty_sequence_rejected(served):
    with pytest.raises(TokenizationMismatch):
        align_words_to_subwords([], served.tokenizer)


def test_unalignable_word_rejected(served):
    class DroppingTokenizer:
        def tokenize(self, word):
            return []

    with pytest.raises(TokenizationMismatch):
        align_words_to_subwords(["anything"], DroppingTokenizer())
