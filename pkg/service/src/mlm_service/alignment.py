"""Word-to-subword alignment for word-level mask queries."""

from __future__ import annotations

from typing import Sequence


class TokenizationMismatch(Exception):
    """A word cannot be reconciled with the tokenizer's subword stream."""


def align_words_to_subwords(
    words: Sequence[str], tokenizer
) -> tuple[list[str], list[tuple[int, int]]]:
    """Tokenize each word separately and track its span in the piece stream.

    Returns (pieces, spans); spans[i] = (start, end) half-open indices of
    word i's pieces.  Spans are contiguous, cover every piece, and there is
    exactly one span per word.
    """
    if not words:
        raise TokenizationMismatch("cannot align an empty word sequence")
    pieces: list[str] = []
    spans: list[tuple[int, int]] = []
    for word in words:
        word_pieces = tokenizer.tokenize(word)
        if not word_pieces:
            raise TokenizationMismatch(f"word {word!r} produced no subword pieces")
        start = len(pieces)
        pieces.extend(word_pieces)
        spans.append((start, len(pieces)))
    return pieces, spans
