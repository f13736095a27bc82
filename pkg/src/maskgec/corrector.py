"""Candidate data flows, ranking, and correction for a single slot.

A data flow holds one sentence variant per confusion word of the slot's
error type.  Variants are scored with :func:`maskgec.scoring.score_variant`
and sorted ascending (ties broken by candidate word), so the best candidate
is simply the first entry.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from maskgec.corpus import MASK_TOKEN
from maskgec.errors import SlotOutOfRange
from maskgec.oracle import Oracle
from maskgec.registry import ConfusionRegistry, normalize_type_name
from maskgec.scoring import ScoreBreakdown, score_variant

DEFAULT_ALPHA = 0.5

# ranking keys for ablation runs; "fused" is the standard behavior
SCORER_MODES = ("first", "second", "fused")


@dataclass(frozen=True)
class DataFlow:
    """All candidate-filled variants for one slot."""

    base_tokens: tuple[str, ...]
    slot_index: int
    error_type: str
    variants: tuple[tuple[str, tuple[str, ...]], ...]


@dataclass(frozen=True)
class RankedEntry:
    word: str
    scores: ScoreBreakdown


@dataclass(frozen=True)
class RankedList:
    """Candidates ascending by ranking score, ties by word."""

    entries: tuple[RankedEntry, ...]

    def words(self) -> list[str]:
        return [e.word for e in self.entries]


@dataclass(frozen=True)
class Correction:
    """Outcome for one slot: the winning candidate plus the full ranking."""

    original_word: str | None
    predicted_word: str
    changed: bool
    ranked: RankedList
    slot_index: int
    error_type: str


def build_dataflow(
    tokens: Sequence[str],
    slot_index: int,
    error_type: str,
    registry: ConfusionRegistry,
) -> DataFlow:
    """One variant per confusion word, in registry order.

    The word currently at the slot (if any) gets no special placement; the
    slot may hold a real word or the [MASK] token.
    """
    tokens = tuple(tokens)
    if not 0 <= slot_index < len(tokens):
        raise SlotOutOfRange(
            f"slot {slot_index} out of range for {len(tokens)} tokens"
        )
    error_type = normalize_type_name(error_type)
    words = registry.candidates(error_type)
    variants = tuple(
        (word, tokens[:slot_index] + (word,) + tokens[slot_index + 1 :])
        for word in words
    )
    return DataFlow(tokens, slot_index, error_type, variants)


def _ranking_key(scores: ScoreBreakdown, mode: str) -> float:
    if mode == "first":
        return scores.first_order
    if mode == "second":
        return scores.second_order
    if mode == "fused":
        return scores.fused
    raise ValueError(f"unknown scorer mode {mode!r}")


def rank_candidates(
    flow: DataFlow,
    oracle: Oracle,
    alpha: float = DEFAULT_ALPHA,
    mode: str = "fused",
) -> RankedList:
    """Score every variant and sort ascending; smaller scores rank higher.

    ``mode`` selects the ranking key among the breakdown fields for
    ablation runs; the default ranks by the fused score.
    """
    entries = [
        RankedEntry(word, score_variant(tokens, oracle, alpha))
        for word, tokens in flow.variants
    ]
    entries.sort(key=lambda e: (_ranking_key(e.scores, mode), e.word))
    return RankedList(tuple(entries))


def correct(
    tokens: Sequence[str],
    slot_index: int,
    error_type: str,
    registry: ConfusionRegistry,
    oracle: Oracle,
    alpha: float = DEFAULT_ALPHA,
    mode: str = "fused",
) -> Correction:
    """Pick the best candidate for the slot.

    With a real word at the slot, ``changed`` says whether the prediction
    differs from it (case-folded); with a [MASK] slot there is nothing to
    change and ``changed`` is False.
    """
    flow = build_dataflow(tokens, slot_index, error_type, registry)
    ranked = rank_candidates(flow, oracle, alpha, mode)
    predicted = ranked.entries[0].word
    original = tokens[slot_index] if tokens[slot_index] != MASK_TOKEN else None
    changed = original is not None and original.lower() != predicted.lower()
    return Correction(original, predicted, changed, ranked, slot_index, flow.error_type)


def recommend_topk(
    tokens: Sequence[str],
    slot_index: int,
    error_type: str,
    registry: ConfusionRegistry,
    oracle: Oracle,
    alpha: float = DEFAULT_ALPHA,
    k: int = 1,
    mode: str = "fused",
) -> list[str]:
    """First min(k, set size) words of the ranking."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    flow = build_dataflow(tokens, slot_index, error_type, registry)
    return rank_candidates(flow, oracle, alpha, mode).words()[:k]


def correct_text(
    tokens: Sequence[str],
    registry: ConfusionRegistry,
    oracle: Oracle,
    alpha_per_type: Mapping[str, float] | None = None,
    default_alpha: float = DEFAULT_ALPHA,
    mode: str = "fused",
) -> list[Correction]:
    """Corrections for every confusion-word occurrence in a raw sentence.

    Positions are judged independently against the original sentence (no
    cascading); a word belonging to several sets yields one correction per
    matched type, in registry declaration order.
    """
    alpha_per_type = alpha_per_type or {}
    tokens = tuple(tokens)
    corrections: list[Correction] = []
    for position, word in enumerate(tokens):
        matched = registry.match_types(word)
        if not matched:
            continue
        for error_type in registry.types:
            if error_type not in matched:
                continue
            alpha = alpha_per_type.get(error_type, default_alpha)
            corrections.append(
                correct(tokens, position, error_type, registry, oracle, alpha, mode)
            )
    return corrections
