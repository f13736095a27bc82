"""Multi-order pseudo-perplexity scoring of a token sequence via an oracle.

Scores are negated per-token means of log-probabilities, so LOWER means
more fluent and candidate selection is a plain argmin.  Within one data
flow all variants have the same token count, so the normalization never
changes the argmin.

First order masks one token at a time.  Second order masks each adjacent
pair once; a token's score is the probability it gets with its left pair
window, averaged with the one from its right pair window (probabilities
are averaged first, then logged).  The first and last token have only one
window each.  Single-token sentences fall back to the first-order score,
since no pair window exists.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from maskgec.errors import AlphaOutOfRange
from maskgec.oracle import MaskQuery, MaskResponse, Oracle

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class ScoreBreakdown:
    """All scores for one sentence variant; fused = alpha*first + (1-alpha)*second."""

    first_order: float
    second_order: float
    fused: float
    alpha: float
    token_count: int


def fused_score(first: float, second: float, alpha: float) -> float:
    """Convex combination of the two orders; alpha=1 keeps only first order."""
    if not 0.0 <= alpha <= 1.0:
        raise AlphaOutOfRange(f"alpha must be in [0, 1], got {alpha}")
    return alpha * first + (1.0 - alpha) * second


def single_mask_queries(tokens: Sequence[str]) -> list[MaskQuery]:
    """One query per position, masking that position alone."""
    tokens = tuple(tokens)
    return [MaskQuery(tokens, (t,), (tokens[t],)) for t in range(len(tokens))]


def pair_mask_queries(tokens: Sequence[str]) -> list[MaskQuery]:
    """One query per adjacent window (t, t+1), carrying both words as targets."""
    tokens = tuple(tokens)
    return [
        MaskQuery(tokens, (t, t + 1), (tokens[t], tokens[t + 1]))
        for t in range(len(tokens) - 1)
    ]


def _first_from(responses: Sequence[MaskResponse]) -> float:
    total = 0.0
    for r in responses:
        total += r.logprobs[0]
    return -total / len(responses)


def _pair_terms(
    n: int, responses: Sequence[MaskResponse]
) -> list[tuple[float, float]]:
    """Per-position (probability, log-probability) from pair-window responses.

    responses[t] answers window (t, t+1) with logprobs for (w_t, w_{t+1}).
    """
    terms: list[tuple[float, float]] = []
    for t in range(n):
        if t == 0:
            lp = responses[0].logprobs[0]
            terms.append((math.exp(lp), lp))
        elif t == n - 1:
            lp = responses[n - 2].logprobs[1]
            terms.append((math.exp(lp), lp))
        else:
            from_left = responses[t - 1].logprobs[1]
            from_right = responses[t].logprobs[0]
            prob = 0.5 * (math.exp(from_left) + math.exp(from_right))
            terms.append((prob, _safe_log_mean(prob, from_left, from_right)))
    return terms


def _safe_log_mean(prob: float, a: float, b: float) -> float:
    # direct log of the averaged probability; log-space fallback only if
    # both exponentials underflowed to zero
    if prob > 0.0:
        return math.log(prob)
    hi, lo = (a, b) if a >= b else (b, a)
    return hi + math.log1p(math.exp(lo - hi)) - _LN2


def _second_from(n: int, responses: Sequence[MaskResponse]) -> float:
    total = 0.0
    for _, logp in _pair_terms(n, responses):
        total += logp
    return -total / n


def first_order_score(tokens: Sequence[str], oracle: Oracle) -> float:
    """Negated mean single-mask log-probability over all positions."""
    if not tokens:
        raise ValueError("cannot score an empty sentence")
    return _first_from(oracle.query(single_mask_queries(tokens)))


def second_order_token_probs(tokens: Sequence[str], oracle: Oracle) -> list[float]:
    """Per-position window-averaged probabilities (sentences of 2+ tokens)."""
    if len(tokens) < 2:
        raise ValueError("pair windows need at least 2 tokens")
    responses = oracle.query(pair_mask_queries(tokens))
    return [prob for prob, _ in _pair_terms(len(tokens), responses)]


def second_order_score(tokens: Sequence[str], oracle: Oracle) -> float:
    """Negated mean log of window-averaged probabilities per position."""
    if not tokens:
        raise ValueError("cannot score an empty sentence")
    if len(tokens) == 1:
        return first_order_score(tokens, oracle)
    return _second_from(len(tokens), oracle.query(pair_mask_queries(tokens)))


def score_variant(tokens: Sequence[str], oracle: Oracle, alpha: float) -> ScoreBreakdown:
    """Both orders plus their fusion, issuing all masks as one oracle batch."""
    if not tokens:
        raise ValueError("cannot score an empty sentence")
    if not 0.0 <= alpha <= 1.0:
        raise AlphaOutOfRange(f"alpha must be in [0, 1], got {alpha}")
    n = len(tokens)
    singles = single_mask_queries(tokens)
    pairs = pair_mask_queries(tokens)
    responses = oracle.query(singles + pairs)
    first = _first_from(responses[:n])
    second = first if n == 1 else _second_from(n, responses[n:])
    return ScoreBreakdown(
        first_order=first,
        second_order=second,
        fused=fused_score(first, second, alpha),
        alpha=alpha,
        token_count=n,
    )
