"""Synthetic planted-context text for desk-scale protocol experiments.

Every (error type, word) pair gets its own pair of context tokens, so a
bigram model trained on the generated lines can identify the planted word
from either neighbor.  Useful for end-to-end recovery experiments where
headline-scale corpora and pretrained checkpoints are unavailable.
"""

from __future__ import annotations

from maskgec.registry import ConfusionRegistry


def planted_lines(registry: ConfusionRegistry, n_lines: int = 500) -> list[str]:
    """Round-robin over all (type, word) pairs: ``ctx<j>l <word> ctx<j>r``."""
    pairs = [
        (j, word)
        for j, (error_type, word) in enumerate(
            (t, w) for t in registry.types for w in registry.candidates(t)
        )
    ]
    lines = []
    for i in range(n_lines):
        j, word = pairs[i % len(pairs)]
        lines.append(f"ctx{j}l {word.lower()} ctx{j}r")
    return lines


def planted_text(registry: ConfusionRegistry, n_lines: int = 500) -> str:
    return "\n".join(planted_lines(registry, n_lines)) + "\n"
