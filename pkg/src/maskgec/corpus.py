"""Masked-slot corpus format: parsing, writing, building, and statistics.

Corpus files are UTF-8 TSV with three fields per row:

    <space-separated tokens, exactly one [MASK]>  <answer>  <error type>

The slot token is the literal six characters ``[MASK]``.
"""

from __future__ import annotations

import random
import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from typing import IO, Iterable, Mapping

from maskgec.errors import (
    AnswerNotInConfusionSet,
    MalformedRow,
    MissingOrMultipleMaskSlot,
    UnknownErrorType,
)
from maskgec.registry import ConfusionRegistry, normalize_type_name

MASK_TOKEN = "[MASK]"


@dataclass(frozen=True)
class Sample:
    """One evaluation instance: a sentence with a single masked slot."""

    tokens: tuple[str, ...]
    answer: str
    error_type: str

    @property
    def slot_index(self) -> int:
        return self.tokens.index(MASK_TOKEN)


@dataclass(frozen=True)
class Corpus:
    samples: tuple[Sample, ...]
    provenance: str = field(default="", compare=False)

    def __len__(self) -> int:
        return len(self.samples)

    def __iter__(self):
        return iter(self.samples)


@dataclass(frozen=True)
class CorpusStats:
    per_type: dict[str, int]
    total: int


def parse_corpus(source: str | IO[str], registry: ConfusionRegistry) -> Corpus:
    """Parse and validate a TSV corpus against a registry.

    Rows that violate the sample invariants are rejected with their
    1-based row number in the error message.
    """
    text = source if isinstance(source, str) else source.read()
    samples: list[Sample] = []
    for row_no, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip():
            continue
        fields = raw.split("\t")
        if len(fields) != 3:
            raise MalformedRow(
                f"row {row_no}: expected 3 tab-separated fields, got {len(fields)}"
            )
        sentence, answer, type_field = fields
        tokens = sentence.split()
        if not tokens:
            raise MalformedRow(f"row {row_no}: empty sentence")
        mask_count = tokens.count(MASK_TOKEN)
        if mask_count != 1:
            raise MissingOrMultipleMaskSlot(
                f"row {row_no}: found {mask_count} {MASK_TOKEN} tokens, need exactly 1"
            )
        answer = answer.strip()
        if not answer or answer.split() != [answer]:
            raise MalformedRow(f"row {row_no}: bad answer field {answer!r}")
        error_type = normalize_type_name(type_field)
        try:
            in_set = registry.contains(error_type, answer)
        except UnknownErrorType:
            raise UnknownErrorType(
                f"row {row_no}: unknown error type {type_field.strip()!r}"
            ) from None
        if not in_set:
            raise AnswerNotInConfusionSet(
                f"row {row_no}: answer {answer!r} not in set of {error_type!r}"
            )
        samples.append(Sample(tuple(tokens), answer, error_type))
    return Corpus(tuple(samples))


def dumps_corpus(corpus: Corpus) -> str:
    """Render a corpus in the TSV file format."""
    lines = [
        "\t".join((" ".join(s.tokens), s.answer, s.error_type))
        for s in corpus.samples
    ]
    return "".join(line + "\n" for line in lines)


def write_corpus(corpus: Corpus, stream: IO[str]) -> None:
    stream.write(dumps_corpus(corpus))


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def tokenize_line(line: str) -> list[str]:
    """Whitespace tokenization with leading/trailing punctuation split off.

    Internal punctuation (hyphens, apostrophes) stays inside the word, so
    forms like "hinding-hindi" and "bagama't" survive intact.
    """
    tokens: list[str] = []
    for chunk in line.split():
        lead: list[str] = []
        trail: list[str] = []
        while chunk and _is_punct(chunk[0]):
            lead.append(chunk[0])
            chunk = chunk[1:]
        while chunk and _is_punct(chunk[-1]):
            trail.append(chunk[-1])
            chunk = chunk[:-1]
        tokens.extend(lead)
        if chunk:
            tokens.append(chunk)
        tokens.extend(reversed(trail))
    return tokens


def build_corpus(
    raw_text: str | IO[str] | Iterable[str],
    registry: ConfusionRegistry,
    quota: int | Mapping[str, int],
    seed: int = 0,
) -> Corpus:
    """Mine masked-slot samples from raw text, one sentence per line.

    For each error type, up to ``quota`` sentences containing one of its
    confusion words are drawn uniformly at random; in each drawn sentence a
    single occurrence is chosen uniformly and replaced with the slot token,
    recording the original word as the answer.  Deterministic for a fixed
    seed.  Types with no eligible sentences contribute no samples.
    """
    if isinstance(raw_text, str):
        raw_lines = raw_text.splitlines()
    elif hasattr(raw_text, "read"):
        raw_lines = raw_text.read().splitlines()
    else:
        raw_lines = [line.rstrip("\n") for line in raw_text]
    sentences = [tokenize_line(line) for line in raw_lines if line.strip()]

    rng = random.Random(seed)
    samples: list[Sample] = []
    for error_type in registry.types:
        per_type = quota if isinstance(quota, int) else int(quota.get(error_type, 0))
        if per_type <= 0:
            continue
        folded = {w.lower() for w in registry.candidates(error_type)}
        eligible: list[tuple[int, list[int]]] = []
        for idx, tokens in enumerate(sentences):
            occurrences = [p for p, tok in enumerate(tokens) if tok.lower() in folded]
            if occurrences:
                eligible.append((idx, occurrences))
        if not eligible:
            continue
        if len(eligible) <= per_type:
            chosen = list(eligible)
        else:
            chosen = rng.sample(eligible, per_type)
        chosen.sort(key=lambda pair: pair[0])
        for idx, occurrences in chosen:
            pos = occurrences[0] if len(occurrences) == 1 else rng.choice(occurrences)
            tokens = sentences[idx]
            masked = tuple(tokens[:pos]) + (MASK_TOKEN,) + tuple(tokens[pos + 1 :])
            samples.append(Sample(masked, tokens[pos], error_type))
    provenance = f"built from {len(sentences)} sentences, seed={seed}"
    return Corpus(tuple(samples), provenance)


def corpus_stats(corpus: Corpus) -> CorpusStats:
    counts = Counter(s.error_type for s in corpus.samples)
    return CorpusStats(dict(counts), sum(counts.values()))


def stats_to_dict(stats: CorpusStats) -> dict:
    return {"per_type": dict(stats.per_type), "total": stats.total}


def format_stats(stats: CorpusStats) -> str:
    """Aligned plain-text table of per-type sample counts."""
    rows = sorted(stats.per_type.items())
    width = max([len("error type")] + [len(t) for t, _ in rows])
    lines = [f"{'error type':<{width}}  samples"]
    for error_type, count in rows:
        lines.append(f"{error_type:<{width}}  {count}")
    lines.append(f"{'total':<{width}}  {stats.total}")
    return "\n".join(lines) + "\n"
