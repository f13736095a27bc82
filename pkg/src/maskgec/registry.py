"""Confusion-set registry: load, validate, and query per-error-type word sets.

Registry file format: UTF-8 text, one set per line,

    <error_type_name>: w1, w2, ..., wn

Lines starting with ``#`` are comments.  Words may be separated by commas,
whitespace, or both.  Word matching is case-insensitive (lowercase folding);
the stored word forms are preserved as written.
"""

from __future__ import annotations

import importlib.resources
import re
from dataclasses import dataclass
from typing import IO, Iterable

from maskgec.errors import (
    DuplicateWordInSet,
    EmptySet,
    MalformedRegistry,
    UnknownErrorType,
)

ErrorType = str

_WORD_SPLIT = re.compile(r"[,\s]+")


def normalize_type_name(name: str) -> str:
    """Canonical error-type name: lowercase with separators collapsed to '_'."""
    return re.sub(r"[\s\-]+", "_", name.strip().lower())


@dataclass(frozen=True)
class ConfusionSet:
    """One error type together with its ordered candidate words."""

    error_type: ErrorType
    words: tuple[str, ...]


class ConfusionRegistry:
    """Immutable collection of confusion sets with a word-to-types index.

    Instances are safe for unrestricted concurrent reads.
    """

    def __init__(self, sets: Iterable[ConfusionSet]):
        self._sets: dict[str, ConfusionSet] = {}
        self._folded: dict[str, frozenset[str]] = {}
        self._word_index: dict[str, set[str]] = {}
        for cs in sets:
            _validate_set(cs)
            if cs.error_type in self._sets:
                raise MalformedRegistry(f"duplicate error type {cs.error_type!r}")
            self._sets[cs.error_type] = cs
            self._folded[cs.error_type] = frozenset(w.lower() for w in cs.words)
            for word in cs.words:
                self._word_index.setdefault(word.lower(), set()).add(cs.error_type)
        if not self._sets:
            raise EmptySet("registry defines no confusion sets")

    @property
    def types(self) -> tuple[ErrorType, ...]:
        """Error types in declaration order."""
        return tuple(self._sets)

    @property
    def sets(self) -> tuple[ConfusionSet, ...]:
        return tuple(self._sets.values())

    @property
    def word_index(self) -> dict[str, frozenset[str]]:
        """Lowercased word -> error types whose set contains it."""
        return {w: frozenset(ts) for w, ts in self._word_index.items()}

    def candidates(self, error_type: str) -> tuple[str, ...]:
        """Full ordered word list of one error type."""
        key = normalize_type_name(error_type)
        try:
            return self._sets[key].words
        except KeyError:
            raise UnknownErrorType(f"unknown error type {error_type!r}") from None

    def match_types(self, word: str) -> set[ErrorType]:
        """All error types whose confusion set contains the word (case folded)."""
        return set(self._word_index.get(word.lower(), ()))

    def contains(self, error_type: str, word: str) -> bool:
        key = normalize_type_name(error_type)
        if key not in self._folded:
            raise UnknownErrorType(f"unknown error type {error_type!r}")
        return word.lower() in self._folded[key]

    def __contains__(self, error_type: str) -> bool:
        return normalize_type_name(error_type) in self._sets

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ConfusionRegistry):
            return NotImplemented
        return self.sets == other.sets

    def __repr__(self) -> str:
        return f"ConfusionRegistry({len(self._sets)} sets)"


def _validate_set(cs: ConfusionSet) -> None:
    if not cs.error_type:
        raise MalformedRegistry("empty error type name")
    seen: set[str] = set()
    for word in cs.words:
        if not word or word.split() != [word]:
            raise MalformedRegistry(
                f"set {cs.error_type!r}: word {word!r} is empty or contains whitespace"
            )
        folded = word.lower()
        if folded in seen:
            raise DuplicateWordInSet(f"set {cs.error_type!r}: duplicate word {word!r}")
        seen.add(folded)
    if len(cs.words) < 2:
        raise EmptySet(f"set {cs.error_type!r} needs at least 2 distinct words")


def load_confusion_sets(source: str | IO[str]) -> ConfusionRegistry:
    """Parse registry text (or an open text stream) into a validated registry."""
    text = source if isinstance(source, str) else source.read()
    sets: list[ConfusionSet] = []
    declared: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        name, sep, payload = line.partition(":")
        if not sep:
            raise MalformedRegistry(f"line {lineno}: expected '<error_type>: words'")
        type_name = normalize_type_name(name)
        if not type_name:
            raise MalformedRegistry(f"line {lineno}: empty error type name")
        if type_name in declared:
            raise MalformedRegistry(
                f"line {lineno}: error type {type_name!r} already declared "
                f"on line {declared[type_name]}"
            )
        declared[type_name] = lineno
        words = [w for w in _WORD_SPLIT.split(payload.strip()) if w]
        if len(words) < 2:
            raise EmptySet(f"line {lineno}: set {type_name!r} needs at least 2 words")
        folded_seen: set[str] = set()
        for word in words:
            folded = word.lower()
            if folded in folded_seen:
                raise DuplicateWordInSet(
                    f"line {lineno}: duplicate word {word!r} in set {type_name!r}"
                )
            folded_seen.add(folded)
        sets.append(ConfusionSet(type_name, tuple(words)))
    if not sets:
        raise EmptySet("no confusion sets found in registry source")
    return ConfusionRegistry(sets)


def dump_registry(registry: ConfusionRegistry) -> str:
    """Serialize to the registry line format; inverse of load_confusion_sets."""
    lines = [f"{cs.error_type}: {', '.join(cs.words)}" for cs in registry.sets]
    return "\n".join(lines) + "\n"


def load_bundled_registry(name: str = "tagalog") -> ConfusionRegistry:
    """Load a registry shipped with the package (currently: 'tagalog')."""
    resource = importlib.resources.files("maskgec") / "data" / f"{name}.cfg"
    try:
        text = resource.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise UnknownErrorType(f"no bundled registry named {name!r}") from None
    return load_confusion_sets(text)
