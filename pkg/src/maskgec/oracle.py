"""Masked-word log-probability oracles.

All oracles answer batches of :class:`MaskQuery` with natural-log
probabilities, one per masked position.  Implementations:

* :class:`UniformOracle` -- every target scores ``-ln(V)``; analytically
  known results for tests.
* :class:`NGramOracle` -- deterministic bidirectional bigram model with
  add-k smoothing; the reference oracle and the LM-scoring baseline.
* :class:`RemoteOracle` -- HTTP client for the inference sidecar protocol.
* :class:`CachedOracle` -- bounded LRU wrapper around any oracle.
"""

from __future__ import annotations

import json
import math
import threading
from collections import Counter, OrderedDict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Sequence

import requests

from maskgec.corpus import MASK_TOKEN
from maskgec.errors import BackendUnavailable, EmptyTrainingData, InvalidQuery

UNK = "<unk>"


@dataclass(frozen=True)
class MaskQuery:
    """A token sequence with one or two masked positions and their targets."""

    tokens: tuple[str, ...]
    masked_positions: tuple[int, ...]
    targets: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "masked_positions", tuple(self.masked_positions))
        object.__setattr__(self, "targets", tuple(self.targets))

    def validate(self) -> None:
        if not self.tokens:
            raise InvalidQuery("query has no tokens")
        if not self.masked_positions:
            raise InvalidQuery("query has no masked positions")
        if len(self.masked_positions) > 2:
            raise InvalidQuery("at most 2 masked positions are supported")
        if list(self.masked_positions) != sorted(set(self.masked_positions)):
            raise InvalidQuery("masked positions must be sorted and distinct")
        for pos in self.masked_positions:
            if not 0 <= pos < len(self.tokens):
                raise InvalidQuery(
                    f"masked position {pos} out of range for {len(self.tokens)} tokens"
                )
        if len(self.targets) != len(self.masked_positions):
            raise InvalidQuery("need exactly one target per masked position")
        if any(not t for t in self.targets):
            raise InvalidQuery("targets must be non-empty words")


@dataclass(frozen=True)
class MaskResponse:
    """Natural-log probabilities, aligned 1:1 with the query's masked positions."""

    logprobs: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "logprobs", tuple(float(v) for v in self.logprobs))


class Oracle:
    """Interface: ``query`` maps a batch of queries to a batch of responses."""

    def query(self, batch: Sequence[MaskQuery]) -> list[MaskResponse]:
        raise NotImplementedError

    def query_one(self, query: MaskQuery) -> MaskResponse:
        return self.query([query])[0]


class UniformOracle(Oracle):
    """Assigns every target the same probability 1/V."""

    def __init__(self, vocab_size: int):
        if vocab_size < 1:
            raise InvalidQuery(f"vocab size must be >= 1, got {vocab_size}")
        self.vocab_size = vocab_size
        self._logprob = -math.log(vocab_size)

    def query(self, batch: Sequence[MaskQuery]) -> list[MaskResponse]:
        out = []
        for q in batch:
            q.validate()
            out.append(MaskResponse(tuple(self._logprob for _ in q.masked_positions)))
        return out


def _read_lines(source: str | IO[str] | Iterable[str]) -> list[str]:
    if isinstance(source, str):
        return source.splitlines()
    if hasattr(source, "read"):
        return source.read().splitlines()
    return [line.rstrip("\n") for line in source]


class NGramOracle(Oracle):
    """Bidirectional bigram model with add-k smoothing.

    The masked-word probability mixes a left and a right conditional:

        P = 1/2 * P_L + 1/2 * P_R

    where P_L conditions on the unmasked left neighbor via bigram counts
    (falling back to the add-k unigram when there is no usable neighbor)
    and P_R symmetrically on the right neighbor.  Unknown words map to a
    reserved UNK entry that is part of the vocabulary.
    """

    def __init__(
        self,
        unigram_counts: dict[str, int],
        bigram_counts: dict[str, dict[str, int]],
        add_k: float = 1.0,
    ):
        if add_k <= 0:
            raise InvalidQuery(f"add_k must be positive, got {add_k}")
        self.add_k = float(add_k)
        self.unigram_counts: Counter[str] = Counter(unigram_counts)
        # pair counts indexed both ways: by first word and by second word
        self.left_bigram_counts: dict[str, Counter[str]] = {}
        self.right_bigram_counts: dict[str, Counter[str]] = {}
        for first, following in bigram_counts.items():
            for second, count in following.items():
                self.left_bigram_counts.setdefault(first, Counter())[second] += count
                self.right_bigram_counts.setdefault(second, Counter())[first] += count
        self._left_totals = {w: sum(c.values()) for w, c in self.left_bigram_counts.items()}
        self._right_totals = {w: sum(c.values()) for w, c in self.right_bigram_counts.items()}
        self._total_tokens = sum(self.unigram_counts.values())
        self.vocab: frozenset[str] = frozenset(self.unigram_counts) | {UNK}

    @classmethod
    def train(cls, source: str | IO[str] | Iterable[str], add_k: float = 1.0) -> "NGramOracle":
        """Count unigrams and adjacent pairs, one sentence per line.

        Pairs never cross line boundaries; there are no start/end markers.
        """
        unigrams: Counter[str] = Counter()
        bigrams: dict[str, dict[str, int]] = {}
        for line in _read_lines(source):
            tokens = line.split()
            unigrams.update(tokens)
            for first, second in zip(tokens, tokens[1:]):
                row = bigrams.setdefault(first, {})
                row[second] = row.get(second, 0) + 1
        if not unigrams:
            raise EmptyTrainingData("no tokens in training stream")
        return cls(dict(unigrams), bigrams, add_k=add_k)

    def _fold(self, word: str) -> str:
        return word if word in self.vocab else UNK

    def _unigram_prob(self, word: str) -> float:
        k, v = self.add_k, len(self.vocab)
        return (self.unigram_counts[word] + k) / (self._total_tokens + k * v)

    def conditional_logprob(
        self,
        tokens: Sequence[str],
        position: int,
        target: str,
        masked_left: bool = False,
        masked_right: bool = False,
    ) -> float:
        """ln P(target at position | visible neighbors), per the mixture above."""
        k, v = self.add_k, len(self.vocab)
        word = self._fold(target)
        if position > 0 and not masked_left:
            prev = self._fold(tokens[position - 1])
            row = self.left_bigram_counts.get(prev)
            count = row[word] if row else 0
            p_left = (count + k) / (self._left_totals.get(prev, 0) + k * v)
        else:
            p_left = self._unigram_prob(word)
        if position < len(tokens) - 1 and not masked_right:
            nxt = self._fold(tokens[position + 1])
            row = self.right_bigram_counts.get(nxt)
            count = row[word] if row else 0
            p_right = (count + k) / (self._right_totals.get(nxt, 0) + k * v)
        else:
            p_right = self._unigram_prob(word)
        return math.log(0.5 * p_left + 0.5 * p_right)

    def query(self, batch: Sequence[MaskQuery]) -> list[MaskResponse]:
        out = []
        for q in batch:
            q.validate()
            masked = set(q.masked_positions)
            logprobs = []
            for pos, target in zip(q.masked_positions, q.targets):
                logprobs.append(
                    self.conditional_logprob(
                        q.tokens,
                        pos,
                        target,
                        masked_left=(pos - 1) in masked,
                        masked_right=(pos + 1) in masked,
                    )
                )
            out.append(MaskResponse(tuple(logprobs)))
        return out

    def to_dict(self) -> dict:
        return {
            "format": "bigram-addk",
            "add_k": self.add_k,
            "unigram": dict(sorted(self.unigram_counts.items())),
            "bigram": {
                first: dict(sorted(row.items()))
                for first, row in sorted(self.left_bigram_counts.items())
            },
        }

    def save(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(self.to_dict(), sort_keys=True, ensure_ascii=False, indent=2)
            + "\n",
            encoding="utf-8",
        )

    @classmethod
    def load(cls, path: str | Path) -> "NGramOracle":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(data["unigram"], data["bigram"], add_k=data["add_k"])


def train_ngram_oracle(
    source: str | IO[str] | Iterable[str], add_k: float = 1.0
) -> NGramOracle:
    """Train the reference bigram oracle from raw text, one sentence per line."""
    return NGramOracle.train(source, add_k=add_k)


class CachedOracle(Oracle):
    """Bounded LRU cache in front of another oracle.

    Keys ignore the token content at masked positions: a masked-word
    conditional never depends on what currently sits in the masked slots,
    so semantically equal queries hit the same entry.  Safe for concurrent
    get-or-compute; recomputation is idempotent.
    """

    def __init__(self, inner: Oracle, capacity: int = 1_000_000):
        if capacity < 1:
            raise ValueError("cache capacity must be >= 1")
        self.inner = inner
        self.capacity = capacity
        self._entries: OrderedDict[tuple, MaskResponse] = OrderedDict()
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    @staticmethod
    def _key(q: MaskQuery) -> tuple:
        masked = set(q.masked_positions)
        visible = tuple(
            MASK_TOKEN if i in masked else tok for i, tok in enumerate(q.tokens)
        )
        return (visible, q.masked_positions, q.targets)

    def query(self, batch: Sequence[MaskQuery]) -> list[MaskResponse]:
        for q in batch:
            q.validate()
        keys = [self._key(q) for q in batch]
        results: list[MaskResponse | None] = [None] * len(batch)
        miss_keys: list[tuple] = []
        miss_queries: list[MaskQuery] = []
        with self._lock:
            pending: set[tuple] = set()
            for i, key in enumerate(keys):
                cached = self._entries.get(key)
                if cached is not None:
                    self._entries.move_to_end(key)
                    results[i] = cached
                    self.hits += 1
                else:
                    self.misses += 1
                    if key not in pending:
                        pending.add(key)
                        miss_keys.append(key)
                        miss_queries.append(batch[i])
        if miss_queries:
            computed = self.inner.query(miss_queries)
            with self._lock:
                for key, response in zip(miss_keys, computed):
                    self._entries[key] = response
                    self._entries.move_to_end(key)
                while len(self._entries) > self.capacity:
                    self._entries.popitem(last=False)
            fresh = dict(zip(miss_keys, computed))
            for i, key in enumerate(keys):
                if results[i] is None:
                    results[i] = fresh[key]
        return results  # type: ignore[return-value]

    def __len__(self) -> int:
        with self._lock:
            return len(self._entries)


class RemoteOracle(Oracle):
    """Client for the HTTP mask-logprob protocol.

    Batches larger than the server cap are split into chunks dispatched
    through a bounded pool of in-flight requests; per-batch response
    ordering is preserved.
    """

    def __init__(
        self,
        base_url: str,
        max_batch: int = 32,
        pool_size: int = 4,
        timeout: float = 60.0,
        session: requests.Session | None = None,
    ):
        self.base_url = base_url.rstrip("/")
        self.max_batch = max_batch
        self.pool_size = pool_size
        self.timeout = timeout
        self._session = session or requests.Session()
        self._semaphore = threading.BoundedSemaphore(pool_size)
        self._info: dict | None = None
        self._info_lock = threading.Lock()

    def info(self) -> dict:
        with self._info_lock:
            if self._info is None:
                self._info = self._get_json("/v1/info")
            return self._info

    def health(self) -> bool:
        try:
            return self._get_json("/v1/health").get("status") == "ok"
        except BackendUnavailable:
            return False

    @property
    def max_tokens(self) -> int:
        return int(self.info()["max_tokens"])

    def _get_json(self, path: str) -> dict:
        try:
            resp = self._session.get(self.base_url + path, timeout=self.timeout)
        except requests.RequestException as exc:
            raise BackendUnavailable(f"GET {path}: {exc}") from exc
        if resp.status_code != 200:
            raise BackendUnavailable(f"GET {path}: HTTP {resp.status_code}")
        try:
            return resp.json()
        except ValueError as exc:
            raise BackendUnavailable(f"GET {path}: non-JSON response") from exc

    def query(self, batch: Sequence[MaskQuery]) -> list[MaskResponse]:
        batch = list(batch)
        if not batch:
            return []
        limit = self.max_tokens
        for q in batch:
            q.validate()
            if len(q.tokens) > limit:
                raise InvalidQuery(
                    f"sentence of {len(q.tokens)} tokens exceeds backend limit {limit};"
                    " refusing to truncate"
                )
        chunks = [batch[i : i + self.max_batch] for i in range(0, len(batch), self.max_batch)]
        if len(chunks) == 1:
            return self._post_chunk(chunks[0])
        workers = min(self.pool_size, len(chunks))
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(self._post_chunk, chunks))
        return [response for part in parts for response in part]

    def _post_chunk(self, chunk: list[MaskQuery]) -> list[MaskResponse]:
        payload = {
            "items": [
                {
                    "tokens": list(q.tokens),
                    "masked_positions": list(q.masked_positions),
                    "targets": list(q.targets),
                }
                for q in chunk
            ]
        }
        with self._semaphore:
            try:
                resp = self._session.post(
                    self.base_url + "/v1/mask_logprob", json=payload, timeout=self.timeout
                )
            except requests.RequestException as exc:
                raise BackendUnavailable(f"POST /v1/mask_logprob: {exc}") from exc
        if resp.status_code in (400, 413):
            try:
                message = resp.json().get("error", resp.text)
            except ValueError:
                message = resp.text
            raise InvalidQuery(f"backend rejected query: {message}")
        if resp.status_code != 200:
            raise BackendUnavailable(f"POST /v1/mask_logprob: HTTP {resp.status_code}")
        try:
            items = resp.json()["items"]
        except (ValueError, KeyError) as exc:
            raise BackendUnavailable("malformed backend response") from exc
        if len(items) != len(chunk):
            raise BackendUnavailable(
                f"backend returned {len(items)} items for {len(chunk)} queries"
            )
        out = []
        for q, item in zip(chunk, items):
            logprobs = item.get("logprobs")
            if not isinstance(logprobs, list) or len(logprobs) != len(q.masked_positions):
                raise BackendUnavailable("backend logprob count does not match query")
            out.append(MaskResponse(tuple(float(v) for v in logprobs)))
        return out
