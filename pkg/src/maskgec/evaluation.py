"""Evaluation harness: per-class and aggregated P/R/F0.5, Hit@K, alpha tuning.

Classes are the confusion words of each error type.  Micro metrics pool
counts over classes, which for single-label prediction collapses to plain
accuracy (micro P == R == F0.5).  Macro F0.5 is reported both ways: the
mean of per-class F0.5 values ("averaged F") and F0.5 applied to the
macro-averaged precision and recall ("F of averages").  Classes that never
appear as gold answers are excluded from macro averages.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import IO, Mapping, Sequence

from maskgec._parallel import ordered_map
from maskgec.corpus import Corpus, Sample
from maskgec.corrector import DEFAULT_ALPHA, build_dataflow, correct, rank_candidates
from maskgec.errors import AlphaOutOfRange, EmptyCorpus, UnknownErrorType
from maskgec.oracle import CachedOracle, Oracle
from maskgec.registry import ConfusionRegistry, normalize_type_name
from maskgec.scoring import fused_score

METRIC_KEYS = (
    "p_macro",
    "p_micro",
    "r_macro",
    "r_micro",
    "f05_macro_averaged",
    "f05_macro_of_averages",
    "f05_micro",
)


def f_beta(p: float, r: float, beta: float = 0.5) -> float:
    """(1+b^2)*p*r / (b^2*p + r), defined as 0 when the denominator is 0."""
    denom = beta * beta * p + r
    if denom == 0:
        return 0.0
    return (1 + beta * beta) * p * r / denom


@dataclass(frozen=True)
class ClassCounts:
    tp: int
    fp: int
    fn: int
    support: int


@dataclass(frozen=True)
class ClassMetrics:
    counts: ClassCounts
    precision: float
    recall: float
    f05: float


@dataclass(frozen=True)
class TypeMetrics:
    """Table row for one error type."""

    error_type: str
    alpha: float | None
    sample_count: int
    per_class: dict[str, ClassMetrics]
    p_macro: float
    p_micro: float
    r_macro: float
    r_micro: float
    f05_macro_averaged: float
    f05_macro_of_averages: float
    f05_micro: float


@dataclass(frozen=True)
class MetricsReport:
    scorer_mode: str
    alpha_source: str
    per_type: dict[str, TypeMetrics]
    average: dict[str, float]
    overall_accuracy: float
    sample_count: int


@dataclass(frozen=True)
class TypeAlphaTuning:
    error_type: str
    best_alpha: float
    best_f05_macro_averaged: float
    curve: tuple[tuple[float, float], ...]


@dataclass(frozen=True)
class AlphaTuningResult:
    per_type: dict[str, TypeAlphaTuning]
    grid: tuple[float, ...]


def default_alpha_grid() -> list[float]:
    """0.00 .. 1.00 in steps of 0.01."""
    return [i / 100 for i in range(101)]


def aggregate_type_metrics(
    golds: Sequence[str], preds: Sequence[str], classes: Sequence[str]
) -> tuple[dict[str, ClassMetrics], dict[str, float]]:
    """Confusion counts and the seven aggregate metrics for one error type.

    golds and preds are aligned per-sample labels, already case folded;
    classes is the full confusion-word universe of the type.
    """
    if len(golds) != len(preds):
        raise ValueError("golds and preds must be aligned")
    per_class: dict[str, ClassMetrics] = {}
    for cls in classes:
        tp = sum(1 for g, p in zip(golds, preds) if g == cls and p == cls)
        fp = sum(1 for g, p in zip(golds, preds) if p == cls and g != cls)
        fn = sum(1 for g, p in zip(golds, preds) if g == cls and p != cls)
        support = tp + fn
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / support if support else 0.0
        per_class[cls] = ClassMetrics(
            ClassCounts(tp, fp, fn, support), precision, recall, f_beta(precision, recall)
        )
    supported = [m for m in per_class.values() if m.counts.support > 0]
    if not supported:
        raise EmptyCorpus("no gold answers to evaluate")
    p_macro = sum(m.precision for m in supported) / len(supported)
    r_macro = sum(m.recall for m in supported) / len(supported)
    f05_macro_averaged = sum(m.f05 for m in supported) / len(supported)
    tp_total = sum(m.counts.tp for m in per_class.values())
    accuracy = tp_total / len(golds)
    aggregates = {
        "p_macro": p_macro,
        "p_micro": accuracy,
        "r_macro": r_macro,
        "r_micro": accuracy,
        "f05_macro_averaged": f05_macro_averaged,
        "f05_macro_of_averages": f_beta(p_macro, r_macro),
        "f05_micro": accuracy,
    }
    return per_class, aggregates


def _alpha_for(alpha_per_type: Mapping[str, float], error_type: str, default: float) -> float:
    alpha = alpha_per_type.get(error_type, default)
    if not 0.0 <= alpha <= 1.0:
        raise AlphaOutOfRange(f"alpha for {error_type!r} must be in [0, 1], got {alpha}")
    return alpha


def _group_by_type(corpus: Corpus) -> dict[str, list[Sample]]:
    groups: dict[str, list[Sample]] = {}
    for sample in corpus.samples:
        groups.setdefault(sample.error_type, []).append(sample)
    return groups


def evaluate(
    corpus: Corpus,
    registry: ConfusionRegistry,
    oracle: Oracle,
    alpha_per_type: Mapping[str, float] | None = None,
    scorer_mode: str = "fused",
    default_alpha: float = DEFAULT_ALPHA,
    alpha_source: str = "fixed",
    jobs: int = 1,
) -> MetricsReport:
    """Predict every sample with :func:`maskgec.corrector.correct` and aggregate.

    The cross-type "average" row is the unweighted mean over error types;
    overall_accuracy pools all samples.
    """
    if not corpus.samples:
        raise EmptyCorpus("cannot evaluate an empty corpus")
    if scorer_mode not in ("first", "second", "fused"):
        raise ValueError(f"unknown scorer mode {scorer_mode!r}")
    alpha_per_type = alpha_per_type or {}
    per_type: dict[str, TypeMetrics] = {}
    correct_total = 0
    for error_type, samples in _group_by_type(corpus).items():
        alpha = _alpha_for(alpha_per_type, error_type, default_alpha)

        def predict(sample: Sample, _alpha=alpha) -> str:
            return correct(
                sample.tokens, sample.slot_index, sample.error_type,
                registry, oracle, _alpha, scorer_mode,
            ).predicted_word

        preds = [p.lower() for p in ordered_map(predict, samples, jobs)]
        golds = [s.answer.lower() for s in samples]
        classes = [w.lower() for w in registry.candidates(error_type)]
        per_class, agg = aggregate_type_metrics(golds, preds, classes)
        correct_total += sum(1 for g, p in zip(golds, preds) if g == p)
        per_type[error_type] = TypeMetrics(
            error_type=error_type,
            alpha=alpha if scorer_mode == "fused" else None,
            sample_count=len(samples),
            per_class=per_class,
            **agg,
        )
    average = {
        key: sum(getattr(tm, key) for tm in per_type.values()) / len(per_type)
        for key in METRIC_KEYS
    }
    return MetricsReport(
        scorer_mode=scorer_mode,
        alpha_source=alpha_source,
        per_type=per_type,
        average=average,
        overall_accuracy=correct_total / len(corpus.samples),
        sample_count=len(corpus.samples),
    )


def hit_at_k(
    corpus: Corpus,
    registry: ConfusionRegistry,
    oracle: Oracle,
    alpha_per_type: Mapping[str, float] | None = None,
    k: int = 1,
    scorer_mode: str = "fused",
    default_alpha: float = DEFAULT_ALPHA,
    jobs: int = 1,
) -> float:
    """Fraction of samples whose gold answer is among the top-k candidates."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if not corpus.samples:
        raise EmptyCorpus("cannot evaluate an empty corpus")
    alpha_per_type = alpha_per_type or {}

    def hit(sample: Sample) -> bool:
        alpha = _alpha_for(alpha_per_type, sample.error_type, default_alpha)
        flow = build_dataflow(sample.tokens, sample.slot_index, sample.error_type, registry)
        top = rank_candidates(flow, oracle, alpha, scorer_mode).words()[:k]
        return sample.answer.lower() in (w.lower() for w in top)

    hits = ordered_map(hit, corpus.samples, jobs)
    return sum(hits) / len(hits)


def hit_curve(
    corpus: Corpus,
    registry: ConfusionRegistry,
    oracle: Oracle,
    alpha_per_type: Mapping[str, float] | None = None,
    k_max: int | None = None,
    scorer_mode: str = "fused",
    default_alpha: float = DEFAULT_ALPHA,
    jobs: int = 1,
) -> dict[str, list[tuple[int, float]]]:
    """Per-type (k, hit rate) pairs for k = 1 .. min(k_max, set size)."""
    if not corpus.samples:
        raise EmptyCorpus("cannot evaluate an empty corpus")
    alpha_per_type = alpha_per_type or {}
    curves: dict[str, list[tuple[int, float]]] = {}
    for error_type, samples in _group_by_type(corpus).items():
        alpha = _alpha_for(alpha_per_type, error_type, default_alpha)

        def ranking(sample: Sample, _alpha=alpha) -> list[str]:
            flow = build_dataflow(
                sample.tokens, sample.slot_index, sample.error_type, registry
            )
            return [w.lower() for w in rank_candidates(flow, oracle, _alpha, scorer_mode).words()]

        rankings = ordered_map(ranking, samples, jobs)
        set_size = len(registry.candidates(error_type))
        top = set_size if k_max is None else min(k_max, set_size)
        curve = []
        for k in range(1, top + 1):
            rate = sum(
                1 for s, r in zip(samples, rankings) if s.answer.lower() in r[:k]
            ) / len(samples)
            curve.append((k, rate))
        curves[error_type] = curve
    return curves


def tune_alpha(
    corpus: Corpus,
    registry: ConfusionRegistry,
    oracle: Oracle,
    grid: Sequence[float] | None = None,
    jobs: int = 1,
) -> AlphaTuningResult:
    """Per-type grid search for the alpha maximizing averaged macro F0.5.

    Ties break toward the smaller alpha.  First- and second-order scores
    are computed once per (sample, candidate) and re-fused per grid point,
    which is exact because fusion is linear.
    """
    if not corpus.samples:
        raise EmptyCorpus("cannot tune on an empty corpus")
    grid = list(grid) if grid is not None else default_alpha_grid()
    if not grid:
        raise ValueError("alpha grid must be non-empty")
    for alpha in grid:
        if not 0.0 <= alpha <= 1.0:
            raise AlphaOutOfRange(f"grid alpha must be in [0, 1], got {alpha}")

    per_type: dict[str, TypeAlphaTuning] = {}
    for error_type, samples in _group_by_type(corpus).items():
        classes = [w.lower() for w in registry.candidates(error_type)]

        def component_scores(sample: Sample) -> list[tuple[str, float, float]]:
            flow = build_dataflow(
                sample.tokens, sample.slot_index, sample.error_type, registry
            )
            ranked = rank_candidates(flow, oracle, DEFAULT_ALPHA)
            return [
                (e.word, e.scores.first_order, e.scores.second_order)
                for e in ranked.entries
            ]

        scored = ordered_map(component_scores, samples, jobs)
        golds = [s.answer.lower() for s in samples]
        curve: list[tuple[float, float]] = []
        best_alpha, best_value = None, float("-inf")
        for alpha in grid:
            preds = []
            for candidates in scored:
                top = min(
                    candidates,
                    key=lambda c: (fused_score(c[1], c[2], alpha), c[0]),
                )
                preds.append(top[0].lower())
            _, agg = aggregate_type_metrics(golds, preds, classes)
            value = agg["f05_macro_averaged"]
            curve.append((alpha, value))
            if value > best_value:
                best_alpha, best_value = alpha, value
        per_type[error_type] = TypeAlphaTuning(
            error_type, best_alpha, best_value, tuple(curve)
        )
    return AlphaTuningResult(per_type, tuple(grid))


def ablation_report(
    corpus: Corpus,
    registry: ConfusionRegistry,
    oracle: Oracle,
    alpha_per_type: Mapping[str, float] | None = None,
    default_alpha: float = DEFAULT_ALPHA,
    jobs: int = 1,
) -> tuple[MetricsReport, MetricsReport, MetricsReport]:
    """(first-only, second-only, fused) reports sharing one oracle cache."""
    if not isinstance(oracle, CachedOracle):
        oracle = CachedOracle(oracle)
    reports = tuple(
        evaluate(
            corpus, registry, oracle, alpha_per_type,
            scorer_mode=mode, default_alpha=default_alpha, jobs=jobs,
        )
        for mode in ("first", "second", "fused")
    )
    return reports  # type: ignore[return-value]


# --- report serialization ---

def report_to_dict(report: MetricsReport) -> dict:
    types = {}
    for error_type, tm in sorted(report.per_type.items()):
        types[error_type] = {
            "alpha": tm.alpha,
            "sample_count": tm.sample_count,
            **{key: getattr(tm, key) for key in METRIC_KEYS},
            "classes": {
                word: {
                    "tp": m.counts.tp,
                    "fp": m.counts.fp,
                    "fn": m.counts.fn,
                    "support": m.counts.support,
                    "p": m.precision,
                    "r": m.recall,
                    "f05": m.f05,
                }
                for word, m in sorted(tm.per_class.items())
            },
        }
    return {
        "scorer_mode": report.scorer_mode,
        "alpha_source": report.alpha_source,
        "sample_count": report.sample_count,
        "overall_accuracy": report.overall_accuracy,
        "types": types,
        "average": dict(report.average),
    }


def format_report(report: MetricsReport) -> str:
    """Aligned text table, one row per error type plus the average row."""
    header = ["type", "n", "P_macro", "P_micro", "R_macro", "R_micro",
              "F05_macro", "F05_of_avgs", "F05_micro", "alpha"]
    rows = []
    for error_type in sorted(report.per_type):
        tm = report.per_type[error_type]
        rows.append([
            error_type,
            str(tm.sample_count),
            f"{tm.p_macro:.4f}", f"{tm.p_micro:.4f}",
            f"{tm.r_macro:.4f}", f"{tm.r_micro:.4f}",
            f"{tm.f05_macro_averaged:.4f}", f"{tm.f05_macro_of_averages:.4f}",
            f"{tm.f05_micro:.4f}",
            "-" if tm.alpha is None else f"{tm.alpha:.4f}",
        ])
    avg = report.average
    rows.append([
        "average", str(report.sample_count),
        f"{avg['p_macro']:.4f}", f"{avg['p_micro']:.4f}",
        f"{avg['r_macro']:.4f}", f"{avg['r_micro']:.4f}",
        f"{avg['f05_macro_averaged']:.4f}", f"{avg['f05_macro_of_averages']:.4f}",
        f"{avg['f05_micro']:.4f}", "-",
    ])
    widths = [max(len(header[i]), *(len(r[i]) for r in rows)) for i in range(len(header))]
    lines = ["  ".join(h.ljust(widths[i]) for i, h in enumerate(header))]
    lines.append("  ".join("-" * w for w in widths))
    for row in rows:
        lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)))
    lines.append(
        f"mode={report.scorer_mode}  alpha_source={report.alpha_source}  "
        f"overall_accuracy={report.overall_accuracy:.4f}"
    )
    return "\n".join(lines) + "\n"


# --- per-type alpha files (same line syntax as the registry) ---

def load_alpha_file(source: str | IO[str], registry: ConfusionRegistry) -> dict[str, float]:
    """Parse `<type>: <alpha>` lines; types are validated against the registry."""
    text = source if isinstance(source, str) else source.read()
    alphas: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        name, sep, value = line.partition(":")
        if not sep:
            raise ValueError(f"line {lineno}: expected '<type>: <alpha>'")
        error_type = normalize_type_name(name)
        if error_type not in registry:
            raise UnknownErrorType(f"line {lineno}: unknown error type {name.strip()!r}")
        try:
            alpha = float(value.strip())
        except ValueError:
            raise ValueError(f"line {lineno}: bad alpha value {value.strip()!r}") from None
        if not 0.0 <= alpha <= 1.0:
            raise AlphaOutOfRange(f"line {lineno}: alpha must be in [0, 1], got {alpha}")
        alphas[error_type] = alpha
    return alphas


def dump_alpha_file(alphas: Mapping[str, float]) -> str:
    lines = [f"{error_type}: {alpha}" for error_type, alpha in sorted(alphas.items())]
    return "\n".join(lines) + "\n"
