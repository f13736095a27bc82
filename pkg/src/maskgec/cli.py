"""Command-line entry point wiring all modules for batch use.

Subcommands: correct, evaluate, tune-alpha, hitk, corpus build,
corpus stats, ngram train.  Exit codes: 0 success, 1 usage error,
2 data error, 3 backend error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from maskgec import corpus as corpus_io
from maskgec import evaluation
from maskgec._parallel import available_parallelism, ordered_map
from maskgec.corrector import correct_text
from maskgec.errors import BackendUnavailable, GecError
from maskgec.oracle import CachedOracle, NGramOracle, Oracle, RemoteOracle, UniformOracle
from maskgec.registry import ConfusionRegistry, load_confusion_sets

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_BACKEND = 3


def _load_registry(path: str) -> ConfusionRegistry:
    return load_confusion_sets(Path(path).read_text(encoding="utf-8"))


def _load_corpus(path: str, registry: ConfusionRegistry) -> corpus_io.Corpus:
    return corpus_io.parse_corpus(Path(path).read_text(encoding="utf-8"), registry)


def make_oracle(spec: str) -> Oracle:
    """Build an oracle from `uniform:<V>`, `ngram:<path>`, or `remote:<url>`."""
    kind, sep, arg = spec.partition(":")
    if not sep or not arg:
        raise ValueError(f"bad oracle spec {spec!r}")
    if kind == "uniform":
        return UniformOracle(int(arg))
    if kind == "ngram":
        return NGramOracle.load(arg)
    if kind == "remote":
        return RemoteOracle(arg)
    raise ValueError(f"unknown oracle kind {kind!r} (use uniform:|ngram:|remote:)")


def _resolve_alphas(
    alpha_spec: str,
    registry: ConfusionRegistry,
    corpus: corpus_io.Corpus | None,
    oracle: Oracle,
    jobs: int,
) -> tuple[dict[str, float], float, str]:
    """-> (per-type alphas, default alpha, label for the report)."""
    if alpha_spec == "auto":
        if corpus is None:
            raise ValueError("--alpha auto needs a corpus to tune on")
        tuned = evaluation.tune_alpha(corpus, registry, oracle, jobs=jobs)
        alphas = {t: r.best_alpha for t, r in tuned.per_type.items()}
        return alphas, 0.5, "tuned-on-eval-corpus (resubstitution)"
    try:
        fixed = float(alpha_spec)
    except ValueError:
        text = Path(alpha_spec).read_text(encoding="utf-8")
        return evaluation.load_alpha_file(text, registry), 0.5, f"per-type-file:{alpha_spec}"
    if not 0.0 <= fixed <= 1.0:
        raise ValueError(f"--alpha must be in [0, 1], got {fixed}")
    return {}, fixed, "fixed"


def _write_json(path: str, payload: dict) -> None:
    text = json.dumps(payload, sort_keys=True, ensure_ascii=False, indent=2) + "\n"
    Path(path).write_text(text, encoding="utf-8")


def _cmd_correct(args: argparse.Namespace) -> int:
    registry = _load_registry(args.registry)
    oracle = CachedOracle(make_oracle(args.oracle))
    alphas, default_alpha, _ = _resolve_alphas(args.alpha, registry, None, oracle, args.jobs)
    if args.input == "-":
        lines = sys.stdin.read().splitlines()
    else:
        lines = Path(args.input).read_text(encoding="utf-8").splitlines()

    def handle(line: str) -> dict:
        tokens = corpus_io.tokenize_line(line)
        corrections = correct_text(
            tokens, registry, oracle, alphas, default_alpha, args.mode
        )
        corrected = list(tokens)
        by_position: dict[int, list] = {}
        for c in corrections:
            by_position.setdefault(c.slot_index, []).append(c)
        for position, here in by_position.items():
            changes = {c.predicted_word for c in here if c.changed}
            # apply only an unambiguous change; disagreeing types keep the original
            if len(changes) == 1:
                corrected[position] = changes.pop()
        return {
            "tokens": tokens,
            "corrected_tokens": corrected,
            "corrected_text": " ".join(corrected),
            "corrections": [
                {
                    "position": c.slot_index,
                    "error_type": c.error_type,
                    "original": c.original_word,
                    "predicted": c.predicted_word,
                    "changed": c.changed,
                    "candidates": [
                        {
                            "word": e.word,
                            "first_order": e.scores.first_order,
                            "second_order": e.scores.second_order,
                            "fused": e.scores.fused,
                        }
                        for e in c.ranked.entries
                    ],
                }
                for c in corrections
            ],
        }

    results = ordered_map(handle, [line for line in lines if line.strip()], args.jobs)
    for result in results:
        print(result["corrected_text"])
    if args.output:
        _write_json(args.output, {"lines": results})
    return EXIT_OK


def _cmd_evaluate(args: argparse.Namespace) -> int:
    registry = _load_registry(args.registry)
    corpus = _load_corpus(args.corpus, registry)
    oracle = CachedOracle(make_oracle(args.oracle))
    alphas, default_alpha, label = _resolve_alphas(
        args.alpha, registry, corpus, oracle, args.jobs
    )
    report = evaluation.evaluate(
        corpus, registry, oracle, alphas,
        scorer_mode=args.mode, default_alpha=default_alpha,
        alpha_source=label, jobs=args.jobs,
    )
    print(evaluation.format_report(report), end="")
    if args.output:
        _write_json(args.output, evaluation.report_to_dict(report))
    return EXIT_OK


def _cmd_tune_alpha(args: argparse.Namespace) -> int:
    registry = _load_registry(args.registry)
    corpus = _load_corpus(args.corpus, registry)
    oracle = CachedOracle(make_oracle(args.oracle))
    grid = None
    if args.grid:
        grid = [float(v) for v in args.grid.split(",")]
    result = evaluation.tune_alpha(corpus, registry, oracle, grid, jobs=args.jobs)
    alphas = {t: r.best_alpha for t, r in result.per_type.items()}
    for error_type in sorted(result.per_type):
        tuned = result.per_type[error_type]
        print(f"{error_type}: alpha={tuned.best_alpha:.4f} "
              f"f05_macro={tuned.best_f05_macro_averaged:.4f}")
    if args.output:
        Path(args.output).write_text(
            evaluation.dump_alpha_file(alphas), encoding="utf-8"
        )
    if args.curves:
        payload = {
            error_type: {
                "best_alpha": tuned.best_alpha,
                "best_f05_macro_averaged": tuned.best_f05_macro_averaged,
                "curve": [[alpha, value] for alpha, value in tuned.curve],
            }
            for error_type, tuned in sorted(result.per_type.items())
        }
        _write_json(args.curves, payload)
    return EXIT_OK


def _cmd_hitk(args: argparse.Namespace) -> int:
    registry = _load_registry(args.registry)
    corpus = _load_corpus(args.corpus, registry)
    oracle = CachedOracle(make_oracle(args.oracle))
    alphas, default_alpha, _ = _resolve_alphas(
        args.alpha, registry, corpus, oracle, args.jobs
    )
    curves = evaluation.hit_curve(
        corpus, registry, oracle, alphas,
        k_max=args.k_max, scorer_mode=args.mode,
        default_alpha=default_alpha, jobs=args.jobs,
    )
    for error_type in sorted(curves):
        for k, rate in curves[error_type]:
            print(f"{error_type}\t{k}\t{rate:.4f}")
    if args.output:
        _write_json(
            args.output,
            {t: [[k, rate] for k, rate in curve] for t, curve in curves.items()},
        )
    return EXIT_OK


def _parse_quota(spec: str) -> int | dict[str, int]:
    if "=" not in spec:
        return int(spec)
    quotas: dict[str, int] = {}
    for part in spec.split(","):
        name, sep, value = part.partition("=")
        if not sep:
            raise ValueError(f"bad quota entry {part!r}")
        quotas[name.strip()] = int(value)
    return quotas


def _cmd_corpus_build(args: argparse.Namespace) -> int:
    registry = _load_registry(args.registry)
    raw = Path(args.raw).read_text(encoding="utf-8")
    corpus = corpus_io.build_corpus(raw, registry, _parse_quota(args.quota), args.seed)
    Path(args.output).write_text(corpus_io.dumps_corpus(corpus), encoding="utf-8")
    stats = corpus_io.corpus_stats(corpus)
    print(f"wrote {stats.total} samples to {args.output}")
    return EXIT_OK


def _cmd_corpus_stats(args: argparse.Namespace) -> int:
    registry = _load_registry(args.registry)
    corpus = _load_corpus(args.corpus, registry)
    stats = corpus_io.corpus_stats(corpus)
    print(corpus_io.format_stats(stats), end="")
    if args.output:
        _write_json(args.output, corpus_io.stats_to_dict(stats))
    return EXIT_OK


def _cmd_ngram_train(args: argparse.Namespace) -> int:
    raw = Path(args.raw).read_text(encoding="utf-8")
    oracle = NGramOracle.train(raw, add_k=args.add_k)
    oracle.save(args.output)
    print(f"trained on {sum(oracle.unigram_counts.values())} tokens, "
          f"vocab {len(oracle.vocab)}; model written to {args.output}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="maskgec",
        description="Confusion-set GEC via masked-LM pseudo-perplexity ranking",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, corpus_required: bool = True) -> None:
        p.add_argument("--registry", required=True, help="registry file path")
        p.add_argument("--oracle", required=True,
                       help="uniform:<V> | ngram:<model path> | remote:<url>")
        p.add_argument("--alpha", default="0.5",
                       help="fixed value, per-type file path, or 'auto'")
        p.add_argument("--mode", choices=("first", "second", "fused"), default="fused")
        p.add_argument("--jobs", type=int, default=available_parallelism())
        p.add_argument("--output", help="write a JSON document here")
        if corpus_required:
            p.add_argument("--corpus", required=True, help="corpus TSV path")

    p = sub.add_parser("correct", help="correct raw text, one sentence per line")
    common(p, corpus_required=False)
    p.add_argument("--input", default="-", help="input file, or - for stdin")
    p.set_defaults(func=_cmd_correct)

    p = sub.add_parser("evaluate", help="score a corpus and report P/R/F0.5")
    common(p)
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("tune-alpha", help="grid search fusion weight per type")
    p.add_argument("--registry", required=True)
    p.add_argument("--oracle", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--grid", help="comma-separated alphas (default 0.00..1.00/0.01)")
    p.add_argument("--jobs", type=int, default=available_parallelism())
    p.add_argument("--output", help="write a per-type alpha file here")
    p.add_argument("--curves", help="write the full grid curves as JSON here")
    p.set_defaults(func=_cmd_tune_alpha)

    p = sub.add_parser("hitk", help="top-K recommendation hit rates")
    common(p)
    p.add_argument("--k-max", type=int, default=None)
    p.set_defaults(func=_cmd_hitk)

    p = sub.add_parser("corpus", help="corpus tooling")
    corpus_sub = p.add_subparsers(dest="corpus_command", required=True)
    b = corpus_sub.add_parser("build", help="mine masked samples from raw text")
    b.add_argument("--raw", required=True, help="raw text, one sentence per line")
    b.add_argument("--registry", required=True)
    b.add_argument("--quota", required=True,
                   help="N for all types, or type=N,type=N,...")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--output", required=True)
    b.set_defaults(func=_cmd_corpus_build)
    s = corpus_sub.add_parser("stats", help="per-type sample counts")
    s.add_argument("--corpus", required=True)
    s.add_argument("--registry", required=True)
    s.add_argument("--output", help="write stats as JSON here")
    s.set_defaults(func=_cmd_corpus_stats)

    p = sub.add_parser("ngram", help="n-gram oracle tooling")
    ngram_sub = p.add_subparsers(dest="ngram_command", required=True)
    t = ngram_sub.add_parser("train", help="train the reference bigram oracle")
    t.add_argument("--raw", required=True)
    t.add_argument("--add-k", type=float, default=1.0)
    t.add_argument("--output", required=True)
    t.set_defaults(func=_cmd_ngram_train)

    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        return args.func(args)
    except BackendUnavailable as exc:
        print(f"backend error: {exc}", file=sys.stderr)
        return EXIT_BACKEND
    except (GecError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
