#!/usr/bin/env python3
"""Grid-search the fusion weight per error type and report the best values.

Works on a corpus + oracle you supply, or on a synthetic planted world
when no paths are given.  Optionally writes a per-type alpha file usable
with `maskgec evaluate --alpha <file>`.
"""

import argparse
from pathlib import Path

from maskgec.corpus import build_corpus, parse_corpus
from maskgec.evaluation import default_alpha_grid, dump_alpha_file, tune_alpha
from maskgec.oracle import CachedOracle, NGramOracle, train_ngram_oracle
from maskgec.registry import load_bundled_registry, load_confusion_sets
from maskgec.synth import planted_text


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--corpus", help="corpus TSV (default: synthetic)")
    parser.add_argument("--registry", help="registry file (default: bundled Tagalog)")
    parser.add_argument("--model", help="n-gram model JSON (default: train on synthetic)")
    parser.add_argument("--step", type=float, default=0.01, help="grid step")
    parser.add_argument("--out", help="write the winning alphas here")
    args = parser.parse_args()

    if args.registry:
        registry = load_confusion_sets(Path(args.registry).read_text(encoding="utf-8"))
    else:
        registry = load_bundled_registry()

    if args.corpus:
        corpus = parse_corpus(Path(args.corpus).read_text(encoding="utf-8"), registry)
        oracle = CachedOracle(NGramOracle.load(args.model))
    else:
        text = planted_text(registry, 500)
        oracle = CachedOracle(train_ngram_oracle(text))
        corpus = build_corpus(text, registry, 12, seed=0)

    steps = int(round(1.0 / args.step))
    grid = [i / steps for i in range(steps + 1)] if args.step != 0.01 else default_alpha_grid()
    result = tune_alpha(corpus, registry, oracle, grid)

    print(f"{'type':<28} {'alpha':>6} {'F0.5_macro':>10}")
    for error_type in sorted(result.per_type):
        tuned = result.per_type[error_type]
        print(f"{error_type:<28} {tuned.best_alpha:>6.2f} "
              f"{tuned.best_f05_macro_averaged:>10.4f}")
    if args.out:
        alphas = {t: r.best_alpha for t, r in result.per_type.items()}
        Path(args.out).write_text(dump_alpha_file(alphas), encoding="utf-8")
        print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
