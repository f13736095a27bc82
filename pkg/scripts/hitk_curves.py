#!/usr/bin/env python3
"""Emit per-type Hit@K curves as TSV (type, k, hit rate) for plotting.

Compares the three scorer modes on the same corpus, mirroring the usual
candidate-recommendation experiment.  Defaults to a synthetic world.
"""

import argparse
from pathlib import Path

from maskgec.corpus import build_corpus, parse_corpus
from maskgec.evaluation import hit_curve
from maskgec.oracle import CachedOracle, NGramOracle, train_ngram_oracle
from maskgec.registry import load_bundled_registry, load_confusion_sets
from maskgec.synth import planted_text


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--corpus", help="corpus TSV (default: synthetic)")
    parser.add_argument("--registry", help="registry file (default: bundled Tagalog)")
    parser.add_argument("--model", help="n-gram model JSON (default: train on synthetic)")
    parser.add_argument("--k-max", type=int, default=10)
    parser.add_argument("--alpha", type=float, default=0.5)
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

    alphas = {t: args.alpha for t in registry.types}
    print("mode\ttype\tk\thit_rate")
    for mode in ("first", "second", "fused"):
        curves = hit_curve(
            corpus, registry, oracle, alphas, k_max=args.k_max, scorer_mode=mode
        )
        for error_type in sorted(curves):
            for k, rate in curves[error_type]:
                print(f"{mode}\t{error_type}\t{k}\t{rate:.4f}")


if __name__ == "__main__":
    main()
