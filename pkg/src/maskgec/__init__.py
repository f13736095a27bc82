"""Closed-class grammatical error correction via masked-LM pseudo-perplexity.

Candidates from a per-error-type confusion set fill a single slot; each
filled variant is scored with first- and second-order masked-word
log-probabilities from a pluggable oracle, fused with a per-type weight,
and the lowest-scoring variant wins.
"""

from maskgec.corpus import (
    MASK_TOKEN,
    Corpus,
    CorpusStats,
    Sample,
    build_corpus,
    corpus_stats,
    parse_corpus,
    tokenize_line,
    write_corpus,
)
from maskgec.corrector import (
    Correction,
    DataFlow,
    RankedList,
    build_dataflow,
    correct,
    correct_text,
    rank_candidates,
    recommend_topk,
)
from maskgec.evaluation import (
    AlphaTuningResult,
    MetricsReport,
    ablation_report,
    evaluate,
    f_beta,
    hit_at_k,
    hit_curve,
    tune_alpha,
)
from maskgec.oracle import (
    CachedOracle,
    MaskQuery,
    MaskResponse,
    NGramOracle,
    Oracle,
    RemoteOracle,
    UniformOracle,
    train_ngram_oracle,
)
from maskgec.registry import (
    ConfusionRegistry,
    ConfusionSet,
    dump_registry,
    load_bundled_registry,
    load_confusion_sets,
)
from maskgec.scoring import (
    ScoreBreakdown,
    first_order_score,
    fused_score,
    score_variant,
    second_order_score,
    second_order_token_probs,
)

__version__ = "0.1.0"
