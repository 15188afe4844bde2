"""kgfuse: collaborative fusion of corpus-extracted triples into a
prior knowledge graph.

The supervisor side embeds the graph and scores triple plausibility;
the explorer side tags sentences and proposes candidate triples; the
fusion loop alternates the two, aligning extracted relations onto the
graph's own and merging the most plausible candidates each round.
"""

from .embeddings import (
    EmbeddingTable,
    init_random,
    load_pretrained,
    mention_vector,
    tokenize_mention,
)
from .errors import DataError, NumericError, ParseError
from .explorer import (
    CandidateTriple,
    PairScorer,
    TaggedSentence,
    TagSchema,
    WindowTagger,
    benchmark_loss,
    decode_spans,
    encode_tags,
    generate_candidates,
    jee_loss,
    load_corpus,
    load_schema,
    load_tagger,
    save_tagger,
    train_explorer,
)
from .fusion import (
    AlignmentMap,
    FusionConfig,
    FusionReport,
    align_relations,
    enrich,
    mention_similarity,
    run_collaboration,
    split_corpus,
    translate,
    translated_similarity,
    tras,
)
from .graph import KnowledgeGraph, Triple, load_triples, save_triples
from .kge import (
    ConvTripleModel,
    ConvTripleScorer,
    TransEScorer,
    bpr_likelihood_loss,
    bpr_loss,
    conv_likelihood,
    grad_check,
    gradcheck_setup,
    load_model,
    margin_ranking_loss,
    save_model,
    sigmoid,
    transe_score,
    triple_scores,
)
from .metrics import (
    RankedEval,
    evaluate_pools,
    hit_at_n,
    load_pools,
    make_pools,
    mrr,
    prf1,
    rank_triple,
    save_pools,
)
from .sampling import (
    BenchmarkPairs,
    NegativeSet,
    corrupt_candidates,
    corruption_pool,
    hard_negatives,
    sample_benchmarks,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
