"""Relation alignment, candidate translation, enrichment, and the
alternating fusion loop that ties the whole package together.

Alignment blends two cosine similarities: the text similarity of the
relation mentions themselves and the similarity of their "translated"
adjacency signatures (the summed head-minus-tail mention vectors of the
triples each relation supports). Candidate relations — (trigger mention,
trigger type) keys extracted from text — are mapped onto the prior KG's
relations, candidates are rewritten under that mapping, and the highest-
likelihood survivors are merged into the graph, K per round.

`run_collaboration` alternates the two roles: the supervisor trains the
convolutional triple scorer on the current graph and samples benchmark
entity pairs from it; the explorer trains the tagger under the combined
objective and re-extracts candidate triples for the next round. Round
one performs no enrichment because no candidates exist yet. Everything
is seeded; the emitted report is byte-identical across reruns.
"""

import json
import os
from dataclasses import dataclass, field

import numpy as np

from .embeddings import init_random, mention_vector, tokenize_mention
from .errors import DataError
from .explorer import (
    DEFAULT_CANDIDATE_CAP,
    WindowTagger,
    generate_candidates,
)
from .graph import KnowledgeGraph, Triple, save_triples
from .kge import ConvTripleScorer, triple_scores
from .sampling import corrupt_candidates, hard_negatives, sample_benchmarks
from .validation import check_positive, check_unit_interval, ensure_finite


def _cosine(a, b):
    na = np.sqrt(a @ a)
    nb = np.sqrt(b @ b)
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.clip((a @ b) / (na * nb), -1.0, 1.0))


def mention_similarity(table, m1, m2):
    """Cosine similarity of two mention vectors; zero-norm vectors give 0."""
    return _cosine(mention_vector(table, m1), mention_vector(table, m2))


def _relation_offset(table, pairs):
    """Summed (head - tail) mention vectors over a relation's pairs."""
    total = np.zeros(table.dim)
    for head, tail in pairs:
        total += mention_vector(table, head) - mention_vector(table, tail)
    return total


def translated_similarity(kg1, kg2, table, r1, r2):
    """Cosine of the two relations' summed head-minus-tail vectors."""
    pairs1 = _pairs_of(kg1, r1)
    pairs2 = _pairs_of(kg2, r2)
    return _cosine(_relation_offset(table, pairs1),
                   _relation_offset(table, pairs2))


def _pairs_of(kg, relation):
    pairs = kg.triples_of_relation(relation)
    if not pairs:
        raise DataError(f"relation {relation!r} has no supporting triples")
    return pairs


def tras(kg1, kg2, table, r1, r2, gamma=0.5):
    """gamma-weighted blend of mention and translated similarity."""
    check_unit_interval("gamma", gamma)
    s_m = mention_similarity(table, r1, r2)
    s_e = translated_similarity(kg1, kg2, table, r1, r2)
    return gamma * s_m + (1.0 - gamma) * s_e


@dataclass(frozen=True)
class AlignmentMap:
    """(trigger mention, trigger type) -> (prior relation, score)."""

    entries: dict

    def __len__(self):
        return len(self.entries)

    def get(self, key):
        return self.entries.get(key)

    def as_records(self):
        return [
            {"from": [mention, ttype], "to": rel, "score": score}
            for (mention, ttype), (rel, score) in self.entries.items()
        ]


def _group_candidates(candidates):
    """Candidate KG view: key -> ordered distinct (head, tail) pairs."""
    grouped = {}
    for cand in candidates:
        pairs = grouped.setdefault(cand.key(), {})
        pairs.setdefault((cand.head, cand.tail), None)
    return {key: list(pairs) for key, pairs in grouped.items()}


def align_relations(candidates, prior, table, gamma=0.5, threshold=0.0):
    """Map each candidate relation to its best-scoring prior relation.

    Candidates are grouped by (trigger mention, trigger type); each group
    is scored against every prior relation with the blended similarity
    and mapped to the argmax, earliest prior relation winning ties.
    Entries scoring below `threshold` are dropped.
    """
    check_unit_interval("gamma", gamma)
    if not -1.0 <= threshold <= 1.0:
        raise ValueError(f"threshold must lie in [-1, 1], got {threshold}")
    if prior.n_relations < 1:
        raise DataError("prior knowledge graph has no relations to align to")
    grouped = _group_candidates(candidates)
    prior_offsets = {
        rel: _relation_offset(table, prior.triples_of_relation(rel))
        for rel in prior.relations
    }
    entries = {}
    for key, pairs in grouped.items():
        mention, _ = key
        offset = _relation_offset(table, pairs)
        best_rel, best_score = None, None
        for rel in prior.relations:
            score = (gamma * mention_similarity(table, mention, rel)
                     + (1.0 - gamma) * _cosine(offset, prior_offsets[rel]))
            if best_score is None or score > best_score:
                best_rel, best_score = rel, score
        if best_score is not None and best_score >= threshold:
            entries[key] = (best_rel, best_score)
    return AlignmentMap(entries=entries)


def translate(candidates, alignment):
    """Rewrite mapped candidates as plain triples; unmapped ones drop out."""
    seen = set()
    out = []
    for cand in candidates:
        entry = alignment.get(cand.key())
        if entry is None:
            continue
        triple = Triple(cand.head, entry[0], cand.tail)
        if triple.as_tuple() not in seen:
            seen.add(triple.as_tuple())
            out.append(triple)
    return out


def enrich(kg, translated, model, top_k):
    """Merge the top-k most likely new triples; returns (graph, accepted)."""
    check_positive("top_k", top_k, strict=False)
    fresh = [t for t in translated if t not in kg]
    if not fresh or top_k == 0:
        return kg, []
    scores = triple_scores(model, fresh)
    order = sorted(range(len(fresh)),
                   key=lambda i: (-scores[i], fresh[i].as_tuple()))
    accepted = [fresh[i] for i in order[:top_k]]
    return kg.merge(accepted), accepted


# ---------------------------------------------------------------------------
# Orchestration
# ---------------------------------------------------------------------------

@dataclass
class FusionConfig:
    """Knobs of the fusion loop.

    mention_weight is the gamma blend of the alignment score;
    alignment_threshold the minimum score an alignment entry must reach;
    top_k the per-round enrichment budget; benchmark_k the number of
    benchmark pairs sampled per side; neg_budget the corruption pool
    size; extraction_fraction the tail share of the corpus reserved for
    candidate extraction (the rest trains the tagger).
    """

    mention_weight: float = 0.5
    alignment_threshold: float = 0.0
    top_k: int = 5
    rounds: int = 3
    benchmark_k: int = 10
    neg_budget: int = 50
    extraction_fraction: float = 0.2
    candidate_cap: int = DEFAULT_CANDIDATE_CAP
    seed: int = 0

    def __post_init__(self):
        check_unit_interval("mention_weight", self.mention_weight)
        if not -1.0 <= self.alignment_threshold <= 1.0:
            raise ValueError("alignment_threshold must lie in [-1, 1]")
        check_positive("top_k", self.top_k, strict=False)
        check_positive("rounds", self.rounds)
        check_positive("benchmark_k", self.benchmark_k)
        check_positive("neg_budget", self.neg_budget, strict=False)
        check_unit_interval("extraction_fraction", self.extraction_fraction)
        check_positive("candidate_cap", self.candidate_cap)


@dataclass
class FusionReport:
    rounds: list
    final_kg_path: str
    final_kg: KnowledgeGraph = field(repr=False, compare=False, default=None)

    def to_json(self):
        doc = {"rounds": self.rounds, "final_kg_path": self.final_kg_path}
        return json.dumps(doc, sort_keys=True, indent=2)

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())
            fh.write("\n")


def split_corpus(sentences, extraction_fraction):
    """Deterministic tail split: leading share trains, trailing extracts."""
    sentences = list(sentences)
    n = len(sentences)
    if n <= 1 or extraction_fraction == 0.0:
        return sentences, []
    n_extract = min(n - 1, max(1, round(extraction_fraction * n)))
    return sentences[: n - n_extract], sentences[n - n_extract:]


def _vocab_of(kg, sentences):
    tokens = set()
    for t in kg.iter_triples():
        for mention in (t.head, t.relation, t.tail):
            tokens.update(tokenize_mention(mention))
    for s in sentences:
        tokens.update(tok.lower() for tok in s.tokens)
    return sorted(tokens)


def run_collaboration(prior, corpus, schema, config, kge=None, explorer=None,
                      table=None, out_dir=None):
    """Alternate supervisor and explorer for config.rounds rounds.

    Per round: merge last round's aligned candidates (skipped in round
    one, when none exist), train the triple scorer on the grown graph
    with likelihood-ranked negatives, sample benchmark pairs from it,
    train the tagger under the combined objective, and re-extract
    candidates from the held-out slice of the corpus. Returns a
    FusionReport whose rounds list serializes deterministically.
    """
    if len(prior) == 0:
        raise DataError("prior knowledge graph must not be empty")
    corpus = list(corpus)
    if not corpus:
        raise DataError("corpus must not be empty")

    train_sents, extract_sents = split_corpus(corpus, config.extraction_fraction)
    if kge is None:
        kge = ConvTripleScorer(seed=config.seed)
    if explorer is None:
        explorer = WindowTagger(schema=schema, alpha=0.5, seed=config.seed)
    kge.warm_start = True
    explorer.warm_start = True

    if table is None:
        table = init_random(_vocab_of(prior, corpus), kge.dim, config.seed)
    elif table.dim != kge.dim:
        raise DataError(f"embedding dim {table.dim} != scorer dim {kge.dim}")
    kg = prior
    candidates = []
    rounds = []
    for rnd in range(1, config.rounds + 1):
        try:
            record, kg, candidates = _run_round(
                rnd, kg, candidates, train_sents, extract_sents,
                config, kge, explorer, table)
        except Exception as exc:
            if hasattr(exc, "add_note"):
                exc.add_note(f"while running fusion round {rnd}")
            raise
        rounds.append(record)

    final_name = "enriched_kg.tsv"
    report = FusionReport(rounds=rounds, final_kg_path=final_name, final_kg=kg)
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        save_triples(kg, os.path.join(out_dir, final_name))
        report.save(os.path.join(out_dir, "report.json"))
    return report


def _run_round(rnd, kg, candidates, train_sents, extract_sents, config,
               kge, explorer, table):
    accepted = []
    alignment = AlignmentMap(entries={})
    if candidates:
        alignment = align_relations(candidates, kg, table,
                                    gamma=config.mention_weight,
                                    threshold=config.alignment_threshold)
        translated = translate(candidates, alignment)
        kg, accepted = enrich(kg, translated, kge.model_, config.top_k)

    negatives = _round_negatives(kg, kge, config, rnd)
    kge.fit(kg, negatives=negatives, table=table)
    ensure_finite("kge loss", [kge.final_loss_])

    pairs = sample_benchmarks(kg, kge.model_, config.benchmark_k,
                              config.neg_budget, [config.seed, rnd, 2])
    explorer.fit(train_sents, table, pairs=pairs)
    ensure_finite("explorer loss", [explorer.final_loss_])

    if extract_sents:
        predicted = explorer.predict(extract_sents)
        new_candidates = generate_candidates(predicted, cap=config.candidate_cap)
    else:
        new_candidates = []

    record = {
        "round": rnd,
        "kge_loss": float(kge.final_loss_),
        "explorer_loss": float(explorer.final_loss_),
        "accepted": [list(t.as_tuple()) for t in accepted],
        "alignment": [
            {"from": list(key), "to": rel, "score": float(score)}
            for key, (rel, score) in alignment.entries.items()
        ],
        "benchmark": {
            "positives": [list(p) for p in pairs.positives],
            "negatives": [list(p) for p in pairs.negatives],
        },
        "kg_size": len(kg),
    }
    return record, kg, new_candidates


def _round_negatives(kg, kge, config, rnd):
    """Corruption pool, likelihood-sharpened once a scorer exists."""
    if config.neg_budget == 0:
        return None
    seed = [config.seed, rnd, 1]
    if hasattr(kge, "model_"):
        pool = corrupt_candidates(kg, 2 * config.neg_budget, seed)
        return list(hard_negatives(pool, kge.model_, config.neg_budget).triples)
    return corrupt_candidates(kg, config.neg_budget, seed)
