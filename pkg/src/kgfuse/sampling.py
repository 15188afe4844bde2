"""Negative-triple sampling and benchmark entity-pair construction."""

from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .graph import KnowledgeGraph, Triple
from .kge import triple_scores
from .validation import check_positive

_MAX_TRIES = 100


@dataclass(frozen=True)
class NegativeSet:
    """Likelihood-ranked triples absent from the source KG.

    `scores` parallels `triples` and is non-increasing.
    """

    triples: tuple
    scores: tuple

    def __post_init__(self):
        if len(self.triples) != len(self.scores):
            raise DataError("triples and scores must have equal length")
        object.__setattr__(self, "triples", tuple(self.triples))
        object.__setattr__(self, "scores", tuple(float(s) for s in self.scores))

    def __len__(self):
        return len(self.triples)


@dataclass(frozen=True)
class BenchmarkPairs:
    """Positive and negative (head, tail) entity pairs for supervision."""

    positives: tuple
    negatives: tuple

    def __post_init__(self):
        pos = tuple((str(a), str(b)) for a, b in self.positives)
        neg = tuple((str(a), str(b)) for a, b in self.negatives)
        overlap = set(pos) & set(neg)
        if overlap:
            raise DataError(f"positive and negative pairs overlap: {sorted(overlap)[:3]}")
        object.__setattr__(self, "positives", pos)
        object.__setattr__(self, "negatives", neg)


def _complete(kg):
    return len(kg) >= kg.n_entities * kg.n_entities * kg.n_relations


def _draw_corruption(kg, positive, rng, max_tries=_MAX_TRIES):
    entities = kg.entities
    for _ in range(max_tries):
        ent = entities[rng.integers(0, len(entities))]
        if rng.integers(0, 2) == 0:
            cand = Triple(ent, positive.relation, positive.tail)
        else:
            cand = Triple(positive.head, positive.relation, ent)
        if not kg.contains(cand):
            return cand
    raise DataError(
        f"could not corrupt {positive.as_tuple()} within {max_tries} tries; "
        "the graph is too dense for uniform corruption"
    )


def corrupt_candidates(kg, n, seed=0):
    """n corrupted triples, each a head-or-tail swap of a random positive.

    Every output fails kg.contains; duplicates among outputs are allowed.
    Deterministic under seed (an int, a seed sequence list, or a Generator).
    """
    check_positive("n", n, strict=False)
    if kg.n_entities < 2:
        raise DataError("corruption needs at least 2 entities")
    if len(kg) == 0:
        raise DataError("cannot corrupt an empty knowledge graph")
    if _complete(kg):
        raise DataError("knowledge graph is complete; no negative triples exist")
    rng = np.random.default_rng(seed)
    positives = list(kg.iter_triples())
    out = []
    for _ in range(n):
        pos = positives[rng.integers(0, len(positives))]
        out.append(_draw_corruption(kg, pos, rng))
    return out


def corruption_pool(kg, positive, n, seed=0):
    """n corruptions of one fixed positive, for link-prediction pools."""
    check_positive("n", n, strict=False)
    if kg.n_entities < 2:
        raise DataError("corruption needs at least 2 entities")
    rng = np.random.default_rng(seed)
    return [_draw_corruption(kg, positive, rng) for _ in range(n)]


def _ranked_order(triples, scores):
    return sorted(range(len(triples)),
                  key=lambda i: (-scores[i], triples[i].as_tuple()))


def hard_negatives(candidates, model, budget):
    """The `budget` highest-likelihood candidates as a NegativeSet.

    Ties are broken by lexicographic (head, relation, tail) order.
    """
    candidates = list(candidates)
    if budget > len(candidates):
        raise ValueError(
            f"budget {budget} exceeds candidate count {len(candidates)}"
        )
    check_positive("budget", budget, strict=False)
    scores = triple_scores(model, candidates)
    order = _ranked_order(candidates, scores)[:budget]
    return NegativeSet(
        triples=tuple(candidates[i] for i in order),
        scores=tuple(scores[i] for i in order),
    )


def _dedup_pairs(triples):
    seen, pairs = set(), []
    for t in triples:
        pair = (t.head, t.tail)
        if pair not in seen:
            seen.add(pair)
            pairs.append(pair)
    return pairs


def sample_benchmarks(kg, model, k, neg_budget, seed=0):
    """Benchmark entity pairs from likelihood-ranked triples.

    Positives: entity pairs of the k highest-likelihood KG triples.
    Negatives: entity pairs of the k highest-likelihood corruptions from
    a pool of `neg_budget`, minus any pair that occurs in the KG. Pairs
    are deduplicated after ranking, so either side may hold fewer than k.
    """
    if len(kg) == 0:
        raise DataError("cannot sample benchmarks from an empty knowledge graph")
    check_positive("k", k)
    check_positive("neg_budget", neg_budget, strict=False)

    positives = list(kg.iter_triples())
    pos_scores = triple_scores(model, positives)
    top_pos = [positives[i] for i in _ranked_order(positives, pos_scores)[:k]]
    pos_pairs = _dedup_pairs(top_pos)

    neg_pairs = []
    if neg_budget > 0:
        pool = corrupt_candidates(kg, neg_budget, np.random.default_rng([seed, 11]))
        hard = hard_negatives(pool, model, min(k, len(pool)))
        known = kg.entity_pairs()
        neg_pairs = [p for p in _dedup_pairs(hard.triples) if p not in known]
    return BenchmarkPairs(positives=pos_pairs, negatives=neg_pairs)
