import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kgfuse import (
    DataError,
    KnowledgeGraph,
    RankedEval,
    Triple,
    evaluate_pools,
    hit_at_n,
    load_pools,
    make_pools,
    mrr,
    prf1,
    rank_triple,
    save_pools,
)


class _ByTupleScorer:
    def __init__(self, scores):
        self.scores = scores

    def decision_function(self, triples):
        return np.array([self.scores[t.as_tuple()] for t in triples])


def _pool(n, base="neg"):
    return [Triple(f"{base}{i}", "r", f"x{i}") for i in range(n)]


class TestRankTriple:
    def test_best_score_ranks_first(self):
        pos = Triple("a", "r", "b")
        pool = _pool(3)
        scores = {pos.as_tuple(): 1.0}
        scores.update({t.as_tuple(): 0.1 * i for i, t in enumerate(pool)})
        assert rank_triple(_ByTupleScorer(scores), pos, pool) == 1

    def test_worst_score_ranks_last(self):
        pos = Triple("a", "r", "b")
        pool = _pool(4)
        scores = {pos.as_tuple(): -1.0}
        scores.update({t.as_tuple(): float(i) for i, t in enumerate(pool)})
        assert rank_triple(_ByTupleScorer(scores), pos, pool) == 5

    def test_ties_are_pessimistic(self):
        pos = Triple("a", "r", "b")
        pool = _pool(3)
        scores = {pos.as_tuple(): 0.5}
        scores.update({t.as_tuple(): 0.5 for t in pool})
        assert rank_triple(_ByTupleScorer(scores), pos, pool) == 4

    def test_pool_order_irrelevant(self):
        pos = Triple("a", "r", "b")
        pool = _pool(5)
        rng = np.random.default_rng(0)
        scores = {pos.as_tuple(): 0.6}
        scores.update({t.as_tuple(): float(rng.random()) for t in pool})
        model = _ByTupleScorer(scores)
        base = rank_triple(model, pos, pool)
        assert rank_triple(model, pos, pool[::-1]) == base

    def test_empty_pool_rejected(self):
        with pytest.raises(DataError):
            rank_triple(_ByTupleScorer({}), Triple("a", "r", "b"), [])

    def test_positive_inside_pool_rejected(self):
        pos = Triple("a", "r", "b")
        with pytest.raises(DataError):
            rank_triple(_ByTupleScorer({}), pos, [Triple("a", "r", "b")])


class TestMrr:
    def test_frozen_values(self):
        assert mrr([1]) == 1.0
        assert mrr([2, 4]) == pytest.approx(0.375)
        assert mrr([1, 2, 4], normalize=False) == pytest.approx(1.75)

    def test_validation(self):
        with pytest.raises(DataError):
            mrr([])
        with pytest.raises(ValueError):
            mrr([0])

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.integers(1, 1000), min_size=1, max_size=20))
    def test_normalized_range(self, ranks):
        value = mrr(ranks)
        assert 0.0 < value <= 1.0


class TestHitAtN:
    def test_frozen_values(self):
        assert hit_at_n([1, 2, 11], 10) == pytest.approx(2 / 3)
        assert hit_at_n([1], 1) == 1.0
        assert hit_at_n([2], 1) == 0.0

    def test_monotone_in_n(self):
        ranks = [1, 3, 5, 9, 20]
        values = [hit_at_n(ranks, n) for n in range(1, 25)]
        assert values == sorted(values)

    def test_validation(self):
        with pytest.raises(DataError):
            hit_at_n([], 5)
        with pytest.raises(ValueError):
            hit_at_n([1], 0)


class TestRankedEval:
    def test_aggregates(self):
        ev = RankedEval(ranks=(1, 2), pool_sizes=(10, 10))
        assert ev.mrr() == pytest.approx(0.75)
        assert ev.hit_at_n(1) == 0.5

    def test_rank_bounds_validated(self):
        with pytest.raises(DataError):
            RankedEval(ranks=(12,), pool_sizes=(10,))
        with pytest.raises(DataError):
            RankedEval(ranks=(0,), pool_sizes=(10,))
        with pytest.raises(DataError):
            RankedEval(ranks=(1, 2), pool_sizes=(10,))


@pytest.fixture
def pool_kg():
    return KnowledgeGraph.from_triples([
        Triple(f"e{i}", "r", f"e{i + 1}") for i in range(6)])


class TestPools:
    def test_make_pools_shapes_and_determinism(self, pool_kg):
        pos_a, pools_a = make_pools(pool_kg, pool_size=7, seed=3)
        pos_b, pools_b = make_pools(pool_kg, pool_size=7, seed=3)
        assert pos_a == list(pool_kg.iter_triples())
        assert all(len(p) == 7 for p in pools_a)
        assert pools_a == pools_b
        _, pools_c = make_pools(pool_kg, pool_size=7, seed=4)
        assert pools_a != pools_c

    def test_pools_are_corruptions_of_their_positive(self, pool_kg):
        positives, pools = make_pools(pool_kg, pool_size=5, seed=0)
        for pos, pool in zip(positives, pools):
            for neg in pool:
                assert neg.relation == pos.relation
                assert (neg.head == pos.head) != (neg.tail == pos.tail)
                assert not pool_kg.contains(neg)

    def test_save_load_round_trip(self, pool_kg, tmp_path):
        positives, pools = make_pools(pool_kg, pool_size=4, seed=1)
        path = tmp_path / "pools.json"
        save_pools(positives, pools, path)
        got_pos, got_pools = load_pools(path)
        assert got_pos == positives
        assert got_pools == pools

    def test_load_rejects_malformed(self, tmp_path):
        path = tmp_path / "pools.json"
        path.write_text(json.dumps({"positives": [["a", "r", "b"]]}))
        with pytest.raises(DataError):
            load_pools(path)
        path.write_text(json.dumps(
            {"positives": [["a", "r", "b"]], "pools": []}))
        with pytest.raises(DataError):
            load_pools(path)

    def test_evaluate_pools_end_to_end(self, pool_kg):
        positives, pools = make_pools(pool_kg, pool_size=6, seed=2)
        scores = {}
        for pos in positives:
            scores[pos.as_tuple()] = 1.0
        for pool in pools:
            for neg in pool:
                scores.setdefault(neg.as_tuple(), 0.0)
        ev = evaluate_pools(_ByTupleScorer(scores), positives, pools)
        assert ev.ranks == (1,) * len(positives)
        assert ev.mrr() == 1.0


class TestPrf1:
    def test_perfect_prediction(self):
        gold = [["B-PER", "I-PER", "O"]]
        assert prf1(gold, gold, mode="span") == (1.0, 1.0, 1.0)
        assert prf1(gold, gold, mode="token") == (1.0, 1.0, 1.0)

    def test_all_o_prediction_scores_zero(self):
        pred = [["O", "O", "O"]]
        gold = [["B-PER", "I-PER", "O"]]
        assert prf1(pred, gold, mode="span") == (0.0, 0.0, 0.0)
        assert prf1(pred, gold, mode="token") == (0.0, 0.0, 0.0)

    def test_all_o_everywhere_scores_zero_not_nan(self):
        tags = [["O", "O"]]
        assert prf1(tags, tags, mode="span") == (0.0, 0.0, 0.0)

    def test_hand_case_half_precision_half_recall(self):
        # two gold spans, two predicted spans, one exact overlap
        gold = [["B-PER", "O", "B-ORG"], ["O", "O", "O"]]
        pred = [["B-PER", "O", "O"], ["O", "B-ORG", "O"]]
        p, r, f1 = prf1(pred, gold, mode="span")
        assert (p, r, f1) == (0.5, 0.5, 0.5)

    def test_span_mode_requires_exact_boundaries(self):
        gold = [["B-PER", "I-PER", "O"]]
        pred = [["B-PER", "O", "O"]]  # truncated span
        p, r, _ = prf1(pred, gold, mode="span")
        assert (p, r) == (0.0, 0.0)
        # token mode gives partial credit
        p_tok, r_tok, _ = prf1(pred, gold, mode="token")
        assert (p_tok, r_tok) == (1.0, 0.5)

    def test_token_mode_counts_exact_tag_matches(self):
        gold = [["B-PER", "I-PER"]]
        pred = [["I-PER", "I-PER"]]  # right type, wrong prefix on token 0
        p, r, _ = prf1(pred, gold, mode="token")
        assert p == pytest.approx(0.5)
        assert r == pytest.approx(0.5)

    def test_validation(self):
        with pytest.raises(ValueError):
            prf1([], [], mode="char")
        with pytest.raises(DataError):
            prf1([["O"]], [])
        with pytest.raises(DataError):
            prf1([["O"]], [["O", "O"]])
