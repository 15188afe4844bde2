"""Link-prediction and tagging metrics, plus persisted evaluation pools."""

import json
from dataclasses import dataclass

from .errors import DataError
from .explorer import decode_spans
from .graph import Triple
from .kge import triple_scores
from .sampling import corruption_pool
from .validation import check_positive


def rank_triple(model, positive, pool):
    """1-based rank of the positive among the pool, pessimistic on ties.

    rank = 1 + number of pool members scoring >= the positive, so a
    positive tied with negatives sorts after all of them.
    """
    pool = list(pool)
    if not pool:
        raise DataError("pool must not be empty")
    if any(t.as_tuple() == positive.as_tuple() for t in pool):
        raise DataError("positive must not appear in its own pool")
    scores = triple_scores(model, [positive] + pool)
    return 1 + int((scores[1:] >= scores[0]).sum())


def mrr(ranks, normalize=True):
    """Sum of reciprocal ranks, divided by the count when normalize."""
    ranks = list(ranks)
    if not ranks:
        raise DataError("mrr needs at least one rank")
    if any(r < 1 for r in ranks):
        raise ValueError("ranks are 1-based positive integers")
    total = sum(1.0 / r for r in ranks)
    return total / len(ranks) if normalize else total


def hit_at_n(ranks, n):
    """Fraction of ranks within the top n."""
    ranks = list(ranks)
    if not ranks:
        raise DataError("hit_at_n needs at least one rank")
    check_positive("n", n)
    return sum(1 for r in ranks if r <= n) / len(ranks)


@dataclass(frozen=True)
class RankedEval:
    """Per-positive ranks with their pool sizes."""

    ranks: tuple
    pool_sizes: tuple

    def __post_init__(self):
        object.__setattr__(self, "ranks", tuple(int(r) for r in self.ranks))
        object.__setattr__(self, "pool_sizes",
                           tuple(int(p) for p in self.pool_sizes))
        if len(self.ranks) != len(self.pool_sizes):
            raise DataError("ranks and pool_sizes must be parallel")
        for r, p in zip(self.ranks, self.pool_sizes):
            if not 1 <= r <= p + 1:
                raise DataError(f"rank {r} outside [1, pool size {p} + 1]")

    def mrr(self, normalize=True):
        return mrr(self.ranks, normalize=normalize)

    def hit_at_n(self, n):
        return hit_at_n(self.ranks, n)


def evaluate_pools(model, positives, pools):
    if len(positives) != len(pools):
        raise DataError("one pool per positive required")
    ranks = [rank_triple(model, pos, pool)
             for pos, pool in zip(positives, pools)]
    return RankedEval(ranks=tuple(ranks),
                      pool_sizes=tuple(len(p) for p in pools))


def make_pools(kg, pool_size=50, seed=0, positives=None):
    """Seeded corruption pools, one per positive (default: every triple)."""
    check_positive("pool_size", pool_size)
    if positives is None:
        positives = list(kg.iter_triples())
    pools = [
        corruption_pool(kg, pos, pool_size, seed=[seed, i])
        for i, pos in enumerate(positives)
    ]
    return positives, pools


def save_pools(positives, pools, path):
    doc = {
        "positives": [list(t.as_tuple()) for t in positives],
        "pools": [[list(t.as_tuple()) for t in pool] for pool in pools],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True, indent=2)
        fh.write("\n")


def load_pools(path):
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    try:
        positives = [Triple(*row) for row in doc["positives"]]
        pools = [[Triple(*row) for row in pool] for pool in doc["pools"]]
    except (KeyError, TypeError) as exc:
        raise DataError(f"{path}: malformed pool file: {exc}") from exc
    if len(positives) != len(pools):
        raise DataError(f"{path}: positives and pools are not parallel")
    return positives, pools


# ---------------------------------------------------------------------------
# Tagging metrics
# ---------------------------------------------------------------------------

def prf1(pred, gold, mode="span"):
    """Precision, recall, F1 over tag sequences.

    Token mode counts exact non-O tag matches; span mode counts exact
    (type, start, end) span matches. Zero denominators give 0.
    """
    if mode not in ("token", "span"):
        raise ValueError(f"mode must be 'token' or 'span', got {mode!r}")
    if len(pred) != len(gold):
        raise DataError("prediction and gold sentence counts differ")
    for i, (p, g) in enumerate(zip(pred, gold)):
        if len(p) != len(g):
            raise DataError(f"sentence {i}: tag sequence lengths differ")

    if mode == "token":
        tp = pred_n = gold_n = 0
        for p_tags, g_tags in zip(pred, gold):
            for p, g in zip(p_tags, g_tags):
                if p != "O":
                    pred_n += 1
                if g != "O":
                    gold_n += 1
                if p == g != "O":
                    tp += 1
    else:
        pred_spans, gold_spans = set(), set()
        for i, (p_tags, g_tags) in enumerate(zip(pred, gold)):
            pred_spans.update((i, *s) for s in decode_spans(p_tags))
            gold_spans.update((i, *s) for s in decode_spans(g_tags))
        tp = len(pred_spans & gold_spans)
        pred_n = len(pred_spans)
        gold_n = len(gold_spans)

    precision = tp / pred_n if pred_n else 0.0
    recall = tp / gold_n if gold_n else 0.0
    f1 = (2 * precision * recall / (precision + recall)
          if precision + recall else 0.0)
    return precision, recall, f1
