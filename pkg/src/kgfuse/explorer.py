"""Joint event extraction: tagging, supervision losses, candidate triples.

The corpus format is CoNLL-style (`token<TAB>tag`, blank line between
sentences) over a combined BIO tag set: entity types plus trigger types,
the latter namespaced as ``TRG:<type>`` so the two kinds of names can
never collide. The baseline tagger is a per-token affine classifier over
the token's embedding concatenated with the mean embedding of its
immediate neighbours — deliberately small, so the training dynamics
(cross-entropy tagging loss, benchmark-pair supervision, the alpha blend
between them) stay inspectable.

Supervision from the fused knowledge graph enters through
`benchmark_loss`: each side of a BenchmarkPairs is collapsed to a single
vector (the sum of head-minus-tail mention vectors), scored by a small
feed-forward network, and pushed apart with a pairwise log-sigmoid loss.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .embeddings import EmbeddingTable, init_random, mention_vector, tokenize_mention
from .errors import DataError, ParseError
from .kge import sigmoid
from .validation import check_positive, check_unit_interval

MAX_SENTENCE_LENGTH = 128
DEFAULT_CANDIDATE_CAP = 64
_TRIGGER_PREFIX = "TRG:"


# ---------------------------------------------------------------------------
# Schema and sentences
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TagSchema:
    """Entity and trigger type names plus the derived BIO tag vocabulary."""

    entity_types: tuple
    trigger_types: tuple
    tags: tuple = field(init=False, repr=False, compare=False)
    _tag_ids: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        ents = tuple(self._clean(t) for t in self.entity_types)
        trigs = tuple(self._clean(t) for t in self.trigger_types)
        if len(set(ents)) != len(ents) or len(set(trigs)) != len(trigs):
            raise DataError("duplicate type names in schema")
        clash = set(ents) & set(trigs)
        if clash:
            raise DataError(f"entity and trigger type names overlap: {sorted(clash)}")
        object.__setattr__(self, "entity_types", ents)
        object.__setattr__(self, "trigger_types", trigs)
        tags = ["O"]
        for key in self.type_keys():
            tags.append(f"B-{key}")
            tags.append(f"I-{key}")
        object.__setattr__(self, "tags", tuple(tags))
        object.__setattr__(self, "_tag_ids", {t: i for i, t in enumerate(tags)})

    @staticmethod
    def _clean(name):
        name = str(name).strip()
        if not name or any(c in name for c in ",\t\n"):
            raise DataError(f"bad type name: {name!r}")
        return name

    def type_keys(self):
        """Span keys: entity types as-is, trigger types TRG:-prefixed."""
        return tuple(self.entity_types) + tuple(
            _TRIGGER_PREFIX + t for t in self.trigger_types
        )

    def tag_index(self, tag):
        try:
            return self._tag_ids[tag]
        except KeyError:
            raise DataError(f"tag {tag!r} not in schema") from None

    def __contains__(self, tag):
        return tag in self._tag_ids


def load_schema(path):
    """Read a two-line schema file: `entities: ...` and `triggers: ...`."""
    entities = triggers = None
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, rest = line.partition(":")
            if not sep:
                raise ParseError(path, lineno, "expected 'entities:' or 'triggers:'")
            names = [n.strip() for n in rest.split(",") if n.strip()]
            if key.strip() == "entities":
                entities = names
            elif key.strip() == "triggers":
                triggers = names
            else:
                raise ParseError(path, lineno, f"unknown schema key {key.strip()!r}")
    if entities is None or triggers is None:
        raise ParseError(path, 0, "schema needs both an entities: and a triggers: line")
    return TagSchema(entity_types=tuple(entities), trigger_types=tuple(triggers))


@dataclass(frozen=True)
class TaggedSentence:
    tokens: tuple
    gold_tags: tuple = None
    predicted_tags: tuple = None

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        for name in ("gold_tags", "predicted_tags"):
            tags = getattr(self, name)
            if tags is not None:
                tags = tuple(tags)
                if len(tags) != len(self.tokens):
                    raise DataError(
                        f"{name} length {len(tags)} != token count {len(self.tokens)}"
                    )
                object.__setattr__(self, name, tags)

    def __len__(self):
        return len(self.tokens)

    def with_predictions(self, tags):
        return TaggedSentence(self.tokens, self.gold_tags, tuple(tags))


def _split_tag(tag):
    """('B'|'I', key) for a span tag, None for 'O'; malformed tags raise."""
    if tag == "O":
        return None
    if len(tag) > 2 and tag[1] == "-" and tag[0] in "BI":
        return tag[0], tag[2:]
    raise DataError(f"malformed tag {tag!r}")


def decode_spans(tags):
    """Lenient BIO decode: (key, start, end) spans, end exclusive.

    A stray I- tag (no matching open span) starts a new span, so any tag
    sequence — including raw model output — decodes without error.
    """
    spans = []
    open_key = open_start = None
    for i, tag in enumerate(tags):
        parsed = _split_tag(tag)
        if parsed is None:
            if open_key is not None:
                spans.append((open_key, open_start, i))
                open_key = None
            continue
        prefix, key = parsed
        if prefix == "B" or key != open_key or open_key is None:
            if open_key is not None:
                spans.append((open_key, open_start, i))
            open_key, open_start = key, i
    if open_key is not None:
        spans.append((open_key, open_start, len(tags)))
    return spans


def encode_tags(spans, length):
    """Inverse of decode_spans for well-formed, non-overlapping spans."""
    tags = ["O"] * length
    last_end = 0
    for key, start, end in sorted(spans, key=lambda s: s[1]):
        if not 0 <= start < end <= length:
            raise ValueError(f"span ({key}, {start}, {end}) out of range for {length}")
        if start < last_end:
            raise ValueError("overlapping spans cannot be BIO-encoded")
        tags[start] = f"B-{key}"
        for i in range(start + 1, end):
            tags[i] = f"I-{key}"
        last_end = end
    return tags


def load_corpus(path, schema, max_len=MAX_SENTENCE_LENGTH):
    """Parse a CoNLL-style corpus into gold-tagged sentences.

    Tags are validated strictly: they must belong to the schema, and an
    I- tag must continue a same-key B-/I- run. Sentences longer than
    max_len are truncated with a warning.
    """
    check_positive("max_len", max_len)
    sentences = []
    tokens, tags = [], []
    prev_key = None

    def flush(lineno):
        nonlocal tokens, tags, prev_key
        if tokens:
            if len(tokens) > max_len:
                warnings.warn(
                    f"{path}:{lineno}: sentence of {len(tokens)} tokens "
                    f"truncated to {max_len}"
                )
                del tokens[max_len:], tags[max_len:]
            sentences.append(TaggedSentence(tuple(tokens), tuple(tags)))
        tokens, tags, prev_key = [], [], None

    with open(path, encoding="utf-8") as fh:
        lineno = 0
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                flush(lineno)
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ParseError(path, lineno,
                                 f"expected token<TAB>tag, got {len(parts)} fields")
            token, tag = parts[0].strip(), parts[1].strip()
            if not token:
                raise ParseError(path, lineno, "empty token")
            if tag not in schema:
                raise ParseError(path, lineno, f"unknown tag {tag!r}")
            parsed = _split_tag(tag)
            if parsed and parsed[0] == "I" and parsed[1] != prev_key:
                raise ParseError(
                    path, lineno,
                    f"I-{parsed[1]} without a preceding B-/I- of the same type",
                )
            prev_key = parsed[1] if parsed else None
            tokens.append(token)
            tags.append(tag)
        flush(lineno)
    return sentences


# ---------------------------------------------------------------------------
# Candidate triples
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CandidateTriple:
    head: str
    trigger_mention: str
    trigger_type: str
    tail: str
    sentence: int

    def __post_init__(self):
        for name in ("head", "trigger_mention", "trigger_type", "tail"):
            if not str(getattr(self, name)).strip():
                raise DataError(f"candidate {name} must be non-empty")
        if self.head == self.tail:
            raise DataError(f"candidate head == tail ({self.head!r})")

    def key(self):
        return (self.trigger_mention, self.trigger_type)


def _sentence_mentions(sentence):
    """(distinct entity mentions, distinct (trigger mention, type) pairs)."""
    tags = sentence.predicted_tags
    if tags is None:
        tags = sentence.gold_tags
    if tags is None:
        raise DataError("sentence has neither predicted nor gold tags")
    entities, triggers = [], []
    seen_e, seen_t = set(), set()
    for key, start, end in decode_spans(tags):
        mention = " ".join(sentence.tokens[start:end])
        if key.startswith(_TRIGGER_PREFIX):
            item = (mention, key[len(_TRIGGER_PREFIX):])
            if item not in seen_t:
                seen_t.add(item)
                triggers.append(item)
        elif mention not in seen_e:
            seen_e.add(mention)
            entities.append(mention)
    return entities, triggers


def generate_candidates(tagged, cap=DEFAULT_CANDIDATE_CAP):
    """Exhaustive (head, trigger, tail) candidates per sentence.

    Every ordered pair of distinct entity mentions is combined with every
    trigger, giving #triggers * n * (n-1) candidates for n entities;
    output beyond `cap` per sentence is dropped with a warning.
    """
    check_positive("cap", cap)
    out = []
    for idx, sentence in enumerate(tagged):
        entities, triggers = _sentence_mentions(sentence)
        emitted = 0
        truncated = False
        for trig_mention, trig_type in triggers:
            for head in entities:
                for tail in entities:
                    if head == tail:
                        continue
                    if emitted >= cap:
                        truncated = True
                        break
                    out.append(CandidateTriple(head, trig_mention, trig_type,
                                               tail, idx))
                    emitted += 1
                if truncated:
                    break
            if truncated:
                break
        if truncated:
            warnings.warn(f"sentence {idx}: candidate list truncated at {cap}")
    return out


# ---------------------------------------------------------------------------
# Pair scorer and supervision losses
# ---------------------------------------------------------------------------

class PairScorer:
    """One-hidden-layer tanh network mapping a dim-vector to a scalar.

    Random (seeded) initialization is required: a zero start would leave
    hidden units permanently symmetric.
    """

    def __init__(self, dim, hidden=16, seed=0):
        check_positive("hidden", hidden)
        rng = np.random.default_rng([seed, 29])
        a1 = 1.0 / np.sqrt(dim)
        a2 = 1.0 / np.sqrt(hidden)
        self.w1 = rng.uniform(-a1, a1, (hidden, dim))
        self.b1 = np.zeros(hidden)
        self.w2 = rng.uniform(-a2, a2, hidden)
        self.b2 = 0.0

    def score(self, v):
        return float(self.w2 @ np.tanh(self.w1 @ v + self.b1) + self.b2)

    def score_with_grads(self, v):
        """(score, parameter gradients, d score / d input)."""
        h = np.tanh(self.w1 @ v + self.b1)
        score = float(self.w2 @ h + self.b2)
        dpre = self.w2 * (1.0 - h * h)
        grads = {
            "w1": np.outer(dpre, v),
            "b1": dpre,
            "w2": h,
            "b2": 1.0,
        }
        return score, grads, self.w1.T @ dpre

    def apply_gradients(self, grads, lr):
        self.w1 -= lr * grads["w1"]
        self.b1 -= lr * grads["b1"]
        self.w2 -= lr * grads["w2"]
        self.b2 -= lr * grads["b2"]


def _zero_scorer_grads(scorer):
    return {
        "w1": np.zeros_like(scorer.w1),
        "b1": np.zeros_like(scorer.b1),
        "w2": np.zeros_like(scorer.w2),
        "b2": 0.0,
    }


def _pair_set_vector(table, pairs):
    """Sum of (head - tail) mention vectors over a pair set."""
    total = np.zeros(table.dim)
    for head, tail in pairs:
        total += mention_vector(table, head) - mention_vector(table, tail)
    return total


def benchmark_loss(table, pair_scorer, pairs, mode="set"):
    """Pairwise log-sigmoid loss separating positive from negative pairs.

    In "set" mode each side collapses to one summed vector and one score,
    so the loss is -log sigmoid(f(positive set) - f(negative set)). The
    "pairwise" variant averages the loss over the cross product of
    individual pair scores.
    """
    loss, _, _ = _benchmark_forward(table, pair_scorer, pairs, mode)
    return loss


def _check_pairs(pairs):
    if not pairs.positives or not pairs.negatives:
        raise DataError("benchmark supervision needs non-empty positive "
                        "and negative pair sets")


def _benchmark_forward(table, pair_scorer, pairs, mode):
    """(loss, scorer-parameter grads, per-mention embedding grads)."""
    _check_pairs(pairs)
    if mode not in ("set", "pairwise"):
        raise ValueError(f"mode must be 'set' or 'pairwise', got {mode!r}")
    param_grads = _zero_scorer_grads(pair_scorer)
    mention_grads = {}

    def add_pair_grad(pair, dvec):
        head, tail = pair
        for mention, sign in ((head, 1.0), (tail, -1.0)):
            g = mention_grads.get(mention)
            if g is None:
                mention_grads[mention] = sign * dvec.copy()
            else:
                g += sign * dvec

    if mode == "set":
        v_pos = _pair_set_vector(table, pairs.positives)
        v_neg = _pair_set_vector(table, pairs.negatives)
        f_pos, g_pos, dv_pos = pair_scorer.score_with_grads(v_pos)
        f_neg, g_neg, dv_neg = pair_scorer.score_with_grads(v_neg)
        delta = f_pos - f_neg
        loss = float(np.logaddexp(0.0, -delta))
        d_delta = float(sigmoid(np.array(delta))) - 1.0
        for key in param_grads:
            param_grads[key] = d_delta * (g_pos[key] - g_neg[key])
        for pair in pairs.positives:
            add_pair_grad(pair, d_delta * dv_pos)
        for pair in pairs.negatives:
            add_pair_grad(pair, -d_delta * dv_neg)
        return loss, param_grads, mention_grads

    # pairwise: average over the cross product of single-pair scores
    pos_fwd = [
        pair_scorer.score_with_grads(
            mention_vector(table, h) - mention_vector(table, t))
        for h, t in pairs.positives
    ]
    neg_fwd = [
        pair_scorer.score_with_grads(
            mention_vector(table, h) - mention_vector(table, t))
        for h, t in pairs.negatives
    ]
    n_pairs = len(pos_fwd) * len(neg_fwd)
    loss = 0.0
    d_pos = np.zeros(len(pos_fwd))
    d_neg = np.zeros(len(neg_fwd))
    for i, (f_p, _, _) in enumerate(pos_fwd):
        for j, (f_n, _, _) in enumerate(neg_fwd):
            delta = f_p - f_n
            loss += float(np.logaddexp(0.0, -delta))
            d = (float(sigmoid(np.array(delta))) - 1.0) / n_pairs
            d_pos[i] += d
            d_neg[j] -= d
    loss /= n_pairs
    for fwd, coeffs, side in ((pos_fwd, d_pos, pairs.positives),
                              (neg_fwd, d_neg, pairs.negatives)):
        for (_, grads, dv), coeff, pair in zip(fwd, coeffs, side):
            for key in param_grads:
                param_grads[key] = param_grads[key] + coeff * grads[key]
            add_pair_grad(pair, coeff * dv)
    return loss, param_grads, mention_grads


# ---------------------------------------------------------------------------
# The window tagger
# ---------------------------------------------------------------------------

def _token_vectors(table, tokens):
    return np.array([table.lookup(tok.lower()) for tok in tokens])


def _sentence_features(table, tokens):
    """Per-token features: own vector, then the mean of the +-1 window."""
    n = len(tokens)
    vecs = _token_vectors(table, tokens)
    ctx = np.zeros_like(vecs)
    if n > 1:
        ctx[0] = vecs[1]
        ctx[-1] = vecs[-2]
        if n > 2:
            ctx[1:-1] = 0.5 * (vecs[:-2] + vecs[2:])
    return np.concatenate([vecs, ctx], axis=1)


class WindowTagger(BaseEstimator):
    """Affine per-token BIO tagger with optional benchmark supervision.

    The training objective is (1 - alpha) * tagging cross-entropy +
    alpha * benchmark pair loss. The two branches are fully decoupled:
    at alpha=0 the benchmark machinery is never evaluated (training is
    bit-identical to pure tagging), and at alpha=1 the tagger parameters
    are never touched.
    """

    def __init__(self, schema=None, alpha=0.0, learning_rate=0.1, epochs=30,
                 hidden=16, pair_mode="set", update_embeddings=False,
                 seed=0, warm_start=False):
        self.schema = schema
        self.alpha = alpha
        self.learning_rate = learning_rate
        self.epochs = epochs
        self.hidden = hidden
        self.pair_mode = pair_mode
        self.update_embeddings = update_embeddings
        self.seed = seed
        self.warm_start = warm_start

    # -- training ----------------------------------------------------------

    def fit(self, corpus, table, pairs=None):
        corpus = list(corpus)
        if not corpus:
            raise DataError("cannot train on an empty corpus")
        if any(s.gold_tags is None for s in corpus):
            raise DataError("training corpus must carry gold tags")
        check_unit_interval("alpha", self.alpha)
        check_positive("learning_rate", self.learning_rate, strict=False)
        check_positive("epochs", self.epochs, strict=False)
        if self.schema is None:
            raise ValueError("WindowTagger needs a schema")

        use_benchmark = self.alpha > 0.0
        if use_benchmark and (pairs is None or not pairs.positives
                              or not pairs.negatives):
            warnings.warn("benchmark supervision skipped: no usable pairs")
            use_benchmark = False
        use_jee = self.alpha < 1.0

        if not (self.warm_start and hasattr(self, "weights_")):
            n_tags = len(self.schema.tags)
            self.weights_ = np.zeros((n_tags, 2 * table.dim))
            self.bias_ = np.zeros(n_tags)
            self.pair_scorer_ = PairScorer(table.dim, self.hidden, self.seed)
            self.loss_curve_ = []
        self.table_ = table

        gold_ids = [np.array([self.schema.tag_index(t) for t in s.gold_tags])
                    for s in corpus]
        features = [_sentence_features(table, s.tokens) for s in corpus]

        for _ in range(self.epochs):
            total = 0.0
            if use_jee:
                jee, dW, db, emb_jee = self._jee_forward_backward(
                    corpus, features, gold_ids)
                total += (1.0 - self.alpha) * jee if use_benchmark else jee
            if use_benchmark:
                bench, scorer_grads, emb_bench = _benchmark_forward(
                    table, self.pair_scorer_, pairs, self.pair_mode)
                total += self.alpha * bench if use_jee else bench

            lr = self.learning_rate
            if use_jee:
                scale = (1.0 - self.alpha) if use_benchmark else 1.0
                self.weights_ -= lr * scale * dW
                self.bias_ -= lr * scale * db
            if use_benchmark:
                scale = self.alpha if use_jee else 1.0
                self.pair_scorer_.apply_gradients(
                    {k: scale * g for k, g in scorer_grads.items()}, lr)
            if self.update_embeddings:
                token_grads = {}
                if use_jee:
                    scale = (1.0 - self.alpha) if use_benchmark else 1.0
                    for tok, g in emb_jee.items():
                        token_grads[tok] = scale * g
                if use_benchmark:
                    scale = self.alpha if use_jee else 1.0
                    for mention, g in emb_bench.items():
                        for tok in tokenize_mention(mention):
                            if tok in token_grads:
                                token_grads[tok] = token_grads[tok] + scale * g
                            else:
                                token_grads[tok] = scale * g
                for tok, g in token_grads.items():
                    table.vectors[tok] = table.lookup(tok) - lr * g
                if use_jee:
                    features = [_sentence_features(table, s.tokens)
                                for s in corpus]
            self.loss_curve_.append(total)
        self.final_loss_ = self.loss_curve_[-1] if self.loss_curve_ else 0.0
        return self

    def _jee_forward_backward(self, corpus, features, gold_ids):
        """Mean-over-sentences tagging loss and its gradients."""
        n_sent = len(corpus)
        dW = np.zeros_like(self.weights_)
        db = np.zeros_like(self.bias_)
        token_grads = {}
        loss = 0.0
        for sent, phi, gold in zip(corpus, features, gold_ids):
            scores = phi @ self.weights_.T + self.bias_
            scores -= scores.max(axis=1, keepdims=True)
            exp = np.exp(scores)
            probs = exp / exp.sum(axis=1, keepdims=True)
            picked = probs[np.arange(len(gold)), gold]
            loss += -np.log(np.maximum(picked, 1e-300)).sum()
            d_scores = probs.copy()
            d_scores[np.arange(len(gold)), gold] -= 1.0
            d_scores /= n_sent
            dW += d_scores.T @ phi
            db += d_scores.sum(axis=0)
            if self.update_embeddings:
                d_phi = d_scores @ self.weights_
                self._scatter_feature_grads(sent.tokens, d_phi, token_grads)
        return loss / n_sent, dW, db, token_grads

    def _scatter_feature_grads(self, tokens, d_phi, token_grads):
        dim = d_phi.shape[1] // 2
        n = len(tokens)

        def add(tok, g):
            tok = tok.lower()
            if tok in token_grads:
                token_grads[tok] = token_grads[tok] + g
            else:
                token_grads[tok] = g.copy()

        for i, tok in enumerate(tokens):
            add(tok, d_phi[i, :dim])
        for i in range(n):
            neighbours = [j for j in (i - 1, i + 1) if 0 <= j < n]
            if not neighbours:
                continue
            share = d_phi[i, dim:] / len(neighbours)
            for j in neighbours:
                add(tokens[j], share)

    # -- inference ----------------------------------------------------------

    def tag(self, tokens):
        """Most likely tag per token; ties go to the earliest tag."""
        self._require_fitted()
        tokens = list(tokens)
        if not tokens:
            return []
        phi = _sentence_features(self.table_, tokens)
        scores = phi @ self.weights_.T + self.bias_
        return [self.schema.tags[i] for i in scores.argmax(axis=1)]

    def predict(self, sentences):
        self._require_fitted()
        return [s.with_predictions(self.tag(s.tokens)) for s in sentences]

    def _require_fitted(self):
        if not hasattr(self, "weights_"):
            raise NotFittedError("WindowTagger is not fitted yet")


def jee_loss(tagger, sentences, table=None):
    """Tagging cross-entropy (summed per sentence, averaged over sentences).

    Works on an unfitted tagger too, in which case zero weights are
    assumed — every tag equally likely, ln(vocabulary size) per token.
    """
    sentences = list(sentences)
    if not sentences:
        raise DataError("jee_loss needs at least one sentence")
    if any(s.gold_tags is None for s in sentences):
        raise DataError("jee_loss needs gold tags")
    if table is None:
        table = getattr(tagger, "table_", None)
        if table is None:
            raise ValueError("pass a table or fit the tagger first")
    schema = tagger.schema
    n_tags = len(schema.tags)
    W = getattr(tagger, "weights_", None)
    b = getattr(tagger, "bias_", None)
    if W is None:
        W = np.zeros((n_tags, 2 * table.dim))
        b = np.zeros(n_tags)
    loss = 0.0
    for s in sentences:
        phi = _sentence_features(table, s.tokens)
        scores = phi @ W.T + b
        scores -= scores.max(axis=1, keepdims=True)
        log_probs = scores - np.log(np.exp(scores).sum(axis=1, keepdims=True))
        gold = [schema.tag_index(t) for t in s.gold_tags]
        loss += -log_probs[np.arange(len(gold)), gold].sum()
    return loss / len(sentences)


def train_explorer(tagger, corpus, pairs, table):
    """Train the tagger under the combined objective; returns it fitted."""
    return tagger.fit(corpus, table, pairs=pairs)


def tag(tagger, tokens):
    return tagger.tag(tokens)


# ---------------------------------------------------------------------------
# Tagger checkpoints
# ---------------------------------------------------------------------------

_TAGGER_VERSION = 1


def save_tagger(tagger, path):
    tagger._require_fitted()
    table = tagger.table_
    tokens = np.array(table.tokens(), dtype=str)
    matrix = (np.stack([table.vectors[t] for t in tokens])
              if len(tokens) else np.zeros((0, table.dim)))
    np.savez(
        path,
        version=np.array(_TAGGER_VERSION),
        dim=np.array(table.dim),
        oov_seed=np.array(table.oov_seed),
        alpha=np.array(tagger.alpha),
        seed=np.array(tagger.seed),
        hidden=np.array(tagger.hidden),
        entity_types=np.array(tagger.schema.entity_types, dtype=str),
        trigger_types=np.array(tagger.schema.trigger_types, dtype=str),
        weights=tagger.weights_,
        bias=tagger.bias_,
        scorer_w1=tagger.pair_scorer_.w1,
        scorer_b1=tagger.pair_scorer_.b1,
        scorer_w2=tagger.pair_scorer_.w2,
        scorer_b2=np.array(tagger.pair_scorer_.b2),
        emb_tokens=tokens,
        emb_matrix=matrix,
    )


def load_tagger(path):
    with np.load(path, allow_pickle=False) as data:
        version = int(data["version"])
        if version != _TAGGER_VERSION:
            raise ValueError(f"unsupported tagger checkpoint version {version}")
        schema = TagSchema(
            entity_types=tuple(str(t) for t in data["entity_types"]),
            trigger_types=tuple(str(t) for t in data["trigger_types"]),
        )
        table = EmbeddingTable(int(data["dim"]), oov_seed=int(data["oov_seed"]))
        matrix = data["emb_matrix"]
        for i, token in enumerate(data["emb_tokens"]):
            table[str(token)] = matrix[i]
        tagger = WindowTagger(schema=schema, alpha=float(data["alpha"]),
                              hidden=int(data["hidden"]), seed=int(data["seed"]))
        tagger.weights_ = data["weights"]
        tagger.bias_ = data["bias"]
        scorer = PairScorer(int(data["dim"]), int(data["hidden"]),
                            int(data["seed"]))
        scorer.w1 = data["scorer_w1"]
        scorer.b1 = data["scorer_b1"]
        scorer.w2 = data["scorer_w2"]
        scorer.b2 = float(data["scorer_b2"])
        tagger.pair_scorer_ = scorer
        tagger.table_ = table
        tagger.loss_curve_ = []
        return tagger
