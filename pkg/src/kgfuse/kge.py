"""Triple scoring models, ranking losses, training and gradient checking.

Two scorers live here. The translational scorer measures how well the
tail embedding matches head + relation and is trained with a hinged
margin ranking loss. The convolutional scorer slides full-height kernels
over the stacked (head, relation, tail) mention matrix, max-pools each
kernel response to one feature, and maps the features through an affine
layer and a sigmoid to a likelihood in (0, 1); it is trained with a
pairwise log-sigmoid (BPR) loss. Both update the shared token embedding
table jointly with their own parameters, distributing mention gradients
to the mention's tokens (a mention vector is the sum of its token
vectors).

All gradients are derived analytically; `grad_check` compares them
against central finite differences over every parameter group, token
vectors included.
"""

from dataclasses import dataclass, field

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .embeddings import EmbeddingTable, init_random, mention_vector, tokenize_mention
from .graph import KnowledgeGraph, Triple
from .validation import check_paired, check_positive, ensure_finite

_OPEN_LO = np.nextafter(0.0, 1.0)
_OPEN_HI = np.nextafter(1.0, 0.0)


def sigmoid(z):
    """Numerically stable logistic function."""
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def bpr_loss(pos_scores, neg_scores):
    """Sum of -log sigmoid(pos - neg) over paired score arrays."""
    pos = np.asarray(pos_scores, dtype=float)
    neg = np.asarray(neg_scores, dtype=float)
    check_paired(pos, neg)
    # log(1 + exp(-(pos - neg))) evaluated stably
    return float(np.logaddexp(0.0, neg - pos).sum())


# ---------------------------------------------------------------------------
# Translational scoring
# ---------------------------------------------------------------------------

def _check_norm(norm):
    if norm not in ("l1", "l2"):
        raise ValueError(f"norm must be 'l1' or 'l2', got {norm!r}")
    return norm


def transe_score(table, triple, norm="l2"):
    """Distance d(e_head + e_rel, e_tail); lower means more plausible."""
    _check_norm(norm)
    v = (
        mention_vector(table, triple.head)
        + mention_vector(table, triple.relation)
        - mention_vector(table, triple.tail)
    )
    if norm == "l1":
        return float(np.abs(v).sum())
    return float(np.sqrt((v * v).sum()))


def margin_ranking_loss(table, positives, negatives, margin=1.0, norm="l2"):
    """Hinged margin loss sum(max(0, margin + d(pos) - d(neg))).

    `negatives[i]` is the corruption paired with `positives[i]`. A pair
    contributes zero exactly when the negative's distance exceeds the
    positive's by at least the margin.
    """
    check_paired(positives, negatives)
    check_positive("margin", margin, strict=False)
    total = 0.0
    for pos, neg in zip(positives, negatives):
        gap = margin + transe_score(table, pos, norm) - transe_score(table, neg, norm)
        if gap > 0:
            total += gap
    return total


# ---------------------------------------------------------------------------
# Convolutional triple likelihood
# ---------------------------------------------------------------------------

@dataclass
class ConvTripleModel:
    """Parameters of the convolutional likelihood plus its embedding table.

    kernels: (m, 3, w) full-height filters sliding along the embedding
    axis; biases: (m,); out_weights/out_bias: the affine map from the m
    pooled features to the pre-sigmoid score.
    """

    kernels: np.ndarray
    biases: np.ndarray
    out_weights: np.ndarray
    out_bias: float
    table: EmbeddingTable
    seed: int = 0

    def __post_init__(self):
        self.kernels = np.asarray(self.kernels, dtype=float)
        self.biases = np.asarray(self.biases, dtype=float)
        self.out_weights = np.asarray(self.out_weights, dtype=float)
        m, rows, w = self.kernels.shape
        if rows != 3:
            raise ValueError(f"kernels must be (m, 3, w), got {self.kernels.shape}")
        if m < 1:
            raise ValueError("need at least one kernel")
        if not 1 <= w <= self.table.dim:
            raise ValueError(
                f"kernel width {w} must satisfy 1 <= w <= dim ({self.table.dim})"
            )
        if self.biases.shape != (m,) or self.out_weights.shape != (m,):
            raise ValueError("biases and out_weights must have one entry per kernel")

    @property
    def n_kernels(self):
        return self.kernels.shape[0]

    @property
    def kernel_width(self):
        return self.kernels.shape[2]

    def likelihood(self, triple):
        return float(self.likelihood_many([triple])[0])

    def likelihood_many(self, triples):
        if len(triples) == 0:
            return np.zeros(0)
        X = _stack_mentions(self.table, triples)
        f, _ = _conv_forward(self, X)
        return f

    def save(self, path):
        save_model(self, path)

    @classmethod
    def load(cls, path):
        return load_model(path)


def _stack_mentions(table, triples):
    """(n, 3, dim) stack of head/relation/tail mention vectors."""
    X = np.empty((len(triples), 3, table.dim))
    cache = {}
    for i, t in enumerate(triples):
        for c, mention in enumerate((t.head, t.relation, t.tail)):
            vec = cache.get(mention)
            if vec is None:
                vec = mention_vector(table, mention)
                cache[mention] = vec
            X[i, c] = vec
    return X


def _conv_forward(model, X):
    """Likelihoods for a stacked batch, with the cache backward needs."""
    w = model.kernel_width
    windows = sliding_window_view(X, w, axis=2)        # (n, 3, P, w)
    conv = np.einsum("icpw,mcw->imp", windows, model.kernels)
    conv += model.biases[None, :, None]                # (n, m, P)
    active = np.maximum(conv, 0.0)
    p_star = np.argmax(active, axis=2)                 # first max wins ties
    n_idx = np.arange(conv.shape[0])[:, None]
    m_idx = np.arange(conv.shape[1])[None, :]
    pooled = active[n_idx, m_idx, p_star]              # (n, m)
    z = pooled @ model.out_weights + model.out_bias
    f = np.clip(sigmoid(z), _OPEN_LO, _OPEN_HI)
    cache = {
        "X": X, "windows": windows, "conv": conv,
        "p_star": p_star, "pooled": pooled, "z": z, "f": f,
    }
    return f, cache


def _conv_backward(model, cache, df):
    """Gradients of sum(df * f) w.r.t. parameters and the input stack."""
    f = cache["f"]
    dz = df * f * (1.0 - f)                            # (n,)
    pooled = cache["pooled"]
    d_out_w = dz @ pooled
    d_out_b = float(dz.sum())
    d_pooled = dz[:, None] * model.out_weights[None, :]

    conv = cache["conv"]
    p_star = cache["p_star"]
    n, m, _ = conv.shape
    n_idx = np.arange(n)[:, None]
    m_idx = np.arange(m)[None, :]
    conv_star = conv[n_idx, m_idx, p_star]
    d_conv_star = d_pooled * (conv_star > 0)           # relu gate at the max

    # advanced indices around the row slice put (n, m) in front: (n, m, 3, w)
    gathered = cache["windows"][np.arange(n)[:, None], :, p_star, :]
    d_kernels = np.einsum("im,imcw->mcw", d_conv_star, gathered)
    d_biases = d_conv_star.sum(axis=0)

    w = model.kernel_width
    dX = np.zeros_like(cache["X"])
    rows = np.arange(3)[None, :, None]
    offs = np.arange(w)[None, None, :]
    for k in range(m):
        contrib = d_conv_star[:, k, None, None] * model.kernels[k][None, :, :]
        cols = p_star[:, k, None, None] + offs
        np.add.at(dX, (np.arange(n)[:, None, None], rows, cols), contrib)
    return d_kernels, d_biases, d_out_w, d_out_b, dX


def conv_likelihood(model, triple):
    """Likelihood in (0, 1) that `triple` is consistent with the model."""
    return model.likelihood(triple)


def bpr_likelihood_loss(model, positives, negatives):
    """Sum of -log sigmoid(f(pos) - f(neg)) under the model's likelihood."""
    check_paired(positives, negatives)
    pos = model.likelihood_many(positives)
    neg = model.likelihood_many(negatives)
    return bpr_loss(pos, neg)


def _pair_gradients(model, positives, negatives, scale=1.0):
    """Analytic gradients of the summed BPR likelihood loss.

    Returns (loss, d_kernels, d_biases, d_out_w, d_out_b, mention_grads)
    where mention_grads maps mention -> accumulated dim-vector. `scale`
    multiplies every gradient (use 1/batch for averaged updates).
    """
    triples = list(positives) + list(negatives)
    X = _stack_mentions(model.table, triples)
    f, cache = _conv_forward(model, X)
    k = len(positives)
    delta = f[:k] - f[k:]
    loss = float(np.logaddexp(0.0, -delta).sum())
    d_delta = (sigmoid(delta) - 1.0) * scale
    df = np.concatenate([d_delta, -d_delta])
    dK, dB, dU, du0, dX = _conv_backward(model, cache, df)
    mention_grads = {}
    for i, t in enumerate(triples):
        for c, mention in enumerate((t.head, t.relation, t.tail)):
            g = mention_grads.get(mention)
            if g is None:
                mention_grads[mention] = dX[i, c].copy()
            else:
                g += dX[i, c]
    return loss, dK, dB, dU, du0, mention_grads


def grad_check(model, positives, negatives, eps=1e-5):
    """Max relative error of analytic vs central-difference gradients.

    Checks kernels, biases, the output affine map and the token vectors
    of every mention in the batch. The relative error of a scalar pair
    (ga, gn) is |ga - gn| / max(|ga|, |gn|, 1e-8). The model is left
    unmodified (up to materializing OOV tokens so they can be perturbed).
    """
    if not 0.0 < eps <= 1e-2:
        raise ValueError(f"eps must lie in (0, 1e-2], got {eps}")
    check_paired(positives, negatives)
    tokens = []
    for t in list(positives) + list(negatives):
        for mention in (t.head, t.relation, t.tail):
            tokens.extend(tokenize_mention(mention))
    model.table.ensure(tokens)

    _, dK, dB, dU, du0, mention_grads = _pair_gradients(model, positives, negatives)
    token_grads = {}
    for mention, g in mention_grads.items():
        for token in tokenize_mention(mention):
            if token in token_grads:
                token_grads[token] += g
            else:
                token_grads[token] = g.copy()

    def loss():
        return bpr_likelihood_loss(model, positives, negatives)

    worst = 0.0

    def compare(analytic, array):
        nonlocal worst
        flat_g = np.asarray(analytic, dtype=float).ravel()
        flat_p = array.ravel()
        for i in range(flat_p.size):
            orig = flat_p[i]
            flat_p[i] = orig + eps
            up = loss()
            flat_p[i] = orig - eps
            down = loss()
            flat_p[i] = orig
            numeric = (up - down) / (2.0 * eps)
            err = abs(flat_g[i] - numeric) / max(abs(flat_g[i]), abs(numeric), 1e-8)
            if err > worst:
                worst = err

    compare(dK, model.kernels)
    compare(dB, model.biases)
    compare(dU, model.out_weights)
    # out_bias is a plain float; wrap it in a view of the model attribute
    orig = model.out_bias
    model.out_bias = orig + eps
    up = loss()
    model.out_bias = orig - eps
    down = loss()
    model.out_bias = orig
    numeric = (up - down) / (2.0 * eps)
    err = abs(du0 - numeric) / max(abs(du0), abs(numeric), 1e-8)
    worst = max(worst, err)
    for token in sorted(token_grads):
        compare(token_grads[token], model.table.vectors[token])
    return worst


# ---------------------------------------------------------------------------
# Checkpoints
# ---------------------------------------------------------------------------

_CHECKPOINT_VERSION = 1


def save_model(model, path):
    """Write a versioned checkpoint; load(save(x)) is bit-exact."""
    table = model.table
    tokens = np.array(table.tokens(), dtype=str)
    matrix = (
        np.stack([table.vectors[t] for t in tokens])
        if len(tokens)
        else np.zeros((0, table.dim))
    )
    ensure_finite("model parameters", model.kernels, model.biases,
                  model.out_weights, [model.out_bias], matrix)
    np.savez(
        path,
        version=np.array(_CHECKPOINT_VERSION),
        dim=np.array(table.dim),
        seed=np.array(model.seed),
        oov_seed=np.array(table.oov_seed),
        kernels=model.kernels,
        biases=model.biases,
        out_weights=model.out_weights,
        out_bias=np.array(model.out_bias),
        emb_tokens=tokens,
        emb_matrix=matrix,
    )


def load_model(path):
    with np.load(path, allow_pickle=False) as data:
        version = int(data["version"])
        if version != _CHECKPOINT_VERSION:
            raise ValueError(f"unsupported checkpoint version {version}")
        table = EmbeddingTable(int(data["dim"]), oov_seed=int(data["oov_seed"]))
        matrix = data["emb_matrix"]
        for i, token in enumerate(data["emb_tokens"]):
            table[str(token)] = matrix[i]
        return ConvTripleModel(
            kernels=data["kernels"],
            biases=data["biases"],
            out_weights=data["out_weights"],
            out_bias=float(data["out_bias"]),
            table=table,
            seed=int(data["seed"]),
        )


# ---------------------------------------------------------------------------
# Shared training plumbing
# ---------------------------------------------------------------------------

class _Adam:
    """Per-array Adam state; deterministic given call order."""

    def __init__(self, beta1=0.9, beta2=0.999, eps=1e-8):
        self.beta1, self.beta2, self.eps = beta1, beta2, eps
        self.m, self.v, self.t = {}, {}, {}

    def step(self, key, param, grad, lr):
        m = self.m.setdefault(key, np.zeros_like(param))
        v = self.v.setdefault(key, np.zeros_like(param))
        t = self.t.get(key, 0) + 1
        self.t[key] = t
        m *= self.beta1
        m += (1 - self.beta1) * grad
        v *= self.beta2
        v += (1 - self.beta2) * grad * grad
        mhat = m / (1 - self.beta1 ** t)
        vhat = v / (1 - self.beta2 ** t)
        param -= lr * mhat / (np.sqrt(vhat) + self.eps)


class _EmbeddingView:
    """Dense matrix view over the table vocabulary for vectorized updates."""

    def __init__(self, table, mentions):
        tokens = []
        for mention in mentions:
            tokens.extend(tokenize_mention(mention))
        table.ensure(tokens)
        self.table = table
        self.vocab = table.tokens()
        self.token_ids = {tok: i for i, tok in enumerate(self.vocab)}
        self.matrix = np.stack([table.vectors[t] for t in self.vocab])
        self.mention_tokens = {
            m: np.array([self.token_ids[t] for t in tokenize_mention(m)])
            for m in dict.fromkeys(mentions)
        }

    def mention_vec(self, mention):
        return self.matrix[self.mention_tokens[mention]].sum(axis=0)

    def scatter(self, grads, out):
        """Accumulate mention gradients into a token-gradient matrix."""
        for mention, g in grads.items():
            np.add.at(out, self.mention_tokens[mention], g)

    def writeback(self):
        for tok, i in self.token_ids.items():
            self.table.vectors[tok] = self.matrix[i].copy()


def _epoch_order(n, rng, shuffle):
    order = np.arange(n)
    if shuffle:
        rng.shuffle(order)
    return order


def _corrupt_for_training(kg, positives, rng, max_tries=50):
    """One head-or-tail corruption per positive; pairs that cannot escape
    the graph within the retry budget are flagged inactive."""
    entities = kg.entities
    negs, active = [], []
    for pos in positives:
        found = None
        for _ in range(max_tries):
            swap_head = rng.integers(0, 2) == 0
            ent = entities[rng.integers(0, len(entities))]
            cand = (
                Triple(ent, pos.relation, pos.tail)
                if swap_head
                else Triple(pos.head, pos.relation, ent)
            )
            if not kg.contains(cand):
                found = cand
                break
        if found is None:
            found = pos  # placeholder, masked out below
            active.append(False)
        else:
            active.append(True)
        negs.append(found)
    return negs, np.array(active, dtype=bool)


# ---------------------------------------------------------------------------
# Estimators
# ---------------------------------------------------------------------------

class TransEScorer(BaseEstimator):
    """Translational triple scorer trained with the margin ranking loss.

    fit() learns token embeddings from a KnowledgeGraph; scoring follows
    head + relation vs tail distance under the configured norm. Higher
    decision_function values mean more plausible triples.

    Parameters mirror the usual estimator conventions: everything passed
    to __init__ is a hyperparameter, fitted state lives in trailing
    underscore attributes.
    """

    def __init__(self, dim=32, margin=1.0, norm="l2", learning_rate=0.05,
                 epochs=100, batch_size=128, seed=0, shuffle=True,
                 warm_start=False):
        self.dim = dim
        self.margin = margin
        self.norm = norm
        self.learning_rate = learning_rate
        self.epochs = epochs
        self.batch_size = batch_size
        self.seed = seed
        self.shuffle = shuffle
        self.warm_start = warm_start

    def fit(self, kg, table=None):
        if len(kg) == 0:
            raise ValueError("cannot fit on an empty knowledge graph")
        _check_norm(self.norm)
        check_positive("learning_rate", self.learning_rate, strict=False)
        check_positive("epochs", self.epochs)
        positives = list(kg.iter_triples())
        mentions = [m for t in positives for m in (t.head, t.relation, t.tail)]
        warm = self.warm_start and hasattr(self, "table_")
        if warm:
            table = self.table_
        elif table is None:
            vocab = sorted({tok for m in mentions for tok in tokenize_mention(m)})
            table = init_random(vocab, self.dim, self.seed)
        if table.dim != self.dim:
            raise ValueError(f"table dim {table.dim} != estimator dim {self.dim}")

        view = _EmbeddingView(table, mentions)
        rng = np.random.default_rng([self.seed, 61])
        losses = []
        for _ in range(self.epochs):
            order = _epoch_order(len(positives), rng, self.shuffle)
            negatives, active = _corrupt_for_training(kg, positives, rng)
            epoch_loss = 0.0
            for start in range(0, len(order), self.batch_size):
                idx = order[start:start + self.batch_size]
                epoch_loss += self._batch_update(view, positives, negatives,
                                                 active, idx)
            losses.append(epoch_loss)
        view.writeback()
        self.table_ = table
        self.loss_curve_ = self.loss_curve_ + losses if warm else losses
        self.final_loss_ = losses[-1] if losses else 0.0
        return self

    def _batch_update(self, view, positives, negatives, active, idx):
        lr = self.learning_rate / max(len(idx), 1)
        grads = {}
        batch_loss = 0.0
        for i in idx:
            if not active[i]:
                continue
            pos, neg = positives[i], negatives[i]
            vp = (view.mention_vec(pos.head) + view.mention_vec(pos.relation)
                  - view.mention_vec(pos.tail))
            vn = (view.mention_vec(neg.head) + view.mention_vec(neg.relation)
                  - view.mention_vec(neg.tail))
            dp, gp = _distance_and_grad(vp, self.norm)
            dn, gn = _distance_and_grad(vn, self.norm)
            gap = self.margin + dp - dn
            if gap <= 0:
                continue
            batch_loss += gap
            _acc(grads, pos.head, gp)
            _acc(grads, pos.relation, gp)
            _acc(grads, pos.tail, -gp)
            _acc(grads, neg.head, -gn)
            _acc(grads, neg.relation, -gn)
            _acc(grads, neg.tail, gn)
        token_grad = np.zeros_like(view.matrix)
        view.scatter(grads, token_grad)
        view.matrix -= lr * token_grad
        return batch_loss

    def distances(self, triples):
        self._require_fitted()
        return np.array(
            [transe_score(self.table_, t, self.norm) for t in triples]
        )

    def decision_function(self, triples):
        """Negated distances, so larger means more plausible."""
        return -self.distances(triples)

    def _require_fitted(self):
        if not hasattr(self, "table_"):
            raise NotFittedError("TransEScorer is not fitted yet")


def _distance_and_grad(v, norm):
    if norm == "l1":
        return float(np.abs(v).sum()), np.sign(v)
    d = float(np.sqrt((v * v).sum()))
    if d == 0.0:
        return 0.0, np.zeros_like(v)
    return d, v / d


def _acc(grads, mention, g):
    cur = grads.get(mention)
    if cur is None:
        grads[mention] = g.copy()
    else:
        cur += g


class ConvTripleScorer(BaseEstimator):
    """Convolutional triple-likelihood scorer trained with the BPR loss.

    fit() performs first-order gradient descent (plain SGD by default,
    Adam behind the `optimizer` switch) on the pairwise loss, updating
    kernels, the output map and the token embeddings jointly. Negatives
    are either supplied as a list (sampled per epoch) or generated by
    head/tail corruption, one per positive per epoch.
    """

    def __init__(self, dim=32, n_kernels=4, kernel_width=3, learning_rate=0.1,
                 epochs=20, batch_size=128, optimizer="sgd", seed=0,
                 shuffle=True, warm_start=False):
        self.dim = dim
        self.n_kernels = n_kernels
        self.kernel_width = kernel_width
        self.learning_rate = learning_rate
        self.epochs = epochs
        self.batch_size = batch_size
        self.optimizer = optimizer
        self.seed = seed
        self.shuffle = shuffle
        self.warm_start = warm_start

    def fit(self, kg, negatives=None, table=None):
        if len(kg) == 0:
            raise ValueError("cannot fit on an empty knowledge graph")
        check_positive("n_kernels", self.n_kernels)
        check_positive("epochs", self.epochs)
        check_positive("learning_rate", self.learning_rate, strict=False)
        if not 1 <= self.kernel_width <= self.dim:
            raise ValueError(
                f"kernel_width {self.kernel_width} must lie in [1, dim={self.dim}]"
            )
        if self.optimizer not in ("sgd", "adam"):
            raise ValueError(f"optimizer must be 'sgd' or 'adam', got {self.optimizer!r}")

        positives = list(kg.iter_triples())
        mentions = [m for t in positives for m in (t.head, t.relation, t.tail)]
        if negatives:
            mentions.extend(m for t in negatives for m in (t.head, t.relation, t.tail))

        warm = self.warm_start and hasattr(self, "model_")
        if warm:
            model = self.model_
            if table is not None and table is not model.table:
                raise ValueError("cannot swap tables on a warm start")
            table = model.table
        else:
            if table is None:
                vocab = sorted({tok for m in mentions for tok in tokenize_mention(m)})
                table = init_random(vocab, self.dim, self.seed)
            if table.dim != self.dim:
                raise ValueError(f"table dim {table.dim} != estimator dim {self.dim}")
            model = self._init_model(table)

        view = _EmbeddingView(table, mentions)
        rng = np.random.default_rng([self.seed, 17])
        adam = _Adam() if self.optimizer == "adam" else None
        losses = []
        for _ in range(self.epochs):
            order = _epoch_order(len(positives), rng, self.shuffle)
            if negatives:
                picks = rng.integers(0, len(negatives), len(positives))
                paired = [negatives[p] for p in picks]
                active = np.ones(len(positives), dtype=bool)
            else:
                paired, active = _corrupt_for_training(kg, positives, rng)
            epoch_loss = 0.0
            for start in range(0, len(order), self.batch_size):
                idx = [i for i in order[start:start + self.batch_size] if active[i]]
                if not idx:
                    continue
                pos = [positives[i] for i in idx]
                neg = [paired[i] for i in idx]
                epoch_loss += self._batch_update(model, view, pos, neg, adam)
            losses.append(epoch_loss)
        view.writeback()
        self.model_ = model
        self.table_ = table
        self.loss_curve_ = self.loss_curve_ + losses if warm else losses
        self.final_loss_ = losses[-1] if losses else 0.0
        return self

    def _init_model(self, table):
        rng = np.random.default_rng([self.seed, 7])
        m, w = self.n_kernels, self.kernel_width
        a = 1.0 / np.sqrt(3.0 * w)
        kernels = rng.uniform(-a, a, (m, 3, w))
        out_weights = rng.uniform(-1.0, 1.0, m) / np.sqrt(m)
        return ConvTripleModel(
            kernels=kernels,
            biases=np.zeros(m),
            out_weights=out_weights,
            out_bias=0.0,
            table=table,
            seed=self.seed,
        )

    def _batch_update(self, model, view, pos, neg, adam):
        # keep the model's table view coherent: mention vectors are read
        # from the dense matrix, so rebuild the stacked input from it
        triples = pos + neg
        X = np.empty((len(triples), 3, view.matrix.shape[1]))
        for i, t in enumerate(triples):
            X[i, 0] = view.mention_vec(t.head)
            X[i, 1] = view.mention_vec(t.relation)
            X[i, 2] = view.mention_vec(t.tail)
        f, cache = _conv_forward(model, X)
        k = len(pos)
        delta = f[:k] - f[k:]
        loss = float(np.logaddexp(0.0, -delta).sum())
        d_delta = (sigmoid(delta) - 1.0) / k
        df = np.concatenate([d_delta, -d_delta])
        dK, dB, dU, du0, dX = _conv_backward(model, cache, df)
        grads = {}
        for i, t in enumerate(triples):
            _acc(grads, t.head, dX[i, 0])
            _acc(grads, t.relation, dX[i, 1])
            _acc(grads, t.tail, dX[i, 2])
        token_grad = np.zeros_like(view.matrix)
        view.scatter(grads, token_grad)

        lr = self.learning_rate
        if adam is None:
            model.kernels -= lr * dK
            model.biases -= lr * dB
            model.out_weights -= lr * dU
            model.out_bias -= lr * du0
            view.matrix -= lr * token_grad
        else:
            adam.step("kernels", model.kernels, dK, lr)
            adam.step("biases", model.biases, dB, lr)
            adam.step("out_weights", model.out_weights, dU, lr)
            bias_box = np.array([model.out_bias])
            adam.step("out_bias", bias_box, np.array([du0]), lr)
            model.out_bias = float(bias_box[0])
            adam.step("embeddings", view.matrix, token_grad, lr)
        return loss

    def predict_proba(self, triples):
        """Triple likelihoods in (0, 1), one per input triple."""
        self._require_fitted()
        return self.model_.likelihood_many(list(triples))

    def decision_function(self, triples):
        return self.predict_proba(triples)

    def loss(self, positives, negatives):
        self._require_fitted()
        return bpr_likelihood_loss(self.model_, positives, negatives)

    def _require_fitted(self):
        if not hasattr(self, "model_"):
            raise NotFittedError("ConvTripleScorer is not fitted yet")


def gradcheck_setup(dim=8, n_kernels=4, kernel_width=3, batch=8, seed=0):
    """Seeded random model and paired triple batch for gradient checks.

    Parameters are drawn away from zero so the check does not sit on a
    ReLU kink, and mentions span one or two tokens so gradients flow
    through summed mention vectors as well.
    """
    rng = np.random.default_rng([seed, 97])
    vocab = [f"tok{i}" for i in range(24)]
    table = init_random(vocab, dim, seed)

    def mention():
        k = int(rng.integers(1, 3))
        return " ".join(vocab[int(rng.integers(0, len(vocab)))]
                        for _ in range(k))

    def triple():
        return Triple(mention(), mention(), mention())

    positives = [triple() for _ in range(batch)]
    negatives = [triple() for _ in range(batch)]
    model = ConvTripleModel(
        kernels=rng.normal(0.0, 0.3, (n_kernels, 3, kernel_width)),
        biases=rng.normal(0.0, 0.1, n_kernels),
        out_weights=rng.normal(0.0, 0.5, n_kernels),
        out_bias=float(rng.normal(0.0, 0.1)),
        table=table,
        seed=seed,
    )
    return model, positives, negatives


def triple_scores(scorer, triples):
    """Scores from a fitted estimator, a model, or a plain callable."""
    if hasattr(scorer, "decision_function"):
        return np.asarray(scorer.decision_function(list(triples)), dtype=float)
    if hasattr(scorer, "likelihood_many"):
        return np.asarray(scorer.likelihood_many(list(triples)), dtype=float)
    return np.array([float(scorer(t)) for t in triples])
