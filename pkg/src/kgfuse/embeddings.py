"""Token and mention vector representations.

Entity and relation mentions are represented by the component-wise sum of
their token vectors, so a single table serves both sides of the system.
Unseen tokens receive a deterministic vector derived from the token text
and the table's out-of-vocabulary seed, which keeps every run repeatable
on open corpora.
"""

import hashlib
import warnings

import numpy as np

from .errors import ParseError

_WARN_DUPLICATE = "duplicate token {token!r} at line {line}; last row wins"


def _bound(dim):
    # Uniform init range, matching the classic embedding heuristic 6/sqrt(dim).
    return 6.0 / np.sqrt(dim)


def _token_digest(token):
    digest = hashlib.sha256(token.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


class EmbeddingTable:
    """Mutable token -> R^dim map with deterministic OOV handling."""

    def __init__(self, dim, vectors=None, oov_seed=0):
        if dim < 1:
            raise ValueError(f"dim must be >= 1, got {dim}")
        self.dim = int(dim)
        self.vectors = {}
        self.oov_seed = int(oov_seed)
        if vectors:
            for token, vec in vectors.items():
                self[token] = vec

    def __setitem__(self, token, vec):
        arr = np.asarray(vec, dtype=float)
        if arr.shape != (self.dim,):
            raise ValueError(
                f"vector for {token!r} has shape {arr.shape}, expected ({self.dim},)"
            )
        self.vectors[token] = arr

    def __contains__(self, token):
        return token in self.vectors

    def __len__(self):
        return len(self.vectors)

    def oov_vector(self, token):
        """Deterministic vector for an unseen token, never stored."""
        rng = np.random.default_rng([self.oov_seed, _token_digest(token)])
        b = _bound(self.dim)
        return rng.uniform(-b, b, self.dim)

    def lookup(self, token):
        """Vector for a token; unseen tokens get their OOV vector."""
        vec = self.vectors.get(token)
        if vec is None:
            vec = self.oov_vector(token)
        return vec

    def ensure(self, tokens):
        """Materialize OOV vectors into the table so training can update them."""
        for token in tokens:
            if token not in self.vectors:
                self.vectors[token] = self.oov_vector(token)

    def tokens(self):
        return list(self.vectors)


def tokenize_mention(mention):
    """Lowercased whitespace tokens used for table lookups.

    The stored mention string itself is never altered; lowercasing only
    applies to the lookup key because pretrained token files are
    conventionally lowercase.
    """
    tokens = mention.lower().split()
    if not tokens:
        raise ValueError(f"mention is empty or all whitespace: {mention!r}")
    return tokens


def mention_vector(table, mention, normalize=False):
    """Component-wise sum of the mention's token vectors.

    With normalize=True the sum is divided by the token count, turning the
    representation into a plain average.
    """
    tokens = tokenize_mention(mention)
    out = np.zeros(table.dim)
    for token in tokens:
        out += table.lookup(token)
    if normalize:
        out /= len(tokens)
    return out


def init_random(vocab, dim, seed):
    """Seeded uniform table over `vocab` (order-sensitive, reproducible).

    Components are drawn from [-6/sqrt(dim), +6/sqrt(dim)]; the same
    (vocab order, dim, seed) always yields a bit-identical table.
    """
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    rng = np.random.default_rng(seed)
    b = _bound(dim)
    table = EmbeddingTable(dim, oov_seed=seed)
    for token in vocab:
        table[token] = rng.uniform(-b, b, dim)
    return table


def load_pretrained(path, dim, oov_seed=0):
    """Parse a space-separated embedding file into an EmbeddingTable.

    Rows are `token v1 ... v_dim`. A first line with exactly two integer
    fields is treated as an `N D` header; D must equal `dim` (N is not
    relied upon). Duplicate token rows keep the last occurrence and emit
    a warning.
    """
    table = EmbeddingTable(dim, oov_seed=oov_seed)
    with open(path, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            fields = raw.split()
            if not fields:
                continue
            if lineno == 1 and len(fields) == 2 and _all_ints(fields):
                header_dim = int(fields[1])
                if header_dim != dim:
                    raise ParseError(
                        path, lineno,
                        f"header dimension {header_dim} does not match expected {dim}",
                    )
                continue
            if len(fields) != dim + 1:
                raise ParseError(
                    path, lineno,
                    f"expected token plus {dim} values, got {len(fields)} fields",
                )
            token = fields[0]
            try:
                vec = np.array([float(x) for x in fields[1:]])
            except ValueError as exc:
                raise ParseError(path, lineno, f"non-numeric component: {exc}") from exc
            if token in table:
                warnings.warn(_WARN_DUPLICATE.format(token=token, line=lineno))
            table[token] = vec
    return table


def _all_ints(fields):
    try:
        for f in fields:
            int(f)
    except ValueError:
        return False
    return True
