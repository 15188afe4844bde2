"""Shared fixtures and toy-data builders."""

import numpy as np
import pytest

from kgfuse import EmbeddingTable, KnowledgeGraph, TagSchema, TaggedSentence, Triple


@pytest.fixture
def tiny_kg():
    return KnowledgeGraph.from_triples([
        Triple("alice", "knows", "bob"),
        Triple("bob", "knows", "carol"),
        Triple("carol", "works at", "acme corp"),
    ])


@pytest.fixture
def schema():
    return TagSchema(entity_types=("PER", "ORG"), trigger_types=("Hire", "Meet"))


def fixed_table(dim=4, **vectors):
    """Embedding table with hand-set token vectors (others fall back to OOV)."""
    table = EmbeddingTable(dim, oov_seed=123)
    for token, vec in vectors.items():
        table[token] = np.asarray(vec, dtype=float)
    return table


def grid_kg(width=10, height=5, seed=42, dim=16, sigma=0.05,
            n_keep=200, n_held=40):
    """Planted translational toy: a grid whose edges are relation steps.

    Entity vectors embed the 2-D grid positions through a fixed
    orthonormal map plus Gaussian noise, and each relation's vector is
    the embedded step, so every edge satisfies
    e_head + e_relation = e_tail up to noise of scale sigma.

    Returns (table, train kg, full kg, held-out triples).
    """
    steps = {
        "step east": (1, 0), "step north": (0, 1), "step west": (-1, 0),
        "step south": (0, -1), "step diag": (1, 1),
    }

    def name(x, y):
        return f"node{x}y{y}"

    rng = np.random.default_rng(seed)
    basis = np.linalg.qr(rng.normal(size=(dim, 2)))[0]
    table = EmbeddingTable(dim, oov_seed=seed)
    for x in range(width):
        for y in range(height):
            table[name(x, y)] = (basis @ np.array([x, y], float)
                                 + rng.normal(0, sigma, dim))
    table["step"] = np.zeros(dim)
    for rel, (dx, dy) in steps.items():
        table[rel.split()[1]] = (basis @ np.array([dx, dy], float)
                                 + rng.normal(0, sigma, dim))

    triples = []
    for rel, (dx, dy) in steps.items():
        for x in range(width):
            for y in range(height):
                nx, ny = x + dx, y + dy
                if 0 <= nx < width and 0 <= ny < height:
                    triples.append(Triple(name(x, y), rel, name(nx, ny)))
    drop = set(rng.choice(len(triples), size=len(triples) - n_keep,
                          replace=False))
    triples = [t for i, t in enumerate(triples) if i not in drop]
    held_idx = set(rng.choice(n_keep, size=n_held, replace=False))
    held = [t for i, t in enumerate(triples) if i in held_idx]
    train = [t for i, t in enumerate(triples) if i not in held_idx]
    return table, KnowledgeGraph.from_triples(train), \
        KnowledgeGraph.from_triples(triples), held


_NAMES = ["anna", "ben", "cora", "dev", "elif", "femi", "gita", "hugo",
          "ines", "jia", "kofi", "lena", "mateo", "nia", "omar", "pia",
          "quinn", "rosa", "sam", "tara"]
_VERBS = ["hired", "fired", "praised", "visited", "sued"]


def synthetic_corpus(n_sentences=200, seed=0):
    """Sentences of the shape `name VERB name`, with occasional filler.

    Every verb doubles as a relation mention in `seed_kg`, so extracted
    candidates can align onto the prior graph by mention similarity.
    """
    rng = np.random.default_rng([seed, 3])
    schema = TagSchema(entity_types=("PER",), trigger_types=("Act",))
    sentences = []
    for i in range(n_sentences):
        if i % 10 == 9:
            sentences.append(TaggedSentence(
                ("the", "sky", "stays", "blue"), ("O", "O", "O", "O")))
            continue
        a = _NAMES[rng.integers(0, len(_NAMES))]
        b = _NAMES[rng.integers(0, len(_NAMES))]
        while b == a:
            b = _NAMES[rng.integers(0, len(_NAMES))]
        verb = _VERBS[rng.integers(0, len(_VERBS))]
        sentences.append(TaggedSentence(
            (a, verb, b), ("B-PER", "B-TRG:Act", "B-PER")))
    return schema, sentences


def seed_kg(n_triples=50, seed=0):
    """Prior graph over the corpus names, one relation per corpus verb."""
    rng = np.random.default_rng([seed, 4])
    triples = []
    seen = set()
    while len(triples) < n_triples:
        a = _NAMES[rng.integers(0, len(_NAMES))]
        b = _NAMES[rng.integers(0, len(_NAMES))]
        if a == b:
            continue
        rel = _VERBS[rng.integers(0, len(_VERBS))]
        if (a, rel, b) in seen:
            continue
        seen.add((a, rel, b))
        triples.append(Triple(a, rel, b))
    return KnowledgeGraph.from_triples(triples)
