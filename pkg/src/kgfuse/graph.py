"""Knowledge-graph data model, triple-file ingestion and set algebra.

A graph is an immutable value: entity and relation mentions are interned
to dense 0-based ids in first-appearance order, triples are stored as id
tuples in insertion order with a frozen set alongside for membership
checks. All mutation-like operations return a new graph.
"""

from dataclasses import dataclass, field

from .errors import ParseError


def _clean_mention(value, what):
    """Trim surrounding whitespace; reject empty strings and tabs."""
    text = value.strip()
    if not text:
        raise ValueError(f"{what} mention must be non-empty")
    if "\t" in text:
        raise ValueError(f"{what} mention must not contain tab characters: {value!r}")
    return text


@dataclass(frozen=True)
class Triple:
    """A (head, relation, tail) fact over entity and relation mentions.

    Mentions are trimmed on construction; identity is exact-string on the
    trimmed mentions, with no case folding.
    """

    head: str
    relation: str
    tail: str

    def __post_init__(self):
        object.__setattr__(self, "head", _clean_mention(self.head, "head"))
        object.__setattr__(self, "relation", _clean_mention(self.relation, "relation"))
        object.__setattr__(self, "tail", _clean_mention(self.tail, "tail"))

    def as_tuple(self):
        return (self.head, self.relation, self.tail)


@dataclass(frozen=True)
class KnowledgeGraph:
    """Immutable triple store with interned entity/relation ids."""

    entities: tuple = ()
    relations: tuple = ()
    triples: tuple = ()  # (head_id, relation_id, tail_id) in insertion order
    _entity_ids: dict = field(default_factory=dict, repr=False, compare=False)
    _relation_ids: dict = field(default_factory=dict, repr=False, compare=False)
    _triple_set: frozenset = field(default_factory=frozenset, repr=False, compare=False)

    @classmethod
    def from_triples(cls, triples):
        """Build a graph from an iterable of Triple, deduplicating."""
        entity_ids, relation_ids = {}, {}
        ordered, seen = [], set()
        for t in triples:
            if not isinstance(t, Triple):
                t = Triple(*t)
            h = entity_ids.setdefault(t.head, len(entity_ids))
            r = relation_ids.setdefault(t.relation, len(relation_ids))
            j = entity_ids.setdefault(t.tail, len(entity_ids))
            key = (h, r, j)
            if key not in seen:
                seen.add(key)
                ordered.append(key)
        return cls(
            entities=tuple(entity_ids),
            relations=tuple(relation_ids),
            triples=tuple(ordered),
            _entity_ids=entity_ids,
            _relation_ids=relation_ids,
            _triple_set=frozenset(ordered),
        )

    def __len__(self):
        return len(self.triples)

    @property
    def n_entities(self):
        return len(self.entities)

    @property
    def n_relations(self):
        return len(self.relations)

    def iter_triples(self):
        """Yield mention-level Triple values in interning order."""
        for h, r, j in self.triples:
            yield Triple(self.entities[h], self.relations[r], self.entities[j])

    def contains(self, triple):
        """Membership by mention equality; direction matters."""
        if not isinstance(triple, Triple):
            triple = Triple(*triple)
        h = self._entity_ids.get(triple.head)
        r = self._relation_ids.get(triple.relation)
        j = self._entity_ids.get(triple.tail)
        if h is None or r is None or j is None:
            return False
        return (h, r, j) in self._triple_set

    def __contains__(self, triple):
        return self.contains(triple)

    def merge(self, delta):
        """Return a new graph whose triples are the union with `delta`.

        New mentions are interned after the existing ones so ids of the
        receiver stay valid in the result; the receiver is unmodified.
        """
        delta = list(delta)
        if not delta:
            return self
        merged = list(self.iter_triples())
        merged.extend(t if isinstance(t, Triple) else Triple(*t) for t in delta)
        return KnowledgeGraph.from_triples(merged)

    def entity_pairs(self):
        """The set of ordered (head, tail) mention pairs over all triples."""
        return {(self.entities[h], self.entities[j]) for h, r, j in self.triples}

    def triples_of_relation(self, relation):
        """All (head, tail) mention pairs carried by `relation`, in order."""
        rid = self._relation_ids.get(relation)
        if rid is None:
            return []
        return [
            (self.entities[h], self.entities[j])
            for h, r, j in self.triples
            if r == rid
        ]


def load_triples(path):
    """Parse a tab-separated triple file into a KnowledgeGraph.

    One `head<TAB>relation<TAB>tail` fact per line; lines starting with
    `#` and blank lines are skipped; duplicate facts collapse.
    """
    triples = []
    with open(path, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 3:
                raise ParseError(
                    path, lineno, f"expected 3 tab-separated fields, got {len(fields)}"
                )
            try:
                triples.append(Triple(*fields))
            except ValueError as exc:
                raise ParseError(path, lineno, str(exc)) from exc
    return KnowledgeGraph.from_triples(triples)


def save_triples(kg, path):
    """Write a graph in the triple-file format (one fact per line)."""
    with open(path, "w", encoding="utf-8") as handle:
        for t in kg.iter_triples():
            handle.write(f"{t.head}\t{t.relation}\t{t.tail}\n")


def merge(kg, delta):
    """Functional alias for KnowledgeGraph.merge."""
    return kg.merge(delta)


def contains(kg, triple):
    return kg.contains(triple)


def entity_pairs(kg):
    return kg.entity_pairs()
