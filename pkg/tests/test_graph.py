import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kgfuse import KnowledgeGraph, ParseError, Triple, load_triples, save_triples


def test_triple_trims_whitespace():
    t = Triple("  alice ", " knows", "bob  ")
    assert t.as_tuple() == ("alice", "knows", "bob")


@pytest.mark.parametrize("bad", ["", "   ", "a\tb"])
def test_triple_rejects_bad_mentions(bad):
    with pytest.raises(ValueError):
        Triple(bad, "r", "x")
    with pytest.raises(ValueError):
        Triple("h", bad, "x")
    with pytest.raises(ValueError):
        Triple("h", "r", bad)


class TestKnowledgeGraph:
    def test_interning_order_and_dedup(self):
        kg = KnowledgeGraph.from_triples([
            Triple("b", "r", "a"),
            Triple("a", "s", "b"),
            Triple("b", "r", "a"),  # duplicate collapses
        ])
        assert len(kg) == 2
        assert kg.entities == ("b", "a")
        assert kg.relations == ("r", "s")

    def test_contains_is_directional(self, tiny_kg):
        assert Triple("alice", "knows", "bob") in tiny_kg
        assert Triple("bob", "knows", "alice") not in tiny_kg
        assert not tiny_kg.contains(Triple("alice", "knows", "nobody"))

    def test_merge_keeps_existing_ids_valid(self, tiny_kg):
        merged = tiny_kg.merge([Triple("dave", "knows", "alice")])
        assert len(merged) == 4
        assert merged.entities[: tiny_kg.n_entities] == tiny_kg.entities
        assert merged.relations[: tiny_kg.n_relations] == tiny_kg.relations
        # the receiver is untouched
        assert len(tiny_kg) == 3

    def test_merge_empty_delta_returns_self(self, tiny_kg):
        assert tiny_kg.merge([]) is tiny_kg

    def test_merge_ignores_known_triples(self, tiny_kg):
        merged = tiny_kg.merge([Triple("alice", "knows", "bob")])
        assert len(merged) == 3

    def test_entity_pairs(self, tiny_kg):
        assert tiny_kg.entity_pairs() == {
            ("alice", "bob"), ("bob", "carol"), ("carol", "acme corp"),
        }

    def test_triples_of_relation(self, tiny_kg):
        assert tiny_kg.triples_of_relation("knows") == [
            ("alice", "bob"), ("bob", "carol"),
        ]
        assert tiny_kg.triples_of_relation("nope") == []

    def test_iter_triples_round_trips(self, tiny_kg):
        again = KnowledgeGraph.from_triples(tiny_kg.iter_triples())
        assert again == tiny_kg


class TestTripleFiles:
    def test_load_skips_comments_and_blanks(self, tmp_path):
        p = tmp_path / "kg.tsv"
        p.write_text("# prior facts\n\nalice\tknows\tbob\n\n# more\nbob\tknows\tcarol\n")
        kg = load_triples(p)
        assert len(kg) == 2

    def test_load_reports_line_numbers(self, tmp_path):
        p = tmp_path / "kg.tsv"
        p.write_text("alice\tknows\tbob\nbroken line\n")
        with pytest.raises(ParseError) as err:
            load_triples(p)
        assert err.value.line == 2

    def test_load_rejects_wrong_arity(self, tmp_path):
        p = tmp_path / "kg.tsv"
        p.write_text("a\tb\tc\td\n")
        with pytest.raises(ParseError):
            load_triples(p)

    def test_save_load_round_trip(self, tiny_kg, tmp_path):
        p = tmp_path / "out.tsv"
        save_triples(tiny_kg, p)
        assert load_triples(p) == tiny_kg


_mention = st.text(
    alphabet=st.characters(whitelist_categories=("Ll", "Lu", "Nd")),
    min_size=1, max_size=8,
)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(_mention, _mention, _mention), min_size=1, max_size=20))
def test_file_round_trip_property(tmp_path_factory, rows):
    kg = KnowledgeGraph.from_triples(Triple(*row) for row in rows)
    path = tmp_path_factory.mktemp("rt") / "kg.tsv"
    save_triples(kg, path)
    assert load_triples(path) == kg
