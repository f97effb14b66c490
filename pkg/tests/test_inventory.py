import pytest

from capsal.errors import IntegrityError
from capsal.inventory import (
    SynsetInventory,
    SynsetRole,
    Thresholds,
    count_instantiations,
    select_inventory,
)

# 10 mappings across the animal and artifact branches; subtree tallies
# below were enumerated by hand on the fixture tree before implementation.
TEN_MAPPINGS = (
    ["squirrel.n.01"] * 3
    + ["rodent.n.01"] * 2
    + ["mammal.n.01"]
    + ["camera.n.01"] * 2
    + ["shirt.n.01"]
    + ["person.n.01"]
)
HAND_TRACED_SUBTREE = {
    "squirrel.n.01": 3,
    "rodent.n.01": 5,
    "placental.n.01": 5,
    "mammal.n.01": 6,
    "vertebrate.n.01": 6,
    "chordate.n.01": 6,
    "animal.n.01": 6,
    "person.n.01": 1,
    "organism.n.01": 7,
    "causal_agent.n.01": 1,
    "living_thing.n.01": 7,
    "camera.n.01": 2,
    "electronic_equipment.n.01": 2,
    "instrumentality.n.01": 2,
    "shirt.n.01": 1,
    "clothing.n.01": 1,
    "artifact.n.01": 3,
    "whole.n.01": 10,
    "object.n.01": 10,
    "physical_entity.n.01": 10,
    "entity.n.01": 10,
}


def mappings_for(tree, keys):
    return [(key.split(".")[0], tree.resolve(key)) for key in keys]


class TestCounting:
    def test_closure_counting(self, mini_tree):
        counts = count_instantiations(
            mini_tree, mappings_for(mini_tree, ["squirrel.n.01"] * 3)
        )
        assert counts.subtree[mini_tree.resolve("animal.n.01")] >= 3

    def test_empty_stream(self, mini_tree):
        counts = count_instantiations(mini_tree, [])
        assert not counts.direct and not counts.subtree

    def test_hand_traced_fixture(self, mini_tree):
        counts = count_instantiations(mini_tree, mappings_for(mini_tree, TEN_MAPPINGS))
        got = {sid.lemma_key: n for sid, n in counts.subtree.items()}
        assert got == HAND_TRACED_SUBTREE
        assert counts.direct[mini_tree.resolve("squirrel.n.01")] == 3

    def test_unknown_id_errors(self, mini_tree):
        from capsal.wordnet.tree import SynsetId

        with pytest.raises(IntegrityError):
            count_instantiations(mini_tree, [("x", SynsetId("dragon.n.01", 999))])


class TestSelection:
    def test_animal_squirrel_path(self, edited_tree):
        counts = count_instantiations(
            edited_tree, mappings_for(edited_tree, ["squirrel.n.01"] * 3)
        )
        inv = select_inventory(
            edited_tree,
            counts,
            ["animal.n.01"],
            Thresholds(root_min_count=3, explicit_min_count=2),
        )
        assert {s.lemma_key for s in inv.with_role(SynsetRole.ROOT)} == {"animal.n.01"}
        assert {s.lemma_key for s in inv.with_role(SynsetRole.EXPLICIT)} == {
            "squirrel.n.01"
        }
        assert {s.lemma_key for s in inv.with_role(SynsetRole.IMPLICIT)} == {
            "chordate.n.01",
            "vertebrate.n.01",
            "mammal.n.01",
            "placental.n.01",
            "rodent.n.01",
        }

    def test_below_threshold_empty(self, edited_tree):
        counts = count_instantiations(
            edited_tree, mappings_for(edited_tree, ["squirrel.n.01"] * 3)
        )
        inv = select_inventory(
            edited_tree,
            counts,
            ["animal.n.01"],
            Thresholds(root_min_count=100, explicit_min_count=100),
        )
        assert len(inv) == 0

    def test_qualifying_ancestor_excludes_candidate(self, edited_tree):
        counts = count_instantiations(
            edited_tree, mappings_for(edited_tree, ["squirrel.n.01"] * 5)
        )
        inv = select_inventory(
            edited_tree,
            counts,
            ["animal.n.01", "vertebrate.n.01"],
            Thresholds(root_min_count=3, explicit_min_count=3),
        )
        assert {s.lemma_key for s in inv.roots} == {"animal.n.01"}

    def test_missing_candidate_errors(self, edited_tree):
        counts = count_instantiations(edited_tree, [])
        with pytest.raises(IntegrityError):
            select_inventory(edited_tree, counts, ["dragon.n.01"])

    def test_role_partition_and_path_closure(self, edited_tree):
        counts = count_instantiations(
            edited_tree,
            mappings_for(
                edited_tree,
                ["squirrel.n.01"] * 3 + ["camera.n.01"] * 3 + ["person.n.01"] * 3,
            ),
        )
        inv = select_inventory(
            edited_tree,
            counts,
            ["animal.n.01", "electronic_equipment.n.01", "person.n.01"],
            Thresholds(root_min_count=3, explicit_min_count=2),
        )
        roots = inv.with_role(SynsetRole.ROOT)
        explicit = inv.with_role(SynsetRole.EXPLICIT)
        implicit = inv.with_role(SynsetRole.IMPLICIT)
        assert len(inv) == len(roots) + len(explicit) + len(implicit)
        assert not (roots & explicit) and not (roots & implicit)
        for sid in explicit | implicit:
            root = edited_tree.root_of(sid, inv.roots)
            assert root in roots
            for node in edited_tree.path_to_ancestor(sid, root):
                assert node in inv.entries

    def test_monotonic_in_explicit_threshold(self, edited_tree):
        counts = count_instantiations(
            edited_tree,
            mappings_for(
                edited_tree, ["squirrel.n.01"] * 4 + ["snake.n.01"] * 2
            ),
        )
        low = select_inventory(
            edited_tree, counts, ["animal.n.01"], Thresholds(3, 2)
        )
        high = select_inventory(
            edited_tree, counts, ["animal.n.01"], Thresholds(3, 4)
        )
        assert set(high.entries) <= set(low.entries)

    def test_save_load_round_trip(self, edited_tree, tmp_path):
        counts = count_instantiations(
            edited_tree, mappings_for(edited_tree, ["squirrel.n.01"] * 3)
        )
        inv = select_inventory(edited_tree, counts, ["animal.n.01"], Thresholds(3, 2))
        path = tmp_path / "inventory.tsv"
        inv.save(path)
        loaded = SynsetInventory.load(path, edited_tree)
        assert loaded.entries == inv.entries
        assert loaded.roots == inv.roots
