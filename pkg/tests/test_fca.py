"""Tests for concept enumeration and lattice construction."""

import itertools
import random

import networkx as nx
import numpy as np
import pytest

from diffconcepts.core import QualifiedToken
from diffconcepts.encoder import FormalContext, Interval
from diffconcepts.errors import CapacityError, InvalidArgumentError
from diffconcepts.fca import (
    FormalConcept,
    concepts,
    derive_extent,
    derive_intent,
    lattice,
    render_extent,
    render_intent,
)
from tests.conftest import ENCODED_CONCEPTS, UNIT_CONCEPTS


def random_context(rng: random.Random, wide: bool = False) -> FormalContext:
    n_objects = rng.randint(0, 30 if wide else 8)
    n_attributes = rng.randint(0, 12 if wide else 7)
    incidence = np.array(
        [[rng.random() < 0.45 for _ in range(n_attributes)] for _ in range(n_objects)],
        dtype=bool,
    ).reshape(n_objects, n_attributes)
    return FormalContext(
        tuple(Interval(i, i + 1) for i in range(n_objects)),
        tuple(QualifiedToken.parse(f"m{j:02d}:=") for j in range(n_attributes)),
        incidence,
    )


def closure_oracle(context: FormalContext) -> set[tuple[frozenset, frozenset]]:
    """Concepts as the closures of every attribute subset."""
    n_attributes = len(context.attributes)
    subsets = np.array(
        list(itertools.product((0, 1), repeat=n_attributes)), dtype=int
    ).reshape(2**n_attributes, n_attributes)
    missing = (~context.incidence).astype(int)
    extents = (subsets @ missing.T) == 0
    intents = (extents.astype(int) @ missing) == 0
    return {
        (
            frozenset(np.flatnonzero(extent).tolist()),
            frozenset(np.flatnonzero(intent).tolist()),
        )
        for extent, intent in zip(extents, intents)
    }


def cover_oracle(found) -> set[tuple[int, int]]:
    """Hasse edges as the transitive reduction of strict extent inclusion."""
    order = nx.DiGraph()
    order.add_nodes_from(range(len(found)))
    order.add_edges_from(
        (i, j)
        for i, lower in enumerate(found)
        for j, upper in enumerate(found)
        if lower.extent < upper.extent
    )
    return set(nx.transitive_reduction(order).edges)


def intent_of(context, concept) -> set[str]:
    return set(render_intent(context, concept))


def by_intent(context, found, texts) -> FormalConcept:
    matches = [c for c in found if intent_of(context, c) == set(texts)]
    assert len(matches) == 1
    return matches[0]


class TestDerivation:
    def test_extent_of_joint_tokens(self, context):
        columns = [
            context.attribute_index[QualifiedToken.parse(t)] for t in ("a:=", "w:>")
        ]
        extent = derive_extent(context, columns)
        assert [context.objects[i] for i in sorted(extent)] == [
            Interval(0, 2),
            Interval(6, 9),
        ]

    def test_unit_context_extent(self, unit_context):
        columns = [
            unit_context.attribute_index[QualifiedToken.parse(t)]
            for t in ("a:=", "w:=")
        ]
        extent = derive_extent(unit_context, columns)
        assert [unit_context.objects[i] for i in sorted(extent)] == [
            Interval(9, 10),
            Interval(10, 11),
            Interval(15, 16),
        ]

    def test_empty_sets_derive_everything(self, context):
        assert derive_extent(context, []) == frozenset(range(21))
        assert derive_intent(context, []) == frozenset(range(12))

    def test_out_of_range_index(self, context):
        with pytest.raises(InvalidArgumentError, match="out of range"):
            derive_extent(context, [12])
        with pytest.raises(InvalidArgumentError, match="out of range"):
            derive_intent(context, [-1])

    def test_galois_connection(self, context):
        rng = random.Random(5)
        for _ in range(200):
            objects = rng.sample(range(21), rng.randint(0, 5))
            intent = derive_intent(context, objects)
            assert set(objects) <= derive_extent(context, intent)


class TestConcepts:
    def test_unit_context_has_ten_concepts(self, unit_context):
        found = concepts(unit_context)
        assert len(found) == 10
        assert render_intent(unit_context, found[0]) == ()
        assert len(found[0].extent) == 16
        assert len(found[-1].intent) == 4
        assert found[-1].extent == frozenset()

    def test_encoded_context_has_twenty_eight_concepts(self, context):
        assert len(concepts(context)) == 28

    def test_unit_context_concepts_in_order(self, unit_context):
        found = [
            (
                render_intent(unit_context, concept),
                [o.start for o in render_extent(unit_context, concept)],
            )
            for concept in concepts(unit_context)
        ]
        assert found == UNIT_CONCEPTS

    def test_encoded_context_concepts_in_order(self, context):
        found = [
            (
                render_intent(context, concept),
                [(o.start, o.end) for o in render_extent(context, concept)],
            )
            for concept in concepts(context)
        ]
        assert found == ENCODED_CONCEPTS

    def test_width_rise_then_rest(self, context):
        concept = by_intent(context, concepts(context), ["w:>="])
        assert [str(o) for o in render_extent(context, concept)] == [
            "[0,11]",
            "[0,15]",
            "[0,16]",
            "[2,11]",
            "[2,15]",
            "[2,16]",
            "[6,11]",
            "[6,15]",
            "[6,16]",
        ]

    def test_angle_rest_rise_rest(self, context):
        concept = by_intent(context, concepts(context), ["a:=>="])
        assert [str(o) for o in render_extent(context, concept)] == [
            "[0,9]",
            "[0,11]",
            "[6,16]",
            "[9,16]",
        ]

    def test_angle_rise_then_rest(self, context):
        concept = by_intent(context, concepts(context), ["a:>="])
        assert [str(o) for o in render_extent(context, concept)] == [
            "[2,9]",
            "[2,11]",
            "[11,16]",
        ]

    def test_order_is_deterministic(self, context):
        found = concepts(context)
        keys = [(-len(c.extent), render_intent(context, c)) for c in found]
        assert keys == sorted(keys)
        assert concepts(context) == found

    def test_every_concept_is_closed(self, context):
        for concept in concepts(context):
            assert derive_intent(context, concept.extent) == concept.intent
            assert derive_extent(context, concept.intent) == concept.extent

    def test_matches_closure_oracle(self):
        rng = random.Random(42)
        for run in range(200):
            context = random_context(rng, wide=run % 4 == 0)
            found = concepts(context)
            pairs = [(c.extent, c.intent) for c in found]
            assert len(pairs) == len(set(pairs))
            assert set(pairs) == closure_oracle(context)

    def test_empty_context(self):
        found = concepts(FormalContext.empty())
        assert found == [FormalConcept(frozenset(), frozenset())]

    def test_concept_cap(self, context):
        with pytest.raises(CapacityError, match="more than 27"):
            concepts(context, max_concepts=27)

    def test_cap_at_exact_count(self, context):
        assert len(concepts(context, max_concepts=28)) == 28

    def test_cap_from_environment(self, context, monkeypatch):
        monkeypatch.setenv("DIFFCONCEPTS_MAX_CONCEPTS", "5")
        with pytest.raises(CapacityError):
            concepts(context)


class TestLattice:
    def test_unit_context_covers(self, unit_context):
        ordered = lattice(unit_context, concepts(unit_context))
        assert len(ordered.covers) == 16
        assert ordered.top == 0
        assert ordered.bottom == 9
        assert len(ordered.lower_covers(ordered.top)) == 4
        assert len(ordered.upper_covers(ordered.bottom)) == 4

    def test_covers_match_brute_force(self):
        rng = random.Random(8)
        for run in range(100):
            context = random_context(rng, wide=run % 10 == 0)
            found = concepts(context)
            assert set(lattice(context, found).covers) == cover_oracle(found)

    def test_meet_and_join(self, context):
        found = concepts(context)
        ordered = lattice(context, found)
        for i in range(len(found)):
            for j in range(len(found)):
                meet, join = ordered.meet(i, j), ordered.join(i, j)
                assert found[meet].extent == found[i].extent & found[j].extent
                assert found[join].intent == found[i].intent & found[j].intent
                assert ordered.leq(meet, i) and ordered.leq(meet, j)
                assert ordered.leq(i, join) and ordered.leq(j, join)
                assert ordered.meet(i, j) == ordered.meet(j, i)
                assert ordered.join(i, ordered.meet(i, j)) == i

    def test_single_concept(self):
        ordered = lattice(FormalContext.empty(), concepts(FormalContext.empty()))
        assert len(ordered) == 1
        assert ordered.covers == frozenset()
        assert ordered.top == ordered.bottom == 0

    def test_rejects_unclosed_pairs(self, context):
        found = concepts(context)
        bogus = FormalConcept(frozenset({0}), frozenset())
        with pytest.raises(InvalidArgumentError, match="not a closed pair"):
            lattice(context, [*found, bogus])

    def test_rejects_incomplete_concept_list(self, context):
        found = concepts(context)
        missing = by_intent(context, found, ["a:=>="])
        with pytest.raises(InvalidArgumentError, match="every concept"):
            lattice(context, [c for c in found if c != missing])

    def test_rejects_missing_bottom(self, context):
        with pytest.raises(InvalidArgumentError, match="top and bottom"):
            lattice(context, concepts(context)[:-1])

    def test_rejects_duplicates(self, context):
        found = concepts(context)
        with pytest.raises(InvalidArgumentError, match="distinct"):
            lattice(context, [*found, found[0]])

    def test_rejects_empty(self, context):
        with pytest.raises(InvalidArgumentError):
            lattice(context, [])
