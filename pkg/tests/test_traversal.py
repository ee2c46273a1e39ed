"""Narratory traversal: pool construction, selection law, stack moves."""

from __future__ import annotations

import json
import random

import pytest

from modeltour.errors import TraversalError
from modeltour.foraging import build_skeleton, forage_functional_edges
from modeltour.model import parse_model
from modeltour.story import EdgeKind, RelationshipEdge
from modeltour.traversal import NarratoryTraversal, TraversalConfig


def _graph_from_types(types):
    return build_skeleton(parse_model(json.dumps({"types": types})))


@pytest.fixture
def leaf_inner_graph():
    # Root with one leaf child and one composite child.
    return _graph_from_types(
        [
            {"id": "root", "name": "Root"},
            {"id": "leafy", "name": "Leafy", "parent": "root"},
            {"id": "comp", "name": "Comp", "parent": "root"},
            {"id": "inner-leaf", "name": "InnerLeaf", "parent": "comp"},
        ]
    )


class TestInit:
    def test_initial_state(self, hiv_graph):
        walker = NarratoryTraversal(hiv_graph, TraversalConfig(seed=1))
        assert walker.stack == ["root"]
        assert walker.clock == 0
        assert set(walker.visited_times) == set(hiv_graph.nodes)
        assert all(t == 0 for t in walker.visited_times.values())

    def test_single_node_graph(self):
        graph = _graph_from_types([{"id": "only", "name": "Only"}])
        walker = NarratoryTraversal(graph, TraversalConfig(seed=1))
        assert walker.stack == ["only"]
        assert walker.options_pool() == []

    def test_same_seed_same_state(self, hiv_graph):
        a = NarratoryTraversal(hiv_graph, TraversalConfig(seed=5))
        b = NarratoryTraversal(hiv_graph, TraversalConfig(seed=5))
        assert [a.select_next() for _ in range(10)] == [b.select_next() for _ in range(10)]

    def test_invalid_priorities_rejected(self):
        with pytest.raises(ValueError):
            TraversalConfig(p_lower=0)


class TestOptionsPool:
    def test_capsid_pool_includes_parent_children_functional(self, hiv_graph):
        walker = NarratoryTraversal(hiv_graph, TraversalConfig(seed=1))
        walker.stack = ["root", "hiv", "capsid"]
        # parent, then children; rna is also a functional neighbor but deduped.
        assert walker.options_pool() == ["hiv", "rna", "rt"]

    def test_root_pool_children_only(self, hiv_graph):
        walker = NarratoryTraversal(hiv_graph, TraversalConfig(seed=1))
        assert walker.options_pool() == ["hiv", "plasma"]

    def test_isolated_leaf_pool_is_root(self):
        graph = _graph_from_types(
            [{"id": "root", "name": "Root"}, {"id": "leafy", "name": "Leafy", "parent": "root"}]
        )
        walker = NarratoryTraversal(graph, TraversalConfig(seed=1))
        walker.stack = ["root", "leafy"]
        assert walker.options_pool() == ["root"]

    def test_functional_neighbors_in_pool(self, hiv_graph):
        walker = NarratoryTraversal(hiv_graph, TraversalConfig(seed=1))
        walker.stack = ["root", "hiv", "capsid", "rna"]
        # rna: parent capsid (also a functional neighbor, deduped), plus the
        # enzyme whose extract mentions RNA.
        assert walker.options_pool() == ["capsid", "rt"]


class TestSelectNext:
    def test_least_recent_filter(self, leaf_inner_graph):
        walker = NarratoryTraversal(leaf_inner_graph, TraversalConfig(seed=3))
        walker.visited_times["comp"] = 3  # pool = {leafy t=0, comp t=3}
        assert walker.select_next() == "leafy"
        assert walker.visited_times["leafy"] == walker.clock > 0

    def test_selected_was_pool_minimum(self, hiv_graph):
        walker = NarratoryTraversal(hiv_graph, TraversalConfig(seed=11))
        for _ in range(200):
            pool = walker.options_pool()
            minimum = min(walker.visited_times[o] for o in pool)
            before = dict(walker.visited_times)
            nxt = walker.select_next()
            assert before[nxt] == minimum
            walker.advance(nxt)

    def test_priority_weighting_two_to_one(self, leaf_inner_graph):
        walker = NarratoryTraversal(leaf_inner_graph, TraversalConfig(seed=2025))
        draws = 100_000
        inner = 0
        for _ in range(draws):
            if walker.select_next() == "comp":
                inner += 1
            walker.visited_times["comp"] = 0
            walker.visited_times["leafy"] = 0
        assert 0.65 <= inner / draws <= 0.68

    def test_single_candidate(self):
        graph = _graph_from_types(
            [{"id": "root", "name": "Root"}, {"id": "leafy", "name": "Leafy", "parent": "root"}]
        )
        walker = NarratoryTraversal(graph, TraversalConfig(seed=1))
        assert walker.select_next() == "leafy"
        assert walker.visited_times["leafy"] == 1

    def test_equal_priorities_uniform(self, hiv_graph):
        from scipy.stats import chisquare

        walker = NarratoryTraversal(hiv_graph, TraversalConfig(seed=9, p_lower=1.0, p_higher=1.0))
        walker.stack = ["root", "hiv", "capsid"]
        counts: dict[str, int] = {}
        draws = 100_000
        for _ in range(draws):
            pick = walker.select_next()
            counts[pick] = counts.get(pick, 0) + 1
            walker.visited_times[pick] = 0
        assert chisquare(list(counts.values())).pvalue > 0.01

    def test_priority_override_respected(self, leaf_inner_graph):
        config = TraversalConfig(seed=77, priority_overrides={"leafy": 1000.0})
        walker = NarratoryTraversal(leaf_inner_graph, config)
        picks = []
        for _ in range(1000):
            picks.append(walker.select_next())
            walker.visited_times["comp"] = 0
            walker.visited_times["leafy"] = 0
        assert picks.count("leafy") > 950

    def test_rng_advanced_exactly_once(self, leaf_inner_graph):
        class CountingRandom(random.Random):
            calls = 0

            def random(self):
                CountingRandom.calls += 1
                return super().random()

        walker = NarratoryTraversal(
            leaf_inner_graph, TraversalConfig(seed=4), rng=CountingRandom(4)
        )
        for n in range(1, 6):
            walker.select_next()
            assert CountingRandom.calls == n

    def test_empty_pool_raises(self):
        graph = _graph_from_types([{"id": "only", "name": "Only"}])
        walker = NarratoryTraversal(graph, TraversalConfig(seed=1))
        with pytest.raises(TraversalError, match="empty"):
            walker.select_next()


class TestAdvance:
    def test_push_composite_child(self, hiv_graph):
        walker = NarratoryTraversal(hiv_graph, TraversalConfig(seed=1))
        walker.advance("hiv")
        assert walker.stack == ["root", "hiv"]

    def test_pop_on_parent_selection(self, hiv_graph):
        walker = NarratoryTraversal(hiv_graph, TraversalConfig(seed=1))
        walker.stack = ["root", "hiv"]
        walker.advance("root")
        assert walker.stack == ["root"]

    def test_leaf_leaves_stack(self, hiv_graph):
        walker = NarratoryTraversal(hiv_graph, TraversalConfig(seed=1))
        walker.stack = ["root", "hiv", "capsid"]
        walker.advance("rna")
        assert walker.stack == ["root", "hiv", "capsid"]

    def test_selection_outside_pool_rejected(self, hiv_graph):
        walker = NarratoryTraversal(hiv_graph, TraversalConfig(seed=1))
        with pytest.raises(TraversalError):
            walker.advance("rna")  # not reachable from the root directly

    def test_stack_stays_ancestor_chain_on_skeleton_graphs(self):
        rng = random.Random(31337)
        graph = _random_tree_graph(rng, 30)
        walker = NarratoryTraversal(graph, TraversalConfig(seed=8))
        for _ in range(500):
            nxt = walker.select_next()
            walker.advance(nxt)
            for lower, upper in zip(walker.stack, walker.stack[1:]):
                assert graph.skeleton_parent(upper) == lower

    def test_composite_functional_neighbor_pushed(self):
        graph = _graph_from_types(
            [
                {"id": "root", "name": "Root"},
                {"id": "a", "name": "A", "parent": "root"},
                {"id": "b", "name": "B", "parent": "root"},
                {"id": "b1", "name": "B1", "parent": "b"},
            ]
        )
        graph.edges.append(
            RelationshipEdge("a", "b", EdgeKind.FUNCTIONAL, "A touches B.", "a")
        )
        walker = NarratoryTraversal(graph, TraversalConfig(seed=1))
        walker.stack = ["root", "a"]
        walker.advance("b")  # composite functional neighbor: dive in
        assert walker.stack[-1] == "b"


def _random_tree_graph(rng: random.Random, n: int):
    types = [{"id": "t0", "name": "name0"}]
    for i in range(1, n):
        types.append({"id": f"t{i}", "name": f"name{i}", "parent": f"t{rng.randrange(i)}"})
    return _graph_from_types(types)


def test_coverage_on_random_trees():
    rng = random.Random(20260810)
    for trial in range(10):
        graph = _random_tree_graph(rng, 50)
        walker = NarratoryTraversal(graph, TraversalConfig(seed=trial))
        visited = {walker.current}
        for _ in range(1000):
            nxt = walker.select_next()
            visited.add(nxt)
            walker.advance(nxt)
        assert visited == set(graph.nodes)


def test_visit_sequence_deterministic(hiv_graph):
    def run(seed):
        walker = NarratoryTraversal(hiv_graph, TraversalConfig(seed=seed))
        sequence = []
        for _ in range(100):
            nxt = walker.select_next()
            sequence.append(nxt)
            walker.advance(nxt)
        return sequence

    assert run(42) == run(42)
    assert run(42) != run(43)


def test_frequency_ratio_matches_priorities(leaf_inner_graph):
    # One leaf and one inner candidate, both never visited.
    config = TraversalConfig(seed=314, p_lower=1.0, p_higher=2.0)
    walker = NarratoryTraversal(leaf_inner_graph, config)
    trials = 100_000
    inner = 0
    for _ in range(trials):
        if walker.select_next() == "comp":
            inner += 1
        walker.visited_times["comp"] = 0
        walker.visited_times["leafy"] = 0
    ratio = inner / (trials - inner)
    assert abs(ratio - 2.0) / 2.0 < 0.03
