"""Narratory traversal: stack + options pool with least-recently-visited picks.

The stack top is the current node; the pool holds its skeleton parent,
skeleton children, and functional neighbors.  Selection keeps only the
least recently visited pool members and draws among them with weights from
a two-level priority (inner nodes over leaves), optionally overridden per
node.  The walk is engagement-driven rather than systematic, but the
least-recent filter still covers the whole graph over time.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .errors import TraversalError
from .story import StoryGraph


@dataclass
class TraversalConfig:
    p_lower: float = 1.0
    p_higher: float = 2.0
    seed: int = 0
    priority_overrides: dict[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.p_lower <= 0 or self.p_higher <= 0:
            raise ValueError("priorities must be positive")


class NarratoryTraversal:
    """Stateful walk over one story graph; owned by a single synthesis run."""

    def __init__(self, graph: StoryGraph, config: TraversalConfig,
                 rng: random.Random | None = None):
        self.graph = graph
        self.config = config
        self.stack: list[str] = [graph.root_id]
        self.visited_times: dict[str, int] = {nid: 0 for nid in graph.nodes}
        self.clock: int = 0
        self.rng = rng if rng is not None else random.Random(config.seed)

    @property
    def current(self) -> str:
        return self.stack[-1]

    def priority(self, node_id: str) -> float:
        override = self.config.priority_overrides.get(node_id)
        if override is not None:
            return override
        return self.config.p_lower if self.graph.is_leaf(node_id) else self.config.p_higher

    def options_pool(self) -> list[str]:
        """Parent, children, then functional neighbors of the stack top."""
        top = self.current
        pool: dict[str, None] = {}
        parent = self.graph.skeleton_parent(top)
        if parent is not None:
            pool.setdefault(parent)
        for child in self.graph.skeleton_children(top):
            pool.setdefault(child)
        for neighbor in self.graph.functional_neighbors(top):
            pool.setdefault(neighbor)
        pool.pop(top, None)
        return list(pool)

    def select_next(self) -> str:
        """Weighted draw among the least recently visited pool members.

        Advances the generator exactly once per call.  The winner's visit
        time is stamped after the clock ticks, so 0 keeps meaning "never".
        """
        pool = self.options_pool()
        if not pool:
            raise TraversalError(f"options pool of {self.current!r} is empty")
        minimum = min(self.visited_times[o] for o in pool)
        candidates = [o for o in pool if self.visited_times[o] == minimum]
        priority_range = sum(self.priority(c) for c in candidates)
        # Uniform in (0, priority_range]; half-open on the low side.
        rand = (1.0 - self.rng.random()) * priority_range
        cumulative = 0.0
        chosen = candidates[-1]
        for candidate in candidates:
            upper = cumulative + self.priority(candidate)
            if cumulative < rand <= upper:
                chosen = candidate
                break
            cumulative = upper
        self.clock += 1
        self.visited_times[chosen] = self.clock
        return chosen

    def advance(self, selected: str) -> None:
        """Update the stack for a selection: pop on parent, push composites.

        Leaf selections leave the stack untouched.  The selection must come
        from the current options pool.
        """
        pool = self.options_pool()
        if selected not in pool:
            raise TraversalError(f"{selected!r} is not in the current options pool")
        top = self.current
        if self.graph.skeleton_parent(top) == selected:
            self.stack.pop()
        elif not self.graph.is_leaf(selected):
            self.stack.append(selected)
