"""Story-graph foraging: skeleton, descriptions, and functional edges.

Step 1 turns the structural model hierarchy into a tree of type nodes.
Step 2 attaches descriptions from prioritized providers (local texts first,
then remote extracts; nodes left empty get a fallback marker).  Step 3
splits every gathered text into sentences, spots other nodes' names in
them, and records each spotting as a functional edge with the sentence as
evidence.
"""

from __future__ import annotations

import logging
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .model import StructuralModel
from .story import (
    SOURCE_PRIORITY,
    Description,
    EdgeKind,
    RelationshipEdge,
    SourceKind,
    StoryGraph,
    TypeNode,
)

logger = logging.getLogger(__name__)

_WORD_RE = re.compile(r"\w+")
_TERMINATORS = ".!?"


def build_skeleton(model: StructuralModel) -> StoryGraph:
    """Step 1: one node per type, one structural edge per parent link."""
    nodes: dict[str, TypeNode] = {}
    edges: list[RelationshipEdge] = []
    for t in model.types.values():
        nodes[t.id] = TypeNode(
            id=t.id,
            names=[t.name, *t.alt_names],
            descriptions=[Description(source=SourceKind.LOCAL, text=text)
                          for text in t.local_descriptions],
        )
    for t in model.types.values():
        if t.parent_id is not None:
            edges.append(RelationshipEdge(source=t.parent_id, target=t.id,
                                          kind=EdgeKind.STRUCTURAL))
    return StoryGraph(nodes=nodes, edges=edges, root_id=model.root_id)


@dataclass
class ForageStats:
    remote_hits: int = 0
    remote_misses: int = 0
    remote_errors: int = 0
    fallbacks: int = 0


def forage_descriptions(
    graph: StoryGraph,
    providers: list,
    concurrency: int = 4,
    lazy: bool = False,
) -> ForageStats:
    """Step 2: extend node descriptions from providers, in priority order.

    Providers run per node in the given order; nodes ending up with no text
    get a fallback marker.  With ``lazy`` set, nodes that already carry a
    local text skip the providers entirely.  Provider calls may overlap
    across nodes (bounded by ``concurrency``) but results are merged in
    node order, so the outcome is deterministic.
    """
    node_ids = list(graph.nodes)

    def gather(node_id: str) -> list[Description]:
        node = graph.nodes[node_id]
        if lazy and any(d.source is SourceKind.LOCAL and d.text for d in node.descriptions):
            return []
        collected: list[Description] = []
        for provider in providers:
            collected.extend(provider.describe(node))
        return collected

    if concurrency > 1 and len(node_ids) > 1:
        with ThreadPoolExecutor(max_workers=concurrency) as pool:
            gathered = list(pool.map(gather, node_ids))
    else:
        gathered = [gather(nid) for nid in node_ids]

    stats = ForageStats()
    for node_id, extra in zip(node_ids, gathered):
        node = graph.nodes[node_id]
        merged = node.descriptions + extra
        merged.sort(key=lambda d: SOURCE_PRIORITY[d.source])  # stable
        deduped: list[Description] = []
        seen: set[tuple[SourceKind, str]] = set()
        for d in merged:
            key = (d.source, d.text)
            if key not in seen:
                seen.add(key)
                deduped.append(d)
        if not deduped:
            deduped = [Description(source=SourceKind.FALLBACK)]
            stats.fallbacks += 1
        node.descriptions = deduped

    for provider in providers:
        provider_stats = getattr(provider, "stats", None)
        if provider_stats is not None:
            stats.remote_hits += provider_stats.hits
            stats.remote_misses += provider_stats.misses
            stats.remote_errors += provider_stats.errors
    return stats


def split_sentences(text: str) -> list[str]:
    """Rule-based sentence splitting.

    A '.', '!' or '?' ends a sentence when followed by whitespace and an
    uppercase letter or digit, or by the end of the text.  Concatenating
    the output reproduces the input up to whitespace.
    """
    sentences: list[str] = []
    start = 0
    i = 0
    n = len(text)
    while i < n:
        if text[i] in _TERMINATORS:
            j = i + 1
            k = j
            while k < n and text[k].isspace():
                k += 1
            if k >= n or (k > j and (text[k].isupper() or text[k].isdigit())):
                piece = text[start:j].strip()
                if piece:
                    sentences.append(piece)
                start = k
                i = k
                continue
        i += 1
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


def _tokens(text: str) -> list[str]:
    return [m.group(0).lower() for m in _WORD_RE.finditer(text)]


@dataclass
class KeywordIndex:
    """Maps normalized name token sequences to node ids; longest match wins."""

    entries: dict[tuple[str, ...], str] = field(default_factory=dict)
    max_len: int = 0

    @classmethod
    def from_graph(cls, graph: StoryGraph) -> "KeywordIndex":
        index = cls()
        for node in graph.nodes.values():
            for name in node.names:
                index.add(name, node.id)
        return index

    def add(self, name: str, node_id: str) -> None:
        key = tuple(_tokens(name))
        if not key:
            return
        if key in self.entries and self.entries[key] != node_id:
            logger.warning("keyword %r already maps to %r; keeping the first entry",
                           " ".join(key), self.entries[key])
            return
        self.entries.setdefault(key, node_id)
        self.max_len = max(self.max_len, len(key))


def detect_keywords(sentence: str, index: KeywordIndex) -> list[str]:
    """Node ids named in the sentence, in order of first occurrence.

    Matching is case-insensitive on whole words; multi-word names must
    appear as contiguous word runs; overlaps resolve longest-match-first;
    duplicates are dropped.
    """
    words = _tokens(sentence)
    found: dict[str, None] = {}
    i = 0
    while i < len(words):
        matched = 0
        for length in range(min(index.max_len, len(words) - i), 0, -1):
            node_id = index.entries.get(tuple(words[i:i + length]))
            if node_id is not None:
                found.setdefault(node_id)
                matched = length
                break
        i += matched if matched else 1
    return list(found)


def forage_functional_edges(graph: StoryGraph, index: KeywordIndex | None = None) -> int:
    """Step 3: add an edge owner -> mentioned for every keyword spotting.

    Scans each node's local and remote description texts sentence by
    sentence.  Self-mentions are ignored and identical (owner, target,
    sentence) triples are added once, which makes the step idempotent.
    Returns the number of edges added.
    """
    index = index or KeywordIndex.from_graph(graph)
    existing = {
        (e.source, e.target, e.evidence)
        for e in graph.edges
        if e.kind is EdgeKind.FUNCTIONAL
    }
    added = 0
    for node in graph.nodes.values():
        for description in node.descriptions:
            if description.source is SourceKind.FALLBACK or not description.text:
                continue
            for sentence in split_sentences(description.text):
                for target in detect_keywords(sentence, index):
                    if target == node.id:
                        continue
                    triple = (node.id, target, sentence)
                    if triple in existing:
                        continue
                    existing.add(triple)
                    graph.edges.append(
                        RelationshipEdge(
                            source=node.id,
                            target=target,
                            kind=EdgeKind.FUNCTIONAL,
                            evidence=sentence,
                            source_node=node.id,
                        )
                    )
                    added += 1
    return added


def forage(
    model: StructuralModel,
    providers: list,
    concurrency: int = 4,
    lazy: bool = False,
) -> tuple[StoryGraph, ForageStats]:
    """Run all three foraging steps over a structural model."""
    graph = build_skeleton(model)
    stats = forage_descriptions(graph, providers, concurrency=concurrency, lazy=lazy)
    forage_functional_edges(graph)
    return graph, stats
