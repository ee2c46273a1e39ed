"""Story graph: type nodes plus structural and functional relationship edges.

The structural edges (parent -> child) form a rooted tree, the "skeleton".
Functional edges are unconstrained and may duplicate endpoints, which makes
the graph a multigraph.  Graphs serialize to a UTF-8 JSON document:

    {
      "root":  "<node id>",
      "nodes": [{"id", "names", "descriptions": [...]}, ...],
      "edges": [{"from", "to", "kind", "evidence"?, "source_node"?}, ...]
    }
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum

from .errors import ParseError, ValidationError


class SourceKind(Enum):
    LOCAL = "local"
    REMOTE = "remote"
    FALLBACK = "fallback"


# Lower rank = shown first.
SOURCE_PRIORITY = {SourceKind.LOCAL: 0, SourceKind.REMOTE: 1, SourceKind.FALLBACK: 2}


@dataclass(frozen=True)
class Description:
    """One description attached to a node; Fallback entries carry no text."""

    source: SourceKind
    text: str = ""
    repository: str | None = None
    url: str | None = None
    language: str | None = None


@dataclass
class TypeNode:
    id: str
    names: list[str]
    descriptions: list[Description] = field(default_factory=list)

    @property
    def display_name(self) -> str:
        return self.names[0]


class EdgeKind(Enum):
    STRUCTURAL = "structural"
    FUNCTIONAL = "functional"


@dataclass(frozen=True)
class RelationshipEdge:
    """Edge of the story graph.

    Functional edges record the sentence that evidenced them and the node
    whose description contained that sentence.
    """

    source: str
    target: str
    kind: EdgeKind
    evidence: str = ""
    source_node: str = ""


@dataclass
class StoryGraph:
    nodes: dict[str, TypeNode]
    edges: list[RelationshipEdge]
    root_id: str

    def _check_node(self, node_id: str) -> None:
        if node_id not in self.nodes:
            raise ValidationError(f"unknown story node {node_id!r}")

    def skeleton_children(self, node_id: str) -> list[str]:
        """Targets of the node's outgoing structural edges, insertion order."""
        self._check_node(node_id)
        return [
            e.target
            for e in self.edges
            if e.kind is EdgeKind.STRUCTURAL and e.source == node_id
        ]

    def skeleton_parent(self, node_id: str) -> str | None:
        self._check_node(node_id)
        for e in self.edges:
            if e.kind is EdgeKind.STRUCTURAL and e.target == node_id:
                return e.source
        return None

    def is_leaf(self, node_id: str) -> bool:
        return not self.skeleton_children(node_id)

    def functional_neighbors(self, node_id: str) -> list[str]:
        """Nodes linked by a functional edge in either direction, deduplicated."""
        self._check_node(node_id)
        seen: dict[str, None] = {}
        for e in self.edges:
            if e.kind is not EdgeKind.FUNCTIONAL:
                continue
            if e.source == node_id:
                seen.setdefault(e.target)
            elif e.target == node_id:
                seen.setdefault(e.source)
        return list(seen)

    def structural_edge_count(self) -> int:
        return sum(1 for e in self.edges if e.kind is EdgeKind.STRUCTURAL)

    def functional_edges(self) -> list[RelationshipEdge]:
        return [e for e in self.edges if e.kind is EdgeKind.FUNCTIONAL]

    def validate(self) -> None:
        """Check the skeleton is a tree rooted at root_id and edges resolve."""
        self._check_node(self.root_id)
        for e in self.edges:
            self._check_node(e.source)
            self._check_node(e.target)
            if e.kind is EdgeKind.STRUCTURAL and e.source == e.target:
                raise ValidationError(f"structural self-loop on {e.source!r}")
        parents: dict[str, str] = {}
        for e in self.edges:
            if e.kind is not EdgeKind.STRUCTURAL:
                continue
            if e.target in parents:
                raise ValidationError(f"node {e.target!r} has multiple structural parents")
            parents[e.target] = e.source
        if self.root_id in parents:
            raise ValidationError("root has a structural parent")
        # Reachability from the root doubles as the acyclicity check.
        reached = {self.root_id}
        frontier = [self.root_id]
        while frontier:
            nid = frontier.pop()
            for child in self.skeleton_children(nid):
                if child in reached:
                    raise ValidationError(f"structural edges revisit {child!r}")
                reached.add(child)
                frontier.append(child)
        missing = set(self.nodes) - reached
        if missing:
            raise ValidationError(
                "nodes unreachable from root via structural edges: " + ", ".join(sorted(missing))
            )


def _description_to_dict(d: Description) -> dict:
    out: dict = {"source": d.source.value}
    if d.source is not SourceKind.FALLBACK:
        out["text"] = d.text
    if d.source is SourceKind.REMOTE:
        out["repository"] = d.repository
        out["url"] = d.url
        out["language"] = d.language
    return out


def _description_from_dict(entry: dict) -> Description:
    kind = SourceKind(entry["source"])
    return Description(
        source=kind,
        text=entry.get("text", ""),
        repository=entry.get("repository"),
        url=entry.get("url"),
        language=entry.get("language"),
    )


def serialize_graph(graph: StoryGraph) -> bytes:
    doc = {
        "root": graph.root_id,
        "nodes": [
            {
                "id": n.id,
                "names": list(n.names),
                "descriptions": [_description_to_dict(d) for d in n.descriptions],
            }
            for n in graph.nodes.values()
        ],
        "edges": [
            {
                "from": e.source,
                "to": e.target,
                "kind": e.kind.value,
                **(
                    {"evidence": e.evidence, "source_node": e.source_node}
                    if e.kind is EdgeKind.FUNCTIONAL
                    else {}
                ),
            }
            for e in graph.edges
        ],
    }
    return (json.dumps(doc, indent=2) + "\n").encode("utf-8")


def deserialize_graph(data: bytes | str) -> StoryGraph:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"malformed story-graph document: {exc.msg} at line {exc.lineno} column {exc.colno}"
        ) from exc
    try:
        nodes = {
            entry["id"]: TypeNode(
                id=entry["id"],
                names=[str(n) for n in entry["names"]],
                descriptions=[_description_from_dict(d) for d in entry.get("descriptions", [])],
            )
            for entry in doc["nodes"]
        }
        edges = [
            RelationshipEdge(
                source=entry["from"],
                target=entry["to"],
                kind=EdgeKind(entry["kind"]),
                evidence=entry.get("evidence", ""),
                source_node=entry.get("source_node", ""),
            )
            for entry in doc["edges"]
        ]
        graph = StoryGraph(nodes=nodes, edges=edges, root_id=doc["root"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed story-graph document: {exc}") from exc
    graph.validate()
    return graph
