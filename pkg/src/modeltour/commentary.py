"""Template-driven commentary and narration-duration estimation.

Structural sentences verbalize the hierarchy around a node, navigational
sentences bridge scene changes, and descriptive text comes straight from
the node's highest-priority description (falling back to a structural
sentence when only the fallback marker is present).

List variables expand to a small random subset (at most three entries,
shown in their original order); sources longer than three gain an
" and others" tail.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from importlib import resources

from .errors import TemplateError, TemplateUnresolvable
from .story import SourceKind, StoryGraph

VARIABLES = ("name", "siblings", "children", "parent", "previous")
LIST_VARIABLES = ("siblings", "children")
MAX_LIST_NAMES = 3

DEFAULT_WPM = 150.0
DEFAULT_MIN_SCENE_SECONDS = 4.0

_VAR_RE = re.compile(r"\$(\w+)")


@dataclass
class TemplateContext:
    name: str
    siblings: list[str] = field(default_factory=list)
    children: list[str] = field(default_factory=list)
    parent: str | None = None
    previous: str | None = None


@dataclass
class TemplateSet:
    structural: list[str]
    navigational: list[str]

    def __post_init__(self) -> None:
        if not self.structural or not self.navigational:
            raise TemplateError("both template sections must be non-empty")
        for template in self.structural + self.navigational:
            for var in _VAR_RE.findall(template):
                if var not in VARIABLES:
                    raise TemplateError(f"unknown template variable ${var} in {template!r}")

    @classmethod
    def parse(cls, text: str) -> "TemplateSet":
        sections: dict[str, list[str]] = {"structural": [], "navigational": []}
        current: str | None = None
        for raw in text.splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if line.startswith("[") and line.endswith("]"):
                current = line[1:-1].strip().lower()
                if current not in sections:
                    raise TemplateError(f"unknown template section {current!r}")
                continue
            if current is None:
                raise TemplateError("template line outside any section")
            sections[current].append(line)
        return cls(structural=sections["structural"], navigational=sections["navigational"])

    @classmethod
    def load(cls, path=None) -> "TemplateSet":
        if path is not None:
            with open(path, encoding="utf-8") as handle:
                return cls.parse(handle.read())
        text = resources.files("modeltour").joinpath("data/templates.txt").read_text("utf-8")
        return cls.parse(text)


def format_name_list(names: list[str]) -> str:
    if len(names) == 1:
        return names[0]
    if len(names) == 2:
        return f"{names[0]} and {names[1]}"
    return ", ".join(names[:-1]) + f", and {names[-1]}"


def _expand_list(values: list[str], rng: random.Random) -> str:
    count = rng.randint(1, min(MAX_LIST_NAMES, len(values)))
    picked = rng.sample(range(len(values)), count)
    text = format_name_list([values[i] for i in sorted(picked)])
    if len(values) > MAX_LIST_NAMES:
        text += " and others"
    return text


def expand_template(template: str, ctx: TemplateContext, rng: random.Random) -> str:
    """Fill a template from the context.

    Raises TemplateUnresolvable before consuming any randomness if a
    variable has no value (missing parent/previous, empty list).
    """
    for var in _VAR_RE.findall(template):
        value = getattr(ctx, var)
        if value is None or (var in LIST_VARIABLES and not value):
            raise TemplateUnresolvable(f"${var} has no value for {ctx.name!r}")

    def substitute(match: re.Match) -> str:
        var = match.group(1)
        value = getattr(ctx, var)
        if var in LIST_VARIABLES:
            return _expand_list(value, rng)
        return value

    return _VAR_RE.sub(substitute, template)


def hierarchy_context(node_id: str, graph: StoryGraph, previous: str | None = None) -> TemplateContext:
    node = graph.nodes[node_id]
    parent_id = graph.skeleton_parent(node_id)
    siblings: list[str] = []
    if parent_id is not None:
        siblings = [
            graph.nodes[s].display_name
            for s in graph.skeleton_children(parent_id)
            if s != node_id
        ]
    return TemplateContext(
        name=node.display_name,
        siblings=siblings,
        children=[graph.nodes[c].display_name for c in graph.skeleton_children(node_id)],
        parent=graph.nodes[parent_id].display_name if parent_id is not None else None,
        previous=previous,
    )


def _expand_first_resolvable(
    templates: list[str], ctx: TemplateContext, rng: random.Random
) -> str:
    order = rng.sample(templates, len(templates))
    for template in order:
        try:
            return expand_template(template, ctx, rng)
        except TemplateUnresolvable:
            continue
    raise TemplateError(f"no template resolvable for {ctx.name!r}")


def structural_commentary(
    node_id: str, graph: StoryGraph, rng: random.Random, templates: TemplateSet | None = None
) -> str:
    """A hierarchy sentence about the node; re-rolls may phrase it differently."""
    templates = templates or TemplateSet.load()
    return _expand_first_resolvable(templates.structural, hierarchy_context(node_id, graph), rng)


def navigational_commentary(
    from_id: str | None,
    to_id: str,
    graph: StoryGraph,
    rng: random.Random,
    templates: TemplateSet | None = None,
) -> str:
    """A bridging sentence for a scene change; `previous` stays empty on holds."""
    templates = templates or TemplateSet.load()
    previous = None
    if from_id is not None and from_id != to_id:
        previous = graph.nodes[from_id].display_name
    ctx = hierarchy_context(to_id, graph, previous=previous)
    return _expand_first_resolvable(templates.navigational, ctx, rng)


def descriptive_commentary(
    node_id: str, graph: StoryGraph, rng: random.Random, templates: TemplateSet | None = None
) -> str:
    """The node's best description, verbatim; structural sentence on fallback."""
    node = graph.nodes[node_id]
    for description in node.descriptions:
        if description.source is SourceKind.FALLBACK:
            break
        if description.text:
            return description.text
    return structural_commentary(node_id, graph, rng, templates)


def estimate_duration(
    text: str,
    wpm: float = DEFAULT_WPM,
    min_scene_seconds: float = DEFAULT_MIN_SCENE_SECONDS,
) -> float:
    """Reading time at the given pace, floored to the minimum scene length."""
    if wpm <= 0:
        raise ValueError("wpm must be positive")
    words = len(text.split())
    return max(min_scene_seconds, words / wpm * 60.0)
