"""Structural model ingestion: parsing, validation, and bounding spheres.

The model document is UTF-8 JSON with two top-level arrays:

    {
      "types":     [{"id", "name", "alt_names"?, "parent"?, "descriptions"?}, ...],
      "instances": [{"id", "type", "center": [x, y, z], "radius"}, ...]
    }

Unknown keys are ignored with a warning.  Exactly one type may omit
``parent``; it becomes the root of the hierarchy.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import ParseError, ValidationError

logger = logging.getLogger(__name__)

_TYPE_KEYS = {"id", "name", "alt_names", "parent", "descriptions"}
_INSTANCE_KEYS = {"id", "type", "center", "radius"}

Vec3 = tuple[float, float, float]


@dataclass(frozen=True)
class StructureType:
    """One structure type in the hierarchy (a node of the parent tree)."""

    id: str
    name: str
    alt_names: tuple[str, ...] = ()
    parent_id: str | None = None
    local_descriptions: tuple[str, ...] = ()


@dataclass(frozen=True)
class Instance:
    """A positioned occurrence of a type, approximated by a bounding sphere."""

    id: str
    type_id: str
    center: Vec3
    radius: float


@dataclass(frozen=True)
class Sphere:
    center: Vec3
    radius: float

    def contains_sphere(self, other: "Sphere", tol: float = 1e-9) -> bool:
        d = float(np.linalg.norm(np.asarray(self.center) - np.asarray(other.center)))
        return d + other.radius <= self.radius + tol


@dataclass
class StructuralModel:
    """Validated hierarchy of types plus positioned instances."""

    types: dict[str, StructureType]
    instances: list[Instance]
    root_id: str
    _children: dict[str, list[str]] = field(default_factory=dict, repr=False)
    _by_type: dict[str, list[Instance]] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        self._children = {tid: [] for tid in self.types}
        for t in self.types.values():
            if t.parent_id is not None:
                self._children[t.parent_id].append(t.id)
        self._by_type = {tid: [] for tid in self.types}
        for inst in self.instances:
            self._by_type[inst.type_id].append(inst)

    def children(self, type_id: str) -> list[str]:
        return list(self._children[type_id])

    def direct_instances(self, type_id: str) -> list[Instance]:
        return list(self._by_type[type_id])

    def subtree_instances(self, type_id: str) -> list[Instance]:
        """Instances of the type and of every descendant type."""
        out: list[Instance] = []
        stack = [type_id]
        while stack:
            tid = stack.pop()
            out.extend(self._by_type[tid])
            stack.extend(reversed(self._children[tid]))
        return out


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ValidationError(message)


def parse_model(data: bytes | str) -> StructuralModel:
    """Parse and validate a model document.

    Raises ParseError (with line/column) on malformed JSON and
    ValidationError on any violated model invariant.
    """
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"malformed model document: {exc.msg} at line {exc.lineno} column {exc.colno}"
        ) from exc

    _require(isinstance(doc, dict), "model document must be a JSON object")
    for key in doc:
        if key not in ("types", "instances"):
            logger.warning("ignoring unknown top-level key %r", key)

    raw_types = doc.get("types", [])
    _require(isinstance(raw_types, list) and raw_types, "model must declare at least one type")

    types: dict[str, StructureType] = {}
    for entry in raw_types:
        _require(isinstance(entry, dict), "each type must be an object")
        for key in entry:
            if key not in _TYPE_KEYS:
                logger.warning("type %r: ignoring unknown key %r", entry.get("id"), key)
        _require("id" in entry and "name" in entry, "type entries need 'id' and 'name'")
        tid = str(entry["id"])
        _require(tid not in types, f"duplicate type id {tid!r}")
        descriptions = tuple(
            text.strip() for text in entry.get("descriptions", []) if str(text).strip()
        )
        types[tid] = StructureType(
            id=tid,
            name=str(entry["name"]),
            alt_names=tuple(str(a) for a in entry.get("alt_names", [])),
            parent_id=str(entry["parent"]) if entry.get("parent") is not None else None,
            local_descriptions=descriptions,
        )

    roots = [t.id for t in types.values() if t.parent_id is None]
    _require(len(roots) == 1, f"model must have exactly one root type, found {len(roots)}")
    root_id = roots[0]
    for t in types.values():
        if t.parent_id is not None:
            _require(t.parent_id in types, f"type {t.id!r} references unknown parent {t.parent_id!r}")

    _check_parent_acyclic(types)

    instances: list[Instance] = []
    seen_instance_ids: set[str] = set()
    for entry in doc.get("instances", []):
        _require(isinstance(entry, dict), "each instance must be an object")
        for key in entry:
            if key not in _INSTANCE_KEYS:
                logger.warning("instance %r: ignoring unknown key %r", entry.get("id"), key)
        _require(
            all(k in entry for k in ("id", "type", "center", "radius")),
            "instance entries need 'id', 'type', 'center' and 'radius'",
        )
        iid = str(entry["id"])
        _require(iid not in seen_instance_ids, f"duplicate instance id {iid!r}")
        seen_instance_ids.add(iid)
        type_id = str(entry["type"])
        _require(type_id in types, f"instance {iid!r} references unknown type {type_id!r}")
        center = entry["center"]
        _require(
            isinstance(center, list) and len(center) == 3,
            f"instance {iid!r}: center must be a 3-element array",
        )
        radius = float(entry["radius"])
        _require(radius > 0, f"instance {iid!r}: radius must be positive")
        instances.append(
            Instance(id=iid, type_id=type_id, center=tuple(float(c) for c in center), radius=radius)
        )

    return StructuralModel(types=types, instances=instances, root_id=root_id)


def _check_parent_acyclic(types: dict[str, StructureType]) -> None:
    """Walk parent chains; report the offending cycle by name."""
    state: dict[str, int] = {}  # 0 in-progress, 1 done
    for start in types:
        if start in state:
            continue
        chain: list[str] = []
        tid: str | None = start
        while tid is not None and tid not in state:
            state[tid] = 0
            chain.append(tid)
            tid = types[tid].parent_id
        if tid is not None and state[tid] == 0:
            cycle = chain[chain.index(tid):] + [tid]
            raise ValidationError("cycle in parent links: " + " -> ".join(cycle))
        for done in chain:
            state[done] = 1


def serialize_model(model: StructuralModel) -> bytes:
    """Inverse of parse_model (up to whitespace)."""
    doc = {
        "types": [
            {
                "id": t.id,
                "name": t.name,
                **({"alt_names": list(t.alt_names)} if t.alt_names else {}),
                **({"parent": t.parent_id} if t.parent_id is not None else {}),
                **({"descriptions": list(t.local_descriptions)} if t.local_descriptions else {}),
            }
            for t in model.types.values()
        ],
        "instances": [
            {
                "id": i.id,
                "type": i.type_id,
                "center": [float(c) for c in i.center],
                "radius": float(i.radius),
            }
            for i in model.instances
        ],
    }
    return (json.dumps(doc, indent=2) + "\n").encode("utf-8")


def group_bounding_sphere(instances: list[Instance]) -> Sphere:
    """Bounding sphere over instance spheres (Ritter two-pass, then grow).

    Guarantees containment of every input sphere; not guaranteed minimal.
    """
    if not instances:
        raise ValidationError("cannot bound an empty instance list")

    centers = np.array([i.center for i in instances], dtype=float)
    radii = np.array([i.radius for i in instances], dtype=float)

    # Pass 1: seed with the two roughly most distant surface points.
    p = centers[0]
    d = np.linalg.norm(centers - p, axis=1) + radii
    a = int(np.argmax(d))
    d = np.linalg.norm(centers - centers[a], axis=1) + radii
    b = int(np.argmax(d))
    center = (centers[a] + centers[b]) / 2.0
    radius = float(np.linalg.norm(centers[a] - centers[b]) / 2.0 + max(radii[a], radii[b]))

    # Pass 2: grow to enclose every sphere that still sticks out.
    for c, r in zip(centers, radii):
        dist = float(np.linalg.norm(c - center))
        if dist + r <= radius:
            continue
        if dist + radius <= r:
            # Candidate sphere swallows the current one.
            center, radius = c.copy(), float(r)
            continue
        new_radius = (radius + dist + r) / 2.0
        center = center + (c - center) * ((new_radius - radius) / dist)
        radius = new_radius

    return Sphere(center=tuple(float(x) for x in center), radius=radius)


def type_sphere(model: StructuralModel, type_id: str) -> Sphere:
    """Bounding sphere of all instances in the type's subtree."""
    instances = model.subtree_instances(type_id)
    if not instances:
        raise ValidationError(f"type {type_id!r} has no instances in its subtree")
    return group_bounding_sphere(instances)


def model_sphere(model: StructuralModel) -> Sphere:
    """Bounding sphere of the whole instance population."""
    if not model.instances:
        raise ValidationError("model has no instances")
    return group_bounding_sphere(model.instances)
