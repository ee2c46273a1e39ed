"""Traveling cutting plane: placement, exemptions, and visibility tests.

Anything between the plane and the camera is culled unless its instance or
type id is exempt.  Culling is decided in world space from the instance
center (an instance straddling the plane is classified by its center);
image-space fading is deliberately not offered.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .model import Instance
from .camera import CameraKeyframe
from .vectors import any_perpendicular, lerp, unit, vec3


@dataclass(frozen=True)
class CuttingPlane:
    point: tuple[float, float, float]
    normal: tuple[float, float, float]  # unit, oriented toward the camera side

    @classmethod
    def from_arrays(cls, point, normal) -> "CuttingPlane":
        n = unit(normal)
        return cls(
            point=tuple(float(x) for x in vec3(point)),
            normal=tuple(float(x) for x in n),
        )


@dataclass
class VisibilityDirective:
    plane: CuttingPlane
    exempt_types: set[str] = field(default_factory=set)
    exempt_instances: set[str] = field(default_factory=set)


def _back_vector(camera: CameraKeyframe) -> np.ndarray:
    offset = camera.position - camera.look_at
    if np.linalg.norm(offset) < 1e-12:
        raise ValidationError("degenerate camera: position equals look_at")
    return unit(offset)


def focus_cut(node_id: str, representative: Instance, camera: CameraKeyframe) -> VisibilityDirective:
    """Plane through the representative, facing the camera; focus type exempt.

    The representative's own type is exempted as well, which matters when a
    composite node is focused through a descendant instance.
    """
    plane = CuttingPlane.from_arrays(representative.center, _back_vector(camera))
    return VisibilityDirective(
        plane=plane,
        exempt_types={node_id, representative.type_id},
        exempt_instances=set(),
    )


def overview_cut(
    children_reps: list[tuple[str, Instance]], camera: CameraKeyframe
) -> VisibilityDirective:
    """Plane at the representative deepest along the view axis; reps exempt.

    Depth along the viewing direction (not straight-line distance) is what
    guarantees that no representative ends up beyond the plane, so nothing
    kept in the scene can occlude them.
    """
    if not children_reps:
        raise ValidationError("overview cut needs at least one representative")
    normal = _back_vector(camera)
    # Deepest = smallest signed coordinate along the back vector.
    deepest = min(children_reps, key=lambda item: float(np.dot(normal, vec3(item[1].center))))
    plane = CuttingPlane.from_arrays(deepest[1].center, normal)
    return VisibilityDirective(
        plane=plane,
        exempt_types=set(),
        exempt_instances={inst.id for _, inst in children_reps},
    )


def is_culled(instance: Instance, directive: VisibilityDirective, camera_pos) -> bool:
    """True when the instance center sits on the camera side and is not exempt."""
    if instance.id in directive.exempt_instances:
        return False
    if instance.type_id in directive.exempt_types:
        return False
    normal = vec3(directive.plane.normal)
    signed = float(np.dot(normal, vec3(instance.center) - vec3(directive.plane.point)))
    return signed > 0.0


def plane_interpolation(
    from_directive: VisibilityDirective, to_directive: VisibilityDirective, t: float
) -> CuttingPlane:
    """Plane between two directives: point lerped, normal slerped.

    Endpoints reproduce exactly.  Antiparallel normals fall back to
    lerp-and-renormalize, with a deterministic perpendicular standing in
    at the midpoint where the lerp collapses.
    """
    if t <= 0.0:
        return from_directive.plane
    if t >= 1.0:
        return to_directive.plane
    p = lerp(vec3(from_directive.plane.point), vec3(to_directive.plane.point), t)
    n0 = vec3(from_directive.plane.normal)
    n1 = vec3(to_directive.plane.normal)
    dot = float(np.clip(np.dot(n0, n1), -1.0, 1.0))
    if dot > 1.0 - 1e-12:
        n = n0
    elif dot < -1.0 + 1e-12:
        blended = lerp(n0, n1, t)
        n = any_perpendicular(n0) if np.linalg.norm(blended) < 1e-9 else unit(blended)
    else:
        omega = math.acos(dot)
        n = unit(
            (math.sin((1.0 - t) * omega) * n0 + math.sin(t * omega) * n1) / math.sin(omega)
        )
    return CuttingPlane.from_arrays(p, n)
