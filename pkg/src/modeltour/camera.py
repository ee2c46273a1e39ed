"""Camera targets and keyframe generation.

Three movement types cover the tour vocabulary: anchored orbiting around a
target, straight flying with fixed orientation, and a curved transition on
a quadratic Bezier that bows away from the subjects for context.  Motions
are emitted as discrete keyframes at a configurable rate; players are
expected to interpolate linearly in between.

Coordinates are right-handed with +Y as world up.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .model import Instance, Sphere, StructuralModel, group_bounding_sphere
from .vectors import WORLD_UP, lerp, smoothstep, unit, vec3

DEFAULT_DISTANCE_FACTOR = 3.0
DEFAULT_ANGULAR_SPEED = 12.0  # degrees per second
DEFAULT_FPS = 30.0
DEFAULT_FOV = 60.0  # degrees, full vertical angle
OVERVIEW_MARGIN = 1.1


@dataclass(frozen=True)
class CameraTarget:
    center: tuple[float, float, float]
    radius: float

    @classmethod
    def from_sphere(cls, sphere: Sphere) -> "CameraTarget":
        return cls(center=sphere.center, radius=sphere.radius)

    @classmethod
    def from_instance(cls, instance: Instance) -> "CameraTarget":
        return cls(center=instance.center, radius=instance.radius)


@dataclass
class CameraKeyframe:
    time: float
    position: np.ndarray
    look_at: np.ndarray
    up: np.ndarray

    def view_direction(self) -> np.ndarray:
        return unit(self.look_at - self.position)


@dataclass(frozen=True)
class OrbitParams:
    distance_factor: float = DEFAULT_DISTANCE_FACTOR
    angular_speed: float = DEFAULT_ANGULAR_SPEED
    direction: str = "ccw"  # "ccw" | "cw"

    def __post_init__(self) -> None:
        if self.distance_factor <= 1:
            raise ValueError("distance_factor must exceed 1")
        if self.angular_speed <= 0:
            raise ValueError("angular_speed must be positive")
        if self.direction not in ("cw", "ccw"):
            raise ValueError("direction must be 'cw' or 'ccw'")


def frame_times(duration: float, fps: float) -> list[float]:
    """Sample times covering [0, duration] at the given rate."""
    if duration <= 0:
        raise ValueError("duration must be positive")
    if fps <= 0:
        raise ValueError("fps must be positive")
    count = int(math.floor(duration * fps + 1e-9))
    times = [i / fps for i in range(count + 1)]
    if duration - times[-1] > 1e-9:
        times.append(duration)
    else:
        times[-1] = duration
    return times


def representative_instances(
    node_id: str, model: StructuralModel, camera_pos
) -> list[Instance]:
    """One representative per relevant subtree of the node.

    For a type with direct instances this is just the closest instance.
    For a composite without any, each child subtree that has instances
    contributes its own representative.
    """
    camera_pos = vec3(camera_pos)
    direct = model.direct_instances(node_id)
    if direct:
        return [_closest(direct, camera_pos)]
    reps: list[Instance] = []
    for child in model.children(node_id):
        if model.subtree_instances(child):
            reps.extend(representative_instances(child, model, camera_pos))
    return reps


def _closest(instances: list[Instance], camera_pos: np.ndarray) -> Instance:
    # Ties break toward the lexicographically smaller instance id.
    return min(
        instances,
        key=lambda i: (float(np.linalg.norm(vec3(i.center) - camera_pos)), i.id),
    )


def focus_target(
    node_id: str, model: StructuralModel, camera_pos
) -> tuple[Instance, CameraTarget]:
    """Pick the camera-closest representative and its bounding sphere.

    Composites without direct instances aggregate their descendants'
    representatives: the returned instance is the closest representative,
    the target sphere bounds all of them.
    """
    reps = representative_instances(node_id, model, camera_pos)
    if not reps:
        raise ValidationError(f"node {node_id!r} has no instances to focus on")
    representative = _closest(reps, vec3(camera_pos))
    if len(reps) == 1:
        return representative, CameraTarget.from_instance(representative)
    return representative, CameraTarget.from_sphere(group_bounding_sphere(reps))


def orbit_keyframes(
    target: CameraTarget,
    params: OrbitParams,
    duration: float,
    start_pos,
    fps: float = DEFAULT_FPS,
) -> list[CameraKeyframe]:
    """Circle the target about the world-up axis, looking at its center.

    The first keyframe is the start position projected radially onto the
    orbit sphere (distance_factor x target radius); rotation preserves that
    distance for every subsequent frame.
    """
    center = vec3(target.center)
    start_pos = vec3(start_pos)
    offset = start_pos - center
    if np.linalg.norm(offset) < 1e-12:
        raise ValidationError("orbit start position coincides with the target center")
    orbit_radius = params.distance_factor * target.radius
    rel0 = unit(offset) * orbit_radius
    sign = 1.0 if params.direction == "ccw" else -1.0
    omega = math.radians(params.angular_speed) * sign

    frames: list[CameraKeyframe] = []
    for t in frame_times(duration, fps):
        theta = omega * t
        c, s = math.cos(theta), math.sin(theta)
        x, y, z = rel0
        rotated = np.array([x * c + z * s, y, -x * s + z * c])
        frames.append(
            CameraKeyframe(
                time=t,
                position=center + rotated,
                look_at=center.copy(),
                up=WORLD_UP.copy(),
            )
        )
    return frames


def standoff_position(target: CameraTarget, toward, distance_factor: float) -> np.ndarray:
    """Point at stand-off distance from the target center, offset along `toward`."""
    return vec3(target.center) + unit(toward) * (distance_factor * target.radius)


def project_to_orbit(target: CameraTarget, position, distance_factor: float) -> np.ndarray:
    """Radial projection of a position onto the target's orbit sphere."""
    center = vec3(target.center)
    offset = vec3(position) - center
    if np.linalg.norm(offset) < 1e-12:
        offset = np.array([0.0, 0.0, 1.0])
    return center + unit(offset) * (distance_factor * target.radius)


def direct_fly_keyframes(
    from_target: CameraTarget,
    to_target: CameraTarget,
    duration: float,
    fps: float = DEFAULT_FPS,
    view_dir=None,
    start_pos=None,
    end_pos=None,
    distance_factor: float = DEFAULT_DISTANCE_FACTOR,
) -> list[CameraKeyframe]:
    """Straight flight between two stand-off poses with fixed orientation.

    Poses default to stand-offs along the shared viewing direction; pass
    explicit endpoints to splice the flight into an existing camera path.
    """
    if view_dir is None:
        travel = vec3(to_target.center) - vec3(from_target.center)
        view_dir = travel if np.linalg.norm(travel) > 1e-12 else np.array([0.0, 0.0, -1.0])
    direction = unit(view_dir)
    p_from = vec3(start_pos) if start_pos is not None else (
        vec3(from_target.center) - direction * distance_factor * from_target.radius
    )
    p_to = vec3(end_pos) if end_pos is not None else (
        vec3(to_target.center) - direction * distance_factor * to_target.radius
    )
    lookahead = distance_factor * max(from_target.radius, to_target.radius)

    frames: list[CameraKeyframe] = []
    for t in frame_times(duration, fps):
        s = t / duration
        position = lerp(p_from, p_to, s)
        frames.append(
            CameraKeyframe(
                time=t,
                position=position,
                look_at=position + direction * lookahead,
                up=WORLD_UP.copy(),
            )
        )
    return frames


def quadratic_bezier(p0, p1, p2, s: float) -> np.ndarray:
    p0, p1, p2 = vec3(p0), vec3(p1), vec3(p2)
    u = 1.0 - s
    return u * u * p0 + 2.0 * s * u * p1 + s * s * p2


def decasteljau(points: list, s: float) -> np.ndarray:
    """Recursive-subdivision Bezier evaluation (any degree)."""
    level = [vec3(p) for p in points]
    while len(level) > 1:
        level = [lerp(a, b, s) for a, b in zip(level, level[1:])]
    return level[0]


def bezier_control_point(p0, p2, from_center, to_center, zoom_out_offset: float | None = None):
    """Control point that bows the path away from the subjects.

    Offset direction runs from the midpoint of the two subject centers
    through the midpoint of the travel endpoints; world up substitutes when
    the two coincide.
    """
    p0, p2 = vec3(p0), vec3(p2)
    midpoint = (p0 + p2) / 2.0
    subjects_mid = (vec3(from_center) + vec3(to_center)) / 2.0
    if zoom_out_offset is None:
        zoom_out_offset = 0.5 * float(np.linalg.norm(p2 - p0))
    away = midpoint - subjects_mid
    if np.linalg.norm(away) < 1e-12:
        away = WORLD_UP.copy()
    return midpoint + unit(away) * zoom_out_offset


def curved_transition_keyframes(
    from_target: CameraTarget,
    to_target: CameraTarget,
    duration: float,
    fps: float = DEFAULT_FPS,
    start_pos=None,
    end_pos=None,
    distance_factor: float = DEFAULT_DISTANCE_FACTOR,
    zoom_out_offset: float | None = None,
) -> list[CameraKeyframe]:
    """Quadratic-Bezier flight; the gaze eases from one center to the other."""
    if start_pos is not None:
        p0 = vec3(start_pos)
    else:
        away = vec3(from_target.center) - vec3(to_target.center)
        if np.linalg.norm(away) < 1e-12:
            away = np.array([0.0, 0.0, 1.0])
        p0 = standoff_position(from_target, away, distance_factor)
    p2 = vec3(end_pos) if end_pos is not None else project_to_orbit(
        to_target, p0, distance_factor
    )
    p1 = bezier_control_point(p0, p2, from_target.center, to_target.center, zoom_out_offset)

    from_center = vec3(from_target.center)
    to_center = vec3(to_target.center)
    frames: list[CameraKeyframe] = []
    for t in frame_times(duration, fps):
        s = t / duration
        frames.append(
            CameraKeyframe(
                time=t,
                position=quadratic_bezier(p0, p1, p2, s),
                look_at=lerp(from_center, to_center, smoothstep(s)),
                up=WORLD_UP.copy(),
            )
        )
    return frames


def overview_viewpoint(
    representatives: list[Instance],
    up=WORLD_UP,
    fov_degrees: float = DEFAULT_FOV,
    toward=None,
    margin: float = OVERVIEW_MARGIN,
) -> CameraKeyframe:
    """Pose that keeps every representative inside the view cone.

    The camera backs off along `toward` (previous viewing offset, +Z when
    unknown) far enough that the fitted sphere subtends less than the
    field of view.
    """
    if not representatives:
        raise ValidationError("cannot frame an empty representative list")
    fitted = group_bounding_sphere(representatives)
    center = vec3(fitted.center)
    distance = fitted.radius / math.sin(math.radians(fov_degrees) / 2.0) * margin
    direction = unit(toward) if toward is not None else np.array([0.0, 0.0, 1.0])
    return CameraKeyframe(
        time=0.0,
        position=center + direction * distance,
        look_at=center,
        up=unit(up),
    )


def in_view_cone(camera: CameraKeyframe, point, fov_degrees: float) -> bool:
    """Whether the point sits within fov/2 of the camera's view axis."""
    to_point = vec3(point) - camera.position
    dist = np.linalg.norm(to_point)
    if dist < 1e-12:
        return True
    cos_angle = float(np.dot(to_point / dist, camera.view_direction()))
    return math.acos(min(1.0, max(-1.0, cos_angle))) <= math.radians(fov_degrees) / 2.0
