"""Timeline synthesis: scene construction and the two narrative generators.

A timeline is a FIFO queue of scenes.  Focus scenes orbit one structure's
representative while its description is narrated; overview scenes frame
the children of a composite and verbalize its make-up; transition scenes
bridge the two with camera travel, an animated cutting plane, and a short
navigational remark.

The self-guided generator walks the story graph with the narratory
traversal until a target duration is reached.  The text-guided generator
follows an input script instead: every sentence is scanned for structure
names, each name drives the camera at most once, and the sentences
themselves become the narration.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .camera import (
    CameraKeyframe,
    CameraTarget,
    OrbitParams,
    curved_transition_keyframes,
    direct_fly_keyframes,
    focus_target,
    in_view_cone,
    orbit_keyframes,
    overview_viewpoint,
)
from .commentary import (
    DEFAULT_MIN_SCENE_SECONDS,
    DEFAULT_WPM,
    TemplateSet,
    descriptive_commentary,
    estimate_duration,
    navigational_commentary,
    structural_commentary,
)
from .cutting import (
    CuttingPlane,
    VisibilityDirective,
    focus_cut,
    overview_cut,
    plane_interpolation,
)
from .errors import NoNarratableContent, ValidationError
from .foraging import KeywordIndex, detect_keywords, split_sentences
from .model import Instance, StructuralModel, group_bounding_sphere
from .story import StoryGraph
from .traversal import NarratoryTraversal, TraversalConfig
from .vectors import vec3

logger = logging.getLogger(__name__)


class SceneKind(Enum):
    FOCUS = "focus"
    OVERVIEW = "overview"
    TRANSITION = "transition"


class TransitionKind(Enum):
    SIBLINGS = "siblings-to-sibling"
    FOCUS_TO_OVERVIEW = "focus-to-overview"
    OVERVIEW_TO_FOCUS = "overview-to-focus"


class CommentaryKind(Enum):
    STRUCTURAL = "structural"
    DESCRIPTIVE = "descriptive"
    NAVIGATIONAL = "navigational"


@dataclass
class Scene:
    kind: SceneKind
    subject: str
    duration: float
    camera: list[CameraKeyframe]
    visibility: VisibilityDirective
    commentary: str
    commentary_kind: CommentaryKind
    labels: list[tuple[str, str]] = field(default_factory=list)
    secondary_subject: str | None = None
    transition_kind: TransitionKind | None = None
    plane_travel: list[tuple[float, CuttingPlane]] | None = None


@dataclass
class Timeline:
    """FIFO scene queue: push appends at the back, pop removes the front."""

    scenes: list[Scene] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def push(self, scene: Scene) -> None:
        self.scenes.append(scene)

    def pop(self) -> Scene:
        if not self.scenes:
            raise IndexError("pop from an empty timeline")
        return self.scenes.pop(0)

    @property
    def total_duration(self) -> float:
        return sum(s.duration for s in self.scenes)

    def __len__(self) -> int:
        return len(self.scenes)

    def __iter__(self):
        return iter(self.scenes)


@dataclass
class SynthesisConfig:
    seed: int = 0
    target_duration: float = 120.0
    fps: float = 30.0
    wpm: float = DEFAULT_WPM
    min_scene_seconds: float = DEFAULT_MIN_SCENE_SECONDS
    distance_factor: float = 3.0
    angular_speed: float = 12.0
    fov_degrees: float = 60.0
    p_lower: float = 1.0
    p_higher: float = 2.0
    priority_overrides: dict[str, float] = field(default_factory=dict)
    templates: TemplateSet | None = None

    def echo(self) -> dict:
        return {
            "target_duration": self.target_duration,
            "fps": self.fps,
            "wpm": self.wpm,
            "min_scene_seconds": self.min_scene_seconds,
            "distance_factor": self.distance_factor,
            "angular_speed": self.angular_speed,
            "fov_degrees": self.fov_degrees,
            "p_lower": self.p_lower,
            "p_higher": self.p_higher,
            "priority_overrides": dict(sorted(self.priority_overrides.items())),
        }


@dataclass
class CameraPose:
    position: np.ndarray
    look_at: np.ndarray


def _pose_after(scene: Scene) -> CameraPose:
    last = scene.camera[-1]
    return CameraPose(position=last.position.copy(), look_at=last.look_at.copy())


def initial_pose(model: StructuralModel, config: SynthesisConfig) -> CameraPose:
    """Establishing pose: the whole model framed from +Z."""
    if not model.instances:
        raise ValidationError("cannot synthesize a tour for a model without instances")
    view = overview_viewpoint(
        model.instances, fov_degrees=config.fov_degrees, toward=(0.0, 0.0, 1.0)
    )
    return CameraPose(position=view.position, look_at=view.look_at)


def _initial_directive(pose: CameraPose) -> VisibilityDirective:
    # Plane through the camera itself: nothing sits in front of it yet.
    return VisibilityDirective(
        plane=CuttingPlane.from_arrays(pose.position, pose.position - pose.look_at),
        exempt_types=set(),
        exempt_instances=set(),
    )


def _duration_of(text: str, config: SynthesisConfig) -> float:
    return estimate_duration(text, wpm=config.wpm, min_scene_seconds=config.min_scene_seconds)


def _orbit_of_scene(
    scene: Scene, config: SynthesisConfig
) -> tuple[CameraTarget, OrbitParams, np.ndarray]:
    """Recover a content scene's orbit so it can be re-rendered longer.

    Focus and overview cameras both circle their first frame's look-at
    point at constant radius, so center, radius, and spin direction are
    all recoverable from the keyframes themselves.
    """
    first = scene.camera[0]
    center = first.look_at
    rel0 = first.position - center
    orbit_radius = float(np.linalg.norm(rel0))
    direction = "ccw"
    if len(scene.camera) > 1:
        rel1 = scene.camera[1].position - center
        if float(np.cross(rel0, rel1)[1]) < 0:
            direction = "cw"
    target = CameraTarget(
        center=tuple(float(x) for x in center),
        radius=orbit_radius / config.distance_factor,
    )
    params = OrbitParams(
        distance_factor=config.distance_factor,
        angular_speed=config.angular_speed,
        direction=direction,
    )
    return target, params, first.position.copy()


def make_focus_scene(
    node_id: str,
    graph: StoryGraph,
    model: StructuralModel,
    pose: CameraPose,
    rng: random.Random,
    config: SynthesisConfig,
    commentary: str | None = None,
) -> Scene:
    """Orbit the node's representative while its description is narrated."""
    rep, target = focus_target(node_id, model, pose.position)
    if commentary is None:
        commentary = descriptive_commentary(node_id, graph, rng, config.templates)
    duration = _duration_of(commentary, config)
    params = OrbitParams(
        distance_factor=config.distance_factor,
        angular_speed=config.angular_speed,
        direction=rng.choice(("ccw", "cw")),
    )
    frames = orbit_keyframes(target, params, duration, pose.position, config.fps)
    return Scene(
        kind=SceneKind.FOCUS,
        subject=node_id,
        duration=duration,
        camera=frames,
        visibility=focus_cut(node_id, rep, frames[0]),
        commentary=commentary,
        commentary_kind=CommentaryKind.DESCRIPTIVE,
        labels=[(rep.id, graph.nodes[node_id].display_name)],
    )


def overview_representatives(
    node_id: str, graph: StoryGraph, model: StructuralModel, camera_pos
) -> list[tuple[str, Instance]]:
    """One representative instance per child that has any instances."""
    reps: list[tuple[str, Instance]] = []
    for child in graph.skeleton_children(node_id):
        if model.subtree_instances(child):
            inst, _ = focus_target(child, model, camera_pos)
            reps.append((child, inst))
    return reps


def make_overview_scene(
    node_id: str,
    graph: StoryGraph,
    model: StructuralModel,
    pose: CameraPose,
    rng: random.Random,
    config: SynthesisConfig,
    commentary: str | None = None,
) -> Scene:
    """Frame all children's representatives and verbalize the composition."""
    if graph.is_leaf(node_id):
        raise ValidationError(f"overview scene needs a composite node, {node_id!r} is a leaf")
    reps = overview_representatives(node_id, graph, model, pose.position)
    if not reps:
        raise ValidationError(f"no child of {node_id!r} has instances to show")
    if commentary is None:
        commentary = structural_commentary(node_id, graph, rng, config.templates)
    duration = _duration_of(commentary, config)

    instances = [inst for _, inst in reps]
    fitted = group_bounding_sphere(instances)
    toward = vec3(pose.position) - vec3(fitted.center)
    view = overview_viewpoint(
        instances,
        fov_degrees=config.fov_degrees,
        toward=toward if float(np.linalg.norm(toward)) > 1e-12 else None,
    )
    orbit_factor = float(np.linalg.norm(view.position - vec3(fitted.center))) / fitted.radius
    params = OrbitParams(
        distance_factor=orbit_factor,
        angular_speed=config.angular_speed,
        direction=rng.choice(("ccw", "cw")),
    )
    frames = orbit_keyframes(
        CameraTarget.from_sphere(fitted), params, duration, view.position, config.fps
    )
    return Scene(
        kind=SceneKind.OVERVIEW,
        subject=node_id,
        duration=duration,
        camera=frames,
        visibility=overview_cut(reps, frames[0]),
        commentary=commentary,
        commentary_kind=CommentaryKind.STRUCTURAL,
        labels=[(inst.id, graph.nodes[child].display_name) for child, inst in reps],
    )


def make_transition_scene(
    kind: TransitionKind,
    from_id: str | None,
    to_id: str,
    graph: StoryGraph,
    pose: CameraPose,
    from_directive: VisibilityDirective,
    to_scene: Scene,
    to_target: CameraTarget,
    rng: random.Random,
    config: SynthesisConfig,
) -> Scene:
    """Bridge into an already-built scene.

    The camera flies from the current pose to the following scene's first
    keyframe (straight when the target is already in view, curved
    otherwise); the cutting plane travels between the two directives while
    the exemptions switch to the following scene's at the start.
    """
    commentary = navigational_commentary(from_id, to_id, graph, rng, config.templates)
    duration = _duration_of(commentary, config)
    start = vec3(pose.position)
    end = to_scene.camera[0].position
    to_directive = to_scene.visibility

    from_center = vec3(pose.look_at)
    standoff = float(np.linalg.norm(start - from_center))
    from_target = CameraTarget(
        center=tuple(float(x) for x in from_center),
        radius=standoff / config.distance_factor if standoff > 1e-12 else 1.0,
    )

    if float(np.linalg.norm(end - start)) < 1e-9:
        frames = direct_fly_keyframes(
            from_target, to_target, duration, config.fps,
            view_dir=pose.look_at - pose.position, start_pos=start, end_pos=end,
            distance_factor=config.distance_factor,
        )
    else:
        current_view = CameraKeyframe(0.0, start, vec3(pose.look_at), np.array([0.0, 1.0, 0.0]))
        if in_view_cone(current_view, to_target.center, config.fov_degrees):
            frames = direct_fly_keyframes(
                from_target, to_target, duration, config.fps,
                view_dir=pose.look_at - pose.position, start_pos=start, end_pos=end,
                distance_factor=config.distance_factor,
            )
        else:
            frames = curved_transition_keyframes(
                from_target, to_target, duration, config.fps,
                start_pos=start, end_pos=end, distance_factor=config.distance_factor,
            )

    travel = [
        (kf.time, plane_interpolation(from_directive, to_directive, kf.time / duration))
        for kf in frames
    ]
    return Scene(
        kind=SceneKind.TRANSITION,
        subject=to_id,
        duration=duration,
        camera=frames,
        visibility=VisibilityDirective(
            plane=to_directive.plane,
            exempt_types=set(to_directive.exempt_types),
            exempt_instances=set(to_directive.exempt_instances),
        ),
        commentary=commentary,
        commentary_kind=CommentaryKind.NAVIGATIONAL,
        labels=list(to_scene.labels),
        secondary_subject=from_id,
        transition_kind=kind,
        plane_travel=travel,
    )


def generate_self_guided(
    graph: StoryGraph, model: StructuralModel, config: SynthesisConfig
) -> Timeline:
    """Walk the story graph until enough narrated time has accumulated.

    Each picked node yields a transition plus a focus scene; composites
    additionally get a dive-in: a second transition plus an overview of
    their children.
    """
    rng = random.Random(config.seed)
    walker = NarratoryTraversal(
        graph,
        TraversalConfig(
            p_lower=config.p_lower,
            p_higher=config.p_higher,
            seed=config.seed,
            priority_overrides=dict(config.priority_overrides),
        ),
        rng=rng,
    )
    timeline = Timeline(meta={"mode": "self-guided", "seed": config.seed, "config": config.echo()})
    pose = initial_pose(model, config)
    prev_directive = _initial_directive(pose)
    current = graph.root_id

    while timeline.total_duration < config.target_duration:
        pool = walker.options_pool()
        if not pool:
            if not timeline.scenes:
                focus = make_focus_scene(current, graph, model, pose, rng, config)
                _, target = focus_target(current, model, pose.position)
                transition = make_transition_scene(
                    TransitionKind.SIBLINGS, None, current, graph, pose,
                    prev_directive, focus, target, rng, config,
                )
                timeline.push(transition)
                timeline.push(focus)
            logger.warning(
                "options pool of %r is empty; stopping at %.1f s before the %.1f s target",
                walker.current, timeline.total_duration, config.target_duration,
            )
            break

        nxt = walker.select_next()
        kind = (
            TransitionKind.OVERVIEW_TO_FOCUS
            if timeline.scenes and timeline.scenes[-1].kind is SceneKind.OVERVIEW
            else TransitionKind.SIBLINGS
        )
        focus = make_focus_scene(nxt, graph, model, pose, rng, config)
        _, target = focus_target(nxt, model, pose.position)
        timeline.push(
            make_transition_scene(
                kind, current, nxt, graph, pose, prev_directive, focus, target, rng, config
            )
        )
        timeline.push(focus)
        pose = _pose_after(focus)
        prev_directive = focus.visibility

        walker.advance(nxt)
        if not graph.is_leaf(nxt):
            overview = make_overview_scene(nxt, graph, model, pose, rng, config)
            fitted = group_bounding_sphere(
                [inst for _, inst in overview_representatives(nxt, graph, model, pose.position)]
            )
            timeline.push(
                make_transition_scene(
                    TransitionKind.FOCUS_TO_OVERVIEW, nxt, nxt, graph, pose,
                    prev_directive, overview, CameraTarget.from_sphere(fitted), rng, config,
                )
            )
            timeline.push(overview)
            pose = _pose_after(overview)
            prev_directive = overview.visibility
        current = nxt

    return timeline


def generate_from_text(
    graph: StoryGraph, model: StructuralModel, text: str, config: SynthesisConfig
) -> Timeline:
    """Turn an input script into scenes; the script itself is the narration.

    Per sentence, the first structure name not yet shown decides the
    camera subject; names drive the camera at most once over the whole
    story.  Sentences without a fresh name extend the running scene's
    narration.  The final sentence closes with an overview cycle of the
    root's first child.
    """
    rng = random.Random(config.seed)
    index = KeywordIndex.from_graph(graph)
    sentences = split_sentences(text)
    if not any(detect_keywords(s, index) for s in sentences):
        raise NoNarratableContent("no structure name detected in the input text")

    timeline = Timeline(meta={"mode": "from-text", "seed": config.seed, "config": config.echo()})
    pose = initial_pose(model, config)
    prev_directive = _initial_directive(pose)
    used: set[str] = set()
    previous: str | None = None
    pending: list[str] = []
    # The running content scene; keyword-free sentences extend its narration.
    open_scene: Scene | None = None

    def extend_open_scene(sentence: str) -> None:
        nonlocal pose
        scene = open_scene
        scene.commentary = f"{scene.commentary} {sentence}"
        scene.duration = _duration_of(scene.commentary, config)
        target, params, start = _orbit_of_scene(scene, config)
        scene.camera = orbit_keyframes(target, params, scene.duration, start, config.fps)
        pose = _pose_after(scene)

    def push_content(transitions: list[Scene], scene: Scene, extendable: bool = True) -> None:
        nonlocal pose, prev_directive, open_scene
        for t in transitions:
            timeline.push(t)
        timeline.push(scene)
        pose = _pose_after(scene)
        prev_directive = scene.visibility
        open_scene = scene if extendable else None

    for i, sentence in enumerate(sentences):
        fresh = next((k for k in detect_keywords(sentence, index) if k not in used), None)
        if fresh is None:
            if open_scene is None:
                pending.append(sentence)
            else:
                extend_open_scene(sentence)
            continue

        current = fresh
        narration = " ".join(pending + [sentence])
        pending = []

        if i == len(sentences) - 1:
            children = graph.skeleton_children(graph.root_id)
            if not children:
                raise ValidationError("story graph root has no children for the closing overview")
            child = children[0]
            # Fly to the child's focus pose, then out to its overview.
            rep, child_target = focus_target(child, model, pose.position)
            focus_stub = make_focus_scene(child, graph, model, pose, rng, config, commentary="")
            t1 = make_transition_scene(
                TransitionKind.OVERVIEW_TO_FOCUS, previous, child, graph, pose,
                prev_directive, focus_stub, child_target, rng, config,
            )
            mid_pose = _pose_after(t1)
            mid_pose.look_at = vec3(child_target.center)
            overview = make_overview_scene(
                child, graph, model, mid_pose, rng, config, commentary=narration
            )
            fitted = group_bounding_sphere(
                [inst for _, inst in overview_representatives(child, graph, model, mid_pose.position)]
            )
            t2 = make_transition_scene(
                TransitionKind.FOCUS_TO_OVERVIEW, child, child, graph, mid_pose,
                focus_stub.visibility, overview, CameraTarget.from_sphere(fitted), rng, config,
            )
            push_content([t1, t2], overview)
        elif not graph.is_leaf(current):
            overview = make_overview_scene(current, graph, model, pose, rng, config,
                                           commentary=narration)
            fitted = group_bounding_sphere(
                [inst for _, inst in overview_representatives(current, graph, model, pose.position)]
            )
            transition = make_transition_scene(
                TransitionKind.FOCUS_TO_OVERVIEW, previous, current, graph, pose,
                prev_directive, overview, CameraTarget.from_sphere(fitted), rng, config,
            )
            push_content([transition], overview)
        else:
            if previous is None or graph.skeleton_parent(previous) != graph.skeleton_parent(current):
                origin = graph.skeleton_parent(current) or current
            else:
                origin = current
            focus = make_focus_scene(current, graph, model, pose, rng, config,
                                     commentary=narration)
            _, target = focus_target(current, model, pose.position)
            transition = make_transition_scene(
                TransitionKind.SIBLINGS, origin, current, graph, pose,
                prev_directive, focus, target, rng, config,
            )
            push_content([transition], focus)

        used.add(fresh)
        previous = current

    return timeline
