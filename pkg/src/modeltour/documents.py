"""Timeline document serialization and narration script export.

The timeline document is UTF-8 JSON: a header (mode, seed, config echo,
total duration) followed by the ordered scene list.  Narration exports
come in two flavors: a plain-text script with one ``[mm:ss.mmm] sentence``
line per scene, and an SSML-style XML document with a mark and a trailing
break per scene.
"""

from __future__ import annotations

import json
from xml.etree import ElementTree as ET

import numpy as np

from .camera import CameraKeyframe
from .commentary import DEFAULT_WPM
from .cutting import CuttingPlane, VisibilityDirective
from .errors import ParseError
from .timeline import CommentaryKind, Scene, SceneKind, Timeline, TransitionKind


def _vec_list(v) -> list[float]:
    return [float(x) for x in v]


def _keyframe_to_dict(kf: CameraKeyframe) -> dict:
    return {
        "time": float(kf.time),
        "position": _vec_list(kf.position),
        "look_at": _vec_list(kf.look_at),
        "up": _vec_list(kf.up),
    }


def _keyframe_from_dict(entry: dict) -> CameraKeyframe:
    return CameraKeyframe(
        time=float(entry["time"]),
        position=np.array(entry["position"], dtype=float),
        look_at=np.array(entry["look_at"], dtype=float),
        up=np.array(entry["up"], dtype=float),
    )


def _plane_to_dict(plane: CuttingPlane) -> dict:
    return {"point": _vec_list(plane.point), "normal": _vec_list(plane.normal)}


def _plane_from_dict(entry: dict) -> CuttingPlane:
    return CuttingPlane(
        point=tuple(float(x) for x in entry["point"]),
        normal=tuple(float(x) for x in entry["normal"]),
    )


def _visibility_to_dict(directive: VisibilityDirective) -> dict:
    return {
        "plane": _plane_to_dict(directive.plane),
        "exempt_types": sorted(directive.exempt_types),
        "exempt_instances": sorted(directive.exempt_instances),
    }


def _visibility_from_dict(entry: dict) -> VisibilityDirective:
    return VisibilityDirective(
        plane=_plane_from_dict(entry["plane"]),
        exempt_types=set(entry["exempt_types"]),
        exempt_instances=set(entry["exempt_instances"]),
    )


def scene_to_dict(scene: Scene) -> dict:
    out: dict = {
        "kind": scene.kind.value,
        "subject": scene.subject,
        "secondary_subject": scene.secondary_subject,
        "duration": float(scene.duration),
        "commentary": scene.commentary,
        "commentary_kind": scene.commentary_kind.value,
        "labels": [[iid, text] for iid, text in scene.labels],
        "camera": [_keyframe_to_dict(kf) for kf in scene.camera],
        "visibility": _visibility_to_dict(scene.visibility),
    }
    if scene.kind is SceneKind.TRANSITION:
        out["transition_kind"] = scene.transition_kind.value
        out["plane_travel"] = [
            {"time": float(t), **_plane_to_dict(plane)} for t, plane in (scene.plane_travel or [])
        ]
    return out


def scene_from_dict(entry: dict) -> Scene:
    kind = SceneKind(entry["kind"])
    plane_travel = None
    transition_kind = None
    if kind is SceneKind.TRANSITION:
        transition_kind = TransitionKind(entry["transition_kind"])
        plane_travel = [
            (float(item["time"]), _plane_from_dict(item)) for item in entry.get("plane_travel", [])
        ]
    return Scene(
        kind=kind,
        subject=entry["subject"],
        duration=float(entry["duration"]),
        camera=[_keyframe_from_dict(kf) for kf in entry["camera"]],
        visibility=_visibility_from_dict(entry["visibility"]),
        commentary=entry["commentary"],
        commentary_kind=CommentaryKind(entry["commentary_kind"]),
        labels=[(iid, text) for iid, text in entry.get("labels", [])],
        secondary_subject=entry.get("secondary_subject"),
        transition_kind=transition_kind,
        plane_travel=plane_travel,
    )


def timeline_to_json(timeline: Timeline) -> bytes:
    doc = {
        "header": {
            "mode": timeline.meta.get("mode", ""),
            "seed": timeline.meta.get("seed"),
            "total_duration": float(timeline.total_duration),
            "scene_count": len(timeline.scenes),
            "config": timeline.meta.get("config", {}),
        },
        "scenes": [scene_to_dict(s) for s in timeline.scenes],
    }
    return (json.dumps(doc, indent=2) + "\n").encode("utf-8")


def timeline_from_json(data: bytes | str) -> Timeline:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"malformed timeline document: {exc.msg} at line {exc.lineno} column {exc.colno}"
        ) from exc
    try:
        header = doc["header"]
        timeline = Timeline(
            scenes=[scene_from_dict(entry) for entry in doc["scenes"]],
            meta={
                "mode": header.get("mode", ""),
                "seed": header.get("seed"),
                "config": header.get("config", {}),
            },
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed timeline document: {exc}") from exc
    return timeline


def format_timestamp(seconds: float) -> str:
    minutes = int(seconds // 60)
    rest = seconds - minutes * 60
    return f"{minutes:02d}:{rest:06.3f}"


def narration_script(timeline: Timeline) -> str:
    """One ``[mm:ss.mmm] sentence`` line per scene, at cumulative start times."""
    lines = []
    start = 0.0
    for scene in timeline.scenes:
        lines.append(f"[{format_timestamp(start)}] {scene.commentary}")
        start += scene.duration
    if not lines:
        return ""
    return "\n".join(lines) + "\n"


def narration_ssml(timeline: Timeline, language: str = "en") -> str:
    """SSML-style document: per scene a mark, the sentence, and a break.

    The break absorbs the slack between the estimated speech time and the
    scene duration so playback stays aligned with the camera work.
    """
    wpm = float(timeline.meta.get("config", {}).get("wpm", DEFAULT_WPM))
    speak = ET.Element("speak")
    speak.set("version", "1.0")
    speak.set("xml:lang", language)
    for idx, scene in enumerate(timeline.scenes):
        paragraph = ET.SubElement(speak, "p")
        ET.SubElement(paragraph, "mark", name=f"scene-{idx:04d}")
        sentence = ET.SubElement(paragraph, "s")
        sentence.text = scene.commentary
        speech_seconds = len(scene.commentary.split()) / wpm * 60.0
        slack_ms = max(0, int(round((scene.duration - speech_seconds) * 1000.0)))
        ET.SubElement(paragraph, "break", time=f"{slack_ms}ms")
    body = ET.tostring(speak, encoding="unicode")
    return '<?xml version="1.0" encoding="UTF-8"?>\n' + body + "\n"
