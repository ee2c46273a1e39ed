"""Timeline inspection report: a scene table plus rendered figures.

Writes three files into the report directory: ``scenes.csv`` with one row
per scene, ``camera_path.png`` showing the camera trajectory colored by
scene kind, and ``timeline.png`` with the scene sequence as horizontal
bars on the time axis.
"""

from __future__ import annotations

import csv
from pathlib import Path

from .timeline import SceneKind, Timeline

KIND_COLORS = {
    SceneKind.FOCUS: "#d62728",
    SceneKind.OVERVIEW: "#1f77b4",
    SceneKind.TRANSITION: "#7f7f7f",
}


def write_scene_table(timeline: Timeline, path: Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(
            ["index", "kind", "transition_kind", "subject", "secondary_subject",
             "start", "duration", "commentary_kind", "keyframes", "labels", "commentary"]
        )
        start = 0.0
        for idx, scene in enumerate(timeline.scenes):
            writer.writerow([
                idx,
                scene.kind.value,
                scene.transition_kind.value if scene.transition_kind else "",
                scene.subject,
                scene.secondary_subject or "",
                f"{start:.3f}",
                f"{scene.duration:.3f}",
                scene.commentary_kind.value,
                len(scene.camera),
                ";".join(text for _, text in scene.labels),
                scene.commentary,
            ])
            start += scene.duration


def plot_camera_path(timeline: Timeline, path: Path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig = plt.figure(figsize=(8, 7))
    ax = fig.add_subplot(projection="3d")
    seen_kinds = set()
    for scene in timeline.scenes:
        xs = [kf.position[0] for kf in scene.camera]
        ys = [kf.position[1] for kf in scene.camera]
        zs = [kf.position[2] for kf in scene.camera]
        label = scene.kind.value if scene.kind not in seen_kinds else None
        seen_kinds.add(scene.kind)
        ax.plot(xs, ys, zs, color=KIND_COLORS[scene.kind], label=label, linewidth=1.5)
    if timeline.scenes:
        first = timeline.scenes[0].camera[0].position
        ax.scatter([first[0]], [first[1]], [first[2]], color="black", marker="o", s=30)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_zlabel("z")
    ax.set_title("camera path")
    ax.legend(loc="upper right")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_timeline_chart(timeline: Timeline, path: Path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(10, 2.8))
    start = 0.0
    for scene in timeline.scenes:
        ax.broken_barh([(start, scene.duration)], (0, 1), facecolors=KIND_COLORS[scene.kind])
        if scene.kind is not SceneKind.TRANSITION:
            ax.text(start + scene.duration / 2, 1.08, scene.subject,
                    ha="center", va="bottom", fontsize=7, rotation=30)
        start += scene.duration
    ax.set_xlim(0, max(start, 1.0))
    ax.set_ylim(0, 1.9)
    ax.set_yticks([])
    ax.set_xlabel("time [s]")
    ax.set_title("scene sequence")
    handles = [plt.Rectangle((0, 0), 1, 1, facecolor=c) for c in KIND_COLORS.values()]
    ax.legend(handles, [k.value for k in KIND_COLORS], loc="upper right", fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def write_report(timeline: Timeline, out_dir: Path | str) -> list[Path]:
    """Render the full report; returns the written file paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    table = out_dir / "scenes.csv"
    camera_png = out_dir / "camera_path.png"
    chart_png = out_dir / "timeline.png"
    write_scene_table(timeline, table)
    plot_camera_path(timeline, camera_png)
    plot_timeline_chart(timeline, chart_png)
    return [table, camera_png, chart_png]
