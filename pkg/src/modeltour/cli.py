"""Command-line front end: forage, synthesize, narrate, inspect.

Exit codes: 0 on success, 1 on domain/validation errors, 2 on I/O or
environment errors.  Remote fetch problems during foraging are warnings,
not failures.

Environment overrides: MODELTOUR_ENDPOINT (extract API URL template with a
``{language}`` placeholder) and MODELTOUR_CACHE_DIR.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from .documents import narration_script, narration_ssml, timeline_from_json, timeline_to_json
from .errors import ModeltourError
from .commentary import TemplateSet
from .foraging import forage
from .model import parse_model
from .sources import DEFAULT_ENDPOINT_TEMPLATE, RemoteConfig, RemoteProvider
from .story import deserialize_graph, serialize_graph
from .timeline import SynthesisConfig, generate_from_text, generate_self_guided

logger = logging.getLogger(__name__)

DEFAULT_CACHE_DIR = ".modeltour-cache"


def _env_endpoint() -> str:
    return os.environ.get("MODELTOUR_ENDPOINT", DEFAULT_ENDPOINT_TEMPLATE)


def _env_cache_dir() -> str:
    return os.environ.get("MODELTOUR_CACHE_DIR", DEFAULT_CACHE_DIR)


def _priority_override(value: str) -> tuple[str, float]:
    try:
        node_id, scalar = value.split("=", 1)
        return node_id, float(scalar)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(
            f"expected id=value, got {value!r}"
        ) from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="modeltour",
        description="Synthesize narrated camera tours of hierarchical 3D structural models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_forage = sub.add_parser(
        "forage", help="build a story graph from a model document"
    )
    p_forage.add_argument("model", type=Path, help="model document (JSON)")
    p_forage.add_argument("--output", "-o", type=Path, default=Path("story-graph.json"))
    p_forage.add_argument("--lang", default="en", help="description language (IETF tag)")
    p_forage.add_argument("--cache-dir", type=Path, default=None,
                          help=f"extract cache directory (default {DEFAULT_CACHE_DIR})")
    p_forage.add_argument("--offline", action="store_true",
                          help="serve descriptions from the cache only; no network")
    p_forage.add_argument("--lazy-remote", action="store_true",
                          help="skip remote lookups for nodes that have local text")
    p_forage.add_argument("--timeout", type=float, default=10.0, help="request timeout [s]")
    p_forage.add_argument("--delay", type=float, default=0.0,
                          help="pause between remote requests [s]")
    p_forage.add_argument("--concurrency", type=int, default=4,
                          help="max in-flight description fetches")

    p_synth = sub.add_parser("synthesize", help="generate a scene timeline")
    p_synth.add_argument("mode", choices=("self-guided", "from-text"))
    p_synth.add_argument("--graph", type=Path, required=True, help="story-graph document")
    p_synth.add_argument("--model", type=Path, required=True, help="model document")
    p_synth.add_argument("--text", type=Path, default=None,
                         help="input script (required for from-text mode)")
    p_synth.add_argument("--output", "-o", type=Path, default=Path("timeline.json"))
    p_synth.add_argument("--seed", type=int, default=0, help="random seed")
    p_synth.add_argument("--duration", type=float, default=120.0,
                         help="target duration for self-guided mode [s]")
    p_synth.add_argument("--templates", type=Path, default=None,
                         help="commentary template file")
    p_synth.add_argument("--p-lower", type=float, default=1.0, help="leaf-node priority")
    p_synth.add_argument("--p-higher", type=float, default=2.0, help="inner-node priority")
    p_synth.add_argument("--priority-override", type=_priority_override, action="append",
                         default=[], metavar="ID=VALUE",
                         help="per-node priority override (repeatable)")
    p_synth.add_argument("--wpm", type=float, default=150.0, help="narration pace [words/min]")
    p_synth.add_argument("--fps", type=float, default=30.0, help="camera keyframe rate")
    p_synth.add_argument("--min-scene-seconds", type=float, default=4.0,
                         help="minimum scene duration [s]")
    p_synth.add_argument("--distance-factor", type=float, default=3.0,
                         help="camera stand-off distance in target radii")
    p_synth.add_argument("--angular-speed", type=float, default=12.0,
                         help="orbit speed [deg/s]")
    p_synth.add_argument("--fov", type=float, default=60.0, help="field of view [deg]")

    p_narrate = sub.add_parser("narrate", help="export the narration script of a timeline")
    p_narrate.add_argument("timeline", type=Path, help="timeline document")
    p_narrate.add_argument("--format", choices=("text", "ssml"), default="text")
    p_narrate.add_argument("--output", "-o", type=Path, default=None,
                           help="output file (stdout when omitted)")

    p_inspect = sub.add_parser("inspect", help="write a scene table and figures for a timeline")
    p_inspect.add_argument("timeline", type=Path, help="timeline document")
    p_inspect.add_argument("--output", "-o", type=Path, default=Path("report"),
                           dest="out_dir", help="report directory")
    return parser


def cmd_forage(args: argparse.Namespace) -> int:
    model = parse_model(args.model.read_bytes())
    cache_dir = args.cache_dir if args.cache_dir is not None else Path(_env_cache_dir())
    config = RemoteConfig(
        endpoint_template=_env_endpoint(),
        language=args.lang,
        timeout=args.timeout,
        cache_dir=cache_dir,
        offline=args.offline,
        request_delay=args.delay,
    )
    provider = RemoteProvider(config)
    graph, stats = forage(
        model, [provider], concurrency=args.concurrency, lazy=args.lazy_remote
    )
    args.output.write_bytes(serialize_graph(graph))
    print(
        f"story graph: {len(graph.nodes)} nodes, "
        f"{graph.structural_edge_count()} structural edges, "
        f"{len(graph.functional_edges())} functional edges"
    )
    print(
        f"descriptions: {stats.remote_hits} remote hits, {stats.remote_misses} misses, "
        f"{stats.remote_errors} transport errors, {stats.fallbacks} fallbacks"
    )
    print(f"wrote {args.output}")
    return 0


def cmd_synthesize(args: argparse.Namespace) -> int:
    graph = deserialize_graph(args.graph.read_bytes())
    model = parse_model(args.model.read_bytes())
    config = SynthesisConfig(
        seed=args.seed,
        target_duration=args.duration,
        fps=args.fps,
        wpm=args.wpm,
        min_scene_seconds=args.min_scene_seconds,
        distance_factor=args.distance_factor,
        angular_speed=args.angular_speed,
        fov_degrees=args.fov,
        p_lower=args.p_lower,
        p_higher=args.p_higher,
        priority_overrides=dict(args.priority_override),
        templates=TemplateSet.load(args.templates) if args.templates else None,
    )
    if args.mode == "self-guided":
        timeline = generate_self_guided(graph, model, config)
    else:
        if args.text is None:
            raise ModeltourError("from-text mode requires --text")
        timeline = generate_from_text(graph, model, args.text.read_text("utf-8"), config)
    args.output.write_bytes(timeline_to_json(timeline))
    print(f"timeline: {len(timeline)} scenes, {timeline.total_duration:.1f} s total")
    print(f"wrote {args.output}")
    return 0


def cmd_narrate(args: argparse.Namespace) -> int:
    timeline = timeline_from_json(args.timeline.read_bytes())
    if args.format == "text":
        script = narration_script(timeline)
    else:
        script = narration_ssml(timeline)
    if args.output is None:
        sys.stdout.write(script)
    else:
        args.output.write_text(script, encoding="utf-8")
        print(f"wrote {args.output}")
    return 0


def cmd_inspect(args: argparse.Namespace) -> int:
    from .report import write_report

    timeline = timeline_from_json(args.timeline.read_bytes())
    for path in write_report(timeline, args.out_dir):
        print(f"wrote {path}")
    return 0


_COMMANDS = {
    "forage": cmd_forage,
    "synthesize": cmd_synthesize,
    "narrate": cmd_narrate,
    "inspect": cmd_inspect,
}


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ModeltourError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
