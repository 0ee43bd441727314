"""Command-line driver: headless replay, matching diagnostics, solving, validation.

Exit codes: 0 success, 1 domain error (bad document, failed validation,
no such attribute), 2 usage error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import document as docio
from .errors import SquidgetError
from .matching import MatchResult, select
from .scene import parse_path, path_str
from .session import replay
from .validation import random_probes, validate_document


def _load_scene(path: str, overrides):
    text = Path(path).read_text()
    scene, registry, config = docio.loads_scene(text)
    for key, value in overrides or []:
        config.override(key, value)
    registry.config = config
    return text, scene, registry, config


def _load_stroke(path: str):
    header, events = docio.loads_log(Path(path).read_text())
    return docio.stroke_from_log(events)


def _config_pairs(values):
    pairs = []
    for item in values or []:
        if "=" not in item:
            raise SquidgetError(f"bad --config override (want key=value): {item}")
        key, _, value = item.partition("=")
        pairs.append((key, value))
    return pairs


def cmd_replay(args) -> int:
    overrides = _config_pairs(args.config)
    scene_text, scene, registry, config = _load_scene(args.scene, overrides)
    header, events = docio.loads_log(Path(args.log).read_text())
    if not overrides:
        docio.verify_log_header(header, scene_text, config)
    session, effects = replay(events, scene, registry, config)
    out_text = docio.dumps_scene(scene, registry, config)
    if args.output:
        Path(args.output).write_text(out_text)
    else:
        sys.stdout.write(out_text)
    selections = sum(1 for e in effects
                     if e["kind"] == "selection-highlight" and e.get("squidget"))
    changed = sum(1 for e in effects if e["kind"] == "attribute-changed")
    created = sum(1 for e in effects if e["kind"] in ("squidget-created", "canvas-created"))
    deleted = sum(len(e.get("ids", ())) for e in effects if e["kind"] == "squidget-deleted")
    errors = [e["message"] for e in effects if e["kind"] == "error"]
    report = sys.stderr if not args.output else sys.stdout
    print(f"events: {len(events)}", file=report)
    print(f"selections: {selections}", file=report)
    print(f"attribute changes: {changed}", file=report)
    print(f"created: {created}  deleted: {deleted}", file=report)
    for message in errors:
        print(f"error effect: {message}", file=report)
    return 0


def _format_row(result: MatchResult) -> str:
    dev = f"{result.dev:.9g}" if result.dev is not None else "-"
    return (f"{result.squidget_id:<16} {result.kind:<10} "
            f"{result.distance:>14.9g} {dev:>14} {result.score:>14.9g}")


def cmd_match(args) -> int:
    _, scene, registry, config = _load_scene(args.scene, _config_pairs(args.config))
    stroke = _load_stroke(args.stroke)
    candidates: list[MatchResult] = []
    best = select(stroke, registry, scene, config, shape_only=args.shape_only,
                  candidates=candidates)
    print(f"{'id':<16} {'kind':<10} {'distance':>14} {'dev':>14} {'score':>14}")
    for row in candidates:
        print(_format_row(row))
    print(f"selected: {best.squidget_id}" if best else "selected: none")
    return 0


def cmd_solve(args) -> int:
    _, scene, registry, config = _load_scene(args.scene, _config_pairs(args.config))
    stroke = _load_stroke(args.stroke)
    path = parse_path(args.attr)
    from .matching import match_implicit
    from .solver import scalar_objective, solve_scalar

    target_obj = path[0]
    candidates = [imp for imp in registry.implicit_squidgets(scene)
                  if imp.object_id == target_obj]
    if not candidates:
        raise SquidgetError(f"no implicit squidgets for object {target_obj!r}")
    matches = [m for m in (match_implicit(stroke, imp, scene, config)
                           for imp in candidates) if m is not None]
    if not matches:
        raise SquidgetError("stroke does not fit any segment of the target object")
    best = min(matches, key=lambda m: (m.distance, m.squidget_id))
    update = solve_scalar(stroke, best.candidate, path, scene, registry)
    solved = update.changes[-1].new
    residual = scalar_objective(stroke, best.candidate, path, scene, registry)(solved)
    print(f"segment: {best.squidget_id}")
    print(f"solved: {path_str(path)} = {solved:.12g}")
    print(f"residual: {residual:.12g}")
    return 0


def cmd_validate(args) -> int:
    _, scene, registry, config = _load_scene(args.scene, _config_pairs(args.config))
    ok, bad = validate_document(scene, registry, config)
    if args.seed is not None:
        probe_ok, probe_bad = random_probes(args.seed, config)
        ok.extend(probe_ok)
        bad.extend(probe_bad)
    for line in ok:
        print(line)
    for line in bad:
        print(line)
    print(f"checks: {len(ok) + len(bad)}  violations: {len(bad)}")
    return 1 if bad else 0


def cmd_serve(args) -> int:
    from .server import serve

    serve(args.scene, host=args.host, port=args.port,
          overrides=_config_pairs(args.config))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="squidgets",
        description="Stroke-driven scene manipulation engine")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", action="append", metavar="KEY=VALUE",
                       help="override a config value (repeatable)")

    p = sub.add_parser("replay", help="replay an event log against a scene")
    p.add_argument("scene")
    p.add_argument("log")
    p.add_argument("-o", "--output", help="write the final document here")
    add_common(p)
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("match", help="rank every candidate for a stroke")
    p.add_argument("scene")
    p.add_argument("stroke")
    p.add_argument("--shape-only", action="store_true",
                   help="score with centered (translation-agnostic) distances")
    add_common(p)
    p.set_defaults(func=cmd_match)

    p = sub.add_parser("solve", help="fit one scalar attribute to a stroke")
    p.add_argument("scene")
    p.add_argument("stroke")
    p.add_argument("--attr", required=True, help="attribute path, e.g. lamp/shape/cone_angle")
    add_common(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("validate", help="check document invariants")
    p.add_argument("scene")
    p.add_argument("--seed", type=int, help="also run seeded randomized probes")
    add_common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("serve", help="serve the scene to the browser UI")
    p.add_argument("scene")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8765)
    add_common(p)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SquidgetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
