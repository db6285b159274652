"""Command-line front end: track, eval, synth, and overlay subcommands.

Exit codes: 0 success, 1 usage error, 2 data error.  All diagnostics
go to stderr; eval results go to stdout.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

from .baseline import GreedyIouTracker
from .config import TrackerConfig
from .metrics import evaluate
from .mot_io import (
    parse_config,
    parse_det_file,
    parse_result_statuses,
    parse_track_file,
    write_det_file,
    write_gt_file,
    write_result_file,
)
from .overlay import draw_tracks
from .pgm import read_pgm, write_pgm
from .pipeline import FrameInput, Tracker, TrackOutput
from .scenario import generate_scenario, parse_scenario_spec


class _UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str):  # noqa: A003 - argparse hook
        raise _UsageError(message)


def _cmd_track(args: argparse.Namespace) -> int:
    cfg = parse_config(args.config) if args.config else TrackerConfig()
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    if args.frames is None and not cfg.frameless:
        cfg = dataclasses.replace(cfg, frameless=True)
    dets = parse_det_file(args.det)
    if args.tracker == "baseline":
        tracker = GreedyIouTracker(conf_new=cfg.conf_new)
    else:
        tracker = Tracker(cfg)
    outputs: dict[int, list[TrackOutput]] = {}
    last = max(dets) if dets else 0
    for frame in range(1, last + 1):
        image = None
        if args.frames is not None:
            image = read_pgm(Path(args.frames) / f"{frame:06d}.pgm")
        outputs[frame] = tracker.step(FrameInput(frame, dets.get(frame, []), image))
    write_result_file(outputs, args.out, include_weak=args.include_weak)
    return 0


def _cmd_eval(args: argparse.Namespace) -> int:
    report = evaluate(parse_track_file(args.gt), parse_track_file(args.hyp), args.iou)
    print(f"MOTA  {report.mota:9.3f}")
    print(f"IDF1  {report.idf1:9.3f}")
    print(f"IDSW  {report.idsw:9d}")
    print(f"FP    {report.fp:9d}")
    print(f"FN    {report.fn:9d}")
    print(f"GT    {report.gt_count:9d}")
    return 0


def _cmd_synth(args: argparse.Namespace) -> int:
    spec = parse_scenario_spec(args.spec)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    gt, dets, frames = generate_scenario(spec)
    write_gt_file(gt, out_dir / "gt.txt")
    write_det_file(dets, out_dir / "det.txt")
    if frames is not None:
        frames_dir = out_dir / "frames"
        frames_dir.mkdir(exist_ok=True)
        for frame, img in sorted(frames.items()):
            write_pgm(frames_dir / f"{frame:06d}.pgm", img)
    return 0


def _cmd_overlay(args: argparse.Namespace) -> int:
    tracks = parse_result_statuses(args.tracks)
    frames_dir = Path(args.frames)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = sorted(frames_dir.glob("*.pgm"))
    if not paths:
        raise ValueError(f"no .pgm frames found in {frames_dir}")
    for path in paths:
        frame = int(path.stem)
        img = read_pgm(path)
        write_pgm(out_dir / path.name, draw_tracks(img.pixels, tracks.get(frame, [])))
    return 0


def _build_parser() -> _ArgumentParser:
    parser = _ArgumentParser(prog="swarmtrack", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    p_track = sub.add_parser("track", help="run the tracker over a detection file")
    p_track.add_argument("--det", required=True, help="MOT detection file")
    p_track.add_argument("--frames", help="directory of %%06d.pgm frames (omit for frameless)")
    p_track.add_argument("--config", help="key = value config file (defaults when omitted)")
    p_track.add_argument("--out", required=True, help="result file to write")
    p_track.add_argument("--seed", type=int, help="override the config seed")
    p_track.add_argument(
        "--include-weak",
        action=argparse.BooleanOptionalAction,
        default=True,
        help="write coasted (weak) tracks to the result file",
    )
    p_track.add_argument(
        "--tracker",
        choices=("swarm", "baseline"),
        default="swarm",
        help="tracking engine (baseline is the greedy-IoU reference)",
    )
    p_track.set_defaults(func=_cmd_track)

    p_eval = sub.add_parser("eval", help="score a result file against ground truth")
    p_eval.add_argument("--gt", required=True)
    p_eval.add_argument("--hyp", required=True)
    p_eval.add_argument("--iou", type=float, default=0.5)
    p_eval.set_defaults(func=_cmd_eval)

    p_synth = sub.add_parser("synth", help="generate a synthetic scenario")
    p_synth.add_argument("--spec", required=True, help="scenario spec file")
    p_synth.add_argument("--out-dir", required=True)
    p_synth.set_defaults(func=_cmd_synth)

    p_overlay = sub.add_parser("overlay", help="draw tracked boxes onto frames")
    p_overlay.add_argument("--frames", required=True, help="input frame directory")
    p_overlay.add_argument("--tracks", required=True, help="result file")
    p_overlay.add_argument("--out-dir", required=True)
    p_overlay.set_defaults(func=_cmd_overlay)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
