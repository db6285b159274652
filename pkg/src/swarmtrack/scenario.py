"""Synthetic tracking scenarios: waypoint trajectories plus a noisy detector.

Ground-truth boxes move piecewise-linearly through per-target
waypoints.  Detections are ground truth plus Gaussian center noise,
thinned by dropout and occlusion windows, and padded with uniform
false positives.  Everything is a pure function of the ScenarioSpec
(seed included), so generated files are byte-identical across runs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import BBox, Detection
from .metrics import TrackFile


@dataclass
class TargetPath:
    target_id: int
    waypoints: list[tuple[int, float, float]]  # (frame, u, v)
    size: tuple[float, float] = (30.0, 60.0)


@dataclass
class ScenarioSpec:
    n_frames: int
    width: int = 640
    height: int = 480
    targets: list[TargetPath] = field(default_factory=list)
    occlusions: list[tuple[int, int, int]] = field(default_factory=list)  # (target, start, end)
    sigma_det: float = 0.0
    dropout: float = 0.0
    dropout_start: int = 1  # first frame dropout applies to
    fp_rate: float = 0.0
    fp_conf: float = 0.5
    det_conf: float = 1.0
    seed: int = 0
    make_frames: bool = False


def validate_spec(spec: ScenarioSpec) -> list[str]:
    bad = []
    if spec.n_frames < 1:
        bad.append(f"frames must be >= 1, got {spec.n_frames}")
    if spec.width < 1 or spec.height < 1:
        bad.append(f"image size must be positive, got {spec.width}x{spec.height}")
    ids = [t.target_id for t in spec.targets]
    if len(ids) != len(set(ids)):
        bad.append("duplicate target ids")
    for t in spec.targets:
        if not t.waypoints:
            bad.append(f"target {t.target_id} has no waypoints")
        if t.size[0] <= 0 or t.size[1] <= 0:
            bad.append(f"target {t.target_id} has non-positive size")
        for f, _, _ in t.waypoints:
            if not 1 <= f <= spec.n_frames:
                bad.append(f"target {t.target_id} waypoint frame {f} outside [1, {spec.n_frames}]")
    for tid, start, end in spec.occlusions:
        if not (1 <= start <= end <= spec.n_frames):
            bad.append(f"occlusion window ({start}, {end}) outside [1, {spec.n_frames}]")
        if tid not in ids:
            bad.append(f"occlusion names unknown target {tid}")
    if not 0.0 <= spec.dropout < 1.0:
        bad.append(f"dropout must be in [0, 1), got {spec.dropout}")
    if spec.dropout_start < 1:
        bad.append(f"dropout_start must be >= 1, got {spec.dropout_start}")
    if spec.sigma_det < 0.0 or spec.fp_rate < 0.0:
        bad.append("sigma_det and fp_rate must be >= 0")
    return bad


def parse_scenario_spec(path) -> ScenarioSpec:
    """Parse the key = value scenario format (waypoint./size./occlusion.<id>)."""
    scalars: dict[str, str] = {}
    waypoints: dict[int, list[tuple[int, float, float]]] = {}
    sizes: dict[int, tuple[float, float]] = {}
    occlusions: list[tuple[int, int, int]] = []
    problems: list[str] = []
    with open(path, "r", encoding="ascii") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                problems.append(f"{path}:{lineno}: expected 'key = value'")
                continue
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            try:
                if key.startswith("waypoint."):
                    tid = int(key.split(".", 1)[1])
                    f, u, v = value.split(",")
                    waypoints.setdefault(tid, []).append((int(f), float(u), float(v)))
                elif key.startswith("size."):
                    tid = int(key.split(".", 1)[1])
                    w, h = value.split(",")
                    sizes[tid] = (float(w), float(h))
                elif key.startswith("occlusion."):
                    tid = int(key.split(".", 1)[1])
                    start, end = value.split(",")
                    occlusions.append((tid, int(start), int(end)))
                elif key in (
                    "frames",
                    "width",
                    "height",
                    "seed",
                ):
                    scalars[key] = value
                elif key in (
                    "sigma_det",
                    "dropout",
                    "dropout_start",
                    "fp_rate",
                    "fp_conf",
                    "det_conf",
                ):
                    scalars[key] = value
                elif key == "make_frames":
                    scalars[key] = value
                else:
                    problems.append(f"{path}:{lineno}: unknown key {key!r}")
            except ValueError as exc:
                problems.append(f"{path}:{lineno}: bad value for {key}: {exc}")
    if problems:
        raise ValueError("; ".join(problems))
    targets = [
        TargetPath(
            target_id=tid,
            waypoints=sorted(wps),
            size=sizes.get(tid, (30.0, 60.0)),
        )
        for tid, wps in sorted(waypoints.items())
    ]
    spec = ScenarioSpec(
        n_frames=int(scalars.get("frames", "1")),
        width=int(scalars.get("width", "640")),
        height=int(scalars.get("height", "480")),
        targets=targets,
        occlusions=occlusions,
        sigma_det=float(scalars.get("sigma_det", "0")),
        dropout=float(scalars.get("dropout", "0")),
        dropout_start=int(scalars.get("dropout_start", "1")),
        fp_rate=float(scalars.get("fp_rate", "0")),
        fp_conf=float(scalars.get("fp_conf", "0.5")),
        det_conf=float(scalars.get("det_conf", "1")),
        seed=int(scalars.get("seed", "0")),
        make_frames=scalars.get("make_frames", "false").lower()
        in ("true", "yes", "on", "1"),
    )
    bad = validate_spec(spec)
    if bad:
        raise ValueError("; ".join(bad))
    return spec


def _interpolate(target: TargetPath) -> dict[int, BBox]:
    wps = sorted(target.waypoints)
    frames = np.arange(wps[0][0], wps[-1][0] + 1)
    us = np.interp(frames, [w[0] for w in wps], [w[1] for w in wps])
    vs = np.interp(frames, [w[0] for w in wps], [w[2] for w in wps])
    w, h = target.size
    return {int(f): BBox(float(u), float(v), w, h) for f, u, v in zip(frames, us, vs)}


def generate_scenario(
    spec: ScenarioSpec,
) -> tuple[TrackFile, dict[int, list[Detection]], dict[int, np.ndarray] | None]:
    """Build (ground truth, per-frame detections, optional frames)."""
    bad = validate_spec(spec)
    if bad:
        raise ValueError("; ".join(bad))
    rng = np.random.default_rng(spec.seed)
    paths = {t.target_id: _interpolate(t) for t in spec.targets}
    occluded = {
        (tid, f)
        for tid, start, end in spec.occlusions
        for f in range(start, end + 1)
    }
    gt_records: list[tuple[int, int, BBox, float]] = []
    dets: dict[int, list[Detection]] = {f: [] for f in range(1, spec.n_frames + 1)}
    mean_w = float(np.mean([t.size[0] for t in spec.targets])) if spec.targets else 30.0
    mean_h = float(np.mean([t.size[1] for t in spec.targets])) if spec.targets else 60.0

    for frame in range(1, spec.n_frames + 1):
        for tid in sorted(paths):
            box = paths[tid].get(frame)
            if box is None:
                continue
            gt_records.append((frame, tid, box, 1.0))
            # Draws happen for every live target so occlusion windows
            # never shift another target's noise stream.
            noise = rng.normal(0.0, spec.sigma_det, size=2) if spec.sigma_det > 0 else (0.0, 0.0)
            dropped = (
                spec.dropout > 0
                and rng.uniform() < spec.dropout
                and frame >= spec.dropout_start
            )
            if (tid, frame) in occluded or dropped:
                continue
            dets[frame].append(
                Detection(
                    box=BBox(box.u + float(noise[0]), box.v + float(noise[1]), box.w, box.h),
                    conf=spec.det_conf,
                )
            )
        if spec.fp_rate > 0:
            for _ in range(int(rng.poisson(spec.fp_rate))):
                fw = mean_w * rng.uniform(0.8, 1.2)
                fh = mean_h * rng.uniform(0.8, 1.2)
                fu = rng.uniform(fw / 2, spec.width - fw / 2)
                fv = rng.uniform(fh / 2, spec.height - fh / 2)
                dets[frame].append(
                    Detection(box=BBox(fu, fv, fw, fh), conf=spec.fp_conf)
                )

    frames_out: dict[int, np.ndarray] | None = None
    if spec.make_frames:
        frames_out = {}
        shades = {tid: 100 + 25 * (i % 6) for i, tid in enumerate(sorted(paths))}
        for frame in range(1, spec.n_frames + 1):
            img = np.full((spec.height, spec.width), 60, dtype=np.uint8)
            for tid in sorted(paths):
                box = paths[tid].get(frame)
                if box is None or (tid, frame) in occluded:
                    continue
                left, top, w, h = box.to_topleft()
                x1 = max(0, int(round(left)))
                y1 = max(0, int(round(top)))
                x2 = min(spec.width, int(round(left + w)))
                y2 = min(spec.height, int(round(top + h)))
                if x2 > x1 and y2 > y1:
                    img[y1:y2, x1:x2] = shades[tid]
            frames_out[frame] = img
    return TrackFile(records=gt_records), dets, frames_out
