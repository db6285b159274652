"""MOTChallenge CSV parsing/writing and key = value config files.

Record format (comma-separated, LF newlines):
    frame, id, left, top, w, h, conf, x, y, z
Detections carry id -1.  Result files reuse the first placeholder
column for the track status (2 strong, 1 new, 0 weak) and write
conf = 1 - penalty; standard parsers ignore those columns.
"""

from __future__ import annotations

import dataclasses
import warnings

from .config import ConfigError, TrackerConfig, validate_config
from .geometry import BBox, Detection
from .metrics import TrackFile

_STATUS_CODE = {"strong": 2, "new": 1, "weak": 0}
_CODE_STATUS = {v: k for k, v in _STATUS_CODE.items()}


def _parse_rows(path):
    """Yield (lineno, fields) for every non-empty line."""
    with open(path, "r", encoding="ascii") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            yield lineno, line.split(",")


def _parse_record(path, lineno, fields):
    if len(fields) < 7:
        raise ValueError(
            f"{path}:{lineno}: expected at least 7 comma-separated fields, got {len(fields)}"
        )
    try:
        frame = int(fields[0])
        tid = int(fields[1])
        left, top, w, h = (float(x) for x in fields[2:6])
        conf = float(fields[6])
    except ValueError as exc:
        raise ValueError(f"{path}:{lineno}: malformed record: {exc}") from None
    if frame < 1:
        raise ValueError(f"{path}:{lineno}: frame index must be >= 1, got {frame}")
    if w <= 0 or h <= 0:
        warnings.warn(f"{path}:{lineno}: skipping record with non-positive size")
        return None
    if not 0.0 <= conf <= 1.0:
        warnings.warn(f"{path}:{lineno}: confidence {conf} clamped to [0, 1]")
        conf = min(1.0, max(0.0, conf))
    return frame, tid, BBox.from_topleft(left, top, w, h), conf


def parse_track_file(path) -> TrackFile:
    """Parse a GT or result file into a flat record list."""
    records = []
    for lineno, fields in _parse_rows(path):
        rec = _parse_record(path, lineno, fields)
        if rec is not None:
            records.append(rec)
    return TrackFile(records=records)


def parse_det_file(path) -> dict[int, list[Detection]]:
    """Parse detections grouped per frame; absent frames are simply missing."""
    out: dict[int, list[Detection]] = {}
    for lineno, fields in _parse_rows(path):
        rec = _parse_record(path, lineno, fields)
        if rec is None:
            continue
        frame, _, box, conf = rec
        out.setdefault(frame, []).append(Detection(box=box, conf=conf))
    return out


def parse_result_statuses(path) -> dict[int, list[tuple[int, BBox, str]]]:
    """Parse a result file keeping the status column for overlays."""
    out: dict[int, list[tuple[int, BBox, str]]] = {}
    for lineno, fields in _parse_rows(path):
        rec = _parse_record(path, lineno, fields)
        if rec is None:
            continue
        frame, tid, box, _ = rec
        status = "strong"
        if len(fields) > 7:
            try:
                status = _CODE_STATUS.get(int(float(fields[7])), "strong")
            except ValueError:
                pass
        out.setdefault(frame, []).append((tid, box, status))
    return out


def write_result_file(frames, path, include_weak: bool = True) -> None:
    """Write per-frame track outputs, sorted by (frame, id)."""
    rows = []
    for frame in sorted(frames):
        for out in sorted(frames[frame], key=lambda o: o.id):
            if not include_weak and out.status == "weak":
                continue
            left, top, w, h = out.box.to_topleft()
            conf = 1.0 - out.penalty
            code = _STATUS_CODE.get(out.status, -1)
            rows.append(
                f"{frame},{out.id},{left:.2f},{top:.2f},{w:.2f},{h:.2f},"
                f"{conf:.6f},{code},-1,-1"
            )
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        for row in rows:
            fh.write(row + "\n")


def write_gt_file(gt: TrackFile, path) -> None:
    rows = sorted(gt.records, key=lambda r: (r[0], r[1]))
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        for frame, tid, box, conf in rows:
            left, top, w, h = box.to_topleft()
            fh.write(
                f"{frame},{tid},{left:.2f},{top:.2f},{w:.2f},{h:.2f},{conf:.6f},-1,-1,-1\n"
            )


def write_det_file(dets: dict[int, list[Detection]], path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        for frame in sorted(dets):
            for det in dets[frame]:
                left, top, w, h = det.box.to_topleft()
                fh.write(
                    f"{frame},-1,{left:.2f},{top:.2f},{w:.2f},{h:.2f},{det.conf:.6f},-1,-1,-1\n"
                )


_BOOL_WORDS = {
    "true": True,
    "false": False,
    "yes": True,
    "no": False,
    "on": True,
    "off": False,
    "1": True,
    "0": False,
}


def parse_config(path) -> TrackerConfig:
    """Parse a key = value config file; unknown keys are rejected.

    Missing keys keep their defaults; `entrance = left,top,right,bottom`
    lines may repeat.  The resulting config is validated.
    """
    field_types = {f.name: f.type for f in dataclasses.fields(TrackerConfig)}
    kwargs: dict[str, object] = {}
    entrances: list[tuple[float, float, float, float]] = []
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
            if key == "entrance":
                parts = value.split(",")
                if len(parts) != 4:
                    problems.append(f"{path}:{lineno}: entrance needs left,top,right,bottom")
                    continue
                entrances.append(tuple(float(p) for p in parts))
                continue
            if key not in field_types or key == "entrance_areas":
                problems.append(f"{path}:{lineno}: unknown key {key!r}")
                continue
            kind = field_types[key]
            try:
                if kind == "bool":
                    if value.lower() not in _BOOL_WORDS:
                        raise ValueError(f"not a boolean: {value!r}")
                    kwargs[key] = _BOOL_WORDS[value.lower()]
                elif kind == "int":
                    kwargs[key] = int(value)
                elif kind == "float":
                    kwargs[key] = float(value)
                else:
                    kwargs[key] = value
            except ValueError as exc:
                problems.append(f"{path}:{lineno}: bad value for {key}: {exc}")
    if problems:
        raise ConfigError(problems)
    if entrances:
        kwargs["entrance_areas"] = tuple(entrances)
    cfg = TrackerConfig(**kwargs)
    violations = validate_config(cfg)
    if violations:
        raise ConfigError(violations)
    return cfg
