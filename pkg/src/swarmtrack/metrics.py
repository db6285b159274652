"""Tracking evaluation: MOTA, IDF1, and identity switches.

Per-frame correspondences follow the CLEAR convention: pairs matched
in the previous frame persist while their IoU stays above threshold,
then the Hungarian algorithm matches the remainder on 1 - IoU.  An
identity switch is counted when a ground-truth object's matched
hypothesis id differs from the last one it ever had (gaps included).
IDF1 comes from the optimal global identity mapping between GT and
hypothesis trajectories.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .geometry import BBox, iou_matrix


@dataclass
class TrackFile:
    """Flat record list (frame, id, box, confidence)."""

    records: list[tuple[int, int, BBox, float]]

    def by_frame(self) -> dict[int, list[tuple[int, BBox]]]:
        out: dict[int, list[tuple[int, BBox]]] = defaultdict(list)
        for frame, tid, box, _ in self.records:
            out[frame].append((tid, box))
        # Sorted by id so evaluation does not depend on record order.
        return {frame: sorted(items, key=lambda p: p[0]) for frame, items in out.items()}


@dataclass(frozen=True)
class MetricsReport:
    mota: float
    idf1: float
    idsw: int
    fp: int
    fn: int
    gt_count: int


def _check_unique(frames: dict[int, list[tuple[int, BBox]]], label: str) -> None:
    for frame, items in frames.items():
        ids = [tid for tid, _ in items]
        if len(ids) != len(set(ids)):
            raise ValueError(f"{label}: duplicate ids in frame {frame}")


def _overlap_counts(
    gt_frames: dict, hyp_frames: dict, iou_threshold: float
) -> dict[tuple[int, int], int]:
    """Frames where each (gt id, hyp id) pair overlaps above threshold."""
    counts: dict[tuple[int, int], int] = defaultdict(int)
    for frame in set(gt_frames) & set(hyp_frames):
        g_items = gt_frames[frame]
        h_items = hyp_frames[frame]
        overlap = iou_matrix(
            np.array([b.as_array() for _, b in g_items]),
            np.array([b.as_array() for _, b in h_items]),
        )
        for i, j in zip(*np.nonzero(overlap >= iou_threshold)):
            counts[(g_items[i][0], h_items[j][0])] += 1
    return dict(counts)


def _identity_matching(
    counts: dict[tuple[int, int], int]
) -> tuple[int, dict[int, int]]:
    """Max-total-overlap bipartite matching; returns (IDTP, gt->hyp map)."""
    if not counts:
        return 0, {}
    g_ids = sorted({g for g, _ in counts})
    h_ids = sorted({h for _, h in counts})
    weights = np.zeros((len(g_ids), len(h_ids)))
    for (g, h), n in counts.items():
        weights[g_ids.index(g), h_ids.index(h)] = n
    rows, cols = linear_sum_assignment(-weights)
    mapping = {
        g_ids[i]: h_ids[j] for i, j in zip(rows, cols) if weights[i, j] > 0
    }
    idtp = int(sum(weights[i, j] for i, j in zip(rows, cols)))
    return idtp, mapping


def trajectory_matches(
    gt: "TrackFile", hyp: "TrackFile", iou_threshold: float = 0.5
) -> dict[int, int | None]:
    """Optimal global identity mapping gt id -> hyp id (None if unmatched)."""
    gt_frames = gt.by_frame()
    hyp_frames = hyp.by_frame()
    counts = _overlap_counts(gt_frames, hyp_frames, iou_threshold)
    _, mapping = _identity_matching(counts)
    all_gt = {tid for items in gt_frames.values() for tid, _ in items}
    return {g: mapping.get(g) for g in sorted(all_gt)}


def evaluate(gt: TrackFile, hyp: TrackFile, iou_threshold: float = 0.5) -> MetricsReport:
    """Score a hypothesis file against ground truth."""
    if not 0.0 < iou_threshold < 1.0:
        raise ValueError(f"iou_threshold must be in (0, 1), got {iou_threshold}")
    gt_frames = gt.by_frame()
    hyp_frames = hyp.by_frame()
    _check_unique(gt_frames, "ground truth")
    _check_unique(hyp_frames, "hypothesis")

    fp = fn = idsw = 0
    gt_count = sum(len(v) for v in gt_frames.values())
    hyp_count = sum(len(v) for v in hyp_frames.values())
    prev_pairs: dict[int, int] = {}
    last_match: dict[int, int] = {}

    for frame in sorted(set(gt_frames) | set(hyp_frames)):
        g_items = gt_frames.get(frame, [])
        h_items = hyp_frames.get(frame, [])
        pairs: dict[int, int] = {}
        if g_items and h_items:
            overlap = iou_matrix(
                np.array([b.as_array() for _, b in g_items]),
                np.array([b.as_array() for _, b in h_items]),
            )
            g_index = {tid: i for i, (tid, _) in enumerate(g_items)}
            h_index = {tid: j for j, (tid, _) in enumerate(h_items)}
            # Persistence: keep last frame's pairs that still overlap.
            for g, h in prev_pairs.items():
                gi = g_index.get(g)
                hj = h_index.get(h)
                if gi is not None and hj is not None and overlap[gi, hj] >= iou_threshold:
                    pairs[g] = h
            used_h = set(pairs.values())
            rest_g = [i for tid, i in sorted(g_index.items()) if tid not in pairs]
            rest_h = [j for tid, j in sorted(h_index.items()) if tid not in used_h]
            if rest_g and rest_h:
                cost = 1.0 - overlap[np.ix_(rest_g, rest_h)]
                for i, j in zip(*linear_sum_assignment(cost)):
                    gi, hj = rest_g[i], rest_h[j]
                    if overlap[gi, hj] >= iou_threshold:
                        pairs[g_items[gi][0]] = h_items[hj][0]
        fn += len(g_items) - len(pairs)
        fp += len(h_items) - len(pairs)
        for g, h in pairs.items():
            if g in last_match and last_match[g] != h:
                idsw += 1
            last_match[g] = h
        prev_pairs = pairs

    counts = _overlap_counts(gt_frames, hyp_frames, iou_threshold)
    idtp, _ = _identity_matching(counts)
    denom = gt_count + hyp_count
    idf1 = 100.0 * 2.0 * idtp / denom if denom else 100.0
    mota = 100.0 * (1.0 - (fn + fp + idsw) / max(gt_count, 1))
    return MetricsReport(
        mota=mota, idf1=idf1, idsw=idsw, fp=fp, fn=fn, gt_count=gt_count
    )
