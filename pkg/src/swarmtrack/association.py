"""Target-oriented cost matrix and deterministic Hungarian assignment.

Cost entries combine the particle-averaged motion cost, the detection
confidence complement, and the track penalty:
    C_ij = lambda_p * mean_s[(1 - IoU) * min(dist, d_od)/d_od]
         + lambda_d * (1 - conf_j) + lambda_h * penalty_i
All terms live in [0, 1], so entries do too.  The solver returns the
minimum-total-cost assignment; among equal-cost optima it picks the
lexicographically smallest (row, col) list via a two-pass selection
with exact subproblem checks (no epsilon perturbation of the matrix).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import fsum

import numpy as np
from scipy.optimize import linear_sum_assignment

from .config import TrackerConfig
from .geometry import (
    BBox,
    Detection,
    center_distance,
    center_distance_matrix,
    iou,
    iou_matrix,
)


@dataclass
class CostMatrix:
    entries: np.ndarray  # (T, D)
    track_ids: list[int]


@dataclass
class AssignmentResult:
    matches: list[tuple[int, int]]  # (track id, detection index)
    unmatched_tracks: list[int]
    unmatched_detections: list[int]


def motion_cost(p: BBox, det: BBox, d_od: float) -> float:
    """Per-particle motion cost (1 - IoU) * min(dist, d_od)/d_od, in [0, 1]."""
    return (1.0 - iou(p, det)) * (min(center_distance(p, det), d_od) / d_od)


def build_cost_matrix(tracks, dets: list[Detection], cfg: TrackerConfig) -> CostMatrix:
    """Assemble the T x D cost matrix from each track's particle set."""
    t, d = len(tracks), len(dets)
    entries = np.zeros((t, d), dtype=np.float64)
    if t and d:
        det_arr = np.array([dt.box.as_array() for dt in dets])
        det_diag = np.hypot(det_arr[:, 2], det_arr[:, 3])
        conf = np.array([dt.conf for dt in dets])
        for i, tr in enumerate(tracks):
            parts = tr.particles
            if not parts:
                raise ValueError(f"track {tr.id} carries no particles")
            p_arr = np.array([p.state.as_array() for p in parts])
            # d_od is the mean of the track diagonal and each detection diagonal.
            d_od = 0.5 * (tr.state.diag + det_diag)
            dist = center_distance_matrix(p_arr, det_arr)
            overlap = iou_matrix(p_arr, det_arr)
            c_m = (1.0 - overlap) * (np.minimum(dist, d_od[None, :]) / d_od[None, :])
            entries[i] = (
                cfg.lambda_p * c_m.mean(axis=0)
                + cfg.lambda_d * (1.0 - conf)
                + cfg.lambda_h * tr.penalty
            )
    return CostMatrix(entries=entries, track_ids=[tr.id for tr in tracks])


def _lexicographic_assignment(entries: np.ndarray) -> list[tuple[int, int]]:
    """Min-cost assignment, lexicographically smallest among ties.

    Pass 1 computes the optimal total.  Pass 2 fixes rows in order,
    forcing the smallest column that still admits an exactly-optimal
    completion; completions are certified by solving the remaining
    subproblem, with a row/column-minima lower bound to prune
    candidates cheaply.  Totals are compared as single fsum values so
    equality is order-independent.
    """
    t, d = entries.shape
    rows, cols = linear_sum_assignment(entries)
    completion = dict(zip(rows.tolist(), cols.tolist()))
    best_total = fsum(entries[r, c] for r, c in completion.items())
    fixed: list[tuple[int, int]] = []
    fixed_cost: list[float] = []
    avail = list(range(d))
    for r in range(t):
        rows_after = list(range(r + 1, t))
        known = completion.pop(r, None)
        chosen = None
        for col in avail:
            if col == known:
                chosen = col
                break
            cols_rem = [c for c in avail if c != col]
            # Lower bound: per-row (or per-column) minima of the remainder.
            # Min never rounds, so one fsum keeps the bound comparison sound.
            if rows_after and cols_rem:
                sub = entries[np.ix_(rows_after, cols_rem)]
                mins = sub.min(axis=1) if t <= d else sub.min(axis=0)
                bound = fsum(fixed_cost + [entries[r, col]] + mins.tolist())
            else:
                bound = fsum(fixed_cost + [entries[r, col]])
            if bound > best_total:
                continue
            if rows_after and cols_rem:
                rr, cc = linear_sum_assignment(sub)
                sub_pairs = [(rows_after[i], cols_rem[j]) for i, j in zip(rr, cc)]
            else:
                sub_pairs = []
            total = fsum(
                fixed_cost + [entries[r, col]] + [entries[i, j] for i, j in sub_pairs]
            )
            if total == best_total:
                chosen = col
                completion = dict(sub_pairs)
                break
        if chosen is not None:
            fixed.append((r, chosen))
            fixed_cost.append(float(entries[r, chosen]))
            avail.remove(chosen)
    return fixed


def solve_assignment(c: CostMatrix, gate: float) -> AssignmentResult:
    """Optimal one-to-one assignment with per-pair gating.

    Matched pairs whose entry exceeds the gate are demoted to
    unmatched on both sides.
    """
    entries = np.asarray(c.entries, dtype=np.float64)
    t, d = entries.shape
    if t == 0 or d == 0:
        return AssignmentResult([], list(c.track_ids), list(range(d)))
    if not np.all(np.isfinite(entries)):
        raise ValueError("cost matrix entries must be finite")
    assigned = dict(_lexicographic_assignment(entries))
    matches: list[tuple[int, int]] = []
    unmatched_tracks: list[int] = []
    matched_cols: set[int] = set()
    for r in range(t):
        col = assigned.get(r)
        if col is not None and entries[r, col] <= gate:
            matches.append((c.track_ids[r], col))
            matched_cols.add(col)
        else:
            unmatched_tracks.append(c.track_ids[r])
    unmatched_detections = [j for j in range(d) if j not in matched_cols]
    return AssignmentResult(matches, unmatched_tracks, unmatched_detections)


def classify(
    assign: AssignmentResult, dets: list[Detection], conf_new: float
) -> tuple[list[tuple[int, int]], list[int], list[int]]:
    """Split an assignment into strong matches, weak tracks, and births."""
    births = [j for j in assign.unmatched_detections if dets[j].conf >= conf_new]
    return list(assign.matches), list(assign.unmatched_tracks), births
