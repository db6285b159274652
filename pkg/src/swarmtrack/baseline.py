"""Greedy-IoU reference tracker, a deliberately simple harness baseline.

Matches tracks to detections by repeatedly taking the highest-IoU pair
above a floor, updates matched boxes to their detections, and drops
tracks after a few consecutive misses.  No coasting, no appearance, no
penalty bookkeeping; occlusions longer than max_age cost it the id.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import BBox, Detection, iou_matrix
from .pipeline import FrameInput, TrackOutput


@dataclass
class _Entry:
    id: int
    box: BBox
    misses: int = 0


class GreedyIouTracker:
    """Drop-in reference with the same step interface as Tracker."""

    def __init__(
        self, iou_min: float = 0.3, max_age: int = 3, conf_new: float = 0.6
    ) -> None:
        self.iou_min = iou_min
        self.max_age = max_age
        self.conf_new = conf_new
        self.tracks: list[_Entry] = []
        self._next_id = 1

    def reset(self) -> None:
        self.tracks = []
        self._next_id = 1

    def step(self, frame: FrameInput) -> list[TrackOutput]:
        dets = frame.detections
        matched_tracks: set[int] = set()
        matched_dets: set[int] = set()
        if self.tracks and dets:
            overlap = iou_matrix(
                np.array([t.box.as_array() for t in self.tracks]),
                np.array([d.box.as_array() for d in dets]),
            )
            while True:
                best = -1.0
                best_ij = None
                for i in range(len(self.tracks)):
                    if i in matched_tracks:
                        continue
                    for j in range(len(dets)):
                        if j in matched_dets:
                            continue
                        if overlap[i, j] > best:
                            best = overlap[i, j]
                            best_ij = (i, j)
                if best_ij is None or best < self.iou_min:
                    break
                i, j = best_ij
                matched_tracks.add(i)
                matched_dets.add(j)
                self.tracks[i].box = dets[j].box
                self.tracks[i].misses = 0

        survivors: list[_Entry] = []
        outputs: list[TrackOutput] = []
        for i, entry in enumerate(self.tracks):
            if i in matched_tracks:
                survivors.append(entry)
                outputs.append(TrackOutput(entry.id, entry.box, "strong", 0.0, entry.misses))
            else:
                entry.misses += 1
                if entry.misses <= self.max_age:
                    survivors.append(entry)
        self.tracks = survivors

        for j, det in enumerate(dets):
            if j in matched_dets or det.conf < self.conf_new:
                continue
            entry = _Entry(id=self._next_id, box=det.box)
            self._next_id += 1
            self.tracks.append(entry)
            outputs.append(TrackOutput(entry.id, entry.box, "new", 0.0, 0.0))
        outputs.sort(key=lambda o: o.id)
        return outputs
