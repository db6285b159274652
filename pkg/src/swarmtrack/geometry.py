"""Axis-aligned boxes in center parameterization and overlap measures.

Boxes are (u, v, w, h) where (u, v) is the box center in pixel
coordinates and (w, h) are the full width and height.  All distances
between states are Euclidean distances between centers; scale is
carried separately by (w, h).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class BBox:
    """Axis-aligned bounding box, center format."""

    u: float
    v: float
    w: float
    h: float

    def __post_init__(self) -> None:
        if not (self.w > 0 and self.h > 0):
            raise ValueError(f"box sides must be positive, got w={self.w} h={self.h}")

    @property
    def area(self) -> float:
        return self.w * self.h

    @property
    def diag(self) -> float:
        """Diagonal length, used as the natural scale of the box."""
        return math.hypot(self.w, self.h)

    def to_topleft(self) -> tuple[float, float, float, float]:
        """Return (x, y, w, h) with (x, y) the top-left corner."""
        return (self.u - self.w / 2.0, self.v - self.h / 2.0, self.w, self.h)

    @classmethod
    def from_topleft(cls, x: float, y: float, w: float, h: float) -> "BBox":
        return cls(x + w / 2.0, y + h / 2.0, w, h)

    def as_array(self) -> np.ndarray:
        return np.array([self.u, self.v, self.w, self.h], dtype=np.float64)


@dataclass(frozen=True)
class Velocity4:
    """Per-frame state increment (du, dv, dw, dh)."""

    du: float = 0.0
    dv: float = 0.0
    dw: float = 0.0
    dh: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.du, self.dv, self.dw, self.dh], dtype=np.float64)

    @classmethod
    def from_array(cls, a: np.ndarray) -> "Velocity4":
        return cls(float(a[0]), float(a[1]), float(a[2]), float(a[3]))

    @property
    def speed(self) -> float:
        """Planar speed, the norm of the (du, dv) part."""
        return math.hypot(self.du, self.dv)


@dataclass(frozen=True)
class Detection:
    """Detector output: a box plus a confidence in [0, 1]."""

    box: BBox
    conf: float = 1.0


def iou(a: BBox, b: BBox) -> float:
    """Intersection over union of two boxes.  Returns 0 when disjoint."""
    ax1, ay1, aw, ah = a.to_topleft()
    bx1, by1, bw, bh = b.to_topleft()
    ix = min(ax1 + aw, bx1 + bw) - max(ax1, bx1)
    iy = min(ay1 + ah, by1 + bh) - max(ay1, by1)
    if ix <= 0.0 or iy <= 0.0:
        return 0.0
    inter = ix * iy
    return inter / (a.area + b.area - inter)


def center_distance(a: BBox, b: BBox) -> float:
    """Euclidean distance between box centers; scale is ignored."""
    return math.hypot(a.u - b.u, a.v - b.v)


def pair_diag(a: BBox, b: BBox) -> float:
    """Mean diagonal of two boxes, the scale used to normalize distances."""
    return 0.5 * (a.diag + b.diag)


def iou_matrix(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """IoU between every row of `a` and every row of `b`.

    Both inputs are (N, 4) arrays in center format.  Returns (N, M).
    """
    a = np.asarray(a, dtype=np.float64).reshape(-1, 4)
    b = np.asarray(b, dtype=np.float64).reshape(-1, 4)
    ax1 = a[:, 0] - a[:, 2] / 2.0
    ay1 = a[:, 1] - a[:, 3] / 2.0
    ax2 = a[:, 0] + a[:, 2] / 2.0
    ay2 = a[:, 1] + a[:, 3] / 2.0
    bx1 = b[:, 0] - b[:, 2] / 2.0
    by1 = b[:, 1] - b[:, 3] / 2.0
    bx2 = b[:, 0] + b[:, 2] / 2.0
    by2 = b[:, 1] + b[:, 3] / 2.0
    ix = np.minimum(ax2[:, None], bx2[None, :]) - np.maximum(ax1[:, None], bx1[None, :])
    iy = np.minimum(ay2[:, None], by2[None, :]) - np.maximum(ay1[:, None], by1[None, :])
    inter = np.clip(ix, 0.0, None) * np.clip(iy, 0.0, None)
    area_a = (a[:, 2] * a[:, 3])[:, None]
    area_b = (b[:, 2] * b[:, 3])[None, :]
    return inter / (area_a + area_b - inter)


def center_distance_matrix(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Pairwise center distances between (N, 4) and (M, 4) center-format arrays."""
    a = np.asarray(a, dtype=np.float64).reshape(-1, 4)
    b = np.asarray(b, dtype=np.float64).reshape(-1, 4)
    du = a[:, 0][:, None] - b[:, 0][None, :]
    dv = a[:, 1][:, None] - b[:, 1][None, :]
    return np.hypot(du, dv)
