"""Render tracked boxes onto grayscale frames as intensity patterns.

Strong tracks get solid bright borders, new tracks solid mid-gray,
weak (coasted) tracks dashed bright borders.
"""

from __future__ import annotations

import numpy as np

from .geometry import BBox

_DASH_ON = 6
_DASH_PERIOD = 10


def _border_mask(length: int, dashed: bool) -> np.ndarray:
    if not dashed:
        return np.ones(length, dtype=bool)
    pos = np.arange(length)
    return (pos % _DASH_PERIOD) < _DASH_ON


def draw_tracks(
    pixels: np.ndarray, tracks: list[tuple[int, BBox, str]]
) -> np.ndarray:
    """Return a copy of the frame with box borders drawn."""
    img = np.array(pixels, dtype=np.uint8, copy=True)
    height, width = img.shape
    for _, box, status in tracks:
        left, top, w, h = box.to_topleft()
        x1 = int(round(left))
        y1 = int(round(top))
        x2 = int(round(left + w))
        y2 = int(round(top + h))
        x1c, x2c = max(0, x1), min(width, x2)
        y1c, y2c = max(0, y1), min(height, y2)
        if x2c <= x1c or y2c <= y1c:
            continue
        dashed = status == "weak"
        shade = 200 if status == "new" else 255
        horiz = _border_mask(x2c - x1c, dashed)
        vert = _border_mask(y2c - y1c, dashed)
        if 0 <= y1 < height:
            img[y1, x1c:x2c][horiz] = shade
        if 0 < y2 <= height:
            img[y2 - 1, x1c:x2c][horiz] = shade
        if 0 <= x1 < width:
            img[y1c:y2c, x1][vert] = shade
        if 0 < x2 <= width:
            img[y1c:y2c, x2 - 1][vert] = shade
    return img
