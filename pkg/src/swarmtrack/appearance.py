"""Appearance features: HoG descriptors over box patches.

The patch under a box is resampled to a fixed square, gradient
orientation histograms are accumulated per cell, and overlapping
blocks are L2-normalized with clipping.  Descriptors are compared
with cosine similarity in [0, 1] (gradient histograms are
nonnegative, so the raw cosine is already nonnegative).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import BBox


class OutOfFrameError(ValueError):
    """Raised when a box lies entirely outside the frame."""


@dataclass(frozen=True)
class GrayImage:
    """Single-channel frame; pixels indexed [row, col]."""

    pixels: np.ndarray

    def __post_init__(self) -> None:
        if self.pixels.ndim != 2:
            raise ValueError(f"expected a 2-D array, got shape {self.pixels.shape}")

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]


def _resample_patch(img: GrayImage, box: BBox, patch: int) -> np.ndarray:
    """Bilinearly sample the box region onto a patch x patch grid.

    Boxes overhanging the frame edge are sampled with edge clamping;
    only a box with no overlap at all is rejected.
    """
    x1, y1, w, h = box.to_topleft()
    if x1 + w <= 0 or y1 + h <= 0 or x1 >= img.width or y1 >= img.height:
        raise OutOfFrameError(
            f"box ({box.u:.1f},{box.v:.1f},{box.w:.1f},{box.h:.1f}) lies "
            f"outside the {img.width}x{img.height} frame"
        )
    # Sample at pixel centers of the target grid mapped into the box.
    xs = x1 + (np.arange(patch) + 0.5) * (w / patch) - 0.5
    ys = y1 + (np.arange(patch) + 0.5) * (h / patch) - 0.5
    xs = np.clip(xs, 0.0, img.width - 1.0)
    ys = np.clip(ys, 0.0, img.height - 1.0)
    x0 = np.floor(xs).astype(np.intp)
    y0 = np.floor(ys).astype(np.intp)
    x0 = np.minimum(x0, img.width - 2) if img.width > 1 else x0 * 0
    y0 = np.minimum(y0, img.height - 2) if img.height > 1 else y0 * 0
    fx = xs - x0
    fy = ys - y0
    p = np.asarray(img.pixels, dtype=np.float64)
    if img.width == 1:
        x1i = x0
    else:
        x1i = x0 + 1
    if img.height == 1:
        y1i = y0
    else:
        y1i = y0 + 1
    top = p[np.ix_(y0, x0)] * (1 - fx)[None, :] + p[np.ix_(y0, x1i)] * fx[None, :]
    bot = p[np.ix_(y1i, x0)] * (1 - fx)[None, :] + p[np.ix_(y1i, x1i)] * fx[None, :]
    return top * (1 - fy)[:, None] + bot * fy[:, None]


def extract_hog(
    img: GrayImage,
    box: BBox,
    *,
    patch: int = 48,
    cell: int = 8,
    bins: int = 9,
    block: int = 2,
    clip: float = 0.2,
) -> np.ndarray:
    """HoG descriptor of the patch under `box`.

    Raises OutOfFrameError when the box is not fully inside the frame;
    callers fall back to motion-only fitness in that case.
    """
    if patch % cell != 0:
        raise ValueError("patch must be a multiple of cell")
    region = _resample_patch(img, box, patch)
    gy, gx = np.gradient(region)
    mag = np.hypot(gx, gy)
    # Unsigned orientation in [0, pi).
    ang = np.mod(np.arctan2(gy, gx), np.pi)
    pos = ang * (bins / np.pi)
    b0 = np.floor(pos).astype(np.intp) % bins
    frac = pos - np.floor(pos)
    b1 = (b0 + 1) % bins

    n_cells = patch // cell
    hist = np.zeros((n_cells, n_cells, bins), dtype=np.float64)
    cy = np.repeat(np.arange(n_cells), cell)
    cell_row = np.broadcast_to(cy[:, None], (patch, patch))
    cell_col = np.broadcast_to(cy[None, :], (patch, patch))
    flat_cell = (cell_row * n_cells + cell_col).ravel()
    np.add.at(
        hist.reshape(-1, bins),
        (flat_cell, b0.ravel()),
        (mag * (1.0 - frac)).ravel(),
    )
    np.add.at(
        hist.reshape(-1, bins),
        (flat_cell, b1.ravel()),
        (mag * frac).ravel(),
    )

    n_blocks = n_cells - block + 1
    out = []
    for by in range(n_blocks):
        for bx in range(n_blocks):
            vec = hist[by : by + block, bx : bx + block].ravel()
            norm = np.sqrt(np.dot(vec, vec)) + 1e-12
            out.append(np.minimum(vec / norm, clip))
    return np.concatenate(out)


def cosine_sim(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine similarity; 0.0 when either vector is all zeros."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"descriptor shapes differ: {a.shape} vs {b.shape}")
    na2 = float(np.dot(a, a))
    nb2 = float(np.dot(b, b))
    if na2 == 0.0 or nb2 == 0.0:
        return 0.0
    # sqrt of the product keeps cos(x, x) == 1.0 exact in IEEE arithmetic.
    return float(np.dot(a, b)) / math.sqrt(na2 * nb2)
