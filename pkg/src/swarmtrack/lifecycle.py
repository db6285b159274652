"""Track lifecycle: strong/new/weak state updates, penalty and age
dynamics, pruning, and trend-seed velocity regression.

Weak tracks coast without a detection: by their own trend velocity,
by co-moving with trusted (strong) neighbours, or by an obstacle-
avoidance detour blended with the swarm's global best.  Position and
size updates are decoupled; coasting never changes w or h.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .config import TrackerConfig
from .geometry import BBox, Detection, Velocity4, center_distance
from .particles import Particle
from .swarm import NeighbourInfo, SwarmResult


@dataclass
class Track:
    """One tracked identity and its bookkeeping."""

    id: int
    state: BBox
    vel: Velocity4
    penalty: float = 0.0
    age: float = 0.0
    status: str = "new"
    misses: int = 0
    history: deque = field(default_factory=lambda: deque(maxlen=10))
    particles: list[Particle] = field(default_factory=list)
    gbest: tuple[BBox, Velocity4, float] | None = None


@dataclass(frozen=True)
class SlopeWindow:
    """Window parameters of the median-of-slopes velocity regression."""

    history_len: int = 10  # H
    frame_window: int = 5  # F
    tau_scale: float = 0.5

    def __post_init__(self) -> None:
        if not (0 < self.frame_window <= self.history_len):
            raise ValueError(
                f"frame window must satisfy 0 < F <= H, got "
                f"F={self.frame_window} H={self.history_len}"
            )


def create_track(det: Detection, next_id: int, history_len: int = 10) -> Track:
    """Birth a track from an unmatched high-confidence detection."""
    track = Track(
        id=next_id,
        state=det.box,
        vel=Velocity4(),
        status="new",
        history=deque(maxlen=history_len),
    )
    track.history.append(det.box)
    return track


def update_strong(track: Track, det: Detection, cfg: TrackerConfig) -> Track:
    """Snap a matched track to its detection (midpoint beyond the d_o gate)."""
    d_o = cfg.gamma_o * track.state.diag
    if center_distance(track.state, det.box) >= d_o:
        state = BBox(*(0.5 * (track.state.as_array() + det.box.as_array())))
    else:
        state = det.box
    track.state = state
    track.penalty = 0.0
    track.age = 0.0
    track.misses = 0
    track.status = "strong"
    track.history.append(state)
    return track


def penalty_age_update(
    track: Track,
    gbest_hist_fitness: float,
    has_strong_neighbour: bool,
    delta_e: float,
    cfg: TrackerConfig,
) -> Track:
    """Accumulate (or recover) penalty and age for an unmatched track.

    delta = (1 - exp(-l^2 / 2 sigma^2)) * (1 - f + delta_e), sigma = age_max/6.
    Near a strong neighbour the step is signed by (rho_re - f + delta_e),
    allowing recovery; otherwise it always accumulates.
    """
    sigma = cfg.age_max / 6.0
    miss = track.misses
    delta = (1.0 - math.exp(-(miss * miss) / (2.0 * sigma * sigma))) * (
        1.0 - gbest_hist_fitness + delta_e
    )
    if has_strong_neighbour:
        arg = cfg.rho_re - gbest_hist_fitness + delta_e
        zeta = math.copysign(1.0, arg) if arg != 0.0 else 0.0
    else:
        zeta = 1.0
    track.penalty = min(1.0, max(0.0, track.penalty + zeta * delta))
    track.age = min(cfg.age_max, max(0.0, track.age + zeta * delta * cfg.age_max))
    return track


@lru_cache(maxsize=64)
def _pair_indices(n: int, window: int) -> tuple[np.ndarray, np.ndarray]:
    i_list = []
    j_list = []
    for i in range(n - 1):
        for j in range(i + 1, min(i + window, n - 1) + 1):
            i_list.append(i)
            j_list.append(j)
    return np.array(i_list, dtype=np.intp), np.array(j_list, dtype=np.intp)


def trend_velocity(history, win: SlopeWindow) -> Velocity4:
    """Median-of-slopes velocity over the last H states.

    Per component, slopes (X_j - X_i)/(j - i) are kept for pairs with
    j - i <= F and |slope| <= tau (tau scales with the latest box), then
    the ascending median is returned; an empty slope set yields 0.
    """
    boxes = list(history)[-win.history_len :]
    n = len(boxes)
    if n == 0:
        raise ValueError("history must be non-empty")
    if n == 1:
        return Velocity4()
    states = np.array([b.as_array() for b in boxes])
    last = boxes[-1]
    tau = np.array(
        [
            win.tau_scale * last.diag,
            win.tau_scale * last.diag,
            win.tau_scale * last.w,
            win.tau_scale * last.h,
        ]
    )
    i_idx, j_idx = _pair_indices(n, win.frame_window)
    slopes = (states[j_idx] - states[i_idx]) / (j_idx - i_idx)[:, None]
    out = np.zeros(4)
    for comp in range(4):
        kept = slopes[np.abs(slopes[:, comp]) <= tau[comp], comp]
        if kept.size:
            out[comp] = np.median(kept)
    return Velocity4.from_array(out)


def trusted_neighbours(
    track: Track, swarm: SwarmResult, strong_tracks: list[Track], cfg: TrackerConfig
) -> list[tuple[NeighbourInfo, Track]]:
    """Strong neighbours as (frame-start snapshot, updated track) pairs.

    When the frame-start neighbour list is empty, re-search the strong
    tracks with the expanded radius before giving up.
    """
    strong_by_id = {t.id: t for t in strong_tracks if t.id != track.id}
    trusted: list[tuple[NeighbourInfo, Track]] = []
    if swarm.neighbours:
        for nb in swarm.neighbours:
            cur = strong_by_id.get(nb.track_id)
            if cur is not None:
                trusted.append((nb, cur))
        return trusted
    eps = cfg.expanded_radius_scale * track.state.diag
    for tid in sorted(strong_by_id):
        cur = strong_by_id[tid]
        prev_box = cur.history[-2] if len(cur.history) >= 2 else cur.state
        if center_distance(track.state, prev_box) <= eps:
            trusted.append((NeighbourInfo(tid, prev_box, cur.vel, "strong"), cur))
    return trusted


def _vel_cosine(a: np.ndarray, b: np.ndarray) -> float:
    na = math.hypot(a[0], a[1])
    nb = math.hypot(b[0], b[1])
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float((a[0] * b[0] + a[1] * b[1]) / (na * nb))


def update_weak(
    track: Track, swarm: SwarmResult, strong_tracks: list[Track], cfg: TrackerConfig
) -> Track:
    """Coast an unmatched track; only the center moves, never the size.

    Branches: (a) no trusted neighbours or they are still -> shift by own
    trend velocity (frozen below the noise floor tau_V); (b) co-moving
    with the trusted median (velocity cosine >= delta_d) -> follow its
    frame displacement; (c) otherwise detour around the trusted median
    obstacle and blend with the swarm's global best.
    """
    trusted = trusted_neighbours(track, swarm, strong_tracks, cfg)
    tau_v = cfg.tau_v_scale * track.state.diag
    center = np.array([track.state.u, track.state.v])
    own = np.array([track.vel.du, track.vel.dv])
    new_center = center

    med_vel = None
    if trusted:
        vels = np.array([[cur.vel.du, cur.vel.dv] for _, cur in trusted])
        med_vel = np.median(vels, axis=0)

    if med_vel is None or math.hypot(med_vel[0], med_vel[1]) < tau_v:
        if math.hypot(own[0], own[1]) >= tau_v:
            new_center = center + own
    else:
        delta = _vel_cosine(own, med_vel)
        prev_centers = np.array([[nb.state.u, nb.state.v] for nb, _ in trusted])
        cur_centers = np.array([[cur.state.u, cur.state.v] for _, cur in trusted])
        med_cur = np.median(cur_centers, axis=0)
        if delta >= cfg.delta_d:
            new_center = center + (med_cur - np.median(prev_centers, axis=0))
        else:
            dx = center - med_cur
            gap = math.hypot(dx[0], dx[1])
            if gap == 0.0:
                v_o = own
            else:
                grad = np.array([-dx[1], dx[0]]) / gap
                if float(grad @ med_vel) > 0.0:
                    grad = -grad
                eps_o = cfg.eps_s * (math.hypot(own[0], own[1]) / gap) * track.state.diag
                v_o = own + eps_o * grad
            x_o = center + v_o
            g = swarm.gbest_state
            new_center = (1.0 - cfg.sigma_g) * x_o + cfg.sigma_g * np.array([g.u, g.v])

    track.state = BBox(float(new_center[0]), float(new_center[1]), track.state.w, track.state.h)
    track.status = "weak"
    if cfg.coast_history:
        track.history.append(track.state)
    return track


def prune(tracks: list[Track], age_max: float) -> list[Track]:
    """Keep exactly the tracks with age strictly below age_max."""
    return [t for t in tracks if t.age < age_max]
