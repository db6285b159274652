"""Per-frame orchestration: sampling, PSO, association, lifecycle.

A step runs, in order: neighbour snapshot -> per-target particle
sampling -> PSO refinement -> resampling -> cost matrix + Hungarian
assignment -> strong updates / births / weak coasting with penalty
and age bookkeeping -> trend velocity regression -> pruning.

All randomness is drawn from counter-based streams keyed by
(seed, frame, track id, purpose), so output never depends on the
order tracks are processed in.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .appearance import GrayImage
from .association import build_cost_matrix, classify, solve_assignment
from .config import ConfigError, TrackerConfig, validate_config
from .geometry import BBox, Detection, Velocity4
from .lifecycle import (
    SlopeWindow,
    Track,
    create_track,
    penalty_age_update,
    prune,
    trend_velocity,
    trusted_neighbours,
    update_strong,
    update_weak,
)
from .particles import Particle, noise_caps, resample, sample_particles
from .rng import CounterRng
from .swarm import SwarmResult, neighbours, optimize


@dataclass(frozen=True)
class FrameInput:
    frame_index: int
    detections: list[Detection] = field(default_factory=list)
    image: GrayImage | None = None


@dataclass(frozen=True)
class TrackOutput:
    id: int
    box: BBox
    status: str
    penalty: float
    age: float


def _in_entrance(box: BBox, areas) -> bool:
    return any(
        left <= box.u <= right and top <= box.v <= bottom
        for (left, top, right, bottom) in areas
    )


class Tracker:
    """Stateful multi-object tracker; feed frames in increasing order."""

    def __init__(self, cfg: TrackerConfig | None = None) -> None:
        cfg = cfg if cfg is not None else TrackerConfig()
        violations = validate_config(cfg)
        if violations:
            raise ConfigError(violations)
        self.cfg = cfg
        self.tracks: list[Track] = []
        self._next_id = 1
        self._last_frame: int | None = None

    def reset(self) -> None:
        self.tracks = []
        self._next_id = 1
        self._last_frame = None

    def step(self, frame: FrameInput) -> list[TrackOutput]:
        cfg = self.cfg
        if self._last_frame is not None and frame.frame_index <= self._last_frame:
            raise ValueError(
                f"frame index must increase: got {frame.frame_index} after {self._last_frame}"
            )
        for k, det in enumerate(frame.detections):
            if not (det.box.w > 0 and det.box.h > 0):
                raise ValueError(f"detection {k} of frame {frame.frame_index}: non-positive size")
            if not 0.0 <= det.conf <= 1.0:
                raise ValueError(
                    f"detection {k} of frame {frame.frame_index}: "
                    f"confidence {det.conf} outside [0, 1]"
                )
        self._last_frame = frame.frame_index
        image = None if cfg.frameless else frame.image

        # Frame-start snapshot: PSO social terms and weak updates both
        # see the world as it was before any track moved this frame.
        nb_by_id = {t.id: neighbours(t, self.tracks, cfg.radius_scale) for t in self.tracks}

        swarm_by_id: dict[int, SwarmResult] = {}
        for track in sorted(self.tracks, key=lambda t: t.id):
            stream = CounterRng(cfg.seed, frame.frame_index, track.id)
            parts = sample_particles(track, cfg, stream.spawn(0))
            result = optimize(
                track, parts, image, nb_by_id[track.id], cfg, rng=stream.spawn(1)
            )
            gbest = Particle(
                state=result.gbest_state,
                vel=result.gbest_vel,
                pbest_state=result.gbest_state,
                pbest_fitness=result.gbest_fitness,
                fitness=result.gbest_fitness,
            )
            track.particles = resample(result.particles, gbest, cfg, rng=stream.spawn(2))
            track.gbest = (result.gbest_state, result.gbest_vel, result.gbest_history_fitness)
            swarm_by_id[track.id] = result

        cost = build_cost_matrix(self.tracks, frame.detections, cfg)
        assign = solve_assignment(cost, cfg.gate)
        strong_pairs, weak_ids, birth_idx = classify(assign, frame.detections, cfg.conf_new)

        by_id = {t.id: t for t in self.tracks}
        for tid, j in strong_pairs:
            update_strong(by_id[tid], frame.detections[j], cfg)

        for j in birth_idx:
            born = create_track(frame.detections[j], self._next_id, cfg.history_len)
            self._next_id += 1
            self.tracks.append(born)

        strong_now = [by_id[tid] for tid, _ in strong_pairs]
        for tid in sorted(weak_ids):
            track = by_id[tid]
            track.misses += 1
            result = swarm_by_id[tid]
            trusted = trusted_neighbours(track, result, strong_now, cfg)
            update_weak(track, result, strong_now, cfg)
            delta_e = cfg.delta_e if _in_entrance(track.state, cfg.entrance_areas) else 0.0
            penalty_age_update(
                track, result.gbest_history_fitness, bool(trusted), delta_e, cfg
            )

        window = SlopeWindow(cfg.history_len, cfg.frame_window, cfg.tau_scale)
        for track in self.tracks:
            vel = trend_velocity(track.history, window)
            _, _, v_max = noise_caps(track.state, cfg)
            track.vel = Velocity4.from_array(np.clip(vel.as_array(), -v_max, v_max))

        self.tracks = sorted(prune(self.tracks, cfg.age_max), key=lambda t: t.id)
        return [
            TrackOutput(t.id, t.state, t.status, t.penalty, t.age) for t in self.tracks
        ]
