"""Per-target particle sets: motion-model sampling and post-PSO resampling.

The random motion model draws
    V = V_prev + eps_v * U_V,   U_V ~ Uniform(-U_V^max, U_V^max)
    X = X_prev + lambda_v * V + lambda_x * eps_x * U_X,
                                U_X ~ Uniform(-U_X^max, U_X^max)
with caps scaled by the previous bounding-box size (see noise_caps).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import ConfigError, TrackerConfig
from .geometry import BBox, Velocity4
from .rng import CounterRng


@dataclass
class Particle:
    """One hypothesis of a target's state, with PSO bookkeeping."""

    state: BBox
    vel: Velocity4
    pbest_state: BBox
    pbest_fitness: float = 0.0
    fitness: float = 0.0


def noise_caps(box: BBox, cfg: TrackerConfig) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Size-adaptive caps (U_X^max, U_V^max, V_max) for a target box.

    Each is a 4-vector aligned with (u, v, w, h) state components.
    """
    w, h = box.w, box.h
    ux = np.array([cfg.alpha_x * w, cfg.alpha_x * h, cfg.alpha_s * w, cfg.alpha_s * h])
    uv = np.array([cfg.alpha_v * w, cfg.alpha_v * h, cfg.alpha_sv * w, cfg.alpha_sv * h])
    vmax = np.array([cfg.beta * w, cfg.beta * h, cfg.beta_s * w, cfg.beta_s * h])
    return ux, uv, vmax


def _states_to_arrays(particles: list[Particle]) -> tuple[np.ndarray, np.ndarray]:
    pos = np.array([p.state.as_array() for p in particles])
    vel = np.array([p.vel.as_array() for p in particles])
    return pos, vel


def sample_particles(track, cfg: TrackerConfig, rng: CounterRng) -> list[Particle]:
    """Draw the frame's initial particle set for one target.

    Seeds from the previous optimal state by default, or from the
    previous particle set when cfg.seed_from_particles is set.
    """
    s = cfg.particles
    if s < 1:
        raise ConfigError([f"particles must be >= 1, got {s}"])
    ux_max, uv_max, v_max = noise_caps(track.state, cfg)

    prev = track.particles if cfg.seed_from_particles else []
    if prev:
        idx = np.arange(s) % len(prev)
        base_x = np.array([prev[i].state.as_array() for i in idx])
        base_v = np.array([prev[i].vel.as_array() for i in idx])
    else:
        base_x = np.tile(track.state.as_array(), (s, 1))
        base_v = np.tile(track.vel.as_array(), (s, 1))
    # Seed velocities are capped so sampled ones stay within V_max + eps_v*U_V^max.
    base_v = np.clip(base_v, -v_max, v_max)

    u_v = (2.0 * rng.uniform_matrix(s, 4) - 1.0) * uv_max
    vel = base_v + cfg.eps_v * u_v
    u_x = (2.0 * rng.uniform_matrix(s, 4) - 1.0) * ux_max
    pos = base_x + cfg.lambda_v * vel + cfg.lambda_x * cfg.eps_x * u_x
    pos[:, 2:] = np.maximum(pos[:, 2:], cfg.min_size)

    out = []
    for i in range(s):
        state = BBox(*pos[i])
        out.append(
            Particle(
                state=state,
                vel=Velocity4.from_array(vel[i]),
                pbest_state=state,
                pbest_fitness=0.0,
                fitness=0.0,
            )
        )
    return out


def resample(
    particles: list[Particle],
    gbest: Particle,
    cfg: TrackerConfig,
    *,
    rng: CounterRng | None = None,
) -> list[Particle]:
    """Discard or replace particles whose fitness fell below rho_discard.

    Replace mode (default) overwrites the losers with jittered copies
    of the global best and preserves the particle count; discard mode
    drops them, keeping at least the single best particle.
    """
    rho = cfg.rho_discard
    if cfg.resample_mode == "discard":
        survivors = [p for p in particles if p.fitness >= rho]
        if survivors:
            return survivors
        best = max(range(len(particles)), key=lambda i: (particles[i].fitness, -i))
        return [particles[best]]

    losers = [i for i, p in enumerate(particles) if p.fitness < rho]
    if not losers:
        return list(particles)
    if rng is None:
        raise ValueError("replace-mode resampling requires an rng for jitter")
    ux_max, _, _ = noise_caps(gbest.state, cfg)
    jitter = (2.0 * rng.uniform_matrix(len(losers), 4) - 1.0) * (0.05 * ux_max)
    out = list(particles)
    base = gbest.state.as_array()
    for k, i in enumerate(losers):
        arr = base + jitter[k]
        arr[2:] = np.maximum(arr[2:], cfg.min_size)
        state = BBox(*arr)
        out[i] = Particle(
            state=state,
            vel=gbest.vel,
            pbest_state=state,
            pbest_fitness=gbest.fitness,
            fitness=gbest.fitness,
        )
    return out
