"""PSO refinement of per-target particles.

Each particle's fitness combines three unit-interval terms:
    f = sigma_h * f_h + sigma_p * f_p + sigma_i * f_i
where f_h compares the particle against the target's previous optimal
state, f_p against the particle's own previous PSO position, and f_i
rewards separation from neighbouring targets in state and velocity.
Pairwise terms follow f = lambda_s * f_s + lambda_m * f_m with f_s a
HoG cosine similarity and f_m a distance falloff capped at d_om.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .appearance import GrayImage, OutOfFrameError, cosine_sim, extract_hog
from .config import TrackerConfig
from .geometry import BBox, Velocity4, center_distance
from .particles import Particle, noise_caps
from .rng import CounterRng


@dataclass(frozen=True)
class FitnessWeights:
    """Simplex-constrained weights of the combined fitness."""

    sigma_h: float
    sigma_p: float
    sigma_i: float
    lambda_s: float
    lambda_m: float
    xi_p: float
    xi_v: float

    @classmethod
    def from_config(cls, cfg: TrackerConfig, with_appearance: bool) -> "FitnessWeights":
        # Without a frame the appearance term is forced off for the frame.
        ls, lm = (cfg.lambda_s, cfg.lambda_m) if with_appearance else (0.0, 1.0)
        return cls(cfg.sigma_h, cfg.sigma_p, cfg.sigma_i, ls, lm, cfg.xi_p, cfg.xi_v)


@dataclass(frozen=True)
class NeighbourInfo:
    """Frame-start snapshot of a nearby track."""

    track_id: int
    state: BBox
    vel: Velocity4
    status: str


@dataclass
class SwarmResult:
    particles: list[Particle]
    gbest_state: BBox
    gbest_vel: Velocity4
    gbest_fitness: float
    gbest_history_fitness: float
    neighbours: list[NeighbourInfo]


def neighbours(target, all_tracks, radius_scale: float) -> list[NeighbourInfo]:
    """Every other track within radius_scale * diag(target) of the target.

    Ordered by track id; the target itself is excluded.
    """
    eps_nei = radius_scale * target.state.diag
    out = []
    for t in sorted(all_tracks, key=lambda t: t.id):
        if t.id == target.id:
            continue
        if center_distance(target.state, t.state) <= eps_nei:
            out.append(NeighbourInfo(t.id, t.state, t.vel, t.status))
    return out


def pair_fitness(
    candidate: tuple[BBox, np.ndarray | None],
    reference: tuple[BBox, np.ndarray | None],
    d_om: float,
    lambda_s: float,
    lambda_m: float,
) -> float:
    """Appearance-plus-motion similarity of two states, in [0, 1].

    Falls back to the motion term alone when either feature vector is
    missing (frameless mode or out-of-frame patch).
    """
    cand_box, cand_feat = candidate
    ref_box, ref_feat = reference
    f_m = 1.0 - min(center_distance(cand_box, ref_box), d_om) / d_om
    if lambda_s > 0.0 and cand_feat is not None and ref_feat is not None:
        return lambda_s * cosine_sim(cand_feat, ref_feat) + lambda_m * f_m
    return f_m


def social_fitness(
    p: Particle,
    neighbour_list: list[NeighbourInfo],
    eps_nei: float,
    v_s_max: float,
    weights: FitnessWeights,
) -> float:
    """Separation reward against neighbouring targets, in [0, 1].

    Distances saturate at 2 * eps_nei and planar velocity gaps at
    v_s_max; with no neighbours the term is 1.
    """
    n = len(neighbour_list)
    if n == 0:
        return 1.0
    cap = 2.0 * eps_nei
    pos_sum = 0.0
    vel_sum = 0.0
    for nb in neighbour_list:
        pos_sum += min(center_distance(p.state, nb.state), cap) / cap
        gap = math.hypot(p.vel.du - nb.vel.du, p.vel.dv - nb.vel.dv)
        vel_sum += min(gap, v_s_max) / v_s_max
    return weights.xi_p * pos_sum / n + weights.xi_v * vel_sum / n


def optimize(
    target,
    particles: list[Particle],
    frame: GrayImage | None,
    neighbour_list: list[NeighbourInfo],
    cfg: TrackerConfig,
    *,
    rng: CounterRng | None = None,
) -> SwarmResult:
    """Run I_pso iterations of PSO over one target's particles.

    Deterministic given (rng stream, target state, neighbour list).
    The particle velocity doubles as the PSO velocity, clamped to
    +-U_X^max per component during iterations.
    """
    if not particles:
        raise ValueError("particles must be non-empty")
    if rng is None:
        rng = CounterRng(cfg.seed)
    use_app = frame is not None and not cfg.frameless and cfg.lambda_s > 0.0
    weights = FitnessWeights.from_config(cfg, with_appearance=use_app)

    s = len(particles)
    prev_box = target.state
    d_om_h = prev_box.diag
    ux_max, uv_max, v_max = noise_caps(prev_box, cfg)
    eps_nei = cfg.radius_scale * prev_box.diag
    v_s_max = math.hypot(v_max[0], v_max[1]) + math.hypot(uv_max[0], uv_max[1])

    pos = np.array([p.state.as_array() for p in particles])
    vel = np.array([p.vel.as_array() for p in particles])

    n_nb = len(neighbour_list)
    if n_nb:
        nb_pos = np.array([[nb.state.u, nb.state.v] for nb in neighbour_list])
        nb_vel = np.array([[nb.vel.du, nb.vel.dv] for nb in neighbour_list])

    feat_cache: dict[tuple[int, int, int, int], np.ndarray | None] = {}

    def feat_for(arr: np.ndarray) -> np.ndarray | None:
        # Keyed by rounded state so a particle moving < 1 px reuses its feature.
        key = (round(arr[0]), round(arr[1]), round(arr[2]), round(arr[3]))
        if key not in feat_cache:
            try:
                feat_cache[key] = extract_hog(
                    frame,
                    BBox(*arr),
                    patch=cfg.hog_patch,
                    cell=cfg.hog_cell,
                    bins=cfg.hog_bins,
                    block=cfg.hog_block,
                    clip=cfg.hog_clip,
                )
            except OutOfFrameError:
                feat_cache[key] = None
        return feat_cache[key]

    ref_feat = feat_for(prev_box.as_array()) if use_app else None

    def pairwise_term(dist: np.ndarray, d_om, cur: np.ndarray, ref_feats) -> np.ndarray:
        """Vector form of pair_fitness; ref_feats is a per-particle list or None."""
        f_m = 1.0 - np.minimum(dist, d_om) / d_om
        if not use_app or ref_feats is None:
            return f_m
        out = np.empty(s)
        for i in range(s):
            cur_f = feat_for(cur[i])
            if cur_f is None or ref_feats[i] is None:
                out[i] = f_m[i]
            else:
                out[i] = weights.lambda_s * cosine_sim(cur_f, ref_feats[i]) + weights.lambda_m * f_m[i]
        return out

    def evaluate(prev_pos: np.ndarray | None) -> tuple[np.ndarray, np.ndarray]:
        dist_h = np.hypot(pos[:, 0] - prev_box.u, pos[:, 1] - prev_box.v)
        f_h = pairwise_term(dist_h, d_om_h, pos, [ref_feat] * s if use_app else None)
        if prev_pos is None:
            # First evaluation: zero displacement from the prior update.
            f_p = np.ones(s)
        else:
            d_om_p = np.hypot(prev_pos[:, 2], prev_pos[:, 3])
            dist_p = np.hypot(pos[:, 0] - prev_pos[:, 0], pos[:, 1] - prev_pos[:, 1])
            prev_feats = [feat_for(prev_pos[i]) for i in range(s)] if use_app else None
            f_p = pairwise_term(dist_p, d_om_p, pos, prev_feats)
        if n_nb == 0:
            f_i = np.ones(s)
        else:
            cap = 2.0 * eps_nei
            dd = np.hypot(pos[:, 0, None] - nb_pos[None, :, 0], pos[:, 1, None] - nb_pos[None, :, 1])
            pos_term = (np.minimum(dd, cap) / cap).mean(axis=1)
            gap = np.hypot(vel[:, 0, None] - nb_vel[None, :, 0], vel[:, 1, None] - nb_vel[None, :, 1])
            vel_term = (np.minimum(gap, v_s_max) / v_s_max).mean(axis=1)
            f_i = weights.xi_p * pos_term + weights.xi_v * vel_term
        fit = weights.sigma_h * f_h + weights.sigma_p * f_p + weights.sigma_i * f_i
        return fit, f_h

    fit, f_h = evaluate(None)
    pbest_pos = pos.copy()
    pbest_fit = fit.copy()
    g_idx = int(np.argmax(fit))
    gbest_pos = pos[g_idx].copy()
    gbest_vel = vel[g_idx].copy()
    gbest_fit = float(fit[g_idx])
    gbest_hist = float(f_h[g_idx])

    for _ in range(cfg.pso_iterations):
        r1 = rng.uniform_matrix(s, 4)
        r2 = rng.uniform_matrix(s, 4)
        vel = (
            cfg.inertia * vel
            + cfg.cognitive * r1 * (pbest_pos - pos)
            + cfg.social * r2 * (gbest_pos[None, :] - pos)
        )
        np.clip(vel, -ux_max, ux_max, out=vel)
        prev_pos = pos
        pos = pos + vel
        pos[:, 2:] = np.maximum(pos[:, 2:], cfg.min_size)
        fit, f_h = evaluate(prev_pos)
        improved = fit > pbest_fit
        pbest_fit = np.where(improved, fit, pbest_fit)
        pbest_pos[improved] = pos[improved]
        best_i = int(np.argmax(fit))
        if fit[best_i] > gbest_fit:
            gbest_fit = float(fit[best_i])
            gbest_pos = pos[best_i].copy()
            gbest_vel = vel[best_i].copy()
            gbest_hist = float(f_h[best_i])

    out = []
    for i in range(s):
        out.append(
            Particle(
                state=BBox(*pos[i]),
                vel=Velocity4.from_array(vel[i]),
                pbest_state=BBox(*pbest_pos[i]),
                pbest_fitness=float(pbest_fit[i]),
                fitness=float(fit[i]),
            )
        )
    return SwarmResult(
        particles=out,
        gbest_state=BBox(*gbest_pos),
        gbest_vel=Velocity4.from_array(gbest_vel),
        gbest_fitness=gbest_fit,
        gbest_history_fitness=gbest_hist,
        neighbours=list(neighbour_list),
    )
