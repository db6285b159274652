"""Tracker configuration: every named scalar of the model plus engine knobs.

All weight triples/pairs are simplex-constrained; `validate_config`
checks every invariant and reports the full list of violations rather
than stopping at the first.
"""

from __future__ import annotations

from dataclasses import dataclass, field


class ConfigError(ValueError):
    """Raised when a TrackerConfig violates its invariants."""

    def __init__(self, violations: list[str]) -> None:
        self.violations = list(violations)
        super().__init__("; ".join(violations))


@dataclass(frozen=True)
class TrackerConfig:
    # Particle sampling (random motion model).
    particles: int = 8
    eps_v: float = 1.0
    eps_x: float = 1.0
    lambda_v: float = 1.0
    lambda_x: float = 1.0
    # Noise / velocity caps as fractions of box size:
    # U_X^max = (alpha_x*w, alpha_x*h, alpha_s*w, alpha_s*h)
    # U_V^max = (alpha_v*w, alpha_v*h, alpha_sv*w, alpha_sv*h)
    # V_max   = (beta*w,    beta*h,    beta_s*w,   beta_s*h)
    alpha_x: float = 0.10
    alpha_s: float = 0.02
    alpha_v: float = 0.05
    alpha_sv: float = 0.01
    beta: float = 0.5
    beta_s: float = 0.05
    seed_from_particles: bool = False
    resample_mode: str = "replace"
    rho_discard: float = 0.2
    min_size: float = 1.0

    # PSO refinement.
    pso_iterations: int = 5
    inertia: float = 0.6
    cognitive: float = 1.5
    social: float = 1.5
    sigma_h: float = 0.5
    sigma_p: float = 0.2
    sigma_i: float = 0.3
    lambda_s: float = 0.4
    lambda_m: float = 0.6
    xi_p: float = 0.7
    xi_v: float = 0.3
    radius_scale: float = 1.0
    expanded_radius_scale: float = 2.0

    # Association cost and gating.
    lambda_p: float = 0.6
    lambda_d: float = 0.2
    lambda_h: float = 0.2
    gate: float = 0.8
    conf_new: float = 0.6

    # Lifecycle: strong snap gate, weak coasting, penalty/age dynamics.
    gamma_o: float = 0.25
    tau_v_scale: float = 0.02
    delta_d: float = 0.9
    sigma_g: float = 0.5
    eps_s: float = 0.1
    rho_re: float = 0.5
    delta_e: float = 0.0
    entrance_areas: tuple[tuple[float, float, float, float], ...] = ()
    age_max: float = 30.0

    # Trend-seed velocity regression.
    history_len: int = 10
    frame_window: int = 5
    tau_scale: float = 0.5

    # Appearance features.
    frameless: bool = False
    hog_patch: int = 48
    hog_cell: int = 8
    hog_bins: int = 9
    hog_block: int = 2
    hog_clip: float = 0.2

    # Engine.
    seed: int = 0
    coast_history: bool = True


_SIMPLEX_TOL = 1e-9


def validate_config(cfg: TrackerConfig) -> list[str]:
    """Return every invariant violation; an empty list means valid."""
    bad: list[str] = []

    def simplex(names: tuple[str, ...]) -> None:
        vals = [getattr(cfg, n) for n in names]
        if any(v < 0.0 for v in vals):
            bad.append(f"{'/'.join(names)} must be non-negative, got {vals}")
        if abs(sum(vals) - 1.0) > _SIMPLEX_TOL:
            bad.append(f"{'/'.join(names)} must sum to 1, got {sum(vals)!r}")

    simplex(("sigma_h", "sigma_p", "sigma_i"))
    simplex(("lambda_s", "lambda_m"))
    simplex(("xi_p", "xi_v"))
    simplex(("lambda_p", "lambda_d", "lambda_h"))

    if cfg.particles < 1:
        bad.append(f"particles must be >= 1, got {cfg.particles}")
    if cfg.pso_iterations < 0:
        bad.append(f"pso_iterations must be >= 0, got {cfg.pso_iterations}")
    if cfg.inertia < 0.0:
        bad.append(f"inertia must be >= 0, got {cfg.inertia}")
    if cfg.cognitive < 0.0 or cfg.social < 0.0:
        bad.append("cognitive and social factors must be >= 0")
    if not (0.0 < cfg.gate <= 1.0):
        bad.append(f"gate must be in (0, 1], got {cfg.gate}")
    if not (0.0 <= cfg.conf_new <= 1.0):
        bad.append(f"conf_new must be in [0, 1], got {cfg.conf_new}")
    if not (0.0 <= cfg.rho_discard <= 1.0):
        bad.append(f"rho_discard must be in [0, 1], got {cfg.rho_discard}")
    if not (0.0 <= cfg.rho_re <= 1.0):
        bad.append(f"rho_re must be in [0, 1], got {cfg.rho_re}")
    if not (-1.0 <= cfg.delta_d <= 1.0):
        bad.append(f"delta_d must be in [-1, 1], got {cfg.delta_d}")
    if not (0.0 <= cfg.sigma_g <= 1.0):
        bad.append(f"sigma_g must be in [0, 1], got {cfg.sigma_g}")
    if cfg.eps_s < 0.0:
        bad.append(f"eps_s must be >= 0, got {cfg.eps_s}")
    if cfg.delta_e < 0.0:
        bad.append(f"delta_e must be >= 0, got {cfg.delta_e}")
    if cfg.age_max <= 0.0:
        bad.append(f"age_max must be > 0, got {cfg.age_max}")
    if cfg.history_len < 1:
        bad.append(f"history_len must be >= 1, got {cfg.history_len}")
    if not (0 < cfg.frame_window <= cfg.history_len):
        bad.append(
            f"frame_window must satisfy 0 < F <= H, got F={cfg.frame_window} "
            f"H={cfg.history_len}"
        )
    if cfg.tau_scale <= 0.0:
        bad.append(f"tau_scale must be > 0, got {cfg.tau_scale}")
    if cfg.tau_v_scale < 0.0:
        bad.append(f"tau_v_scale must be >= 0, got {cfg.tau_v_scale}")
    if cfg.gamma_o < 0.0:
        bad.append(f"gamma_o must be >= 0, got {cfg.gamma_o}")
    for name in ("alpha_x", "alpha_s", "alpha_v", "alpha_sv", "beta", "beta_s"):
        if getattr(cfg, name) < 0.0:
            bad.append(f"{name} must be >= 0, got {getattr(cfg, name)}")
    if cfg.radius_scale <= 0.0:
        bad.append(f"radius_scale must be > 0, got {cfg.radius_scale}")
    if cfg.expanded_radius_scale < cfg.radius_scale:
        bad.append(
            "expanded_radius_scale must be >= radius_scale, got "
            f"{cfg.expanded_radius_scale} < {cfg.radius_scale}"
        )
    if cfg.resample_mode not in ("replace", "discard"):
        bad.append(f"resample_mode must be 'replace' or 'discard', got {cfg.resample_mode!r}")
    if cfg.min_size <= 0.0:
        bad.append(f"min_size must be > 0, got {cfg.min_size}")
    if cfg.hog_patch < 1 or cfg.hog_cell < 1 or cfg.hog_patch % cfg.hog_cell != 0:
        bad.append(
            f"hog_patch must be a positive multiple of hog_cell, got "
            f"patch={cfg.hog_patch} cell={cfg.hog_cell}"
        )
    if cfg.hog_bins < 1:
        bad.append(f"hog_bins must be >= 1, got {cfg.hog_bins}")
    if cfg.hog_block < 1 or cfg.hog_block > cfg.hog_patch // cfg.hog_cell:
        bad.append(f"hog_block must be in [1, cells per side], got {cfg.hog_block}")
    if cfg.hog_clip <= 0.0:
        bad.append(f"hog_clip must be > 0, got {cfg.hog_clip}")
    for i, rect in enumerate(cfg.entrance_areas):
        if len(rect) != 4 or not (rect[0] < rect[2] and rect[1] < rect[3]):
            bad.append(f"entrance_areas[{i}] must be (left, top, right, bottom), got {rect}")
    return bad
