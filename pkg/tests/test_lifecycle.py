"""Track lifecycle: matched updates, penalty/age dynamics, weak-track
coasting, pruning, and the median-of-slopes velocity regression.

trend_velocity is held to exact equality against a brute-force
enumerate/sort/median oracle, and weak-track updates must never touch
box size.
"""

import dataclasses
import math
from collections import deque

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from swarmtrack import TrackerConfig
from swarmtrack.geometry import BBox, Detection, Velocity4
from swarmtrack.lifecycle import (
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
from swarmtrack.swarm import NeighbourInfo, SwarmResult


def cfg_with(**overrides) -> TrackerConfig:
    return dataclasses.replace(TrackerConfig(), **overrides)


def make_track(tid=1, u=0.0, v=0.0, w=60.0, h=80.0, vel=(0.0, 0.0), **kw) -> Track:
    return Track(id=tid, state=BBox(u, v, w, h), vel=Velocity4(vel[0], vel[1], 0.0, 0.0), **kw)


def swarm_result(gbest: BBox, neighbours_list=(), hist_fitness=0.5) -> SwarmResult:
    return SwarmResult(
        particles=[],
        gbest_state=gbest,
        gbest_vel=Velocity4(),
        gbest_fitness=hist_fitness,
        gbest_history_fitness=hist_fitness,
        neighbours=list(neighbours_list),
    )


class TestUpdateStrong:
    def test_close_detection_is_adopted_exactly(self):
        track = make_track()  # diag 100, d_o = 25
        det = Detection(box=BBox(5.0, 0.0, 64.0, 84.0), conf=1.0)
        update_strong(track, det, TrackerConfig())
        assert track.state == det.box

    def test_far_detection_meets_halfway(self):
        track = make_track()  # center (0, 0)
        det = Detection(box=BBox(100.0, 0.0, 60.0, 80.0), conf=1.0)
        update_strong(track, det, TrackerConfig())
        assert (track.state.u, track.state.v) == (50.0, 0.0)

    def test_midpoint_covers_size_too(self):
        track = make_track(w=60.0, h=80.0)
        det = Detection(box=BBox(100.0, 0.0, 80.0, 100.0), conf=1.0)
        update_strong(track, det, TrackerConfig())
        assert (track.state.w, track.state.h) == (70.0, 90.0)

    def test_gate_scales_with_gamma(self):
        # gamma_o = 0.5 puts d_o at 50; the same 100 px jump still halves.
        track = make_track()
        det = Detection(box=BBox(100.0, 0.0, 60.0, 80.0), conf=1.0)
        update_strong(track, det, cfg_with(gamma_o=0.5))
        assert (track.state.u, track.state.v) == (50.0, 0.0)

    def test_resets_penalty_age_misses(self):
        track = make_track(penalty=0.7, age=12.0, misses=4, status="weak")
        det = Detection(box=BBox(1.0, 0.0, 60.0, 80.0), conf=1.0)
        update_strong(track, det, TrackerConfig())
        assert track.penalty == 0.0
        assert track.age == 0.0
        assert track.misses == 0
        assert track.status == "strong"

    def test_appends_history(self):
        track = make_track()
        before = len(track.history)
        update_strong(track, Detection(box=BBox(1, 0, 60, 80)), TrackerConfig())
        assert len(track.history) == before + 1
        assert track.history[-1] == track.state


class TestCreateTrack:
    def test_initial_fields(self):
        det = Detection(box=BBox(10, 20, 5, 9), conf=0.95)
        track = create_track(det, next_id=3)
        assert track.id == 3
        assert track.state == det.box
        assert track.vel == Velocity4()
        assert track.penalty == 0.0
        assert track.age == 0.0
        assert track.status == "new"
        assert list(track.history) == [det.box]


class TestPenaltyAgeUpdate:
    def test_zero_misses_is_exact_noop(self):
        track = make_track(penalty=0.3, age=5.0, misses=0)
        penalty_age_update(track, 0.2, False, 0.0, TrackerConfig())
        assert track.penalty == 0.3
        assert track.age == 5.0

    def test_perfect_fitness_is_exact_noop(self):
        track = make_track(penalty=0.3, age=5.0, misses=7)
        penalty_age_update(track, 1.0, False, 0.0, TrackerConfig())
        assert track.penalty == 0.3
        assert track.age == 5.0

    def test_saturation_at_six_sigma(self):
        # l = 6 sigma = age_max: the Gaussian factor is within 1e-6 of 1,
        # so with f = 0 a fresh track jumps to penalty ~1 in one step.
        cfg = TrackerConfig()
        track = make_track(misses=int(cfg.age_max))
        penalty_age_update(track, 0.0, False, 0.0, cfg)
        assert track.penalty == pytest.approx(1.0, abs=1e-6)
        assert track.age == pytest.approx(cfg.age_max, abs=1e-4)

    def test_recovery_near_strong_neighbour(self):
        track = make_track(penalty=0.5, age=10.0, misses=5)
        penalty_age_update(track, 0.9, True, 0.0, TrackerConfig())
        assert track.penalty < 0.5
        assert track.age < 10.0

    def test_no_recovery_without_neighbour(self):
        track = make_track(penalty=0.5, misses=5)
        penalty_age_update(track, 0.9, False, 0.0, TrackerConfig())
        assert track.penalty > 0.5

    def test_sign_zero_freezes(self):
        cfg = TrackerConfig()
        track = make_track(penalty=0.5, age=10.0, misses=5)
        penalty_age_update(track, cfg.rho_re, True, 0.0, cfg)
        assert track.penalty == 0.5
        assert track.age == 10.0

    def test_entrance_bonus_accelerates(self):
        slow = make_track(misses=5)
        fast = make_track(misses=5)
        penalty_age_update(slow, 0.5, False, 0.0, TrackerConfig())
        penalty_age_update(fast, 0.5, False, 0.4, TrackerConfig())
        assert fast.penalty > slow.penalty

    @given(
        st.lists(
            st.tuples(
                st.integers(0, 40),
                st.floats(0, 1),
                st.booleans(),
                st.floats(0, 0.5),
            ),
            min_size=1,
            max_size=30,
        )
    )
    @settings(max_examples=150, deadline=None)
    def test_clamps_always_hold(self, updates):
        cfg = TrackerConfig()
        track = make_track()
        for misses, fitness, near, delta_e in updates:
            track.misses = misses
            penalty_age_update(track, fitness, near, delta_e, cfg)
            assert 0.0 <= track.penalty <= 1.0
            assert 0.0 <= track.age <= cfg.age_max


def oracle_trend(boxes, win: SlopeWindow) -> list[float]:
    """Brute-force enumerate/sort/median of bounded slopes."""
    boxes = list(boxes)[-win.history_len :]
    n = len(boxes)
    last = boxes[-1]
    taus = [
        win.tau_scale * last.diag,
        win.tau_scale * last.diag,
        win.tau_scale * last.w,
        win.tau_scale * last.h,
    ]
    out = []
    for comp in range(4):
        vals = [float(b.as_array()[comp]) for b in boxes]
        slopes = []
        for i in range(n - 1):
            for j in range(i + 1, n):
                if j - i > win.frame_window:
                    continue
                slope = (vals[j] - vals[i]) / (j - i)
                if abs(slope) <= taus[comp]:
                    slopes.append(slope)
        slopes.sort()
        q = len(slopes)
        if q == 0:
            out.append(0.0)
        elif q % 2:
            out.append(slopes[q // 2])
        else:
            out.append((slopes[q // 2 - 1] + slopes[q // 2]) / 2.0)
    return out


class TestTrendVelocity:
    win = SlopeWindow()

    def test_constant_history_is_zero(self):
        boxes = [BBox(10, 20, 5, 5)] * 6
        assert trend_velocity(boxes, self.win) == Velocity4()

    def test_linear_track_recovers_slope(self):
        boxes = [BBox(2.0 * t, 7.0, 30.0, 30.0) for t in range(5)]
        vel = trend_velocity(boxes, SlopeWindow(history_len=5, frame_window=5))
        assert vel.du == 2.0
        assert vel.dv == 0.0

    def test_all_slopes_beyond_tau_gives_zero(self):
        # Jumps of 100 px/frame on a 10 px box exceed tau = 0.5 * diag.
        boxes = [BBox(100.0 * t, 0.0, 10.0, 10.0) for t in range(5)]
        vel = trend_velocity(boxes, self.win)
        assert vel.du == 0.0

    def test_outliers_leave_median_close(self):
        true = 3.0
        boxes = []
        for t in range(6):
            u = true * t + (40.0 if t in (2, 4) else 0.0)
            boxes.append(BBox(u, 0.0, 60.0, 60.0))
        vel = trend_velocity(boxes, SlopeWindow(history_len=6, frame_window=5))
        assert abs(vel.du - true) <= 0.1 * true

    def test_single_state_is_zero(self):
        assert trend_velocity([BBox(5, 5, 2, 2)], self.win) == Velocity4()

    def test_empty_history_rejected(self):
        with pytest.raises(ValueError):
            trend_velocity([], self.win)

    def test_window_limits_pair_span(self):
        # With F = 1 only consecutive pairs count.
        boxes = [BBox(float(x), 0.0, 50.0, 50.0) for x in (0, 1, 2, 100)]
        win = SlopeWindow(history_len=10, frame_window=1, tau_scale=10.0)
        vel = trend_velocity(boxes, win)
        assert vel.du == oracle_trend(boxes, win)[0]

    def test_matches_oracle_on_random_histories(self):
        rng = np.random.default_rng(31)
        for _ in range(300):
            n = int(rng.integers(1, 11))
            f = int(rng.integers(1, 11))
            win = SlopeWindow(history_len=10, frame_window=f, tau_scale=float(rng.uniform(0.1, 2.0)))
            boxes = [
                BBox(*rng.uniform([-50, -50, 1, 1], [50, 50, 40, 40]))
                for _ in range(n)
            ]
            got = trend_velocity(boxes, win)
            assert list(got.as_array()) == oracle_trend(boxes, win)

    def test_translation_equivariance(self):
        # Integer coordinates keep the shift arithmetic exact, so the
        # regressed velocity must be bit-identical after translation.
        rng = np.random.default_rng(37)
        boxes = [
            BBox(float(rng.integers(0, 50)), float(rng.integers(0, 50)), 20.0, 20.0)
            for _ in range(8)
        ]
        shifted = [BBox(b.u + 1000.0, b.v - 500.0, b.w, b.h) for b in boxes]
        a = trend_velocity(boxes, self.win)
        b = trend_velocity(shifted, self.win)
        assert (a.du, a.dv) == (b.du, b.dv)

    def test_uses_only_last_h_states(self):
        old = [BBox(1000.0, 1000.0, 30.0, 30.0)] * 5
        recent = [BBox(2.0 * t, 0.0, 30.0, 30.0) for t in range(10)]
        win = SlopeWindow(history_len=10, frame_window=5)
        assert trend_velocity(old + recent, win) == trend_velocity(recent, win)


class TestSlopeWindow:
    def test_window_must_fit_history(self):
        with pytest.raises(ValueError):
            SlopeWindow(history_len=5, frame_window=6)
        with pytest.raises(ValueError):
            SlopeWindow(history_len=5, frame_window=0)


class TestTrustedNeighbours:
    def make_strong(self, tid, u, prev_u=None) -> Track:
        t = make_track(tid=tid, u=u, status="strong")
        if prev_u is not None:
            t.history.append(BBox(prev_u, 0.0, 60.0, 80.0))
        t.history.append(t.state)
        return t

    def test_snapshot_filtered_to_strong(self):
        weak_track = make_track(tid=1)
        strong = self.make_strong(2, 50.0)
        snapshot = [
            NeighbourInfo(2, BBox(45.0, 0.0, 60, 80), Velocity4(), "strong"),
            NeighbourInfo(3, BBox(20.0, 0.0, 60, 80), Velocity4(), "strong"),
        ]
        got = trusted_neighbours(weak_track, swarm_result(weak_track.state, snapshot), [strong], TrackerConfig())
        assert [cur.id for _, cur in got] == [2]

    def test_expanded_search_when_snapshot_empty(self):
        weak_track = make_track(tid=1)
        near = self.make_strong(2, 150.0, prev_u=145.0)  # within 2 * diag = 200
        far = self.make_strong(3, 500.0, prev_u=495.0)
        got = trusted_neighbours(weak_track, swarm_result(weak_track.state, []), [near, far], TrackerConfig())
        assert [cur.id for _, cur in got] == [2]
        # The snapshot state for the found neighbour is its pre-update box.
        assert got[0][0].state.u == 145.0


class TestUpdateWeak:
    def test_frozen_below_noise_floor(self):
        track = make_track(vel=(0.5, 0.0))  # tau_V = 2
        before = track.state
        update_weak(track, swarm_result(track.state), [], TrackerConfig())
        assert track.state == before
        assert track.status == "weak"

    def test_coasts_by_own_velocity(self):
        track = make_track(vel=(3.0, 0.0))
        update_weak(track, swarm_result(track.state), [], TrackerConfig())
        assert (track.state.u, track.state.v) == (3.0, 0.0)
        assert (track.state.w, track.state.h) == (60.0, 80.0)

    def co_moving_fixture(self, nb_vel, own_vel, nb_shift):
        track = make_track(tid=1, vel=own_vel)
        nb_prev = BBox(100.0, 0.0, 60.0, 80.0)
        nb_cur = Track(
            id=2,
            state=BBox(100.0 + nb_shift[0], nb_shift[1], 60.0, 80.0),
            vel=Velocity4(nb_vel[0], nb_vel[1], 0.0, 0.0),
            status="strong",
        )
        snapshot = [NeighbourInfo(2, nb_prev, nb_cur.vel, "strong")]
        return track, snapshot, nb_cur

    def test_co_moving_follows_neighbour_displacement(self):
        track, snapshot, nb_cur = self.co_moving_fixture(
            nb_vel=(5.0, 0.0), own_vel=(5.0, 0.0), nb_shift=(5.0, 0.0)
        )
        update_weak(track, swarm_result(track.state, snapshot), [nb_cur], TrackerConfig())
        assert (track.state.u, track.state.v) == (5.0, 0.0)
        assert (track.state.w, track.state.h) == (60.0, 80.0)

    def test_gbest_endpoint_when_sigma_g_one(self):
        track, snapshot, nb_cur = self.co_moving_fixture(
            nb_vel=(0.0, 5.0), own_vel=(5.0, 0.0), nb_shift=(0.0, 5.0)
        )
        gbest = BBox(42.0, 17.0, 60.0, 80.0)
        update_weak(
            track, swarm_result(gbest, snapshot), [nb_cur], cfg_with(sigma_g=1.0)
        )
        assert (track.state.u, track.state.v) == (42.0, 17.0)
        assert (track.state.w, track.state.h) == (60.0, 80.0)

    def test_detour_is_orthogonal_and_counter_flow(self):
        # sigma_g = 0 exposes the avoidance step X_o directly.
        track, snapshot, nb_cur = self.co_moving_fixture(
            nb_vel=(0.0, 5.0), own_vel=(3.0, 0.0), nb_shift=(0.0, 5.0)
        )
        update_weak(track, swarm_result(track.state, snapshot), [nb_cur], cfg_with(sigma_g=0.0))
        displacement = np.array([track.state.u, track.state.v]) - np.array([0.0, 0.0])
        detour = displacement - np.array([3.0, 0.0])  # beyond own velocity
        delta_x = np.array([0.0, 0.0]) - np.array([100.0 + 0.0, 5.0])
        assert abs(float(detour @ delta_x)) <= 1e-9 * np.linalg.norm(delta_x) * max(
            np.linalg.norm(detour), 1.0
        )
        assert float(detour @ np.array([0.0, 5.0])) <= 1e-12

    def test_weak_update_never_resizes(self):
        rng = np.random.default_rng(41)
        for trial in range(20):
            track = make_track(
                u=float(rng.uniform(0, 200)),
                v=float(rng.uniform(0, 200)),
                vel=(float(rng.uniform(-5, 5)), float(rng.uniform(-5, 5))),
            )
            w, h = track.state.w, track.state.h
            gbest = BBox(float(rng.uniform(0, 200)), float(rng.uniform(0, 200)), 60, 80)
            update_weak(track, swarm_result(gbest), [], TrackerConfig())
            assert (track.state.w, track.state.h) == (w, h)

    def test_history_extension_toggle(self):
        track = make_track(vel=(3.0, 0.0))
        update_weak(track, swarm_result(track.state), [], cfg_with(coast_history=True))
        assert len(track.history) == 1
        track2 = make_track(vel=(3.0, 0.0))
        update_weak(track2, swarm_result(track2.state), [], cfg_with(coast_history=False))
        assert len(track2.history) == 0


class TestPrune:
    def test_fresh_tracks_survive(self):
        tracks = [make_track(tid=i) for i in range(1, 4)]
        assert prune(tracks, 30.0) == tracks

    def test_at_age_max_removed(self):
        young = make_track(tid=1, age=29.9)
        expired = make_track(tid=2, age=30.0)
        assert prune([young, expired], 30.0) == [young]

    def test_idempotent(self):
        tracks = [make_track(tid=1, age=5.0), make_track(tid=2, age=31.0)]
        once = prune(tracks, 30.0)
        assert prune(once, 30.0) == once
