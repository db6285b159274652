"""File formats: MOTChallenge CSV, PGM frames, config text, scenarios.

Detection rows store top-left corners while the tracker works in
centers, so parsing must convert; writers must produce byte-stable,
LF-terminated output for reproducible runs.
"""

import dataclasses

import numpy as np
import pytest

from swarmtrack import (
    BBox,
    ConfigError,
    GrayImage,
    ScenarioSpec,
    TargetPath,
    TrackerConfig,
    generate_scenario,
)
from swarmtrack.metrics import TrackFile
from swarmtrack.mot_io import (
    parse_config,
    parse_det_file,
    parse_track_file,
    write_det_file,
    write_gt_file,
    write_result_file,
)
from swarmtrack.pgm import read_pgm, write_pgm
from swarmtrack.scenario import parse_scenario_spec, validate_spec


class TestDetParsing:
    def test_topleft_converted_to_center(self, tmp_path):
        path = tmp_path / "det.txt"
        path.write_text("1,-1,100,200,50,100,0.9,-1,-1,-1\n")
        dets = parse_det_file(path)
        det = dets[1][0]
        assert (det.box.u, det.box.v) == (125.0, 250.0)
        assert (det.box.w, det.box.h) == (50.0, 100.0)
        assert det.conf == 0.9

    def test_confidence_clamped_with_warning(self, tmp_path):
        path = tmp_path / "det.txt"
        path.write_text("1,-1,0,0,10,10,1.3,-1,-1,-1\n2,-1,0,0,10,10,-0.2,-1,-1,-1\n")
        with pytest.warns(UserWarning):
            dets = parse_det_file(path)
        assert dets[1][0].conf == 1.0
        assert dets[2][0].conf == 0.0

    def test_non_positive_size_skipped_with_warning(self, tmp_path):
        path = tmp_path / "det.txt"
        path.write_text("1,-1,0,0,0,10,0.9,-1,-1,-1\n1,-1,5,5,10,10,0.9,-1,-1,-1\n")
        with pytest.warns(UserWarning):
            dets = parse_det_file(path)
        assert len(dets[1]) == 1

    def test_malformed_line_rejected_with_location(self, tmp_path):
        path = tmp_path / "det.txt"
        path.write_text("1,-1,0,0,10,10,0.9,-1,-1,-1\nnot,a,row\n")
        with pytest.raises(ValueError, match=r"det\.txt:2"):
            parse_det_file(path)

    def test_frame_must_be_positive(self, tmp_path):
        path = tmp_path / "det.txt"
        path.write_text("0,-1,0,0,10,10,0.9,-1,-1,-1\n")
        with pytest.raises(ValueError):
            parse_det_file(path)


class TestResultFiles:
    def frames(self):
        from swarmtrack.pipeline import TrackOutput

        return {
            1: [TrackOutput(1, BBox(125.0, 250.0, 50.0, 100.0), "strong", 0.25, 0.0)],
            2: [
                TrackOutput(1, BBox(130.0, 250.0, 50.0, 100.0), "weak", 0.5, 3.0),
                TrackOutput(2, BBox(20.0, 20.0, 10.0, 10.0), "new", 0.0, 0.0),
            ],
        }

    def test_confidence_carries_one_minus_penalty(self, tmp_path):
        path = tmp_path / "out.txt"
        write_result_file(self.frames(), path)
        first = path.read_text().splitlines()[0].split(",")
        assert float(first[6]) == 0.75

    def test_round_trip_boxes_to_output_precision(self, tmp_path):
        path = tmp_path / "out.txt"
        write_result_file(self.frames(), path)
        tf = parse_track_file(path)
        by_frame = tf.by_frame()
        got = dict(by_frame[1])[1]
        assert got.u == pytest.approx(125.0, abs=5e-3)
        assert got.v == pytest.approx(250.0, abs=5e-3)

    def test_lf_newlines_and_sorted_rows(self, tmp_path):
        path = tmp_path / "out.txt"
        write_result_file(self.frames(), path)
        raw = path.read_bytes()
        assert b"\r" not in raw
        lines = raw.decode("ascii").splitlines()
        keys = [(int(l.split(",")[0]), int(l.split(",")[1])) for l in lines]
        assert keys == sorted(keys)

    def test_status_recorded_in_extension_column(self, tmp_path):
        path = tmp_path / "out.txt"
        write_result_file(self.frames(), path)
        codes = [line.split(",")[7] for line in path.read_text().splitlines()]
        assert codes == ["2", "0", "1"]  # strong, weak, new

    def test_include_weak_filter(self, tmp_path):
        path = tmp_path / "out.txt"
        write_result_file(self.frames(), path, include_weak=False)
        lines = path.read_text().splitlines()
        assert len(lines) == 2
        assert all(line.split(",")[7] != "0" for line in lines)

    def test_gt_file_round_trip(self, tmp_path):
        gt = TrackFile(records=[(1, 1, BBox(50, 50, 20, 40), 1.0)])
        path = tmp_path / "gt.txt"
        write_gt_file(gt, path)
        back = parse_track_file(path)
        assert back.records[0][0] == 1
        assert back.records[0][1] == 1
        assert back.records[0][2].u == pytest.approx(50.0, abs=5e-3)

    def test_det_file_round_trip(self, tmp_path):
        from swarmtrack.geometry import Detection

        dets = {1: [Detection(box=BBox(40.0, 30.0, 8.0, 16.0), conf=0.7)]}
        path = tmp_path / "det.txt"
        write_det_file(dets, path)
        back = parse_det_file(path)
        assert back[1][0].conf == pytest.approx(0.7, abs=1e-6)
        assert back[1][0].box.u == pytest.approx(40.0, abs=5e-3)


class TestPgm:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(5)
        pixels = rng.integers(0, 256, size=(24, 32)).astype(np.float64)
        path = tmp_path / "frame.pgm"
        write_pgm(path, GrayImage(pixels))
        back = read_pgm(path)
        np.testing.assert_array_equal(back.pixels, pixels)

    def test_comments_and_whitespace_tolerated(self, tmp_path):
        path = tmp_path / "frame.pgm"
        body = b"P5 # format\n# a comment line\n 2 2\n255\n" + bytes([0, 64, 128, 255])
        path.write_bytes(body)
        img = read_pgm(path)
        np.testing.assert_array_equal(img.pixels, [[0.0, 64.0], [128.0, 255.0]])

    def test_wrong_magic_rejected(self, tmp_path):
        path = tmp_path / "frame.pgm"
        path.write_bytes(b"P2\n2 2\n255\n0 0 0 0\n")
        with pytest.raises(ValueError):
            read_pgm(path)

    def test_truncated_payload_rejected(self, tmp_path):
        path = tmp_path / "frame.pgm"
        path.write_bytes(b"P5\n4 4\n255\n" + bytes(7))
        with pytest.raises(ValueError):
            read_pgm(path)

    def test_wide_maxval_rejected(self, tmp_path):
        path = tmp_path / "frame.pgm"
        path.write_bytes(b"P5\n1 1\n65535\n\x00\x00")
        with pytest.raises(ValueError):
            read_pgm(path)

    def test_write_clips_out_of_range(self, tmp_path):
        path = tmp_path / "frame.pgm"
        write_pgm(path, np.array([[-5.0, 300.0]]))
        img = read_pgm(path)
        np.testing.assert_array_equal(img.pixels, [[0.0, 255.0]])


class TestConfigFiles:
    def test_empty_file_gives_defaults(self, tmp_path):
        path = tmp_path / "cfg.txt"
        path.write_text("")
        assert parse_config(path) == TrackerConfig()

    def test_scalar_overrides(self, tmp_path):
        path = tmp_path / "cfg.txt"
        path.write_text("particles = 16\nseed = 7\nframeless = true\ngate = 0.75\n")
        cfg = parse_config(path)
        assert cfg.particles == 16
        assert cfg.seed == 7
        assert cfg.frameless is True
        assert cfg.gate == 0.75

    def test_comments_ignored(self, tmp_path):
        path = tmp_path / "cfg.txt"
        path.write_text("# tracker setup\nparticles = 4  # tiny swarm\n")
        assert parse_config(path).particles == 4

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "cfg.txt"
        path.write_text("swarm_size = 8\n")
        with pytest.raises(ConfigError, match="swarm_size"):
            parse_config(path)

    def test_invalid_simplex_rejected(self, tmp_path):
        path = tmp_path / "cfg.txt"
        path.write_text("sigma_h = 0.9\n")
        with pytest.raises(ConfigError):
            parse_config(path)

    def test_entrance_rectangles(self, tmp_path):
        path = tmp_path / "cfg.txt"
        path.write_text("entrance = 0,0,50,480\nentrance = 590,0,640,480\ndelta_e = 0.2\n")
        cfg = parse_config(path)
        assert cfg.entrance_areas == ((0.0, 0.0, 50.0, 480.0), (590.0, 0.0, 640.0, 480.0))
        assert cfg.delta_e == 0.2

    def test_bad_value_reports_line(self, tmp_path):
        path = tmp_path / "cfg.txt"
        path.write_text("particles = many\n")
        with pytest.raises(ConfigError, match="1"):
            parse_config(path)

    def test_all_problems_reported(self, tmp_path):
        path = tmp_path / "cfg.txt"
        path.write_text("bogus = 1\nparticles = many\n")
        with pytest.raises(ConfigError) as err:
            parse_config(path)
        assert len(err.value.violations) == 2


class TestScenario:
    def spec(self, **overrides) -> ScenarioSpec:
        base = dict(
            n_frames=5,
            width=640,
            height=480,
            targets=[
                TargetPath(1, [(1, 100.0, 100.0), (5, 140.0, 100.0)], (20.0, 40.0)),
                TargetPath(2, [(1, 300.0, 200.0), (5, 260.0, 200.0)], (20.0, 40.0)),
            ],
        )
        base.update(overrides)
        return ScenarioSpec(**base)

    def test_noiseless_detections_equal_ground_truth(self):
        gt, dets, _ = generate_scenario(self.spec())
        gt_frames = gt.by_frame()
        for frame, items in gt_frames.items():
            assert len(dets[frame]) == len(items)
            for (tid, box), det in zip(items, dets[frame]):
                assert det.box == box
                assert det.conf == 1.0

    def test_waypoints_interpolate_linearly(self):
        gt, _, _ = generate_scenario(self.spec())
        boxes = {f: dict(items)[1] for f, items in gt.by_frame().items()}
        assert boxes[1].u == 100.0
        assert boxes[3].u == pytest.approx(120.0)
        assert boxes[5].u == 140.0

    def test_occlusion_window_hides_target_but_keeps_gt(self):
        gt, dets, _ = generate_scenario(self.spec(occlusions=[(2, 2, 3)]))
        for frame in (2, 3):
            assert len(gt.by_frame()[frame]) == 2
            assert len(dets[frame]) == 1
        assert len(dets[4]) == 2

    def test_deterministic_given_seed(self):
        spec = self.spec(sigma_det=2.0, dropout=0.3, fp_rate=0.5, seed=9)
        a = generate_scenario(spec)
        b = generate_scenario(spec)
        assert a[0].records == b[0].records
        for frame in a[1]:
            assert [(d.box, d.conf) for d in a[1][frame]] == [
                (d.box, d.conf) for d in b[1][frame]
            ]

    def test_seed_changes_noise(self):
        base = self.spec(sigma_det=2.0)
        a = generate_scenario(dataclasses.replace(base, seed=1))
        b = generate_scenario(dataclasses.replace(base, seed=2))
        assert a[1][1][0].box != b[1][1][0].box

    def test_dropout_start_guards_early_frames(self):
        spec = self.spec(n_frames=10, dropout=0.9, dropout_start=4, seed=3)
        spec.targets[0].waypoints = [(1, 100.0, 100.0), (10, 190.0, 100.0)]
        spec.targets[1].waypoints = [(1, 300.0, 200.0), (10, 210.0, 200.0)]
        _, dets, _ = generate_scenario(spec)
        for frame in (1, 2, 3):
            assert len(dets[frame]) == 2
        assert sum(len(dets[f]) for f in range(4, 11)) < 14

    def test_false_positives_marked_low_confidence(self):
        spec = self.spec(fp_rate=3.0, fp_conf=0.4, seed=2)
        _, dets, _ = generate_scenario(spec)
        fps = [d for frame in dets.values() for d in frame if d.conf == 0.4]
        assert fps  # Poisson(3) over 5 frames practically guarantees some

    def test_frames_render_targets(self):
        _, _, frames = generate_scenario(self.spec(make_frames=True))
        assert frames is not None
        img = frames[1]
        assert img.shape == (480, 640)
        assert img[100, 100] > 60  # target 1 brighter than background
        assert img[0, 0] == 60

    def test_validate_rejects_bad_windows(self):
        bad = self.spec(occlusions=[(2, 4, 99)])
        assert validate_spec(bad)
        bad = self.spec(occlusions=[(7, 2, 3)])
        assert any("unknown target" in p for p in validate_spec(bad))

    def test_parse_round_trip(self, tmp_path):
        path = tmp_path / "scene.txt"
        path.write_text(
            "frames = 5\nwidth = 320\nheight = 240\nseed = 4\n"
            "sigma_det = 1.5\ndropout = 0.1\ndropout_start = 2\n"
            "waypoint.1 = 1,50,60\nwaypoint.1 = 5,90,60\nsize.1 = 12,24\n"
            "occlusion.1 = 2,3\n"
        )
        spec = parse_scenario_spec(path)
        assert spec.n_frames == 5
        assert spec.width == 320
        assert spec.seed == 4
        assert spec.sigma_det == 1.5
        assert spec.dropout_start == 2
        assert spec.targets[0].size == (12.0, 24.0)
        assert spec.targets[0].waypoints == [(1, 50.0, 60.0), (5, 90.0, 60.0)]
        assert spec.occlusions == [(1, 2, 3)]

    def test_parse_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "scene.txt"
        path.write_text("frames = 5\nvelocity.1 = 1,2\n")
        with pytest.raises(ValueError, match="velocity.1"):
            parse_scenario_spec(path)
