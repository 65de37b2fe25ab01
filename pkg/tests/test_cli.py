from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from wirebend.cli import main
from wirebend.paths import Polyline3
from wirebend.scene_io import parse_program_csv, save_scene

from conftest import walkthrough_scene


def write_geometry(path: Path, points):
    path.write_text(json.dumps({"points": points}))


@pytest.fixture
def straight_json(tmp_path):
    p = tmp_path / "straight.json"
    write_geometry(p, [[0, 0, 0], [80, 0, 0]])
    return p


@pytest.fixture
def staircase_json(tmp_path, staircase):
    p = tmp_path / "staircase.json"
    write_geometry(p, staircase.to_list())
    return p


class TestCompileSimulate:
    def test_compile_straight_single_feed(self, tmp_path, straight_json, profile_file):
        out = tmp_path / "prog.csv"
        rc = main(["compile", str(straight_json), "--profile", str(profile_file), "--out", str(out)])
        assert rc == 0
        assert out.read_bytes() == b"FEED,80.000\n"

    def test_simulate_round_trip(self, tmp_path, profile_file):
        geo = tmp_path / "bent.json"
        write_geometry(geo, [[0, 0, 0], [20, 0, 0], [20, 20, 0]])
        prog = tmp_path / "prog.csv"
        out = tmp_path / "sim.json"
        assert main(["compile", str(geo), "--profile", str(profile_file), "--out", str(prog)]) == 0
        assert main(["simulate", str(prog), "--profile", str(profile_file), "--out", str(out)]) == 0
        points = json.loads(out.read_text())["points"]
        assert np.allclose(points, [[0, 0, 0], [20, 0, 0], [20, 20, 0]])

    def test_compile_constraint_violation_exit_2(self, tmp_path, profile_file):
        geo = tmp_path / "bad.json"
        write_geometry(geo, [[0, 0, 0], [2, 0, 0], [2, 20, 0]])
        out = tmp_path / "prog.csv"
        rc = main(["compile", str(geo), "--profile", str(profile_file), "--out", str(out)])
        assert rc == 2

    def test_missing_file_exit_3(self, tmp_path, profile_file):
        rc = main(
            ["compile", str(tmp_path / "nope.json"), "--profile", str(profile_file),
             "--out", str(tmp_path / "o.csv")]
        )
        assert rc == 3

    def test_compensate(self, tmp_path, profile_file):
        prog = tmp_path / "prog.csv"
        prog.write_bytes(b"FEED,10.000\nBEND,45.000\nFEED,10.000\n")
        out = tmp_path / "comp.csv"
        rc = main(["compensate", str(prog), "--profile", str(profile_file), "--out", str(out)])
        assert rc == 0
        program = parse_program_csv(out.read_bytes())
        assert program.instructions[1].value > 45.0


class TestCollide:
    def test_staircase_has_conflicts(self, staircase_json, capsys):
        rc = main(["collide", str(staircase_json)])
        assert rc == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["conflict_count"] >= 1

    def test_straight_clean(self, straight_json, capsys):
        rc = main(["collide", str(straight_json)])
        assert rc == 0
        assert json.loads(capsys.readouterr().out)["conflict_count"] == 0

    def test_deplanarize_reduces_conflicts(self, tmp_path, staircase_json, capsys):
        out = tmp_path / "dep.json"
        assert main(["deplanarize", str(staircase_json), "--epsilon", "5", "--out", str(out)]) == 0
        main(["collide", str(staircase_json)])
        before = json.loads(capsys.readouterr().out)["conflict_count"]
        main(["collide", str(out)])
        after = json.loads(capsys.readouterr().out)["conflict_count"]
        assert after < before


class TestSimplifyCommand:
    def test_simplify_writes_feasible_path(self, tmp_path, profile_file, capsys):
        geo = tmp_path / "noisy.json"
        rng = np.random.default_rng(1)
        t = np.linspace(0, 1, 120)
        pts = np.stack([400 * t, 30 * np.sin(4 * t), np.zeros_like(t)], axis=1)
        pts += rng.uniform(-0.5, 0.5, pts.shape)
        write_geometry(geo, pts.tolist())
        out = tmp_path / "clean.json"
        rc = main(["simplify", str(geo), "--profile", str(profile_file), "--out", str(out)])
        assert rc == 0
        cleaned = Polyline3.from_list(json.loads(out.read_text())["points"])
        assert np.all(cleaned.segment_lengths() >= 8.39)
        err = capsys.readouterr().err
        assert "min feed" in err  # head-geometry formula trace


class TestSceneCommands:
    def test_link_synthesizes_bridge(self, tmp_path, profile):
        from wirebend.scene_io import Scene, load_scene

        scene = Scene()
        scene.add_part(Polyline3.from_list([[0, 0, 0], [30, 0, 0]]))
        scene.add_part(Polyline3.from_list([[70, 0, 0], [100, 0, 0]]))
        src = tmp_path / "scene.json"
        out = tmp_path / "linked.json"
        save_scene(scene, src)
        rc = main(
            ["link", str(src), "--part-a", "1", "--end-a", "end",
             "--part-b", "2", "--end-b", "start", "--out", str(out)]
        )
        assert rc == 0
        linked = load_scene(out)
        assert len(linked.parts) == 3
        assert linked.parts[2].path.arc_length() == pytest.approx(40.0)

    def test_check_orientation(self, tmp_path, profile, capsys):
        from wirebend.connectors import Splice, link as link_op
        from wirebend.scene_io import Scene

        scene = Scene()
        scene.add_part(Polyline3.from_list([[0, 20, 0], [-30, 20, 0]]))
        scene.add_part(Polyline3.from_list([[0, 30, 0], [30, 30, 0]]))
        link_op(scene, Splice(part_a=1, end_a="start", part_b=2, end_b="start", sleeve_length_mm=15))
        src = tmp_path / "scene.json"
        save_scene(scene, src)
        rc = main(["check-orientation", str(src)])
        assert rc == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["warnings"][0]["height_delta_mm"] == pytest.approx(10.0)

    def test_capacity_prints_grams(self, tmp_path, profile, capsys):
        from wirebend.scene_io import Scene

        scene = Scene()
        scene.add_part(Polyline3.from_list([[0, 0, 0], [100, 0, 0]]))
        src = tmp_path / "scene.json"
        save_scene(scene, src)
        rc = main(["capacity", str(src), "--part", "1", "--load", "50,0,0"])
        assert rc == 0
        grams = float(capsys.readouterr().out.strip())
        assert grams > 0

    def test_export_writes_bundle(self, tmp_path, profile, profile_file):
        scene = walkthrough_scene(profile)
        src = tmp_path / "scene.json"
        save_scene(scene, src)
        out_dir = tmp_path / "bundle"
        rc = main(
            ["export", str(src), "--profile", str(profile_file), "--out-dir", str(out_dir)]
        )
        assert rc == 0
        names = sorted(p.name for p in out_dir.iterdir())
        assert names == ["assembly_plan.json", "part_1.csv", "part_2.csv", "part_3.csv"]

    def test_export_deterministic_bytes(self, tmp_path, profile, profile_file):
        scene = walkthrough_scene(profile)
        src = tmp_path / "scene.json"
        save_scene(scene, src)
        d1, d2 = tmp_path / "b1", tmp_path / "b2"
        for d in (d1, d2):
            assert main(["export", str(src), "--profile", str(profile_file), "--out-dir", str(d)]) == 0
        for p in sorted(d1.iterdir()):
            assert p.read_bytes() == (d2 / p.name).read_bytes()

    def test_export_frb_sidecar_format(self, tmp_path, profile, profile_file):
        scene = walkthrough_scene(profile)
        src = tmp_path / "scene.json"
        save_scene(scene, src)
        out_dir = tmp_path / "frb"
        rc = main(["export", str(src), "--profile", str(profile_file),
                   "--out-dir", str(out_dir), "--format", "frb"])
        assert rc == 0
        program = parse_program_csv((out_dir / "part_1.csv").read_bytes())
        assert program.instructions[0].op == "FEED"


class TestConnectorAndTrack:
    def test_connector_gen(self, tmp_path, profile_file):
        spec = tmp_path / "spec.json"
        spec.write_text(json.dumps({"kind": "CylinderWrap", "params": {"object_diameter_mm": 66}}))
        out = tmp_path / "part.json"
        rc = main(["connector", "gen", str(spec), "--profile", str(profile_file), "--out", str(out)])
        assert rc == 0
        assert len(json.loads(out.read_text())["points"]) > 4

    def test_connector_gen_infeasible_exit_2(self, tmp_path, profile_file):
        spec = tmp_path / "spec.json"
        spec.write_text(json.dumps({"kind": "CylinderWrap", "params": {"object_diameter_mm": 5}}))
        rc = main(["connector", "gen", str(spec), "--profile", str(profile_file),
                   "--out", str(tmp_path / "p.json")])
        assert rc == 2

    def test_track_gen(self, tmp_path, profile_file):
        spec = tmp_path / "track.json"
        spec.write_text(json.dumps({"center": {"points": [[0, 300, 0], [500, 300, 0]]}}))
        out = tmp_path / "trackset.json"
        rc = main(["track", "gen", str(spec), "--profile", str(profile_file), "--out", str(out)])
        assert rc == 0
        payload = json.loads(out.read_text())
        assert len(payload["rails"]) == 4
        assert len(payload["clip_positions"]) == 11


class TestRoundtripCheck:
    def test_seeded_run_passes(self, profile_file, capsys):
        rc = main(["roundtrip-check", "--profile", str(profile_file), "--n", "60", "--seed", "7"])
        assert rc == 0
        assert "max vertex error" in capsys.readouterr().out

    def test_deterministic_output(self, profile_file, capsys):
        main(["roundtrip-check", "--profile", str(profile_file), "--n", "25", "--seed", "3"])
        first = capsys.readouterr().out
        main(["roundtrip-check", "--profile", str(profile_file), "--n", "25", "--seed", "3"])
        assert capsys.readouterr().out == first
