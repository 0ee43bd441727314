import json
from pathlib import Path

import numpy as np
import pytest

import squidgets as sq
from squidgets import document as docio
from squidgets.cli import main
from squidgets.session import SessionEvent

from conftest import make_scene

DEMOS = Path(__file__).parent.parent / "demos"


def write_state(tmp_path, mutate=None):
    scene, registry = make_scene()
    scene.add(sq.ellipse("egg", tx=50.0))
    scene.add(sq.spotlight("lamp", cone_angle=0.4, ty=60.0))
    registry.create_canvas(scene, (-20, -10, 20, 10), ["egg"])
    registry.create_discrete(scene, [(-10.0, -5.0 + k) for k in range(11)])
    scene.set(("egg", "transform", "tx"), 60.0)
    registry.create_discrete(scene, [(-2.0 + 0.4 * (k % 3), -5.0 + k) for k in range(11)])
    text = docio.dumps_scene(scene, registry, registry.config)
    if mutate:
        doc = json.loads(text)
        mutate(doc)
        text = json.dumps(doc, indent=2) + "\n"
    path = tmp_path / "scene.json"
    path.write_text(text)
    return path, scene, registry


def write_stroke(tmp_path, points, name="stroke.jsonl"):
    events = [SessionEvent(0, "pointer-down", tuple(points[0]))]
    events += [SessionEvent(2 * (i + 1), "pointer-move", tuple(p))
               for i, p in enumerate(points[1:-1])]
    events.append(SessionEvent(2 * len(points), "pointer-up", tuple(points[-1])))
    path = tmp_path / name
    path.write_text(docio.dumps_log(events))
    return path


class TestReplay:
    def test_empty_log_round_trips(self, tmp_path, capsys):
        scene_path, _, registry = write_state(tmp_path)
        log_path = tmp_path / "empty.jsonl"
        log_path.write_text(docio.dumps_log(
            [], docio.doc_sha256(scene_path.read_text()), registry.config.sha256()))
        out_path = tmp_path / "out.json"
        code = main(["replay", str(scene_path), str(log_path), "-o", str(out_path)])
        assert code == 0
        assert out_path.read_text() == scene_path.read_text()

    def test_demo_replay_byte_identical(self, tmp_path):
        scene_path = DEMOS / "arrange_shapes.scene.json"
        log_path = DEMOS / "arrange_shapes.log.jsonl"
        outs = []
        for i in range(2):
            out = tmp_path / f"out{i}.json"
            assert main(["replay", str(scene_path), str(log_path), "-o", str(out)]) == 0
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]
        assert outs[0] != scene_path.read_bytes()

    def test_hash_mismatch_fails(self, tmp_path):
        scene_path, _, registry = write_state(tmp_path)
        log_path = tmp_path / "log.jsonl"
        log_path.write_text(docio.dumps_log([], "0" * 64, registry.config.sha256()))
        assert main(["replay", str(scene_path), str(log_path)]) == 1


class TestMatch:
    def test_retraced_squidget_ranks_first(self, tmp_path, capsys):
        scene_path, scene, registry = write_state(tmp_path)
        stroke_path = write_stroke(tmp_path, registry.discrete["d1"].curve)
        assert main(["match", str(scene_path), str(stroke_path)]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        first = lines[1].split()
        assert first[0] == "d1"
        assert float(first[2]) < 1e-6
        assert lines[-1] == "selected: d1"

    def test_table_order_matches_selection(self, tmp_path, capsys):
        scene_path, scene, registry = write_state(tmp_path)
        noisy = registry.discrete["d2"].curve + 0.1
        stroke_path = write_stroke(tmp_path, noisy)
        assert main(["match", str(scene_path), str(stroke_path)]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[1].split()[0] == "d2"
        assert lines[-1] == "selected: d2"


class TestSolve:
    def test_cone_angle_inversion(self, tmp_path, capsys):
        scene_path, scene, registry = write_state(tmp_path)
        hotspot = next(s for s in registry.implicit_squidgets(scene)
                       if s.object_id == "lamp" and s.contour_index == 0)
        cone = ("lamp", "shape", "cone_angle")
        scene.restore(cone, 0.5)
        target = registry.regenerate_segment(scene, hotspot)
        scene.restore(cone, 0.4)
        stroke_path = write_stroke(tmp_path, target)
        code = main(["solve", str(scene_path), str(stroke_path),
                     "--attr", "lamp/shape/cone_angle"])
        assert code == 0
        out = capsys.readouterr().out
        solved = float(next(l for l in out.splitlines() if l.startswith("solved")).split("=")[1])
        assert solved == pytest.approx(0.5, abs=1e-3)

    def test_unknown_attribute_is_domain_error(self, tmp_path, capsys):
        scene_path, scene, registry = write_state(tmp_path)
        stroke_path = write_stroke(tmp_path, [(0.0, 0.0), (1.0, 1.0)])
        assert main(["solve", str(scene_path), str(stroke_path),
                     "--attr", "lamp/shape/wobble"]) == 1


class TestValidate:
    def test_clean_scene_passes(self, tmp_path, capsys):
        scene_path, _, _ = write_state(tmp_path)
        assert main(["validate", str(scene_path)]) == 0
        assert "violations: 0" in capsys.readouterr().out

    def test_negative_scale_named(self, tmp_path, capsys):
        def mutate(doc):
            doc["objects"][0]["scale"] = -1.0

        scene_path, _, _ = write_state(tmp_path, mutate)
        assert main(["validate", str(scene_path)]) == 1
        out = capsys.readouterr().out
        assert "violation: egg scale positive" in out

    def test_seeded_probes(self, tmp_path, capsys):
        scene_path, _, _ = write_state(tmp_path)
        assert main(["validate", str(scene_path), "--seed", "7"]) == 0
        assert "rigid fit recovery" in capsys.readouterr().out

    def test_drive_cycle_detected(self, tmp_path):
        def mutate(doc):
            doc["canvases"][0]["attrs"].append("squidget/s1/w")
            for record in doc["discrete"]:
                record["snapshot"]["squidget/s1/w"] = 0.0
            doc["continuous"] = [{
                "id": "s1", "members": ["d1", "d2"],
                "path": [[-10.0, 0.0], [-2.0, 0.0]], "weight": 0.0,
            }]

        scene_path, _, _ = write_state(tmp_path, mutate)
        assert main(["validate", str(scene_path)]) == 1


class TestUsage:
    def test_missing_subcommand_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == 2

    def test_missing_file_is_domain_error(self, tmp_path):
        assert main(["validate", str(tmp_path / "absent.json")]) == 1

    def test_bad_config_override(self, tmp_path):
        scene_path, _, _ = write_state(tmp_path)
        assert main(["validate", str(scene_path), "--config", "nope=1"]) == 1

    def test_config_override_applies(self, tmp_path, capsys):
        scene_path, scene, registry = write_state(tmp_path)
        stroke_path = write_stroke(tmp_path, registry.discrete["d1"].curve)
        assert main(["match", str(scene_path), str(stroke_path),
                     "--config", "resample_n=12"]) == 0
        assert main(["match", str(scene_path), str(stroke_path),
                     "--config", "lambda=0.5"]) == 0


class TestShapeOnlyMatch:
    def test_shape_only_flag_changes_scores(self, tmp_path, capsys):
        scene_path, scene, registry = write_state(tmp_path)
        moved = registry.discrete["d1"].curve + np.array([3.0, 0.0])
        stroke_path = write_stroke(tmp_path, moved)
        assert main(["match", str(scene_path), str(stroke_path)]) == 0
        spatial = capsys.readouterr().out
        assert main(["match", str(scene_path), str(stroke_path), "--shape-only"]) == 0
        shaped = capsys.readouterr().out
        row = next(l for l in shaped.splitlines() if l.startswith("d1"))
        assert float(row.split()[2]) < 1e-6  # centering removed the offset
        assert shaped != spatial
