import json
import socket
import subprocess
import sys
import time
import urllib.request

import pytest

from border_forge import demo
from border_forge.cli import main
from border_forge.engine import apply_script
from border_forge.gridmap import load_map, maps_equal, save_map


@pytest.fixture(scope="module")
def demo_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("demo")
    demo.write_demo_assets(str(out))
    return out


def run_cli(args, capsys):
    code = main(args)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def last_stderr_json(err):
    lines = [line for line in err.strip().splitlines() if line.strip()]
    return json.loads(lines[-1])


class TestApply:
    def test_empty_script_output_equals_input(self, demo_dir, tmp_path, capsys):
        script = tmp_path / "empty.json"
        script.write_text('{"borders": []}')
        code, out, _ = run_cli(["apply", "--map", str(demo_dir / "lab.yaml"),
                                "--script", str(script), "--out", str(tmp_path / "o")], capsys)
        assert code == 0
        posterior = load_map(str(tmp_path / "o" / "posterior.yaml"))
        assert maps_equal(posterior, load_map(str(demo_dir / "lab.yaml")))

    def test_teaching_script_matches_engine(self, demo_dir, tmp_path, capsys):
        code, out, _ = run_cli(["apply", "--map", str(demo_dir / "lab.yaml"),
                                "--script", str(demo_dir / "teaching.json"),
                                "--out", str(tmp_path / "o")], capsys)
        assert code == 0
        summary = json.loads(out)
        assert summary["borders_applied"] == 2
        produced = load_map(str(tmp_path / "o" / "posterior.yaml"))
        expected = apply_script(demo.build_lab_map(), demo.teaching_script()).current
        assert maps_equal(produced, expected)

    def test_malformed_json_exit_2(self, demo_dir, tmp_path, capsys):
        script = tmp_path / "bad.json"
        script.write_text('{"borders": [}')
        code, _, err = run_cli(["apply", "--map", str(demo_dir / "lab.yaml"),
                                "--script", str(script), "--out", str(tmp_path / "o")], capsys)
        assert code == 2
        payload = last_stderr_json(err)
        assert payload["class"] == "script_parse"
        assert "line" in payload["detail"]

    def test_bad_border_exit_1_with_index(self, demo_dir, tmp_path, capsys):
        script = tmp_path / "bad_seed.json"
        script.write_text(json.dumps({"borders": [
            {"points": [[0.5, 0.5], [1.0, 1.0]], "closed": False,
             "seed": [0.06, 0.06], "delta": 1.0},
        ]}))
        code, _, err = run_cli(["apply", "--map", str(demo_dir / "lab.yaml"),
                                "--script", str(script), "--out", str(tmp_path / "o")], capsys)
        assert code == 1
        payload = last_stderr_json(err)
        assert payload["class"] == "script_border"
        assert payload["detail"]["index"] == 0

    def test_deterministic_outputs(self, demo_dir, tmp_path, capsys):
        outs = []
        for name in ("a", "b"):
            run_cli(["apply", "--map", str(demo_dir / "lab.yaml"),
                     "--script", str(demo_dir / "teaching.json"),
                     "--out", str(tmp_path / name)], capsys)
            outs.append({
                "pgm": (tmp_path / name / "posterior.pgm").read_bytes(),
                "yaml": (tmp_path / name / "posterior.yaml").read_bytes(),
                "session": (tmp_path / name / "session.json").read_bytes(),
            })
        assert outs[0] == outs[1]

    def test_strict_barrier_mode_flag(self, demo_dir, tmp_path, capsys):
        script = tmp_path / "half.json"
        script.write_text(json.dumps({"borders": [
            {"points": [[p[0], p[1]] for p in demo.CARPET_CHAIN], "closed": True,
             "seed": list(demo.CARPET_SEED), "delta": 0.5},
        ]}))
        run_cli(["apply", "--map", str(demo_dir / "lab.yaml"), "--script", str(script),
                 "--out", str(tmp_path / "o"), "--barrier-mode", "strict"], capsys)
        posterior = load_map(str(tmp_path / "o" / "posterior.yaml"), mode="raw")
        carpet_cell = posterior.world_to_cell(demo.CARPET_CHAIN[0])
        assert posterior.cells[carpet_cell.row, carpet_cell.col] == pytest.approx(0.5, abs=1 / 255)


class TestEval:
    def test_posterior_from_gt_scores_one(self, demo_dir, tmp_path, capsys):
        run_cli(["apply", "--map", str(demo_dir / "lab.yaml"),
                 "--script", str(demo_dir / "carpet_only.json"),
                 "--out", str(tmp_path / "apply")], capsys)
        code, out, _ = run_cli(["eval", "--prior", str(demo_dir / "lab.yaml"),
                                "--posterior", str(tmp_path / "apply" / "posterior.yaml"),
                                "--gt", str(demo_dir / "carpet_gt.yaml"),
                                "--out", str(tmp_path / "eval")], capsys)
        assert code == 0
        report = json.loads(out)
        assert report["jaccard"] == 1.0
        assert (tmp_path / "eval" / "overlay.png").exists()

    def test_prior_equals_posterior_scores_zero(self, demo_dir, tmp_path, capsys):
        code, out, _ = run_cli(["eval", "--prior", str(demo_dir / "lab.yaml"),
                                "--posterior", str(demo_dir / "lab.yaml"),
                                "--gt", str(demo_dir / "carpet_gt.yaml"),
                                "--out", str(tmp_path / "eval")], capsys)
        assert code == 0
        assert json.loads(out)["jaccard"] == 0.0

    def test_shifted_square_one_third(self, tmp_path, capsys):
        from .conftest import free_map
        prior = free_map(width=30, height=30, resolution=1.0)
        posterior = prior.copy()
        posterior.cells[5:15, 10:20] = 1.0
        gt = prior.copy()
        gt.cells[5:15, 5:15] = 1.0
        save_map(prior, str(tmp_path / "prior.yaml"))
        save_map(posterior, str(tmp_path / "post.yaml"))
        save_map(gt, str(tmp_path / "gt.yaml"))
        code, out, _ = run_cli(["eval", "--prior", str(tmp_path / "prior.yaml"),
                                "--posterior", str(tmp_path / "post.yaml"),
                                "--gt", str(tmp_path / "gt.yaml"),
                                "--out", str(tmp_path / "eval")], capsys)
        assert code == 0
        report = json.loads(out)
        assert report["intersection_cells"] == 50
        assert report["union_cells"] == 150
        assert report["jaccard"] == pytest.approx(1 / 3)

    def test_geometry_mismatch_exit_3(self, demo_dir, tmp_path, capsys):
        from .conftest import free_map
        other = free_map(width=10, height=10)
        other.cells[2, 2] = 1.0
        save_map(other, str(tmp_path / "small.yaml"))
        code, _, err = run_cli(["eval", "--prior", str(demo_dir / "lab.yaml"),
                                "--posterior", str(demo_dir / "lab.yaml"),
                                "--gt", str(tmp_path / "small.yaml"),
                                "--out", str(tmp_path / "eval")], capsys)
        assert code == 3
        assert last_stderr_json(err)["class"] == "geometry_mismatch"

    def test_exclude_barrier_via_script_replay(self, demo_dir, tmp_path, capsys):
        run_cli(["apply", "--map", str(demo_dir / "lab.yaml"),
                 "--script", str(demo_dir / "carpet_only.json"),
                 "--out", str(tmp_path / "apply")], capsys)
        code, out, _ = run_cli(["eval", "--prior", str(demo_dir / "lab.yaml"),
                                "--posterior", str(tmp_path / "apply" / "posterior.yaml"),
                                "--gt", str(demo_dir / "carpet_gt.yaml"),
                                "--out", str(tmp_path / "eval"),
                                "--no-include-barrier",
                                "--script", str(demo_dir / "carpet_only.json")], capsys)
        assert code == 0
        assert json.loads(out)["jaccard"] < 1.0  # perimeter band now missing


class TestPlan:
    def test_free_straight_line(self, tmp_path, capsys):
        from .conftest import free_map
        save_map(free_map(width=40, height=40, resolution=0.1), str(tmp_path / "m.yaml"))
        code, out, _ = run_cli(["plan", "--map", str(tmp_path / "m.yaml"),
                                "--start", "0.25,1.95", "--goal", "3.75,1.95",
                                "--out", str(tmp_path / "o"), "--inflation", "0"], capsys)
        assert code == 0
        body = json.loads(out)
        euclid = 3.5
        assert body["length_m"] <= euclid + 0.2  # within one cell-diagonal
        assert (tmp_path / "o" / "plan.png").exists()

    def test_carpet_crossing_flips(self, demo_dir, tmp_path, capsys):
        run_cli(["apply", "--map", str(demo_dir / "lab.yaml"),
                 "--script", str(demo_dir / "teaching.json"),
                 "--out", str(tmp_path / "apply")], capsys)
        start = f"{demo.NAV_START[0]},{demo.NAV_START[1]}"
        goal = f"{demo.NAV_GOAL[0]},{demo.NAV_GOAL[1]}"
        paths = {}
        for name, map_path in (("pre", demo_dir / "lab.yaml"),
                               ("post", tmp_path / "apply" / "posterior.yaml")):
            code, out, _ = run_cli(["plan", "--map", str(map_path),
                                    "--start", start, "--goal", goal,
                                    "--out", str(tmp_path / name)], capsys)
            assert code == 0
            paths[name] = json.loads(out)["waypoints"]
        lab = demo.build_lab_map()
        carpet = demo.carpet_region_mask(lab)

        def crosses(waypoints):
            return any(carpet[lab.world_to_cell(tuple(p)).row,
                              lab.world_to_cell(tuple(p)).col] for p in waypoints)

        assert crosses(paths["pre"]) and not crosses(paths["post"])

    def test_goal_inside_occupied_exit_4(self, demo_dir, tmp_path, capsys):
        run_cli(["apply", "--map", str(demo_dir / "lab.yaml"),
                 "--script", str(demo_dir / "teaching.json"),
                 "--out", str(tmp_path / "apply")], capsys)
        code, _, err = run_cli(["plan", "--map", str(tmp_path / "apply" / "posterior.yaml"),
                                "--start", "5.5125,1.6375", "--goal", "3.6125,1.6375",
                                "--out", str(tmp_path / "o")], capsys)
        assert code == 4
        assert last_stderr_json(err)["class"] == "planning"


class TestServe:
    def test_health_endpoint(self, demo_dir):
        with socket.socket() as s:
            s.bind(("127.0.0.1", 0))
            port = s.getsockname()[1]
        proc = subprocess.Popen(
            [sys.executable, "-m", "border_forge", "serve",
             "--map", str(demo_dir / "lab.yaml"), "--port", str(port)],
            stdout=subprocess.PIPE, stderr=subprocess.PIPE)
        try:
            deadline = time.time() + 15
            body = None
            while time.time() < deadline:
                try:
                    with urllib.request.urlopen(
                            f"http://127.0.0.1:{port}/healthz", timeout=1) as resp:
                        body = json.loads(resp.read())
                    break
                except OSError:
                    time.sleep(0.2)
            assert body == {"status": "ok"}
        finally:
            proc.terminate()
            proc.wait(timeout=10)

    def test_occupied_port_fails_cleanly(self, demo_dir):
        with socket.socket() as blocker:
            blocker.bind(("127.0.0.1", 0))
            blocker.listen(1)
            port = blocker.getsockname()[1]
            result = subprocess.run(
                [sys.executable, "-m", "border_forge", "serve",
                 "--map", str(demo_dir / "lab.yaml"), "--port", str(port)],
                capture_output=True, text=True, timeout=30)
        assert result.returncode == 1
        assert "cannot bind" in result.stderr
