import json

from click.testing import CliRunner

from relnav.cli import main

from test_sim import corridor_scenario


def write_scenario(tmp_path, data=None, name="scn.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data or corridor_scenario()))
    return str(path)


class TestRigidityCommand:
    def test_report(self, tmp_path):
        fw = tmp_path / "fw.json"
        fw.write_text(json.dumps({
            "n_vertices": 3,
            "edges": [[0, 1], [1, 2], [0, 2]],
            "positions": [0, 0, 1, 0, 0.5, 1],
        }))
        result = CliRunner().invoke(main, ["rigidity", "--framework",
                                           str(fw)])
        assert result.exit_code == 0
        body = json.loads(result.output)
        assert body["is_rigid"] is True

    def test_missing_file(self, tmp_path):
        result = CliRunner().invoke(main, ["rigidity", "--framework",
                                           str(tmp_path / "nope.json")])
        assert result.exit_code == 2


class TestPlanCommand:
    def test_plan(self, tmp_path):
        path = write_scenario(tmp_path)
        result = CliRunner().invoke(main, ["plan", "--scenario", path])
        assert result.exit_code == 0
        body = json.loads(result.output)
        assert body["total_length"] > 0

    def test_invalid_scenario_exit_2(self, tmp_path):
        data = corridor_scenario()
        data["dt"] = 0.0
        path = write_scenario(tmp_path, data)
        result = CliRunner().invoke(main, ["plan", "--scenario", path])
        assert result.exit_code == 2


class TestRunCommand:
    def test_writes_metrics(self, tmp_path):
        path = write_scenario(tmp_path)
        out = tmp_path / "out"
        result = CliRunner().invoke(main, ["run", "--scenario", path,
                                           "--seed", "0", "--out", str(out)])
        assert result.exit_code == 0
        for name in ("eigenvalue.csv", "poses.csv", "separation.csv",
                     "profiles.csv", "tours.csv", "summary.json"):
            assert (out / name).exists()
        summary = json.loads((out / "summary.json").read_text())
        assert summary["seed"] == 0

    def test_seed_changes_outputs(self, tmp_path):
        data = corridor_scenario(sigma_uwb=0.05, sigma_vio=0.004)
        path = write_scenario(tmp_path, data)
        runner = CliRunner()
        outs = []
        for seed in (1, 2):
            out = tmp_path / f"out{seed}"
            result = runner.invoke(main, ["run", "--scenario", path,
                                          "--seed", str(seed),
                                          "--out", str(out)])
            assert result.exit_code == 0
            outs.append((out / "poses.csv").read_text())
        assert outs[0] != outs[1]

    def test_invariant_exit_2(self, tmp_path):
        data = corridor_scenario()
        data["robots"][0]["kind"] = "mav"
        path = write_scenario(tmp_path, data)
        result = CliRunner().invoke(main, ["run", "--scenario", path,
                                           "--out", str(tmp_path / "o")])
        assert result.exit_code == 2
