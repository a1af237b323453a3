import json
import os

import numpy as np
import pytest

from conftest import write_trajectory
from sweepcover import missions as m
from sweepcover.cli import (EXIT_ASSUMPTION, EXIT_INPUT, EXIT_OK, InputError, MissionConfig,
                            ingest_trajectory, main, read_paving, run_mission, write_paving)
from sweepcover.core_geom import Box2
from sweepcover.coverage import CoverageValue, Paving


def _csv(path, text):
    path.write_text(text)
    return str(path)


class TestIngest:
    def test_minimal_columns(self, tmp_path):
        p = _csv(tmp_path / "a.csv", "t,x,y,psi\n0,0,0,0\n1,1,0,0\n2,2,0,0\n")
        traj = ingest_trajectory(p)
        assert len(traj) == 3
        np.testing.assert_allclose(traj.vel[:, :2], [[1, 0]] * 3)
        assert "velocity reconstructed by finite differences" in traj.report

    def test_full_columns_taken_verbatim(self, tmp_path):
        traj = m.looping_mission()
        got = ingest_trajectory(write_trajectory(traj, tmp_path / "loop.csv"))
        np.testing.assert_array_equal(got.vel[:, :2], traj.vel[:, :2])
        np.testing.assert_array_equal(got.pose, traj.pose)
        assert not any("velocity" in r for r in got.report)

    def test_duplicate_timestamp(self, tmp_path):
        p = _csv(tmp_path / "a.csv", "t,x,y,psi\n0,0,0,0\n1,1,0,0\n1,2,0,0\n")
        with pytest.raises(InputError, match="time order violated at row 4"):
            ingest_trajectory(p)

    def test_invalid_value(self, tmp_path):
        p = _csv(tmp_path / "a.csv", "t,x,y,psi\n0,0,0,0\n1,nan,0,0\n")
        with pytest.raises(InputError, match="invalid value at row 3"):
            ingest_trajectory(p)

    def test_too_short_and_missing(self, tmp_path):
        with pytest.raises(InputError, match="too short"):
            ingest_trajectory(_csv(tmp_path / "a.csv", "t,x,y,psi\n0,0,0,0\n"))
        with pytest.raises(InputError, match="missing columns psi"):
            ingest_trajectory(_csv(tmp_path / "b.csv", "t,x,y\n0,0,0\n1,1,0\n"))


def test_config_validation():
    with pytest.raises(InputError):
        MissionConfig("x.csv", 0.0)
    with pytest.raises(InputError):
        MissionConfig("x.csv", 1.0, side="up")
    with pytest.raises(InputError):
        MissionConfig("x.csv", 1.0, epsilon=0.0)


def test_paving_round_trip(tmp_path):
    roi = Box2.from_bounds(-1.0, 1.0, 0.0, 0.3)
    leaves = [(Box2.from_bounds(-1.0, 0.1, 0.0, 0.3), CoverageValue(0, 0)),
              (Box2.from_bounds(0.1, 1.0, 0.0, 0.3), CoverageValue(1, 3))]
    p = Paving(roi, leaves, 0.1)
    path = str(tmp_path / "p.txt")
    write_paving(p, path)
    assert read_paving(path) == p


@pytest.fixture(scope="module")
def line_csv(tmp_path_factory):
    return write_trajectory(m.straight_line(), tmp_path_factory.mktemp("line") / "line.csv")


def _line_cfg(line_csv, out):
    return MissionConfig(line_csv, 1.0, roi=Box2.from_bounds(-1, 12, -1, 2), epsilon=0.05, out=str(out))


class TestRunMission:
    def test_line_summary(self, line_csv, tmp_path):
        art = run_mission(_line_cfg(line_csv, tmp_path / "out"))
        with open(art["summary"]) as fh:
            s = json.load(fh)
        assert s["mode"] == "certain" and s["assumptions"] == "pass"
        assert s["inner_area"] <= 10.0 <= s["outer_area"]
        assert s["max_level"] == 1
        assert read_paving(art["paving"]) == art["paving_data"]

    def test_byte_identical_reruns(self, line_csv, tmp_path):
        a = run_mission(_line_cfg(line_csv, tmp_path / "a"))
        b = run_mission(_line_cfg(line_csv, tmp_path / "b"))
        for key in ("paving", "summary"):
            with open(a[key], "rb") as fa, open(b[key], "rb") as fb:
                assert fa.read() == fb.read()

    def test_tangential_mission_exits(self, tmp_path, capsys):
        # two exact turns retrace the same annulus, so the contour touches itself along an edge
        csv = write_trajectory(m.circle(5.0, turns=2.0), tmp_path / "c.csv")
        out = tmp_path / "out"
        code = main(["run", "--traj", csv, "--range", "2", "--out", str(out)])
        assert code == EXIT_ASSUMPTION
        assert "assumption violation: tangential self-intersection" in capsys.readouterr().err
        assert not os.path.exists(out / "paving.txt")

    def test_lawnmower_two_sided_strips(self, tmp_path):
        csv = write_trajectory(m.lawnmower(radius=2.4), tmp_path / "lm.csv")
        cfg = MissionConfig(csv, 2.0, side="both", roi=Box2.from_bounds(4, 8, -1, 9), epsilon=0.1,
                            out=str(tmp_path / "out"))
        pav = run_mission(cfg)["paving_data"]
        assert pav.value_at((6, 1.5)) == CoverageValue(2, 2)
        assert pav.value_at((6, 4.5)) == CoverageValue(2, 2)
        assert pav.value_at((6, 3.0)) == CoverageValue(1, 1)
        assert pav.value_at((6, 8.5)) == CoverageValue(0, 0)

    def test_inflated_run_and_extras(self, line_csv, tmp_path):
        cfg = MissionConfig(line_csv, 1.0, roi=Box2.from_bounds(-1, 12, -1, 2), epsilon=0.1,
                            inflate=(0.1, 0.0), out=str(tmp_path / "out"), svg=str(tmp_path / "p.svg"),
                            trace=str(tmp_path / "t.json"))
        art = run_mission(cfg)
        s = art["summary_data"]
        assert s["mode"] == "uncertain"
        assert art["paving_data"].value_at((5, 0.5)) == CoverageValue(1, 1)
        with open(art["svg"]) as fh:
            assert fh.read().startswith("<svg")
        with open(art["trace"]) as fh:
            assert "parts" in json.load(fh)


class TestMain:
    def test_run_ok(self, line_csv, tmp_path, capsys):
        code = main(["run", "--traj", line_csv, "--range", "1", "--epsilon", "0.1", "--out", str(tmp_path)])
        assert code == EXIT_OK
        assert "inner_area" in capsys.readouterr().out

    def test_config_file_and_flag_override(self, line_csv, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"traj": line_csv, "range": 1.0, "epsilon": 0.5, "out": str(tmp_path / "x")}))
        assert main(["run", "--config", str(cfg), "--epsilon", "0.2"]) == EXIT_OK
        with open(tmp_path / "x" / "summary.json") as fh:
            assert json.load(fh)["epsilon"] == 0.2

    def test_input_errors(self, tmp_path, capsys):
        assert main(["run", "--traj", str(tmp_path / "missing.csv"), "--range", "1"]) == EXIT_INPUT
        assert main(["run", "--range", "1"]) == EXIT_INPUT
        assert "input error" in capsys.readouterr().err

    def test_oracle_subcommand(self, line_csv, capsys):
        assert main(["oracle", "--traj", line_csv, "--range", "1", "--point", "5,0.5"]) == EXIT_OK
        out = json.loads(capsys.readouterr().out)
        assert out["kernel_count"] == out["contour_winding"] == out["coverage_measure"] == 1
