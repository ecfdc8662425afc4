import csv
import io
import json
import os

import pytest

from triadne import cli


def _run(capsys, args):
    code = cli.main(args)
    out = capsys.readouterr().out
    return code, out


class TestCount:
    def test_csv_table(self, capsys, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        code, out = _run(capsys, ["count", "--d", "3", "--lambda", "2..6",
                                  "--format", "csv"])
        assert code == 0
        rows = list(csv.reader(io.StringIO(out)))
        assert rows[0] == ["lambda", "count", "count/lambda^(d-3)"]
        table = {int(r[0]): int(r[1]) for r in rows[1:]}
        assert table[6] == 48 and table[3] == 0 and table[5] == 0

    def test_planar_all_zero(self, capsys, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        code, out = _run(capsys, ["count", "--d", "2", "--lambda", "2..20",
                                  "--format", "csv"])
        assert code == 0
        rows = list(csv.reader(io.StringIO(out)))[1:]
        assert all(int(r[1]) == 0 for r in rows)

    def test_json_schema(self, capsys, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        code, out = _run(capsys, ["count", "--d", "3", "--lambda", "6"])
        data = json.loads(out)
        assert data["schema"] == "triadne/1"
        assert data["rows"][0][1] == 48

    def test_checkpoint_resume_and_cleanup(self, capsys, tmp_path):
        out_path = str(tmp_path / "counts.json")
        state = out_path + ".state.json"
        # pre-seed a resumable state with a sentinel count
        with open(state, "w") as fh:
            json.dump({"schema": "triadne/1", "d": 3,
                       "counts": {"2": 999}}, fh)
        code = cli.main(["count", "--d", "3", "--lambda", "2..4",
                         "--out", out_path])
        assert code == 0
        data = json.load(open(out_path))
        table = {r[0]: r[1] for r in data["rows"]}
        assert table[2] == 999  # resumed from checkpoint, not recomputed
        assert table[4] == 0
        assert not os.path.exists(state)  # removed after a completed run


class TestTrianglesBox:
    def test_table(self, capsys):
        code, out = _run(capsys, ["triangles-box", "--d", "3",
                                  "--range", "1..2", "--format", "csv"])
        assert code == 0
        rows = list(csv.reader(io.StringIO(out)))
        assert rows[1] == ["1", "8"] and rows[2] == ["2", "80"]


class TestReportsSubcommands:
    def test_gauss_verify(self, capsys):
        code, out = _run(capsys, ["gauss-verify", "--qmax", "6"])
        assert code == 0
        data = json.loads(out)
        assert data["status"] == "pass"
        assert data["schema"] == "triadne/1"

    def test_arcs_scan(self, capsys):
        code, out = _run(capsys, ["arcs-scan", "--N", "32", "--P", "2",
                                  "--samples", "10", "--seed", "3"])
        assert code == 0
        data = json.loads(out)
        assert data["status"] == "pass"
        recs = data["summary"]["records"]
        assert len(recs) == 10
        assert set(recs[0]) == {"alpha", "xi", "eta", "abs_S", "ratio"}

    def test_arcs_scan_reproducible(self, capsys):
        _, out1 = _run(capsys, ["arcs-scan", "--N", "32", "--P", "2",
                                "--samples", "5", "--seed", "11"])
        _, out2 = _run(capsys, ["arcs-scan", "--N", "32", "--P", "2",
                                "--samples", "5", "--seed", "11"])
        assert out1 == out2

    def test_singular(self, capsys):
        code, out = _run(capsys, ["singular", "--d", "7", "--lambda", "6",
                                  "--qmax", "16"])
        assert code == 0
        data = json.loads(out)
        assert data["status"] == "pass"
        assert data["summary"]["sigma_series"] == pytest.approx(
            data["summary"]["sigma_product"], rel=0.02)

    def test_multiplier(self, capsys):
        code, out = _run(capsys, ["multiplier", "--d", "7", "--lambda", "2",
                                  "--qmax", "12"])
        assert code == 0
        data = json.loads(out)
        assert data["status"] == "pass"
        assert 0.9 < data["checks"][0]["extra"]["ratio"] < 1.1

    def test_operator(self, capsys):
        code, out = _run(capsys, ["operator", "--d", "3", "--lambda", "6",
                                  "--format", "csv"])
        assert code == 0
        rows = list(csv.reader(io.StringIO(out)))
        table = {r[1]: float(r[2]) for r in rows[1:]}
        assert table["1"] == pytest.approx(48.0)

    def test_moments(self, capsys):
        code, out = _run(capsys, ["moments", "--range", "2..3",
                                  "--format", "csv"])
        assert code == 0
        rows = list(csv.reader(io.StringIO(out)))
        assert rows[0] == ["N", "J_1", "J_4", "T"]
        assert int(rows[1][1]) == 25


class TestOutputsAndErrors:
    def test_out_file(self, tmp_path, capsys):
        path = str(tmp_path / "t.csv")
        code = cli.main(["triangles-box", "--d", "3", "--range", "1..1",
                         "--out", path, "--format", "csv"])
        assert code == 0
        assert "triangles" in open(path).read()

    def test_unknown_subcommand_exits(self):
        with pytest.raises(SystemExit):
            cli.main(["frobnicate"])
