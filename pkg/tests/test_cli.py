import json
import os

import numpy as np
import pytest

from udesign.cli import main, parse_range
from udesign.io import read_csv
from udesign.qmat import ValidationError


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def rows(path):
    return read_csv(path)


def test_parse_range():
    assert parse_range("0:0.3:0.03") == pytest.approx(np.arange(11) * 0.03)
    assert parse_range("5:8", integer=True) == [5, 6, 7, 8]
    with pytest.raises(ValidationError):
        parse_range("3:1")


def test_construct_two_axis(workdir):
    assert main(["construct", "--path", "two-axis", "--n1", "z", "--n2", "y", "--samples", "256", "--out", "path.csv"]) == 0
    header, body = rows("path.csv")
    assert len(body) == 256 and header[0] == "s" and len(header) == 9
    assert json.loads((workdir / "path.json").read_text())["kind"]
    assert (workdir / "path.manifest.json").exists()


def test_construct_stereo_curve(workdir):
    assert main(["construct", "--curve", "xi", "--samples", "128", "--project", "stereo", "--out", "xi3d.csv"]) == 0
    header, body = rows("xi3d.csv")
    assert header == ["s", "x1", "x2", "x3"]
    s = np.array([float(r[0]) for r in body])
    y = np.array([[float(v) for v in r[1:]] for r in body])
    th = 2 * np.pi * s
    ref = np.stack([np.cos(th), np.sin(th), np.cos(2 * th)], axis=1) / (np.sqrt(2) + np.sin(2 * th))[:, None]
    assert np.max(np.abs(y - ref)) <= 1e-12


def test_construct_hw(workdir):
    assert main(["construct", "--path", "hw", "--d", "3", "--samples", "81", "--out", "hw.csv"]) == 0
    header, body = rows("hw.csv")
    assert len(body) == 81 and len(header) == 1 + 18


def test_verify_stdout(workdir, capsys):
    assert main(["verify", "--path", "two-axis", "--n", "4"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert abs(rep["frame_potential_t1"] - 1) <= 1e-10 and rep["verdict"]


def test_verify_fiber_scan(workdir):
    assert main(["verify", "--path", "fiber", "--d", "3", "--scan", "5:50", "--out", "fiber.json"]) == 0
    header, body = rows("fiber_scan.csv")
    f = {int(r[0]): float(r[1]) for r in body}
    assert len(f) == 46
    assert all(abs(f[n] - 1) <= 1e-9 for n in range(25, 51))
    assert all(f[n] > 1 + 1e-6 for n in range(5, 15))
    assert f[24] > 1 + 1e-6


def test_verify_open_scan(workdir):
    assert main(["verify", "--path", "open", "--target", "Z", "--scan", "8:64", "--scan-out", "open.csv"]) == 0
    f = [float(r[1]) for r in rows("open.csv")[1]]
    assert f[0] > f[8] > f[-1] > 1
    assert f[-1] - 1 <= 1e-3


def test_simulate_gate_small(workdir):
    argv = ["simulate", "gate", "--pulses", "urc,square", "--eta", "0:0.1:0.05", "--trials", "20", "--seed", "7",
            "--out", "gate.csv"]
    assert main(argv) == 0
    header, body = rows("gate.csv")
    assert header == ["pulse", "eta", "mean_F", "stderr"]
    assert len(body) == 6
    assert float(body[0][2]) == pytest.approx(1, abs=1e-6)
    meta = json.loads((workdir / "gate.json").read_text())
    assert meta["seed"] == 7 and meta["trials"] == 20


def test_simulate_memory_small(workdir):
    argv = ["simulate", "memory", "--kinds", "urc,xy4", "--reps", "3", "--trials", "10", "--seed", "1",
            "--out", "mem.csv"]
    assert main(argv) == 0
    header, body = rows("mem.csv")
    assert header == ["kind", "repetition", "time", "mean_F", "stderr"]
    assert {r[0] for r in body} == {"urc", "xy4"}


def test_simulate_ff(workdir):
    argv = ["simulate", "ff", "--pulses", "urc,square", "--omega", "0:0.1:0.01", "--out", "ff.csv"]
    assert main(argv) == 0
    header, body = rows("ff.csv")
    assert header == ["pulse", "omega", "FF_x", "FF_y", "FF_z"]
    assert [float(v) for v in body[0][2:]] == [0.0, 0.0, 0.0]


def test_project(workdir):
    main(["construct", "--curve", "gamma", "--samples", "16", "--out", "g.csv"])
    assert main(["project", "--in", "g.csv", "--map", "hopf", "--out", "h.csv"]) == 0
    header, body = rows("h.csv")
    y = np.array([[float(v) for v in r[1:]] for r in body])
    assert np.allclose(np.linalg.norm(y, axis=1), 1)


def test_full_precision(workdir):
    main(["construct", "--path", "two-axis", "--samples", "7", "--out", "p.csv"])
    text = (workdir / "p.csv").read_text().splitlines()[3]
    vals = text.split(",")
    assert all(float(repr(float(v))) == float(v) for v in vals)
    assert any(len(v.lstrip("-").replace(".", "").lstrip("0")) >= 15 for v in vals)


@pytest.mark.parametrize("argv", [
    ["construct", "--path", "two-axis", "--samples", "32", "--out", "a.csv"],
    ["verify", "--path", "open", "--target", "Z", "--scan", "8:16", "--out", "r.json"],
    ["simulate", "gate", "--pulses", "corpse", "--eta", "0.1:0.1", "--trials", "15", "--seed", "3", "--out", "g.csv"],
])
def test_replay_byte_identical(workdir, argv):
    assert main(argv) == 0
    out = workdir / argv[argv.index("--out") + 1]
    man = out.with_name(out.stem + ".manifest.json")
    outputs = json.loads(man.read_text())["outputs"]
    before = {o: (workdir / o).read_bytes() for o in outputs}
    for o in outputs:
        os.remove(workdir / o)
    assert main(["--replay", str(man)]) == 0
    assert {o: (workdir / o).read_bytes() for o in outputs} == before


@pytest.mark.parametrize("argv", [
    ["construct", "--path", "two-axis", "--n1", "z", "--n2", "[0,0.6,0.8]", "--out", "bad.csv"],
    ["construct", "--path", "two-axis", "--n1", "q", "--out", "bad.csv"],
    ["construct", "--path", "fiber", "--d", "2", "--out", "bad.csv"],
    ["construct", "--path", "open", "--target", "Rx:nan", "--out", "bad.csv"],
    ["verify", "--path", "two-axis", "--n", "0", "--out", "bad.json"],
    ["simulate", "gate", "--eta", "0:0.1", "--trials", "0", "--out", "bad.csv"],
])
def test_validation_errors_leave_nothing(workdir, argv, capsys):
    assert main(argv) != 0
    assert "error" in capsys.readouterr().err
    assert list(workdir.iterdir()) == []


def test_missing_replay(workdir):
    assert main(["--replay", "nope.json"]) == 1


def test_unknown_kind(workdir):
    with pytest.raises(SystemExit) as exc:
        main(["construct", "--path", "banana", "--out", "x.csv"])
    assert exc.value.code != 0


def test_no_command(workdir, capsys):
    assert main([]) == 2
