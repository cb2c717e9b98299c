import json

import pytest

from nonarch.cli import main
from nonarch.fourier import LocallyConstantFn, point
from nonarch.field import Ball, Qp


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


THM = "[field]\np = 3\n[build]\npreset = thm320\nn = 2\nr = 3\n"


def test_build_geometric_mass_one_and_deterministic(tmp_path):
    cfg = write(tmp_path, "a.ini", THM)
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["build", "--config", cfg, "--out", str(a)]) == 0
    assert main(["build", "--config", cfg, "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert json.loads(a.read_text())["mass"] == "1"


def test_build_exp_second_moment(tmp_path, capsys):
    cfg = write(tmp_path, "e.ini", "[field]\np = 3\n[build]\npreset = exp\nq = 2\n")
    assert main(["build", "--config", cfg]) == 0
    chk = json.loads(capsys.readouterr().out)["checks"]["second_moment"]
    assert chk["scaling_ok"] and not chk["literal_equal"]


@pytest.mark.parametrize("text,code", [
    ("[field\n", 2),
    ("[field]\np = 3\n", 2),
    ("[field]\np = 3\n[build]\npreset = nothing\n", 2),
    ("[field]\np = x\n[build]\npreset = thm320\nn = 2\n", 2),
    ("[field]\np = 4\n[build]\npreset = thm320\nn = 2\n", 3),
    ("[field]\np = 3\n[build]\npreset = thm320\nn = 0\n", 3),
    ("[field]\np = 3\n[build]\npreset = thm320\nn = 2\nr = 1\n", 3),
])
def test_build_errors(tmp_path, text, code):
    assert main(["build", "--config", write(tmp_path, "bad.ini", text)]) == code


def test_build_matrix(tmp_path, capsys):
    cfg = write(tmp_path, "m.ini", "[field]\np = 5\n[build]\npreset = matrix\nrows = 1,2;3,4\n")
    assert main(["build", "--config", cfg]) == 0
    art = json.loads(capsys.readouterr().out)
    assert art["kind"] == "operator"


def test_eval_charfun_at_zero(tmp_path, capsys):
    cfg = write(tmp_path, "a.ini", THM)
    art = tmp_path / "a.json"
    main(["build", "--config", cfg, "--out", str(art)])
    assert main(["eval", "charfun", "--measure", str(art), "--z", "0"]) == 0
    assert json.loads(capsys.readouterr().out) == {"re": 1.0, "im": 0.0}


def test_eval_pd_constant(capsys):
    assert main(["eval", "pd", "--const", "5", "--p", "3", "--x", "1/3"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["re"] == 0 and out["im"] == 0


def test_eval_pd_from_file(tmp_path, capsys):
    F = Qp(2)
    f = LocallyConstantFn.indicator(Ball(point(F, 0), 0))
    path = write(tmp_path, "f.json", json.dumps(f.to_json()))
    assert main(["eval", "pd", "--f", path, "--b", "1", "--x", "1"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["exact"] == "1/2"


def test_eval_det_identity(capsys):
    assert main(["eval", "det", "--identity", "4", "--p", "5"]) == 0
    assert json.loads(capsys.readouterr().out) == "1"


def test_eval_det_negative(tmp_path, capsys):
    cfg = write(tmp_path, "m.ini", "[field]\np = 5\n[build]\npreset = matrix\nrows = 0,1;2,3\n")
    art = tmp_path / "op.json"
    assert main(["build", "--config", cfg, "--out", str(art)]) == 0
    assert main(["eval", "det", "--matrix", str(art)]) == 0
    assert json.loads(capsys.readouterr().out) == "-2"


def test_eval_errors(capsys):
    assert main(["eval", "nope"]) == 2
    assert main(["eval", "charfun", "--measure", "/nonexistent.json"]) == 4
    err = json.loads(capsys.readouterr().out)
    assert err["op"] == "charfun" and "error" in err


def test_verify(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["verify", "haar-character", "--seed", "9", "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["totals"]["fail"] == 0 and rep["seed"] == 9
    assert main(["verify", "no-such-suite"]) == 2


def test_list_suites(capsys):
    assert main(["list-suites"]) == 0
    names = [line.split("\t")[0] for line in capsys.readouterr().out.splitlines()]
    assert "cov-3.24" in names and len(names) == 10


def test_seed_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("NONARCH_SEED", "17")
    out = tmp_path / "r.json"
    main(["verify", "kakutani", "--out", str(out)])
    assert json.loads(out.read_text())["seed"] == 17
