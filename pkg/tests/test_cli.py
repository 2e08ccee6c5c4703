import io
import json

from lorentz_holonomy.cli import run
from lorentz_holonomy.walker import SIGN_CONVENTION


def call(argv, stdin=None, monkeypatch=None):
    out, err = io.StringIO(), io.StringIO()
    if stdin is not None:
        monkeypatch.setattr("sys.stdin", io.StringIO(stdin))
    code = run(argv, out, err)
    return code, out.getvalue(), err.getvalue()


def family_json(name, params, monkeypatch):
    code, text, _ = call(["family", "--name", name, "--params", json.dumps(params)], monkeypatch=monkeypatch)
    assert code == 0
    return text


def test_family_pipe_into_analyze(monkeypatch):
    text = family_json("cahen-wallach", {"n": 2, "lambda": [1, 2]}, monkeypatch)
    code, out, _ = call(["analyze", "--json"], stdin=text, monkeypatch=monkeypatch)
    assert code == 0
    rep = json.loads(out)
    assert rep["checks"]["R"]["verdict"] == "parallel"
    assert rep["holonomy"]["type"] == "II" and rep["holonomy"]["dim"] == 2
    assert rep["sign_convention"] == SIGN_CONVENTION
    assert "timing_seconds" not in rep


def test_analyze_flat(tmp_path):
    f = tmp_path / "flat.json"
    f.write_text(json.dumps({"n": 2, "H": "0"}))
    code, out, _ = call(["analyze", "--metric", str(f), "--json"])
    rep = json.loads(out)
    assert code == 0
    assert rep["holonomy"]["type"] == "trivial"
    assert rep["blocks"]["lambda"] == "0"
    assert all(x == "0" for row in rep["blocks"]["T"] for x in row)


def test_analyze_blocks_only(tmp_path):
    f = tmp_path / "m.json"
    f.write_text(json.dumps({"n": 2, "H": "x1^2*u"}))
    code, out, _ = call(["analyze", "--blocks", "--metric", str(f), "--json", ])
    rep = json.loads(out)
    assert code == 0 and "holonomy" not in rep
    assert rep["blocks"]["T"][0][0] == "u"


def test_check_two_symmetric(tmp_path):
    f = tmp_path / "ts.json"
    code, _, _ = call(["family", "--name", "two-symmetric", "--params",
                       '{"n": 2, "Hdiag": [0, 1]}', "--emit", str(f)])
    assert code == 0 and f.exists()
    code, out, _ = call(["check", "--two-symmetric", "--metric", str(f), "--json"])
    assert code == 0 and json.loads(out)["verdict"] is True


def test_check_recurrent_and_constant(tmp_path, monkeypatch):
    f = tmp_path / "w2.json"
    f.write_text(family_json("walker-II", {"n": 2, "lambda": [2, 1]}, monkeypatch))
    _, out, _ = call(["check", "--recurrent", "--metric", str(f), "--json"])
    rep = json.loads(out)
    assert rep["verdict"] == "recurrent"
    assert rep["theta"]["u"] == {"numerator": "F'(u)", "denominator": "F(u)"}
    _, out, _ = call(["check", "--parallel", "--constant", "F", "--metric", str(f), "--json"])
    assert json.loads(out)["parallel"] is True
    code, _, err = call(["check", "--constant", "G", "--metric", str(f)])
    assert code == 2 and "G" in err


def test_check_bilinear_and_weyl(tmp_path, monkeypatch):
    f = tmp_path / "c.json"
    f.write_text(family_json("conf-recurrent", {"n": 2, "lambda": [1, -1]}, monkeypatch))
    _, out, _ = call(["check", "--weyl-recurrent", "--metric", str(f), "--json"])
    assert json.loads(out)["verdict"] == "recurrent"
    _, out, _ = call(["check", "--bilinear", "--metric", str(f), "--json"])
    rep = json.loads(out)
    assert rep["family_alpha_g_plus_beta_tau2_parallel"] is True


def test_holonomy_command(tmp_path):
    f = tmp_path / "m.json"
    f.write_text(json.dumps({"n": 2, "H": "F0(u)*(2*x1^2 + x2^2)", "formal_functions": ["F0"]}))
    point = json.dumps({"coords": {"x1": 1, "u": 0}, "jets": {"0": [1, 2, 3, 4, 5]}})
    code, out, _ = call(["holonomy", "--metric", str(f), "--point", point, "--order", "1", "--json"])
    rep = json.loads(out)
    assert code == 0 and rep["type"] == "II"
    assert rep["basis"][0][0][1] in ("1", "-1", "0")
    code, _, err = call(["holonomy", "--metric", str(f), "--point", json.dumps({"jets": {"0": [1]}})])
    assert code == 1 and "InsufficientJet" in err


def test_exit_codes(tmp_path):
    assert call(["analyze", "--metric", str(tmp_path / "missing.json")])[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert call(["analyze", "--metric", str(bad)])[0] == 2
    bad.write_text(json.dumps({"n": 2, "H": "x1 +"}))
    assert call(["analyze", "--metric", str(bad)])[0] == 2
    bad.write_text(json.dumps({"n": 2, "H": "x1", "A": ["v", "0"]}))
    assert call(["analyze", "--metric", str(bad)])[0] == 2
    code, _, err = call(["family", "--name", "walker-II", "--params", '{"n": 2, "lambda": [1, 0]}'])
    assert code == 1 and "Lambda2Zero" in err
    assert call(["family", "--name", "pp-wave", "--params", "[1]"])[0] == 2
    assert call(["bogus"])[0] == 2
    f = tmp_path / "m1.json"
    f.write_text(json.dumps({"n": 1, "H": "x1^2*u"}))
    code, _, err = call(["check", "--weyl-recurrent", "--metric", str(f)])
    assert code == 1 and "DimensionTooSmall" in err


def test_json_is_deterministic(tmp_path):
    f = tmp_path / "m.json"
    f.write_text(json.dumps({"n": 2, "H": "v*x1 + x2^2*u", "A": ["x2", "0"]}))
    a = call(["analyze", "--metric", str(f), "--json"])[1]
    b = call(["analyze", "--metric", str(f), "--json"])[1]
    assert a == b


def test_metric_round_trip(monkeypatch):
    from lorentz_holonomy.metric_io import loads_metric

    text = family_json("conf-recurrent", {"n": 2, "lambda": [1, -1]}, monkeypatch)
    m = loads_metric(text)
    code, out, _ = call(["analyze", "--blocks", "--json"], stdin=text, monkeypatch=monkeypatch)
    rep = json.loads(out)
    assert loads_metric(json.dumps(rep["metric"])) == m


def test_timing_flag(tmp_path):
    f = tmp_path / "m.json"
    f.write_text(json.dumps({"n": 2, "H": "x1^2"}))
    rep = json.loads(call(["analyze", "--metric", str(f), "--json", "--timing"])[1])
    assert set(rep["timing_seconds"]) == {"blocks", "checks", "holonomy"}


def test_family_check_flag():
    code, out, _ = call(["family", "--name", "cahen-wallach", "--params", '{"n": 2, "lambda": [1, 2]}', "--check"])
    assert code == 0 and "FAIL" not in out and "PASS" in out


def test_selftest():
    code, out, _ = call(["selftest"])
    assert code == 0
    assert out.strip().endswith("all expectations passed")


def test_human_output(tmp_path):
    f = tmp_path / "m.json"
    f.write_text(json.dumps({"n": 2, "H": "x1^2"}))
    code, out, _ = call(["check", "--metric", str(f)])
    assert code == 0 and "verdict: parallel" in out
