import csv
import io
import json

import pytest

from conftest import worked_scenario
from wmgame.cli import dump_scenario, load_scenario, main
from wmgame.game_core import Scenario, build_payoff_matrix


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(map(str, argv)), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def worked_file(tmp_path):
    p = tmp_path / "worked.json"
    p.write_text(dump_scenario(worked_scenario()), encoding="utf-8")
    return p


def write_doc(tmp_path, scenario, name="s.json"):
    p = tmp_path / name
    p.write_text(dump_scenario(scenario), encoding="utf-8")
    return p


def test_document_round_trip(worked_file):
    s = load_scenario(worked_file)
    assert s == worked_scenario()
    assert json.loads(dump_scenario(s)) == worked_scenario().to_dict()
    assert Scenario.from_dict(json.loads(dump_scenario(s))) == s


def test_validate(worked_file, tmp_path):
    code, out, _ = run("validate", worked_file)
    assert code == 0 and "OK" in out
    bad = write_doc(tmp_path, worked_scenario().with_param("betas.1", 0.1))
    code, out, err = run("validate", bad)
    assert code == 2 and err.split()[0] == "invalid-scenario:" and "betas" in out
    warn = write_doc(tmp_path, worked_scenario().with_param("robustness.0.0", 0.95), "w.json")
    assert run("validate", warn)[0] == 0
    code, _, err = run("validate", warn, "--strict")
    assert code == 2 and err.startswith("sign-convention")


def test_parse_and_file_errors(tmp_path):
    p = tmp_path / "broken.json"
    p.write_text('{"alphas": [0.1,\n 0.5,,]}', encoding="utf-8")
    code, _, err = run("validate", p)
    assert code == 1 and err.startswith("parse-error") and "line 2" in err
    p.write_text('{"alphas": [0.1]}', encoding="utf-8")
    assert run("validate", p)[0] == 1
    code, _, err = run("validate", tmp_path / "missing.json")
    assert code == 4 and err.startswith("file-not-found")
    code, _, err = run("frobnicate")
    assert code == 1 and err.startswith("usage-error")


def test_payoff(worked_file, tmp_path):
    dest = tmp_path / "pay.csv"
    assert run("payoff", worked_file, "-o", dest)[0] == 0
    rows = list(csv.DictReader(dest.open(encoding="utf-8")))
    m = build_payoff_matrix(worked_scenario())
    assert [(r["i"], r["j"]) for r in rows] == [("1", "1"), ("1", "2"), ("2", "1"), ("2", "2")]
    for r in rows:
        i, j = int(r["i"]) - 1, int(r["j"]) - 1
        assert float(r["u_alice"]) == m.u_alice[i, j]
        assert float(r["u_bob"]) == m.u_bob[i, j]


def test_payoff_zero_constants(tmp_path):
    s = worked_scenario(i_def=0.0, i_att=0.0, o_def=0.0, o_att=0.0, r_def_minus=0.0,
                        r_def_plus=0.0, r_att_minus=0.0, r_att_plus=0.0)
    code, out, _ = run("payoff", write_doc(tmp_path, s))
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert all(float(r["u_alice"]) == 0 and float(r["u_bob"]) == 0 for r in rows)


def test_payoff_unwritable(worked_file, tmp_path):
    code, _, err = run("payoff", worked_file, "-o", tmp_path / "no" / "such" / "dir.csv")
    assert code == 4 and err.startswith("io-failure")


def test_solve_methods(worked_file):
    code, out, _ = run("solve", worked_file, "--method", "simplified", "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["method"] == "closed-form-simplified"
    assert doc["mixed"]["alice"] == pytest.approx([0.5, 0.5], abs=1e-12)
    assert doc["mixed"]["bob"] == pytest.approx([0.5, 0.5], abs=1e-12)
    code, out, _ = run("solve", worked_file, "--method", "oracle", "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["method"] == "oracle"
    assert doc["mixed"]["alice"] == pytest.approx([0.5, 0.5], abs=1e-7)
    code, out, _ = run("solve", worked_file)
    assert code == 0 and "closed-form-simplified" in out and "0.5 0.5" in out


def test_solve_json_is_lossless(worked_file):
    from wmgame.equilibrium import solve
    rep = solve(worked_scenario())
    doc = json.loads(run("solve", worked_file, "--json")[1])
    assert tuple(doc["mixed"]["alice"]) == rep.mixed.alice
    assert tuple(doc["mixed"]["bob"]) == rep.mixed.bob
    assert tuple(doc["residuals"]) == rep.residuals


def test_solve_assumption_violated(tmp_path):
    p = write_doc(tmp_path, worked_scenario(o_att=0.5))
    code, _, err = run("solve", p, "--method", "simplified")
    assert code == 3 and err.split()[0] == "assumption-violated:"


def _records(path, rows):
    path.write_text("sample_id,label,prediction\n" + "".join(f"{a},{b},{c}\n" for a, b, c in rows),
                    encoding="utf-8")


def _model_files(tmp_path, tag, n_test, ok_test, n_trig, ok_trig):
    test = tmp_path / f"{tag}_test.csv"
    trig = tmp_path / f"{tag}_trig.csv"
    _records(test, [(f"s{i}", 1, 1 if i < ok_test else 0) for i in range(n_test)])
    _records(trig, [(f"t{i}", 2, 2 if i < ok_trig else 0) for i in range(n_trig)])
    return test.name, trig.name


def test_fit(tmp_path):
    t1, g1 = _model_files(tmp_path, "a", 10, 10, 5, 4)    # alpha 0.2, p 1, q 0.8
    t2, g2 = _model_files(tmp_path, "b", 10, 10, 10, 8)   # alpha 0.5, p 1, q 0.8
    manifest = tmp_path / "m.json"
    manifest.write_text(json.dumps({"models": [
        {"alpha": 0.2, "test": t1, "trigger": g1},
        {"alpha": 0.5, "test": t2, "trigger": g2}]}), encoding="utf-8")
    code, out, _ = run("fit", manifest)
    assert code == 0
    lam = float(out.strip().splitlines()[-1].split("=")[1])
    assert lam == pytest.approx(0.2, abs=1e-12)
    assert "alpha=0.2 p=1.0 q=0.8" in out


def test_fit_inconsistent_and_missing(tmp_path):
    t1, g1 = _model_files(tmp_path, "a", 10, 10, 10, 9)   # alpha 0.5, lambda 0.1
    t2, g2 = _model_files(tmp_path, "b", 10, 10, 10, 5)   # alpha 0.5, lambda 0.5
    manifest = tmp_path / "m.json"
    manifest.write_text(json.dumps({"tol": 0.01, "models": [
        {"alpha": 0.5, "test": t1, "trigger": g1},
        {"alpha": 0.5, "test": t2, "trigger": g2}]}), encoding="utf-8")
    code, out, err = run("fit", manifest)
    assert code != 0 and err.startswith("assumption-failure")
    spread = float(out.strip().splitlines()[-1].split("=")[1])
    assert spread == pytest.approx(0.2, abs=1e-12)
    manifest.write_text(json.dumps({"models": [{"alpha": 0.5, "test": "nope.csv", "trigger": g2}]}),
                        encoding="utf-8")
    code, _, err = run("fit", manifest)
    assert code == 4 and err.startswith("file-not-found")


def test_fit_fidelity_checks(tmp_path):
    t1, g1 = _model_files(tmp_path, "a", 20, 19, 5, 5)
    base = tmp_path / "base.csv"
    _records(base, [(f"s{i}", 1, 1) for i in range(20)])
    manifest = tmp_path / "m.json"
    manifest.write_text(json.dumps({"baseline": "base.csv", "models": [
        {"alpha": 0.2, "test": t1, "trigger": g1}]}), encoding="utf-8")
    code, out, _ = run("fit", manifest, "--delta-test", "0.1", "--delta-trigger", "0.01")
    assert code == 0
    assert "agreement=0.95" in out and "fidelity=ok" in out and "verification=ok" in out


def test_region(worked_file, tmp_path):
    csv_path, svg_path = tmp_path / "r.csv", tmp_path / "r.svg"
    code, out, _ = run("region", worked_file, "--axis", "betas.1:0.3:0.9:7", "--csv", csv_path)
    assert code == 0 and "mixed=2" in out
    rows = list(csv.DictReader(csv_path.open(encoding="utf-8")))
    assert [r["class"] for r in rows] == ["pure_only"] * 5 + ["mixed"] * 2
    code, _, err = run("region", worked_file, "--axis", "betas.1:0.3:0.9:7", "--svg", svg_path)
    assert code != 0 and err.startswith("wrong-axis-count")
    code, _, _ = run("region", worked_file, "--axis", "betas.1:0.3:0.9:5",
                     "--axis", "robustness.1.1:0:1:5", "--svg", svg_path)
    assert code == 0 and svg_path.read_text().count("<rect class=") == 25


def test_region_bad_axis(worked_file):
    code, _, err = run("region", worked_file, "--axis", "betas.1:0.3:0.3:7")
    assert code == 1 and err.startswith("invalid-spec")
    code, _, err = run("region", worked_file, "--axis", "betas.1:0.1:0.9:2000",
                       "--axis", "costs.lambda:0.1:0.2:1000")
    assert code != 0 and err.startswith("grid-too-large")
