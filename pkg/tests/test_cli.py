import json
import subprocess
import sys

import pytest

from conftest import FIXTURES, fixture_doc
from gforge.cli import COMMANDS, dumps, main, parse_report, run
from gforge.problem import ProblemError, load_problem


def call(capsys, *args):
    code = main([str(a) for a in args])
    out = capsys.readouterr()
    return code, out.out, out.err


def fx(name):
    return FIXTURES / f"{name}.json"


def test_nakayama_with_oracle(capsys):
    code, out, _ = call(capsys, "nakayama", fx("example53"), "--param", "p=1", "--oracle")
    rep = json.loads(out)
    assert code == 0 and rep["status"] == "ok"
    assert rep["results"]["mu"]["x1"] == "-1/4*x1"
    assert rep["results"]["oracle"]["agreement"] is True
    assert rep["hypotheses"]["B pure"] == "verified"
    assert rep["hypotheses"]["noetherian or Koszul"] == "not asserted"


def test_check_twist_flip(capsys):
    code, out, _ = call(capsys, "check-twist", fx("flip"))
    res = json.loads(out)["results"]
    assert code == 0 and res["certified"]
    assert res["hilbert_C"] == res["convolution"]


def test_hdet_ore(capsys):
    code, out, _ = call(capsys, "hdet", fx("ore"), "--param", "q=3")
    assert code == 0 and json.loads(out)["results"]["hdet"] == [["3"]]


def test_assertion_flags(capsys):
    _, out, _ = call(capsys, "nakayama", fx("ore"), "--param", "c=1", "--assert-noetherian")
    hyp = json.loads(out)["hypotheses"]
    assert hyp["A (x)^tau-bar B noetherian"] == "asserted"
    _, out, _ = call(capsys, "nakayama", fx("flip"), "--assert-koszul")
    assert json.loads(out)["hypotheses"]["A, B Koszul"] == "asserted"


@pytest.mark.parametrize("command", COMMANDS)
def test_every_command_succeeds_and_round_trips(capsys, command):
    code, out, _ = call(capsys, command, fx("double_ore"))
    assert code == 0
    assert dumps(parse_report(out)) == out


def test_reports_are_byte_identical(capsys):
    first = call(capsys, "all", fx("example53"))[1]
    second = call(capsys, "all", fx("example53"))[1]
    assert first == second
    rep = json.loads(first)
    assert rep["results"]["tau_E"]["ok"]
    assert rep["order"].startswith("deglex")


def test_text_output(capsys):
    code, out, _ = call(capsys, "hdet", fx("example53"), "--output", "text")
    assert code == 0
    assert "hdet: [[4, 0], [0, 4]]" in out
    assert "status: ok" in out


def test_exit_code_verification_failure(tmp_path, capsys):
    doc = fixture_doc("example53")
    doc["sigma"]["x1"] = [["x1", "0"], ["0", "x2"]]
    f = tmp_path / "bad.json"
    f.write_text(json.dumps(doc))
    code, out, _ = call(capsys, "check-twist", f)
    rep = json.loads(out)
    assert code == 2 and rep["status"] == "verification failure"
    assert "is not killed" in rep["error"]


def test_exit_code_not_twisting(tmp_path, capsys):
    doc = fixture_doc("double_ore")
    doc["sigma"]["x"] = [["0", "x"], ["x", "0"]]
    f = tmp_path / "nt.json"
    f.write_text(json.dumps(doc))
    code, out, _ = call(capsys, "hilbert", f)
    assert code == 2 and "degree 3" in json.loads(out)["error"]


def test_exit_code_undetermined(capsys):
    code, out, _ = call(capsys, "nakayama", fx("example53"), "--max-homological", "2")
    rep = json.loads(out)
    assert code == 3 and rep["status"] == "undetermined at bound"
    assert rep["hypotheses"]["A AS-regular"] == "undetermined at bound"


def test_non_invertible_sigma_over_small_field(capsys):
    code, out, _ = call(capsys, "det", fx("ore"), "--field", "2", "--param", "q=2")
    rep = json.loads(out)
    assert code == 2 and rep["hypotheses"]["sigma invertible"] == "failed"
    assert rep["field"] == "2"


def test_parse_errors(tmp_path, capsys):
    doc = fixture_doc("ore")
    doc["sigma"]["x"] = [["q*x +* 2"]]
    f = tmp_path / "p.json"
    f.write_text(json.dumps(doc))
    code, out, err = call(capsys, "hilbert", f)
    assert code == 4 and out == ""
    msg = json.loads(err)["error"]
    assert "sigma.x[0][0]" in msg and "offset 5" in msg
    f.write_text("{")
    assert call(capsys, "hilbert", f)[0] == 4
    assert call(capsys, "hilbert", tmp_path / "missing.json")[0] == 4


@pytest.mark.parametrize("mutate, where", [
    (lambda d: d.pop("B"), "B"),
    (lambda d: d["sigma"].update(x=[["x", "x"]]), "sigma.x"),
    (lambda d: d.update(field="4"), "field"),
    (lambda d: d["A"].update(relations=["x*x + x"]), "A.relations[0]"),
    (lambda d: d.update(assertions=["smooth"]), "assertions"),
    (lambda d: d.update(parameters={"q": "1/0"}), "parameters.q"),
    (lambda d: d["delta"].update(x=["x*x", "x*x"]), "delta.x"),
])
def test_problem_errors_locate_the_field(mutate, where):
    doc = fixture_doc("ore")
    mutate(doc)
    with pytest.raises(ProblemError) as e:
        load_problem(doc)
    assert e.value.where == where


def test_overrides():
    prob = load_problem(fixture_doc("ore"), {"q": "5"}, field="7", D=5, H=3)
    assert (prob.D, prob.H, prob.field.p) == (5, 3, 7)
    assert prob.params["q"] == prob.field(5)


def test_supplied_resolution_is_used():
    doc = fixture_doc("example53")
    doc["resolutions"] = {"A": {"shifts": [[0], [1, 1], [3, 3], [4]],
                                "rows": [[["x1"], ["x2"]],
                                         [["x2*x1", "-x1*x1"], ["x2*x2", "-x1*x2"]],
                                         [["-x2", "x1"]]]}}
    rep, code = run("hdet", load_problem(doc))
    assert code == 0 and rep["results"]["hdet"] == [["4", "0"], ["0", "4"]]


def test_console_entry_point():
    out = subprocess.run([sys.executable, "-m", "gforge.cli", "hilbert", str(fx("flip"))],
                         capture_output=True, text=True, check=True).stdout
    assert json.loads(out)["results"]["C"][:4] == [1, 2, 3, 4]
