import io
import json

import numpy as np
import pytest

from comonorisk.cli import main, read_scenarios
from comonorisk.distributions import DiscretePosition
from comonorisk.errors import InvariantViolation
from comonorisk.measures import var
from comonorisk.portfolio import PortfolioProblem, mv_tangency

TWO_ASSETS = "prob,A,B\n0.05,-10,1\n0.95,5,-1\n"
MV_TABLE = "prob,X1,X2\n0.3,-1,2\n0.4,1,0\n0.3,4,1\n"


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def csv_file(tmp_path):
    def make(text, name="s.csv"):
        path = tmp_path / name
        path.write_text(text)
        return str(path)

    return make


def test_risk_matches_kernel(csv_file):
    code, out, _ = run("risk", csv_file(TWO_ASSETS), "--measure", '{"measure":"var","p":0.05}')
    assert code == 0
    rows = dict(line.split("\t") for line in out.strip().splitlines())
    a = DiscretePosition([-10, 5], [0.05, 0.95])
    b = DiscretePosition([1, -1], [0.05, 0.95])
    assert float(rows["A"]) == var(a, 0.05) and float(rows["B"]) == var(b, 0.05)


def test_risk_json(csv_file):
    code, out, _ = run("risk", csv_file(TWO_ASSETS), "--json", "--measure", '{"measure":"avar","p":0.05}')
    doc = json.loads(out)
    assert code == 0 and doc["schema"] == 1 and doc["risk"]["A"] == pytest.approx(10.0)


def test_measure_from_file(csv_file, tmp_path):
    spec = tmp_path / "m.json"
    spec.write_text('{"measure": "max_loss"}')
    code, out, _ = run("risk", csv_file(TWO_ASSETS), "--measure", str(spec))
    assert code == 0 and out.startswith("A\t10.0")


@pytest.mark.parametrize(
    "text, code",
    [
        ("", 2),
        ("prob,A\n", 2),
        ("p,A\n1,2\n", 2),
        ("prob,A\n0.5,1\n0.5\n", 2),
        ("prob,A\n0.5,x\n0.5,1\n", 2),
        ("prob,A\n0.5,1\n0.4,2\n", 3),
        ("prob,A\n1.0,1\n0.0,2\n", 3),
    ],
)
def test_risk_input_errors(csv_file, text, code):
    got, _, err = run("risk", csv_file(text), "--measure", '{"measure":"var","p":0.05}')
    assert got == code and err


def test_line_numbers_in_errors(csv_file):
    _, _, err = run("risk", csv_file("prob,A\n0.5,1\n0.5,oops\n"), "--measure", '{"measure":"var","p":0.1}')
    assert ":3:" in err


def test_bad_measure_and_missing_file(csv_file):
    assert run("risk", csv_file(TWO_ASSETS), "--measure", "{bad json")[0] == 2
    assert run("risk", csv_file(TWO_ASSETS), "--measure", '{"measure":"var"}')[0] == 2
    assert run("risk", "/nonexistent.csv", "--measure", '{"measure":"max_loss"}')[0] == 2
    assert run("risk", csv_file(TWO_ASSETS))[0] == 2


def test_read_scenarios_labels():
    t = read_scenarios(TWO_ASSETS)
    assert t.asset_labels == ("A", "B")
    with pytest.raises(InvariantViolation):
        read_scenarios("prob,A\n-0.5,1\n1.5,2\n")


def test_verify_unknown_suite():
    assert run("verify", "nope")[0] == 2


def test_verify_surplus_contains_avar_witness():
    code, out, _ = run("verify", "surplus", "--seed", "7")
    doc = json.loads(out)
    assert code == 0 and doc["ok"] and doc["schema"] == 1
    first = doc["suites"]["surplus"]["claims"][0]
    assert first["status"] == "witness"
    assert first["witness"]["position"]["atoms"] == [[-2.0, 0.25], [1.0, 0.75]]
    assert first["witness"]["gap"] == 0.5


def test_verify_dynamic_report():
    code, out, _ = run("verify", "dynamic", "--seed", "7")
    claims = json.loads(out)["suites"]["dynamic"]["claims"]
    assert code == 0
    entropic = [c for c in claims if c["claim"] == "entropic family satisfies the tower identity"]
    assert entropic and entropic[0]["status"] == "pass"
    gap = [c for c in claims if "avar(0.5) is time consistent on the two-by-two tree" in c["claim"]]
    assert gap and gap[0]["status"] == "witness" and gap[0]["witness"]["gap"] > 0.05


def test_frontier_mv(csv_file):
    code, out, _ = run("frontier", csv_file(MV_TABLE), "--x0", "-0.5", "--config", '{"objective":"mv_tradeoff","lam":1}')
    lines = out.strip().splitlines()
    assert code == 0 and lines[0] == "beta,gamma,expected_return,risk,efficient"
    table = read_scenarios(MV_TABLE)
    p = PortfolioProblem(table, -0.5, "mv_tradeoff", lam=1.0)
    g_t = mv_tangency(p)
    rows = [line.split(",") for line in lines[1:]]
    tangent = [r for r in rows if float(r[1]) == g_t]
    assert tangent
    for b, g, e, r, _ in tangent:
        assert float(e) == p.expected_return(float(b), g_t)
        assert float(r) == pytest.approx(p.variance(float(b), g_t), abs=1e-12)


def test_frontier_verdicts(csv_file):
    cfg = '{"objective":"spectral_tradeoff","distortion":"avar:0.5","lambdas":[0.0,0.4,0.5,0.6,1.0]}'
    code, out, _ = run("frontier", csv_file(MV_TABLE), "--x0", "0.8", "--config", cfg, "--verdicts")
    rows = [line.split(",") for line in out.strip().splitlines()]
    assert code == 0 and rows[0] == ["lam", "threshold", "ratio", "gamma_tangency", "beta"]
    assert [r[-1] for r in rows[1:]] == ["unbounded", "unbounded", "0", "0", "0"]


def test_frontier_errors(csv_file):
    three = "prob,A,B,C\n0.5,1,2,3\n0.5,2,1,0\n"
    assert run("frontier", csv_file(three), "--x0", "0")[0] == 2
    assert run("frontier", csv_file(MV_TABLE))[0] == 2
    same = "prob,A,B\n0.5,1,1\n0.5,2,2\n"
    code, out, _ = run("frontier", csv_file(same), "--x0", "0")
    assert code == 3 and out == ""


def test_counterexample_si_plus():
    code, out, _ = run("counterexample", "si_plus", "--distortion", "avar:0.5")
    doc = json.loads(out)
    assert code == 0 and doc["kind"] == "si_plus"
    w = doc["witness"]
    assert w["gap"] == pytest.approx(0.5)
    assert (w["rho_x"], w["rho_positive_part"], w["rho_negative_part"]) == pytest.approx((0.5, -0.5, 1.0))
    assert run("counterexample", "si_plus", "--distortion", "var:0.05")[0] == 4


def test_counterexample_kinds():
    code, out, _ = run("counterexample", "avar_tower")
    assert code == 0 and json.loads(out)["witness"]["gap"] > 0.05
    code, out, _ = run("counterexample", "avar_levelset", "--measure", '{"measure":"avar","p":0.5}')
    assert code == 0 and abs(json.loads(out)["witness"]["deviation"]) > 1e-3
    code, out, _ = run("counterexample", "s_var_comonotone", "--seed", "3")
    assert code == 0 and abs(json.loads(out)["witness"]["gap"]) > 1e-6
    code, out, _ = run("counterexample", "ap_ross", "--pair", "avar:0.1,avar:0.5")
    assert code == 0 and "premium_1" in json.loads(out)["witness"]


def test_counterexample_unsatisfiable():
    assert run("counterexample", "s_var_comonotone", "--config", '{"s1":[1,1,1]}')[0] == 4
    assert run("counterexample", "avar_tower", "--measure", '{"measure":"var","p":0.5}')[0] == 2
    assert run("counterexample", "ap_ross", "--pair", "avar:0.1")[0] == 2


def test_usage_errors():
    assert run()[0] == 2
    assert run("bogus")[0] == 2
    assert run("--help")[0] == 0
