import json

import pytest

from comonorisk.reports import CheckReport, jsonable
from comonorisk.verify import SUITES, dumps, run_suite

SPEC_SUITES = ("axioms", "surplus", "eligible", "elicitability", "dynamic", "portfolio")


def test_suite_registry():
    assert set(SPEC_SUITES) <= set(SUITES)
    with pytest.raises(KeyError):
        run_suite("nope")


@pytest.mark.parametrize("name", ["surplus", "eligible", "elicitability", "portfolio", "preferences"])
def test_suites_pass_and_repeat(name):
    a = run_suite(name, 11)
    assert a["ok"], [c for c in a["suites"][name]["claims"] if not c["ok"]]
    assert dumps(a) == dumps(run_suite(name, 11))


def test_report_schema():
    doc = json.loads(dumps(run_suite("elicitability", 2)))
    assert set(doc) == {"schema", "suite", "seed", "ok", "suites"}
    for claim in doc["suites"]["elicitability"]["claims"]:
        assert {"claim", "status", "expect", "ok", "checked", "tolerance"} <= set(claim)
        assert claim["status"] in {"pass", "fail", "witness", "no-witness"}


def test_report_status_logic():
    assert CheckReport("c", True).status == "pass"
    assert CheckReport("c", False).status == "fail"
    assert CheckReport("c", False, expect="witness", witness={"x": 1}).status == "witness"
    assert CheckReport("c", True, expect="witness").status == "no-witness"
    assert not CheckReport("c", False, expect="witness").ok


def test_jsonable_handles_numpy_and_infinities():
    import numpy as np

    out = jsonable({"a": np.arange(2), "b": np.float64(float("inf")), "c": (1, 2)})
    assert out == {"a": [0, 1], "b": "inf", "c": [1, 2]}
