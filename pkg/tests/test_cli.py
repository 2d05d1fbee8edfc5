import json
import subprocess
import sys

import pytest

from sandwich_tn import parse_partition, parse_transformation
from sandwich_tn.cli import run
from sandwich_tn.transform import parse_set


def cli(*args):
    proc = subprocess.run(
        [sys.executable, "-m", "sandwich_tn", *args], capture_output=True, text=True
    )
    return proc.returncode, proc.stdout, proc.stderr


def test_iso():
    code, out, _ = cli("iso", "[1,1,3]", "[3,3,1]")
    assert code == 0 and out.strip() == "isomorphic: true"
    code, out, _ = cli("iso", "[1,1,1]", "[1,1,3]")
    assert code == 0 and out.strip() == "isomorphic: false"


def test_count_theta():
    code, out, _ = cli("--json", "count", "[1,1,1]")
    doc = json.loads(out)
    assert code == 0 and doc["isolated"]["family_total"] == 7 and doc["isolated"]["formula"] == 7


def test_count_has_no_guard():
    code, out, _ = cli("count", "--json", "[1,1,3,4,5,6,7,8]")
    assert code == 0 and json.loads(out)["isolated"]["family_total"] > 0


def test_verify_pass():
    code, out, _ = cli("verify", "[1,2]", "--json")
    assert code == 0 and json.loads(out)["verdict"] == "pass"
    code, out, _ = cli("verify", "[1,2]")
    assert "verdict: pass" in out


def test_verify_partial_exits_zero():
    code, out, _ = cli("verify", "[1,1,3,4]", "--json")
    assert code == 0 and json.loads(out)["verdict"] == "partial(skips)"
    code, out, _ = cli("verify", "[1,1,3,4]", "--pruned", "--json")
    assert code == 0 and json.loads(out)["verdict"] == "pass"


def test_verify_failure_exit_code(monkeypatch):
    import sandwich_tn.cli as mod

    monkeypatch.setattr(
        mod, "verify_classification", lambda *a, **k: {"context": {}, "sections": {}, "verdict": "fail"}
    )
    assert run(["verify", "[1,2]"]) == 1


@pytest.mark.parametrize(
    "args, fragment",
    [
        (["info", "[1,4,3]"], "entry 2"),
        (["count", "[1,a]"], "entry 2"),
        (["classify", "1,2"], "expected"),
        (["classify", "[1,1,3,4,5,6]"], "max_scan"),
        (["iso", "[1,1]", "[1,1,1]"], "degree"),
    ],
)
def test_usage_errors(args, fragment):
    code, _, err = cli(*args)
    assert code == 2 and fragment in err


def test_unknown_subcommand():
    assert run(["frobnicate"]) == 2


def test_max_scan_override():
    code, _, err = cli("idempotents", "[1,1,3]", "--max-scan", "10")
    assert code == 2 and "max_scan=10" in err


def test_info_reports_normalization():
    code, out, _ = cli("--json", "info", "[2,2,1]")
    doc = json.loads(out)
    assert doc["schema_version"] == 1
    assert (doc["normalized"], doc["changed"], doc["l"]) == ("[1,1,3]", True, 2)
    assert doc["blocks"] == "{1,2|3}" and doc["reps"] == [1, 3]


def test_idempotents_json():
    code, out, _ = cli("--json", "idempotents", "[1,1,3]")
    doc = json.loads(out)
    assert code == 0 and doc["agrees"] and doc["scanned"] == doc["formula"] == 7
    theta = [i for i in doc["idempotents"] if i["eps"] == "[2,2,2]"][0]
    assert (theta["trifle"], theta["burdened"]) == (3, 1)


def _strings(node):
    if isinstance(node, dict):
        for v in node.values():
            yield from _strings(v)
    elif isinstance(node, list):
        for v in node:
            yield from _strings(v)
    elif isinstance(node, str):
        yield node


def test_json_round_trips():
    code, out, _ = cli("--json", "classify", "[1,1,3]", "--elements")
    doc = json.loads(out)
    assert code == 0
    assert len(doc["isolated"]) == doc["counts"]["enumerated"] == 23
    checked = 0
    for s in _strings(doc):
        if s.startswith("["):
            assert str(parse_transformation(s)) == s
            checked += 1
        elif s.startswith("{") and "|" in s:
            assert str(parse_partition(s)) == s
            checked += 1
        elif s.startswith("{"):
            assert "{" + ",".join(map(str, sorted(parse_set(s)))) + "}" == s
            checked += 1
    assert checked > 100
    first = doc["isolated"][0]
    assert first["cardinality"] == len(first["elements"])


@pytest.mark.parametrize("args", [["classify", "[1,1,3,4]"], ["verify", "[1,1,3]"], ["idempotents", "[1,2,3]"]])
def test_json_is_deterministic(args):
    a = cli("--json", *args)
    b = cli("--json", *args)
    assert a[0] == 0 and a[1] == b[1]
