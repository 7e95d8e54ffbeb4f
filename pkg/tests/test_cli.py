"""Command-line interface: outputs, exit codes and determinism."""

import csv
import io
import json
import subprocess
import sys

import pytest

from subgraph_polytopes.cli import main
from subgraph_polytopes.geometry.io import read_polytope

FACET_Q = "1 - 16/3 x^3 + 11/2 x^4 - 1/2 x^5"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_polytope_segment(capsys):
    code, out, _ = run(capsys, "polytope", "-F", "K2", "-n", "2")
    doc = json.loads(out)
    assert code == 0
    assert doc["vertices"] == [["0/1"], ["1/1"]]
    assert doc["meta"] == {"kind": "density", "n": 2, "vector": "K2"}


def test_polytope_writes_json_and_off(tmp_path, capsys):
    target = tmp_path / "p6.json"
    code, out, _ = run(capsys, "polytope", "-F", "K3,C4,K4-e", "-n", "6", "--kind", "density", "-o", str(target))
    assert code == 0
    summary = json.loads(out)
    assert summary["vertices"] == 18 and summary["facets"] == 24
    assert len(read_polytope(target).vertices) == 18
    assert (tmp_path / "p6.off").read_text().startswith("OFF\n18 24 ")


@pytest.mark.parametrize(
    "argv,msg",
    [
        (["polytope", "-F", "K3", "-n", "2"], "exceeds host size"),
        (["polytope", "-F", "K3,Q", "-n", "4"], "position 3"),
        (["polytope", "-F", "K2", "-n", "9"], "capacity error"),
        (["certify", "1 + x^", "-F", "K2", "-n", "3"], "position 6"),
        (["certify", "1 - x^2", "-F", "K3,C4,K4-e", "-n", "6"], "no pattern"),
        (["check", "nonneg-facets", "-F", "K3,C4,K4-e", "-n", "6"], "subgraph"),
    ],
)
def test_input_errors_exit_2(capsys, argv, msg):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert msg in err


def test_unknown_check_name_is_rejected(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["check", "bogus"])
    assert exc.value.code == 2


def test_certify_running_example(capsys):
    code, out, _ = run(capsys, "certify", FACET_Q, "-F", "K3,C4,K4-e", "-n", "6")
    cert = json.loads(out)["certificate"]
    assert code == 0 and cert["status"] == "certified"
    assert cert["min_inner_product"] == "-1/1" and len(cert["tight_vertices"]) == 3


def test_certify_not_certified_exits_1(capsys):
    code, out, _ = run(capsys, "certify", "1 - 2 x^1", "-F", "K2", "-n", "3")
    assert code == 1
    assert json.loads(out)["certificate"]["status"] in ("refuted", "inconclusive")


@pytest.mark.parametrize(
    "argv",
    [
        ["check", "spine", "-F", "K3,C4,K4-e", "-n", "6", "--grid", "100"],
        ["check", "ehrhart", "-F", "P3,K3", "--n", "3", "--n2", "5"],
        ["check", "volume-oracles", "--spec", "5,4,3"],
        ["check", "inclusion", "-F", "K2,K3"],
        ["check", "nonneg-facets", "-F", "K3,C4", "-n", "6"],
        ["check", "zonotope", "-F", "K3,C4,K4-e", "-n", "6", "--count", "20"],
        ["check", "tail-cyclic", "--spec", "2,3,4", "--k-max", "7"],
        ["check", "limits", "-F", "K2,K3", "-K", "6"],
    ],
    ids=lambda a: a[1],
)
def test_checks_pass(capsys, argv):
    code, out, _ = run(capsys, *argv)
    doc = json.loads(out)
    assert code == 0, doc["report"]
    assert doc["report"]["status"] == "pass"
    assert doc["manifest"]["command"] == "check"


def test_ehrhart_check_reports_known_polynomials(capsys):
    _, out, _ = run(capsys, "check", "ehrhart", "-F", "P3,K3", "--n", "3", "--n2", "5")
    inst = json.loads(out)["report"]["instances"][0]
    assert inst["left"].endswith("48k^2+13k+1")
    assert inst["right"].endswith("50k^2+15k+1")


def test_spine_volume_csv(capsys):
    code, out, _ = run(capsys, "spine-volume", "--spec", "2,1", "5,4,3", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0
    assert [r["spec"] for r in rows] == ["2,1", "5,4,3"]
    assert [r["closed_form"] for r in rows] == ["1/6", "1/1512"]


def test_zonotope_kernel_and_samples(tmp_path, capsys):
    kfile = tmp_path / "k.json"
    kfile.write_text(json.dumps({"n": 1, "entries": ["1/2"]}))
    code, out, _ = run(capsys, "zonotope", "-F", "K3,C4,K4-e", "--kernel", str(kfile))
    doc = json.loads(out)
    assert code == 0
    assert doc["manifest"]["input_hashes"][str(kfile)]
    assert "1/8" in json.dumps(doc)
    code, out, _ = run(capsys, "zonotope", "-F", "K3,C4,K4-e", "--count", "5", "--format", "csv", "--seed", "3")
    lines = out.strip().splitlines()
    assert code == 0 and len(lines) == 1 + 7


def test_limits_with_config(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"spec": [2, 3], "host_sizes": [5, 6], "K": 6, "samples": 9, "seed": 2}))
    code, out, _ = run(capsys, "limits", "--config", str(cfg), "--chop", "1/10", "1/2")
    doc = json.loads(out)
    assert code == 0
    rep = doc["report"]
    assert [i["host_n"] for i in rep["instances"]] == [5, 6]
    assert len(rep["chop"]["rows"]) == 2
    assert rep["nested_volumes"]["ok"]


@pytest.mark.parametrize("fmt,first", [("off", "OFF"), ("csv", "index,K3,C4,K4-e"), ("graph6", None), ("json", "{")])
def test_export_formats(capsys, fmt, first):
    code, out, _ = run(capsys, "export", "-F", "K3,C4,K4-e", "-n", "5", "--format", fmt)
    assert code == 0
    if first:
        assert out.startswith(first)
    else:
        from subgraph_polytopes.graphs import from_graph6

        assert all(from_graph6(line).n == 5 for line in out.split())


def test_reports_are_byte_identical(capsys):
    argv = ["check", "zonotope", "-F", "K3,C4,K4-e", "-n", "6", "--count", "15", "--seed", "7"]
    outs = [run(capsys, *argv)[1] for _ in range(2)]
    assert outs[0] == outs[1]
    assert "timestamp" not in outs[0]
    _, stamped, _ = run(capsys, "--timestamp", *argv)
    assert "timestamp" in json.loads(stamped)["manifest"]


def test_thread_setting_does_not_change_results(capsys):
    argv = ["export", "-F", "K2,K3", "-n", "6"]
    a = run(capsys, "--threads", "1", *argv)[1]
    b = run(capsys, "--threads", "3", *argv)[1]
    assert a == b


def test_module_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "subgraph_polytopes", "polytope", "-F", "K2", "-n", "2"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert res.returncode == 0 and json.loads(res.stdout)["dim"] == 1
