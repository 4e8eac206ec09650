import json
import re
import subprocess
import sys

import pytest

from uitrace.cli import main
from uitrace.trace import dumps_trace

from conftest import cli_pipeline, trace_of


def json_files(root):
    return {p.relative_to(root).as_posix(): p.read_bytes() for p in sorted(root.rglob("*.json"))}


@pytest.fixture(scope="module")
def logout_loop(tmp_path_factory):
    w = tmp_path_factory.mktemp("loop")
    return w, cli_pipeline(w, "logout", 0)


def test_end_to_end_loop(logout_loop):
    w, out = logout_loop
    assert all(code == 0 for code, _, _ in out.values()), out
    [report] = (w / "reports").glob("*.report.json")
    rep = json.loads(report.read_text())
    assert rep["schema"] == "uitrace-report/1"
    # the login loop after logout also scores as a tarpit over the same window;
    # equal spans rank the partition first
    first = rep["regions"][0]
    assert (first["kind"], first["rank"]) == ("partition", 1)
    assert all(r["kind"] == "tarpit" for r in rep["regions"][1:])
    assert [f["kind"] for f in rep["fixes"]] == ["disable_element"]
    assert rep["params"]["t_min_ms"] == 600_000 and rep["params"]["d_max"] == 3
    assert rep["summary"]["region_count"] == len(rep["regions"])
    assert rep["issues"] and all(i["covered"] for i in rep["issues"])

    analyze_out = out["analyze"][1]
    assert re.search(r"^REGION \S+ rank=1 kind=partition", analyze_out, re.M)
    assert re.search(r"^FIX \S+ disable_element", analyze_out, re.M)
    assert re.search(r"^ISSUE \S+ app_logout .* covered=true", analyze_out, re.M)
    assert out["rank"][1].startswith("RANK sim-explorer notes-app 1 ")
    assert out["emit-fixes"][2].strip() == "FIXES 1"

    m = re.search(r"^COVERAGE (\d+) baseline=(\d+) delta=(-?\d+)$", out["simulate-fixed"][1], re.M)
    assert m and int(m.group(3)) == int(m.group(1)) - int(m.group(2)) > 0
    assert "warning" not in out["simulate-fixed"][2]


def test_loop_is_deterministic(logout_loop, tmp_path):
    w, first = logout_loop
    second = cli_pipeline(tmp_path, "logout", 0)
    assert json_files(w) == json_files(tmp_path)
    strip = lambda s: s.replace(str(w), "").replace(str(tmp_path), "")  # noqa: E731
    for step in first:
        assert strip(first[step][1]) == strip(second[step][1])


def test_benign_report_has_no_regions(tmp_path):
    out = cli_pipeline(tmp_path, "benign", 1)
    assert out["analyze"][0] == 0
    rep = json.loads(next((tmp_path / "reports").glob("*.json")).read_text())
    assert rep["regions"] == [] and rep["fixes"] == []
    assert "REGION" not in out["analyze"][1]
    assert json.loads((tmp_path / "fixes.json").read_text()) == {"directives": []}


def test_foreign_fixes_warn_and_do_nothing(logout_loop, tmp_path, capsys):
    w, _ = logout_loop
    assert main(["make-model", "--scenario", "tarpit", "--seed", "0", "--out", str(tmp_path / "m.json"),
                 "--scenario-out", str(tmp_path / "s.json")]) == 0
    base = ["simulate", "--model", str(tmp_path / "m.json"), "--scenario", str(tmp_path / "s.json")]
    assert main(base + ["--out", str(tmp_path / "plain.json")]) == 0
    capsys.readouterr()
    assert main(base + ["--fixes", str(w / "fixes.json"), "--out", str(tmp_path / "fixed.json")]) == 0
    out, err = capsys.readouterr()
    assert "warning: 1 of 1 fix directives" in err
    assert "delta=0" in out
    assert (tmp_path / "plain.json").read_bytes() == (tmp_path / "fixed.json").read_bytes()


def test_missing_file_exits_two(tmp_path, capsys):
    assert main(["analyze", str(tmp_path / "nope.json"), "--out-dir", str(tmp_path)]) == 2
    assert "error:" in capsys.readouterr().err


def test_malformed_trace_exits_two(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text('{"tool": "x"}')
    assert main(["analyze", str(p), "--out-dir", str(tmp_path)]) == 2


@pytest.mark.parametrize("content", ["{", json.dumps({"schema": "other"}),
                                     json.dumps({"schema": "uitrace-report/1", "regions": [{}],
                                                 "tool": "a", "app": "b"})])
def test_malformed_report_exits_two(tmp_path, content, capsys):
    p = tmp_path / "r.json"
    p.write_text(content)
    assert main(["rank", str(p)]) == 2
    assert main(["emit-fixes", str(p)]) == 2


def test_bad_model_exits_two(tmp_path, capsys):
    m, s = tmp_path / "m.json", tmp_path / "s.json"
    m.write_text(json.dumps({"app": "x", "start_screen": "a", "screens": {}, "edges": []}))
    s.write_text(json.dumps({"name": "benign"}))
    assert main(["simulate", "--model", str(m), "--scenario", str(s), "--out", str(tmp_path / "t.json")]) == 2


def test_emit_fixes_to_stdout(logout_loop, capsys):
    w, _ = logout_loop
    reports = [str(p) for p in (w / "reports").glob("*.json")]
    assert main(["emit-fixes", *reports]) == 0
    out, err = capsys.readouterr()
    assert json.loads(out)["directives"][0]["kind"] == "disable_element"
    assert err.strip() == "FIXES 1"


def test_rank_pools_reports(tmp_path, capsys):
    # two traces from the same tool/app, each with one long single-screen stretch
    traces = []
    for k, minutes in enumerate((20, 12)):
        tags = list(range(100, 160)) + [0] * (minutes * 60) + list(range(200, 260))
        t = trace_of(tags, trace_id=f"run{k}", tool="monkey", app="demo")
        p = tmp_path / f"run{k}.json"
        p.write_text(dumps_trace(t))
        traces.append(str(p))
    assert main(["analyze", *traces, "--out-dir", str(tmp_path / "r")]) == 0
    capsys.readouterr()
    reports = sorted(str(p) for p in (tmp_path / "r").glob("*.json"))
    assert main(["rank", *reports]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert [ln.split()[3:5] for ln in lines] == [["1", "run0"], ["2", "run1"]]


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "uitrace", "rank", str(tmp_path / "x.json")],
                         capture_output=True, text=True)
    assert res.returncode == 2 and "error:" in res.stderr
