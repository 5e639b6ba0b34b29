import json
from pathlib import Path

import pytest

from zcolor.cli import main
from zcolor.coloring import dump_coloring, is_simple, nontrivial_coloring, parse_coloring
from zcolor.diagram import dump_diagram, parse_diagram
from zcolor.generators import pretzel

from conftest import disjoint_union


@pytest.fixture
def p33(tmp_path):
    f = tmp_path / "p33.json"
    assert main(["gen", "pretzel", "3", "-3", "--scramble", "0", "--coloring-out",
                 str(tmp_path / "p33.col.json"), "-o", str(f)]) == 0
    return f, tmp_path / "p33.col.json"


def test_check_trefoil_negative(tmp_path, capsys):
    f = tmp_path / "t.json"
    main(["gen", "pretzel", "1", "1", "1", "-o", str(f)])
    capsys.readouterr()
    assert main(["check", str(f)]) == 1
    assert "not Z-colorable" in capsys.readouterr().out


def test_check_json(tmp_path, capsys):
    f = tmp_path / "p.json"
    main(["gen", "pretzel", "2", "-2", "-o", str(f)])
    capsys.readouterr()
    assert main(["--json", "check", str(f)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["colorable"] and out["nullity"] == 2 and out["exit_code"] == 0


def test_check_many_files_keeps_order(tmp_path, capsys):
    names = []
    for tw in (["1", "1", "1"], ["2", "-2"], ["3", "-3"]):
        f = tmp_path / ("p" + "_".join(tw) + ".json")
        main(["gen", "pretzel", *tw, "-o", str(f)])
        names.append(str(f))
    capsys.readouterr()
    assert main(["--json", "--jobs", "2", "check", *names]) == 1
    res = json.loads(capsys.readouterr().out)["results"]
    assert [r["file"] for r in res] == names
    assert [r["colorable"] for r in res] == [False, True, True]


def test_parse_error_exit(tmp_path):
    f = tmp_path / "bad.json"
    f.write_text("{ not json")
    assert main(["check", str(f)]) == 2
    assert main(["check", str(tmp_path / "missing.json")]) == 2
    assert main(["frobnicate"]) == 2


def test_color_command(tmp_path, capsys):
    f = tmp_path / "p.json"
    main(["gen", "pretzel", "2", "-2", "-o", str(f)])
    out = tmp_path / "c.json"
    assert main(["color", str(f), "-o", str(out)]) == 0
    d = parse_diagram(f.read_text())
    assert parse_coloring(out.read_text()) == nontrivial_coloring(d)
    capsys.readouterr()
    assert main(["--json", "color", str(f), "--all-basis"]) == 0
    assert len(json.loads(capsys.readouterr().out)["basis"]) == 2


def test_color_not_colorable(tmp_path):
    f = tmp_path / "t.json"
    main(["gen", "pretzel", "1", "1", "1", "-o", str(f)])
    assert main(["color", str(f)]) == 3


def test_reduce_pipeline(p33, tmp_path):
    f, col = p33
    out = tmp_path / "out"
    assert main(["reduce", str(f), "--coloring", str(col), "--out-dir", str(out)]) == 0
    names = sorted(p.name for p in out.iterdir())
    assert names == ["p33.report.diffs.png", "p33.report.diffs.tsv", "p33.report.json",
                     "p33.report.measure.png", "p33.simple.coloring.json", "p33.simple.json", "p33.trace.json"]
    d2 = parse_diagram((out / "p33.simple.json").read_text())
    g2 = parse_coloring((out / "p33.simple.coloring.json").read_text())
    assert is_simple(d2, g2)
    report = json.loads((out / "p33.report.json").read_text())
    assert report["input_profile"]["gcd_nonzero"] == report["output_profile"]["gcd_nonzero"]
    tsv = (out / "p33.report.diffs.tsv").read_text().splitlines()
    assert tsv[0] == "phase\tcrossing\tdiff"
    assert main(["verify-trace", str(f), str(out / "p33.trace.json"), str(out / "p33.simple.json")]) == 0


def test_reduce_explicit_paths(p33, tmp_path):
    f, col = p33
    args = ["reduce", str(f), "--coloring", str(col), "--no-figures",
            "--out", str(tmp_path / "a.json"), "--out-coloring", str(tmp_path / "a.col.json"),
            "--trace", str(tmp_path / "a.trace.json"), "--report", str(tmp_path / "a.report.json")]
    assert main(args) == 0
    for name in ("a.json", "a.col.json", "a.trace.json", "a.report.json", "a.report.diffs.tsv"):
        assert (tmp_path / name).exists()
    assert not (tmp_path / "a.report.diffs.png").exists()


def test_reduce_default_coloring(tmp_path):
    f = tmp_path / "p.json"
    main(["gen", "pretzel", "4", "-4", "-o", str(f)])
    assert main(["reduce", str(f), "--out-dir", str(tmp_path), "--no-figures"]) == 0


def test_tampered_trace_exit_6(p33, tmp_path, capsys):
    f, col = p33
    out = tmp_path / "out"
    main(["reduce", str(f), "--coloring", str(col), "--out-dir", str(out), "--no-figures"])
    doc = json.loads((out / "p33.trace.json").read_text())
    rec = next(r for r in doc["moves"] if r["colors"])
    arc = next(iter(rec["colors"]))
    rec["colors"][arc] += 1
    bad = tmp_path / "bad.trace.json"
    bad.write_text(json.dumps(doc))
    capsys.readouterr()
    assert main(["verify-trace", str(f), str(bad), str(out / "p33.simple.json")]) == 6
    assert "FAILED at step" in capsys.readouterr().err


def test_precondition_exit_3(tmp_path):
    f = tmp_path / "p.json"
    main(["gen", "pretzel", "3", "-3", "-o", str(f)])
    d = parse_diagram(f.read_text())
    c = tmp_path / "const.json"
    c.write_text(dump_coloring({a: 2 for a in d.arcs}))
    assert main(["reduce", str(f), "--coloring", str(c), "--out-dir", str(tmp_path)]) == 3
    bad = dict(nontrivial_coloring(d))
    bad[0] += 1
    c.write_text(dump_coloring(bad))
    assert main(["reduce", str(f), "--coloring", str(c), "--out-dir", str(tmp_path)]) == 3


def test_budget_exit_4(p33, tmp_path, monkeypatch):
    f, col = p33
    assert main(["reduce", str(f), "--coloring", str(col), "--budget", "2", "--out-dir", str(tmp_path)]) == 4
    monkeypatch.setenv("ZCOLOR_BUDGET", "2")
    assert main(["reduce", str(f), "--coloring", str(col), "--out-dir", str(tmp_path)]) == 4
    monkeypatch.setenv("ZCOLOR_BUDGET", "lots")
    assert main(["reduce", str(f), "--coloring", str(col), "--out-dir", str(tmp_path)]) == 2


def test_stuck_exit_5(tmp_path):
    p = pretzel([2, -2])
    u = disjoint_union(p, p)
    g1 = nontrivial_coloring(p)
    ne = p.fresh_ids()[2]
    g = {}
    for e, a in p.edge_arc.items():
        g[u.edge_arc[e]] = g1[a]
        g[u.edge_arc[e + ne]] = 2 * g1[a]
    (tmp_path / "u.json").write_text(dump_diagram(u))
    (tmp_path / "u.col.json").write_text(dump_coloring(g))
    assert main(["reduce", str(tmp_path / "u.json"), "--coloring", str(tmp_path / "u.col.json"),
                 "--out-dir", str(tmp_path)]) == 5


def test_mincol_upper(tmp_path, capsys):
    f = tmp_path / "z.json"
    main(["gen", "pretzel", "-2", "4", "4", "--scramble", "1", "--pushes", "6",
          "--coloring-out", str(tmp_path / "z.col.json"), "-o", str(f)])
    capsys.readouterr()
    assert main(["--json", "mincol-upper", str(f), "--coloring", str(tmp_path / "z.col.json")]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["simple_palette"] >= 4
    assert out["four_color_search"] == "exhausted" or out["four_color_search"] == 4


def test_gen_families(tmp_path, capsys):
    assert main(["gen", "twist", "0,1:2", "0,1:-2", "-o", str(tmp_path / "t.json")]) == 0
    assert main(["gen", "braid", "--strands", "3", "--word", "1", "-2", "1", "-o", str(tmp_path / "b.json")]) == 0
    assert main(["gen", "braid", "--strands", "3", "--seed", "1", "--length", "5", "-o", str(tmp_path / "r.json")]) == 0
    assert main(["gen", "twist", "0-1:2"]) == 2
    assert main(["gen", "pretzel", "2", "0"]) == 3
    assert main(["gen", "pretzel", "1", "1", "1", "--scramble", "3", "--coloring-out", str(tmp_path / "x")]) == 3
    capsys.readouterr()
    assert main(["gen", "pretzel", "2", "-2"]) == 0
    assert json.loads(capsys.readouterr().out)["free_loops"] == 0


def test_outputs_byte_identical(p33, tmp_path):
    f, col = p33
    for run in ("one", "two"):
        assert main(["reduce", str(f), "--coloring", str(col), "--out-dir", str(tmp_path / run)]) == 0
    for p in sorted((tmp_path / "one").iterdir()):
        assert p.read_bytes() == (tmp_path / "two" / p.name).read_bytes(), p.name
