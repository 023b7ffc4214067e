import json
import logging
import os
import subprocess
import sys

import pytest

from conftest import CORPUS, FIXTURES
from stubshrink.cli import SizeReport, main
from stubshrink.cli.harness import BenchCell, expansion_counts, materialize_client, run_client
from stubshrink.interp.testing import run_tests
from stubshrink.interp import load_package

FIVE = {
    "src/main.mm": (
        "export function a(){ return b() + c(); }\n"
        "function b(){ return 1; }\n"
        "function c(){ return 2; }\n"
        "export function d(){ return 3; }\n"
        "export function e(){ return 4; }\n"
    ),
    "test/t.mm": 'import {a} from "../src/main";\nassert(a() == 3, "a");\n',
}


def test_cg_counts(make_pkg, capsys):
    root = make_pkg(FIVE)
    for mode in ("static", "dynamic"):
        assert main(["cg", root, "--mode", mode]) == 0
        out = capsys.readouterr().out
        assert "3/5 functions reachable" in out
        assert "1/1 files reachable" in out
        data = json.loads(open(os.path.join(root, f"cg.{mode}.json")).read())
        assert data["mode"] == mode and len(data["reachableFunctions"]) == 3


def test_cg_dynamic_with_failing_test(make_pkg, capsys, caplog):
    root = make_pkg({**FIVE, "test/t.mm": 'import {a} from "../src/main";\nassert(a() == 4, "a");\n'})
    with caplog.at_level(logging.WARNING, logger="stubshrink"):
        assert main(["cg", root, "--mode", "dynamic"]) == 0
    assert "3/5 functions reachable" in capsys.readouterr().out
    assert any("fail" in r.getMessage().lower() for r in caplog.records)


def test_usage_errors(capsys, tmp_path):
    assert main(["cg", str(tmp_path / "missing")]) == 3
    with pytest.raises(SystemExit) as info:
        main(["cg"])
    assert info.value.code == 3
    with pytest.raises(SystemExit) as info:
        main(["stubbify", str(tmp_path), "--guard", "loud", "--out", "x"])
    assert info.value.code == 3


def test_parse_error_exit(make_pkg, capsys):
    root = make_pkg({"src/main.mm": "let x = ;\n", "test/t.mm": ""})
    assert main(["cg", root]) == 3
    assert "ParseError" in capsys.readouterr().err


def test_run_exit_codes(make_pkg, capsys, tmp_path):
    good = make_pkg(FIVE)
    assert main(["run", good, "--report", str(tmp_path / "r.json")]) == 0
    data = json.loads((tmp_path / "r.json").read_text())
    assert data["expansionEvents"] == [] and data["perTest"][0]["passed"]
    assert (tmp_path / "expansions.jsonl").exists()
    bad = make_pkg({**FIVE, "test/t.mm": 'assert(false, "no");\n'})
    assert main(["run", bad]) == 1
    assert main(["run", os.path.join(FIXTURES, "cyclic")]) == 1


def test_cyclic_bundle_exit(capsys, tmp_path):
    assert main(["bundle", os.path.join(FIXTURES, "cyclic"), "--out", str(tmp_path / "b")]) == 3
    assert "BundleError" in capsys.readouterr().err


def test_stubbify_then_run_reports_expansions(make_pkg, capsys, tmp_path):
    body = "".join(f"  let v{i} = \"filler text that keeps this body larger than any stub\";\n" for i in range(3))
    root = make_pkg(
        {
            "src/main.mm": f"export function a(){{ return 1; }}\nexport function big(){{\n{body}  return 2;\n}}\n",
            "test/t.mm": 'import {a} from "../src/main";\nprint(a());\n',
            "test/u.mm": 'import {big} from "../src/main";\nprint(big());\n',
        },
        manifest={"tests": ["test/t.mm"]},
    )
    out = tmp_path / "s"
    assert main(["stubbify", root, "--out", str(out)]) == 0
    text = capsys.readouterr().out
    assert "1 function stubs" in text and "reduction" in text
    assert main(["stubbify", root, "--out", str(out)]) == 3  # exists
    capsys.readouterr()
    # point the stubbified package's manifest at the extra test as well
    mpath = out / "minipkg.json"
    m = json.loads(mpath.read_text())
    m["tests"] = ["test/t.mm", "test/u.mm"]
    mpath.write_text(json.dumps(m))
    assert main(["run", str(out)]) == 0
    assert "expanded function" in capsys.readouterr().out
    report = json.loads((out / "size.report.json").read_text())
    assert report["stubbedBytes"] == sum(v["stubbed"] for v in report["perFile"].values())
    assert report["originalBytes"] == sum(v["original"] for v in report["perFile"].values())


def test_reduction_arithmetic():
    r = SizeReport(1000, 400)
    assert r.reductionPct == pytest.approx(60.0)
    r = SizeReport(1000, 400, clients={"x": 700, "y": 100})
    assert r.expandedBytesRange == [500, 1100]
    assert r.reductionAfterExpansionRange == [pytest.approx(-10.0), pytest.approx(50.0)]
    assert SizeReport(100, 130).reductionPct == pytest.approx(-30.0)


def test_slowdown_definition():
    cell = BenchCell("p", "c", "static", 0.2, 0.25, 0, 0, 0, True, True)
    assert cell.slowdown == pytest.approx(25.0)
    assert cell.to_json()["slowdown"] == 25
    assert BenchCell("p", "c", "static", 0.3, 0.3049, 0, 0, 0, True, True).to_json()["slowdown"] == 2


def test_guard_exit_via_cli(capsys, tmp_path):
    src = os.path.join(CORPUS, "deprecator")
    out = tmp_path / "s"
    assert main(["stubbify", src, "--guard", "exit", "--out", str(out), "--no-clients"]) == 0
    client = materialize_client(os.path.join(src, "clients", "oldapi"), src, str(out), str(tmp_path / "c"))
    capsys.readouterr()
    assert main(["run", client]) == 2
    assert "guard event: eval" in capsys.readouterr().out


def test_guard_warn_via_cli(capsys, tmp_path):
    src = os.path.join(CORPUS, "deprecator")
    out = tmp_path / "s"
    assert main(["stubbify", src, "--guard", "warn", "--out", str(out), "--no-clients"]) == 0
    client = materialize_client(os.path.join(src, "clients", "oldapi"), src, str(out), str(tmp_path / "c"))
    assert main(["run", client]) == 0
    assert run_client(client).guardEvents


def test_bundle_command(capsys, tmp_path):
    src = os.path.join(CORPUS, "webshapes")
    out = tmp_path / "b"
    assert main(["bundle", src, "--stubbify", "--out", str(out), "--tests-entry", "../src/index"]) == 0
    text = capsys.readouterr().out
    installed = int(text.split("installed: ")[1].split(" ")[0])
    plain = int(text.split("bundle: ")[1].split(" ")[0])
    stubbed = int(text.split("stubbified bundle: ")[1].split(" ")[0])
    assert plain < installed
    assert stubbed < plain
    assert run_tests(load_package(str(out / "stubbed"))).all_passed


def test_bench_single_package(tmp_path, capsys):
    corpus = tmp_path / "corpus"
    corpus.mkdir()
    os.symlink(os.path.join(CORPUS, "flagkit"), corpus / "flagkit")
    jpath = tmp_path / "bench.json"
    assert main(["bench", str(corpus), "--runs", "2", "--warmup", "1", "--json", str(jpath)]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0].startswith("Proj")
    cells = json.loads(jpath.read_text())
    assert len(cells) == 4  # 2 clients x 2 modes
    assert all(c["sameBehavior"] and c["stableExpansions"] for c in cells)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "stubshrink", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    for cmd in ("cg", "stubbify", "run", "bundle", "bench"):
        assert cmd in proc.stdout
