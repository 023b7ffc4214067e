import json
import os

import pytest

from stubshrink.callgraph import ReachabilitySet, parse_closure, reachability
from stubshrink.errors import OutputExists, RevisionMismatch, UnstubbableError
from stubshrink.interp import load_package
from stubshrink.interp.testing import run_tests
from stubshrink.lang import functions_of, parse, print_module
from stubshrink.stubbify import (
    CodeStore,
    StubOptions,
    apply_guards,
    emit_file_stub,
    plan_stubs,
    read_expansion_log,
    stub_body_text,
    stubbify_package,
    write_expansion_log,
)
from stubshrink.stubbify.pipeline import transform_sources

BIG = (
    "  let t = 0;\n"
    "  let i = 0;\n"
    "  let label = \"accumulating a few values so the body is worth stubbing\";\n"
    "  while (i < 3) {\n"
    "    t = t + i * 2;\n"
    "    i = i + 1;\n"
    "  }\n"
    "  let note = [label, \"padding that only makes the function longer than its stub\"];\n"
)


def stub(root, out, mode="static", **opts):
    pkg = load_package(root)
    return stubbify_package(pkg, reachability(pkg, mode), str(out), StubOptions(**opts))


def fns(root, rel="src/main.mm"):
    return {fd.name or fd.uid: fd for fd in functions_of(parse_closure(load_package(root))[rel])}


def test_plan_function_stub(make_pkg):
    root = make_pkg(
        {
            "src/main.mm": f"export function f(){{\n{BIG}  return t;\n}}\nexport function g(){{\n{BIG}  return t;\n}}\n",
            "test/t.mm": 'import {f} from "../src/main";\nprint(f());\n',
        }
    )
    pkg = load_package(root)
    plan = plan_stubs(pkg, reachability(pkg, "static"))
    assert plan.functionStubs == [fns(root)["g"].uid]
    assert plan.fileStubs == []


def test_plan_file_stub(make_pkg):
    root = make_pkg(
        {
            "src/main.mm": 'exports.f = function(){ return 1; };\nexports.lazy = function(){ let u = require("./util"); return u.big(); };\n',
            "src/util.mm": f"exports.big = function(){{\n{BIG}  return t;\n}};\n",
            "test/t.mm": 'let m = require("../src/main");\nprint(m.f());\n',
        }
    )
    pkg = load_package(root)
    plan = plan_stubs(pkg, reachability(pkg, "dynamic"))
    assert plan.fileStubs == ["src/util.mm"]
    assert not set(plan.functionStubs) & {fd.uid for fd in fns(root, "src/util.mm").values()}


def test_too_small_function_skipped(make_pkg):
    root = make_pkg(
        {
            "src/main.mm": "export function f(){ return 1; }\nfunction id(a){return a;}\n",
            "test/t.mm": 'import {f} from "../src/main";\nprint(f());\n',
        }
    )
    pkg = load_package(root)
    plan = plan_stubs(pkg, reachability(pkg, "static"))
    uid = fns(root)["id"].uid
    assert uid in plan.skippedTooSmall and uid not in plan.functionStubs


def test_annotated_and_constructor_skipped(make_pkg):
    root = make_pkg(
        {
            "src/main.mm": (
                f"export function f(){{ return 1; }}\n// @stub:ignore\nfunction keep(){{\n{BIG}  return t;\n}}\n"
                f"class K {{\n  constructor(){{\n{BIG}    this.t = t;\n  }}\n}}\n"
            ),
            "test/t.mm": 'import {f} from "../src/main";\nprint(f());\n',
        }
    )
    pkg = load_package(root)
    plan = plan_stubs(pkg, reachability(pkg, "static"))
    by = fns(root)
    assert by["keep"].uid in plan.skippedAnnotated
    assert by["constructor"].uid in plan.skippedUnstubbable
    assert plan.functionStubs == []


def test_named_stub_structure():
    fd = functions_of(parse("function getValidHeaders(h){ return h; }", "a.mm"))[0]
    lines = stub_body_text(fd).splitlines()
    assert lines[0] == 'let toExec = eval(stubs.getCode("a.mm:1:0"));'
    assert lines[2] == "getValidHeaders = toExec;"
    assert lines[3] == "return toExec.apply(this, arguments);"


def test_anonymous_stub_consults_cache_first():
    fd = functions_of(parse("let cb = function(x){ return x; };", "a.mm"))[0]
    text = stub_body_text(fd)
    assert text.index("stubs.getStub") < text.index("stubs.getCode")
    assert "stubs.setStub" in text


def test_method_and_accessor_stubs():
    m = parse("class C { m(){ return 1; } get p(){ return 2; } set p(v){} }", "a.mm")
    meth, get, set_ = functions_of(m)
    assert "this.m = toExec;" in stub_body_text(meth)
    assert 'this.__lookupGetter__("p")' in stub_body_text(get)
    assert 'this.__defineGetter__("p", toExec);' in stub_body_text(get)
    assert 'this.__defineSetter__("p", toExec);' in stub_body_text(set_)


def test_computed_method_key():
    fd = functions_of(parse('let o = {"two words": function(){ return 1; }};', "a.mm"))[0]
    assert 'this["two words"] = toExec;' in stub_body_text(fd)


def test_constructor_unstubbable():
    fd = functions_of(parse("class C { constructor(){} }", "a.mm"))[0]
    with pytest.raises(UnstubbableError):
        stub_body_text(fd)


def test_esm_file_stub_shape():
    m = parse('export function foo(){}\nimport { A } from "./a";\nfunction bar(){}\nexport default bar;\n', "x.mm")
    stub_text, stored = emit_file_stub(m)
    lines = stub_text.splitlines()
    assert lines[0].startswith("import") and '"./a"' in lines[0]
    assert 'stubs.getCodeForFile("x.mm")' in lines[1]
    assert any("as foo" in l for l in lines)
    assert lines[-1] == 'export default exportObj["default"];'
    assert "import" not in stored and "export" not in stored
    last = parse(stored, "<eval>").items[-1]
    assert last.expr.__class__.__name__ == "ObjectLit"


def test_cjs_file_stub_shape():
    stub_text, stored = emit_file_stub(parse("exports.a = 1;\n", "x.mm"))
    assert stub_text == 'eval(stubs.getCodeForFile("x.mm"));\n'
    assert stored == "exports.a = 1;\n"


def _lazy_pkg(make_pkg, util: str):
    return make_pkg(
        {
            "src/main.mm": 'exports.f = function(){ return 1; };\nexports.load = function(){ return require("./util"); };\n',
            "src/util.mm": util,
            "test/t.mm": 'let m = require("../src/main");\nprint(m.f());\n',
            "test/u.mm": 'let u = require("../src/main").load();\nprint(u.a, u.big());\n',
        }
    )


def test_file_stub_exports_after_expansion(make_pkg, tmp_path):
    root = _lazy_pkg(make_pkg, f"exports.a = 1;\nexports.big = function(){{\n{BIG}  return t;\n}};\n")
    pkg = load_package(root)
    rs = reachability(pkg, "dynamic", pkg.test_paths[:1])
    sp = stubbify_package(pkg, rs, tmp_path / "o")
    assert sp.plan.fileStubs == ["src/util.mm"]
    out = run_tests(load_package(sp.root))
    assert out.output == run_tests(pkg).output == ["1", "1 6"]
    assert [(e.kind, e.id) for e in out.expansionEvents] == [("file", "src/util.mm")]


def test_esm_importer_sees_same_exports(make_pkg, tmp_path):
    root = make_pkg(
        {
            "src/main.mm": 'import {big, K} from "./util";\nexport function f(){ return 1; }\nexport function g(){ return big() + K; }\n',
            "src/util.mm": f"export let K = 5;\nexport function big(){{\n{BIG}  return t;\n}}\n".replace("export let K = 5;", "let K = 5;\nexport { K };"),
            "test/t.mm": 'import {f, g} from "../src/main";\nprint(f());\nprint(g());\n',
        }
    )
    pkg = load_package(root)
    rs = ReachabilitySet("static", {fns(root)["f"].uid, fns(root)["g"].uid}, {"src/main.mm"}, [])
    sp = stubbify_package(pkg, rs, tmp_path / "o")
    assert sp.plan.fileStubs == ["src/util.mm"]
    assert run_tests(load_package(sp.root)).output == run_tests(pkg).output == ["1", "11"]


def test_named_stub_fetches_once(make_pkg, tmp_path):
    root = make_pkg(
        {
            "src/main.mm": f"export function f(){{ return 1; }}\nexport function g(){{\n{BIG}  return t;\n}}\n",
            "test/t.mm": 'import {f, g} from "../src/main";\nprint(f());\n',
            "test/u.mm": 'import {g} from "../src/main";\nprint(g());\nprint(g());\n',
        }
    )
    pkg = load_package(root)
    sp = stubbify_package(pkg, reachability(pkg, "static", [pkg.test_paths[0]]), tmp_path / "o")
    report = run_tests(load_package(sp.root))
    assert report.output == ["1", "6", "6"]
    ev = report.expansionEvents
    assert len(ev) == 1 and not ev[0].cacheHit
    assert ev[0].bytesLoaded == sp.store.entry_bytes(fns(root)["g"].uid)


def test_anonymous_closure_correctness(make_pkg, tmp_path):
    root = make_pkg(
        {
            "src/main.mm": (
                "export function mk(a){\n  return function(x){\n"
                f"{BIG}    return x + a * 100 + t;\n  }};\n}}\n"
            ).replace("}};", "};").replace("}}\n", "}\n"),
            "test/t.mm": 'import {mk} from "../src/main";\nlet p = mk(1);\nlet q = mk(2);\nprint(p(1), q(1), p(2));\n',
        }
    )
    pkg = load_package(root)
    anon = [fd for fd in fns(root).values() if fd.kind == "anonymous"][0]
    rs = ReachabilitySet("static", {fns(root)["mk"].uid}, {"src/main.mm"}, [])
    sp = stubbify_package(pkg, rs, tmp_path / "o")
    assert sp.plan.functionStubs == [anon.uid]
    report = run_tests(load_package(sp.root))
    assert report.output == run_tests(pkg).output == ["107 207 108"]
    # later calls re-evaluate the cached code without touching the store
    assert [(e.id, e.cacheHit) for e in report.expansionEvents] == [(anon.uid, False)]


def test_property_copying(make_pkg, tmp_path):
    root = make_pkg(
        {
            "src/main.mm": f"export function f(){{ return 1; }}\nexport function g(){{\n{BIG}  return t;\n}}\n",
            "test/t.mm": 'import {f, g} from "../src/main";\ng.tag = 7;\ng.other = "x";\nlet r = g();\nprint(g.tag, g.other, keys(g));\n',
        }
    )
    pkg = load_package(root)
    rs = ReachabilitySet("static", {fns(root)["f"].uid}, {"src/main.mm"}, [])
    sp = stubbify_package(pkg, rs, tmp_path / "o")
    assert sp.plan.functionStubs == [fns(root)["g"].uid]
    assert run_tests(load_package(sp.root)).output == run_tests(pkg).output


def test_method_stub_rebinds_instance(make_pkg, tmp_path):
    root = make_pkg(
        {
            "src/main.mm": f"export class C {{\n  constructor(){{ this.v = 2; }}\n  used(){{ return 1; }}\n  heavy(){{\n{BIG}    return t + this.v;\n  }}\n}}\n",
            "test/t.mm": 'import {C} from "../src/main";\nlet c = new C();\nprint(c.used());\nprint(c.heavy(), c.heavy());\n',
        }
    )
    pkg = load_package(root)
    by = fns(root)
    rs = ReachabilitySet("static", {by["constructor"].uid, by["used"].uid}, {"src/main.mm"}, [])
    sp = stubbify_package(pkg, rs, tmp_path / "o")
    assert sp.plan.functionStubs == [by["heavy"].uid]
    report = run_tests(load_package(sp.root))
    assert report.output == ["1", "8 8"]
    assert len(report.expansionEvents) == 1


def test_guards_fire_on_exec_and_alias():
    assert "__guardCheck(exec)" in apply_guards('exec("rm");\n')
    guarded = apply_guards('let e = exec;\nlet f = e;\nf("x");\nprint("hi");\nlet o = {};\no.k(1);\n')
    assert "__guardCheck(f)" in guarded
    assert "__guardCheck(print)" in guarded
    assert '__guardCall(o, "k", [1])' in guarded


def _guard_pkg(make_pkg):
    return make_pkg(
        {
            "src/main.mm": (
                "export function f(){ return 1; }\n"
                f'export function g(){{\n{BIG}  let e = exec;\n  let h = e;\n  print("hi");\n  return h("x");\n}}\n'
            ),
            "test/t.mm": 'import {f, g} from "../src/main";\nprint(f());\nprint(g());\nprint("end");\n',
        }
    )


@pytest.mark.parametrize("mode,events,rc_exit", [("off", 0, False), ("warn", 1, False), ("exit", 1, True)])
def test_guard_modes(make_pkg, tmp_path, mode, events, rc_exit):
    root = _guard_pkg(make_pkg)
    pkg = load_package(root)
    rs = ReachabilitySet("static", {fns(root)["f"].uid}, {"src/main.mm"}, [])
    sp = stubbify_package(pkg, rs, tmp_path / "o", StubOptions(guard=mode))
    report = run_tests(load_package(sp.root))
    assert len(report.guardEvents) == events
    assert (report.guardExit is not None) == rc_exit
    if mode != "exit":
        assert report.output == run_tests(pkg).output == ["1", "hi", "exec:x", "end"]
        assert report.sideEffectLog == ["exec:x"]
    else:
        assert "end" not in report.output
    assert sp.store.guarded == (mode != "off")


def test_size_rule_safety(make_pkg, tmp_path):
    from conftest import CORPUS

    pkg = load_package(os.path.join(CORPUS, "webshapes"))
    mods = parse_closure(pkg)
    plan = plan_stubs(pkg, reachability(pkg, "static"))
    texts, _ = transform_sources(mods, plan, "off")
    for rel, text in texts.items():
        assert len(text.encode()) < len(print_module(mods[rel]).encode())


def test_output_exists(make_pkg, tmp_path):
    root = _guard_pkg(make_pkg)
    out = tmp_path / "o"
    out.mkdir()
    with pytest.raises(OutputExists):
        stub(root, out)
    pkg = load_package(root)
    stubbify_package(pkg, reachability(pkg, "static"), str(out), force=True)
    assert (out / "minipkg.json").exists()
    assert json.loads((out / "minipkg.json").read_text())["stubbed"] == {"cg": "static", "guard": "off"}


def test_revision_mismatch(make_pkg, tmp_path):
    root = _guard_pkg(make_pkg)
    pkg = load_package(root)
    rs = ReachabilitySet("static", {"src/main.mm:99:0"}, {"src/main.mm"}, [])
    with pytest.raises(RevisionMismatch):
        plan_stubs(pkg, rs)
    assert not (tmp_path / "o").exists()


def test_store_and_log_files(make_pkg, tmp_path):
    root = _guard_pkg(make_pkg)
    pkg = load_package(root)
    rs = ReachabilitySet("static", {fns(root)["f"].uid}, {"src/main.mm"}, [])
    sp = stubbify_package(pkg, rs, tmp_path / "o")
    data = json.loads((tmp_path / "o" / "stubs.store.json").read_text())
    assert set(data) == {"entries", "guarded"}
    assert list(data["entries"]) == sorted(data["entries"])
    assert CodeStore.load(str(tmp_path / "o" / "stubs.store.json")) == sp.store
    report = run_tests(load_package(sp.root))
    log = tmp_path / "expansions.jsonl"
    write_expansion_log(report.expansionEvents, str(log))
    rows = read_expansion_log(str(log))
    assert [r["seq"] for r in rows] == list(range(len(rows)))
    assert {"kind", "id", "bytesLoaded", "cacheHit"} <= set(rows[0])


def test_tests_copied_unmodified(make_pkg, tmp_path):
    root = _guard_pkg(make_pkg)
    sp = stub(root, tmp_path / "o")
    with open(os.path.join(root, "test/t.mm")) as a, open(os.path.join(sp.root, "test/t.mm")) as b:
        assert a.read() == b.read()
