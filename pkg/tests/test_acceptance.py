"""End-to-end acceptance checks, one test per criterion.

Each test records a PASS/FAIL line that is printed in the terminal summary
as well as to stdout.
"""

import collections
import os
import shutil
import tempfile

import pytest

from conftest import ACCEPTANCE, CORPUS, CORPUS_PACKAGES
from progen import write_program
from stubshrink.bundler import BUNDLE_FILE, bundle, stubbify_bundle, write_bundle_package
from stubshrink.callgraph import ReachabilitySet, parse_closure, reachability
from stubshrink.cli import main, size_report
from stubshrink.cli.harness import discover_clients, materialize_client, run_client, same_behavior
from stubshrink.cli.main import client_first_fetch
from stubshrink.cli.report import canonical_bytes, package_sizes
from stubshrink.interp import load_package
from stubshrink.interp.testing import run_tests
from stubshrink.lang import ast as A
from stubshrink.lang import functions_of
from stubshrink.stubbify import StubOptions, stubbify_package

MODES = ("static", "dynamic")


def record(n: int, ok: bool, detail: str) -> None:
    ACCEPTANCE[n] = (ok, detail)
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'} ({detail})")


def test_criterion_1_behavior_preservation(stubbed_corpus, tmp_path):
    cells, bad = 0, []
    clients_total = 0
    for name in CORPUS_PACKAGES:
        root = os.path.join(CORPUS, name)
        clients = discover_clients(root)
        clients_total += len(clients)
        for mode in MODES:
            sp = stubbed_corpus(name, mode)
            own_o, own_s = run_tests(load_package(root)), run_tests(load_package(sp.root))
            if not same_behavior(own_o, own_s):
                bad.append(f"{name}[{mode}] own tests")
            for c in clients:
                cname = os.path.basename(c)
                work = tmp_path / f"{name}.{mode}.{cname}"
                o = run_client(materialize_client(c, root, root, str(work / "o")))
                s = run_client(materialize_client(c, root, sp.root, str(work / "s")))
                cells += 1
                if not (o.vector == s.vector and o.sideEffectLog == s.sideEffectLog):
                    bad.append(f"{name}/{cname}[{mode}]")
    ok = not bad and len(CORPUS_PACKAGES) >= 6 and clients_total >= 12
    record(1, ok, f"{len(CORPUS_PACKAGES)} packages, {clients_total} clients, {cells} client cells, mismatches: {bad or 'none'}")
    assert ok


def _top_level_uids(pkg) -> set:
    return {
        it.decl.fn.uid
        for m in parse_closure(pkg).values()
        for it in m.items
        if isinstance(it, A.ExportDecl) and isinstance(it.decl, A.FuncDecl)
    }


def test_criterion_2_closure_correctness():
    n, stubbed, bad = 200, 0, []
    with tempfile.TemporaryDirectory() as work:
        for seed in range(n):
            d = os.path.join(work, str(seed))
            pkg = load_package(write_program(seed, os.path.join(d, "p")))
            orig = run_tests(pkg)
            assert orig.all_passed, orig.perTest
            plans = [
                # every stubbable function, anonymous ones included
                (ReachabilitySet("static"), StubOptions(size_rule=False, stub_everything=True)),
                # only the exported functions stay; every closure they create is a stub
                (ReachabilitySet("static", _top_level_uids(pkg), {"src/main.mm"}), StubOptions(size_rule=False)),
            ]
            for k, (rs, opts) in enumerate(plans):
                sp = stubbify_package(pkg, rs, os.path.join(d, f"s{k}"), opts)
                stubbed += len(sp.plan.functionStubs)
                rep = run_tests(load_package(sp.root))
                if rep.output != orig.output or rep.vector != orig.vector:
                    bad.append((seed, k))
            shutil.rmtree(d)
    ok = not bad
    record(2, ok, f"{n} generated programs x 2 plans, {stubbed} function stubs, mismatches: {bad or 'none'}")
    assert ok


def test_criterion_3_expansion_accounting(stubbed_corpus, tmp_path):
    root = os.path.join(CORPUS, "webshapes")
    pkg = load_package(root)
    sp = stubbed_corpus("webshapes", "static")
    report = size_report(pkg, load_package(sp.root), client_first_fetch(root, sp.root))
    data = report.to_json()
    stubbed_bytes = sum(package_sizes(load_package(sp.root)).values())
    kinds = {fd.uid: fd.kind for m in parse_closure(pkg).values() for fd in functions_of(m)}
    problems = []
    for c in discover_clients(root):
        cname = os.path.basename(c)
        run = run_client(materialize_client(c, root, sp.root, str(tmp_path / cname)))
        fetched = sum(e.bytesLoaded for e in run.expansionEvents if not e.cacheHit)
        if stubbed_bytes + fetched != data["clients"][cname]["expandedBytes"]:
            problems.append(f"{cname}: {stubbed_bytes}+{fetched} != {data['clients'][cname]['expandedBytes']}")
        per_run = collections.Counter(
            (e.run, e.id) for e in run.expansionEvents if e.kind == "function" and kinds.get(e.id) == "named"
        )
        problems += [f"{cname}: {key} fetched {v} times" for key, v in per_run.items() if v > 1]
        if not run.expansionEvents:
            problems.append(f"{cname}: no expansions")
    ok = not problems and data["stubbedBytes"] == stubbed_bytes
    record(3, ok, f"webshapes stubbed {stubbed_bytes} bytes, expanded {data['expandedBytesRange']}, problems: {problems or 'none'}")
    assert ok


def test_criterion_4_calibrated_reductions(stubbed_corpus):
    def rep(name, clients=False):
        root = os.path.join(CORPUS, name)
        sp = stubbed_corpus(name, "static")
        ff = client_first_fetch(root, sp.root) if clients else {}
        return size_report(load_package(root), load_package(sp.root), ff)

    web = rep("webshapes").reductionPct
    glob = rep("tinyglob", clients=True)
    heavy = glob.to_json()["clients"]["heavy"]["expandedBytes"]
    heavy_red = 100.0 * (1 - heavy / glob.originalBytes)
    flag = rep("flagkit").reductionPct
    ok = web >= 30.0 and heavy_red < 0.0 and flag < 10.0
    record(4, ok, f"webshapes {web:.1f}% (>= 30), tinyglob heavy after expansion {heavy_red:.1f}% (< 0), flagkit {flag:.1f}% (< 10)")
    assert ok


def test_criterion_5_guards(tmp_path, capsys):
    root = os.path.join(CORPUS, "deprecator")
    pkg = load_package(root)
    rs = reachability(pkg, "static")
    results = {}
    for mode in ("off", "warn", "exit"):
        sp = stubbify_package(pkg, rs, str(tmp_path / mode), StubOptions(guard=mode))
        events, codes, same = [], [], True
        for c in discover_clients(root):
            copy = materialize_client(c, root, sp.root, str(tmp_path / f"{mode}-{os.path.basename(c)}"))
            r = run_client(copy)
            events += [g.name for g in r.guardEvents]
            codes.append(main(["run", copy]))
            o = run_client(materialize_client(c, root, root, str(tmp_path / f"orig-{mode}-{os.path.basename(c)}")))
            same = same and same_behavior(o, r)
        results[mode] = (events, codes, same)
    capsys.readouterr()
    alias_events = []
    troot = os.path.join(CORPUS, "taskrun")
    tsp = stubbify_package(load_package(troot), reachability(load_package(troot), "static"), str(tmp_path / "alias"), StubOptions(guard="warn"))
    for c in discover_clients(troot):
        r = run_client(materialize_client(c, troot, tsp.root, str(tmp_path / f"alias-{os.path.basename(c)}")))
        alias_events += [g.name for g in r.guardEvents]
    ok = (
        "eval" in results["warn"][0]
        and all(code == 0 for code in results["warn"][1])
        and 2 in results["exit"][1]
        and results["off"][0] == []
        and results["off"][2]
        and "exec" in alias_events
    )
    record(
        5,
        ok,
        f"warn events {sorted(set(results['warn'][0]))}, exit codes {results['exit'][1]}, "
        f"off events {len(results['off'][0])} and same behavior {results['off'][2]}, alias events {sorted(set(alias_events))}",
    )
    assert ok


def test_criterion_6_static_dynamic(stubbed_corpus, tmp_path):
    subset, violations = [], []
    for name in CORPUS_PACKAGES:
        pkg = load_package(os.path.join(CORPUS, name))
        st = reachability(pkg, "static")
        if st.warnings:
            continue
        subset.append(name)
        extra = reachability(pkg, "dynamic").reachableFunctions - st.reachableFunctions
        if extra:
            violations.append((name, sorted(extra)))
    root = os.path.join(CORPUS, "dispatch")
    pkg = load_package(root)
    st = reachability(pkg, "static")
    dy = reachability(pkg, "dynamic")
    hidden = dy.reachableFunctions - st.reachableFunctions
    sp = stubbed_corpus("dispatch", "static")
    run = run_tests(load_package(sp.root))
    expanded = {e.id for e in run.expansionEvents}
    # missed functions that were stubbed (others were too small to bother) must
    # come back through expansion, either as their own stub or with their file
    stubbed = {u for u in hidden if u in sp.plan.functionStubs or u.split(":")[0] in sp.plan.fileStubs}
    recovered = bool(stubbed) and all(u in expanded or u.split(":")[0] in expanded for u in stubbed)
    ok = len(subset) >= 4 and not violations and recovered and run.vector == run_tests(pkg).vector and run.all_passed
    record(6, ok, f"subset {subset}, violations {violations or 'none'}, dispatch statically missed {len(hidden)}, stubbed {sorted(stubbed)}, all expanded: {recovered}")
    assert ok


def test_criterion_7_bundler(tmp_path):
    rows, problems = [], []
    for name in CORPUS_PACKAGES:
        pkg = load_package(os.path.join(CORPUS, name))
        b = bundle(pkg)
        plain = write_bundle_package(pkg, b, str(tmp_path / name / "plain"), "../src/index")
        st = reachability(pkg, "static")
        sp = stubbify_bundle(plain, b, st, str(tmp_path / name / "stubbed"))
        orig = run_tests(pkg)
        for label, root in (("plain", plain), ("stubbed", sp.root)):
            r = run_tests(load_package(root))
            if r.vector != orig.vector or not r.all_passed:
                problems.append(f"{name} {label} tests")
        untested = [u for u in b.shakeReport["kept"] if u not in st.reachableFunctions]
        pb = canonical_bytes(os.path.join(plain, BUNDLE_FILE))
        sb = canonical_bytes(os.path.join(sp.root, BUNDLE_FILE))
        if untested and sp.plan.functionStubs and not sb < pb:
            problems.append(f"{name} stubbed bundle {sb} >= {pb}")
        shaken = set(b.shakeReport["removed"]) & st.reachableFunctions
        if shaken:
            problems.append(f"{name} shook reachable {sorted(shaken)}")
        rows.append(f"{name} {pb}->{sb}")
    ok = not problems
    record(7, ok, f"bundle.mm bytes plain->stubbed: {', '.join(rows)}; problems: {problems or 'none'}")
    assert ok


@pytest.mark.slow
def test_criterion_8_slowdown(tmp_path, capsys):
    import json

    out = tmp_path / "bench.json"
    rc = main(["bench", CORPUS, "--runs", "10", "--warmup", "2", "--json", str(out)])
    table = capsys.readouterr().out
    cells = json.loads(out.read_text())
    worst = max(cells, key=lambda c: c["slowdown"])
    ok = rc == 0 and all(c["slowdown"] < 200 for c in cells) and all(c["stableExpansions"] for c in cells)
    print(table)
    record(8, ok, f"{len(cells)} cells, worst slowdown {worst['slowdown']}% ({worst['package']}/{worst['client']} {worst['cg']})")
    assert ok
