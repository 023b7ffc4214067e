"""stubshrink command line.

Exit codes: 0 success, 1 test failure or behavior divergence, 2 guard exit,
3 usage, parse, manifest or bundle errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import tempfile

from ..callgraph import MODES, ReachabilitySet, reachability
from ..errors import StubshrinkError
from ..interp.config import GUARD_EXIT_CODE, GUARD_MODES
from ..interp.package import PRELUDE, load_package
from ..interp.testing import run_tests
from ..stubbify.pipeline import stubbify_package
from ..stubbify.plan import StubOptions
from ..stubbify.store import write_expansion_log
from .harness import bench_cell, discover_clients, format_table, materialize_client, run_client
from .report import canonical_bytes, size_report

log = logging.getLogger("stubshrink")

EXIT_OK, EXIT_FAIL, EXIT_GUARD, EXIT_USAGE = 0, 1, GUARD_EXIT_CODE, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _write_json(path: str, data) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, indent=2, sort_keys=True)
        f.write("\n")


def _load(pkgdir: str):
    if not os.path.isdir(pkgdir):
        raise StubshrinkError(f"no such package directory: {pkgdir}")
    return load_package(pkgdir)


def _reachability_arg(pkg, spec: str) -> ReachabilitySet:
    if spec in MODES:
        return reachability(pkg, spec)
    return ReachabilitySet.load(spec)


def cmd_cg(args) -> int:
    pkg = _load(args.pkgdir)
    rs = reachability(pkg, args.mode)
    out = args.out or os.path.join(pkg.root, f"cg.{args.mode}.json")
    _write_json(out, rs.to_json())
    from ..callgraph.model import parse_closure
    from ..lang.walk import functions_of

    total = sum(len(functions_of(m)) for m in parse_closure(pkg).values())
    print(f"{len(rs.reachableFunctions)}/{total} functions reachable")
    print(f"{len(rs.reachableFiles)}/{len(pkg.closure_files())} files reachable")
    print(f"wrote {out}")
    return EXIT_OK


def client_first_fetch(subject_root: str, stubbed_root: str) -> dict:
    """First-fetch bytes of every client run against the stubbified subject."""
    out = {}
    with tempfile.TemporaryDirectory(prefix="stubshrink-clients-") as work:
        for client in discover_clients(subject_root):
            copy = materialize_client(client, subject_root, stubbed_root, work)
            out[os.path.basename(client)] = run_client(copy).first_fetch_bytes()
    return out


def cmd_stubbify(args) -> int:
    pkg = _load(args.pkgdir)
    rs = _reachability_arg(pkg, args.cg)
    sp = stubbify_package(pkg, rs, args.out, StubOptions(guard=args.guard), force=args.force)
    clients = {} if args.no_clients else client_first_fetch(pkg.root, sp.root)
    report = size_report(pkg, load_package(sp.root), clients)
    _write_json(os.path.join(sp.root, "stub.plan.json"), sp.plan.to_json())
    _write_json(os.path.join(sp.root, "size.report.json"), report.to_json())
    plan = sp.plan
    print(
        f"{len(plan.fileStubs)} file stubs, {len(plan.functionStubs)} function stubs "
        f"(skipped: {len(plan.skippedTooSmall)} too small, {len(plan.skippedAnnotated)} annotated, "
        f"{len(plan.skippedUnstubbable)} unstubbable)"
    )
    print(report.summary())
    print(f"wrote {sp.root}")
    return EXIT_OK


def cmd_run(args) -> int:
    pkg = _load(args.pkgdir)
    report = run_tests(pkg)
    for line in report.output:
        print(line)
    for r in report.perTest:
        status = "ok" if r.passed else "FAIL"
        print(f"{status:4} {r.test}")
        for msg in r.assertions:
            print(f"     assertion: {msg}")
        if r.error:
            print(f"     error: {r.error}")
    for ev in report.expansionEvents:
        hit = " (cached)" if ev.cacheHit else ""
        print(f"expanded {ev.kind} {ev.id}: {ev.bytesLoaded} bytes{hit}")
    for ev in report.guardEvents:
        print(f"guard event: {ev.name} in {ev.run}")
    if args.report:
        with open(args.report, "w", encoding="utf-8") as f:
            f.write(report.dumps() + "\n")
        write_expansion_log(report.expansionEvents, os.path.join(os.path.dirname(os.path.abspath(args.report)), "expansions.jsonl"))
    if report.guardExit is not None:
        return EXIT_GUARD
    return EXIT_OK if report.all_passed else EXIT_FAIL


def cmd_bundle(args) -> int:
    from ..bundler import BUNDLE_FILE, bundle, stubbify_bundle, write_bundle_package

    pkg = _load(args.pkgdir)
    b = bundle(pkg)
    plain_dir = os.path.join(args.out, "plain") if args.stubbify else args.out
    write_bundle_package(pkg, b, plain_dir, args.tests_entry, force=args.force)
    plain = canonical_bytes(os.path.join(plain_dir, BUNDLE_FILE), BUNDLE_FILE)
    installed = sum(canonical_bytes(p) for p in pkg.closure_files())
    print(f"installed: {installed} bytes; bundle: {plain} bytes")
    print(f"tree-shaking kept {len(b.shakeReport['kept'])} functions, removed {len(b.shakeReport['removed'])}")
    if args.stubbify:
        rs = _reachability_arg(pkg, args.cg)
        sp = stubbify_bundle(plain_dir, b, rs, os.path.join(args.out, "stubbed"), StubOptions(guard=args.guard), force=args.force)
        stubbed = canonical_bytes(os.path.join(sp.root, BUNDLE_FILE), BUNDLE_FILE)
        prelude = os.path.join(sp.root, PRELUDE)
        runtime = canonical_bytes(prelude, PRELUDE) if os.path.isfile(prelude) else 0
        _write_json(os.path.join(sp.root, "stub.plan.json"), sp.plan.to_json())
        print(
            f"stubbified bundle: {stubbed} bytes plus {runtime} bytes of stub runtime "
            f"({len(sp.plan.functionStubs)} function stubs)"
        )
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_bench(args) -> int:
    corpus = os.path.abspath(args.corpusdir)
    if not os.path.isdir(corpus):
        raise StubshrinkError(f"no such corpus directory: {corpus}")
    cells = []
    with tempfile.TemporaryDirectory(prefix="stubshrink-bench-") as work:
        for name in sorted(os.listdir(corpus)):
            root = os.path.join(corpus, name)
            if not os.path.isfile(os.path.join(root, "minipkg.json")):
                continue
            pkg = load_package(root)
            clients = discover_clients(root)
            for cg in MODES:
                stub_root = os.path.join(work, f"{name}.{cg}")
                stubbify_package(pkg, reachability(pkg, cg), stub_root)
                for client in clients:
                    cdir = os.path.join(work, "clients", f"{name}.{cg}")
                    orig = materialize_client(client, root, root, os.path.join(cdir, "orig"))
                    stub = materialize_client(client, root, stub_root, os.path.join(cdir, "stub"))
                    cells.append(bench_cell(name, os.path.basename(client), cg, orig, stub, args.runs, args.warmup))
    print(format_table(cells))
    if args.json:
        _write_json(args.json, [c.to_json() for c in cells])
    bad = [c for c in cells if not c.sameBehavior]
    for c in bad:
        print(f"behavior differs: {c.package}/{c.client} [{c.cg}]", file=sys.stderr)
    return EXIT_FAIL if bad else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="stubshrink", description="Debloat MiniMod packages with self-expanding stubs.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("cg", help="compute a reachability set from the package tests")
    s.add_argument("pkgdir")
    s.add_argument("--mode", choices=MODES, default="static")
    s.add_argument("--out", help="output path (default: <pkgdir>/cg.<mode>.json)")
    s.set_defaults(func=cmd_cg)

    s = sub.add_parser("stubbify", help="write a stubbified copy of a package")
    s.add_argument("pkgdir")
    s.add_argument("--cg", default="static", help="static, dynamic, or a reachability JSON file")
    s.add_argument("--guard", choices=GUARD_MODES, default="off")
    s.add_argument("--out", required=True)
    s.add_argument("--force", action="store_true", help="replace an existing output directory")
    s.add_argument("--no-clients", action="store_true", help="skip client runs for the expansion ranges")
    s.set_defaults(func=cmd_stubbify)

    s = sub.add_parser("run", help="run a package's tests")
    s.add_argument("pkgdir")
    s.add_argument("--report", help="write the test report JSON here")
    s.set_defaults(func=cmd_run)

    s = sub.add_parser("bundle", help="bundle a package, optionally stubbifying the bundle")
    s.add_argument("pkgdir")
    s.add_argument("--stubbify", action="store_true")
    s.add_argument("--cg", default="static", help="static, dynamic, or a reachability JSON file")
    s.add_argument("--guard", choices=GUARD_MODES, default="off")
    s.add_argument("--out", required=True)
    s.add_argument("--tests-entry", help="specifier the tests use for the entry module; re-pointed at the bundle")
    s.add_argument("--force", action="store_true")
    s.set_defaults(func=cmd_bundle)

    s = sub.add_parser("bench", help="time client test suites against original and stubbified subjects")
    s.add_argument("corpusdir")
    s.add_argument("--runs", type=int, default=10)
    s.add_argument("--warmup", type=int, default=2)
    s.add_argument("--json", help="also write the table as JSON")
    s.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except StubshrinkError as e:
        print(f"stubshrink: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
