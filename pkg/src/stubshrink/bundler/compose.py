"""Bundle output as a runnable package, and stubbification of a bundle."""

from __future__ import annotations

import json
import os
import shutil
from typing import Optional

from ..callgraph.model import ReachabilitySet
from ..errors import MapGap, OutputExists
from ..interp.package import MANIFEST, PackageHandle, forget_stub_roots, load_package, posix_rel
from ..lang import ast as A
from ..lang.parser import parse
from ..lang.printer import print_module
from ..lang.walk import functions_of, walk
from ..stubbify.pipeline import StubbedPackage, stubbify_package
from ..stubbify.plan import StubOptions
from .bundle import BUNDLE_FILE, Bundle


def _spec_to(target_abs: str, from_file: str) -> str:
    rel = posix_rel(os.path.splitext(target_abs)[0], os.path.dirname(from_file))
    return rel if rel.startswith("../") else "./" + rel


def repoint_test(text: str, path: str, old_spec: str, new_spec: str) -> Optional[str]:
    """Rewrite ``old_spec`` imports/requires in a test; None when nothing matched."""
    m = parse(text, path)
    hit = False
    for n in walk(m):
        if isinstance(n, A.Import) and n.source == old_spec:
            n.source = new_spec
            hit = True
        elif (
            isinstance(n, A.Call)
            and isinstance(n.callee, A.Ident)
            and n.callee.name == "require"
            and len(n.args) == 1
            and isinstance(n.args[0], A.Str)
            and n.args[0].value == old_spec
        ):
            n.args[0] = A.Str(new_spec)
            hit = True
    return print_module(m) if hit else None


def write_bundle_package(
    pkg: PackageHandle, b: Bundle, out_dir: str, tests_entry: Optional[str] = None, force: bool = False
) -> str:
    """Lay the bundle out as a package whose tests are re-pointed at it.

    ``tests_entry`` is the specifier the tests use for the entry module; it
    is required for re-pointing and nothing is guessed without it.
    """
    out_dir = os.path.abspath(out_dir)
    if os.path.exists(out_dir):
        if not force:
            raise OutputExists(f"{out_dir} already exists (use --force to replace it)")
        shutil.rmtree(out_dir)
    os.makedirs(out_dir)
    b.write(out_dir)
    bundle_abs = os.path.join(out_dir, BUNDLE_FILE)
    for src in pkg.test_paths:
        rel = pkg.rel(src)
        dst = os.path.join(out_dir, rel)
        os.makedirs(os.path.dirname(dst), exist_ok=True)
        with open(src, encoding="utf-8") as f:
            text = f.read()
        if tests_entry is not None:
            new = repoint_test(text, rel, tests_entry, _spec_to(bundle_abs, dst))
            if new is not None:
                text = new
        with open(dst, "w", encoding="utf-8") as f:
            f.write(text)
    dev = {
        name: posix_rel(os.path.normpath(os.path.join(pkg.root, d)), out_dir)
        for name, d in pkg.manifest.devDependencies.items()
    }
    manifest = {
        "name": pkg.name,
        "version": pkg.manifest.version,
        "main": BUNDLE_FILE,
        "tests": list(pkg.manifest.tests),
        "dependencies": {},
        "devDependencies": dev,
    }
    with open(os.path.join(out_dir, MANIFEST), "w", encoding="utf-8") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")
    forget_stub_roots()
    return out_dir


def bundle_reachability(b: Bundle, rs: ReachabilitySet) -> ReachabilitySet:
    """Translate a reachability set computed on the original package to the bundle.

    Functions the bundler created have no original and are marked reachable
    so they are never stubbed.
    """
    for uid in b.shakeReport.get("kept", []):
        if uid not in b.positionMap:
            raise MapGap(f"kept function {uid} has no position in the bundle")
    at = {(sp.start_line, sp.start_col): uid for uid, sp in b.positionMap.items()}
    reachable = set()
    for fd in functions_of(parse(b.text, BUNDLE_FILE)):
        orig = at.get((fd.span.start_line, fd.span.start_col))
        if orig is None or orig in rs.reachableFunctions:
            reachable.add(fd.uid)
    return ReachabilitySet(rs.mode, reachable, {BUNDLE_FILE}, list(rs.entryPoints))


def stubbify_bundle(
    bundle_dir: str,
    b: Bundle,
    rs: ReachabilitySet,
    out_dir: str,
    opts: Optional[StubOptions] = None,
    force: bool = False,
) -> StubbedPackage:
    opts = opts or StubOptions()
    opts = StubOptions(guard=opts.guard, file_stubs=False, size_rule=opts.size_rule)
    bpkg = load_package(bundle_dir)
    return stubbify_package(bpkg, bundle_reachability(b, rs), out_dir, opts, force)
