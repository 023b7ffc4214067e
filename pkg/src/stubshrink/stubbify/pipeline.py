"""Write a stubbified copy of a package."""

from __future__ import annotations

import copy
import json
import logging
import os
import shutil
from dataclasses import dataclass
from typing import Optional

from ..callgraph.model import ReachabilitySet, parse_closure
from ..errors import OutputExists, StubshrinkError
from ..interp.package import MANIFEST, PRELUDE, PackageHandle, forget_stub_roots
from ..lang.printer import print_module
from ..lang.walk import functions_of
from .emit import emit_file_stub, stored_function_text, stub_body
from .guards import apply_guards
from .plan import StubOptions, StubPlan, plan_stubs
from .prelude import PRELUDE_TEXT
from .store import CodeStore

log = logging.getLogger(__name__)


@dataclass
class StubbedPackage:
    root: str
    plan: StubPlan
    store: CodeStore
    source: str  # root of the package that was stubbified


def transform_sources(
    modules: dict, plan: StubPlan, guard: str
) -> tuple[dict[str, str], CodeStore]:
    """Return new text for every touched file plus the code store."""
    store = CodeStore(guarded=guard != "off")
    out: dict[str, str] = {}
    guarded = store.guarded

    def keep(key: str, text: str) -> None:
        store.entries[key] = apply_guards(text) if guarded else text

    file_set = set(plan.fileStubs)
    fn_set = set(plan.functionStubs)
    for rel, m in sorted(modules.items()):
        if rel in file_set:
            stub, stored = emit_file_stub(m)
            keep(rel, stored)
            out[rel] = stub
            continue
        targets = [fd for fd in functions_of(m) if fd.uid in fn_set]
        if not targets:
            continue
        for fd in targets:
            keep(fd.uid, stored_function_text(fd))
        m2 = copy.deepcopy(m)
        for fd in functions_of(m2):
            if fd.uid in fn_set:
                fd.body = stub_body(fd)
        out[rel] = print_module(m2)
    return out, store


def stubbify_package(
    pkg: PackageHandle,
    rs: ReachabilitySet,
    out_dir: str,
    opts: Optional[StubOptions] = None,
    force: bool = False,
    plan: Optional[StubPlan] = None,
) -> StubbedPackage:
    opts = opts or StubOptions()
    out_dir = os.path.abspath(out_dir)
    if os.path.exists(out_dir) and not force:
        raise OutputExists(f"{out_dir} already exists (use --force to replace it)")
    modules = parse_closure(pkg)
    for rel in modules:
        if rel.startswith("../"):
            raise StubshrinkError(f"dependency file {rel} lies outside the package directory")
    plan = plan or plan_stubs(pkg, rs, opts, modules)
    texts, store = transform_sources(modules, plan, opts.guard)

    tmp = out_dir + f".tmp{os.getpid()}"
    if os.path.exists(tmp):
        shutil.rmtree(tmp)
    skip = {out_dir, tmp}
    members = {p.root for p in pkg.packages()}

    def ignore(d, names):
        out = []
        for n in names:
            full = os.path.join(os.path.abspath(d), n)
            # nested packages that are not dependencies (e.g. clients) stay behind
            if full in skip or (os.path.isfile(os.path.join(full, MANIFEST)) and full not in members):
                out.append(n)
        return out

    try:
        shutil.copytree(pkg.root, tmp, ignore=ignore)
        for rel, text in texts.items():
            with open(os.path.join(tmp, rel), "w", encoding="utf-8") as f:
                f.write(text)
        if plan.fileStubs or plan.functionStubs:
            store.save(tmp)
            with open(os.path.join(tmp, PRELUDE), "w", encoding="utf-8") as f:
                f.write(PRELUDE_TEXT)
        mpath = os.path.join(tmp, MANIFEST)
        with open(mpath, encoding="utf-8") as f:
            manifest = json.load(f)
        manifest["stubbed"] = {"cg": rs.mode, "guard": opts.guard}
        with open(mpath, "w", encoding="utf-8") as f:
            json.dump(manifest, f, indent=2, sort_keys=True)
            f.write("\n")
    except BaseException:
        shutil.rmtree(tmp, ignore_errors=True)
        raise
    if os.path.exists(out_dir):
        shutil.rmtree(out_dir)
    os.replace(tmp, out_dir)
    forget_stub_roots()
    log.info("stubbified %s: %d file stubs, %d function stubs", pkg.name, len(plan.fileStubs), len(plan.functionStubs))
    return StubbedPackage(out_dir, plan, store, pkg.root)
