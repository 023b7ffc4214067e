"""Scope-hoisting bundler with top-level tree-shaking.

ESM modules are inlined with every top-level binding renamed ``name$<index>``;
CommonJS modules are wrapped in a lazily initialised factory and kept whole.
"""

from __future__ import annotations

import copy
import json
import logging
import os
from dataclasses import dataclass, field
from typing import Optional

from ..errors import BundleError, MissingDependency
from ..interp.package import PackageHandle
from ..lang import ast as A
from ..lang.parser import parse, parse_cached
from ..lang.printer import print_module
from ..lang.walk import functions_of, walk
from ..callgraph.model import read_source

log = logging.getLogger(__name__)

BUNDLE_FILE = "bundle.mm"
MAP_FILE = "bundle.map.json"
SHAKE_FILE = "shake.report.json"


@dataclass
class Bundle:
    text: str
    entry: str
    positionMap: dict = field(default_factory=dict)  # original uid -> Span in bundle
    shakeReport: dict = field(default_factory=dict)
    modules: list = field(default_factory=list)  # package-relative paths, bundle index order

    def map_json(self) -> dict:
        return {uid: sp.to_json() for uid, sp in sorted(self.positionMap.items())}

    def write(self, directory: str) -> None:
        with open(os.path.join(directory, BUNDLE_FILE), "w", encoding="utf-8") as f:
            f.write(self.text)
        with open(os.path.join(directory, MAP_FILE), "w", encoding="utf-8") as f:
            json.dump(self.map_json(), f, indent=2, sort_keys=True)
            f.write("\n")
        with open(os.path.join(directory, SHAKE_FILE), "w", encoding="utf-8") as f:
            json.dump(self.shakeReport, f, indent=2, sort_keys=True)
            f.write("\n")


def _require_spec(e) -> Optional[str]:
    if type(e) is A.Call and type(e.callee) is A.Ident and e.callee.name == "require":
        if len(e.args) == 1 and type(e.args[0]) is A.Str:
            return e.args[0].value
        raise BundleError(f"require() with a non-literal specifier at {_where(e)}")
    return None


def _where(n) -> str:
    sp = n.span
    return f"{sp.file}:{sp.start_line}:{sp.start_col}" if sp else "?"


def _declared(stmts: list) -> set:
    out = set()
    for s in stmts:
        if isinstance(s, A.ExportDecl):
            s = s.decl
        if isinstance(s, A.Let):
            out.add(s.name)
        elif isinstance(s, A.FuncDecl):
            out.add(s.fn.name)
        elif isinstance(s, A.ClassDecl):
            out.add(s.name)
    return out


class _Rewriter:
    """Copies a subtree, replacing free identifiers via ``lookup``.

    ``lookup(name)`` returns a replacement expression or None. Identifiers
    bound by an inner scope are left alone.
    """

    def __init__(self, lookup, require):
        self.lookup = lookup
        self.require = require

    def stmts(self, stmts: list, bound: frozenset) -> list:
        bound = bound | _declared(stmts)
        return [self.node(s, bound) for s in stmts]

    def function(self, fd: A.FunctionDef, bound: frozenset) -> A.FunctionDef:
        out = copy.copy(fd)
        out.origin = fd.uid
        inner = bound | set(fd.params) | {"arguments"}
        out.body = self.stmts(fd.body, frozenset(inner))
        return out

    def node(self, n, bound: frozenset):
        t = type(n)
        if t is A.Ident:
            if n.name not in bound:
                rep = self.lookup(n.name)
                if rep is not None:
                    return rep
            return n
        if t is A.Call:
            spec = _require_spec(n)
            if spec is not None and "require" not in bound:
                return self.require(spec, n)
        if t is A.FunctionDef:
            return self.function(n, bound)
        if t in (A.If,):
            return A.If(
                self.node(n.cond, bound),
                self.stmts(n.then, bound),
                None if n.orelse is None else self.stmts(n.orelse, bound),
                span=n.span,
            )
        if t is A.While:
            return A.While(self.node(n.cond, bound), self.stmts(n.body, bound), span=n.span)
        out = copy.copy(n)
        for name in n.__dataclass_fields__:
            if name in ("span", "uid", "origin"):
                continue
            v = getattr(n, name)
            if isinstance(v, A.Node):
                setattr(out, name, self.node(v, bound))
            elif isinstance(v, list) and v and isinstance(v[0], A.Node):
                setattr(out, name, [self.node(x, bound) for x in v])
        return out


class _ModuleInfo:
    def __init__(self, index: int, path: str, rel: str, module: A.Module):
        self.index = index
        self.path = path
        self.rel = rel
        self.module = module
        self.esm = module.style == "esm"
        self.deps: list[str] = []  # resolved absolute paths, source order
        self.exports: dict = {}  # exported name -> expression (ESM)
        self.code: list = []  # rewritten statements
        self.needs_ns = False

    def suffix(self, name: str) -> str:
        return f"{name}${self.index}"


class Bundler:
    def __init__(self, pkg: PackageHandle):
        self.pkg = pkg
        self.mods: dict[str, _ModuleInfo] = {}
        self.order: list = []  # ("esm", info) | ("init", info), evaluation order

    def resolve(self, spec: str, from_file: str) -> str:
        try:
            return self.pkg.resolve(spec, from_file)
        except MissingDependency as e:
            raise BundleError(str(e)) from e

    def load(self, path: str) -> _ModuleInfo:
        info = self.mods.get(path)
        if info is not None:
            return info
        rel = self.pkg.rel(path)
        info = _ModuleInfo(len(self.mods), path, rel, parse_cached(read_source(path), rel))
        self.mods[path] = info
        for n in walk(info.module):
            if isinstance(n, A.Import):
                info.deps.append(self.resolve(n.source, path))
            elif isinstance(n, A.Call):
                spec = _require_spec(n)
                if spec is not None:
                    info.deps.append(self.resolve(spec, path))
        for d in info.deps:
            self.load(d)
        return info

    def check_cycles(self) -> None:
        state: dict[str, int] = {}

        def visit(p: str, chain: list) -> None:
            st = state.get(p)
            if st == 1:
                cyc = chain[chain.index(p):] + [p]
                raise BundleError("import cycle: " + " -> ".join(self.mods[c].rel for c in cyc))
            if st == 2:
                return
            state[p] = 1
            for d in self.mods[p].deps:
                visit(d, chain + [p])
            state[p] = 2

        for p in list(self.mods):
            visit(p, [])

    def plan_order(self, entry: str) -> None:
        done: set[str] = set()
        inited: set[str] = set()

        def visit(p: str) -> None:
            info = self.mods[p]
            if not info.esm:
                if p not in inited:
                    inited.add(p)
                    self.order.append(("init", info))
                return
            if p in done:
                return
            done.add(p)
            for s in info.module.items:
                if isinstance(s, A.Import):
                    visit(self.resolve(s.source, p))
            self.order.append(("esm", info))

        visit(entry)

    # ------------------------------------------------------------ rewriting

    def module_ref(self, target: _ModuleInfo) -> A.Node:
        """Expression for what ``require`` of ``target`` returns."""
        if target.esm:
            target.needs_ns = True
            return A.Ident(f"__ns${target.index}")
        return A.Call(A.Ident(f"__require${target.index}"), [])

    def import_expr(self, target: _ModuleInfo, name: str) -> A.Node:
        if target.esm:
            if name not in target.exports:
                raise BundleError(f"{target.rel} has no export '{name}'")
            return copy.deepcopy(target.exports[name])
        base = self.module_ref(target)
        return base if name == "default" else A.Member(base, name)

    def rewrite_esm(self, info: _ModuleInfo) -> None:
        items = info.module.items
        top = _declared(items)
        imports: dict[str, A.Node] = {}
        for s in items:
            if isinstance(s, A.Import):
                target = self.mods[self.resolve(s.source, info.path)]
                if s.default is not None:
                    imports[s.default] = self.import_expr(target, "default")
                for imported, local in s.names:
                    imports[local] = self.import_expr(target, imported)

        def lookup(name: str):
            if name in top:
                return A.Ident(info.suffix(name))
            rep = imports.get(name)
            return copy.deepcopy(rep) if rep is not None else None

        def require(spec, call):
            return self.module_ref(self.mods[self.resolve(spec, info.path)])

        rw = _Rewriter(lookup, require)
        bound = frozenset()
        code = []
        for s in items:
            if isinstance(s, (A.Import, A.ExportNamed)):
                continue
            if isinstance(s, A.ExportDefault) and isinstance(s.expr, A.Ident):
                continue
            if isinstance(s, A.ExportDefault):
                code.append(A.Let(f"__default${info.index}", rw.node(s.expr, bound), span=s.span))
                continue
            if isinstance(s, A.ExportDecl):
                s = s.decl
            new = rw.node(s, bound)
            if isinstance(new, A.Let):
                new = A.Let(info.suffix(new.name), new.init, span=new.span)
            elif isinstance(new, A.FuncDecl):
                fn = copy.copy(new.fn)
                fn.name = info.suffix(fn.name)
                new = A.FuncDecl(fn, span=new.span)
            elif isinstance(new, A.ClassDecl):
                new = A.ClassDecl(info.suffix(new.name), new.members, span=new.span)
            code.append(new)
        for s in items:
            if isinstance(s, A.ExportDecl):
                name = s.decl.fn.name if isinstance(s.decl, A.FuncDecl) else s.decl.name
                info.exports[name] = A.Ident(info.suffix(name))
            elif isinstance(s, A.ExportNamed):
                for local, exported in s.specs:
                    info.exports[exported] = lookup(local) or A.Ident(local)
            elif isinstance(s, A.ExportDefault):
                if isinstance(s.expr, A.Ident):
                    info.exports["default"] = lookup(s.expr.name) or A.Ident(s.expr.name)
                else:
                    info.exports["default"] = A.Ident(f"__default${info.index}")
        info.code = code

    def rewrite_cjs(self, info: _ModuleInfo) -> None:
        names = {"module": "__module", "exports": "__exports"}

        def lookup(name: str):
            return A.Ident(names[name]) if name in names else None

        def require(spec, call):
            return self.module_ref(self.mods[self.resolve(spec, info.path)])

        rw = _Rewriter(lookup, require)
        body = rw.stmts(info.module.items, frozenset())
        j = info.index
        # the body lives in its own top-level function so it is indented
        # once, not three times
        shell = parse(
            f"let __mod${j} = null;\n"
            f"function __init${j}(__module, __exports) {{\n}}\n"
            f"function __require${j}() {{\n"
            f"  if (__mod${j} == null) {{\n"
            f"    __mod${j} = {{exports: {{}}}};\n"
            f"    __init${j}(__mod${j}, __mod${j}.exports);\n"
            f"  }}\n"
            f"  return __mod${j}.exports;\n"
            f"}}\n",
            "<bundle>",
        )
        shell.items[1].fn.body = body
        info.code = shell.items

    def namespace(self, info: _ModuleInfo) -> A.Let:
        props = []
        for name, expr in info.exports.items():
            fn = A.FunctionDef("getter", name, [], [A.Return(copy.deepcopy(expr))])
            props.append(A.Accessor(fn))
        return A.Let(f"__ns${info.index}", A.ObjectLit(props))


def _refs(node) -> tuple[set, set]:
    idents, members = set(), set()
    for n in walk(node):
        if isinstance(n, A.Ident):
            idents.add(n.name)
        elif isinstance(n, A.Member):
            members.add(n.name)
    return idents, members


def _method_names(node) -> set:
    return {n.name for n in walk(node) if isinstance(n, A.FunctionDef) and n.kind in ("method", "getter", "setter") and n.name}


def bundle(pkg: PackageHandle, entry: Optional[str] = None) -> Bundle:
    entry_path = os.path.abspath(entry) if entry else pkg.main_path
    b = Bundler(pkg)
    b.load(entry_path)
    b.check_cycles()
    b.plan_order(entry_path)
    entry_info = b.mods[entry_path]
    if any(isinstance(n, A.Call) and isinstance(n.callee, A.Ident) and n.callee.name == "eval" for i in b.mods.values() for n in walk(i.module)):
        log.warning("bundle: eval() present; code it evaluates sees renamed top-level bindings")

    # rewrite in evaluation order so import targets have their export tables
    for kind, info in b.order:
        if kind == "esm":
            b.rewrite_esm(info)
    for info in b.mods.values():
        if not info.esm:
            b.rewrite_cjs(info)

    # (statement, candidate-key or None); candidates are ESM top-level functions/classes
    stmts: list = []
    for info in sorted((i for i in b.mods.values() if not i.esm), key=lambda i: i.index):
        stmts.extend((s, None) for s in info.code)
    for kind, info in b.order:
        if kind == "init":
            stmts.append((A.ExprStmt(A.Call(A.Ident(f"__require${info.index}"), [])), None))
            continue
        for s in info.code:
            key = None
            if isinstance(s, A.FuncDecl):
                key = s.fn.name
            elif isinstance(s, A.ClassDecl):
                key = s.name
            stmts.append((s, (info, key) if key else None))
        if info.needs_ns:
            stmts.append((b.namespace(info), None))

    tail: list = []
    if entry_info.esm:
        for name, expr in entry_info.exports.items():
            if name == "default":
                tail.append(A.ExportDefault(copy.deepcopy(expr)))
            elif isinstance(expr, A.Ident):
                tail.append(A.ExportNamed([(expr.name, name)]))
            else:
                local = f"__reexport${len(tail)}"
                tail.append(A.Let(local, copy.deepcopy(expr)))
                tail.append(A.ExportNamed([(local, name)]))
    else:
        tail.append(A.Assign(A.Member(A.Ident("module"), "exports"), A.Call(A.Ident(f"__require${entry_info.index}"), [])))

    # tree-shake: fixpoint from everything that is not a removable declaration
    export_names: dict[str, set] = {}
    for info in b.mods.values():
        for name, expr in info.exports.items():
            if isinstance(expr, A.Ident):
                export_names.setdefault(expr.name, set()).add(name)
    candidates = {}
    for s, ck in stmts:
        if ck is not None:
            info, key = ck
            orig = key.rsplit("$", 1)[0]
            candidates[key] = (s, {orig} | export_names.get(key, set()), _method_names(s))
    kept: set[str] = set()
    idents: set[str] = set()
    members: set[str] = set()

    def absorb(node) -> None:
        i, m = _refs(node)
        idents.update(i)
        members.update(m)

    for s, ck in stmts:
        if ck is None:
            absorb(s)
    for s in tail:
        absorb(s)
        if isinstance(s, A.ExportNamed):
            idents.update(local for local, _ in s.specs)
    changed = True
    while changed:
        changed = False
        for key, (s, names, methods) in candidates.items():
            if key in kept:
                continue
            if key in idents or names & members or methods & members:
                kept.add(key)
                absorb(s)
                changed = True

    out_items = []
    removed, kept_uids = [], []
    for s, ck in stmts:
        if ck is not None and ck[1] not in kept:
            removed.extend(fd.origin or fd.uid for fd in functions_of([s]))
            continue
        out_items.append(s)
    out_items.extend(tail)
    text = print_module(out_items)

    # position map: printing preserves function order, so zip with a reparse
    reparsed = parse(text, BUNDLE_FILE)
    built = functions_of(out_items)
    parsed = functions_of(reparsed)
    if len(built) != len(parsed):
        raise BundleError("internal error: bundle reparse changed the function count")
    pos = {}
    for fb, fp in zip(built, parsed):
        if fb.origin:
            pos[fb.origin] = fp.span
            kept_uids.append(fb.origin)
    report = {"kept": sorted(kept_uids), "removed": sorted(removed)}
    return Bundle(text, pkg.rel(entry_path), pos, report, [i.rel for i in sorted(b.mods.values(), key=lambda i: i.index)])
