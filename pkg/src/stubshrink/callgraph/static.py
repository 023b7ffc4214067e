"""Worklist reachability over imports, references and name-keyed member uses.

Calls through eval, computed members and non-literal require specifiers are
not followed; each one is reported as a warning instead.
"""

from __future__ import annotations

import logging
from collections import deque
from typing import Optional

from ..errors import MissingDependency
from ..interp.package import PackageHandle
from ..lang import ast as A
from ..lang.parser import parse_cached
from ..lang.walk import children
from .model import ReachabilitySet, read_source

log = logging.getLogger(__name__)

# binding kinds
FUNC, CLASS, IMPORT, MODULE, VAR = "func", "class", "import", "module", "var"


class Facts:
    """What one region (a module top level or a function body) mentions."""

    def __init__(self):
        self.refs: list = []  # bindings
        self.export_refs: list = []  # (spec, name)
        self.imports: list = []  # specs
        self.members: set = set()
        self.anon: list = []  # FunctionDefs


class FileInfo:
    def __init__(self, abs_path: str, rel: str, module: A.Module):
        self.abs = abs_path
        self.rel = rel
        self.module = module
        self.top: dict = {}
        self.export_map: dict = {}
        self.cjs_exports: dict = {}
        self.methods: dict = {}  # name -> [FunctionDef]
        self.regions: dict = {}  # uid | None -> Facts
        self.warnings: list = []


def _require_spec(e) -> Optional[str]:
    """``require("lit")`` -> "lit"."""
    if (
        type(e) is A.Call
        and type(e.callee) is A.Ident
        and e.callee.name == "require"
        and len(e.args) == 1
        and type(e.args[0]) is A.Str
    ):
        return e.args[0].value
    return None


def _is_export_target(tgt) -> bool:
    """``exports.k``, ``module.exports.k`` or ``module.exports``."""
    if type(tgt) is not A.Member:
        return False
    obj = tgt.obj
    if type(obj) is A.Ident:
        return obj.name == "exports" or (obj.name == "module" and tgt.name == "exports")
    return type(obj) is A.Member and obj.name == "exports" and type(obj.obj) is A.Ident and obj.obj.name == "module"


class _Scanner:
    def __init__(self, info: FileInfo):
        self.info = info

    def warn(self, node, what: str) -> None:
        sp = node.span
        where = f"{self.info.rel}:{sp.start_line}:{sp.start_col}" if sp else self.info.rel
        self.info.warnings.append(f"{where}: {what} is not followed by the static analysis")

    def declare(self, stmts: list, scope: dict) -> None:
        for s in stmts:
            t = type(s)
            if t is A.ExportDecl:
                s = s.decl
                t = type(s)
            if t is A.Let:
                spec = _require_spec(s.init)
                scope[s.name] = (MODULE, self.info.abs, spec) if spec is not None else (VAR,)
            elif t is A.FuncDecl:
                scope[s.fn.name] = (FUNC, s.fn)
            elif t is A.ClassDecl:
                scope[s.name] = (CLASS, s)
            elif t is A.Import:
                if s.default is not None:
                    scope[s.default] = (IMPORT, self.info.abs, s.source, "default")
                for imported, local in s.names:
                    scope[local] = (IMPORT, self.info.abs, s.source, imported)

    def run(self) -> None:
        info = self.info
        items = info.module.items
        top = {}
        self.declare(items, top)
        info.top = top
        self.block(items, [top], None, declared=True)
        for s in items:
            if isinstance(s, A.ExportDecl):
                name = s.decl.fn.name if isinstance(s.decl, A.FuncDecl) else s.decl.name
                info.export_map[name] = name
            elif isinstance(s, A.ExportNamed):
                for local, exported in s.specs:
                    info.export_map[exported] = local
            elif isinstance(s, A.ExportDefault):
                info.export_map["default"] = s.expr.name if isinstance(s.expr, A.Ident) else None
            elif isinstance(s, A.Assign):
                self.cjs_export(s, top)

    def cjs_export(self, s: A.Assign, top: dict) -> None:
        tgt = s.target
        if type(tgt) is not A.Member:
            return
        obj = tgt.obj
        is_exports = type(obj) is A.Ident and obj.name == "exports"
        is_mod_exports = type(obj) is A.Member and obj.name == "exports" and type(obj.obj) is A.Ident and obj.obj.name == "module"
        if is_exports or is_mod_exports:
            self.info.cjs_exports.setdefault(tgt.name, []).append(self.value_binding(s.value, top))
        elif type(obj) is A.Ident and obj.name == "module" and tgt.name == "exports":
            self.info.cjs_exports.setdefault("default", []).append(self.value_binding(s.value, top))
            if type(s.value) is A.ObjectLit:
                for p in s.value.props:
                    if type(p) is A.Prop:
                        self.info.cjs_exports.setdefault(p.key, []).append(self.value_binding(p.value, top))

    @staticmethod
    def value_binding(e, top: dict):
        if type(e) is A.Ident:
            return top.get(e.name)
        spec = _require_spec(e)
        return None if spec is None else (MODULE, None, spec)

    def facts(self, region) -> Facts:
        f = self.info.regions.get(region)
        if f is None:
            f = self.info.regions[region] = Facts()
        return f

    def block(self, stmts: list, scopes: list, region, declared: bool = False) -> None:
        if not declared:
            scope = {}
            self.declare(stmts, scope)
            scopes = scopes + [scope]
        for s in stmts:
            self.node(s, scopes, region)

    def function(self, fd: A.FunctionDef, scopes: list) -> None:
        self.facts(fd.uid)
        scope = {p: (VAR,) for p in fd.params}
        scope["arguments"] = (VAR,)
        if fd.kind in ("method", "getter", "setter") and fd.name is not None:
            self.info.methods.setdefault(fd.name, []).append(fd)
        self.block(fd.body, scopes + [scope], fd.uid)

    @staticmethod
    def resolve(name: str, scopes: list):
        for sc in reversed(scopes):
            b = sc.get(name)
            if b is not None:
                return b
        return None

    def node(self, n, scopes: list, region) -> None:
        t = type(n)
        if t is A.Assign and region is None and _is_export_target(n.target):
            # exported values are reached through the export table, not by mention
            value = n.value
            if type(value) is A.ObjectLit:
                for p in value.props:
                    if not (type(p) is A.Prop and type(p.value) is A.Ident):
                        self.node(p, scopes, region)
            elif type(value) is not A.Ident:
                self.node(value, scopes, region)
            return
        if t is A.Ident:
            b = self.resolve(n.name, scopes)
            if b is not None and b[0] != VAR:
                self.facts(region).refs.append(b)
            return
        if t is A.Call:
            callee = n.callee
            if type(callee) is A.Ident and self.resolve(callee.name, scopes) is None:
                if callee.name == "eval":
                    self.warn(n, "eval()")
                elif callee.name == "require":
                    spec = _require_spec(n)
                    if spec is not None:
                        self.facts(region).imports.append(spec)
                    else:
                        self.warn(n, "require() with a non-literal specifier")
                    for a in n.args:
                        self.node(a, scopes, region)
                    return
            elif type(callee) is A.Index:
                self.warn(n, "call through a computed member")
        elif t is A.Member:
            f = self.facts(region)
            f.members.add(n.name)
            obj = n.obj
            if type(obj) is A.Ident:
                b = self.resolve(obj.name, scopes)
                if b is not None and (b[0] == MODULE or (b[0] == IMPORT and b[3] == "default")):
                    f.export_refs.append((b[1], b[2], n.name))
            else:
                spec = _require_spec(obj)
                if spec is not None and self.resolve("require", scopes) is None:
                    f.export_refs.append((self.info.abs, spec, n.name))
        elif t is A.FunctionDef:
            if n.kind == "anonymous":
                self.facts(region).anon.append(n)
            self.function(n, scopes)
            return
        elif t is A.FuncDecl:
            self.function(n.fn, scopes)
            return
        elif t is A.ClassDecl:
            for m in n.members:
                self.function(m, scopes)
            return
        elif t is A.Import:
            self.facts(region).imports.append(n.source)
            return
        elif t is A.ExportNamed:
            return
        elif t is A.ExportDefault and type(n.expr) is A.Ident:
            return
        elif t is A.If:
            self.node(n.cond, scopes, region)
            self.block(n.then, scopes, region)
            if n.orelse is not None:
                self.block(n.orelse, scopes, region)
            return
        elif t is A.While:
            self.node(n.cond, scopes, region)
            self.block(n.body, scopes, region)
            return
        for c in children(n):
            self.node(c, scopes, region)


class StaticAnalysis:
    def __init__(self, pkg: PackageHandle):
        self.pkg = pkg
        self.files: dict[str, FileInfo] = {}
        self.by_rel: dict[str, FileInfo] = {}
        self.warnings: list[str] = []

    def info(self, abs_path: str) -> FileInfo:
        fi = self.files.get(abs_path)
        if fi is None:
            rel = self.pkg.rel(abs_path)
            fi = FileInfo(abs_path, rel, parse_cached(read_source(abs_path), rel))
            _Scanner(fi).run()
            self.files[abs_path] = fi
            self.by_rel[rel] = fi
        return fi

    def resolve_spec(self, spec: str, from_abs: str) -> Optional[str]:
        try:
            return self.pkg.resolve(spec, from_abs)
        except MissingDependency as e:
            self.warnings.append(str(e))
            return None

    def targets(self, binding, depth: int = 0) -> list:
        """Named functions (or constructors) a binding denotes."""
        if binding is None or depth > 32:
            return []
        kind = binding[0]
        if kind == FUNC:
            return [binding[1]]
        if kind == CLASS:
            ctor = binding[1].constructor
            return [ctor] if ctor is not None else []
        if kind == IMPORT:
            return self.export_targets(binding[1], binding[2], binding[3], depth + 1)
        if kind == MODULE:
            if binding[1] is None:
                return []
            return self.export_targets(binding[1], binding[2], "default", depth + 1)
        return []

    def export_targets(self, from_abs: str, spec: str, name: str, depth: int) -> list:
        path = self.resolve_spec(spec, from_abs)
        if path is None:
            return []
        fi = self.info(path)
        if fi.module.style == "esm":
            local = fi.export_map.get(name)
            return [] if local is None else self.targets(fi.top.get(local), depth)
        out = []
        for b in fi.cjs_exports.get(name, []):
            if b is not None and b[0] == MODULE and b[1] is None:
                b = (MODULE, fi.abs, b[2])
            out.extend(self.targets(b, depth))
        return out

    def run(self, entries: list[str]) -> tuple[set, set]:
        reached_files: set[str] = set()
        reached_fns: dict[str, A.FunctionDef] = {}
        members: set[str] = set()
        work: deque = deque(("file", p) for p in entries)
        fn_file: dict[str, FileInfo] = {}

        while work:
            kind, item = work.popleft()
            if kind == "file":
                if item in reached_files:
                    continue
                reached_files.add(item)
                fi = self.info(item)
                for name, defs in fi.methods.items():
                    if name in members:
                        work.extend(("fn", (fi, d)) for d in defs)
                facts, fi_ctx = fi.regions.get(None), fi
            else:
                fi, fd = item
                if fd.uid in reached_fns:
                    continue
                reached_fns[fd.uid] = fd
                fn_file[fd.uid] = fi
                facts, fi_ctx = fi.regions.get(fd.uid), fi
            if facts is None:
                continue
            for spec in facts.imports:
                path = self.resolve_spec(spec, fi_ctx.abs)
                if path is not None:
                    work.append(("file", path))
            for b in facts.refs:
                for fd in self.targets(b):
                    work.append(("fn", (self.owner_info(fd, fi_ctx), fd)))
            for from_abs, spec, name in facts.export_refs:
                for fd in self.export_targets(from_abs, spec, name, 0):
                    work.append(("fn", (self.owner_info(fd, fi_ctx), fd)))
            for fd in facts.anon:
                work.append(("fn", (fi_ctx, fd)))
            for name in facts.members:
                if name in members:
                    continue
                members.add(name)
                for p in reached_files:
                    for d in self.files[p].methods.get(name, ()):
                        work.append(("fn", (self.files[p], d)))
        return reached_files, set(reached_fns)

    def owner_info(self, fd: A.FunctionDef, fallback: FileInfo) -> FileInfo:
        return self.by_rel.get(fd.uid.rsplit(":", 2)[0], fallback)


def static_reachability(pkg: PackageHandle, tests: Optional[list] = None) -> ReachabilitySet:
    entries = tests if tests is not None else pkg.test_paths
    sa = StaticAnalysis(pkg)
    closure = pkg.closure_files()
    for p in closure:
        sa.info(p)  # parse errors abort up front
    files, fns = sa.run(entries)
    closure_rel = {pkg.rel(p) for p in closure}
    closure_uids = set()
    for p in closure:
        closure_uids.update(u for u in _uids(sa.info(p)))
    warnings = []
    for fi in sorted(sa.files.values(), key=lambda f: f.rel):
        warnings.extend(fi.warnings)
    warnings.extend(sa.warnings)
    for w in warnings:
        log.warning("%s", w)
    return ReachabilitySet(
        "static",
        fns & closure_uids,
        {pkg.rel(p) for p in files} & closure_rel,
        [pkg.rel(p) for p in entries],
        warnings,
    )


def _uids(fi: FileInfo):
    return (u for u in fi.regions if u is not None)
