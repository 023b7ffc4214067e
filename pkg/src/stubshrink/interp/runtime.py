"""Tree-walking evaluator for MiniMod, including the module loader and the
runtime half of the stub contract (the ``stubs`` object and guard intrinsics).
"""

from __future__ import annotations

import json
import logging
import math
import os
from dataclasses import dataclass
from typing import Optional

from ..errors import (
    CycleError,
    EvalImportError,
    GuardExit,
    MiniRuntimeError,
    MissingDependency,
    NotCallableError,
    ParseError,
)
from ..lang import ast as A
from ..lang.parser import parse_cached
from .config import GuardPolicy, RuntimeConfig
from .package import PRELUDE, STORE, PackageHandle, posix_rel, stub_root_of
from .values import CALLABLE, MClass, MFunction, MObject, NativeFunction, equals, to_display, truthy, type_name

log = logging.getLogger(__name__)

EVAL_PATH = "<eval>"
GUARD_INTRINSICS = ("__guardCheck", "__guardCall")
MAX_DEPTH = 400


class Env:
    __slots__ = ("vars", "parent", "stub")

    def __init__(self, parent: Optional["Env"] = None):
        self.vars: dict = {}
        self.parent = parent
        self.stub: Optional[StubRuntime] = None

    def find(self, name: str) -> Optional["Env"]:
        e = self
        while e is not None:
            if name in e.vars:
                return e
            e = e.parent
        return None


class ImportBinding:
    """Live, read-only view of another module's export."""

    __slots__ = ("module", "name")

    def __init__(self, module: "ModuleInstance", name: str):
        self.module = module
        self.name = name


class _Return:
    __slots__ = ("value",)

    def __init__(self, value):
        self.value = value


@dataclass
class ExpansionEvent:
    kind: str  # file | function
    id: str
    bytesLoaded: int
    cacheHit: bool
    seq: int = 0
    run: str = ""

    def to_json(self) -> dict:
        return {
            "bytesLoaded": self.bytesLoaded,
            "cacheHit": self.cacheHit,
            "id": self.id,
            "kind": self.kind,
            "run": self.run,
            "seq": self.seq,
        }


@dataclass
class GuardEvent:
    name: str
    seq: int = 0
    run: str = ""

    def to_json(self) -> dict:
        return {"name": self.name, "run": self.run, "seq": self.seq}


_store_cache: dict = {}


def load_store(path: str) -> dict:
    if not os.path.isfile(path):
        return {}  # nothing was stubbed
    st = os.stat(path)
    key = (path, st.st_mtime_ns, st.st_size)
    data = _store_cache.get(key)
    if data is None:
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
        _store_cache[key] = data
    return data


class StubRuntime:
    """Per-interpreter state behind one stubbified package's ``stubs`` object."""

    def __init__(self, root: str, store: dict, mode: str):
        self.root = root
        self.entries: dict = store.get("entries", {})
        self.guarded = bool(store.get("guarded", False))
        self.mode = mode
        self.fetched: set = set()
        self.env: Optional[Env] = None


class ModuleInstance:
    def __init__(self, path: str, rel: str, module: A.Module):
        self.path = path
        self.rel = rel
        self.module = module
        self.env: Optional[Env] = None
        self.status = "new"
        self.module_obj: Optional[MObject] = None
        self.export_map: dict = {}  # esm: exported name -> local binding name
        self._namespace: Optional[MObject] = None

    @property
    def is_esm(self) -> bool:
        return self.module.style == "esm"

    def read_export(self, interp: "Interpreter", name: str):
        if self.is_esm:
            local = self.export_map.get(name)
            if local is None:
                raise interp.error(f"module {self.rel} has no export '{name}'")
            return interp.lookup(self.env, local)
        exports = self.module_obj.props.get("exports")
        if name == "default":
            return exports
        return interp.get_member(exports, name)

    def exports_value(self, interp: "Interpreter"):
        if not self.is_esm:
            return self.module_obj.props.get("exports")
        if self._namespace is None:
            ns = MObject()
            for name in self.export_map:
                ns.getters[name] = NativeFunction(
                    f"get {name}", lambda it, this, args, env, n=name: self.read_export(it, n)
                )
            self._namespace = ns
        return self._namespace


def _hoist(stmts: list, env: Env) -> None:
    for s in stmts:
        t = type(s)
        if t is A.FuncDecl:
            env.vars[s.fn.name] = MFunction(s.fn, env)
        elif t is A.ExportDecl and type(s.decl) is A.FuncDecl:
            env.vars[s.decl.fn.name] = MFunction(s.decl.fn, env)


class Interpreter:
    """One single-threaded evaluation of a package (typically one test module)."""

    def __init__(self, pkg: PackageHandle, config: Optional[RuntimeConfig] = None, label: str = ""):
        self.pkg = pkg
        self.config = config or RuntimeConfig()
        self.hooks = self.config.hooks
        self.label = label
        self.modules: dict[str, ModuleInstance] = {}
        self.output: list[str] = []
        self.side_effects: list[str] = []
        self.assertion_failures: list[str] = []
        self.expansions: list[ExpansionEvent] = []
        self.guard_events: list[GuardEvent] = []
        self.stub_runtimes: dict[str, StubRuntime] = {}
        self.stack: list[str] = []
        self.globals = Env()
        self._install_builtins()

    # ------------------------------------------------------------- errors

    def error(self, msg: str, cls=MiniRuntimeError) -> MiniRuntimeError:
        return cls(msg, list(self.stack))

    # ----------------------------------------------------------- builtins

    def _install_builtins(self) -> None:
        g = self.globals.vars

        def native(name):
            def deco(fn):
                g[name] = NativeFunction(name, fn)
                return fn

            return deco

        @native("print")
        def _print(it, this, args, env):
            it.output.append(" ".join(to_display(a) for a in args))

        @native("assert")
        def _assert(it, this, args, env):
            cond = args[0] if args else None
            if not truthy(cond):
                msg = to_display(args[1]) if len(args) > 1 else "assertion failed"
                it.assertion_failures.append(msg)

        @native("len")
        def _len(it, this, args, env):
            v = args[0] if args else None
            if isinstance(v, (list, str)):
                return float(len(v))
            if isinstance(v, MObject):
                return float(len(v.props))
            raise it.error(f"len() of {type_name(v)}")

        @native("str")
        def _str(it, this, args, env):
            return to_display(args[0] if args else None)

        @native("push")
        def _push(it, this, args, env):
            arr = args[0] if args else None
            if not isinstance(arr, list):
                raise it.error(f"push() on {type_name(arr)}")
            arr.append(args[1] if len(args) > 1 else None)
            return float(len(arr))

        @native("keys")
        def _keys(it, this, args, env):
            v = args[0] if args else None
            if isinstance(v, MObject):
                return [k for k in v.props if k not in v.getters]
            if isinstance(v, (MFunction, NativeFunction, MClass)):
                return list(v.props)
            if v is None:
                return []
            raise it.error(f"keys() of {type_name(v)}")

        @native("eval")
        def _eval(it, this, args, env):
            code = args[0] if args else None
            if not isinstance(code, str):
                return code
            return it.eval_in_scope(code, env if env is not None else it.globals)

        for name in ("exec", "execSync", "spawn"):

            def dangerous(it, this, args, env, name=name):
                cmd = to_display(args[0] if args else None)
                marker = f"{name}:{cmd}"
                it.side_effects.append(marker)
                return marker

            g[name] = NativeFunction(name, dangerous)

    # ------------------------------------------------------------ modules

    def rel(self, abs_path: str) -> str:
        return posix_rel(abs_path, self.pkg.root)

    def load_module(self, abs_path: str) -> ModuleInstance:
        inst = self.modules.get(abs_path)
        if inst is not None:
            if inst.status == "loading":
                raise self.error(f"import cycle through {inst.rel}", CycleError)
            return inst
        rel = self.rel(abs_path)
        try:
            with open(abs_path, encoding="utf-8") as f:
                text = f.read()
        except OSError as e:
            raise self.error(f"cannot read module {rel}: {e}", MissingDependency) from e
        module = parse_cached(text, rel)
        inst = ModuleInstance(abs_path, rel, module)
        self.modules[abs_path] = inst
        inst.status = "loading"
        parent = self.globals
        sroot = stub_root_of(abs_path)
        if sroot is not None:
            parent = self.stub_env(sroot)
        inst.env = Env(parent)
        inst.env.vars["this"] = None
        if self.hooks.on_module_exec:
            self.hooks.on_module_exec(rel)
        if module.style == "esm":
            self._run_esm(inst)
        else:
            self._run_cjs(inst)
        inst.status = "done"
        return inst

    def _run_esm(self, inst: ModuleInstance) -> None:
        env = inst.env
        items = inst.module.items
        for s in items:
            if isinstance(s, A.ExportDecl):
                name = s.decl.fn.name if isinstance(s.decl, A.FuncDecl) else s.decl.name
                inst.export_map[name] = name
            elif isinstance(s, A.ExportNamed):
                for local, exported in s.specs:
                    inst.export_map[exported] = local
            elif isinstance(s, A.ExportDefault):
                inst.export_map["default"] = s.expr.name if isinstance(s.expr, A.Ident) else "*default*"
        for s in items:
            if isinstance(s, A.Import):
                target = self.load_module(self.pkg.resolve(s.source, inst.path))
                if s.default is not None:
                    env.vars[s.default] = ImportBinding(target, "default")
                for imported, local in s.names:
                    if target.is_esm and imported not in target.export_map:
                        raise self.error(f"module {target.rel} has no export '{imported}'")
                    env.vars[local] = ImportBinding(target, imported)
        _hoist(items, env)
        for s in items:
            t = type(s)
            if t is A.Import or t is A.ExportNamed:
                continue
            if t is A.ExportDecl:
                if type(s.decl) is A.ClassDecl:
                    self.exec_stmt(s.decl, env)
                continue
            if t is A.ExportDefault:
                if not isinstance(s.expr, A.Ident):
                    env.vars["*default*"] = self.eval(s.expr, env)
                continue
            r = self.exec_stmt(s, env)
            if r is not None:
                raise self.error("return outside function")

    def _run_cjs(self, inst: ModuleInstance) -> None:
        env = inst.env
        exports = MObject()
        inst.module_obj = MObject({"exports": exports})
        env.vars["module"] = inst.module_obj
        env.vars["exports"] = exports
        env.vars["require"] = NativeFunction("require", lambda it, this, args, e: self._require(inst, args))
        r = self.exec_block(inst.module.items, env)
        if r is not None:
            raise self.error("return outside function")

    def _require(self, inst: ModuleInstance, args: list):
        spec = args[0] if args else None
        if not isinstance(spec, str):
            raise self.error(f"require() expects a string, got {type_name(spec)}")
        target = self.load_module(self.pkg.resolve(spec, inst.path))
        return target.exports_value(self)

    def run_module(self, abs_path: str):
        return self.load_module(abs_path).exports_value(self)

    # ------------------------------------------------------- stub runtime

    def stub_env(self, root: str) -> Env:
        rt = self.stub_runtimes.get(root)
        if rt is not None:
            return rt.env
        manifest_path = os.path.join(root, "minipkg.json")
        with open(manifest_path, encoding="utf-8") as f:
            marker = json.load(f).get("stubbed") or {}
        store_path = self.config.code_store_path or os.path.join(root, STORE)
        rt = StubRuntime(root, load_store(store_path), marker.get("guard", "off"))
        self.stub_runtimes[root] = rt
        env = Env(self.globals)
        env.stub = rt
        env.vars["this"] = None
        env.vars["__fetch"] = NativeFunction("__fetch", lambda it, this, args, e: self._fetch(rt, args))
        rt.env = env
        prelude_path = os.path.join(root, PRELUDE)
        if os.path.isfile(prelude_path):
            with open(prelude_path, encoding="utf-8") as f:
                prelude = parse_cached(f.read(), PRELUDE)
            self.exec_block(prelude.items, env)
        return env

    def _fetch(self, rt: StubRuntime, args: list):
        kind = args[0] if args else None
        key = args[1] if len(args) > 1 else None
        text = rt.entries.get(key)
        if text is None:
            raise self.error(f"code store has no entry for {to_display(key)}")
        hit = key in rt.fetched
        rt.fetched.add(key)
        size = 0 if hit else len(text.encode("utf-8"))
        self.expansions.append(ExpansionEvent(kind, key, size, hit, len(self.expansions), self.label))
        if self.hooks.on_stub_expansion:
            self.hooks.on_stub_expansion(kind, key, size)
        return text

    def _stub_runtime_for(self, env: Env) -> Optional[StubRuntime]:
        e = env
        while e is not None:
            if e.stub is not None:
                return e.stub
            e = e.parent
        return None

    def _guard_intrinsic(self, name: str, env: Env):
        rt = self._stub_runtime_for(env)
        if rt is None:
            raise self.error(f"'{name}' is not defined")
        if name == "__guardCheck":
            return NativeFunction(name, lambda it, this, args, e: self._guard_check(rt, args[0] if args else None))

        def guard_call(it, this, args, e):
            obj = args[0] if args else None
            key = args[1] if len(args) > 1 else None
            call_args = args[2] if len(args) > 2 and isinstance(args[2], list) else []
            fn = self.get_member(obj, key) if isinstance(key, str) else self.get_index(obj, key)
            self._guard_check(rt, fn)
            return self.call(fn, obj, list(call_args), e)

        return NativeFunction(name, guard_call)

    def _guard_check(self, rt: StubRuntime, v):
        policy = self.config.guard_policy or GuardPolicy(rt.mode)
        if policy.mode == "off":
            return v
        target = v.target if isinstance(v, NativeFunction) and v.target is not None else v
        for name in sorted(policy.dangerous_names):
            if self.globals.vars.get(name) is target:
                self.guard_events.append(GuardEvent(name, len(self.guard_events), self.label))
                if self.hooks.on_guard_event:
                    self.hooks.on_guard_event(name)
                log.warning("guard: expanded code calls dangerous builtin '%s'", name)
                if policy.mode == "exit":
                    raise GuardExit(name)
                break
        return v

    # --------------------------------------------------------------- eval

    def eval_in_scope(self, code: str, env: Env):
        try:
            m = parse_cached(code, EVAL_PATH)
        except ParseError as e:
            raise self.error(f"eval: {e}") from e
        if any(isinstance(s, A.MODULE_ITEMS) for s in m.items):
            raise self.error("import/export declarations cannot be evaluated", EvalImportError)
        scope = Env(env)
        _hoist(m.items, scope)
        result = None
        for s in m.items:
            if type(s) is A.ExprStmt:
                result = self.eval(s.expr, scope)
                continue
            r = self.exec_stmt(s, scope)
            if r is not None:
                raise self.error("return outside function")
        return result

    # ---------------------------------------------------------- variables

    def lookup(self, env: Env, name: str):
        if name in GUARD_INTRINSICS:
            # resolved ahead of user scopes so stored code cannot be tricked by shadowing
            return self._guard_intrinsic(name, env)
        e = env
        while e is not None:
            vs = e.vars
            if name in vs:
                v = vs[name]
                if type(v) is ImportBinding:
                    return v.module.read_export(self, v.name)
                return v
            e = e.parent
        raise self.error(f"'{name}' is not defined")

    def assign_name(self, env: Env, name: str, value) -> None:
        e = env.find(name)
        if e is None:
            raise self.error(f"assignment to undeclared variable '{name}'")
        if type(e.vars[name]) is ImportBinding:
            raise self.error(f"imported binding '{name}' is read-only")
        e.vars[name] = value

    # --------------------------------------------------------- statements

    def exec_block(self, stmts: list, env: Env):
        _hoist(stmts, env)
        for s in stmts:
            r = self.exec_stmt(s, env)
            if r is not None:
                return r
        return None

    def exec_stmt(self, s, env: Env):
        t = type(s)
        if t is A.ExprStmt:
            self.eval(s.expr, env)
        elif t is A.Let:
            env.vars[s.name] = self.eval(s.init, env)
        elif t is A.Assign:
            self.assign(s.target, self.eval(s.value, env) if type(s.target) is A.Ident else None, env, s)
        elif t is A.Return:
            return _Return(None if s.value is None else self.eval(s.value, env))
        elif t is A.If:
            if truthy(self.eval(s.cond, env)):
                return self.exec_block(s.then, Env(env))
            if s.orelse is not None:
                return self.exec_block(s.orelse, Env(env))
        elif t is A.While:
            while truthy(self.eval(s.cond, env)):
                r = self.exec_block(s.body, Env(env))
                if r is not None:
                    return r
        elif t is A.FuncDecl:
            pass  # hoisted
        elif t is A.ClassDecl:
            env.vars[s.name] = self.make_class(s, env)
        elif t in (A.Import, A.ExportNamed, A.ExportDecl, A.ExportDefault):
            raise self.error("import/export outside module top level")
        else:
            raise self.error(f"unknown statement {t.__name__}")
        return None

    def assign(self, target, value, env: Env, stmt) -> None:
        t = type(target)
        if t is A.Ident:
            self.assign_name(env, target.name, value)
        elif t is A.Member:
            obj = self.eval(target.obj, env)
            self.set_member(obj, target.name, self.eval(stmt.value, env))
        elif t is A.Index:
            obj = self.eval(target.obj, env)
            key = self.eval(target.key, env)
            self.set_index(obj, key, self.eval(stmt.value, env))
        else:
            raise self.error("invalid assignment target")

    def make_class(self, c: A.ClassDecl, env: Env) -> MClass:
        cls = MClass(c.name, env)
        for m in c.members:
            fn = MFunction(m, env)
            if m.kind == "constructor":
                cls.ctor = fn
            elif m.kind == "getter":
                cls.getters[m.name] = fn
            elif m.kind == "setter":
                cls.setters[m.name] = fn
            else:
                cls.methods[m.name] = fn
        return cls

    # -------------------------------------------------------- expressions

    def eval(self, e, env: Env):
        t = type(e)
        if t is A.Ident:
            return self.lookup(env, e.name)
        if t is A.Num or t is A.Str or t is A.Bool:
            return e.value
        if t is A.Call:
            return self.eval_call(e, env)
        if t is A.Member:
            return self.get_member(self.eval(e.obj, env), e.name)
        if t is A.Binary:
            return self.eval_binary(e, env)
        if t is A.Null:
            return None
        if t is A.This:
            return self.lookup(env, "this")
        if t is A.Index:
            return self.get_index(self.eval(e.obj, env), self.eval(e.key, env))
        if t is A.Func:
            return MFunction(e.fn, env)
        if t is A.ArrayLit:
            return [self.eval(x, env) for x in e.items]
        if t is A.ObjectLit:
            obj = MObject()
            for p in e.props:
                if type(p) is A.Prop:
                    obj.props[p.key] = self.eval(p.value, env)
                elif p.fn.kind == "getter":
                    obj.getters[p.fn.name] = MFunction(p.fn, env)
                else:
                    obj.setters[p.fn.name] = MFunction(p.fn, env)
            return obj
        if t is A.Unary:
            v = self.eval(e.operand, env)
            if e.op == "!":
                return not truthy(v)
            if not isinstance(v, float) or isinstance(v, bool):
                raise self.error(f"cannot negate {type_name(v)}")
            return -v
        if t is A.New:
            callee = self.eval(e.callee, env)
            args = [self.eval(a, env) for a in e.args]
            return self.construct(callee, args, env)
        raise self.error(f"unknown expression {t.__name__}")

    def eval_call(self, e: A.Call, env: Env):
        callee = e.callee
        ct = type(callee)
        if ct is A.Member:
            this = self.eval(callee.obj, env)
            fn = self.get_member(this, callee.name)
        elif ct is A.Index:
            this = self.eval(callee.obj, env)
            fn = self.get_index(this, self.eval(callee.key, env))
        else:
            this = None
            fn = self.eval(callee, env)
        args = [self.eval(a, env) for a in e.args]
        return self.call(fn, this, args, env)

    def call(self, fn, this, args: list, env: Optional[Env] = None):
        if type(fn) is MFunction:
            d = fn.defn
            if self.hooks.on_function_enter is not None:
                self.hooks.on_function_enter(d.uid)
            frame = Env(fn.env)
            vs = frame.vars
            vs["this"] = this
            vs["arguments"] = list(args)
            n = len(args)
            for i, p in enumerate(d.params):
                vs[p] = args[i] if i < n else None
            self.stack.append(f"{d.name or '<anonymous>'} ({d.uid})")
            if len(self.stack) > MAX_DEPTH:
                raise self.error("maximum call depth exceeded")
            try:
                r = self.exec_block(d.body, frame)
            finally:
                self.stack.pop()
            return None if r is None else r.value
        if type(fn) is NativeFunction:
            return fn.fn(self, this, args, env)
        if isinstance(fn, MClass):
            raise self.error(f"class {fn.name} must be called with 'new'", NotCallableError)
        raise self.error(f"{type_name(fn)} is not callable", NotCallableError)

    def construct(self, callee, args: list, env: Env):
        if isinstance(callee, MClass):
            obj = MObject(cls=callee)
            if callee.ctor is not None:
                self.call(callee.ctor, obj, args, env)
            return obj
        if type(callee) is MFunction:
            obj = MObject()
            self.call(callee, obj, args, env)
            return obj
        raise self.error(f"{type_name(callee)} is not a constructor", NotCallableError)

    def eval_binary(self, e: A.Binary, env: Env):
        op = e.op
        if op == "&&":
            left = self.eval(e.left, env)
            return self.eval(e.right, env) if truthy(left) else left
        if op == "||":
            left = self.eval(e.left, env)
            return left if truthy(left) else self.eval(e.right, env)
        a = self.eval(e.left, env)
        b = self.eval(e.right, env)
        if op == "==":
            return equals(a, b)
        if op == "!=":
            return not equals(a, b)
        ta, tb = type(a), type(b)
        if ta is float and tb is float:
            if op == "+":
                return a + b
            if op == "-":
                return a - b
            if op == "*":
                return a * b
            if op == "/":
                if b == 0.0:
                    if a == 0.0 or a != a:
                        return math.nan
                    return math.copysign(math.inf, a) * math.copysign(1.0, b)
                return a / b
        if (ta is float and tb is float) or (ta is str and tb is str):
            if op == "<":
                return a < b
            if op == "<=":
                return a <= b
            if op == ">":
                return a > b
            if op == ">=":
                return a >= b
            if op == "+":
                return a + b
        raise self.error(f"operator '{op}' not defined for {type_name(a)} and {type_name(b)}")

    # ------------------------------------------------------ property access

    def _accessor(self, fn, obj, args: list, kind: str):
        want = 0 if kind == "getter" else 1
        if type(fn) is MFunction and len(fn.defn.params) != want:
            raise self.error(f"{kind} must take {want} parameter(s), found {len(fn.defn.params)}")
        return self.call(fn, obj, args)

    def get_member(self, obj, name: str):
        t = type(obj)
        if t is MObject:
            props = obj.props
            if name in props:
                return props[name]
            g = obj.getters.get(name)
            if g is not None:
                return self._accessor(g, obj, [], "getter")
            cls = obj.cls
            if cls is not None:
                g = cls.getters.get(name)
                if g is not None:
                    return self._accessor(g, obj, [], "getter")
                m = cls.methods.get(name)
                if m is not None:
                    return m
            intrinsic = _OBJECT_INTRINSICS.get(name)
            if intrinsic is not None:
                return NativeFunction(name, lambda it, this, args, env: intrinsic(it, obj, args))
            return None
        if t is MFunction or t is NativeFunction:
            if name in obj.props:
                return obj.props[name]
            if name == "apply":
                return NativeFunction("apply", _apply_of(obj), target=obj)
            return None
        if t is MClass:
            return obj.props.get(name)
        raise self.error(f"cannot read property '{name}' of {type_name(obj)}")

    def set_member(self, obj, name: str, value) -> None:
        t = type(obj)
        if t is MObject:
            cls = obj.cls
            s = obj.setters.get(name)
            if s is None and name not in obj.props and cls is not None:
                s = cls.setters.get(name)
            if s is not None:
                self._accessor(s, obj, [value], "setter")
                return
            if name not in obj.props and (name in obj.getters or (cls is not None and name in cls.getters)):
                raise self.error(f"property '{name}' has a getter but no setter")
            obj.props[name] = value
            return
        if t in (MFunction, NativeFunction, MClass):
            obj.props[name] = value
            return
        raise self.error(f"cannot set property '{name}' of {type_name(obj)}")

    def get_index(self, obj, key):
        if type(obj) is list:
            if type(key) is not float or key != int(key):
                raise self.error(f"array index must be an integer, got {type_name(key)}")
            i = int(key)
            return obj[i] if 0 <= i < len(obj) else None
        if type(obj) is str:
            if type(key) is not float or key != int(key):
                raise self.error("string index must be an integer")
            i = int(key)
            return obj[i] if 0 <= i < len(obj) else None
        if type(key) is str:
            return self.get_member(obj, key)
        if type(key) is float and isinstance(obj, MObject):
            return self.get_member(obj, to_display(key))
        raise self.error(f"cannot index {type_name(obj)} with {type_name(key)}")

    def set_index(self, obj, key, value) -> None:
        if type(obj) is list:
            if type(key) is not float or key != int(key):
                raise self.error("array index must be an integer")
            i = int(key)
            if 0 <= i < len(obj):
                obj[i] = value
            elif i == len(obj):
                obj.append(value)
            else:
                raise self.error(f"array index {i} out of range")
            return
        if type(key) is str:
            self.set_member(obj, key, value)
            return
        if type(key) is float and isinstance(obj, MObject):
            self.set_member(obj, to_display(key), value)
            return
        raise self.error(f"cannot index {type_name(obj)} with {type_name(key)}")


def _apply_of(fn):
    def apply(it: Interpreter, this, args, env):
        this_arg = args[0] if args else None
        arr = args[1] if len(args) > 1 else None
        if arr is None:
            arr = []
        if not isinstance(arr, list):
            raise it.error("apply() expects an array of arguments")
        return it.call(fn, this_arg, list(arr), env)

    return apply


def _lookup_getter(it, obj: MObject, args):
    name = args[0] if args else None
    g = obj.getters.get(name)
    if g is None and obj.cls is not None:
        g = obj.cls.getters.get(name)
    return g


def _lookup_setter(it, obj: MObject, args):
    name = args[0] if args else None
    s = obj.setters.get(name)
    if s is None and obj.cls is not None:
        s = obj.cls.setters.get(name)
    return s


def _define_getter(it, obj: MObject, args):
    name = args[0] if args else None
    fn = args[1] if len(args) > 1 else None
    if not isinstance(name, str) or not isinstance(fn, CALLABLE):
        raise it.error("__defineGetter__ expects a name and a function")
    obj.props.pop(name, None)
    obj.getters[name] = fn


def _define_setter(it, obj: MObject, args):
    name = args[0] if args else None
    fn = args[1] if len(args) > 1 else None
    if not isinstance(name, str) or not isinstance(fn, CALLABLE):
        raise it.error("__defineSetter__ expects a name and a function")
    obj.props.pop(name, None)
    obj.setters[name] = fn


_OBJECT_INTRINSICS = {
    "__lookupGetter__": _lookup_getter,
    "__lookupSetter__": _lookup_setter,
    "__defineGetter__": _define_getter,
    "__defineSetter__": _define_setter,
}
