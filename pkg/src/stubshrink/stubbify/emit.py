"""Stub code generation for functions and whole files."""

from __future__ import annotations

import copy
from typing import Optional

from ..errors import UnstubbableError
from ..lang import ast as A
from ..lang.lexer import is_identifier
from ..lang.parser import parse
from ..lang.printer import print_module, print_node, quote
from ..lang.walk import walk, walk_list

STUB_LOCALS = ("toExec", "s")
# names the generated code must be able to reach unshadowed
STUB_GLOBALS = ("stubs", "eval")


def _member_ref(key: str) -> str:
    return f"this.{key}" if is_identifier(key) else f"this[{quote(key)}]"


def stub_body_text(fd: A.FunctionDef) -> str:
    """Statement list that replaces the body of ``fd``."""
    uid = quote(fd.uid)
    fetch = f"let toExec = eval(stubs.getCode({uid}));"
    call = "return toExec.apply(this, arguments);"
    if fd.kind == "constructor":
        raise UnstubbableError(f"{fd.uid}: constructors are never stubbed")
    if fd.kind == "named":
        return f"{fetch}\nstubs.cpFunProps({fd.name}, toExec);\n{fd.name} = toExec;\n{call}"
    if fd.kind == "method" and fd.name is not None:
        ref = _member_ref(fd.name)
        return f"{fetch}\nstubs.cpFunProps({ref}, toExec);\n{ref} = toExec;\n{call}"
    if fd.kind in ("getter", "setter"):
        word = "Getter" if fd.kind == "getter" else "Setter"
        p = quote(fd.name)
        return (
            f"{fetch}\nstubs.cpFunProps(this.__lookup{word}__({p}), toExec);\n"
            f"this.__define{word}__({p}, toExec);\n{call}"
        )
    # anonymous: cache the code, never the function value, so every call
    # re-captures the live enclosing scope
    return (
        f"let s = stubs.getStub({uid});\n"
        f"if (s == null) {{\n  s = stubs.getCode({uid});\n  stubs.setStub({uid}, s);\n}}\n"
        f"let toExec = eval(s);\n{call}"
    )


def stub_body(fd: A.FunctionDef) -> list:
    params = ", ".join(fd.params)
    m = parse(f"function __stub({params}) {{\n{stub_body_text(fd)}\n}}\n", "<stub>")
    return m.items[0].fn.body


def stubbed_function(fd: A.FunctionDef) -> A.FunctionDef:
    """Copy of ``fd`` whose body is the stub."""
    out = copy.copy(fd)
    out.body = stub_body(fd)
    return out


def stored_function_text(fd: A.FunctionDef) -> str:
    """What the code store keeps for a function stub; eval of it yields the function."""
    if fd.kind == "named":
        return print_node(A.FuncDecl(fd)) + f"{fd.name};\n"
    anon = copy.copy(fd)
    anon.kind = "anonymous"
    anon.name = None
    return print_node(A.ExprStmt(A.Func(anon)))


def stub_blocker(fd: A.FunctionDef, bound_in_file: set) -> Optional[str]:
    """Reason the generated stub would not behave like ``fd``, if any."""
    if fd.kind == "constructor":
        return "constructor"
    for name in STUB_GLOBALS:
        if name in bound_in_file:
            return f"'{name}' is rebound in this file"
    if "arguments" in fd.params or (fd.kind == "named" and fd.name in fd.params):
        return "parameter shadows a name the stub relies on"
    for n in walk_list(fd.body):
        if isinstance(n, A.Ident) and n.name in STUB_LOCALS:
            return f"body mentions '{n.name}', a stub-local name"
    return None


def bound_names(m: A.Module) -> set:
    """Every name bound anywhere in a module."""
    out = set()
    for n in walk(m):
        if isinstance(n, A.Let):
            out.add(n.name)
        elif isinstance(n, A.FunctionDef):
            out.update(n.params)
            if n.kind == "named":
                out.add(n.name)
        elif isinstance(n, A.ClassDecl):
            out.add(n.name)
        elif isinstance(n, A.Import):
            if n.default is not None:
                out.add(n.default)
            out.update(local for _, local in n.names)
    return out


# ------------------------------------------------------------- file stubs


def _fresh(base: str, taken: set) -> str:
    name, i = base, 0
    while name in taken:
        i += 1
        name = f"{base}{i}"
    taken.add(name)
    return name


def emit_file_stub(m: A.Module) -> tuple[str, str]:
    """Return ``(stub_text, stored_text)`` for a whole-module stub."""
    path = quote(m.file)
    if m.style != "esm":
        return f"eval(stubs.getCodeForFile({path}));\n", print_module(m)

    taken = bound_names(m) | set(STUB_GLOBALS)
    imports = [s for s in m.items if isinstance(s, A.Import)]
    body: list = []
    exports: list[tuple[str, str]] = []  # (exported name, local expression)
    for s in m.items:
        if isinstance(s, A.Import):
            continue
        if isinstance(s, A.ExportDecl):
            body.append(s.decl)
            name = s.decl.fn.name if isinstance(s.decl, A.FuncDecl) else s.decl.name
            exports.append((name, name))
        elif isinstance(s, A.ExportNamed):
            exports.extend((exported, local) for local, exported in s.specs)
        elif isinstance(s, A.ExportDefault):
            if isinstance(s.expr, A.Ident):
                exports.append(("default", s.expr.name))
            else:
                local = _fresh("__default", taken)
                body.append(A.Let(local, s.expr))
                exports.append(("default", local))
        else:
            body.append(s)
    props = [A.Prop(name, A.Ident(local)) for name, local in exports]
    body.append(A.ExprStmt(A.ObjectLit(props)))
    stored = print_module(body)

    lines = [print_node(i).rstrip("\n") for i in imports]
    obj = _fresh("exportObj", taken)
    lines.append(f"let {obj} = eval(stubs.getCodeForFile({path}));")
    for name, _ in exports:
        if name == "default":
            continue
        fresh = _fresh(f"__{name}" if is_identifier(name) else "__export", taken)
        lines.append(f"let {fresh} = {obj}[{quote(name)}];")
        lines.append(f"export {{ {fresh} as {name} }};")
    if any(name == "default" for name, _ in exports):
        lines.append(f"export default {obj}[\"default\"];")
    stub = "\n".join(lines) + "\n"
    return print_module(parse(stub, m.file)), stored
