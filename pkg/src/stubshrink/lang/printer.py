"""Canonical MiniMod printer.

The canonical text defines every byte size reported by the toolchain, so
the layout here is fixed: two-space indentation, one statement per line,
function bodies always broken over lines.
"""

from __future__ import annotations

from decimal import Decimal

from . import ast as A
from .lexer import DIRECTIVE, is_identifier

_PREC = {"||": 1, "&&": 2, "==": 3, "!=": 3, "<": 4, "<=": 4, ">": 4, ">=": 4, "+": 5, "-": 5, "*": 6, "/": 6}
_UNARY = 7
_POSTFIX = 8
_ATOM = 9


def format_number(v: float) -> str:
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    r = repr(v)
    if "e" in r or "E" in r:
        r = format(Decimal(r), "f")
    return r


def quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'


def key_text(k: str) -> str:
    return k if is_identifier(k) else quote(k)


def _prec(e) -> int:
    if isinstance(e, A.Binary):
        return _PREC[e.op]
    if isinstance(e, A.Unary):
        return _UNARY
    if isinstance(e, A.Num) and e.value < 0:
        return _UNARY
    if isinstance(e, (A.Call, A.Member, A.Index, A.New)):
        return _POSTFIX
    return _ATOM


def _is_new_callee(e) -> bool:
    while isinstance(e, (A.Member, A.Index)):
        e = e.obj
    return isinstance(e, (A.Ident, A.This))


class Printer:
    def __init__(self):
        self.lines: list[str] = []
        self.cur = ""
        self.indent = 0
        self.flagged: set[int] = set()
        self.depths: dict[str, int] = {}  # uid -> indentation level of its first line

    def w(self, s: str) -> None:
        self.cur += s

    def nl(self) -> None:
        self.lines.append(self.cur)
        self.cur = "  " * self.indent

    def result(self) -> str:
        lines = self.lines + ([self.cur] if self.cur.strip() else [])
        out = []
        for i, line in enumerate(lines):
            if i in self.flagged:
                pad = line[: len(line) - len(line.lstrip(" "))]
                out.append(pad + DIRECTIVE)
            out.append(line)
        return "".join(l + "\n" for l in out)

    # ---------------------------------------------------------- statements

    def stmts(self, items: list) -> None:
        for i, s in enumerate(items):
            if i:
                self.nl()
            self.stmt(s)

    def block(self, body: list) -> None:
        self.w("{")
        self.indent += 1
        for s in body:
            self.nl()
            self.stmt(s)
        self.indent -= 1
        self.nl()
        self.w("}")

    def stmt(self, s) -> None:
        if isinstance(s, A.Let):
            self.w(f"let {s.name} = ")
            self.expr(s.init)
            self.w(";")
        elif isinstance(s, A.Assign):
            self.expr(s.target)
            self.w(" = ")
            self.expr(s.value)
            self.w(";")
        elif isinstance(s, A.ExprStmt):
            self.expr(s.expr)
            self.w(";")
        elif isinstance(s, A.Return):
            if s.value is None:
                self.w("return;")
            else:
                self.w("return ")
                self.expr(s.value)
                self.w(";")
        elif isinstance(s, A.If):
            self.w("if (")
            self.expr(s.cond)
            self.w(") ")
            self.block(s.then)
            if s.orelse is not None:
                self.w(" else ")
                if len(s.orelse) == 1 and isinstance(s.orelse[0], A.If):
                    self.stmt(s.orelse[0])
                else:
                    self.block(s.orelse)
        elif isinstance(s, A.While):
            self.w("while (")
            self.expr(s.cond)
            self.w(") ")
            self.block(s.body)
        elif isinstance(s, A.FuncDecl):
            self.function(s.fn)
        elif isinstance(s, A.ClassDecl):
            self.class_decl(s)
        elif isinstance(s, A.Import):
            if s.default is not None:
                self.w(f"import {s.default} from {quote(s.source)};")
            else:
                specs = ", ".join(key_text(i) if i == l else f"{key_text(i)} as {l}" for i, l in s.names)
                self.w(f"import {{ {specs} }} from {quote(s.source)};" if specs else f"import {{}} from {quote(s.source)};")
        elif isinstance(s, A.ExportNamed):
            specs = ", ".join(l if l == e else f"{l} as {key_text(e)}" for l, e in s.specs)
            self.w(f"export {{ {specs} }};" if specs else "export {};")
        elif isinstance(s, A.ExportDecl):
            self.w("export ")
            self.stmt(s.decl)
        elif isinstance(s, A.ExportDefault):
            self.w("export default ")
            self.expr(s.expr)
            self.w(";")
        else:
            raise TypeError(f"cannot print statement {type(s).__name__}")

    def class_decl(self, c: A.ClassDecl) -> None:
        self.w(f"class {c.name} {{")
        self.indent += 1
        for m in c.members:
            self.nl()
            self.function(m)
        self.indent -= 1
        self.nl()
        self.w("}")

    def function(self, fn: A.FunctionDef) -> None:
        self.depths[fn.uid] = self.indent
        if fn.stub_ignore:
            self.flagged.add(len(self.lines))
        params = ", ".join(fn.params)
        if fn.kind == "named":
            self.w(f"function {fn.name}({params}) ")
        elif fn.kind == "anonymous":
            self.w(f"function({params}) ")
        elif fn.kind == "method" and fn.name is not None:
            self.w(f"{key_text(fn.name)}({params}) ")
        elif fn.kind == "constructor":
            self.w(f"constructor({params}) ")
        elif fn.kind == "getter":
            self.w(f"get {key_text(fn.name)}({params}) ")
        elif fn.kind == "setter":
            self.w(f"set {key_text(fn.name)}({params}) ")
        else:
            self.w(f"function({params}) ")
        self.block(fn.body)

    def func_expr(self, fn: A.FunctionDef) -> None:
        self.depths[fn.uid] = self.indent
        if fn.stub_ignore:
            self.flagged.add(len(self.lines))
        self.w(f"function({', '.join(fn.params)}) ")
        self.block(fn.body)

    # --------------------------------------------------------- expressions

    def sub(self, e, min_prec: int) -> None:
        if _prec(e) < min_prec:
            self.w("(")
            self.expr(e)
            self.w(")")
        else:
            self.expr(e)

    def callee(self, e) -> None:
        if isinstance(e, (A.Func, A.ObjectLit, A.New)) or _prec(e) < _POSTFIX:
            self.w("(")
            self.expr(e)
            self.w(")")
        else:
            self.expr(e)

    def args(self, args: list) -> None:
        self.w("(")
        for i, a in enumerate(args):
            if i:
                self.w(", ")
            self.expr(a)
        self.w(")")

    def expr(self, e) -> None:
        if isinstance(e, A.Num):
            if e.value < 0:
                self.w("-" + format_number(-e.value))
            else:
                self.w(format_number(e.value))
        elif isinstance(e, A.Str):
            self.w(quote(e.value))
        elif isinstance(e, A.Bool):
            self.w("true" if e.value else "false")
        elif isinstance(e, A.Null):
            self.w("null")
        elif isinstance(e, A.Ident):
            self.w(e.name)
        elif isinstance(e, A.This):
            self.w("this")
        elif isinstance(e, A.ArrayLit):
            self.w("[")
            for i, item in enumerate(e.items):
                if i:
                    self.w(", ")
                self.expr(item)
            self.w("]")
        elif isinstance(e, A.ObjectLit):
            self.object_lit(e)
        elif isinstance(e, A.Func):
            self.func_expr(e.fn)
        elif isinstance(e, A.Call):
            self.callee(e.callee)
            self.args(e.args)
        elif isinstance(e, A.Member):
            self.callee(e.obj)
            self.w("." + e.name)
        elif isinstance(e, A.Index):
            self.callee(e.obj)
            self.w("[")
            self.expr(e.key)
            self.w("]")
        elif isinstance(e, A.New):
            self.w("new ")
            if _is_new_callee(e.callee):
                self.expr(e.callee)
            else:
                self.w("(")
                self.expr(e.callee)
                self.w(")")
            self.args(e.args)
        elif isinstance(e, A.Binary):
            p = _PREC[e.op]
            self.sub(e.left, p)
            self.w(f" {e.op} ")
            self.sub(e.right, p + 1)
        elif isinstance(e, A.Unary):
            self.w(e.op)
            self.sub(e.operand, _UNARY)
        else:
            raise TypeError(f"cannot print expression {type(e).__name__}")

    def object_lit(self, o: A.ObjectLit) -> None:
        if not o.props:
            self.w("{}")
            return
        multiline = any(isinstance(p, A.Accessor) or isinstance(p.value, A.Func) for p in o.props)
        if not multiline:
            self.w("{")
            for i, p in enumerate(o.props):
                if i:
                    self.w(", ")
                self.w(key_text(p.key) + ": ")
                self.expr(p.value)
            self.w("}")
            return
        self.w("{")
        self.indent += 1
        for i, p in enumerate(o.props):
            self.nl()
            if isinstance(p, A.Accessor):
                self.function(p.fn)
            else:
                self.w(key_text(p.key) + ": ")
                self.expr(p.value)
            if i < len(o.props) - 1:
                self.w(",")
        self.indent -= 1
        self.nl()
        self.w("}")


def print_module(m: A.Module | list) -> str:
    p = Printer()
    p.stmts(m.items if isinstance(m, A.Module) else m)
    return p.result()


def function_depths(m: A.Module | list) -> dict[str, int]:
    """Indentation level at which each function starts in the canonical text."""
    p = Printer()
    p.stmts(m.items if isinstance(m, A.Module) else m)
    return p.depths


def print_node(node) -> str:
    """Print a single statement, expression or function at indentation 0."""
    p = Printer()
    if isinstance(node, A.FunctionDef):
        p.function(node)
    elif isinstance(node, (A.Func,)) or not hasattr(node, "__dataclass_fields__") or _is_expr(node):
        p.expr(node)
    else:
        p.stmt(node)
    return p.result()


def _is_expr(n) -> bool:
    return isinstance(
        n,
        (A.Num, A.Str, A.Bool, A.Null, A.Ident, A.This, A.ArrayLit, A.ObjectLit, A.Func, A.Call, A.Member, A.Index, A.New, A.Binary, A.Unary),
    )
