"""Recursive-descent parser for MiniMod."""

from __future__ import annotations

from ..errors import ParseError, StyleMixError
from . import ast as A
from .lexer import Token, tokenize
from .walk import walk_list

_BINARY_LEVELS = [
    ("||",),
    ("&&",),
    ("==", "!="),
    ("<", "<=", ">", ">="),
    ("+", "-"),
    ("*", "/"),
]


class Parser:
    def __init__(self, text: str, path: str):
        self.text = text
        self.path = path
        self.tokens, self.directives = tokenize(text, path)
        self.pos = 0
        self._byte_prefix: list[int] | None = None

    # -------------------------------------------------------------- helpers

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.tokens[min(self.pos + k, len(self.tokens) - 1)]

    def error(self, msg: str, tok: Token | None = None) -> ParseError:
        t = tok or self.tok
        return ParseError(msg, self.path, t.line, t.col)

    def at(self, value: str) -> bool:
        t = self.tok
        return t.kind in ("punct", "keyword") and t.value == value

    def accept(self, value: str) -> bool:
        if self.at(value):
            self.pos += 1
            return True
        return False

    def expect(self, value: str) -> Token:
        if not self.at(value):
            shown = self.tok.value if self.tok.kind != "eof" else "end of input"
            raise self.error(f"expected {value!r} but found {shown!r}")
        t = self.tok
        self.pos += 1
        return t

    def expect_ident(self) -> str:
        t = self.tok
        if t.kind != "ident":
            raise self.error(f"expected identifier but found {t.value!r}")
        self.pos += 1
        return t.value

    def property_name(self) -> str:
        """Identifier, keyword or string literal used as a property key."""
        t = self.tok
        if t.kind in ("ident", "keyword", "str"):
            self.pos += 1
            return t.value
        raise self.error(f"expected property name but found {t.value!r}")

    def span(self, start: Token) -> A.Span:
        end = self.tokens[self.pos - 1] if self.pos > 0 else start
        if end.end_offset < start.offset:
            end = start
        return A.Span(
            self.path,
            start.line,
            start.col,
            end.end_line,
            end.end_col,
            len(self.text[start.offset:end.end_offset].encode("utf-8")),
            start.offset,
            end.end_offset,
        )

    def finish(self, node, start: Token):
        node.span = self.span(start)
        return node

    # ------------------------------------------------------------- modules

    def parse_module(self) -> A.Module:
        start = self.tok
        items = []
        while self.tok.kind != "eof":
            items.append(self.statement(top=True))
        m = A.Module(self.path, items, classify_style(items, self.path))
        return self.finish(m, start) if items else self._empty_module(m)

    def _empty_module(self, m: A.Module) -> A.Module:
        m.span = A.Span(self.path, 1, 0, 1, 0, 0, 0, 0)
        return m

    def block(self) -> list:
        self.expect("{")
        body = []
        while not self.at("}"):
            if self.tok.kind == "eof":
                raise self.error("unterminated block")
            body.append(self.statement(top=False))
        self.expect("}")
        return body

    # ---------------------------------------------------------- statements

    def statement(self, top: bool):
        t = self.tok
        if t.kind == "keyword":
            v = t.value
            if v == "let":
                self.pos += 1
                name = self.expect_ident()
                self.expect("=")
                init = self.expression()
                self.expect(";")
                return self.finish(A.Let(name, init), t)
            if v == "return":
                self.pos += 1
                value = None if self.at(";") else self.expression()
                self.expect(";")
                return self.finish(A.Return(value), t)
            if v == "if":
                return self.if_statement()
            if v == "while":
                self.pos += 1
                self.expect("(")
                cond = self.expression()
                self.expect(")")
                body = self.block()
                return self.finish(A.While(cond, body), t)
            if v == "function" and self.peek().kind == "ident":
                fn = self.function("named")
                return self.finish(A.FuncDecl(fn), t)
            if v == "class":
                return self.class_decl()
            if v in ("import", "export"):
                if not top:
                    raise self.error(f"'{v}' is only allowed at module top level")
                return self.import_decl() if v == "import" else self.export_decl()
        expr = self.expression()
        if self.accept("="):
            if not isinstance(expr, (A.Ident, A.Member, A.Index)):
                raise self.error("invalid assignment target", t)
            value = self.expression()
            self.expect(";")
            return self.finish(A.Assign(expr, value), t)
        self.expect(";")
        return self.finish(A.ExprStmt(expr), t)

    def if_statement(self):
        t = self.expect("if")
        self.expect("(")
        cond = self.expression()
        self.expect(")")
        then = self.block()
        orelse = None
        if self.accept("else"):
            orelse = [self.if_statement()] if self.at("if") else self.block()
        return self.finish(A.If(cond, then, orelse), t)

    def class_decl(self):
        t = self.expect("class")
        name = self.expect_ident()
        self.expect("{")
        members = []
        while not self.accept("}"):
            if self.tok.kind == "eof":
                raise self.error("unterminated class body")
            members.append(self.class_member())
        return self.finish(A.ClassDecl(name, members), t)

    def class_member(self) -> A.FunctionDef:
        t = self.tok
        if t.kind == "ident" and t.value in ("get", "set") and self.peek().value != "(":
            return self.accessor(t.value)
        if t.kind == "ident" and t.value == "constructor" and self.peek().value == "(":
            self.pos += 1
            return self.function_rest("constructor", "constructor", t)
        name = self.property_name()
        return self.function_rest("method", name, t)

    def accessor(self, which: str) -> A.FunctionDef:
        t = self.tok
        self.pos += 1
        name = self.property_name()
        fn = self.function_rest("getter" if which == "get" else "setter", name, t)
        want = 0 if which == "get" else 1
        if len(fn.params) != want:
            raise self.error(f"{which}ter '{name}' must take {want} parameter(s)", t)
        return fn

    def import_decl(self):
        t = self.expect("import")
        names: list = []
        default = None
        if self.tok.kind == "ident":
            default = self.expect_ident()
        else:
            self.expect("{")
            while not self.accept("}"):
                imported = self.property_name()
                local = imported
                if self.accept("as"):
                    local = self.expect_ident()
                names.append((imported, local))
                if not self.at("}"):
                    self.expect(",")
        self.expect("from")
        src = self.tok
        if src.kind != "str":
            raise self.error("import specifier must be a string literal")
        self.pos += 1
        self.expect(";")
        return self.finish(A.Import(src.value, names, default), t)

    def export_decl(self):
        t = self.expect("export")
        if self.accept("default"):
            expr = self.expression()
            self.expect(";")
            return self.finish(A.ExportDefault(expr), t)
        if self.at("function"):
            ft = self.tok
            fn = self.function("named")
            return self.finish(A.ExportDecl(self.finish(A.FuncDecl(fn), ft)), t)
        if self.at("class"):
            return self.finish(A.ExportDecl(self.class_decl()), t)
        self.expect("{")
        specs = []
        while not self.accept("}"):
            local = self.expect_ident()
            exported = local
            if self.accept("as"):
                exported = self.property_name()
            specs.append((local, exported))
            if not self.at("}"):
                self.expect(",")
        self.expect(";")
        return self.finish(A.ExportNamed(specs), t)

    # ----------------------------------------------------------- functions

    def function(self, kind: str) -> A.FunctionDef:
        t = self.expect("function")
        name = self.expect_ident() if kind == "named" else None
        return self.function_rest(kind, name, t)

    def function_rest(self, kind: str, name, start: Token) -> A.FunctionDef:
        self.expect("(")
        params = []
        while not self.accept(")"):
            params.append(self.expect_ident())
            if not self.at(")"):
                self.expect(",")
        if len(set(params)) != len(params):
            raise self.error("duplicate parameter name", start)
        body = self.block()
        annotations = frozenset({"stubIgnore"}) if start.line - 1 in self.directives else frozenset()
        fn = A.FunctionDef(kind, name, params, body, annotations)
        self.finish(fn, start)
        fn.uid = f"{self.path}:{start.line}:{start.col}"
        return fn

    # --------------------------------------------------------- expressions

    def expression(self, level: int = 0):
        if level == len(_BINARY_LEVELS):
            return self.unary()
        start = self.tok
        left = self.expression(level + 1)
        ops = _BINARY_LEVELS[level]
        while self.tok.kind == "punct" and self.tok.value in ops:
            op = self.tok.value
            self.pos += 1
            right = self.expression(level + 1)
            left = self.finish(A.Binary(op, left, right), start)
        return left

    def unary(self):
        t = self.tok
        if t.kind == "punct" and t.value in ("!", "-"):
            self.pos += 1
            operand = self.unary()
            return self.finish(A.Unary(t.value, operand), t)
        return self.postfix(self.primary(), t)

    def postfix(self, expr, start: Token, allow_call: bool = True):
        while True:
            if allow_call and self.at("("):
                args = self.arguments()
                expr = self.finish(A.Call(expr, args), start)
            elif self.accept("."):
                name = self.property_name_after_dot()
                expr = self.finish(A.Member(expr, name), start)
            elif self.accept("["):
                key = self.expression()
                self.expect("]")
                expr = self.finish(A.Index(expr, key), start)
            else:
                return expr

    def property_name_after_dot(self) -> str:
        t = self.tok
        if t.kind in ("ident", "keyword"):
            self.pos += 1
            return t.value
        raise self.error(f"expected property name after '.' but found {t.value!r}")

    def arguments(self) -> list:
        self.expect("(")
        args = []
        while not self.accept(")"):
            args.append(self.expression())
            if not self.at(")"):
                self.expect(",")
        return args

    def primary(self):
        t = self.tok
        k, v = t.kind, t.value
        if k == "num":
            self.pos += 1
            return self.finish(A.Num(v), t)
        if k == "str":
            self.pos += 1
            return self.finish(A.Str(v), t)
        if k == "ident":
            self.pos += 1
            return self.finish(A.Ident(v), t)
        if k == "keyword":
            if v in ("true", "false"):
                self.pos += 1
                return self.finish(A.Bool(v == "true"), t)
            if v == "null":
                self.pos += 1
                return self.finish(A.Null(), t)
            if v == "this":
                self.pos += 1
                return self.finish(A.This(), t)
            if v == "function":
                fn = self.function("anonymous")
                return self.finish(A.Func(fn), t)
            if v == "new":
                self.pos += 1
                ct = self.tok
                callee = self.postfix(self.primary(), ct, allow_call=False)
                args = self.arguments()
                return self.finish(A.New(callee, args), t)
        if k == "punct":
            if v == "(":
                self.pos += 1
                e = self.expression()
                self.expect(")")
                return e
            if v == "[":
                self.pos += 1
                items = []
                while not self.accept("]"):
                    items.append(self.expression())
                    if not self.at("]"):
                        self.expect(",")
                return self.finish(A.ArrayLit(items), t)
            if v == "{":
                return self.object_literal()
        shown = v if k != "eof" else "end of input"
        raise self.error(f"unexpected token {shown!r}")

    def object_literal(self):
        t = self.expect("{")
        props = []
        while not self.accept("}"):
            pt = self.tok
            if pt.kind == "ident" and pt.value in ("get", "set") and self.peek().value not in (":", ",", "}"):
                fn = self.accessor(pt.value)
                props.append(self.finish(A.Accessor(fn), pt))
            else:
                key = self.property_name()
                self.expect(":")
                value = self.expression()
                if isinstance(value, A.Func):
                    value.fn.kind = "method"
                    value.fn.name = key
                props.append(self.finish(A.Prop(key, value), pt))
            if not self.at("}"):
                self.expect(",")
        return self.finish(A.ObjectLit(props), t)


# ------------------------------------------------------------- module style


def _is_cjs_marker(n) -> bool:
    if isinstance(n, A.Ident):
        return n.name in ("require", "exports")
    if isinstance(n, A.Member):
        return isinstance(n.obj, A.Ident) and n.obj.name == "module" and n.name == "exports"
    return False


def classify_style(items: list, path: str = "<input>") -> str:
    esm = next((i for i in items if isinstance(i, A.MODULE_ITEMS)), None)
    cjs = next((n for n in walk_list(items) if _is_cjs_marker(n)), None)
    if esm is not None and cjs is not None:
        line = cjs.span.start_line if cjs.span else 0
        col = cjs.span.start_col if cjs.span else 0
        raise StyleMixError("module mixes import/export with require/module.exports", path, line, col)
    if esm is not None:
        return "esm"
    if cjs is not None:
        return "cjs"
    return "plain"


_cache: dict[tuple[str, str], A.Module] = {}


def parse(text: str, path: str = "<input>") -> A.Module:
    return Parser(text, path).parse_module()


def parse_cached(text: str, path: str) -> A.Module:
    """Parse with memoization; callers must treat the result as immutable."""
    key = (path, text)
    m = _cache.get(key)
    if m is None:
        if len(_cache) > 4096:
            _cache.clear()
        m = _cache[key] = parse(text, path)
    return m
