"""MiniMod syntax tree.

Structural equality ignores spans and uids, so ``parse(print(m)) == m``
is the round-trip check.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union


@dataclass(frozen=True)
class Span:
    file: str
    start_line: int  # 1-based
    start_col: int  # 0-based
    end_line: int
    end_col: int  # exclusive
    byte_len: int
    start_offset: int = field(default=0, compare=False)
    end_offset: int = field(default=0, compare=False)

    def contains(self, other: "Span") -> bool:
        return (self.start_line, self.start_col) <= (other.start_line, other.start_col) and (
            other.end_line,
            other.end_col,
        ) <= (self.end_line, self.end_col)

    def to_json(self) -> dict:
        return {
            "startLine": self.start_line,
            "startCol": self.start_col,
            "endLine": self.end_line,
            "endCol": self.end_col,
        }


def _span():
    return field(default=None, compare=False, repr=False)


class Node:
    span: Optional[Span]


# ---------------------------------------------------------------- expressions


@dataclass(eq=True)
class Num(Node):
    value: float
    span: Optional[Span] = _span()


@dataclass(eq=True)
class Str(Node):
    value: str
    span: Optional[Span] = _span()


@dataclass(eq=True)
class Bool(Node):
    value: bool
    span: Optional[Span] = _span()


@dataclass(eq=True)
class Null(Node):
    span: Optional[Span] = _span()


@dataclass(eq=True)
class Ident(Node):
    name: str
    span: Optional[Span] = _span()


@dataclass(eq=True)
class This(Node):
    span: Optional[Span] = _span()


@dataclass(eq=True)
class ArrayLit(Node):
    items: list
    span: Optional[Span] = _span()


@dataclass(eq=True)
class Prop(Node):
    """``key: value`` inside an object literal."""

    key: str
    value: "Expr"
    span: Optional[Span] = _span()


@dataclass(eq=True)
class Accessor(Node):
    """``get key() {...}`` / ``set key(v) {...}`` inside an object literal."""

    fn: "FunctionDef"
    span: Optional[Span] = _span()


@dataclass(eq=True)
class ObjectLit(Node):
    props: list  # of Prop | Accessor
    span: Optional[Span] = _span()


@dataclass(eq=True)
class Func(Node):
    fn: "FunctionDef"
    span: Optional[Span] = _span()


@dataclass(eq=True)
class Call(Node):
    callee: "Expr"
    args: list
    span: Optional[Span] = _span()


@dataclass(eq=True)
class Member(Node):
    obj: "Expr"
    name: str
    span: Optional[Span] = _span()


@dataclass(eq=True)
class Index(Node):
    obj: "Expr"
    key: "Expr"
    span: Optional[Span] = _span()


@dataclass(eq=True)
class New(Node):
    callee: "Expr"
    args: list
    span: Optional[Span] = _span()


@dataclass(eq=True)
class Binary(Node):
    op: str
    left: "Expr"
    right: "Expr"
    span: Optional[Span] = _span()


@dataclass(eq=True)
class Unary(Node):
    op: str
    operand: "Expr"
    span: Optional[Span] = _span()


Expr = Union[
    Num, Str, Bool, Null, Ident, This, ArrayLit, ObjectLit, Func, Call, Member, Index, New, Binary, Unary
]


# ------------------------------------------------------------------ functions

FUNCTION_KINDS = ("named", "anonymous", "method", "getter", "setter", "constructor")


@dataclass(eq=True)
class FunctionDef(Node):
    kind: str
    name: Optional[str]
    params: list
    body: list
    annotations: frozenset = frozenset()
    span: Optional[Span] = _span()
    uid: str = field(default="", compare=False)
    # uid of the function this one was copied from (bundler output only)
    origin: Optional[str] = field(default=None, compare=False, repr=False)

    @property
    def stub_ignore(self) -> bool:
        return "stubIgnore" in self.annotations


# ----------------------------------------------------------------- statements


@dataclass(eq=True)
class Let(Node):
    name: str
    init: "Expr"
    span: Optional[Span] = _span()


@dataclass(eq=True)
class Assign(Node):
    target: "Expr"  # Ident | Member | Index
    value: "Expr"
    span: Optional[Span] = _span()


@dataclass(eq=True)
class ExprStmt(Node):
    expr: "Expr"
    span: Optional[Span] = _span()


@dataclass(eq=True)
class Return(Node):
    value: Optional["Expr"]
    span: Optional[Span] = _span()


@dataclass(eq=True)
class If(Node):
    cond: "Expr"
    then: list
    orelse: Optional[list]
    span: Optional[Span] = _span()


@dataclass(eq=True)
class While(Node):
    cond: "Expr"
    body: list
    span: Optional[Span] = _span()


@dataclass(eq=True)
class FuncDecl(Node):
    fn: FunctionDef
    span: Optional[Span] = _span()


@dataclass(eq=True)
class ClassDecl(Node):
    name: str
    members: list  # FunctionDef with kind constructor/method/getter/setter
    span: Optional[Span] = _span()

    @property
    def constructor(self) -> Optional[FunctionDef]:
        for m in self.members:
            if m.kind == "constructor":
                return m
        return None


@dataclass(eq=True)
class Import(Node):
    """``import { a, b as c } from "s";`` or ``import d from "s";``"""

    source: str
    names: list  # (imported, local) pairs
    default: Optional[str] = None
    span: Optional[Span] = _span()


@dataclass(eq=True)
class ExportNamed(Node):
    specs: list  # (local, exported) pairs
    span: Optional[Span] = _span()


@dataclass(eq=True)
class ExportDecl(Node):
    decl: Union[FuncDecl, ClassDecl]
    span: Optional[Span] = _span()


@dataclass(eq=True)
class ExportDefault(Node):
    expr: "Expr"
    span: Optional[Span] = _span()


Stmt = Union[Let, Assign, ExprStmt, Return, If, While, FuncDecl, ClassDecl, Import, ExportNamed, ExportDecl, ExportDefault]

MODULE_ITEMS = (Import, ExportNamed, ExportDecl, ExportDefault)


@dataclass(eq=True)
class Module(Node):
    file: str
    items: list
    style: str = "plain"  # esm | cjs | plain
    span: Optional[Span] = _span()
