"""Runtime values.

Numbers are Python floats, strings are str, booleans bool, null is None and
arrays are Python lists. Everything else is one of the classes below.
"""

from __future__ import annotations

from typing import Callable, Optional

from ..lang import ast as A
from ..lang.printer import format_number


class MObject:
    __slots__ = ("props", "getters", "setters", "cls")

    def __init__(self, props: Optional[dict] = None, cls: "MClass | None" = None):
        self.props = props if props is not None else {}
        self.getters: dict = {}
        self.setters: dict = {}
        self.cls = cls


class MFunction:
    """A closure: definition plus captured environment plus own properties."""

    __slots__ = ("defn", "env", "props")

    def __init__(self, defn: A.FunctionDef, env):
        self.defn = defn
        self.env = env
        self.props: dict = {}

    @property
    def name(self) -> str:
        return self.defn.name or "<anonymous>"


class NativeFunction:
    """Builtin implemented in Python.

    ``fn(interp, this, args, env)``; ``env`` is the caller's lexical scope and
    only matters for ``eval``.
    """

    __slots__ = ("name", "fn", "props", "target")

    def __init__(self, name: str, fn: Callable, target=None):
        self.name = name
        self.fn = fn
        self.props: dict = {}
        # for bound `f.apply`, the function being applied
        self.target = target


class MClass:
    __slots__ = ("name", "ctor", "methods", "getters", "setters", "props", "env")

    def __init__(self, name: str, env):
        self.name = name
        self.env = env
        self.ctor: Optional[MFunction] = None
        self.methods: dict = {}
        self.getters: dict = {}
        self.setters: dict = {}
        self.props: dict = {}


CALLABLE = (MFunction, NativeFunction)


def type_name(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "boolean"
    if isinstance(v, float):
        return "number"
    if isinstance(v, str):
        return "string"
    if isinstance(v, list):
        return "array"
    if isinstance(v, MObject):
        return "object"
    if isinstance(v, CALLABLE):
        return "function"
    if isinstance(v, MClass):
        return "class"
    return type(v).__name__


def truthy(v) -> bool:
    if v is None or v is False:
        return False
    if isinstance(v, float):
        return v != 0.0
    if isinstance(v, str):
        return v != ""
    return True


def equals(a, b) -> bool:
    if a is b:
        return True
    # bool is an int subclass in Python; keep true != 1
    if isinstance(a, bool) or isinstance(b, bool):
        return isinstance(a, bool) and isinstance(b, bool) and a == b
    if isinstance(a, float) and isinstance(b, float):
        return a == b
    if isinstance(a, str) and isinstance(b, str):
        return a == b
    return False


def to_display(v, depth: int = 0) -> str:
    if v is None:
        return "null"
    if v is True:
        return "true"
    if v is False:
        return "false"
    if isinstance(v, float):
        if v != v:
            return "NaN"
        if v in (float("inf"), float("-inf")):
            return "Infinity" if v > 0 else "-Infinity"
        if v < 0:
            return "-" + format_number(-v)
        return format_number(v)
    if isinstance(v, str):
        return v if depth == 0 else '"' + v + '"'
    if depth > 3:
        return "..."
    if isinstance(v, list):
        return "[" + ", ".join(to_display(x, depth + 1) for x in v) + "]"
    if isinstance(v, MObject):
        parts = [f"{k}: {to_display(x, depth + 1)}" for k, x in v.props.items()]
        return "{" + ", ".join(parts) + "}"
    if isinstance(v, MFunction):
        return f"<function {v.name}>"
    if isinstance(v, NativeFunction):
        return f"<builtin {v.name}>"
    if isinstance(v, MClass):
        return f"<class {v.name}>"
    return repr(v)
