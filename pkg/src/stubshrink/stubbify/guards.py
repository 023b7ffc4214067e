"""Guard transform for stored code.

Every call is routed through an interpreter intrinsic that compares the
callee *value* against the dangerous builtins, so aliases do not help.
"""

from __future__ import annotations

import copy
from dataclasses import fields

from ..interp.config import GuardPolicy
from ..lang import ast as A
from ..lang.parser import parse
from ..lang.printer import print_module


def _rewrite(node):
    if isinstance(node, list):
        return [_rewrite(n) for n in node]
    if not isinstance(node, A.Node):
        return node
    node = copy.copy(node)
    for f in fields(node):
        if f.name in ("span", "uid", "origin"):
            continue
        value = getattr(node, f.name)
        if isinstance(value, (A.Node, list)):
            setattr(node, f.name, _rewrite(value))
    if isinstance(node, A.Call):
        callee = node.callee
        if isinstance(callee, A.Member):
            return A.Call(A.Ident("__guardCall"), [callee.obj, A.Str(callee.name), A.ArrayLit(node.args)])
        if isinstance(callee, A.Index):
            return A.Call(A.Ident("__guardCall"), [callee.obj, callee.key, A.ArrayLit(node.args)])
        return A.Call(A.Call(A.Ident("__guardCheck"), [callee]), node.args)
    return node


def guard_statements(stmts: list) -> list:
    return _rewrite(stmts)


def apply_guards(stored_text: str, policy: GuardPolicy | None = None) -> str:
    """Rewrite every call in ``stored_text``; the policy only matters at run time."""
    m = parse(stored_text, "<stored>")
    return print_module(guard_statements(m.items))
