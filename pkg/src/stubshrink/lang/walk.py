"""Generic traversal over MiniMod syntax trees."""

from __future__ import annotations

from dataclasses import fields
from typing import Iterator

from . import ast as A


def children(node: A.Node) -> Iterator[A.Node]:
    for f in fields(node):
        if f.name in ("span", "uid", "origin"):
            continue
        value = getattr(node, f.name)
        if isinstance(value, A.Node):
            yield value
        elif isinstance(value, list):
            for item in value:
                if isinstance(item, A.Node):
                    yield item


def walk(node: A.Node) -> Iterator[A.Node]:
    """Pre-order traversal, i.e. source order for well-formed trees."""
    stack = [node]
    while stack:
        n = stack.pop()
        yield n
        stack.extend(reversed(list(children(n))))


def walk_list(nodes: list) -> Iterator[A.Node]:
    for n in nodes:
        yield from walk(n)


def functions_of(m: A.Module | list) -> list[A.FunctionDef]:
    """Every function in source order, nested ones and class/object members included."""
    nodes = m.items if isinstance(m, A.Module) else m
    return [n for n in walk_list(nodes) if isinstance(n, A.FunctionDef)]


def walk_region(nodes: list) -> Iterator[A.Node]:
    """Like walk, but does not descend into function bodies.

    FunctionDef nodes themselves are yielded so callers can see them.
    """
    stack = list(reversed(nodes))
    while stack:
        n = stack.pop()
        yield n
        if isinstance(n, A.FunctionDef):
            continue
        stack.extend(reversed(list(children(n))))
