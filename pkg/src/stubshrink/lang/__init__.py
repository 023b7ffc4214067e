"""MiniMod language: syntax tree, parser, canonical printer, function enumeration."""

from . import ast
from .parser import classify_style, parse, parse_cached
from .printer import print_module, print_node
from .walk import functions_of, walk, walk_list, walk_region

__all__ = [
    "ast",
    "classify_style",
    "functions_of",
    "parse",
    "parse_cached",
    "print_module",
    "print_node",
    "walk",
    "walk_list",
    "walk_region",
]
