"""Decide what gets replaced by a stub."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..callgraph.model import ReachabilitySet, parse_closure
from ..errors import RevisionMismatch
from ..interp.config import GUARD_MODES
from ..interp.package import PackageHandle
from ..lang import ast as A
from ..lang.printer import function_depths, print_module, print_node
from ..lang.walk import functions_of, walk_region
from .emit import bound_names, emit_file_stub, stub_blocker, stubbed_function


@dataclass
class StubOptions:
    guard: str = "off"
    file_stubs: bool = True
    # drop candidates whose stub is not smaller than what it replaces
    size_rule: bool = True
    # ignore reachability and treat every function as a candidate
    stub_everything: bool = False

    def __post_init__(self):
        if self.guard not in GUARD_MODES:
            raise ValueError(f"guard mode must be one of {GUARD_MODES}")


@dataclass
class StubPlan:
    fileStubs: list = field(default_factory=list)
    functionStubs: list = field(default_factory=list)
    skippedTooSmall: list = field(default_factory=list)
    skippedAnnotated: list = field(default_factory=list)
    skippedUnstubbable: list = field(default_factory=list)
    guardMode: str = "off"
    reasons: dict = field(default_factory=dict)  # skipped key -> why

    def to_json(self) -> dict:
        return {
            "fileStubs": self.fileStubs,
            "functionStubs": self.functionStubs,
            "guardMode": self.guardMode,
            "reasons": dict(sorted(self.reasons.items())),
            "skippedAnnotated": self.skippedAnnotated,
            "skippedTooSmall": self.skippedTooSmall,
            "skippedUnstubbable": self.skippedUnstubbable,
        }


def sized(text: str, depth: int) -> int:
    """Bytes ``text`` (printed at indent 0) occupies when nested ``depth`` levels deep."""
    lines = text.count("\n")
    return len(text.encode("utf-8")) + 2 * depth * max(lines - 1, 0)


def function_sizes(fd: A.FunctionDef, depth: int) -> tuple[int, int]:
    """(original, stub) byte sizes of a function in canonical context."""
    return sized(print_node(fd), depth), sized(print_node(stubbed_function(fd)), depth)


def check_revision(rs: ReachabilitySet, modules: dict) -> None:
    uids = {fd.uid for m in modules.values() for fd in functions_of(m)}
    missing = sorted(rs.reachableFunctions - uids)
    missing_files = sorted(rs.reachableFiles - set(modules))
    if missing or missing_files:
        sample = ", ".join((missing + missing_files)[:3])
        raise RevisionMismatch(f"reachability set does not match the package source (e.g. {sample})")


def plan_module(m: A.Module, rs: ReachabilitySet, opts: StubOptions, plan: StubPlan) -> None:
    reachable = set() if opts.stub_everything else rs.reachableFunctions
    fns = functions_of(m)
    if (
        opts.file_stubs
        and not opts.stub_everything
        and m.file not in rs.reachableFiles
        and not any(fd.uid in reachable for fd in fns)
    ):
        stub, _ = emit_file_stub(m)
        if not opts.size_rule or len(stub.encode("utf-8")) < len(print_module(m).encode("utf-8")):
            plan.fileStubs.append(m.file)
        else:
            plan.skippedTooSmall.append(m.file)
        return

    bound = bound_names(m)
    depths = function_depths(m)

    def consider(fd: A.FunctionDef) -> None:
        if fd.uid not in reachable:
            blocker = stub_blocker(fd, bound)
            if fd.kind == "constructor":
                plan.skippedUnstubbable.append(fd.uid)
                plan.reasons[fd.uid] = "constructor"
            elif fd.stub_ignore:
                plan.skippedAnnotated.append(fd.uid)
            elif blocker is not None:
                plan.skippedUnstubbable.append(fd.uid)
                plan.reasons[fd.uid] = blocker
            else:
                orig, stub = function_sizes(fd, depths.get(fd.uid, 0))
                if opts.size_rule and stub >= orig:
                    plan.skippedTooSmall.append(fd.uid)
                    plan.reasons[fd.uid] = f"stub {stub} bytes >= original {orig} bytes"
                else:
                    plan.functionStubs.append(fd.uid)
                    return  # nested functions travel with the stored text
        for inner in _nested(fd.body):
            consider(inner)

    for fd in _nested(m.items):
        consider(fd)


def _nested(nodes: list):
    return [n for n in walk_region(nodes) if isinstance(n, A.FunctionDef)]


def plan_stubs(
    pkg: PackageHandle, rs: ReachabilitySet, opts: Optional[StubOptions] = None, modules: Optional[dict] = None
) -> StubPlan:
    opts = opts or StubOptions()
    modules = modules if modules is not None else parse_closure(pkg)
    check_revision(rs, modules)
    plan = StubPlan(guardMode=opts.guard)
    for rel in sorted(modules):
        plan_module(modules[rel], rs, opts, plan)
    return plan
