"""Reachability observed by running the tests with coverage hooks attached."""

from __future__ import annotations

import logging
from typing import Optional

from ..interp.config import Hooks, RuntimeConfig
from ..interp.package import PackageHandle
from ..interp.testing import TestReport, run_tests
from ..lang.walk import functions_of
from .model import ReachabilitySet, parse_closure

log = logging.getLogger(__name__)


def dynamic_reachability(
    pkg: PackageHandle, tests: Optional[list] = None, report_out: Optional[list] = None
) -> ReachabilitySet:
    entered: set[str] = set()
    executed: set[str] = set()
    hooks = Hooks(on_function_enter=entered.add, on_module_exec=executed.add)
    report: TestReport = run_tests(pkg, RuntimeConfig(hooks=hooks), tests)
    if report_out is not None:
        report_out.append(report)
    warnings = []
    for r in report.perTest:
        if not r.passed:
            msg = f"test {r.test} fails on the original package; reachability may be incomplete"
            warnings.append(msg)
            log.warning("%s", msg)
    modules = parse_closure(pkg)
    uids = {fd.uid for m in modules.values() for fd in functions_of(m)}
    entries = tests if tests is not None else pkg.test_paths
    return ReachabilitySet(
        "dynamic",
        entered & uids,
        executed & set(modules),
        [pkg.rel(p) for p in entries],
        warnings,
    )
