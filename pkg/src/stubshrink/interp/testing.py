"""Test runner: one fresh interpreter per test module."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Optional

from ..errors import GuardExit, StubshrinkError
from .config import RuntimeConfig
from .package import PackageHandle
from .runtime import Interpreter


@dataclass
class TestResult:
    test: str
    passed: bool
    assertions: list = field(default_factory=list)
    error: Optional[str] = None

    def to_json(self) -> dict:
        return {"assertions": self.assertions, "error": self.error, "passed": self.passed, "test": self.test}


@dataclass
class TestReport:
    perTest: list = field(default_factory=list)
    wallTime: float = 0.0
    sideEffectLog: list = field(default_factory=list)
    output: list = field(default_factory=list)
    expansionEvents: list = field(default_factory=list)
    guardEvents: list = field(default_factory=list)
    guardExit: Optional[str] = None

    @property
    def vector(self) -> list:
        """Pass/fail vector in manifest test order."""
        return [(r.test, r.passed) for r in self.perTest]

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.perTest) and self.guardExit is None

    def first_fetch_bytes(self) -> int:
        return sum(e.bytesLoaded for e in self.expansionEvents if not e.cacheHit)

    def to_json(self) -> dict:
        return {
            "expansionEvents": [e.to_json() for e in self.expansionEvents],
            "guardEvents": [g.to_json() for g in self.guardEvents],
            "guardExit": self.guardExit,
            "output": self.output,
            "perTest": [r.to_json() for r in self.perTest],
            "sideEffectLog": self.sideEffectLog,
            "wallTime": self.wallTime,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)


def run_tests(pkg: PackageHandle, config: Optional[RuntimeConfig] = None, tests: Optional[list] = None) -> TestReport:
    """Run every test module of ``pkg`` in its own interpreter and module cache.

    Assertion failures and runtime errors are recorded per test. A guard exit
    stops the whole suite, like the process exit it models.
    """
    config = config or RuntimeConfig()
    report = TestReport()
    paths = tests if tests is not None else pkg.test_paths
    start = time.perf_counter()
    for path in paths:
        it = Interpreter(pkg, config, label=pkg.rel(path))
        error = None
        try:
            it.load_module(path)
        except GuardExit as e:
            error = str(e)
            report.guardExit = e.name
        except (StubshrinkError, RecursionError) as e:
            error = f"{type(e).__name__}: {e}"
        failures = list(it.assertion_failures)
        report.perTest.append(TestResult(it.label, error is None and not failures, failures, error))
        report.sideEffectLog.extend(it.side_effects)
        report.output.extend(it.output)
        for ev in it.expansions:
            ev.seq = len(report.expansionEvents)
            report.expansionEvents.append(ev)
        for ev in it.guard_events:
            ev.seq = len(report.guardEvents)
            report.guardEvents.append(ev)
        if report.guardExit is not None:
            break
    report.wallTime = time.perf_counter() - start
    return report
