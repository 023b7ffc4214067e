"""Client runs against original or stubbified subjects, and the benchmark."""

from __future__ import annotations

import json
import os
import shutil
import statistics
from dataclasses import dataclass, field
from typing import Optional

from ..interp.config import RuntimeConfig
from ..interp.package import MANIFEST, load_package, posix_rel, read_manifest
from ..interp.testing import TestReport, run_tests


def discover_clients(subject_root: str) -> list[str]:
    """Nested packages that depend on the subject through a relative path."""
    subject_root = os.path.abspath(subject_root)
    out = []
    for dirpath, dirnames, filenames in os.walk(subject_root):
        dirnames.sort()
        if dirpath == subject_root or MANIFEST not in filenames:
            continue
        m = read_manifest(dirpath)
        deps = list(m.dependencies.values()) + list(m.devDependencies.values())
        if any(os.path.normpath(os.path.join(dirpath, d)) == subject_root for d in deps):
            out.append(dirpath)
    return out


def materialize_client(client_dir: str, subject_root: str, replacement: str, work_dir: str) -> str:
    """Copy a client, pointing its dependency on the subject at ``replacement``."""
    client_dir = os.path.abspath(client_dir)
    subject_root = os.path.abspath(subject_root)
    dst = os.path.join(os.path.abspath(work_dir), os.path.basename(client_dir))
    if os.path.exists(dst):
        shutil.rmtree(dst)
    shutil.copytree(client_dir, dst)
    path = os.path.join(dst, MANIFEST)
    with open(path, encoding="utf-8") as f:
        data = json.load(f)
    for key in ("dependencies", "devDependencies"):
        table = data.get(key, {})
        for name, rel in table.items():
            target = os.path.normpath(os.path.join(client_dir, rel))
            if target == subject_root:
                target = os.path.abspath(replacement)
            table[name] = posix_rel(target, dst)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, indent=2, sort_keys=True)
        f.write("\n")
    return dst


def run_client(client_copy: str, config: Optional[RuntimeConfig] = None) -> TestReport:
    return run_tests(load_package(client_copy), config)


def expansion_counts(report: TestReport) -> tuple[int, int, int]:
    """(file stubs, function stubs, bytes) first-fetched during a run."""
    files = sum(1 for e in report.expansionEvents if not e.cacheHit and e.kind == "file")
    fns = sum(1 for e in report.expansionEvents if not e.cacheHit and e.kind == "function")
    return files, fns, report.first_fetch_bytes()


@dataclass
class BenchCell:
    package: str
    client: str
    cg: str
    originalTime: float
    stubbedTime: float
    fileExpansions: int
    functionExpansions: int
    expandedBytes: int
    sameBehavior: bool
    stableExpansions: bool
    originalTimes: list = field(default_factory=list)
    stubbedTimes: list = field(default_factory=list)

    @property
    def slowdown(self) -> float:
        return (self.stubbedTime / self.originalTime - 1.0) * 100.0 if self.originalTime > 0 else 0.0

    def to_json(self) -> dict:
        return {
            "cg": self.cg,
            "client": self.client,
            "expandedKB": round(self.expandedBytes / 1024, 2),
            "fileExpansions": self.fileExpansions,
            "functionExpansions": self.functionExpansions,
            "originalTime": self.originalTime,
            "package": self.package,
            "sameBehavior": self.sameBehavior,
            "slowdown": round(self.slowdown),
            "stableExpansions": self.stableExpansions,
            "stubbedTime": self.stubbedTime,
        }


def timed_runs(client_copy: str, runs: int, warmup: int) -> tuple[list, list]:
    reports, times = [], []
    for i in range(warmup + runs):
        r = run_client(client_copy)
        if i >= warmup:
            reports.append(r)
            times.append(r.wallTime)
    return reports, times


def same_behavior(a: TestReport, b: TestReport) -> bool:
    return a.vector == b.vector and a.sideEffectLog == b.sideEffectLog and a.guardExit == b.guardExit


def bench_cell(package: str, client_name: str, cg: str, orig_copy: str, stub_copy: str, runs: int, warmup: int) -> BenchCell:
    o_reports, o_times = timed_runs(orig_copy, runs, warmup)
    s_reports, s_times = timed_runs(stub_copy, runs, warmup)
    counts = [expansion_counts(r) for r in s_reports]
    files, fns, nbytes = counts[0] if counts else (0, 0, 0)
    same = all(same_behavior(o_reports[0], r) for r in s_reports) if o_reports else True
    return BenchCell(
        package,
        client_name,
        cg,
        statistics.mean(o_times) if o_times else 0.0,
        statistics.mean(s_times) if s_times else 0.0,
        files,
        fns,
        nbytes,
        same,
        len(set(counts)) <= 1,
        o_times,
        s_times,
    )


COLUMNS = ("Proj", "Client Proj", "Time (s)", "Stubbed (s)", "Slowdown (%)", "Files", "Fcts", "Exp (KB)")


def format_table(cells: list[BenchCell]) -> str:
    rows = [COLUMNS]
    for c in cells:
        rows.append(
            (
                f"{c.package} [{c.cg}]",
                c.client,
                f"{c.originalTime:.4f}",
                f"{c.stubbedTime:.4f}",
                f"{c.slowdown:.0f}",
                str(c.fileExpansions),
                str(c.functionExpansions),
                f"{c.expandedBytes / 1024:.2f}",
            )
        )
    widths = [max(len(r[i]) for r in rows) for i in range(len(COLUMNS))]
    return "\n".join("  ".join(v.ljust(w) for v, w in zip(r, widths)).rstrip() for r in rows)
