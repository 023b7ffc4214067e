"""Size accounting over canonical-printed source."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Optional

from ..interp.package import PRELUDE, PackageHandle
from ..lang.parser import parse_cached
from ..lang.printer import print_module


def canonical_bytes(path: str, rel: str = "<file>") -> int:
    with open(path, encoding="utf-8") as f:
        text = f.read()
    return len(print_module(parse_cached(text, rel)).encode("utf-8"))


def package_sizes(pkg: PackageHandle) -> dict[str, int]:
    """Canonical bytes per analyzed file (app plus production dependencies, no tests).

    A stubbified package also counts its stub-runtime prelude.
    """
    sizes = {pkg.rel(p): canonical_bytes(p, pkg.rel(p)) for p in pkg.closure_files()}
    prelude = os.path.join(pkg.root, PRELUDE)
    if os.path.isfile(prelude):
        sizes[PRELUDE] = canonical_bytes(prelude, PRELUDE)
    return sizes


def reduction(original: int, now: int) -> float:
    return 100.0 * (1.0 - now / original) if original else 0.0


@dataclass
class SizeReport:
    originalBytes: int
    stubbedBytes: int
    perFile: dict = field(default_factory=dict)  # rel -> {"original": n, "stubbed": n}
    clients: dict = field(default_factory=dict)  # name -> first-fetch bytes of its run

    @property
    def reductionPct(self) -> float:
        return reduction(self.originalBytes, self.stubbedBytes)

    def expanded_bytes(self, first_fetch: int) -> int:
        return self.stubbedBytes + first_fetch

    @property
    def expandedBytesRange(self) -> Optional[list]:
        if not self.clients:
            return None
        vals = [self.expanded_bytes(v) for v in self.clients.values()]
        return [min(vals), max(vals)]

    @property
    def reductionAfterExpansionRange(self) -> Optional[list]:
        rng = self.expandedBytesRange
        if rng is None:
            return None
        # the largest expansion gives the smallest reduction
        return [reduction(self.originalBytes, rng[1]), reduction(self.originalBytes, rng[0])]

    def to_json(self) -> dict:
        return {
            "clients": {k: {"expandedBytes": self.expanded_bytes(v), "firstFetchBytes": v} for k, v in sorted(self.clients.items())},
            "expandedBytesRange": self.expandedBytesRange,
            "originalBytes": self.originalBytes,
            "perFile": dict(sorted(self.perFile.items())),
            "reductionAfterExpansionRange": self.reductionAfterExpansionRange,
            "reductionPct": self.reductionPct,
            "stubbedBytes": self.stubbedBytes,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)

    def summary(self) -> str:
        lines = [
            f"original: {self.originalBytes} bytes",
            f"stubbed:  {self.stubbedBytes} bytes ({self.reductionPct:.1f}% reduction)",
        ]
        if self.clients:
            lo, hi = self.expandedBytesRange
            rlo, rhi = self.reductionAfterExpansionRange
            lines.append(f"expanded: {lo}..{hi} bytes over {len(self.clients)} clients ({rlo:.1f}%..{rhi:.1f}% reduction)")
        return "\n".join(lines)


def size_report(original: PackageHandle, stubbed: PackageHandle, clients: Optional[dict] = None) -> SizeReport:
    before = package_sizes(original)
    after = package_sizes(stubbed)
    per = {}
    for rel in sorted(set(before) | set(after)):
        per[rel] = {"original": before.get(rel, 0), "stubbed": after.get(rel, 0)}
    return SizeReport(sum(before.values()), sum(after.values()), per, dict(clients or {}))
