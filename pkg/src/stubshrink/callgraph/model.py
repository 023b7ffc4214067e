from __future__ import annotations

import json
from dataclasses import dataclass, field

from ..interp.package import PackageHandle
from ..lang import ast as A
from ..lang.parser import parse_cached

MODES = ("static", "dynamic")


@dataclass
class ReachabilitySet:
    mode: str
    reachableFunctions: set = field(default_factory=set)
    reachableFiles: set = field(default_factory=set)
    entryPoints: list = field(default_factory=list)
    # audit trail for unsound constructs; not part of the serialized form
    warnings: list = field(default_factory=list, compare=False)

    def to_json(self) -> dict:
        return {
            "entryPoints": list(self.entryPoints),
            "mode": self.mode,
            "reachableFiles": sorted(self.reachableFiles),
            "reachableFunctions": sorted(self.reachableFunctions),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, data: dict) -> "ReachabilitySet":
        if data.get("mode") not in MODES:
            raise ValueError(f"reachability mode must be one of {MODES}")
        return cls(
            data["mode"],
            set(data.get("reachableFunctions", [])),
            set(data.get("reachableFiles", [])),
            list(data.get("entryPoints", [])),
        )

    @classmethod
    def load(cls, path: str) -> "ReachabilitySet":
        with open(path, encoding="utf-8") as f:
            return cls.from_json(json.load(f))


def read_source(path: str) -> str:
    with open(path, encoding="utf-8") as f:
        return f.read()


def parse_closure(pkg: PackageHandle) -> dict[str, A.Module]:
    """Parse every analyzed file, keyed by package-relative path."""
    out = {}
    for path in pkg.closure_files():
        rel = pkg.rel(path)
        out[rel] = parse_cached(read_source(path), rel)
    return out
