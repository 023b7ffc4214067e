"""Package manifests, module resolution and the analyzed file closure."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Optional

from ..errors import ManifestError, MissingDependency

MANIFEST = "minipkg.json"
PRELUDE = "stubs.prelude.mm"
STORE = "stubs.store.json"
EXT = ".mm"


@dataclass
class PackageManifest:
    name: str
    version: str
    main: str
    tests: list = field(default_factory=list)
    dependencies: dict = field(default_factory=dict)
    devDependencies: dict = field(default_factory=dict)
    stubbed: Optional[dict] = None

    @classmethod
    def from_json(cls, data: dict, where: str = "") -> "PackageManifest":
        if not isinstance(data, dict):
            raise ManifestError(f"{where}: manifest must be a JSON object")
        for key in ("name", "version", "main"):
            if not isinstance(data.get(key), str):
                raise ManifestError(f"{where}: manifest field '{key}' must be a string")
        tests = data.get("tests", [])
        deps = data.get("dependencies", {})
        dev = data.get("devDependencies", {})
        if not isinstance(tests, list) or not all(isinstance(t, str) for t in tests):
            raise ManifestError(f"{where}: 'tests' must be a list of paths")
        for label, d in (("dependencies", deps), ("devDependencies", dev)):
            if not isinstance(d, dict) or not all(isinstance(v, str) for v in d.values()):
                raise ManifestError(f"{where}: '{label}' must map names to directories")
        return cls(data["name"], data["version"], data["main"], list(tests), dict(deps), dict(dev), data.get("stubbed"))

    def to_json(self) -> dict:
        out = {
            "name": self.name,
            "version": self.version,
            "main": self.main,
            "tests": self.tests,
            "dependencies": self.dependencies,
            "devDependencies": self.devDependencies,
        }
        if self.stubbed is not None:
            out["stubbed"] = self.stubbed
        return out


def read_manifest(directory: str) -> PackageManifest:
    path = os.path.join(directory, MANIFEST)
    if not os.path.isfile(path):
        raise ManifestError(f"no {MANIFEST} in {directory}")
    try:
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
    except (OSError, ValueError) as e:
        raise ManifestError(f"{path}: {e}") from e
    return PackageManifest.from_json(data, path)


def write_manifest(directory: str, manifest: PackageManifest) -> None:
    with open(os.path.join(directory, MANIFEST), "w", encoding="utf-8") as f:
        json.dump(manifest.to_json(), f, indent=2, sort_keys=True)
        f.write("\n")


def posix_rel(path: str, start: str) -> str:
    return os.path.relpath(path, start).replace(os.sep, "/")


class PackageHandle:
    """A loaded package: manifest, dependency graph and resolver."""

    def __init__(self, root: str, manifest: PackageManifest, registry: dict):
        self.root = os.path.abspath(root)
        self.manifest = manifest
        self.deps: dict[str, PackageHandle] = {}
        self.dev_deps: dict[str, PackageHandle] = {}
        self._registry = registry  # abs dir -> PackageHandle, shared by the graph
        self._resolve_memo: dict = {}

    @property
    def name(self) -> str:
        return self.manifest.name

    @property
    def main_path(self) -> str:
        return os.path.normpath(os.path.join(self.root, self.manifest.main))

    @property
    def test_paths(self) -> list[str]:
        return [os.path.normpath(os.path.join(self.root, t)) for t in self.manifest.tests]

    def rel(self, abs_path: str) -> str:
        return posix_rel(abs_path, self.root)

    def packages(self) -> list["PackageHandle"]:
        return list(self._registry.values())

    def production_closure(self) -> list["PackageHandle"]:
        """This package plus its production dependencies, transitively."""
        seen: dict[str, PackageHandle] = {}
        stack = [self]
        while stack:
            p = stack.pop()
            if p.root in seen:
                continue
            seen[p.root] = p
            stack.extend(p.deps.values())
        return sorted(seen.values(), key=lambda p: p.root)

    def owner(self, abs_file: str) -> "PackageHandle":
        best = self
        best_len = -1
        for root, pkg in self._registry.items():
            if (abs_file == root or abs_file.startswith(root + os.sep)) and len(root) > best_len:
                best, best_len = pkg, len(root)
        return best

    def resolve(self, spec: str, from_file: str) -> str:
        """Map an import/require specifier to an absolute file path."""
        from_dir = os.path.dirname(from_file)
        key = (from_dir, spec)
        hit = self._resolve_memo.get(key)
        if hit is not None:
            return hit
        if spec.startswith("./") or spec.startswith("../"):
            target = os.path.normpath(os.path.join(from_dir, spec))
            if not target.endswith(EXT):
                target += EXT
            if not os.path.isfile(target):
                raise MissingDependency(f"cannot resolve '{spec}' from {self.rel(from_file)}")
        else:
            owner = self.owner(from_file)
            dep = owner.deps.get(spec) or owner.dev_deps.get(spec)
            if dep is None:
                raise MissingDependency(f"unknown module specifier '{spec}' in {self.rel(from_file)}")
            target = dep.main_path
            if not os.path.isfile(target):
                raise MissingDependency(f"main module of '{spec}' does not exist")
        self._resolve_memo[key] = target
        return target

    # ----------------------------------------------------------- file sets

    def own_files(self) -> list[str]:
        """Source files of this package alone: nested package roots and tests excluded."""
        tests = set(self.test_paths)
        out = []
        for dirpath, dirnames, filenames in os.walk(self.root):
            if dirpath != self.root and os.path.isfile(os.path.join(dirpath, MANIFEST)):
                dirnames[:] = []
                continue
            dirnames.sort()
            for fn in sorted(filenames):
                if not fn.endswith(EXT):
                    continue
                p = os.path.join(dirpath, fn)
                if p in tests or (dirpath == self.root and fn == PRELUDE):
                    continue
                out.append(p)
        return out

    def closure_files(self) -> list[str]:
        """Analyzed closure: own sources plus production dependencies', tests and devDependencies excluded."""
        files = []
        for p in self.production_closure():
            files.extend(p.own_files())
        return sorted(set(files))


def load_package(directory: str, _registry: Optional[dict] = None) -> PackageHandle:
    root = os.path.abspath(directory)
    registry = _registry if _registry is not None else {}
    if root in registry:
        return registry[root]
    manifest = read_manifest(root)
    pkg = PackageHandle(root, manifest, registry)
    registry[root] = pkg
    for t in pkg.test_paths:
        if not os.path.isfile(t):
            raise ManifestError(f"{pkg.name}: test file {posix_rel(t, root)} does not exist")
    for label, table, target in (
        ("dependency", manifest.dependencies, pkg.deps),
        ("devDependency", manifest.devDependencies, pkg.dev_deps),
    ):
        for name, rel_dir in table.items():
            dep_dir = os.path.normpath(os.path.join(root, rel_dir))
            if not os.path.isfile(os.path.join(dep_dir, MANIFEST)):
                raise MissingDependency(f"{pkg.name}: {label} '{name}' has no manifest at {rel_dir}")
            target[name] = load_package(dep_dir, registry)
    return pkg


_stub_root_memo: dict[str, Optional[str]] = {}


def stub_root_of(abs_file: str) -> Optional[str]:
    """Directory of the nearest enclosing stubbified package, if any."""
    d = os.path.dirname(abs_file)
    chain = []
    found = None
    while True:
        if d in _stub_root_memo:
            found = _stub_root_memo[d]
            break
        chain.append(d)
        mpath = os.path.join(d, MANIFEST)
        if os.path.isfile(mpath):
            try:
                with open(mpath, encoding="utf-8") as f:
                    data = json.load(f)
            except (OSError, ValueError):
                data = {}
            if isinstance(data, dict) and data.get("stubbed"):
                found = d
                break
        parent = os.path.dirname(d)
        if parent == d:
            break
        d = parent
    for c in chain:
        _stub_root_memo[c] = found
    return found


def forget_stub_roots() -> None:
    _stub_root_memo.clear()
