import json
import os
import sys

import pytest

from stubshrink.interp.package import forget_stub_roots

HERE = os.path.dirname(os.path.abspath(__file__))
ROOT = os.path.dirname(HERE)
CORPUS = os.path.join(ROOT, "corpus")
FIXTURES = os.path.join(HERE, "fixtures")
CORPUS_PACKAGES = sorted(
    n for n in os.listdir(CORPUS) if os.path.isfile(os.path.join(CORPUS, n, "minipkg.json"))
)

sys.path.insert(0, HERE)  # progen


def write_package(root, files: dict, manifest: dict | None = None) -> str:
    """Lay out a package from {relative path: text}; a manifest is generated if missing."""
    root = str(root)
    for rel, text in files.items():
        path = os.path.join(root, rel)
        os.makedirs(os.path.dirname(path), exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
    if manifest is not None or "minipkg.json" not in files:
        data = {
            "name": os.path.basename(root),
            "version": "1.0.0",
            "main": "src/main.mm",
            "tests": sorted(r for r in files if r.startswith("test/")),
            "dependencies": {},
            "devDependencies": {},
        }
        data.update(manifest or {})
        with open(os.path.join(root, "minipkg.json"), "w", encoding="utf-8") as f:
            json.dump(data, f)
    forget_stub_roots()
    return root


@pytest.fixture
def make_pkg(tmp_path):
    counter = [0]

    def make(files: dict, manifest: dict | None = None, name: str | None = None) -> str:
        counter[0] += 1
        return write_package(tmp_path / (name or f"pkg{counter[0]}"), files, manifest)

    return make


@pytest.fixture(scope="session")
def stubbed_corpus(tmp_path_factory):
    """Every corpus package stubbified under both call-graph modes, built lazily."""
    from stubshrink.callgraph import reachability
    from stubshrink.interp import load_package
    from stubshrink.stubbify import stubbify_package

    base = tmp_path_factory.mktemp("stubbed")
    cache = {}

    def get(name: str, mode: str = "static"):
        key = (name, mode)
        if key not in cache:
            pkg = load_package(os.path.join(CORPUS, name))
            cache[key] = stubbify_package(pkg, reachability(pkg, mode), str(base / f"{name}.{mode}"))
        return cache[key]

    return get


# criterion number -> (passed, detail); filled by test_acceptance
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} ({detail})")
