from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

from ..interp.package import STORE


@dataclass
class CodeStore:
    entries: dict = field(default_factory=dict)
    guarded: bool = False

    def to_json(self) -> dict:
        return {"entries": dict(sorted(self.entries.items())), "guarded": self.guarded}

    def save(self, directory: str) -> str:
        path = os.path.join(directory, STORE)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_json(), f, indent=2, sort_keys=True, ensure_ascii=False)
            f.write("\n")
        return path

    @classmethod
    def load(cls, path: str) -> "CodeStore":
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
        return cls(dict(data.get("entries", {})), bool(data.get("guarded", False)))

    def entry_bytes(self, key: str) -> int:
        return len(self.entries[key].encode("utf-8"))


def write_expansion_log(events: list, path: str) -> None:
    """One JSON object per line; ``seq`` numbers events across the whole log."""
    with open(path, "w", encoding="utf-8") as f:
        for seq, ev in enumerate(events):
            rec = ev.to_json()
            rec["seq"] = seq
            f.write(json.dumps(rec, sort_keys=True) + "\n")


def read_expansion_log(path: str) -> list[dict]:
    with open(path, encoding="utf-8") as f:
        return [json.loads(line) for line in f if line.strip()]
