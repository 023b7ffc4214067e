from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

DANGEROUS_DEFAULT = frozenset({"eval", "exec", "execSync", "spawn"})
GUARD_MODES = ("off", "warn", "exit")
GUARD_EXIT_CODE = 2


@dataclass(frozen=True)
class GuardPolicy:
    mode: str = "off"
    dangerous_names: frozenset = DANGEROUS_DEFAULT

    def __post_init__(self):
        if self.mode not in GUARD_MODES:
            raise ValueError(f"guard mode must be one of {GUARD_MODES}, got {self.mode!r}")


@dataclass
class Hooks:
    """Observation-only callbacks; none of them may influence evaluation."""

    on_function_enter: Optional[Callable[[str], None]] = None
    on_stub_expansion: Optional[Callable[[str, str, int], None]] = None
    on_guard_event: Optional[Callable[[str], None]] = None
    on_module_exec: Optional[Callable[[str], None]] = None


@dataclass
class RuntimeConfig:
    # None means: use the mode recorded in the stubbified package's manifest
    guard_policy: Optional[GuardPolicy] = None
    code_store_path: Optional[str] = None
    hooks: Hooks = field(default_factory=Hooks)
