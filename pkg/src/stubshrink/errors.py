"""Exception hierarchy shared by every stage of the toolchain."""

from __future__ import annotations


class StubshrinkError(Exception):
    """Base class for all toolchain errors."""


class ParseError(StubshrinkError):
    def __init__(self, message: str, path: str = "<input>", line: int = 0, col: int = 0):
        self.message = message
        self.path = path
        self.line = line
        self.col = col
        super().__init__(f"{path}:{line}:{col}: {message}")


class StyleMixError(ParseError):
    """A module uses both static import/export and require/module.exports."""


class MiniRuntimeError(StubshrinkError):
    """An error raised while evaluating MiniMod code.

    ``trace`` holds the MiniMod call stack, innermost frame last.
    """

    def __init__(self, message: str, trace: list[str] | None = None):
        self.message = message
        self.trace = list(trace or [])
        super().__init__(message)

    def __str__(self) -> str:
        if not self.trace:
            return self.message
        frames = "\n".join(f"  at {t}" for t in self.trace)
        return f"{self.message}\n{frames}"


class NotCallableError(MiniRuntimeError):
    pass


class CycleError(MiniRuntimeError):
    pass


class EvalImportError(MiniRuntimeError):
    """eval() was handed code containing import/export declarations."""


class ManifestError(StubshrinkError):
    pass


class MissingDependency(MiniRuntimeError):
    pass


class GuardExit(StubshrinkError):
    """Raised by the guard in exit mode; unwinds the whole interpreter run."""

    def __init__(self, name: str):
        self.name = name
        super().__init__(f"guarded call to dangerous builtin '{name}'")


class UnstubbableError(StubshrinkError):
    pass


class RevisionMismatch(StubshrinkError):
    pass


class OutputExists(StubshrinkError):
    pass


class BundleError(StubshrinkError):
    pass


class MapGap(StubshrinkError):
    pass
