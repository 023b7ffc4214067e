"""stubshrink: test-driven debloating for MiniMod packages."""

__version__ = "0.1.0"
