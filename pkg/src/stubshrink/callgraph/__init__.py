from .dynamic import dynamic_reachability
from .model import MODES, ReachabilitySet, parse_closure
from .static import static_reachability


def reachability(pkg, mode: str, tests=None) -> ReachabilitySet:
    if mode == "static":
        return static_reachability(pkg, tests)
    if mode == "dynamic":
        return dynamic_reachability(pkg, tests)
    raise ValueError(f"unknown call graph mode {mode!r}")


__all__ = ["MODES", "ReachabilitySet", "dynamic_reachability", "parse_closure", "reachability", "static_reachability"]
