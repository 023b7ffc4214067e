from .bundle import BUNDLE_FILE, MAP_FILE, SHAKE_FILE, Bundle, bundle
from .compose import bundle_reachability, repoint_test, stubbify_bundle, write_bundle_package

__all__ = [
    "BUNDLE_FILE",
    "MAP_FILE",
    "SHAKE_FILE",
    "Bundle",
    "bundle",
    "bundle_reachability",
    "repoint_test",
    "stubbify_bundle",
    "write_bundle_package",
]
