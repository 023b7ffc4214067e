from .config import DANGEROUS_DEFAULT, GUARD_EXIT_CODE, GuardPolicy, Hooks, RuntimeConfig
from .package import PackageHandle, PackageManifest, load_package, read_manifest, write_manifest
from .runtime import Env, ExpansionEvent, GuardEvent, Interpreter
from .values import MClass, MFunction, MObject, NativeFunction, to_display

__all__ = [
    "DANGEROUS_DEFAULT",
    "GUARD_EXIT_CODE",
    "Env",
    "ExpansionEvent",
    "GuardEvent",
    "GuardPolicy",
    "Hooks",
    "Interpreter",
    "MClass",
    "MFunction",
    "MObject",
    "NativeFunction",
    "PackageHandle",
    "PackageManifest",
    "RuntimeConfig",
    "load_package",
    "read_manifest",
    "to_display",
    "write_manifest",
]
