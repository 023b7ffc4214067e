from ..interp.config import GuardPolicy
from .emit import emit_file_stub, stored_function_text, stub_body_text
from .guards import apply_guards
from .pipeline import StubbedPackage, stubbify_package, transform_sources
from .plan import StubOptions, StubPlan, plan_stubs
from .prelude import PRELUDE_TEXT
from .store import CodeStore, read_expansion_log, write_expansion_log

__all__ = [
    "CodeStore",
    "GuardPolicy",
    "PRELUDE_TEXT",
    "StubOptions",
    "StubPlan",
    "StubbedPackage",
    "apply_guards",
    "emit_file_stub",
    "plan_stubs",
    "read_expansion_log",
    "stored_function_text",
    "stub_body_text",
    "stubbify_package",
    "transform_sources",
    "write_expansion_log",
]
