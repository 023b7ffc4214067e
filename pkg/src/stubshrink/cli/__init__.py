from .main import build_parser, main
from .report import SizeReport, canonical_bytes, package_sizes, size_report

__all__ = ["SizeReport", "build_parser", "canonical_bytes", "main", "package_sizes", "size_report"]
