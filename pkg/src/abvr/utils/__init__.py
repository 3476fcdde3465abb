"""
Утилиты
"""

from abvr.utils.converters import dump_json, format_float, to_plain
from abvr.utils.fs import ensure_dir, file_digest, list_csv_files
from abvr.utils.stats import (
    GroupSummary,
    OlsFit,
    group_summary,
    midranks,
    ols_fit,
    sample_variance,
)

__all__ = [
    "dump_json",
    "format_float",
    "to_plain",
    "ensure_dir",
    "file_digest",
    "list_csv_files",
    "GroupSummary",
    "OlsFit",
    "group_summary",
    "midranks",
    "ols_fit",
    "sample_variance",
]
