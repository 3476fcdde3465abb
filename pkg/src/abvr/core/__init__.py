"""
Ядро приложения
"""

from abvr.core.config import Settings, get_settings
from abvr.core.dataset import ExperimentDataset
from abvr.core.exceptions import (
    AbvrError,
    InputError,
    ParseError,
    DomainError,
    ContractError,
    AlignmentError,
    DegenerateInputError,
    ReplicationError,
)
from abvr.core.logging import setup_logging
from abvr.core.models import (
    ColumnSchema,
    ValidationReport,
    GbtHyperparams,
    EstimateReport,
    ComparisonMetrics,
    SelectionConfig,
    SelectionResult,
    DGPConfig,
    OracleVariances,
    MCReport,
    RunManifest,
)

__all__ = [
    "Settings",
    "get_settings",
    "ExperimentDataset",
    "AbvrError",
    "InputError",
    "ParseError",
    "DomainError",
    "ContractError",
    "AlignmentError",
    "DegenerateInputError",
    "ReplicationError",
    "setup_logging",
    "ColumnSchema",
    "ValidationReport",
    "GbtHyperparams",
    "EstimateReport",
    "ComparisonMetrics",
    "SelectionConfig",
    "SelectionResult",
    "DGPConfig",
    "OracleVariances",
    "MCReport",
    "RunManifest",
]
