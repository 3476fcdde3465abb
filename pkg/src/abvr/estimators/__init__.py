"""
Оценщики среднего эффекта воздействия и метрики их сравнения
"""

from abvr.estimators.adjusted import (
    estimate_diff,
    estimate_cuped,
    estimate_cupac,
    estimate_combined,
)
from abvr.estimators.metrics import comparison_metrics

__all__ = [
    "estimate_diff",
    "estimate_cuped",
    "estimate_cupac",
    "estimate_combined",
    "comparison_metrics",
]
