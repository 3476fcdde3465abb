"""
Отбор in-experiment ковариат по тестам равенства средних
"""

from abvr.selection.stat_tests import (
    welch_t_test,
    mann_whitney_u,
    fisher_combine,
    adjust_pvalues,
)
from abvr.selection.selector import select_covariates

__all__ = [
    "welch_t_test",
    "mann_whitney_u",
    "fisher_combine",
    "adjust_pvalues",
    "select_covariates",
]
