"""
Двухвыборочные тесты равенства средних, метод Фишера и поправки
на множественные сравнения.
"""

from itertools import combinations
from typing import Dict, Literal, Sequence

import numpy as np
from scipy import stats
from statsmodels.stats.multitest import multipletests

from ..core.exceptions import ContractError, DegenerateInputError
from ..utils.stats import midranks

EXACT_MAX_TOTAL = 16
FISHER_MIN_P = 1e-300
_EXACT_TOLERANCE = 1e-9

MannWhitneyMethod = Literal["auto", "exact", "normal"]


def _clamp(p: float) -> float:
    if np.isnan(p):
        return 1.0
    return float(min(1.0, max(0.0, p)))


def welch_t_test(a, b) -> float:
    """
    Двусторонний t-тест Уэлча (степени свободы Уэлча–Саттерсвейта).

    Обе выборки с нулевой дисперсией: p = 1 при равных средних, иначе p = 0.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.size < 2 or b.size < 2:
        raise DegenerateInputError(
            f"Welch test needs at least 2 values per arm, got {a.size} and {b.size}"
        )

    if np.var(a) == 0.0 and np.var(b) == 0.0:
        return 1.0 if a[0] == b[0] else 0.0

    _, p = stats.ttest_ind(a, b, equal_var=False)
    return _clamp(float(p))


def _exact_mw_pvalue(ranks: np.ndarray, n1: int, u: float) -> float:
    # Перестановочное распределение U по наблюдаемым средним рангам
    total = ranks.shape[0]
    mu = n1 * (total - n1) / 2.0
    offset = n1 * (n1 + 1) / 2.0
    subsets = np.array(list(combinations(range(total), n1)), dtype=np.int64)
    u_all = ranks[subsets].sum(axis=1) - offset
    extreme = np.abs(u_all - mu) >= abs(u - mu) - _EXACT_TOLERANCE
    return float(extreme.mean())


def mann_whitney_u(a, b, method: MannWhitneyMethod = "auto") -> float:
    """
    Двусторонний тест Манна–Уитни.

    U считается по средним рангам. При auto для n1 + n2 <= 16 p-value
    находится точным перебором, иначе нормальной аппроксимацией с поправкой
    на непрерывность и на связки. Все значения одинаковы -> p = 1.

    Args:
        a, b: выборки (непустые)
        method: auto, exact или normal

    Returns:
        p-value в [0, 1]
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.size == 0 or b.size == 0:
        raise DegenerateInputError("Mann-Whitney test needs non-empty samples")

    pooled = np.concatenate([a, b])
    if np.all(pooled == pooled[0]):
        return 1.0

    n1 = a.size
    ranks = midranks(pooled)
    u = float(ranks[:n1].sum() - n1 * (n1 + 1) / 2.0)

    if method == "exact" or (method == "auto" and pooled.size <= EXACT_MAX_TOTAL):
        return _clamp(_exact_mw_pvalue(ranks, n1, u))

    result = stats.mannwhitneyu(
        a, b, use_continuity=True, alternative="two-sided", method="asymptotic"
    )
    return _clamp(float(result.pvalue))


def fisher_combine(pvals: Sequence[float]) -> float:
    """
    Метод Фишера: T = -2 Σ ln p, p-value — хвост хи-квадрат с 2k степенями свободы.

    Нулевые p заменяются на 1e-300.
    """
    p = np.asarray(pvals, dtype=float)
    if p.size == 0:
        raise ContractError("fisher_combine needs at least one p-value")
    if np.any((p < 0.0) | (p > 1.0)) or np.any(np.isnan(p)):
        raise ContractError(f"p-values must lie in [0, 1], got {p.tolist()}")
    p = np.maximum(p, FISHER_MIN_P)
    _, combined = stats.combine_pvalues(p, method="fisher")
    return _clamp(float(combined))


def adjust_pvalues(pvals: Dict[str, float], method: str) -> Dict[str, float]:
    """
    Поправка на множественные сравнения (bonferroni, holm или none).

    Порядок ключей сохраняется.
    """
    if method not in ("none", "bonferroni", "holm"):
        raise ContractError(f"unknown correction: {method}")
    if method == "none" or not pvals:
        return dict(pvals)

    names = list(pvals)
    _, adjusted, _, _ = multipletests([pvals[k] for k in names], method=method)
    return {name: _clamp(float(v)) for name, v in zip(names, adjusted)}
