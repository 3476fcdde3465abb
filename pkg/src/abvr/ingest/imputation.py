"""
Импутация пропусков в pre-experiment ковариатах.

Среднее считается по всей выборке (обе группы вместе): импутация по группам
нарушила бы независимость W и X. Для каждой колонки с пропусками
добавляется индикатор <col>__miss.
"""

from typing import Literal

import numpy as np
from loguru import logger

from ..core.dataset import ExperimentDataset

ImputePolicy = Literal["mean_plus_indicator", "zero_plus_indicator"]

MISSING_SUFFIX = "__miss"


def impute_missing_pre(
    ds: ExperimentDataset, policy: ImputePolicy = "mean_plus_indicator"
) -> ExperimentDataset:
    """
    Заполнить пропуски в X и добавить индикаторы пропуска.

    Args:
        ds: датасет, пропуски (NaN) допустимы только в X
        policy: mean_plus_indicator — среднее по наблюдаемым значениям
                (среднее пустого множества = 0); zero_plus_indicator — ноль

    Returns:
        Новый датасет; без пропусков возвращается тот же объект
    """
    if policy not in ("mean_plus_indicator", "zero_plus_indicator"):
        raise ValueError(f"unknown imputation policy: {policy}")

    missing = np.isnan(ds.x)
    affected = [j for j in range(ds.d) if missing[:, j].any()]
    if not affected:
        return ds

    x = np.array(ds.x, dtype=float, copy=True)
    indicators = []
    names = list(ds.x_names)
    for j in affected:
        mask = missing[:, j]
        fill = 0.0
        if policy == "mean_plus_indicator" and not mask.all():
            fill = float(x[~mask, j].mean())
        x[mask, j] = fill
        indicators.append(mask.astype(float))
        names.append(f"{ds.x_names[j]}{MISSING_SUFFIX}")
        logger.debug(
            f"{ds.experiment_id}: {ds.x_names[j]} — пропусков {int(mask.sum())}, заполнено {fill:g}"
        )

    x = np.column_stack([x, *indicators])
    return ds.with_x(x, tuple(names))
