"""
Отбор in-experiment ковариат, для которых не отвергается равенство
средних между группами.
"""

from typing import Dict, List, Optional, Sequence

import numpy as np
from loguru import logger

from ..core.dataset import ExperimentDataset
from ..core.exceptions import ContractError
from ..core.models import SelectionConfig, SelectionResult
from .stat_tests import adjust_pvalues, fisher_combine, mann_whitney_u, welch_t_test

_TESTS = {
    "welch_t": welch_t_test,
    "mann_whitney": mann_whitney_u,
}


def _check_schemas(experiments: Sequence[ExperimentDataset]) -> List[str]:
    if not experiments:
        raise ContractError("select_covariates needs at least one experiment")
    names = sorted(experiments[0].z_names)
    for ds in experiments[1:]:
        if sorted(ds.z_names) != names:
            raise ContractError(
                f"inconsistent z schemas: {experiments[0].experiment_id} has {names}, "
                f"{ds.experiment_id} has {sorted(ds.z_names)}"
            )
    ids = [ds.experiment_id for ds in experiments]
    if len(set(ids)) != len(ids):
        raise ContractError(f"duplicate experiment ids: {ids}")
    return names


def _passes_prefilter(column: np.ndarray, min_nonzero_fraction: float) -> bool:
    if column.size == 0 or np.all(column == column[0]):
        return False
    return float(np.mean(column != 0.0)) >= min_nonzero_fraction


def select_covariates(
    experiments: Sequence[ExperimentDataset], cfg: Optional[SelectionConfig] = None
) -> SelectionResult:
    """
    Отбор ковариат по серии экспериментов.

    1. Предфильтр: доля ненулевых значений >= min_nonzero_fraction и
       непостоянство во всех экспериментах, иначе ковариата в filtered_out.
    2. Для каждого эксперимента — тест Z | W=1 против Z | W=0.
    3. p-values объединяются методом Фишера (эксперименты по experiment_id).
    4. Поправка cfg.correction; отбираются ковариаты с p > alpha.

    Raises:
        ContractError: пустой список или разные наборы z-колонок
    """
    cfg = cfg or SelectionConfig()
    names = _check_schemas(experiments)
    ordered = sorted(experiments, key=lambda ds: ds.experiment_id)
    test = _TESTS[cfg.test]

    filtered_out = []
    tested = []
    for name in names:
        if all(
            _passes_prefilter(ds.z[:, ds.z_names.index(name)], cfg.min_nonzero_fraction)
            for ds in ordered
        ):
            tested.append(name)
        else:
            filtered_out.append(name)

    per_experiment: Dict[str, Dict[str, float]] = {}
    for ds in ordered:
        treated = ds.treated
        row = {}
        for name in tested:
            column = ds.z[:, ds.z_names.index(name)]
            row[name] = test(column[treated], column[~treated])
        per_experiment[ds.experiment_id] = row

    combined = {
        name: fisher_combine([per_experiment[ds.experiment_id][name] for ds in ordered])
        for name in tested
    }
    adjusted = adjust_pvalues(combined, cfg.correction)

    selected = sorted(name for name in tested if adjusted[name] > cfg.alpha)
    rejected = sorted(name for name in tested if adjusted[name] <= cfg.alpha)
    for name in tested:
        logger.debug(f"{name}: p={combined[name]:.4g}, adjusted={adjusted[name]:.4g}")
    if filtered_out:
        logger.debug(f"Отсеяны предфильтром: {filtered_out}")

    return SelectionResult(
        per_experiment_pvalues=per_experiment,
        combined_pvalues=combined,
        adjusted_pvalues=adjusted,
        selected=selected,
        rejected=rejected,
        filtered_out=filtered_out,
    )
