"""
K-fold cross-fitting: каждая строка получает предсказание модели,
обученной без неё.
"""

from typing import Literal, Optional

import numpy as np
from loguru import logger

from ..core.exceptions import ContractError
from ..core.models import GbtHyperparams
from .boosting import fit_gbt_predictor
from .external import ExternalPredictor
from .linear import fit_linear_predictor

FitKind = Literal["linear", "gbt"]


def fold_assignment(n: int, folds: int, seed: int = 0) -> np.ndarray:
    """Номер фолда для каждой строки; размеры фолдов отличаются не более чем на 1"""
    if folds < 2:
        raise ContractError(f"cross-fitting needs at least 2 folds, got {folds}")
    if n < folds:
        raise ContractError(f"cannot split {n} rows into {folds} folds")
    order = np.random.default_rng(seed).permutation(n)
    assignment = np.empty(n, dtype=np.int64)
    assignment[order] = np.arange(n) % folds
    return assignment


def cross_fit_predictions(
    x,
    y,
    kind: FitKind = "linear",
    folds: int = 5,
    seed: int = 0,
    hyperparams: Optional[GbtHyperparams] = None,
) -> ExternalPredictor:
    """
    Предсказания out-of-fold.

    Args:
        x: матрица n×d
        y: вектор длины n
        kind: linear или gbt
        folds: число фолдов K >= 2
        seed: зерно перестановки строк
        hyperparams: гиперпараметры бустинга

    Returns:
        ExternalPredictor в порядке строк x
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim == 1:
        x = x.reshape(-1, 1)
    n = y.shape[0]
    assignment = fold_assignment(n, folds, seed)

    out = np.empty(n)
    for k in range(folds):
        test = assignment == k
        train = ~test
        if kind == "linear":
            model = fit_linear_predictor(x[train], y[train])
        elif kind == "gbt":
            model = fit_gbt_predictor(x[train], y[train], hyperparams)
        else:
            raise ContractError(f"unknown predictor kind for cross-fitting: {kind}")
        out[test] = model.predict(x[test])

    logger.debug(f"Cross-fitting {kind}: n={n}, K={folds}")
    return ExternalPredictor(out)
