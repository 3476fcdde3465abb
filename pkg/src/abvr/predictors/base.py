"""
Единый контракт модели исхода f(X): оценщики CUPAC и комбинированный
работают с любым Predictor и не знают, как он обучен.
"""

from typing import Literal

import numpy as np

from ..core.exceptions import ContractError, DegenerateInputError

PredictorKind = Literal["linear", "boosted_trees", "external"]


class Predictor:
    """Обученная модель исхода"""

    kind: PredictorKind

    def predict(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    @staticmethod
    def _as_matrix(x, d: int) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            x = x.reshape(-1, 1) if d == 1 else x.reshape(1, -1)
        if x.ndim != 2 or x.shape[1] != d:
            raise ContractError(f"predictor was trained on {d} columns, got shape {x.shape}")
        return x


def predict(p: Predictor, x) -> np.ndarray:
    """Предсказания модели p на строках x"""
    return p.predict(x)


def r_squared(y, y_hat) -> float:
    """
    Коэффициент детерминации 1 - SSE/SST (SST центрирован по mean(y)).

    Может быть отрицательным для плохих моделей.
    """
    y = np.asarray(y, dtype=float)
    y_hat = np.asarray(y_hat, dtype=float)
    if y.shape != y_hat.shape:
        raise ContractError(f"length mismatch: {y.shape} vs {y_hat.shape}")
    if y.size < 2:
        raise DegenerateInputError("r_squared needs at least 2 values")
    sst = float(np.sum((y - y.mean()) ** 2))
    if sst == 0.0:
        raise DegenerateInputError("r_squared is undefined for constant y")
    sse = float(np.sum((y - y_hat) ** 2))
    return 1.0 - sse / sst
