import numpy as np

from ..utils.stats import OlsFit, ols_fit
from .base import Predictor


class LinearPredictor(Predictor):
    """Линейная модель intercept + coefficients·x (обертка над OlsFit)"""

    kind = "linear"

    def __init__(self, fit: OlsFit):
        self.fit = fit

    @property
    def d(self) -> int:
        return int(self.fit.coefficients.shape[0])

    def predict(self, x) -> np.ndarray:
        x = self._as_matrix(x, self.d)
        return self.fit.fitted(x)


def fit_linear_predictor(x, y) -> LinearPredictor:
    """МНК-модель Y на X по всей выборке"""
    return LinearPredictor(ols_fit(np.asarray(x, dtype=float), y))
