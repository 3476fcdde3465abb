"""
Модели исхода f(X) для CUPAC и комбинированного оценщика
"""

from abvr.predictors.base import Predictor, predict, r_squared
from abvr.predictors.linear import LinearPredictor, fit_linear_predictor
from abvr.predictors.boosting import BoostedTreesPredictor, RegressionTree, fit_gbt_predictor
from abvr.predictors.external import ExternalPredictor, load_external_predictions
from abvr.predictors.crossfit import cross_fit_predictions, fold_assignment

__all__ = [
    "Predictor",
    "predict",
    "r_squared",
    "LinearPredictor",
    "fit_linear_predictor",
    "BoostedTreesPredictor",
    "RegressionTree",
    "fit_gbt_predictor",
    "ExternalPredictor",
    "load_external_predictions",
    "cross_fit_predictions",
    "fold_assignment",
]
