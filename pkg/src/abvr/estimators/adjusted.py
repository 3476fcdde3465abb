"""
Оценщики ATE: разность средних, CUPED, CUPAC и комбинированный.

Все четыре устроены одинаково: из Y вычитается поправка, одна и та же для
обеих групп, затем берется разность средних скорректированных значений.
Дисперсия: sigma2 = n * (Var1 / n1 + Var0 / n0), каждая группа центрируется
по своему среднему; se = sqrt(sigma2 / n).
"""

from typing import Optional, Sequence

import numpy as np
from loguru import logger
from scipy.stats import norm

from ..core.dataset import ExperimentDataset
from ..core.exceptions import AlignmentError, ContractError, DegenerateInputError
from ..core.models import EstimateReport, Method
from ..predictors.base import Predictor, r_squared
from ..utils.stats import OlsFit, ols_fit, sample_variance


def _check_level(level: float) -> None:
    if not 0.0 < level < 1.0:
        raise ContractError(f"confidence level must lie in (0, 1), got {level}")


def _check_arms(ds: ExperimentDataset) -> None:
    if ds.n1 < 2:
        raise DegenerateInputError(f"n1 < 2 (n1={ds.n1})", {"n1": ds.n1})
    if ds.n0 < 2:
        raise DegenerateInputError(f"n0 < 2 (n0={ds.n0})", {"n0": ds.n0})


def _model_r2(y: np.ndarray, y_hat: np.ndarray) -> Optional[float]:
    if np.all(y == y[0]):
        return None
    return r_squared(y, y_hat)


def _report(
    method: Method,
    ds: ExperimentDataset,
    adjusted: np.ndarray,
    level: float,
    fit: Optional[OlsFit] = None,
    **extra,
) -> EstimateReport:
    treated = ds.treated
    a1 = adjusted[treated]
    a0 = adjusted[~treated]
    n, n1, n0 = ds.n, a1.shape[0], a0.shape[0]

    tau_hat = float(a1.mean() - a0.mean())
    sigma2_hat = max(0.0, n * (sample_variance(a1) / n1 + sample_variance(a0) / n0))
    se = float(np.sqrt(sigma2_hat / n))
    half = float(norm.ppf((1.0 + level) / 2.0)) * se

    report = EstimateReport(
        method=method,
        tau_hat=tau_hat,
        sigma2_hat=sigma2_hat,
        se=se,
        ci_low=tau_hat - half,
        ci_high=tau_hat + half,
        level=level,
        n=n,
        n1=n1,
        n0=n0,
        rank_deficient=fit.rank_deficient if fit is not None else False,
        ridge_used=fit.ridge_used if fit is not None else 0.0,
        **extra,
    )
    logger.debug(f"{ds.experiment_id} {method}: tau={tau_hat:.6g}, sigma2={sigma2_hat:.6g}")
    return report


def _predictions(ds: ExperimentDataset, pred: Predictor) -> np.ndarray:
    f_hat = np.asarray(pred.predict(ds.x), dtype=float)
    if f_hat.shape != (ds.n,):
        raise AlignmentError(f"predictor returned shape {f_hat.shape} for {ds.n} rows")
    if not np.all(np.isfinite(f_hat)):
        raise AlignmentError("predictor returned non-finite values")
    return f_hat


def _require_imputed(ds: ExperimentDataset) -> None:
    if np.isnan(ds.x).any():
        raise ContractError("pre-experiment covariates contain missing values, impute them first")


def estimate_diff(ds: ExperimentDataset, level: float = 0.95) -> EstimateReport:
    """Разность средних Ȳ1 - Ȳ0"""
    _check_level(level)
    _check_arms(ds)
    return _report("DIFF", ds, ds.y, level)


def estimate_cuped(ds: ExperimentDataset, level: float = 0.95) -> EstimateReport:
    """
    CUPED: линейная поправка по X с θ из общего МНК Y на X.

    При вырожденной матрице X используется ridge (флаги в отчете).
    """
    _check_level(level)
    _check_arms(ds)
    _require_imputed(ds)

    fit = ols_fit(ds.x, ds.y)
    adjusted = ds.y - ds.x @ fit.coefficients if ds.d else ds.y
    return _report(
        "CUPED",
        ds,
        adjusted,
        level,
        fit=fit,
        theta_hat=fit.coefficients.tolist(),
        r2_model=_model_r2(ds.y, fit.fitted(ds.x)),
    )


def estimate_cupac(ds: ExperimentDataset, pred: Predictor, level: float = 0.95) -> EstimateReport:
    """
    CUPAC: из Y вычитается предсказание модели f̂(X).

    r2_model считается in-sample по f̂(X).
    """
    _check_level(level)
    _check_arms(ds)
    if pred.kind != "external":
        _require_imputed(ds)

    f_hat = _predictions(ds, pred)
    return _report("CUPAC", ds, ds.y - f_hat, level, r2_model=_model_r2(ds.y, f_hat))


def _check_subset(ds: ExperimentDataset, z_subset: Sequence[int]) -> list:
    if ds.m == 0:
        raise ContractError("no in-experiment covariates")
    subset = [int(j) for j in z_subset]
    if not subset:
        raise ContractError("z_subset is empty")
    bad = [j for j in subset if j < 0 or j >= ds.m]
    if bad:
        raise ContractError(f"z_subset indices out of range [0, {ds.m}): {bad}")
    if len(set(subset)) != len(subset):
        raise ContractError(f"z_subset has duplicate indices: {subset}")
    return subset


def estimate_combined(
    ds: ExperimentDataset,
    pred: Predictor,
    z_subset: Sequence[int],
    level: float = 0.95,
) -> EstimateReport:
    """
    Комбинированный оценщик.

    1. Остатки R = Y - f̂(X).
    2. γ̂ — общий МНК R на выбранных колонках Z.
    3. Разность средних R - γ̂ᵀZ.

    Args:
        ds: датасет
        pred: модель исхода
        z_subset: индексы колонок Z (непустой список)
        level: уровень доверия

    Raises:
        ContractError: пустой или некорректный z_subset, нет колонок Z
    """
    _check_level(level)
    subset = _check_subset(ds, z_subset)
    _check_arms(ds)
    if pred.kind != "external":
        _require_imputed(ds)

    f_hat = _predictions(ds, pred)
    residual = ds.y - f_hat
    z = ds.z[:, subset]
    fit = ols_fit(z, residual)
    adjusted = residual - z @ fit.coefficients

    return _report(
        "COMBINED",
        ds,
        adjusted,
        level,
        fit=fit,
        gamma_hat=fit.coefficients.tolist(),
        z_names=[ds.z_names[j] for j in subset],
        r2_model=_model_r2(ds.y, f_hat + fit.fitted(z)),
    )
