"""
Общие численные примитивы: групповые средние, выборочная дисперсия,
МНК с ridge-страховкой для вырожденных матриц и средние ранги.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from loguru import logger
from scipy.stats import rankdata

from ..core.dataset import ExperimentDataset
from ..core.exceptions import DegenerateInputError

RIDGE_SCALE = 1e-8


@dataclass(frozen=True)
class GroupSummary:
    """Средние по группам (treatment = 1, control = 0)"""

    n1: int
    n0: int
    y_bar_1: float
    y_bar_0: float
    x_bar_1: np.ndarray
    x_bar_0: np.ndarray
    z_bar_1: np.ndarray
    z_bar_0: np.ndarray


@dataclass(frozen=True)
class OlsFit:
    """
    Результат МНК с intercept.

    Attributes:
        coefficients: вектор длины k
        intercept: свободный член
        rank_deficient: центрированная матрица Грама вырождена
        ridge_used: добавленный ridge-параметр (0, если не понадобился)
    """

    coefficients: np.ndarray
    intercept: float
    rank_deficient: bool = False
    ridge_used: float = 0.0

    def fitted(self, design: np.ndarray) -> np.ndarray:
        design = np.asarray(design, dtype=float)
        if design.shape[1] == 0:
            return np.full(design.shape[0], self.intercept)
        return self.intercept + design @ self.coefficients


def group_summary(ds: ExperimentDataset) -> GroupSummary:
    """Точные средние по каждой группе"""
    treated = ds.treated
    n1 = int(treated.sum())
    n0 = ds.n - n1
    if n1 < 1 or n0 < 1:
        raise DegenerateInputError(f"both arms must be non-empty (n1={n1}, n0={n0})")

    return GroupSummary(
        n1=n1,
        n0=n0,
        y_bar_1=float(ds.y[treated].mean()),
        y_bar_0=float(ds.y[~treated].mean()),
        x_bar_1=ds.x[treated].mean(axis=0),
        x_bar_0=ds.x[~treated].mean(axis=0),
        z_bar_1=ds.z[treated].mean(axis=0),
        z_bar_0=ds.z[~treated].mean(axis=0),
    )


def sample_variance(v) -> float:
    """Несмещенная выборочная дисперсия (знаменатель len - 1)"""
    v = np.asarray(v, dtype=float)
    if v.size < 2:
        raise DegenerateInputError(f"sample variance needs at least 2 values, got {v.size}")
    return float(np.var(v, ddof=1))


def ols_fit(design, response) -> OlsFit:
    """
    МНК с intercept через QR-разложение центрированной матрицы.

    Если центрированная матрица вырождена (по диагонали R из QR с
    перестановками столбцов), решается ridge-система
    (G + lambda*I) beta = Xc^T yc с lambda = 1e-8 * trace(G) / k.

    Args:
        design: матрица n×k
        response: вектор длины n

    Returns:
        OlsFit
    """
    X = np.asarray(design, dtype=float)
    y = np.asarray(response, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    n, k = X.shape
    if n == 0:
        raise DegenerateInputError("ols_fit needs at least one observation")
    if y.shape[0] != n:
        raise DegenerateInputError(f"design has {n} rows, response has {y.shape[0]}")

    x_mean = X.mean(axis=0)
    y_mean = float(y.mean())
    if k == 0:
        return OlsFit(coefficients=np.zeros(0), intercept=y_mean)

    Xc = X - x_mean
    yc = y - y_mean

    q, r, perm = scipy.linalg.qr(Xc, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    tol = np.finfo(float).eps * max(n, k) * (diag[0] if diag.size else 0.0)
    full_rank = diag.size == k and diag[0] > 0.0 and bool(np.all(diag > tol))

    if full_rank:
        beta_perm = scipy.linalg.solve_triangular(r, q.T @ yc)
        beta = np.empty(k)
        beta[perm] = beta_perm
        return OlsFit(coefficients=beta, intercept=y_mean - float(x_mean @ beta))

    gram = Xc.T @ Xc
    trace = float(np.trace(gram))
    ridge = RIDGE_SCALE * trace / k if trace > 0.0 else RIDGE_SCALE
    beta = scipy.linalg.solve(gram + ridge * np.eye(k), Xc.T @ yc, assume_a="pos")
    logger.warning(f"Матрица плана вырождена (n={n}, k={k}), ridge={ridge:.3g}")
    return OlsFit(
        coefficients=beta,
        intercept=y_mean - float(x_mean @ beta),
        rank_deficient=True,
        ridge_used=ridge,
    )


def midranks(v) -> np.ndarray:
    """Средние ранги (одинаковым значениям — среднее их позиций)"""
    v = np.asarray(v, dtype=float)
    return rankdata(v, method="average").astype(float)
