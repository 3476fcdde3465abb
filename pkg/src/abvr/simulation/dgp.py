"""
Аддитивная модель данных Y = g(X) + h(Z) + tau*W + eps.

X ~ N(0, I_d); Z_j = rho*X_j + sqrt(1 - rho^2)*xi_j, поэтому Var[Z] = I_m и
Cov(X_j, Z_j) = rho; W ~ Bernoulli(p) независимо от (X, Z, eps).
Кубическая h — стандартизованный полином Эрмита He3(z)/sqrt(6) = (z^3 - 3z)/sqrt(6),
для него E[He3(Z_j) | X] = rho^3 * He3(X_j).
"""

import math
from typing import Optional

import numpy as np

from ..core.dataset import ExperimentDataset
from ..core.exceptions import ContractError
from ..core.models import DGPConfig

_HERMITE_SCALE = math.sqrt(6.0)


def check_config(cfg: DGPConfig) -> None:
    if cfg.m > cfg.d and cfg.rho != 0.0:
        raise ContractError(f"m={cfg.m} > d={cfg.d} requires rho = 0, got rho={cfg.rho}")
    if cfg.h_kind == "cubic" and cfg.is_shifted:
        raise ContractError("z_shift is only supported for linear h")


def hermite3(z: np.ndarray) -> np.ndarray:
    """Стандартизованный He3: среднее 0, дисперсия 1 при z ~ N(0, 1)"""
    return (z**3 - 3.0 * z) / _HERMITE_SCALE


def coupled_columns(x: np.ndarray, m: int) -> np.ndarray:
    """Первые m столбцов X (недостающие заполняются нулями)"""
    out = np.zeros((x.shape[0], m))
    k = min(m, x.shape[1])
    out[:, :k] = x[:, :k]
    return out


def h_values(cfg: DGPConfig, z: np.ndarray) -> np.ndarray:
    """h(Z) для линейной или кубической формы"""
    beta_h = np.asarray(cfg.beta_h, dtype=float)
    if cfg.m == 0:
        return np.zeros(z.shape[0])
    if cfg.h_kind == "cubic":
        return hermite3(z) @ beta_h
    return z @ beta_h


def conditional_h(cfg: DGPConfig, x: np.ndarray) -> np.ndarray:
    """E[h(Z) | X] без учета сдвига z_shift"""
    if cfg.m == 0:
        return np.zeros(x.shape[0])
    beta_h = np.asarray(cfg.beta_h, dtype=float)
    base = coupled_columns(x, cfg.m)
    if cfg.h_kind == "cubic":
        return cfg.rho**3 * (hermite3(base) @ beta_h)
    return cfg.rho * (base @ beta_h)


def true_ate(cfg: DGPConfig) -> float:
    """tau + beta_h·delta (сдвиг Z под воздействием добавляет эффект через h)"""
    return float(cfg.tau + np.dot(cfg.beta_h, cfg.shift)) if cfg.m else float(cfg.tau)


def true_outcome_model(cfg: DGPConfig, x) -> np.ndarray:
    """
    Истинная f(X) = g(X) + E[h(Z) | X] + true_ate * p.

    Args:
        cfg: параметры модели
        x: матрица n×d
    """
    check_config(cfg)
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[1] != cfg.d:
        raise ContractError(f"x must have {cfg.d} columns, got shape {x.shape}")
    g = x @ np.asarray(cfg.beta_g, dtype=float) if cfg.d else np.zeros(x.shape[0])
    return g + conditional_h(cfg, x) + true_ate(cfg) * cfg.p


def generate_additive(
    cfg: DGPConfig, n: int, seed: Optional[int] = None, with_ids: bool = False
) -> ExperimentDataset:
    """
    Датасет из аддитивной модели.

    Порядок генерации фиксирован: X, xi, eps, W. При одинаковом seed
    результат одинаков побитно.

    Args:
        cfg: параметры модели
        n: число юнитов
        seed: зерно (по умолчанию cfg.seed)
        with_ids: заполнить unit_ids строками "1".."n"

    Raises:
        ContractError: m > d при rho != 0, сдвиг Z для кубической h
    """
    check_config(cfg)
    if n < 1:
        raise ContractError(f"n must be positive, got {n}")
    seed = cfg.seed if seed is None else seed
    rng = np.random.default_rng(seed)

    x = rng.standard_normal((n, cfg.d))
    xi = rng.standard_normal((n, cfg.m))
    eps = rng.standard_normal(n)
    w = (rng.random(n) < cfg.p).astype(float)

    z = cfg.rho * coupled_columns(x, cfg.m) + math.sqrt(1.0 - cfg.rho**2) * xi
    if cfg.is_shifted:
        z = z + np.outer(w, np.asarray(cfg.shift, dtype=float))

    g = x @ np.asarray(cfg.beta_g, dtype=float) if cfg.d else np.zeros(n)
    y = g + h_values(cfg, z) + cfg.tau * w + cfg.sigma_eps * eps

    return ExperimentDataset(
        w=w,
        y=y,
        x=x,
        z=z,
        x_names=tuple(f"x_{j + 1}" for j in range(cfg.d)),
        z_names=tuple(f"z_{j + 1}" for j in range(cfg.m)),
        experiment_id=f"sim-{seed}",
        unit_ids=tuple(str(i + 1) for i in range(n)) if with_ids else None,
    )
