"""
Теоретические дисперсии оценщиков в аддитивной модели.

v_diff = Var[g(X) + E[h|X]] + E[Var[h|X]] + sigma_eps^2
v_cupac = E[Var[h|X]] + sigma_eps^2
v_combined = v_cupac - ||E[Cov[Z, h | X]]||^2

v_* — дисперсии остатков; sigma2_* = (1/p + 1/(1-p)) * v_* — асимптотические
дисперсии sqrt(n)*(tau_hat - tau).
"""

import math

import numpy as np
from loguru import logger

from ..core.exceptions import ContractError
from ..core.models import DGPConfig, OracleVariances
from .dgp import check_config, conditional_h, coupled_columns, h_values

ORACLE_SEED = 20_240_601
ORACLE_SAMPLES = 10_000_000
ORACLE_CHUNK = 1_000_000


def _finish(cfg: DGPConfig, v_diff: float, v_cupac: float, gamma: np.ndarray, approximate: bool):
    v_combined = v_cupac - float(gamma @ gamma)
    inflation = 1.0 / cfg.p + 1.0 / (1.0 - cfg.p)
    return OracleVariances(
        v_diff=v_diff,
        v_cupac=v_cupac,
        v_combined=v_combined,
        inflation=inflation,
        sigma2_diff=inflation * v_diff,
        sigma2_cupac=inflation * v_cupac,
        sigma2_combined=inflation * v_combined,
        gamma=gamma.tolist(),
        approximate=approximate,
    )


def _linear(cfg: DGPConfig) -> OracleVariances:
    beta_g = np.asarray(cfg.beta_g, dtype=float)
    beta_h = np.asarray(cfg.beta_h, dtype=float)
    rho2 = cfg.rho**2
    noise = cfg.sigma_eps**2
    shared = min(cfg.d, cfg.m)
    norm_h = float(beta_h @ beta_h)

    v_diff = (
        float(beta_g @ beta_g)
        + norm_h
        + 2.0 * cfg.rho * float(beta_g[:shared] @ beta_h[:shared])
        + noise
    )
    v_cupac = (1.0 - rho2) * norm_h + noise
    gamma = (1.0 - rho2) * beta_h
    return _finish(cfg, v_diff, v_cupac, gamma, approximate=False)


def _monte_carlo(cfg: DGPConfig, samples: int) -> OracleVariances:
    rng = np.random.default_rng(ORACLE_SEED)
    beta_g = np.asarray(cfg.beta_g, dtype=float)
    scale = math.sqrt(1.0 - cfg.rho**2)

    total = 0
    sum_mean = 0.0
    sum_mean2 = 0.0
    sum_cond = 0.0
    cov = np.zeros(cfg.m)
    while total < samples:
        size = min(ORACLE_CHUNK, samples - total)
        x = rng.standard_normal((size, cfg.d))
        xi = rng.standard_normal((size, cfg.m))
        base = coupled_columns(x, cfg.m)
        z = cfg.rho * base + scale * xi

        h_mean = conditional_h(cfg, x)
        h_centered = h_values(cfg, z) - h_mean
        # g(X) + E[h | X]
        mean_part = (x @ beta_g if cfg.d else 0.0) + h_mean

        sum_mean += float(np.sum(mean_part))
        sum_mean2 += float(np.sum(mean_part**2))
        sum_cond += float(np.sum(h_centered**2))
        cov += (z - cfg.rho * base).T @ h_centered
        total += size

    noise = cfg.sigma_eps**2
    v_cupac = sum_cond / total + noise
    v_diff = sum_mean2 / total - (sum_mean / total) ** 2 + v_cupac
    return _finish(cfg, v_diff, v_cupac, cov / total, approximate=True)


def oracle_variances(cfg: DGPConfig, samples: int = ORACLE_SAMPLES) -> OracleVariances:
    """
    Теоретические дисперсии для конфигурации cfg.

    Для линейной h — точные формулы, gamma = (1 - rho^2) * beta_h.
    Для кубической — интегрирование Monte Carlo (samples точек,
    фиксированное зерно), результат помечается approximate.

    Raises:
        ContractError: задан z_shift (формулы верны только без сдвига)
    """
    check_config(cfg)
    if cfg.is_shifted:
        raise ContractError("oracle variances are defined only for configs without z_shift")
    if cfg.h_kind == "linear":
        return _linear(cfg)

    logger.debug(f"Оракул для кубической h: интегрирование по {samples} точкам")
    return _monte_carlo(cfg, samples)
