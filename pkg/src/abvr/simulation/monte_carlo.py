"""
Monte Carlo по аддитивной модели: для каждого n из сетки и каждой
репликации r генерируется датасет с зерном cfg.seed + r, считаются
запрошенные оценщики, результаты агрегируются в порядке r.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Literal, Optional, Sequence

import numpy as np
from loguru import logger

from ..core.exceptions import AbvrError, ContractError, InputError, ReplicationError
from ..core.models import (
    DGPConfig,
    EstimateReport,
    MCCell,
    MCErrorPoint,
    MCReport,
    MCSelectionPanel,
    Method,
    SelectionConfig,
)
from ..estimators.adjusted import estimate_combined, estimate_cuped, estimate_cupac, estimate_diff
from ..predictors.base import Predictor
from ..predictors.boosting import fit_gbt_predictor
from ..predictors.external import ExternalPredictor
from ..predictors.linear import fit_linear_predictor
from ..selection.selector import select_covariates
from ..utils.validators import ALL_METHODS
from .dgp import check_config, generate_additive, true_ate, true_outcome_model
from .oracle import oracle_variances

PredictorMode = Literal["oracle_f", "fit_linear", "fit_gbt"]

MIN_VARIANCE_REPLICATIONS = 100


@dataclass
class _Replication:
    tau_hat: Dict[str, float] = field(default_factory=dict)
    sigma2_hat: Dict[str, float] = field(default_factory=dict)
    covered: Dict[str, bool] = field(default_factory=dict)
    gamma_error: Optional[float] = None
    f_error: Optional[float] = None
    selected: Optional[FrozenSet[str]] = None


def _fit_predictor(mode: PredictorMode, cfg: DGPConfig, x: np.ndarray, y: np.ndarray) -> Predictor:
    if mode == "oracle_f":
        return ExternalPredictor(true_outcome_model(cfg, x))
    if mode == "fit_linear":
        return fit_linear_predictor(x, y)
    return fit_gbt_predictor(x, y)


def _as_combined(report: EstimateReport) -> EstimateReport:
    # Пустой набор Z: комбинированный оценщик совпадает с CUPAC
    return report.model_copy(update={"method": "COMBINED", "gamma_hat": [], "z_names": []})


def _run_one(
    cfg: DGPConfig,
    n: int,
    r: int,
    methods: Sequence[Method],
    mode: PredictorMode,
    level: float,
    selection: Optional[SelectionConfig],
    gamma_true: Optional[np.ndarray],
) -> _Replication:
    ds = generate_additive(cfg, n, seed=cfg.seed + r)
    out = _Replication()
    reports: Dict[str, EstimateReport] = {}

    if "DIFF" in methods:
        reports["DIFF"] = estimate_diff(ds, level)
    if "CUPED" in methods:
        reports["CUPED"] = estimate_cuped(ds, level)

    subset = list(range(ds.m))
    if selection is not None:
        result = select_covariates([ds], selection)
        out.selected = frozenset(result.selected)
        subset = [ds.z_names.index(name) for name in result.selected]

    if "CUPAC" in methods or "COMBINED" in methods:
        pred = _fit_predictor(mode, cfg, ds.x, ds.y)
        if mode != "oracle_f":
            f_hat = pred.predict(ds.x)
            out.f_error = float(np.sqrt(np.mean((f_hat - true_outcome_model(cfg, ds.x)) ** 2)))

        cupac = estimate_cupac(ds, pred, level)
        if "CUPAC" in methods:
            reports["CUPAC"] = cupac

        if "COMBINED" in methods:
            if subset:
                combined = estimate_combined(ds, pred, subset, level)
            else:
                combined = _as_combined(cupac)
            reports["COMBINED"] = combined

            if gamma_true is not None and combined.gamma_hat and len(subset) == ds.m:
                diff = np.asarray(combined.gamma_hat) - gamma_true
                out.gamma_error = float(np.sqrt(diff @ diff))

    ate = true_ate(cfg)
    for method, report in reports.items():
        out.tau_hat[method] = report.tau_hat
        out.sigma2_hat[method] = report.sigma2_hat
        out.covered[method] = report.ci_low <= ate <= report.ci_high
    return out


def _cell(method: Method, n: int, runs: List[_Replication]) -> MCCell:
    tau = np.array([run.tau_hat[method] for run in runs])
    sigma2 = np.array([run.sigma2_hat[method] for run in runs])
    covered = np.array([run.covered[method] for run in runs], dtype=float)
    sd = float(np.std(tau, ddof=1)) if tau.size > 1 else 0.0
    return MCCell(
        method=method,
        n=n,
        mean_tau_hat=float(tau.mean()),
        tau_hat_sd=sd,
        var_sqrt_n_tau_hat=n * sd**2,
        mean_sigma2_hat=float(sigma2.mean()),
        coverage=float(covered.mean()),
        replications=len(runs),
    )


def _selection_panel(cfg: DGPConfig, n: int, runs: List[_Replication]) -> MCSelectionPanel:
    names = [f"z_{j + 1}" for j in range(cfg.m)]
    null_set = frozenset(name for name, delta in zip(names, cfg.shift) if delta == 0.0)
    chosen = [run.selected or frozenset() for run in runs]
    return MCSelectionPanel(
        n=n,
        selection_rate={name: float(np.mean([name in s for s in chosen])) for name in names},
        exact_recovery_rate=float(np.mean([s == null_set for s in chosen])),
    )


def _slope(points: List[MCErrorPoint]) -> Optional[float]:
    if len(points) < 2 or any(p.mean_error <= 0.0 for p in points):
        return None
    log_n = np.log([p.n for p in points])
    log_err = np.log([p.mean_error for p in points])
    return float(np.polyfit(log_n, log_err, 1)[0])


def _validate(
    cfg: DGPConfig,
    n_grid: Sequence[int],
    replications: int,
    methods: Sequence[Method],
    level: float,
) -> None:
    check_config(cfg)
    if replications < 1:
        raise ContractError("replications must be ≥ 1")
    if not n_grid:
        raise ContractError("n_grid must not be empty")
    if any(n < 4 for n in n_grid):
        raise ContractError(f"every n in n_grid must be ≥ 4, got {list(n_grid)}")
    if not methods:
        raise ContractError("no estimators requested")
    unknown = [m for m in methods if m not in ALL_METHODS]
    if unknown:
        raise ContractError(f"unknown estimators: {unknown}")
    if "COMBINED" in methods and cfg.m == 0:
        raise ContractError("no in-experiment covariates")
    if not 0.0 < level < 1.0:
        raise ContractError(f"level must lie in (0, 1), got {level}")


def run_monte_carlo(
    cfg: DGPConfig,
    n_grid: Sequence[int],
    replications: int,
    methods: Sequence[Method] = ALL_METHODS,
    predictor_mode: PredictorMode = "oracle_f",
    level: float = 0.95,
    selection: Optional[SelectionConfig] = None,
    workers: int = 1,
) -> MCReport:
    """
    Monte Carlo исследование оценщиков.

    Args:
        cfg: параметры модели
        n_grid: размеры выборки
        replications: число репликаций M на каждое n
        methods: оценщики
        predictor_mode: oracle_f (истинная f), fit_linear или fit_gbt
        level: уровень доверительных интервалов
        selection: если задан, в каждой репликации отбираются ковариаты Z
                   и отчет содержит частоты отбора
        workers: число потоков для репликаций

    Returns:
        MCReport; результат не зависит от workers

    Raises:
        ContractError: некорректные аргументы
        InputError: входные данные непригодны для репликации (например, n мало для бустинга)
        ReplicationError: сбой одной из репликаций (с ее зерном)
    """
    _validate(cfg, n_grid, replications, methods, level)
    methods = [m for m in ALL_METHODS if m in methods]
    if replications < MIN_VARIANCE_REPLICATIONS:
        logger.warning(
            f"M={replications} < {MIN_VARIANCE_REPLICATIONS}: оценки дисперсии будут неточными"
        )

    oracle = None if cfg.is_shifted else oracle_variances(cfg)
    gamma_true = None
    if oracle is not None and predictor_mode == "oracle_f" and cfg.m:
        gamma_true = np.asarray(oracle.gamma)

    report = MCReport(
        config=cfg,
        n_grid=list(n_grid),
        replications=replications,
        methods=methods,
        predictor_mode=predictor_mode,
        level=level,
        true_ate=true_ate(cfg),
        oracle_variances=oracle,
    )

    def replicate(n: int, r: int) -> _Replication:
        try:
            return _run_one(cfg, n, r, methods, predictor_mode, level, selection, gamma_true)
        except InputError as e:
            logger.error(f"replication {r} (seed {cfg.seed + r}, n={n}): {e.message}")
            raise
        except AbvrError as e:
            raise ReplicationError(
                f"replication {r} (seed {cfg.seed + r}, n={n}) failed: {e.message}",
                seed=cfg.seed + r,
                n=n,
                replication=r,
            ) from e
        except (ArithmeticError, ValueError, np.linalg.LinAlgError) as e:
            raise ReplicationError(
                f"replication {r} (seed {cfg.seed + r}, n={n}) failed: {e}",
                seed=cfg.seed + r,
                n=n,
                replication=r,
            ) from e

    for n in n_grid:
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                runs = list(pool.map(lambda r, n=n: replicate(n, r), range(replications)))
        else:
            runs = [replicate(n, r) for r in range(replications)]

        report.cells.extend(_cell(method, n, runs) for method in methods)

        gamma = [run.gamma_error for run in runs if run.gamma_error is not None]
        if gamma:
            report.gamma_errors.append(MCErrorPoint(n=n, mean_error=float(np.mean(gamma))))
        f_err = [run.f_error for run in runs if run.f_error is not None]
        if f_err:
            report.f_errors.append(MCErrorPoint(n=n, mean_error=float(np.mean(f_err))))
        if selection is not None:
            report.selection.append(_selection_panel(cfg, n, runs))

        logger.debug(f"Monte Carlo n={n}: {replications} репликаций")

    report.gamma_error_slope = _slope(report.gamma_errors)
    return report
