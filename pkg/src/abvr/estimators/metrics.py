import math

from ..core.exceptions import ContractError, DegenerateInputError
from ..core.models import ComparisonMetrics, EstimateReport


def _sqrt_r2(report: EstimateReport) -> float:
    if report.r2_model is None:
        raise ContractError(f"{report.method} report has no r2_model")
    return math.sqrt(max(report.r2_model, 0.0))


def comparison_metrics(
    diff: EstimateReport, cupac: EstimateReport, combined: EstimateReport
) -> ComparisonMetrics:
    """
    Метрики сравнения комбинированного оценщика с CUPAC и CUPAC с DIFF.

    sqrt_r2_gain = sqrt(R²_combined) - sqrt(R²_CUPAC), R² обрезается снизу нулем;
    vr_* = 1 - sigma2 / sigma2_baseline.

    Raises:
        ContractError: отчеты посчитаны на разных данных или нет r2_model
        DegenerateInputError: sigma2 базового оценщика равна 0
    """
    if not diff.n == cupac.n == combined.n:
        raise ContractError("reports were computed on datasets of different size")
    if diff.sigma2_hat == 0.0:
        raise DegenerateInputError("sigma2 of DIFF is 0, variance ratio is undefined")
    if cupac.sigma2_hat == 0.0:
        raise DegenerateInputError("sigma2 of CUPAC is 0, variance ratio is undefined")

    return ComparisonMetrics(
        sqrt_r2_gain=_sqrt_r2(combined) - _sqrt_r2(cupac),
        vr_cupac_vs_diff=1.0 - cupac.sigma2_hat / diff.sigma2_hat,
        vr_combined_vs_cupac=1.0 - combined.sigma2_hat / cupac.sigma2_hat,
    )
