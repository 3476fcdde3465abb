"""
Диагностика датасета эксперимента. Никогда не бросает исключений:
все проблемы попадают в ValidationReport.
"""

import numpy as np

from ..core.dataset import ExperimentDataset
from ..core.models import ValidationIssue, ValidationReport


def _is_constant(column: np.ndarray) -> bool:
    return column.size == 0 or bool(np.all(column == column[0]))


def validate_dataset(ds: ExperimentDataset) -> ValidationReport:
    """
    Проверка датасета перед оцениванием.

    Ошибки: n1 < 2, n0 < 2, постоянная z-колонка.
    Предупреждения: z-колонка постоянна внутри одной из групп.
    Также считается доля пропусков по каждой x-колонке.
    """
    issues = []

    if ds.n1 < 2:
        issues.append(ValidationIssue(severity="error", message=f"n1 < 2 (n1={ds.n1})"))
    if ds.n0 < 2:
        issues.append(ValidationIssue(severity="error", message=f"n0 < 2 (n0={ds.n0})"))

    treated = ds.treated
    for j, name in enumerate(ds.z_names):
        column = ds.z[:, j]
        if _is_constant(column):
            issues.append(
                ValidationIssue(
                    severity="error",
                    column=name,
                    message=f"in-experiment covariate '{name}' has zero variance",
                )
            )
            continue
        for arm, mask in (("treatment", treated), ("control", ~treated)):
            if mask.sum() >= 2 and _is_constant(column[mask]):
                issues.append(
                    ValidationIssue(
                        severity="warning",
                        column=name,
                        message=f"in-experiment covariate '{name}' is constant in the {arm} arm",
                    )
                )

    missing = {}
    for j, name in enumerate(ds.x_names):
        missing[name] = float(np.isnan(ds.x[:, j]).mean()) if ds.n else 0.0

    return ValidationReport(issues=issues, missing_fraction_per_x_column=missing)
