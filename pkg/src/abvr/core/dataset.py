"""
Канонический датасет эксперимента.

Один юнит эксперимента = одна строка: флаг воздействия W, исход Y,
pre-experiment ковариаты X (могут содержать NaN до импутации) и
in-experiment ковариаты Z (пропусков не бывает).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .exceptions import ContractError, DomainError


def _frozen(values, ndim: int) -> np.ndarray:
    arr = np.array(values, dtype=float, copy=True)
    if ndim == 2 and arr.ndim == 1 and arr.size == 0:
        arr = arr.reshape(0, 0)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ExperimentDataset:
    """
    Датасет одного эксперимента.

    Attributes:
        w: вектор длины n из 0/1 (1 = treatment)
        y: исход, длина n
        x: матрица n×d pre-experiment ковариат, NaN = пропуск
        z: матрица n×m in-experiment ковариат
        x_names, z_names: имена колонок (с префиксами x_ / z_)
        experiment_id: идентификатор эксперимента
        unit_ids: необязательные идентификаторы юнитов (в расчетах не участвуют)
    """

    w: np.ndarray
    y: np.ndarray
    x: np.ndarray
    z: np.ndarray
    x_names: tuple[str, ...] = ()
    z_names: tuple[str, ...] = ()
    experiment_id: str = "experiment"
    unit_ids: Optional[tuple[str, ...]] = field(default=None)

    def __post_init__(self) -> None:
        w = _frozen(self.w, 1)
        y = _frozen(self.y, 1)
        n = y.shape[0]
        x = _frozen(self.x, 2)
        z = _frozen(self.z, 2)
        if x.size == 0:
            x = _frozen(np.empty((n, 0)), 2)
        if z.size == 0:
            z = _frozen(np.empty((n, 0)), 2)

        if w.ndim != 1 or y.ndim != 1 or x.ndim != 2 or z.ndim != 2:
            raise ContractError("w, y must be vectors and x, z matrices")
        if not w.shape[0] == x.shape[0] == z.shape[0] == n:
            raise ContractError(
                "row counts differ",
                {"w": w.shape[0], "y": n, "x": x.shape[0], "z": z.shape[0]},
            )
        if len(self.x_names) != x.shape[1]:
            raise ContractError(f"x has {x.shape[1]} columns but {len(self.x_names)} names")
        if len(self.z_names) != z.shape[1]:
            raise ContractError(f"z has {z.shape[1]} columns but {len(self.z_names)} names")
        if self.unit_ids is not None and len(self.unit_ids) != n:
            raise ContractError(f"unit_ids has {len(self.unit_ids)} entries, expected {n}")

        bad = np.flatnonzero((w != 0.0) & (w != 1.0))
        if bad.size:
            raise DomainError(
                f"w must be 0 or 1, got {w[bad[0]]!r} at row {bad[0] + 1}",
                row=int(bad[0]) + 1,
                column="w",
            )

        object.__setattr__(self, "w", w)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "x_names", tuple(self.x_names))
        object.__setattr__(self, "z_names", tuple(self.z_names))
        if self.unit_ids is not None:
            object.__setattr__(self, "unit_ids", tuple(str(u) for u in self.unit_ids))

    @property
    def n(self) -> int:
        return int(self.y.shape[0])

    @property
    def n1(self) -> int:
        return int(self.w.sum())

    @property
    def n0(self) -> int:
        return self.n - self.n1

    @property
    def d(self) -> int:
        return int(self.x.shape[1])

    @property
    def m(self) -> int:
        return int(self.z.shape[1])

    @property
    def treated(self) -> np.ndarray:
        """Булева маска treatment-группы"""
        return self.w == 1.0

    def with_x(self, x: np.ndarray, x_names: tuple[str, ...]) -> "ExperimentDataset":
        """Копия датасета с другой матрицей X"""
        return ExperimentDataset(
            w=self.w,
            y=self.y,
            x=x,
            z=self.z,
            x_names=x_names,
            z_names=self.z_names,
            experiment_id=self.experiment_id,
            unit_ids=self.unit_ids,
        )
