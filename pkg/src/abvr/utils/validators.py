"""
Разбор и проверка значений опций командной строки
"""

import json
from dataclasses import dataclass
from pathlib import Path
from typing import List, Literal, Optional, Sequence, Tuple

from ..core.exceptions import ContractError, ParseError
from ..core.models import Method

ALL_METHODS: Tuple[Method, ...] = ("DIFF", "CUPED", "CUPAC", "COMBINED")

PredictorSpec = Tuple[Literal["linear", "gbt", "external"], Optional[Path]]


@dataclass(frozen=True)
class ZSelection:
    """
    Способ выбора колонок Z для комбинированного оценщика.

    mode: all (все z-колонки), auto (отбор на самом датасете),
    names (явный список), file (JSON с отчетом select или списком имен)
    """

    mode: Literal["all", "auto", "names", "file"]
    names: Tuple[str, ...] = ()
    path: Optional[Path] = None


def parse_methods(value: str) -> List[str]:
    """diff|cuped|cupac|combined|all, допускается список через запятую"""
    items = [v.strip().upper() for v in value.split(",") if v.strip()]
    if not items:
        raise ContractError("--method must not be empty")
    if "ALL" in items:
        return list(ALL_METHODS)
    unknown = [v for v in items if v not in ALL_METHODS]
    if unknown:
        raise ContractError(f"unknown method(s): {', '.join(v.lower() for v in unknown)}")
    return [m for m in ALL_METHODS if m in items]


def parse_predictor(value: str) -> PredictorSpec:
    """
    linear | gbt | external:<path>

    Returns:
        (вид модели, путь к файлу предсказаний или None)
    """
    value = value.strip()
    if value in ("linear", "gbt"):
        return value, None  # type: ignore[return-value]
    if value.startswith("external:"):
        path = value[len("external:") :].strip()
        if not path:
            raise ContractError("--predictor external: needs a file path")
        return "external", Path(path)
    raise ContractError(f"unknown predictor '{value}', expected linear, gbt or external:<path>")


def normalize_z_name(name: str, prefix: str = "z_") -> str:
    """Имя колонки Z с префиксом (revenue -> z_revenue)"""
    name = name.strip()
    return name if name.startswith(prefix) else f"{prefix}{name}"


def parse_z_select(value: Optional[str]) -> ZSelection:
    """comma list | auto | file:<path>; пустое значение — все z-колонки"""
    if value is None or not value.strip():
        return ZSelection(mode="all")
    value = value.strip()
    if value == "auto":
        return ZSelection(mode="auto")
    if value.startswith("file:"):
        path = value[len("file:") :].strip()
        if not path:
            raise ContractError("--z-select file: needs a file path")
        return ZSelection(mode="file", path=Path(path))
    names = tuple(normalize_z_name(v) for v in value.split(",") if v.strip())
    if not names:
        raise ContractError("--z-select lists no covariates")
    return ZSelection(mode="names", names=names)


def read_selection_file(path: Path) -> List[str]:
    """
    Имена ковариат из JSON: отчет команды select (поле selected)
    или просто список строк.
    """
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}: invalid JSON: {e.msg}", line=e.lineno) from e

    if isinstance(data, dict):
        data = data.get("selected")
    if not isinstance(data, list) or not all(isinstance(v, str) for v in data):
        raise ParseError(f"{path}: expected a select report or a list of covariate names")
    return [normalize_z_name(v) for v in data]


def resolve_z_indices(names: Sequence[str], z_names: Sequence[str]) -> List[int]:
    """Индексы колонок Z по именам; неизвестное имя -> ContractError"""
    unknown = [n for n in names if n not in z_names]
    if unknown:
        raise ContractError(f"unknown in-experiment covariates: {unknown}")
    return [list(z_names).index(n) for n in names]
