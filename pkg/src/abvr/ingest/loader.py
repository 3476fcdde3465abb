"""
Загрузка и выгрузка датасетов эксперимента в CSV.

Формат: UTF-8, заголовок обязателен, разделитель ',', десятичная точка '.',
пустая ячейка = пропуск. Колонки: w (0/1), y, x_<name>, z_<name> в любом
порядке, необязательная unit_id.
"""

import csv
import math
import re
from pathlib import Path
from typing import List, Optional, Union

import numpy as np
import pandas as pd
from loguru import logger

from ..core.dataset import ExperimentDataset
from ..core.exceptions import DomainError, ParseError
from ..core.models import ColumnSchema
from ..utils.fs import list_csv_files

_LINE_RE = re.compile(r"line (\d+)")


def check_field_counts(path: Path) -> None:
    """Каждая запись должна иметь столько же полей, сколько заголовок"""
    with open(path, encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None:
            return
        expected = len(header)
        for row in reader:
            if not row:
                continue
            if len(row) != expected:
                raise ParseError(
                    f"{path}: line {reader.line_num}: expected {expected} fields, got {len(row)}",
                    line=reader.line_num,
                )


def read_csv_frame(path: Path) -> pd.DataFrame:
    """CSV как таблица строк; ошибки формата -> ParseError"""
    try:
        frame = pd.read_csv(
            path,
            dtype=str,
            keep_default_na=False,
            na_filter=False,
            encoding="utf-8",
            skip_blank_lines=True,
        )
    except FileNotFoundError:
        raise
    except pd.errors.EmptyDataError as e:
        raise ParseError(f"{path}: file is empty or has no header", line=1) from e
    except pd.errors.ParserError as e:
        match = _LINE_RE.search(str(e))
        line = int(match.group(1)) if match else None
        raise ParseError(f"{path}: malformed CSV: {e}", line=line) from e
    except UnicodeDecodeError as e:
        raise ParseError(f"{path}: file is not valid UTF-8") from e
    check_field_counts(path)
    return frame


def _parse_number(raw, row: int, column: str, allow_missing: bool) -> float:
    """Разбор одной ячейки; row — номер строки данных (с 1)"""
    text = "" if raw is None or (isinstance(raw, float) and math.isnan(raw)) else str(raw).strip()
    if text == "":
        if allow_missing:
            return math.nan
        raise DomainError(
            f"row {row} (line {row + 1}): missing value in column '{column}'",
            row=row,
            column=column,
        )
    try:
        value = float(text)
    except ValueError as e:
        raise DomainError(
            f"row {row} (line {row + 1}): '{text}' is not a number in column '{column}'",
            row=row,
            column=column,
        ) from e
    if not math.isfinite(value):
        raise DomainError(
            f"row {row} (line {row + 1}): non-finite value '{text}' in column '{column}'",
            row=row,
            column=column,
        )
    return value


def parse_numeric_column(frame: pd.DataFrame, column: str, allow_missing: bool) -> np.ndarray:
    """Числовая колонка; пропуск -> NaN, если allow_missing"""
    return np.array(
        [
            _parse_number(raw, i + 1, column, allow_missing)
            for i, raw in enumerate(frame[column].tolist())
        ],
        dtype=float,
    )


def load_experiment_csv(
    path: Union[str, Path],
    schema: Optional[ColumnSchema] = None,
    experiment_id: Optional[str] = None,
) -> ExperimentDataset:
    """
    Загрузка датасета эксперимента из CSV.

    Args:
        path: путь к файлу
        schema: соглашение об именах колонок (по умолчанию w, y, x_*, z_*)
        experiment_id: идентификатор эксперимента (по умолчанию имя файла без расширения)

    Returns:
        ExperimentDataset; пустые ячейки x_* хранятся как NaN

    Raises:
        ParseError: некорректный CSV или нет обязательной колонки
        DomainError: w не 0/1, пропуск в w/y/z_*, нечисловое значение
    """
    schema = schema or ColumnSchema()
    path = Path(path)
    frame = read_csv_frame(path)
    columns = [str(c) for c in frame.columns]

    for required in (schema.treatment, schema.outcome):
        if required not in columns:
            raise ParseError(f"{path}: header has no '{required}' column", line=1)

    x_names = [c for c in columns if c.startswith(schema.pre_prefix)]
    z_names = [c for c in columns if c.startswith(schema.in_prefix)]
    known = {schema.treatment, schema.outcome, schema.unit_id, *x_names, *z_names}
    unknown = [c for c in columns if c not in known]
    if unknown:
        logger.warning(f"{path.name}: неизвестные колонки проигнорированы: {unknown}")

    w = parse_numeric_column(frame, schema.treatment, allow_missing=False)
    bad = np.flatnonzero((w != 0.0) & (w != 1.0))
    if bad.size:
        row = int(bad[0]) + 1
        raw = frame[schema.treatment].iloc[row - 1]
        raise DomainError(
            f"row {row} (line {row + 1}): w must be 0 or 1, got {raw!r}",
            row=row,
            column=schema.treatment,
        )
    y = parse_numeric_column(frame, schema.outcome, allow_missing=False)

    n = len(frame)
    x = np.empty((n, 0))
    if x_names:
        x = np.column_stack([parse_numeric_column(frame, c, True) for c in x_names])
    z = np.empty((n, 0))
    if z_names:
        z = np.column_stack([parse_numeric_column(frame, c, False) for c in z_names])

    unit_ids = None
    if schema.unit_id in columns:
        unit_ids = tuple(str(u) for u in frame[schema.unit_id].tolist())

    ds = ExperimentDataset(
        w=w,
        y=y,
        x=x,
        z=z,
        x_names=tuple(x_names),
        z_names=tuple(z_names),
        experiment_id=experiment_id or path.stem,
        unit_ids=unit_ids,
    )
    logger.debug(f"Загружен {path.name}: n={ds.n}, d={ds.d}, m={ds.m}")
    return ds


def load_experiment_dir(
    directory: Union[str, Path], schema: Optional[ColumnSchema] = None
) -> List[ExperimentDataset]:
    """Все *.csv директории в порядке имен файлов"""
    files = list_csv_files(directory)
    if not files:
        raise ParseError(f"{directory}: no CSV files found")
    return [load_experiment_csv(p, schema) for p in files]


def _cell(value: float) -> str:
    return "" if math.isnan(value) else repr(float(value))


def write_experiment_csv(
    ds: ExperimentDataset, path: Union[str, Path], schema: Optional[ColumnSchema] = None
) -> Path:
    """
    Выгрузка датасета в CSV в формате загрузчика.

    Вещественные числа пишутся через repr (точный round-trip), пропуски
    в X — пустыми ячейками.
    """
    schema = schema or ColumnSchema()
    path = Path(path)
    data = {}
    if ds.unit_ids is not None:
        data[schema.unit_id] = list(ds.unit_ids)
    data[schema.treatment] = [str(int(v)) for v in ds.w]
    data[schema.outcome] = [_cell(v) for v in ds.y]
    for j, name in enumerate(ds.x_names):
        data[name] = [_cell(v) for v in ds.x[:, j]]
    for j, name in enumerate(ds.z_names):
        data[name] = [_cell(v) for v in ds.z[:, j]]

    pd.DataFrame(data, dtype=str).to_csv(path, index=False, encoding="utf-8", lineterminator="\n")
    return path
