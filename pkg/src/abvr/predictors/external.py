"""
Предсказания внешней модели, заранее посчитанные для строк датасета
"""

from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np
from loguru import logger

from ..core.dataset import ExperimentDataset
from ..core.exceptions import AlignmentError, ContractError, ParseError
from ..ingest.loader import parse_numeric_column, read_csv_frame
from .base import Predictor

PREDICTION_COLUMN = "f_hat"
ID_COLUMN = "unit_id"


class ExternalPredictor(Predictor):
    """Фиксированный вектор предсказаний в порядке строк датасета"""

    kind = "external"

    def __init__(self, values, unit_ids: Optional[Sequence[str]] = None):
        values = np.array(values, dtype=float, copy=True)
        if values.ndim != 1:
            raise ContractError("external predictions must be a vector")
        if not np.all(np.isfinite(values)):
            raise ContractError("external predictions must be finite")
        values.setflags(write=False)
        self.values = values
        self.unit_ids = tuple(unit_ids) if unit_ids is not None else None

    def predict(self, x) -> np.ndarray:
        rows = np.asarray(x).shape[0]
        if rows != self.values.shape[0]:
            raise ContractError(
                f"external predictor holds {self.values.shape[0]} rows, asked for {rows}"
            )
        return self.values.copy()


def load_external_predictions(path: Union[str, Path], ds: ExperimentDataset) -> ExternalPredictor:
    """
    Загрузка предсказаний f_hat из CSV.

    Форматы: одна колонка f_hat (n строк в порядке датасета) либо
    unit_id,f_hat — тогда строки сопоставляются по unit_id датасета.

    Raises:
        ParseError: нет колонки f_hat
        AlignmentError: не совпадает число строк или набор unit_id
    """
    path = Path(path)
    frame = read_csv_frame(path)
    columns = [str(c) for c in frame.columns]
    if PREDICTION_COLUMN not in columns:
        raise ParseError(f"{path}: header has no '{PREDICTION_COLUMN}' column", line=1)
    values = parse_numeric_column(frame, PREDICTION_COLUMN, allow_missing=False)

    if ID_COLUMN not in columns:
        if values.shape[0] != ds.n:
            raise AlignmentError(
                f"{path.name}: {values.shape[0]} predictions for a dataset of {ds.n} rows",
                {"predictions": int(values.shape[0]), "rows": ds.n},
            )
        return ExternalPredictor(values, ds.unit_ids)

    if ds.unit_ids is None:
        raise AlignmentError(
            f"{path.name}: predictions are keyed by unit_id, dataset has no unit_id"
        )
    ids = [str(u) for u in frame[ID_COLUMN].tolist()]
    by_id = {}
    for unit, value in zip(ids, values):
        if unit in by_id:
            raise AlignmentError(f"{path.name}: duplicate unit_id '{unit}'")
        by_id[unit] = value

    missing = [u for u in ds.unit_ids if u not in by_id]
    if missing or len(by_id) != ds.n:
        raise AlignmentError(
            f"{path.name}: unit_id sets differ ({len(missing)} dataset units without prediction, "
            f"{len(by_id)} predictions for {ds.n} rows)",
            {"missing": missing[:10]},
        )

    logger.debug(f"{path.name}: предсказания сопоставлены по {ID_COLUMN}")
    return ExternalPredictor([by_id[u] for u in ds.unit_ids], ds.unit_ids)
