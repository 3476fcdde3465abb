"""
Загрузка, проверка и нормализация данных экспериментов
"""

from abvr.ingest.loader import load_experiment_csv, load_experiment_dir, write_experiment_csv
from abvr.ingest.validation import validate_dataset
from abvr.ingest.imputation import impute_missing_pre

__all__ = [
    "load_experiment_csv",
    "load_experiment_dir",
    "write_experiment_csv",
    "validate_dataset",
    "impute_missing_pre",
]
