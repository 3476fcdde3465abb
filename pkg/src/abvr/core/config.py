from functools import lru_cache
from pathlib import Path
from typing import Literal

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


def get_project_root() -> Path:
    """Получить корневую директорию проекта"""
    # core -> abvr -> src -> корень
    return Path(__file__).resolve().parent.parent.parent.parent


class Settings(BaseSettings):
    """Настройки приложения (переменные окружения ABVR_* и .env)"""

    # Logging
    log_path: Path = Field(default=Path("./logs"), validation_alias="ABVR_LOG_PATH")
    debug: bool = Field(default=False, validation_alias="ABVR_DEBUG")

    # Оценивание
    confidence_level: float = Field(default=0.95, validation_alias="ABVR_CONFIDENCE_LEVEL")
    impute_policy: Literal["mean_plus_indicator", "zero_plus_indicator"] = Field(
        default="mean_plus_indicator", validation_alias="ABVR_IMPUTE_POLICY"
    )

    # Отбор in-experiment ковариат
    alpha: float = Field(default=0.05, validation_alias="ABVR_ALPHA")
    selection_test: Literal["welch_t", "mann_whitney"] = Field(
        default="mann_whitney", validation_alias="ABVR_SELECTION_TEST"
    )
    correction: Literal["none", "bonferroni", "holm"] = Field(
        default="none", validation_alias="ABVR_CORRECTION"
    )
    min_nonzero_fraction: float = Field(default=0.01, validation_alias="ABVR_MIN_NONZERO_FRACTION")

    # Monte Carlo
    mc_workers: int = Field(default=1, validation_alias="ABVR_MC_WORKERS")

    model_config = SettingsConfigDict(
        env_file=get_project_root() / ".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
        populate_by_name=True,
    )

    @field_validator("log_path", mode="before")
    @classmethod
    def coerce_log_path(cls, v):
        if isinstance(v, str):
            v = Path(v)
        return v

    @field_validator("confidence_level", "alpha")
    @classmethod
    def validate_open_unit_interval(cls, v: float) -> float:
        if not 0.0 < v < 1.0:
            raise ValueError(f"must lie in (0, 1), got {v}")
        return v

    @field_validator("min_nonzero_fraction")
    @classmethod
    def validate_fraction(cls, v: float) -> float:
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"must lie in [0, 1], got {v}")
        return v

    @field_validator("mc_workers")
    @classmethod
    def validate_workers(cls, v: int) -> int:
        if v < 1:
            raise ValueError(f"must be >= 1, got {v}")
        return v


@lru_cache
def get_settings() -> Settings:
    """Получение настроек с кэшированием"""
    return Settings()
