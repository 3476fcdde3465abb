import sys
from typing import Optional

from loguru import logger

from .config import Settings, get_settings


def setup_logging(debug: Optional[bool] = None, settings: Optional[Settings] = None) -> None:
    """Настройка логирования: stderr + ошибки в файл"""
    settings = settings or get_settings()
    if debug is None:
        debug = settings.debug

    # Удаляем все стандартные обработчики
    logger.remove()

    # stdout занят JSON-отчетами, поэтому консольный вывод только в stderr
    logger.add(
        sys.stderr,
        format="{time:HH:mm:ss} | {level: <8} | {name}:{function} - {message}",
        level="DEBUG" if debug else "WARNING",
        backtrace=False,
        diagnose=False,
    )

    file_format = "{time:YYYY-MM-DD HH:mm:ss} | {level: <8} | {message}"

    settings.log_path.mkdir(parents=True, exist_ok=True)
    log_file = settings.log_path / "abvr-error-{time:YYYY-MM-DD}.log"
    logger.add(
        log_file,
        format=file_format,
        level="ERROR",
        rotation="1 day",
        retention="30 days",
        compression="gz",
        encoding="utf-8",
        backtrace=False,
        diagnose=False,
    )
