from typing import Optional


class AbvrError(Exception):
    """Базовое исключение приложения"""

    def __init__(self, message: str, details: Optional[dict] = None):
        self.message = message
        self.details = details or {}
        super().__init__(self.message)


class InputError(AbvrError):
    """Ошибка во входных данных пользователя (CLI: код выхода 2)"""

    pass


class ParseError(InputError):
    """Ошибка разбора CSV/JSON"""

    def __init__(self, message: str, line: Optional[int] = None, details: Optional[dict] = None):
        self.line = line
        details = dict(details or {})
        if line is not None:
            details["line"] = line
        super().__init__(message, details)


class DomainError(InputError):
    """Значение вне допустимой области"""

    def __init__(
        self,
        message: str,
        row: Optional[int] = None,
        column: Optional[str] = None,
        details: Optional[dict] = None,
    ):
        self.row = row
        self.column = column
        details = dict(details or {})
        if row is not None:
            details["row"] = row
        if column is not None:
            details["column"] = column
        super().__init__(message, details)


class ContractError(InputError):
    """Нарушено предусловие операции (размерности, схемы, индексы)"""

    pass


class AlignmentError(InputError):
    """Внешние предсказания не совпадают с датасетом"""

    pass


class DegenerateInputError(InputError):
    """Вырожденный вход: мало наблюдений, нулевая дисперсия"""

    pass


class ReplicationError(AbvrError):
    """Сбой репликации Monte Carlo"""

    def __init__(self, message: str, seed: int, n: int, replication: int):
        self.seed = seed
        self.n = n
        self.replication = replication
        super().__init__(message, {"seed": seed, "n": n, "replication": replication})
