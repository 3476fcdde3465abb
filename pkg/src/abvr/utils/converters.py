"""
Конвертеры для сериализации отчетов в детерминированный JSON
"""

import json
import math
from typing import Any

import numpy as np
from pydantic import BaseModel


def to_plain(data: Any) -> Any:
    """
    Привести данные к JSON-совместимым типам Python.

    Модели pydantic раскрываются через model_dump (порядок полей сохраняется),
    numpy-скаляры и массивы превращаются в float/int/list.
    """
    if isinstance(data, BaseModel):
        return to_plain(data.model_dump())
    if isinstance(data, dict):
        return {str(k): to_plain(v) for k, v in data.items()}
    if isinstance(data, (list, tuple)):
        return [to_plain(v) for v in data]
    if isinstance(data, np.ndarray):
        return [to_plain(v) for v in data.tolist()]
    if isinstance(data, (bool, np.bool_)):
        return bool(data)
    if isinstance(data, (int, np.integer)):
        return int(data)
    if isinstance(data, (float, np.floating)):
        return float(data)
    return data


def format_float(value: float) -> str:
    """17 значащих цифр; NaN и бесконечности -> null"""
    if not math.isfinite(value):
        return "null"
    text = f"{value:.17g}"
    if "e" not in text and "." not in text:
        text += ".0"
    return text


def _emit(data: Any, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end_pad = " " * (indent * level)
    if isinstance(data, dict):
        if not data:
            return "{}"
        items = [
            f"{pad}{json.dumps(key, ensure_ascii=False)}: {_emit(value, indent, level + 1)}"
            for key, value in data.items()
        ]
        return "{\n" + ",\n".join(items) + "\n" + end_pad + "}"
    if isinstance(data, list):
        if not data:
            return "[]"
        items = [f"{pad}{_emit(value, indent, level + 1)}" for value in data]
        return "[\n" + ",\n".join(items) + "\n" + end_pad + "]"
    if isinstance(data, bool) or data is None:
        return json.dumps(data)
    if isinstance(data, float):
        return format_float(data)
    return json.dumps(data, ensure_ascii=False)


def dump_json(data: Any, indent: int = 2) -> str:
    """
    Детерминированный JSON: порядок ключей как во входных данных,
    вещественные числа с 17 значащими цифрами.

    Args:
        data: модель pydantic, dict, list или скаляр

    Returns:
        Строка JSON с завершающим переводом строки
    """
    return _emit(to_plain(data), indent, 0) + "\n"
