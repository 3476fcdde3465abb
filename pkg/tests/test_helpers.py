"""
Тесты вспомогательных функций: JSON, файлы, разбор опций CLI
"""

import json
from pathlib import Path

import numpy as np
import pytest

from abvr.core.exceptions import ContractError, ParseError
from abvr.core.models import ComparisonMetrics
from abvr.utils.converters import dump_json, format_float, to_plain
from abvr.utils.fs import file_digest, list_csv_files
from abvr.utils.validators import (
    normalize_z_name,
    parse_methods,
    parse_predictor,
    parse_z_select,
    read_selection_file,
    resolve_z_indices,
)


class TestConverters:
    """Тесты сериализации отчетов"""

    def test_format_float(self):
        """Тест 17 значащих цифр"""
        assert format_float(0.1) == "0.10000000000000001"
        assert format_float(2.0) == "2.0"
        assert format_float(1e-20) == "9.9999999999999995e-21"
        assert format_float(float("nan")) == "null"

    def test_format_float_round_trip(self):
        """Тест точного восстановления значения"""
        for value in (1.0 / 3.0, -2.5e-17, 123456.789):
            assert float(format_float(value)) == value

    def test_to_plain(self):
        """Тест приведения numpy и pydantic к типам Python"""
        data = {
            "a": np.float64(1.5),
            "b": np.arange(3),
            "c": np.bool_(True),
            "m": ComparisonMetrics(
                sqrt_r2_gain=0.1, vr_cupac_vs_diff=0.2, vr_combined_vs_cupac=0.3
            ),
        }
        plain = to_plain(data)
        assert plain["a"] == 1.5 and type(plain["a"]) is float
        assert plain["b"] == [0, 1, 2]
        assert plain["c"] is True
        assert list(plain["m"]) == ["sqrt_r2_gain", "vr_cupac_vs_diff", "vr_combined_vs_cupac"]

    def test_dump_json_is_valid_and_ordered(self):
        """Тест корректного JSON с сохранением порядка ключей"""
        text = dump_json({"z": 1, "a": [0.5, None, True], "m": {}, "s": "тест"})
        assert text.endswith("\n")
        parsed = json.loads(text)
        assert list(parsed) == ["z", "a", "m", "s"]
        assert parsed["a"] == [0.5, None, True]
        assert "тест" in text


class TestFs:
    """Тесты файловых утилит"""

    def test_file_digest(self, tmp_path):
        """Тест SHA-256 содержимого"""
        path = tmp_path / "a.csv"
        path.write_bytes(b"abc")
        expected = "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        assert file_digest(path) == expected

    def test_list_csv_files(self, tmp_path):
        """Тест списка CSV в порядке имен"""
        for name in ("b.csv", "a.csv", "c.txt"):
            (tmp_path / name).write_text("", encoding="utf-8")
        (tmp_path / "d.csv").mkdir()
        assert [p.name for p in list_csv_files(tmp_path)] == ["a.csv", "b.csv"]


class TestOptionParsing:
    """Тесты разбора опций командной строки"""

    def test_parse_methods(self):
        """Тест списка методов"""
        assert parse_methods("all") == ["DIFF", "CUPED", "CUPAC", "COMBINED"]
        assert parse_methods("combined, diff") == ["DIFF", "COMBINED"]
        with pytest.raises(ContractError):
            parse_methods("diff,ols")
        with pytest.raises(ContractError):
            parse_methods(" , ")

    def test_parse_predictor(self):
        """Тест спецификации модели"""
        assert parse_predictor("gbt") == ("gbt", None)
        assert parse_predictor("external:preds.csv") == ("external", Path("preds.csv"))
        with pytest.raises(ContractError):
            parse_predictor("external:")
        with pytest.raises(ContractError):
            parse_predictor("forest")

    def test_parse_z_select(self):
        """Тест выбора колонок Z"""
        assert parse_z_select(None).mode == "all"
        assert parse_z_select("auto").mode == "auto"
        assert parse_z_select("file:sel.json").path == Path("sel.json")
        selection = parse_z_select("clicks, z_orders")
        assert selection.mode == "names"
        assert selection.names == ("z_clicks", "z_orders")

    def test_normalize_z_name(self):
        """Тест префикса z_"""
        assert normalize_z_name("revenue") == "z_revenue"
        assert normalize_z_name("z_revenue") == "z_revenue"

    def test_read_selection_file(self, tmp_path):
        """Тест чтения отчета select и простого списка"""
        report = tmp_path / "select.json"
        report.write_text(json.dumps({"selected": ["z_a", "b"]}), encoding="utf-8")
        assert read_selection_file(report) == ["z_a", "z_b"]
        plain = tmp_path / "list.json"
        plain.write_text('["z_c"]', encoding="utf-8")
        assert read_selection_file(plain) == ["z_c"]

    def test_read_selection_file_errors(self, tmp_path):
        """Тест некорректного файла отбора"""
        broken = tmp_path / "broken.json"
        broken.write_text("{\n  oops", encoding="utf-8")
        with pytest.raises(ParseError) as exc:
            read_selection_file(broken)
        assert exc.value.line == 2
        wrong = tmp_path / "wrong.json"
        wrong.write_text('{"selected": 3}', encoding="utf-8")
        with pytest.raises(ParseError):
            read_selection_file(wrong)

    def test_resolve_z_indices(self):
        """Тест индексов по именам"""
        assert resolve_z_indices(["z_b", "z_a"], ("z_a", "z_b")) == [1, 0]
        with pytest.raises(ContractError):
            resolve_z_indices(["z_c"], ("z_a", "z_b"))
