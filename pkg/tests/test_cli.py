"""
Интеграционные тесты CLI: estimate, select, simulate
"""

import json
import re

import pytest
from click.testing import CliRunner

from abvr.cli.commands import cli
from abvr.core.models import DGPConfig
from abvr.ingest import load_experiment_csv, write_experiment_csv
from abvr.simulation import generate_additive

LINEAR_DGP = {
    "d": 1,
    "m": 1,
    "beta_g": [1.0],
    "beta_h": [2.0],
    "h_kind": "linear",
    "tau": 1.0,
    "p": 0.5,
    "sigma_eps": 1.0,
    "rho": 0.0,
    "seed": 42,
}

DURATION_RE = re.compile(r'"duration_seconds": [^,\n]+')


@pytest.fixture
def run():
    runner = CliRunner()

    def invoke(*args):
        return runner.invoke(cli, [str(a) for a in args])

    return invoke


def _read(path):
    return json.loads(path.read_text(encoding="utf-8"))


def _write_config(tmp_path, **overrides):
    request = {"dgp": LINEAR_DGP, "n_grid": [500], "replications": 5}
    request.update(overrides)
    path = tmp_path / "sim.json"
    path.write_text(json.dumps(request), encoding="utf-8")
    return path


def _shifted_csv(tmp_path, name, seed, shift=1.0):
    """Эксперимент с нулевой z_1 и сдвинутой z_2"""
    cfg = DGPConfig(d=1, m=2, beta_g=[1.0], beta_h=[1.0, 1.0], z_shift=[0.0, shift], seed=seed)
    return write_experiment_csv(generate_additive(cfg, 10_000), tmp_path / name)


@pytest.mark.integration
class TestEstimateCommand:
    """Тесты команды estimate"""

    def test_toy_diff(self, run, toy_csv, tmp_path):
        """Тест --method diff на игрушечном файле: tau_hat = 2"""
        out = tmp_path / "report.json"
        result = run("estimate", "--data", toy_csv, "--method", "diff", "--out", out)
        assert result.exit_code == 0, result.output
        report = _read(out)
        assert report["schema_version"] == "1"
        assert report["manifest"]["command"] == "estimate"
        [estimate] = report["estimates"]
        assert estimate["method"] == "DIFF"
        assert estimate["tau_hat"] == pytest.approx(2.0)
        assert estimate["sigma2_hat"] == pytest.approx(8.0)

    def test_stdout_report(self, run, toy_csv):
        """Тест вывода отчета в stdout"""
        result = run("estimate", "--data", toy_csv, "--method", "diff")
        assert result.exit_code == 0
        assert '"tau_hat": 2.0' in result.output

    def test_combined_without_z(self, run, toy_csv):
        """Тест --method combined без z-колонок: код 2"""
        result = run("estimate", "--data", toy_csv, "--method", "combined")
        assert result.exit_code == 2
        assert "no in-experiment covariates" in result.output

    def test_all_methods_with_auto_selection(self, run, tmp_path):
        """Тест --method all --z-select auto на сгенерированном файле"""
        ds = generate_additive(DGPConfig(**LINEAR_DGP), 2000, with_ids=True)
        data = write_experiment_csv(ds, tmp_path / "sim.csv")
        out = tmp_path / "report.json"
        result = run(
            "estimate",
            "--data", data,
            "--method", "all",
            "--predictor", "linear",
            "--z-select", "auto",
            "--alpha", "0.001",
            "--out", out,
        )  # fmt: skip
        assert result.exit_code == 0, result.output
        report = _read(out)
        assert [e["method"] for e in report["estimates"]] == ["DIFF", "CUPED", "CUPAC", "COMBINED"]
        assert set(report["metrics"]) == {
            "sqrt_r2_gain",
            "vr_cupac_vs_diff",
            "vr_combined_vs_cupac",
        }
        assert report["selection"]["selected"] == ["z_1"]

    def test_external_predictor(self, run, tmp_path):
        """Тест внешних предсказаний, сопоставленных по unit_id"""
        ds = generate_additive(DGPConfig(**LINEAR_DGP), 300, with_ids=True)
        data = write_experiment_csv(ds, tmp_path / "sim.csv")
        pred = tmp_path / "pred.csv"
        rows = "\n".join(f"{u},{x:.6f}" for u, x in zip(ds.unit_ids, ds.x[:, 0]))
        pred.write_text(f"unit_id,f_hat\n{rows}\n", encoding="utf-8")

        out = tmp_path / "external.json"
        result = run(
            "estimate", "--data", data, "--method", "cupac", "--predictor", f"external:{pred}",
            "--out", out,
        )  # fmt: skip
        assert result.exit_code == 0, result.output
        assert str(pred) in _read(out)["manifest"]["input_digests"]

    def test_cross_fit(self, run, tmp_path):
        """Тест --cross-fit: зерно разбиения в манифесте"""
        ds = generate_additive(DGPConfig(**LINEAR_DGP), 300)
        data = write_experiment_csv(ds, tmp_path / "sim.csv")
        out = tmp_path / "crossfit.json"
        result = run(
            "estimate", "--data", data, "--method", "cupac", "--cross-fit", 3, "--out", out
        )
        assert result.exit_code == 0, result.output
        assert _read(out)["manifest"]["seeds"] == [0]

    def test_missing_file(self, run, tmp_path):
        """Тест несуществующего файла: код 2"""
        result = run("estimate", "--data", tmp_path / "nope.csv")
        assert result.exit_code == 2

    def test_unknown_method(self, run, toy_csv):
        """Тест неизвестного метода: код 2"""
        result = run("estimate", "--data", toy_csv, "--method", "ols")
        assert result.exit_code == 2

    def test_internal_error(self, run, toy_csv, monkeypatch):
        """Тест внутренней ошибки: код 1"""
        import abvr.cli.commands as commands

        def broken(*args, **kwargs):
            raise RuntimeError("boom")

        monkeypatch.setattr(commands, "estimate_diff", broken)
        result = run("estimate", "--data", toy_csv, "--method", "diff")
        assert result.exit_code == 1

    def test_reproducible(self, run, toy_csv, tmp_path):
        """Тест побитно одинаковых отчетов (без поля duration)"""
        texts = []
        for name in ("a.json", "b.json"):
            out = tmp_path / name
            run("estimate", "--data", toy_csv, "--method", "diff,cuped", "--out", out)
            texts.append(DURATION_RE.sub("", out.read_text(encoding="utf-8")))
        assert texts[0] == texts[1]

    def test_digest_follows_input(self, run, toy_csv, tmp_path):
        """Тест хэша входного файла"""
        digests = []
        for content in ("w,y\n1,3\n1,5\n0,1\n0,3\n", "w,y\n1,3\n1,6\n0,1\n0,3\n"):
            toy_csv.write_text(content, encoding="utf-8")
            out = tmp_path / "report.json"
            run("estimate", "--data", toy_csv, "--method", "diff", "--out", out)
            digests.append(_read(out)["manifest"]["input_digests"][str(toy_csv)])
        assert digests[0] != digests[1]


@pytest.mark.integration
class TestSelectCommand:
    """Тесты команды select"""

    def test_null_and_shifted(self, run, tmp_path):
        """Тест двух экспериментов: отбирается только нулевая ковариата"""
        first = _shifted_csv(tmp_path, "a.csv", seed=1)
        second = _shifted_csv(tmp_path, "b.csv", seed=2)
        out = tmp_path / "select.json"
        result = run(
            "select", "--data", first, "--data", second, "--alpha", "0.001", "--out", out
        )
        assert result.exit_code == 0, result.output
        report = _read(out)
        assert report["selected"] == ["z_1"]
        assert report["rejected"] == ["z_2"]
        assert report["experiments"] == ["a", "b"]
        assert set(report["per_experiment_pvalues"]) == {"a", "b"}

    def test_holm(self, run, tmp_path):
        """Тест --correction holm: adjusted >= raw"""
        data = _shifted_csv(tmp_path, "a.csv", seed=3, shift=0.05)
        out = tmp_path / "select.json"
        result = run(
            "select", "--data", data, "--correction", "holm", "--test", "welch", "--out", out
        )
        assert result.exit_code == 0, result.output
        report = _read(out)
        for name, p in report["combined_pvalues"].items():
            assert report["adjusted_pvalues"][name] >= p

    def test_inconsistent_schemas(self, run, tmp_path):
        """Тест --data-dir с разными наборами z-колонок: код 2"""
        _shifted_csv(tmp_path, "a.csv", seed=1)
        (tmp_path / "b.csv").write_text("w,y,z_other\n1,1,1\n0,2,2\n", encoding="utf-8")
        result = run("select", "--data-dir", tmp_path)
        assert result.exit_code == 2

    def test_no_inputs(self, run):
        """Тест без входных файлов: код 2"""
        result = run("select")
        assert result.exit_code == 2


@pytest.mark.integration
class TestSimulateCommand:
    """Тесты команды simulate"""

    def test_oracle_block(self, run, tmp_path):
        """Тест блока теоретических дисперсий: 6, 5, 1"""
        config = _write_config(tmp_path)
        out = tmp_path / "mc.json"
        result = run("simulate", "--config", config, "--out", out)
        assert result.exit_code == 0, result.output
        report = _read(out)
        oracle = report["oracle_variances"]
        assert oracle["v_diff"] == pytest.approx(6.0)
        assert oracle["v_cupac"] == pytest.approx(5.0)
        assert oracle["v_combined"] == pytest.approx(1.0)
        assert report["manifest"]["seeds"] == [42]
        assert len(report["cells"]) == 4

    def test_emit_data_then_estimate(self, run, tmp_path):
        """Тест --emit-data и оценки по выгруженному файлу"""
        config = _write_config(tmp_path)
        data = tmp_path / "emitted.csv"
        result = run(
            "simulate", "--config", config, "--emit-data", data, "--out", tmp_path / "mc.json"
        )
        assert result.exit_code == 0, result.output
        ds = load_experiment_csv(data)
        assert ds.n == 500
        assert ds.unit_ids is not None

        out = tmp_path / "estimate.json"
        result = run("estimate", "--data", data, "--out", out)
        assert result.exit_code == 0, result.output
        assert len(_read(out)["estimates"]) == 4

    def test_zero_replications(self, run, tmp_path):
        """Тест M = 0: код 2 и сообщение"""
        config = _write_config(tmp_path, replications=0)
        result = run("simulate", "--config", config)
        assert result.exit_code == 2
        assert "replications must be ≥ 1" in result.output

    def test_invalid_json(self, run, tmp_path):
        """Тест некорректного JSON: код 2"""
        config = tmp_path / "sim.json"
        config.write_text("{not json", encoding="utf-8")
        result = run("simulate", "--config", config)
        assert result.exit_code == 2

    def test_reproducible(self, run, tmp_path):
        """Тест одинаковых отчетов при повторном запуске"""
        config = _write_config(tmp_path)
        texts = []
        for name in ("a.json", "b.json"):
            out = tmp_path / name
            run("simulate", "--config", config, "--out", out)
            texts.append(DURATION_RE.sub("", out.read_text(encoding="utf-8")))
        assert texts[0] == texts[1]

    def test_gbt_too_few_rows(self, run, tmp_path):
        """Тест бустинга на слишком маленькой выборке: код 2"""
        config = _write_config(tmp_path, n_grid=[20], replications=2, predictor_mode="fit_gbt")
        result = run("simulate", "--config", config)
        assert result.exit_code == 2


@pytest.mark.integration
class TestPipeline:
    """Тесты цепочки simulate -> select -> estimate"""

    def _run_pipeline(self, run, tmp_path):
        dgp = dict(LINEAR_DGP, m=2, beta_h=[1.0, 1.0], z_shift=[0.0, 1.0])
        config = _write_config(tmp_path, dgp=dgp, n_grid=[5000], replications=2)
        data = tmp_path / "emitted.csv"
        outputs = {
            "simulate": tmp_path / "mc.json",
            "select": tmp_path / "select.json",
            "estimate_file": tmp_path / "estimate_file.json",
            "estimate_auto": tmp_path / "estimate_auto.json",
        }
        steps = [
            ("simulate", "--config", config, "--emit-data", data, "--out", outputs["simulate"]),
            ("select", "--data", data, "--alpha", "0.001", "--out", outputs["select"]),
            (
                "estimate", "--data", data, "--z-select", f"file:{outputs['select']}",
                "--alpha", "0.001", "--out", outputs["estimate_file"],
            ),
            (
                "estimate", "--data", data, "--z-select", "auto",
                "--alpha", "0.001", "--out", outputs["estimate_auto"],
            ),
        ]  # fmt: skip
        for args in steps:
            result = run(*args)
            assert result.exit_code == 0, result.output

        texts = {"data": data.read_bytes()}
        for name, path in outputs.items():
            texts[name] = DURATION_RE.sub("", path.read_text(encoding="utf-8"))
        return texts

    def test_chain_reproducible(self, run, tmp_path):
        """Тест двух прогонов цепочки: одинаковые данные и отчеты"""
        first = self._run_pipeline(run, tmp_path)
        second = self._run_pipeline(run, tmp_path)
        assert first == second

        selected = json.loads(first["select"])["selected"]
        assert selected == ["z_1"]
        from_file = json.loads(first["estimate_file"])["estimates"]
        auto = json.loads(first["estimate_auto"])["estimates"]
        assert [e["method"] for e in from_file] == ["DIFF", "CUPED", "CUPAC", "COMBINED"]
        assert from_file[-1]["z_names"] == auto[-1]["z_names"] == ["z_1"]
        assert from_file[-1]["tau_hat"] == auto[-1]["tau_hat"]
