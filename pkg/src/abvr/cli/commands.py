#!/usr/bin/env python3
"""
CLI команды: оценивание эффекта, отбор ковариат, моделирование.

Отчеты пишутся в JSON (stdout или --out). Коды выхода: 0 — успех,
2 — ошибка во входных данных, 1 — внутренняя ошибка.
"""

import json
import sys
import time
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import click
from loguru import logger
from pydantic import ValidationError

from .. import __version__
from ..core.config import Settings, get_settings
from ..core.dataset import ExperimentDataset
from ..core.exceptions import (
    AbvrError,
    ContractError,
    DegenerateInputError,
    InputError,
    ParseError,
)
from ..core.logging import setup_logging
from ..core.models import EstimateReport, RunManifest, SelectionConfig, SimulationRequest
from ..estimators import (
    comparison_metrics,
    estimate_combined,
    estimate_cupac,
    estimate_cuped,
    estimate_diff,
)
from ..ingest import (
    impute_missing_pre,
    load_experiment_csv,
    load_experiment_dir,
    validate_dataset,
    write_experiment_csv,
)
from ..predictors import (
    Predictor,
    cross_fit_predictions,
    fit_gbt_predictor,
    fit_linear_predictor,
    load_external_predictions,
)
from ..selection import select_covariates
from ..simulation import generate_additive, run_monte_carlo
from ..utils.converters import dump_json, to_plain
from ..utils.fs import ensure_dir, file_digest, list_csv_files
from ..utils.validators import (
    parse_methods,
    parse_predictor,
    parse_z_select,
    read_selection_file,
    resolve_z_indices,
)

SCHEMA_VERSION = "1"
CROSS_FIT_SEED = 0

IMPUTE_POLICIES = {"mean": "mean_plus_indicator", "zero": "zero_plus_indicator"}
SELECTION_TESTS = {"mw": "mann_whitney", "welch": "welch_t"}
OPEN_UNIT = click.FloatRange(0.0, 1.0, min_open=True, max_open=True)


def safe_output(text: str, out: Optional[str] = None) -> None:
    """
    Вывод отчета в файл или в stdout в UTF-8.

    Args:
        text: готовый JSON
        out: путь к файлу; None — stdout
    """
    if out:
        path = Path(out)
        ensure_dir(path.parent)
        path.write_text(text, encoding="utf-8", newline="\n")
        return
    # Для Windows явно пишем UTF-8 байты в stdout
    if sys.platform == "win32":
        sys.stdout.buffer.write(text.encode("utf-8"))
        sys.stdout.buffer.flush()
    else:
        click.echo(text, nl=False)


def load_settings(config_path: Optional[str]) -> Settings:
    """Загрузка настроек из указанного .env файла (без пути — настройки по умолчанию)"""
    if not config_path:
        return get_settings()

    from pydantic_settings import SettingsConfigDict

    class TempSettings(Settings):
        model_config = SettingsConfigDict(
            env_file=config_path, env_file_encoding="utf-8", case_sensitive=False, extra="ignore"
        )

    return TempSettings()


def _manifest(
    command: str,
    config: Dict[str, object],
    inputs: List[str],
    seeds: List[int],
    started: float,
) -> RunManifest:
    return RunManifest(
        command=command,
        config=config,
        input_digests={path: file_digest(path) for path in inputs},
        tool_version=__version__,
        seeds=seeds,
        duration_seconds=time.perf_counter() - started,
    )


def _emit(manifest: RunManifest, body: Dict[str, object], out: Optional[str]) -> None:
    payload = {"schema_version": SCHEMA_VERSION, "manifest": manifest}
    payload.update(body)
    safe_output(dump_json(payload), out)


def _fail(command: str, error: Exception) -> None:
    """Сообщение об ошибке в stderr и выход с кодом по контракту"""
    if isinstance(error, ValidationError):
        for item in error.errors():
            location = ".".join(str(p) for p in item["loc"]) or "config"
            logger.error(f"{command}: {location}: {item['msg']}")
        sys.exit(2)
    if isinstance(error, InputError):
        logger.error(f"{command}: {error.message}")
        sys.exit(2)
    if isinstance(error, (FileNotFoundError, IsADirectoryError)):
        logger.error(f"{command}: file not found: {error.filename}")
        sys.exit(2)
    if isinstance(error, AbvrError):
        logger.error(f"{command}: {error.message}")
        sys.exit(1)
    logger.exception(f"{command}: internal error: {error}")
    sys.exit(1)


def _fatal_issues(ds: ExperimentDataset, used_z: List[str]) -> None:
    report = validate_dataset(ds)
    for issue in report.issues:
        if issue.severity == "warning":
            logger.warning(f"{ds.experiment_id}: {issue.message}")
    for issue in report.errors:
        if issue.column is None or issue.column in used_z:
            raise DegenerateInputError(issue.message, {"column": issue.column})


def _build_predictor(
    spec: Tuple[str, Optional[Path]], ds: ExperimentDataset, folds: int
) -> Predictor:
    kind, path = spec
    if kind == "external":
        return load_external_predictions(path, ds)  # type: ignore[arg-type]
    if folds >= 2:
        return cross_fit_predictions(ds.x, ds.y, kind, folds=folds, seed=CROSS_FIT_SEED)
    if kind == "gbt":
        return fit_gbt_predictor(ds.x, ds.y)
    return fit_linear_predictor(ds.x, ds.y)


@click.group()
@click.version_option(__version__, prog_name="abvr")
def cli():
    """Снижение дисперсии в A/B-тестах: оценивание, отбор ковариат, моделирование"""
    pass


@cli.command("estimate")
@click.option("--data", "data", required=True, help="CSV эксперимента")
@click.option(
    "--method",
    default="all",
    show_default=True,
    help="diff|cuped|cupac|combined|all (или список через запятую)",
)
@click.option(
    "--predictor",
    default="linear",
    show_default=True,
    help="Модель f(X): linear|gbt|external:<path>",
)
@click.option(
    "--z-select", "z_select", default=None, help="z-колонки через запятую|auto|file:<path>"
)
@click.option("--alpha", type=OPEN_UNIT, default=None)
@click.option("--level", type=OPEN_UNIT, default=None)
@click.option("--impute", type=click.Choice(list(IMPUTE_POLICIES)), default=None)
@click.option("--cross-fit", "cross_fit", type=click.IntRange(min=0), default=0, show_default=True)
@click.option("--out", default=None, help="Файл отчета (по умолчанию stdout)")
@click.option("--config", "-c", default=None, help="Path to .env config file")
def cmd_estimate(
    data: str,
    method: str,
    predictor: str,
    z_select: Optional[str],
    alpha: Optional[float],
    level: Optional[float],
    impute: Optional[str],
    cross_fit: int,
    out: Optional[str],
    config: Optional[str],
):
    """
    Оценка эффекта выбранными методами на одном эксперименте
    """
    started = time.perf_counter()
    try:
        settings = load_settings(config)
        setup_logging(settings=settings)

        methods = parse_methods(method)
        predictor_spec = parse_predictor(predictor)
        selection_spec = parse_z_select(z_select)
        level = settings.confidence_level if level is None else level
        alpha = settings.alpha if alpha is None else alpha
        policy = IMPUTE_POLICIES[impute] if impute else settings.impute_policy
        if cross_fit == 1:
            raise ContractError("--cross-fit needs at least 2 folds (0 disables it)")

        ds = load_experiment_csv(data)
        inputs = [data]

        used_z: List[str] = []
        selection_body = None
        if "COMBINED" in methods:
            if ds.m == 0:
                raise ContractError("no in-experiment covariates")
            if selection_spec.mode == "all":
                used_z = list(ds.z_names)
            elif selection_spec.mode == "names":
                used_z = list(selection_spec.names)
            elif selection_spec.mode == "file":
                used_z = read_selection_file(selection_spec.path)  # type: ignore[arg-type]
                inputs.append(str(selection_spec.path))
            else:
                selection_cfg = SelectionConfig(
                    alpha=alpha,
                    test=settings.selection_test,
                    correction=settings.correction,
                    min_nonzero_fraction=settings.min_nonzero_fraction,
                )
                result = select_covariates([ds], selection_cfg)
                used_z = result.selected
                selection_body = result
            resolve_z_indices(used_z, ds.z_names)
            if not used_z:
                raise ContractError("no in-experiment covariates selected")

        _fatal_issues(ds, used_z)
        ds_imputed = impute_missing_pre(ds, policy)

        reports: Dict[str, EstimateReport] = {}
        if "DIFF" in methods:
            reports["DIFF"] = estimate_diff(ds_imputed, level)
        if "CUPED" in methods:
            reports["CUPED"] = estimate_cuped(ds_imputed, level)
        if "CUPAC" in methods or "COMBINED" in methods:
            if predictor_spec[1] is not None:
                inputs.append(str(predictor_spec[1]))
            pred = _build_predictor(predictor_spec, ds_imputed, cross_fit)
            if "CUPAC" in methods:
                reports["CUPAC"] = estimate_cupac(ds_imputed, pred, level)
            if "COMBINED" in methods:
                subset = resolve_z_indices(used_z, ds_imputed.z_names)
                reports["COMBINED"] = estimate_combined(ds_imputed, pred, subset, level)

        metrics = None
        if all(m in reports for m in ("DIFF", "CUPAC", "COMBINED")):
            try:
                metrics = comparison_metrics(
                    reports["DIFF"], reports["CUPAC"], reports["COMBINED"]
                )
            except DegenerateInputError as e:
                logger.warning(f"Метрики сравнения не рассчитаны: {e.message}")

        run_config: Dict[str, object] = {
            "methods": methods,
            "predictor": predictor,
            "z_select": z_select or "all",
            "alpha": alpha,
            "level": level,
            "impute": policy,
            "cross_fit": cross_fit,
        }
        body: Dict[str, object] = {
            "dataset": {
                "experiment_id": ds.experiment_id,
                "n": ds.n,
                "n1": ds.n1,
                "n0": ds.n0,
                "x_columns": list(ds_imputed.x_names),
                "z_columns": list(ds.z_names),
            },
            "estimates": list(reports.values()),
        }
        if selection_body is not None:
            body["selection"] = selection_body
        if metrics is not None:
            body["metrics"] = metrics

        seeds = [CROSS_FIT_SEED] if cross_fit >= 2 else []
        _emit(_manifest("estimate", run_config, inputs, seeds, started), body, out)

    except SystemExit:
        raise
    except Exception as e:
        _fail("estimate", e)


@cli.command("select")
@click.option("--data", "data", multiple=True, help="CSV эксперимента (можно повторять)")
@click.option("--data-dir", "data_dir", default=None, help="Директория с CSV экспериментов")
@click.option("--test", "test", type=click.Choice(list(SELECTION_TESTS)), default=None)
@click.option("--alpha", type=OPEN_UNIT, default=None)
@click.option("--correction", type=click.Choice(["none", "bonferroni", "holm"]), default=None)
@click.option("--min-nonzero", "min_nonzero", type=click.FloatRange(0.0, 1.0), default=None)
@click.option("--out", default=None, help="Файл отчета (по умолчанию stdout)")
@click.option("--config", "-c", default=None, help="Path to .env config file")
def cmd_select(
    data: Tuple[str, ...],
    data_dir: Optional[str],
    test: Optional[str],
    alpha: Optional[float],
    correction: Optional[str],
    min_nonzero: Optional[float],
    out: Optional[str],
    config: Optional[str],
):
    """
    Отбор in-experiment ковариат по одному или нескольким экспериментам
    """
    started = time.perf_counter()
    try:
        settings = load_settings(config)
        setup_logging(settings=settings)

        if not data and not data_dir:
            raise ContractError("give at least one --data file or --data-dir")

        cfg = SelectionConfig(
            alpha=settings.alpha if alpha is None else alpha,
            test=SELECTION_TESTS[test] if test else settings.selection_test,
            correction=correction or settings.correction,
            min_nonzero_fraction=(
                settings.min_nonzero_fraction if min_nonzero is None else min_nonzero
            ),
        )

        experiments = [load_experiment_csv(path) for path in data]
        inputs = list(data)
        if data_dir:
            experiments.extend(load_experiment_dir(data_dir))
            inputs.extend(str(p) for p in list_csv_files(data_dir))

        result = select_covariates(experiments, cfg)

        body: Dict[str, object] = {
            "experiments": sorted(ds.experiment_id for ds in experiments),
        }
        body.update(to_plain(result))
        _emit(_manifest("select", to_plain(cfg), inputs, [], started), body, out)

    except SystemExit:
        raise
    except Exception as e:
        _fail("select", e)


def _read_request(path: str) -> SimulationRequest:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}: invalid JSON: {e.msg}", line=e.lineno) from e
    return SimulationRequest.model_validate(raw)


@cli.command("simulate")
@click.option("--config", "config", required=True, help="JSON: dgp, n_grid, replications, ...")
@click.option("--emit-data", "emit_data", default=None, help="CSV для сгенерированного датасета")
@click.option("--out", default=None, help="Файл отчета (по умолчанию stdout)")
@click.option("--env-config", "env_config", default=None, help="Path to .env config file")
def cmd_simulate(
    config: str, emit_data: Optional[str], out: Optional[str], env_config: Optional[str]
):
    """
    Monte Carlo по аддитивной модели с теоретическими дисперсиями
    """
    started = time.perf_counter()
    try:
        settings = load_settings(env_config)
        setup_logging(settings=settings)

        request = _read_request(config)
        cfg = request.dgp

        report = run_monte_carlo(
            cfg,
            request.n_grid,
            request.replications,
            request.methods,
            request.predictor_mode,
            request.level,
            request.selection,
            workers=settings.mc_workers,
        )

        body: Dict[str, object] = dict(to_plain(report))
        if emit_data:
            n = request.n_grid[0]
            ds = generate_additive(cfg, n, seed=cfg.seed, with_ids=True)
            write_experiment_csv(ds, emit_data)
            body["emitted_data"] = {"path": emit_data, "n": n, "seed": cfg.seed}

        _emit(
            _manifest("simulate", to_plain(request), [config], [cfg.seed], started),
            body,
            out,
        )

    except SystemExit:
        raise
    except Exception as e:
        _fail("simulate", e)


if __name__ == "__main__":
    cli()
