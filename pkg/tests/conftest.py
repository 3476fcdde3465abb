"""
Конфигурационный файл для pytest.
Общие фикстуры: маленькие датасеты, CSV-файлы и изоляция настроек.
"""

import numpy as np
import pytest
from loguru import logger

from abvr.core.config import get_settings
from abvr.core.dataset import ExperimentDataset
from abvr.core.models import DGPConfig


@pytest.fixture(autouse=True)
def isolated_settings(tmp_path, monkeypatch):
    """Логи во временную директорию, кэш настроек сбрасывается"""
    monkeypatch.setenv("ABVR_LOG_PATH", str(tmp_path / "logs"))
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()
    # Обработчики могли остаться привязаны к потокам CliRunner
    logger.remove()


@pytest.fixture
def toy_dataset() -> ExperimentDataset:
    """4 юнита: w=(1,1,0,0), y=(3,5,1,3)"""
    return ExperimentDataset(
        w=[1, 1, 0, 0],
        y=[3.0, 5.0, 1.0, 3.0],
        x=np.empty((4, 0)),
        z=np.empty((4, 0)),
        experiment_id="toy",
    )


@pytest.fixture
def cuped_dataset() -> ExperimentDataset:
    """Пример с ручным решением МНК: θ=2, intercept=-0.5"""
    return ExperimentDataset(
        w=[1, 1, 0, 0],
        y=[2.0, 4.0, 1.0, 3.0],
        x=[[1.0], [2.0], [1.0], [2.0]],
        z=np.empty((4, 0)),
        x_names=("x_1",),
        experiment_id="cuped",
    )


@pytest.fixture
def toy_csv(tmp_path):
    path = tmp_path / "toy.csv"
    path.write_text("w,y\n1,3\n1,5\n0,1\n0,3\n", encoding="utf-8")
    return path


@pytest.fixture
def linear_cfg() -> DGPConfig:
    """Линейный случай: beta_g=(1), beta_h=(2), rho=0, sigma_eps=1"""
    return DGPConfig(
        d=1,
        m=1,
        beta_g=[1.0],
        beta_h=[2.0],
        h_kind="linear",
        tau=1.0,
        p=0.5,
        sigma_eps=1.0,
        rho=0.0,
        seed=7,
    )


@pytest.fixture
def make_dataset():
    """Фабрика датасетов с одной z-колонкой, сдвинутой на shift в treatment-группе"""

    def build(n: int, seed: int = 0, shift: float = 0.0, zero_inflated: bool = False):
        rng = np.random.default_rng(seed)
        w = (rng.random(n) < 0.5).astype(float)
        z = rng.standard_normal(n) + shift * w
        if zero_inflated:
            z = np.where(rng.random(n) < 0.7, 0.0, np.abs(z))
        x = rng.standard_normal((n, 1))
        y = x[:, 0] + z + w + rng.standard_normal(n)
        return ExperimentDataset(
            w=w,
            y=y,
            x=x,
            z=z.reshape(-1, 1),
            x_names=("x_1",),
            z_names=("z_1",),
            experiment_id=f"exp-{seed:04d}",
        )

    return build
