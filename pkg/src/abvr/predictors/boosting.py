"""
Градиентный бустинг регрессионных деревьев (квадратичная функция потерь).

Полностью детерминированный: пороги — квантили значений признака в узле,
при равном выигрыше выбирается признак с меньшим индексом, затем меньший
порог. Строка уходит влево, если x <= threshold.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from loguru import logger

from ..core.exceptions import ContractError, DegenerateInputError
from ..core.models import GbtHyperparams
from .base import Predictor

FORMAT_VERSION = 1
LEAF = -1
MIN_RELATIVE_GAIN = 1e-12


@dataclass(frozen=True)
class RegressionTree:
    """
    Дерево в виде плоских массивов узлов (узел 0 — корень).

    Для листа feature = -1, value уже умножено на learning_rate.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    @property
    def n_nodes(self) -> int:
        return int(self.feature.shape[0])

    def predict(self, x: np.ndarray) -> np.ndarray:
        node = np.zeros(x.shape[0], dtype=np.int64)
        rows = np.arange(x.shape[0])
        while True:
            feature = self.feature[node]
            active = feature != LEAF
            if not active.any():
                break
            idx = rows[active]
            go_left = x[idx, feature[active]] <= self.threshold[node[active]]
            node[idx] = np.where(go_left, self.left[node[active]], self.right[node[active]])
        return self.value[node]

    def to_dict(self) -> dict:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RegressionTree":
        return cls(
            feature=np.asarray(data["feature"], dtype=np.int64),
            threshold=np.asarray(data["threshold"], dtype=float),
            left=np.asarray(data["left"], dtype=np.int64),
            right=np.asarray(data["right"], dtype=np.int64),
            value=np.asarray(data["value"], dtype=float),
        )


class BoostedTreesPredictor(Predictor):
    """Ансамбль: base_score + сумма деревьев"""

    kind = "boosted_trees"

    def __init__(
        self,
        base_score: float,
        trees: List[RegressionTree],
        n_features: int,
        learning_rate: float,
        train_mse: Optional[List[float]] = None,
    ):
        self.base_score = float(base_score)
        self.trees = list(trees)
        self.n_features = int(n_features)
        self.learning_rate = float(learning_rate)
        self.train_mse = list(train_mse or [])

    def predict(self, x) -> np.ndarray:
        x = self._as_matrix(x, self.n_features)
        out = np.full(x.shape[0], self.base_score)
        for tree in self.trees:
            out += tree.predict(x)
        return out

    def to_dict(self) -> dict:
        """Версионированный JSON-совместимый дамп модели"""
        return {
            "format_version": FORMAT_VERSION,
            "kind": self.kind,
            "base_score": self.base_score,
            "learning_rate": self.learning_rate,
            "n_features": self.n_features,
            "trees": [t.to_dict() for t in self.trees],
            "train_mse": list(self.train_mse),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "BoostedTreesPredictor":
        version = data.get("format_version")
        if version != FORMAT_VERSION:
            raise ContractError(f"unsupported boosted trees format_version: {version!r}")
        return cls(
            base_score=data["base_score"],
            trees=[RegressionTree.from_dict(t) for t in data["trees"]],
            n_features=data["n_features"],
            learning_rate=data["learning_rate"],
            train_mse=data.get("train_mse"),
        )


def _best_split(
    x: np.ndarray, r: np.ndarray, idx: np.ndarray, h: GbtHyperparams
) -> Tuple[int, float, float]:
    """
    Лучший сплит узла по уменьшению SSE.

    Returns:
        (feature, threshold, gain); feature = -1, если сплита нет
    """
    size = idx.shape[0]
    r_node = r[idx]
    total = float(r_node.sum())
    base = total * total / size
    levels = np.arange(1, h.n_split_candidates + 1) / (h.n_split_candidates + 1)

    best = (LEAF, 0.0, 0.0)
    for j in range(x.shape[1]):
        values = x[idx, j]
        order = np.argsort(values, kind="stable")
        sorted_values = values[order]
        cumsum = np.cumsum(r_node[order])

        thresholds = np.unique(np.quantile(sorted_values, levels))
        n_left = np.searchsorted(sorted_values, thresholds, side="right")
        valid = (n_left >= h.min_samples_leaf) & (size - n_left >= h.min_samples_leaf)
        if not valid.any():
            continue
        thresholds = thresholds[valid]
        n_left = n_left[valid]

        s_left = cumsum[n_left - 1]
        s_right = total - s_left
        gain = s_left**2 / n_left + s_right**2 / (size - n_left) - base
        k = int(np.argmax(gain))
        if gain[k] > best[2]:
            best = (j, float(thresholds[k]), float(gain[k]))
    return best


def _fit_tree(x: np.ndarray, r: np.ndarray, h: GbtHyperparams) -> RegressionTree:
    feature: List[int] = []
    threshold: List[float] = []
    left: List[int] = []
    right: List[int] = []
    value: List[float] = []

    def grow(idx: np.ndarray, depth: int) -> int:
        node = len(feature)
        feature.append(LEAF)
        threshold.append(0.0)
        left.append(LEAF)
        right.append(LEAF)
        value.append(h.learning_rate * float(r[idx].mean()))

        if depth >= h.max_depth or idx.shape[0] < 2 * h.min_samples_leaf:
            return node
        j, t, gain = _best_split(x, r, idx, h)
        node_ss = float(np.sum(r[idx] ** 2))
        if j == LEAF or gain <= MIN_RELATIVE_GAIN * node_ss:
            return node

        mask = x[idx, j] <= t
        feature[node] = j
        threshold[node] = t
        value[node] = 0.0
        left[node] = grow(idx[mask], depth + 1)
        right[node] = grow(idx[~mask], depth + 1)
        return node

    grow(np.arange(x.shape[0]), 0)
    return RegressionTree(
        feature=np.asarray(feature, dtype=np.int64),
        threshold=np.asarray(threshold, dtype=float),
        left=np.asarray(left, dtype=np.int64),
        right=np.asarray(right, dtype=np.int64),
        value=np.asarray(value, dtype=float),
    )


def fit_gbt_predictor(x, y, h: Optional[GbtHyperparams] = None) -> BoostedTreesPredictor:
    """
    Обучение бустинга на всей выборке.

    Args:
        x: матрица n×d
        y: вектор длины n
        h: гиперпараметры (по умолчанию GbtHyperparams())

    Returns:
        BoostedTreesPredictor с историей train_mse (после base score и после каждого дерева)

    Raises:
        DegenerateInputError: n < 2 * min_samples_leaf
    """
    h = h or GbtHyperparams()
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim == 1:
        x = x.reshape(-1, 1)
    n = y.shape[0]
    if x.shape[0] != n:
        raise ContractError(f"x has {x.shape[0]} rows, y has {n}")
    if n < 2 * h.min_samples_leaf:
        raise DegenerateInputError(
            f"boosting needs n >= 2*min_samples_leaf = {2 * h.min_samples_leaf}, got n={n}"
        )

    base_score = float(y.mean())
    current = np.full(n, base_score)
    trace = [float(np.mean((y - current) ** 2))]
    trees = []
    for _ in range(h.n_trees):
        tree = _fit_tree(x, y - current, h)
        current = current + tree.predict(x)
        trees.append(tree)
        trace.append(float(np.mean((y - current) ** 2)))

    logger.debug(
        f"Бустинг: n={n}, d={x.shape[1]}, деревьев {len(trees)}, "
        f"MSE {trace[0]:.4g} -> {trace[-1]:.4g}"
    )
    return BoostedTreesPredictor(
        base_score=base_score,
        trees=trees,
        n_features=x.shape[1],
        learning_rate=h.learning_rate,
        train_mse=trace,
    )
