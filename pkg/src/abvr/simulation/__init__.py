"""
Аддитивная модель данных, теоретические дисперсии и Monte Carlo
"""

from abvr.simulation.dgp import generate_additive, true_ate, true_outcome_model
from abvr.simulation.oracle import oracle_variances
from abvr.simulation.monte_carlo import run_monte_carlo

__all__ = [
    "generate_additive",
    "true_ate",
    "true_outcome_model",
    "oracle_variances",
    "run_monte_carlo",
]
