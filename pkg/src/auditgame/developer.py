"""Developer strategies and payoffs.

The responsible type runs exactly the claimed budget.  The irresponsible type
picks among the remaining budgets to trade off accuracy against the chance of
being cleared by the auditor, weighted by beta.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .auditor import AuditConfidence
from .errors import NoFeasibleDeviationError, ParameterError
from .signal_model import (
    AccuracyModel,
    PrivacyBudgetGrid,
    _as_distribution,
    accuracy_values,
)

RESPONSIBLE = "responsible"
IRRESPONSIBLE = "irresponsible"


@dataclass
class DeveloperStrategy:
    """Mixed strategy over the budget grid, tagged by developer type."""

    kind: str
    weights: np.ndarray
    claimed_index: int

    def __post_init__(self):
        if self.kind not in (RESPONSIBLE, IRRESPONSIBLE):
            raise ParameterError(f"unknown developer kind {self.kind!r}")
        self.weights = _as_distribution(self.weights, "strategy weights")
        claimed_mass = float(self.weights[self.claimed_index])
        if self.kind == RESPONSIBLE and abs(claimed_mass - 1.0) > 1e-12:
            raise ParameterError("responsible strategy must be a point mass on the claimed budget")
        if self.kind == IRRESPONSIBLE and claimed_mass > 0:
            raise ParameterError("irresponsible strategy must put zero mass on the claimed budget")

    @classmethod
    def point_mass(cls, kind: str, index: int, size: int, claimed_index: int) -> "DeveloperStrategy":
        weights = np.zeros(size)
        weights[index] = 1.0
        return cls(kind=kind, weights=weights, claimed_index=claimed_index)


@dataclass
class DeveloperPayoff:
    """Accuracy plus beta-weighted evasion, the irresponsible objective."""

    expected_accuracy: float
    evasion_rate: float
    beta: float
    total: float


def responsible_strategy(grid: PrivacyBudgetGrid) -> DeveloperStrategy:
    """Point mass on the claimed budget."""
    return DeveloperStrategy.point_mass(
        RESPONSIBLE, grid.claimed_index, grid.size, grid.claimed_index
    )


def developer_payoff(
    strategy: DeveloperStrategy,
    p: np.ndarray,
    acc: AccuracyModel,
    conf: AuditConfidence,
    beta: float,
) -> DeveloperPayoff:
    """Evaluate the developer objective at a fixed audit confidence.

    Per budget the payoff is A(eps) + beta * sum_s r(g|s) p(s|eps); the mixed
    value is the weight-linear combination.
    """
    p = np.asarray(p, dtype=float)
    if beta < 0:
        raise ParameterError("beta must be non-negative")
    if p.shape != (strategy.weights.size, conf.size):
        raise ParameterError(
            f"mechanism matrix shape {p.shape} does not match strategy and confidence sizes"
        )
    acc_vals = accuracy_values(acc)
    if acc_vals.size != strategy.weights.size:
        raise ParameterError("accuracy grid does not match the strategy length")
    expected_accuracy = float(strategy.weights @ acc_vals)
    evasion = float(strategy.weights @ (p @ conf.r_g))
    return DeveloperPayoff(
        expected_accuracy=expected_accuracy,
        evasion_rate=evasion,
        beta=float(beta),
        total=expected_accuracy + float(beta) * evasion,
    )


def irresponsible_best_response(
    p: np.ndarray,
    acc: AccuracyModel,
    conf: AuditConfidence,
    beta: float,
    grid: PrivacyBudgetGrid,
) -> DeveloperStrategy:
    """Best pure deviation against a fixed confidence, ties toward the larger budget."""
    deviations = grid.deviation_indices()
    if not deviations:
        raise NoFeasibleDeviationError("the grid holds only the claimed budget")
    best_index = None
    best_total = -np.inf
    for i in deviations:
        candidate = DeveloperStrategy.point_mass(IRRESPONSIBLE, i, grid.size, grid.claimed_index)
        total = developer_payoff(candidate, p, acc, conf, beta).total
        if total >= best_total:
            best_total = total
            best_index = i
    return DeveloperStrategy.point_mass(IRRESPONSIBLE, best_index, grid.size, grid.claimed_index)


def switch_condition(
    p: np.ndarray,
    acc: AccuracyModel,
    conf: AuditConfidence,
    beta: float,
    grid: PrivacyBudgetGrid,
) -> float:
    """Decision margin between the two deviations on a three-budget grid.

    With budgets (claimed, mid, high), returns
    A(mid) - A(high) + beta * sum_s r(g|s) [p(s|mid) - p(s|high)].
    Strictly positive means the mid budget wins, otherwise the high one.
    """
    if grid.size != 3:
        raise ParameterError("switch condition is defined for a three-budget grid")
    if grid.claimed_index != 0:
        raise ParameterError("switch condition expects the claimed budget to be the smallest")
    p = np.asarray(p, dtype=float)
    acc_vals = accuracy_values(acc)
    delta_acc = float(acc_vals[1] - acc_vals[2])
    delta_evasion = float((p[1] - p[2]) @ conf.r_g)
    return delta_acc + float(beta) * delta_evasion
