"""Brute-force oracles for the closed-form results.

Everything here re-derives its answer from the raw objective definitions, on
grids, without calling the solver under test.  The only shared code is the
primitive data types and the accuracy curve.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .auditor import AuditorParams
from .errors import ParameterError
from .signal_model import AccuracyModel, HypothesisPair, PrivacyBudgetGrid, accuracy_values


@dataclass
class GridSpec:
    resolution: int = 50
    tolerance: float = 1e-3

    def __post_init__(self):
        if self.resolution < 10:
            raise ParameterError("grid resolution below 10 is too coarse to be a check")
        if self.tolerance <= 0:
            raise ParameterError("tolerance must be strictly positive")

    @property
    def step(self) -> float:
        return 1.0 / (self.resolution - 1)


def grid_max_information_strategy(params: AuditorParams, spec: GridSpec):
    """Grid maximum of the information-acquisition objective for two signals.

    The strategy space is parameterized by d(s1|good) and d(s1|bad); for each
    grid point the report per signal is chosen by direct expected-utility
    comparison (ties to clear) and the objective is expected utility minus
    lam times the mutual information.  Returns (best value, best d matrix).
    """
    grid = np.linspace(0.0, 1.0, spec.resolution)
    d1g, d1b = np.meshgrid(grid, grid, indexing="ij")
    total = np.zeros_like(d1g)
    mutual = np.zeros_like(d1g)
    for dg, db in ((d1g, d1b), (1.0 - d1g, 1.0 - d1b)):
        eu_clear = params.prior_g * params.u_good_clear * dg + params.prior_b * params.u_bad_clear * db
        eu_flag = params.prior_g * params.u_good_flag * dg + params.prior_b * params.u_bad_flag * db
        total += np.maximum(eu_clear, eu_flag)
        v = params.prior_g * dg + params.prior_b * db
        for prior, row in ((params.prior_g, dg), (params.prior_b, db)):
            with np.errstate(divide="ignore", invalid="ignore"):
                term = np.where(row > 0, row * np.log(row / v), 0.0)
            mutual += prior * term
    objective = total - params.lam * mutual
    flat = int(np.argmax(objective))
    i, j = np.unravel_index(flat, objective.shape)
    best_d = np.array([[grid[i], 1.0 - grid[i]], [grid[j], 1.0 - grid[j]]])
    return float(objective[i, j]), best_d


@dataclass
class SimplexMaxResult:
    """Per-signal grid argmax of the confidence objective."""

    r_g: np.ndarray
    objective: np.ndarray
    step: float


def per_signal_confidence_objective(
    params: AuditorParams, hyp: HypothesisPair, r_g: np.ndarray
) -> np.ndarray:
    """Signal-by-signal decomposition of the confidence objective.

    Row s of the total objective: penalty-weighted error terms plus the
    lam * v(s) weighted divergence of (r, 1-r) from the prior.  Accepts a
    per-signal r vector and returns per-signal values.
    """
    r_g = np.asarray(r_g, dtype=float)
    r_b = 1.0 - r_g
    with np.errstate(divide="ignore", invalid="ignore"):
        kl = np.where(r_g > 0, r_g * np.log(r_g / params.prior_g), 0.0) + np.where(
            r_b > 0, r_b * np.log(r_b / params.prior_b), 0.0
        )
    return (
        params.u_good_flag * hyp.q_g * r_b
        + params.u_bad_clear * hyp.q_b * r_g
        - params.lam * hyp.v * kl
    )


def simplex_max_confidence(
    params: AuditorParams, hyp: HypothesisPair, spec: GridSpec
) -> SimplexMaxResult:
    """Sweep r(g|s) over [0, 1] per signal and keep the argmax.

    Ties resolve to the lowest grid index.  Zero-mass signals have a flat
    objective; their argmax is meaningless and callers should mask them out.
    """
    params.require_dp_mode()
    r_grid = np.linspace(0.0, 1.0, spec.resolution)
    values = np.empty((hyp.size, spec.resolution))
    for k, r in enumerate(r_grid):
        values[:, k] = per_signal_confidence_objective(params, hyp, np.full(hyp.size, r))
    best = np.argmax(values, axis=1)
    return SimplexMaxResult(
        r_g=r_grid[best],
        objective=values[np.arange(hyp.size), best],
        step=spec.step,
    )


def finite_difference(f, x: float, h: float) -> float:
    """Central difference (f(x+h) - f(x-h)) / 2h."""
    if h <= 0:
        raise ParameterError("step size must be strictly positive")
    return (f(x + h) - f(x - h)) / (2.0 * h)


@dataclass
class ExhaustiveBest:
    index: int
    epsilon: float
    total: float


def exhaustive_developer(
    p: np.ndarray,
    acc: AccuracyModel,
    conf,
    beta: float,
    grid: PrivacyBudgetGrid,
) -> ExhaustiveBest:
    """Direct argmax of the developer objective over pure deviations.

    Scans budgets in ascending order and keeps later ties, matching the
    larger-budget tie-break the best-response solver commits to.
    """
    p = np.asarray(p, dtype=float)
    acc_vals = accuracy_values(acc)
    best_index = None
    best_total = -np.inf
    for i in range(grid.size):
        if i == grid.claimed_index:
            continue
        total = float(acc_vals[i]) + float(beta) * float(p[i] @ conf.r_g)
        if total >= best_total:
            best_total = total
            best_index = i
    if best_index is None:
        raise ParameterError("no deviation candidates on the grid")
    return ExhaustiveBest(
        index=best_index, epsilon=float(grid.values[best_index]), total=best_total
    )
