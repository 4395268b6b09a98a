"""Game assembly, equilibrium computation, and parameter sweeps.

The developer leads: the primary solver enumerates every pure deviation,
lets the auditor respond with the closed-form confidence, and keeps the
deviation with the best developer total.  A best-response iteration mode is
kept alongside as a diagnostic.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .auditor import (
    AuditConfidence,
    AuditorParams,
    auditor_objective,
    comparative_statics,
    confidence_from_ratio,
    solve_audit_confidence,
)
from .developer import (
    IRRESPONSIBLE,
    DeveloperPayoff,
    DeveloperStrategy,
    developer_payoff,
    irresponsible_best_response,
    responsible_strategy,
)
from .errors import NoFeasibleDeviationError, ParameterError
from .signal_model import AccuracyModel, HypothesisPair, PrivacyBudgetGrid, mix_hypotheses

MODE_ENUMERATION = "leader-enumeration"
MODE_ITERATION = "best-response-iteration"


@dataclass
class GameInstance:
    """Everything a single audit game needs, dimension-checked."""

    grid: PrivacyBudgetGrid
    p: np.ndarray
    acc: AccuracyModel
    auditor: AuditorParams
    beta: float
    signal_labels: tuple[str, ...] = ()

    def __post_init__(self):
        self.p = np.asarray(self.p, dtype=float)
        if self.p.ndim != 2 or self.p.shape[0] != self.grid.size:
            raise ParameterError("mechanism matrix must have one row per grid budget")
        if self.beta < 0:
            raise ParameterError("beta must be non-negative")
        if self.acc.budgets.shape != self.grid.values.shape or np.any(
            np.abs(self.acc.budgets - self.grid.values) > 1e-12
        ):
            raise ParameterError("accuracy model is bound to a different budget grid")
        if not self.signal_labels:
            self.signal_labels = tuple(f"s{i}" for i in range(self.p.shape[1]))
        elif len(self.signal_labels) != self.p.shape[1]:
            raise ParameterError("signal labels do not match the mechanism matrix width")

    @property
    def n_signals(self) -> int:
        return int(self.p.shape[1])

    def with_lam(self, lam: float) -> "GameInstance":
        return replace(self, auditor=self.auditor.with_lam(lam))


@dataclass
class CandidateEvaluation:
    """One leader candidate with its induced follower response."""

    label: str
    epsilon: float | None
    weights: tuple[float, ...]
    accuracy_term: float
    evasion_rate: float
    total: float
    auditor_value: float
    chosen: bool


@dataclass
class EquilibriumResult:
    developer: DeveloperStrategy
    hypotheses: HypothesisPair
    confidence: AuditConfidence
    payoff: DeveloperPayoff
    auditor_value: float
    mode: str
    converged: bool | None = None
    candidates: tuple[CandidateEvaluation, ...] = ()
    rounds: tuple[int, ...] = ()

    @property
    def developer_total(self) -> float:
        return self.payoff.total

    @property
    def evasion_rate(self) -> float:
        return self.payoff.evasion_rate

    def chosen_epsilon(self, grid: PrivacyBudgetGrid) -> float:
        """Budget with the largest weight in the chosen strategy (larger wins ties)."""
        w = self.developer.weights
        best = max(range(w.size), key=lambda i: (w[i], i))
        return float(grid.values[best])


def follower_response(instance: GameInstance, weights: np.ndarray):
    """Hypotheses induced by an irresponsible posture, and the closed-form reply."""
    q_g = responsible_strategy(instance.grid)
    hyp = mix_hypotheses(instance.p, q_g.weights, weights, claimed_index=instance.grid.claimed_index)
    conf = solve_audit_confidence(instance.auditor, hyp)
    return hyp, conf


def _evaluate(instance: GameInstance, strategy: DeveloperStrategy):
    hyp, conf = follower_response(instance, strategy.weights)
    payoff = developer_payoff(strategy, instance.p, instance.acc, conf, instance.beta)
    return hyp, conf, payoff


def _mixture_label(grid: PrivacyBudgetGrid, weights: np.ndarray) -> str:
    parts = [f"{grid.values[i]:g}:{weights[i]:.2f}" for i in np.nonzero(weights)[0]]
    return "mix(" + ",".join(parts) + ")"


def solve_stackelberg(instance: GameInstance, mixture_step: float = 0.1) -> EquilibriumResult:
    """Leader enumeration over pure deviations, with coarse mixture probing.

    Each pure deviation is scored against its own induced follower response;
    ties go to the larger budget, matching the best-response tie-break.  Pure
    strategies are provably optimal when the follower is held fixed, but not
    against an anticipating follower, so two-point mixtures are also probed
    on a coarse weight grid; a mixture only displaces a pure winner when it
    is strictly better.
    """
    instance.auditor.require_dp_mode()
    if instance.grid.size > 64:
        raise ParameterError("budget grids beyond 64 entries are not supported")
    deviations = instance.grid.deviation_indices()
    if not deviations:
        raise NoFeasibleDeviationError("the grid holds only the claimed budget")

    rows = []
    best = None
    for i in deviations:
        strategy = DeveloperStrategy.point_mass(
            IRRESPONSIBLE, i, instance.grid.size, instance.grid.claimed_index
        )
        hyp, conf, payoff = _evaluate(instance, strategy)
        value = auditor_objective(instance.auditor, hyp, conf)
        rows.append(
            (f"{instance.grid.values[i]:g}", float(instance.grid.values[i]), strategy, payoff, value)
        )
        if best is None or payoff.total >= best[3].total:
            best = rows[-1]

    if mixture_step and len(deviations) >= 2:
        weight_grid = np.arange(mixture_step, 1.0 - mixture_step / 2, mixture_step)
        for a_pos, i in enumerate(deviations):
            for j in deviations[a_pos + 1 :]:
                for w in weight_grid:
                    weights = np.zeros(instance.grid.size)
                    weights[i] = w
                    weights[j] = 1.0 - w
                    strategy = DeveloperStrategy(
                        kind=IRRESPONSIBLE, weights=weights, claimed_index=instance.grid.claimed_index
                    )
                    hyp, conf, payoff = _evaluate(instance, strategy)
                    if payoff.total > best[3].total:
                        value = auditor_objective(instance.auditor, hyp, conf)
                        best = (_mixture_label(instance.grid, weights), None, strategy, payoff, value)
                        rows.append(best)

    label, _eps, strategy, _payoff, _value = best
    hyp, conf, payoff = _evaluate(instance, strategy)
    candidates = tuple(
        CandidateEvaluation(
            label=r_label,
            epsilon=r_eps,
            weights=tuple(float(x) for x in r_strategy.weights),
            accuracy_term=r_payoff.expected_accuracy,
            evasion_rate=r_payoff.evasion_rate,
            total=r_payoff.total,
            auditor_value=r_value,
            chosen=r_label == label,
        )
        for r_label, r_eps, r_strategy, r_payoff, r_value in rows
    )
    return EquilibriumResult(
        developer=strategy,
        hypotheses=hyp,
        confidence=conf,
        payoff=payoff,
        auditor_value=auditor_objective(instance.auditor, hyp, conf),
        mode=MODE_ENUMERATION,
        candidates=candidates,
    )


def best_response_iteration(instance: GameInstance, max_rounds: int = 50) -> EquilibriumResult:
    """Alternate developer best response and auditor reply until they agree.

    Starts from the uniform mixture over deviations.  Convergence means the
    same pure deviation answered itself on two consecutive rounds; revisiting
    an older choice without stabilizing is a cycle and is reported through
    ``converged=False`` with the visited round sequence.
    """
    if max_rounds < 1:
        raise ParameterError("max_rounds must be at least 1")
    instance.auditor.require_dp_mode()
    deviations = instance.grid.deviation_indices()
    if not deviations:
        raise NoFeasibleDeviationError("the grid holds only the claimed budget")

    weights = np.zeros(instance.grid.size)
    weights[deviations] = 1.0 / len(deviations)
    history: list[int] = []
    converged = False
    for _ in range(max_rounds):
        _hyp, conf = follower_response(instance, weights)
        response = irresponsible_best_response(
            instance.p, instance.acc, conf, instance.beta, instance.grid
        )
        idx = int(np.argmax(response.weights))
        history.append(idx)
        weights = response.weights
        if len(history) >= 2 and history[-1] == history[-2]:
            converged = True
            break
        if history[-1] in history[:-1]:
            break

    strategy = DeveloperStrategy.point_mass(
        IRRESPONSIBLE, history[-1], instance.grid.size, instance.grid.claimed_index
    )
    hyp, conf, payoff = _evaluate(instance, strategy)
    candidates = []
    for i in deviations:
        pure = DeveloperStrategy.point_mass(
            IRRESPONSIBLE, i, instance.grid.size, instance.grid.claimed_index
        )
        against_final = developer_payoff(pure, instance.p, instance.acc, conf, instance.beta)
        own_hyp, own_conf = follower_response(instance, pure.weights)
        candidates.append(
            CandidateEvaluation(
                label=f"{instance.grid.values[i]:g}",
                epsilon=float(instance.grid.values[i]),
                weights=tuple(float(x) for x in pure.weights),
                accuracy_term=against_final.expected_accuracy,
                evasion_rate=against_final.evasion_rate,
                total=against_final.total,
                auditor_value=auditor_objective(instance.auditor, own_hyp, own_conf),
                chosen=i == history[-1],
            )
        )
    return EquilibriumResult(
        developer=strategy,
        hypotheses=hyp,
        confidence=conf,
        payoff=payoff,
        auditor_value=auditor_objective(instance.auditor, hyp, conf),
        mode=MODE_ITERATION,
        converged=converged,
        candidates=tuple(candidates),
        rounds=tuple(history),
    )


@dataclass
class Table:
    """Column-ordered rows ready for CSV emission."""

    columns: tuple[str, ...]
    rows: tuple[tuple, ...]

    def column(self, name: str) -> np.ndarray:
        idx = self.columns.index(name)
        return np.array([row[idx] for row in self.rows])


def sweep_lambda(instance: GameInstance, lambdas) -> Table:
    """Equilibrium per epistemic factor, plus the per-signal confidence rows."""
    lams = [float(x) for x in lambdas]
    if not lams:
        raise ParameterError("lambda sweep needs at least one value")
    if any(x <= 0 for x in lams):
        raise ParameterError("lambda values must be strictly positive")
    labels = instance.signal_labels
    columns = (
        ["lambda", "epsilon", "developer_total", "evasion_rate", "auditor_value"]
        + [f"r_g_{s}" for s in labels]
        + [f"r_b_{s}" for s in labels]
        + [f"chi_{s}" for s in labels]
    )
    rows = []
    for lam in sorted(lams):
        inst = instance.with_lam(lam)
        eq = solve_stackelberg(inst)
        stats = comparative_statics(inst.auditor, eq.hypotheses)
        rows.append(
            (
                lam,
                eq.chosen_epsilon(instance.grid),
                eq.developer_total,
                eq.evasion_rate,
                eq.auditor_value,
                *[float(x) for x in eq.confidence.r_g],
                *[float(x) for x in eq.confidence.r_b],
                *[float(x) for x in stats.chi],
            )
        )
    return Table(columns=tuple(columns), rows=tuple(rows))


def sweep_qratio(params: AuditorParams, ratios) -> Table:
    """Closed-form confidence as the hypothesis mass ratio sweeps (0, 1)."""
    params.require_dp_mode()
    vals = [float(x) for x in ratios]
    if not vals:
        raise ParameterError("ratio sweep needs at least one value")
    if any(not 0.0 < x < 1.0 for x in vals):
        raise ParameterError("ratios must lie strictly inside (0, 1)")
    rows = []
    for x in sorted(vals):
        r_g, r_b, _norm = confidence_from_ratio(params, np.array([x]))
        chi = params.u_good_flag * (1.0 - x) - params.u_bad_clear * x
        phi = (params.u_good_flag * (1.0 - x) + params.u_bad_clear * x) / params.lam
        rows.append((x, float(r_g[0]), float(r_b[0]), chi, phi))
    return Table(columns=("ratio", "r_g", "r_b", "chi", "phi"), rows=tuple(rows))
