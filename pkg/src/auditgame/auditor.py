"""The rationally inattentive auditor.

Two formulations live here.  The first is the general information-acquisition
problem: the auditor designs conditional signal distributions d(s|state) and a
report rule, paying lam * I(state; signal) for the information.  The second is
the privacy-audit specialization, where the signal law is fixed by the
developer's strategy and the auditor only tilts a per-signal confidence
r(state|s) away from the prior, paying a divergence cost.  The second has a
closed form; the first is solved by partition enumeration plus a fixed point.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import ConvergenceError, ParameterError
from .signal_model import HypothesisPair

ACTION_CLEAR = "clear"
ACTION_FLAG = "flag"

#: Fixed-point iteration defaults: damped half-steps, tight residual.
FIXED_POINT_DAMPING = 0.5
FIXED_POINT_TOL = 1e-12
FIXED_POINT_MAX_ITER = 10_000

#: Partition enumeration is exponential in the signal count.
MAX_ENUMERATED_SIGNALS = 20


@dataclass
class AuditorParams:
    """Priors, audit utilities, and the epistemic factor.

    ``utility`` is a 2x2 matrix indexed by state (good, bad) and action
    (clear, flag).  The threshold rule needs u(good, clear) > u(good, flag)
    and u(bad, flag) > u(bad, clear); the privacy-audit mode additionally
    zeroes the correct-decision entries and keeps the two error penalties
    strictly negative.
    """

    prior_g: float
    prior_b: float
    utility: np.ndarray
    lam: float

    def __post_init__(self):
        if not (0 < self.prior_g < 1 and 0 < self.prior_b < 1):
            raise ParameterError("priors must lie strictly inside (0, 1)")
        if abs(self.prior_g + self.prior_b - 1.0) > 1e-12:
            raise ParameterError("priors must sum to 1")
        if self.lam <= 0:
            raise ParameterError("epistemic factor lam must be strictly positive")
        self.utility = np.asarray(self.utility, dtype=float)
        if self.utility.shape != (2, 2):
            raise ParameterError("utility must be a 2x2 matrix (state x action)")
        if not (self.u_good_clear > self.u_good_flag and self.u_bad_flag > self.u_bad_clear):
            raise ParameterError(
                "threshold rule needs u(good,clear) > u(good,flag) and u(bad,flag) > u(bad,clear)"
            )

    @property
    def u_good_clear(self) -> float:
        return float(self.utility[0, 0])

    @property
    def u_good_flag(self) -> float:
        return float(self.utility[0, 1])

    @property
    def u_bad_clear(self) -> float:
        return float(self.utility[1, 0])

    @property
    def u_bad_flag(self) -> float:
        return float(self.utility[1, 1])

    @classmethod
    def dp_game(
        cls, prior_g: float, penalty_miss: float, penalty_false_alarm: float, lam: float
    ) -> "AuditorParams":
        """Privacy-audit parameterization: only wrong calls carry (negative) utility.

        ``penalty_miss`` is u(bad, clear), the cost of clearing a deviating
        developer; ``penalty_false_alarm`` is u(good, flag).
        """
        utility = np.array(
            [[0.0, float(penalty_false_alarm)], [float(penalty_miss), 0.0]]
        )
        return cls(prior_g=prior_g, prior_b=1.0 - prior_g, utility=utility, lam=lam)

    def is_dp_mode(self) -> bool:
        return (
            self.u_good_clear == 0.0
            and self.u_bad_flag == 0.0
            and self.u_bad_clear < 0.0
            and self.u_good_flag < 0.0
        )

    def require_dp_mode(self):
        if not self.is_dp_mode():
            raise ParameterError(
                "operation needs the privacy-audit utility restriction "
                "(zero for correct calls, strictly negative penalties)"
            )

    def with_lam(self, lam: float) -> "AuditorParams":
        return replace(self, lam=float(lam))


@dataclass
class DecisionRule:
    """Report action per signal; induces the clear/flag partition."""

    actions: tuple[str, ...]

    def __post_init__(self):
        for a in self.actions:
            if a not in (ACTION_CLEAR, ACTION_FLAG):
                raise ParameterError(f"unknown action {a!r}")
        self.actions = tuple(self.actions)

    @classmethod
    def from_mask(cls, clear_mask: np.ndarray) -> "DecisionRule":
        return cls(tuple(ACTION_CLEAR if c else ACTION_FLAG for c in clear_mask))

    @property
    def clear_mask(self) -> np.ndarray:
        return np.array([a == ACTION_CLEAR for a in self.actions])


@dataclass
class InformationStrategy:
    """Chosen conditional signal distributions with their normalizers.

    ``y_g`` and ``y_b`` are the per-state normalization constants of the
    stationarity conditions; the posterior within a cell equals
    prior * exp(u(state, action)/lam) / y_state.
    """

    d_g: np.ndarray
    d_b: np.ndarray
    y_g: float
    y_b: float

    def __post_init__(self):
        self.d_g = np.asarray(self.d_g, dtype=float)
        self.d_b = np.asarray(self.d_b, dtype=float)
        for name, row in (("d_g", self.d_g), ("d_b", self.d_b)):
            if np.any(row < 0) or abs(float(row.sum()) - 1.0) > 1e-10:
                raise ParameterError(f"{name} is not a distribution")

    @property
    def size(self) -> int:
        return int(self.d_g.size)

    def marginal(self, params: AuditorParams) -> np.ndarray:
        return params.prior_g * self.d_g + params.prior_b * self.d_b


@dataclass
class AuditConfidence:
    """Per-signal confidence weights r(state|s) with their normalizer.

    ``prior_fallback`` marks signals that carry no mass under either
    hypothesis; their confidence is pinned to the prior.
    """

    r_g: np.ndarray
    r_b: np.ndarray
    normalizer: np.ndarray
    prior_fallback: np.ndarray

    def __post_init__(self):
        self.r_g = np.asarray(self.r_g, dtype=float)
        self.r_b = np.asarray(self.r_b, dtype=float)
        self.normalizer = np.asarray(self.normalizer, dtype=float)
        self.prior_fallback = np.asarray(self.prior_fallback, dtype=bool)
        if np.any(self.r_g < 0) or np.any(self.r_g > 1) or np.any(self.r_b < 0) or np.any(self.r_b > 1):
            raise ParameterError("confidence entries must lie in [0, 1]")
        if np.max(np.abs(self.r_g + self.r_b - 1.0)) > 1e-10:
            raise ParameterError("confidence rows must sum to 1 per signal")

    @property
    def size(self) -> int:
        return int(self.r_g.size)


@dataclass
class CellPosteriors:
    """Posterior audit confidence per partition cell (NaN when undefined)."""

    posterior_g_clear: float
    posterior_b_clear: float
    posterior_g_flag: float
    posterior_b_flag: float
    clear_defined: bool
    flag_defined: bool

    def per_signal_good(self, rule: DecisionRule) -> np.ndarray:
        """Posterior of the good state per signal (the cell value)."""
        mask = rule.clear_mask
        return np.where(mask, self.posterior_g_clear, self.posterior_g_flag)


@dataclass
class ComparativeStatics:
    """Per-signal sensitivity quantities for the closed-form confidence."""

    chi: np.ndarray
    phi: np.ndarray
    dr_dlambda: np.ndarray
    dr_dqratio: np.ndarray
    defined: np.ndarray


@dataclass
class InformationSolution:
    """Winner of the partition enumeration."""

    strategy: InformationStrategy
    rule: DecisionRule
    value: float
    degenerate: bool
    candidates_checked: int
    skipped_nonconverged: int


def _clear_mask(params: AuditorParams, d_g: np.ndarray, d_b: np.ndarray) -> np.ndarray:
    """Threshold rule in cross-multiplied form, ties resolved toward clear.

    Clearing is optimal whenever the prior-weighted likelihood of the bad
    state, scaled by its flagging gain, does not exceed the good-state side.
    Signals with zero mass under both states compare 0 <= 0 and clear.
    """
    gain_clear = params.prior_g * (params.u_good_clear - params.u_good_flag) * d_g
    gain_flag = params.prior_b * (params.u_bad_flag - params.u_bad_clear) * d_b
    return gain_flag <= gain_clear


def bayes_decision_rule(params: AuditorParams, strategy: InformationStrategy) -> DecisionRule:
    """Best report per signal given the information strategy."""
    return DecisionRule.from_mask(_clear_mask(params, strategy.d_g, strategy.d_b))


def _cell_utilities(params: AuditorParams, clear_mask: np.ndarray):
    u_g = np.where(clear_mask, params.u_good_clear, params.u_good_flag)
    u_b = np.where(clear_mask, params.u_bad_clear, params.u_bad_flag)
    return u_g, u_b


def _partition_fixed_point(
    params: AuditorParams,
    clear_mask: np.ndarray,
    damping: float,
    tol: float,
    max_iter: int,
):
    """Damped fixed point for the stationarity conditions under a fixed partition.

    Iterates the signal marginal v: each step rebuilds d(s|state) proportional
    to v(s) * exp(u(state, action(s))/lam) and folds it back through the prior.
    Started from the uniform marginal, which keeps the within-cell split
    deterministic.
    """
    u_g, u_b = _cell_utilities(params, clear_mask)
    w_g = np.exp(u_g / params.lam)
    w_b = np.exp(u_b / params.lam)
    n = clear_mask.size
    v = np.full(n, 1.0 / n)
    converged = False
    residual = np.inf
    for _ in range(max_iter):
        y_g = float(v @ w_g)
        y_b = float(v @ w_b)
        growth = params.prior_g * w_g / y_g + params.prior_b * w_b / y_b
        v_next = v * growth
        residual = float(np.max(np.abs(v_next - v)))
        v = (1.0 - damping) * v + damping * v_next
        if residual < tol:
            converged = True
            break
    y_g = float(v @ w_g)
    y_b = float(v @ w_b)
    return v * w_g / y_g, v * w_b / y_b, y_g, y_b, converged, residual


def mutual_information(params: AuditorParams, d_g: np.ndarray, d_b: np.ndarray) -> float:
    """I(state; signal) in nats under the prior, with 0 log 0 = 0."""
    v = params.prior_g * d_g + params.prior_b * d_b
    total = 0.0
    for prior, row in ((params.prior_g, d_g), (params.prior_b, d_b)):
        pos = row > 0
        total += prior * float(np.sum(row[pos] * np.log(row[pos] / v[pos])))
    return total


def information_objective(
    params: AuditorParams, d_g: np.ndarray, d_b: np.ndarray, clear_mask: np.ndarray
) -> float:
    """Expected audit utility minus the information cost for a given partition."""
    u_g, u_b = _cell_utilities(params, clear_mask)
    expected = params.prior_g * float(d_g @ u_g) + params.prior_b * float(d_b @ u_b)
    return expected - params.lam * mutual_information(params, d_g, d_b)


def _enumerate_masks(n: int):
    """All action assignments: proper bipartitions first (in bitmask order),
    then the two single-action candidates."""
    for m in range(1, 2**n - 1):
        yield np.array([(m >> i) & 1 == 1 for i in range(n)])
    yield np.ones(n, dtype=bool)
    yield np.zeros(n, dtype=bool)


def solve_information_strategy(
    params: AuditorParams,
    n_signals: int = 2,
    damping: float = FIXED_POINT_DAMPING,
    tol: float = FIXED_POINT_TOL,
    max_iter: int = FIXED_POINT_MAX_ITER,
) -> InformationSolution:
    """Optimal information acquisition by partition enumeration.

    Every assignment of signals to report actions is tried: the fixed point
    gives the stationary d for that assignment, and the candidate survives
    only if the threshold rule applied to its own d reproduces the assignment.
    The two single-action assignments cover the zero-information corner, so a
    consistent candidate always exists; when no two-action partition survives
    (information too expensive to be worth acquiring) the result is the best
    unconditional report and is marked degenerate.

    Candidates whose fixed point fails to converge within ``max_iter`` are
    discarded rather than fatal; the count is reported on the solution.
    """
    if not 2 <= n_signals <= MAX_ENUMERATED_SIGNALS:
        raise ParameterError(
            f"signal count must be between 2 and {MAX_ENUMERATED_SIGNALS} for enumeration"
        )
    best = None
    best_value = -np.inf
    checked = 0
    skipped = 0
    for mask in _enumerate_masks(n_signals):
        checked += 1
        d_g, d_b, y_g, y_b, converged, _residual = _partition_fixed_point(
            params, mask, damping, tol, max_iter
        )
        if not converged:
            skipped += 1
            continue
        if not np.array_equal(_clear_mask(params, d_g, d_b), mask):
            continue
        value = information_objective(params, d_g, d_b, mask)
        if value > best_value:
            best_value = value
            best = (d_g, d_b, y_g, y_b, mask)
    if best is None:
        raise ConvergenceError("no partition candidate converged", residual=np.nan)
    d_g, d_b, y_g, y_b, mask = best
    degenerate = bool(np.all(mask) or not np.any(mask))
    return InformationSolution(
        strategy=InformationStrategy(d_g=d_g, d_b=d_b, y_g=y_g, y_b=y_b),
        rule=DecisionRule.from_mask(mask),
        value=float(best_value),
        degenerate=degenerate,
        candidates_checked=checked,
        skipped_nonconverged=skipped,
    )


def posterior_confidence(
    params: AuditorParams, strategy: InformationStrategy, rule: DecisionRule
) -> CellPosteriors:
    """Posterior belief per partition cell, by Bayes rule on cell masses.

    The stationary structure makes the per-signal posterior constant within
    each cell, so the cell value is the whole story.  A cell that receives no
    mass has no posterior and is flagged undefined.
    """
    if not np.array_equal(_clear_mask(params, strategy.d_g, strategy.d_b), rule.clear_mask):
        raise ParameterError("decision rule is not the threshold response to this strategy")
    out = {}
    for name, cell in (("clear", rule.clear_mask), ("flag", ~rule.clear_mask)):
        mass_g = float(strategy.d_g[cell].sum())
        mass_b = float(strategy.d_b[cell].sum())
        denom = params.prior_g * mass_g + params.prior_b * mass_b
        if denom <= 0.0:
            out[name] = (np.nan, np.nan, False)
        else:
            pg = params.prior_g * mass_g / denom
            out[name] = (pg, 1.0 - pg, True)
    return CellPosteriors(
        posterior_g_clear=out["clear"][0],
        posterior_b_clear=out["clear"][1],
        posterior_g_flag=out["flag"][0],
        posterior_b_flag=out["flag"][1],
        clear_defined=out["clear"][2],
        flag_defined=out["flag"][2],
    )


def confidence_from_ratio(params: AuditorParams, ratio: np.ndarray):
    """Closed-form confidence given per-signal q_b/v ratios.

    Returns (r_g, r_b, normalizer).  The good-state weight is the prior tilted
    by exp(u(bad,clear) * ratio / lam), the bad-state weight by
    exp(u(good,flag) * (1 - ratio) / lam); both exponents are nonpositive in
    the privacy-audit mode, so nothing overflows.
    """
    params.require_dp_mode()
    ratio = np.asarray(ratio, dtype=float)
    a = params.prior_g * np.exp(params.u_bad_clear * ratio / params.lam)
    b = params.prior_b * np.exp(params.u_good_flag * (1.0 - ratio) / params.lam)
    norm = a + b
    return a / norm, b / norm, norm


def solve_audit_confidence(params: AuditorParams, hyp: HypothesisPair) -> AuditConfidence:
    """Optimal per-signal confidence for the privacy-audit objective.

    Signals with zero mass under both hypotheses cannot move the objective;
    their confidence falls back to the prior and is flagged.
    """
    params.require_dp_mode()
    mass = hyp.v > 0
    r_g = np.full(hyp.size, params.prior_g)
    r_b = np.full(hyp.size, params.prior_b)
    norm = np.ones(hyp.size)
    if np.any(mass):
        t = hyp.q_b[mass] / hyp.v[mass]
        r_g[mass], r_b[mass], norm[mass] = confidence_from_ratio(params, t)
    return AuditConfidence(r_g=r_g, r_b=r_b, normalizer=norm, prior_fallback=~mass)


def auditor_objective(params: AuditorParams, hyp: HypothesisPair, conf: AuditConfidence) -> float:
    """Audit-error utility minus the lam-weighted divergence from the prior."""
    params.require_dp_mode()
    kl = np.zeros(hyp.size)
    for r, prior in ((conf.r_g, params.prior_g), (conf.r_b, params.prior_b)):
        pos = r > 0
        kl[pos] += r[pos] * np.log(r[pos] / prior)
    error_terms = params.u_good_flag * float(hyp.q_g @ conf.r_b) + params.u_bad_clear * float(
        hyp.q_b @ conf.r_g
    )
    return error_terms - params.lam * float(hyp.v @ kl)


def comparative_statics(params: AuditorParams, hyp: HypothesisPair) -> ComparativeStatics:
    """Sensitivity of the closed-form confidence to lam and to the mass ratio.

    chi controls the sign of the lam derivative; phi collects both exponents.
    Zero-mass signals have no defined statics and come back NaN.
    """
    params.require_dp_mode()
    conf = solve_audit_confidence(params, hyp)
    mass = hyp.v > 0
    chi = np.full(hyp.size, np.nan)
    phi = np.full(hyp.size, np.nan)
    dr_dlam = np.full(hyp.size, np.nan)
    dr_dratio = np.full(hyp.size, np.nan)
    qg, qb, v = hyp.q_g[mass], hyp.q_b[mass], hyp.v[mass]
    chi[mass] = (params.u_good_flag * qg - params.u_bad_clear * qb) / v
    phi[mass] = (params.u_good_flag * qg + params.u_bad_clear * qb) / (params.lam * v)
    norm = conf.normalizer[mass]
    shared = params.prior_g * params.prior_b * np.exp(phi[mass]) / norm**2
    dr_dlam[mass] = shared * chi[mass] / params.lam**2
    dr_dratio[mass] = shared * (params.u_good_flag + params.u_bad_clear) / params.lam
    return ComparativeStatics(
        chi=chi, phi=phi, dr_dlambda=dr_dlam, dr_dqratio=dr_dratio, defined=mass
    )
