"""Strategic analysis of privacy audits under costly attention.

An auditor who pays for information decides whether a mechanism's outputs
look like the privacy level it claims; a developer picks the level knowing
that.  This package computes both sides in closed form, checks every closed
form against brute-force search, and ships the whole thing behind a config
file, a CLI, and a small HTTP service.
"""

from .auditor import (
    AuditConfidence,
    AuditorParams,
    DecisionRule,
    InformationSolution,
    InformationStrategy,
    auditor_objective,
    bayes_decision_rule,
    comparative_statics,
    mutual_information,
    posterior_confidence,
    solve_audit_confidence,
    solve_information_strategy,
)
from .developer import (
    DeveloperPayoff,
    DeveloperStrategy,
    developer_payoff,
    irresponsible_best_response,
    responsible_strategy,
    switch_condition,
)
from .equilibrium import (
    EquilibriumResult,
    GameInstance,
    best_response_iteration,
    follower_response,
    solve_stackelberg,
    sweep_lambda,
    sweep_qratio,
)
from .errors import ConvergenceError, NoFeasibleDeviationError, ParameterError
from .oracle import (
    GridSpec,
    exhaustive_developer,
    finite_difference,
    grid_max_information_strategy,
    simplex_max_confidence,
)
from .signal_model import (
    AccuracyModel,
    DpCheckResult,
    HypothesisPair,
    MechanismModel,
    PrivacyBudgetGrid,
    SignalSpace,
    check_dp_inequality,
    mix_hypotheses,
    output_distribution,
)

__version__ = "0.1.0"

__all__ = [
    "AccuracyModel",
    "AuditConfidence",
    "AuditorParams",
    "ConvergenceError",
    "DecisionRule",
    "DeveloperPayoff",
    "DeveloperStrategy",
    "DpCheckResult",
    "EquilibriumResult",
    "GameInstance",
    "GridSpec",
    "HypothesisPair",
    "InformationSolution",
    "InformationStrategy",
    "MechanismModel",
    "NoFeasibleDeviationError",
    "ParameterError",
    "PrivacyBudgetGrid",
    "SignalSpace",
    "auditor_objective",
    "bayes_decision_rule",
    "best_response_iteration",
    "check_dp_inequality",
    "comparative_statics",
    "developer_payoff",
    "exhaustive_developer",
    "finite_difference",
    "follower_response",
    "grid_max_information_strategy",
    "irresponsible_best_response",
    "mix_hypotheses",
    "mutual_information",
    "output_distribution",
    "posterior_confidence",
    "responsible_strategy",
    "simplex_max_confidence",
    "solve_audit_confidence",
    "solve_information_strategy",
    "solve_stackelberg",
    "sweep_lambda",
    "sweep_qratio",
    "switch_condition",
    "__version__",
]
