"""Response models for the service endpoints.

Handlers return these; the CLI writes them out as CSV/JSON.  Keeping the
shapes here (rather than ad-hoc dicts) means a remote CLI run revalidates
the payload it gets back before touching the filesystem.
"""

from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, ConfigDict


class _Model(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ConfidenceRow(_Model):
    signal: str
    Q_g: float
    Q_b: float
    v: float
    r_g: float
    r_b: float
    chi: float
    phi: float


class InfoStrategyRow(_Model):
    signal: str
    d_g: float
    d_b: float
    action: str
    posterior_g: float


class SolveAuditorResponse(_Model):
    lam: float
    confidence: list[ConfidenceRow]
    info_strategy: Optional[list[InfoStrategyRow]] = None
    info_value: Optional[float] = None
    info_degenerate: Optional[bool] = None
    auditor_value: float


class CandidateRow(_Model):
    label: str
    epsilon: Optional[float] = None
    weights: list[float]
    accuracy_term: float
    evasion_rate: float
    total: float
    auditor_value: float
    chosen: bool


class EquilibriumResponse(_Model):
    mode: str
    epsilon: float
    weights: list[float]
    developer_total: float
    expected_accuracy: float
    evasion_rate: float
    auditor_value: float
    converged: Optional[bool] = None
    rounds: Optional[list[float]] = None
    candidates: list[CandidateRow]
    confidence: list[ConfidenceRow]


class SweepResponse(_Model):
    parameter: str
    columns: list[str]
    rows: list[list[float]]


class OracleCheckItem(_Model):
    name: str
    passed: bool
    solver_value: float
    oracle_value: float
    gap: float
    tolerance: float
    detail: str = ""


class OracleCheckResponse(_Model):
    passed: bool
    checks: list[OracleCheckItem]


class DpRow(_Model):
    epsilon: float
    shift: float
    max_log_ratio: float
    slack: float
    satisfied: bool


class VerifyDpResponse(_Model):
    passed: bool
    rows: list[DpRow]
