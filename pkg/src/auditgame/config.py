"""Run configuration: schema, YAML loading, and assembly into game objects.

The same model is the request body of the service, so one validation pass
covers the CLI and the HTTP surface.  Unknown keys are rejected everywhere;
error messages carry dotted field paths.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path
from typing import Literal, Optional, Union

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .auditor import AuditorParams
from .equilibrium import GameInstance
from .errors import ParameterError
from .signal_model import (
    AccuracyModel,
    MechanismModel,
    PrivacyBudgetGrid,
    SignalSpace,
)


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)


class GridRange(_Section):
    """Inclusive arithmetic progression, a compact list alternative."""

    start: float
    stop: float
    step: float = Field(gt=0)

    def values(self) -> list[float]:
        if self.stop < self.start:
            raise ParameterError("grid range has stop below start")
        count = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        return [round(self.start + k * self.step, 12) for k in range(count)]


def _expand(values: Union[list[float], GridRange, None]) -> list[float]:
    if values is None:
        return []
    if isinstance(values, GridRange):
        return values.values()
    return [float(x) for x in values]


class MechanismSection(_Section):
    kind: Literal["discretized-laplace", "explicit-table"] = "discretized-laplace"
    true_value: float = 0.0
    sensitivity: float = Field(default=1.0, gt=0)
    bins: int = Field(default=8, ge=2)
    range: Optional[tuple[float, float]] = None
    table: Optional[list[list[float]]] = None
    table_csv: Optional[str] = None
    signal_labels: Optional[list[str]] = None

    @model_validator(mode="after")
    def _check_table(self):
        if self.kind == "explicit-table":
            if (self.table is None) == (self.table_csv is None):
                raise ValueError("explicit-table needs exactly one of table or table_csv")
        elif self.table is not None or self.table_csv is not None:
            raise ValueError("table entries are only valid for the explicit-table kind")
        if self.range is not None and self.range[1] <= self.range[0]:
            raise ValueError("range upper bound must exceed the lower bound")
        return self


class BudgetSection(_Section):
    grid: list[float] = Field(min_length=1)
    claimed_index: int = Field(default=0, ge=0)


class AccuracySection(_Section):
    kind: Literal["exponential-saturation", "explicit-table"] = "exponential-saturation"
    values: Optional[list[float]] = None

    @model_validator(mode="after")
    def _check_values(self):
        if self.kind == "explicit-table" and self.values is None:
            raise ValueError("explicit-table accuracy needs values")
        if self.kind == "exponential-saturation" and self.values is not None:
            raise ValueError("values are only valid for the explicit-table kind")
        return self


class UtilitySection(_Section):
    """Full 2x2 audit utility for the general information-strategy path."""

    good_clear: float
    good_flag: float
    bad_clear: float
    bad_flag: float

    @model_validator(mode="after")
    def _check_order(self):
        if not (self.good_clear > self.good_flag and self.bad_flag > self.bad_clear):
            raise ValueError(
                "need good_clear > good_flag and bad_flag > bad_clear for the threshold rule"
            )
        return self


class AuditorSection(_Section):
    prior_good: float = Field(default=0.5, gt=0, lt=1)
    penalty_miss: float = Field(lt=0)
    penalty_false_alarm: float = Field(lt=0)
    lam: float = Field(default=1.0, gt=0, alias="lambda")
    lambda_grid: Optional[Union[list[float], GridRange]] = None
    utility: Optional[UtilitySection] = None


class SweepSection(_Section):
    parameter: Literal["lambda", "qratio"]
    ratios: Optional[Union[list[float], GridRange]] = None


class DeveloperSection(_Section):
    beta: float = Field(default=1.0, ge=0)
    weights: Optional[list[float]] = None


class RunSection(_Section):
    out: str = "out"
    mode: Literal["leader-enumeration", "iteration"] = "leader-enumeration"
    sweep: Optional[SweepSection] = None
    max_rounds: int = Field(default=50, ge=1)
    oracle_resolution: int = Field(default=50, ge=10)
    oracle_tolerance: float = Field(default=1e-3, gt=0)
    # Fault injection for the oracle-check negative path: added to r(g|s)
    # before comparison, so a nonzero value must make the check fail.
    perturb_confidence: float = 0.0


class RunConfig(_Section):
    mechanism: MechanismSection = MechanismSection()
    budgets: BudgetSection
    accuracy: AccuracySection = AccuracySection()
    auditor: AuditorSection
    developer: DeveloperSection = DeveloperSection()
    run: RunSection = RunSection()


def format_validation_error(err: ValidationError) -> str:
    """One line per problem, each led by the dotted field path."""
    lines = []
    for item in err.errors():
        path = ".".join(str(p) for p in item["loc"]) or "<root>"
        lines.append(f"{path}: {item['msg']}")
    return "\n".join(lines)


def load_config(path: str | Path) -> RunConfig:
    """Parse and validate a YAML config file."""
    raw = Path(path).read_text()
    data = yaml.safe_load(raw)
    if not isinstance(data, dict):
        raise ParameterError(f"config file {path} does not hold a mapping")
    return RunConfig.model_validate(data)


def _read_table_csv(path: Path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        rows = [row for row in reader if row]
    if len(rows) < 2:
        raise ParameterError(f"table file {path} needs a header and at least one row")
    labels = tuple(cell.strip() for cell in rows[0])
    table = [[float(cell) for cell in row] for row in rows[1:]]
    return labels, table


def build_grid(cfg: RunConfig) -> PrivacyBudgetGrid:
    return PrivacyBudgetGrid(values=np.array(cfg.budgets.grid), claimed_index=cfg.budgets.claimed_index)


def build_mechanism(cfg: RunConfig, base_dir: Path | None = None):
    """Mechanism plus its signal space (labels included)."""
    mech_cfg = cfg.mechanism
    if mech_cfg.kind == "explicit-table":
        labels = tuple(mech_cfg.signal_labels or ())
        table = mech_cfg.table
        if mech_cfg.table_csv is not None:
            path = Path(mech_cfg.table_csv)
            if not path.is_absolute() and base_dir is not None:
                path = base_dir / path
            csv_labels, table = _read_table_csv(path)
            labels = labels or csv_labels
        table = np.asarray(table, dtype=float)
        if not labels:
            labels = tuple(f"s{i}" for i in range(table.shape[1]))
        mech = MechanismModel(kind="explicit-table", table=table)
        space = SignalSpace.labeled(labels)
        return mech, space

    grid = build_grid(cfg)
    if mech_cfg.range is not None:
        lo, hi = mech_cfg.range
    else:
        spread = 8.0 * mech_cfg.sensitivity / float(grid.values.min())
        lo, hi = mech_cfg.true_value - spread, mech_cfg.true_value + spread
    mech = MechanismModel(
        kind="discretized-laplace",
        true_value=mech_cfg.true_value,
        sensitivity=mech_cfg.sensitivity,
    )
    space = SignalSpace.from_range(lo, hi, mech_cfg.bins)
    if mech_cfg.signal_labels:
        if len(mech_cfg.signal_labels) != space.size:
            raise ParameterError("mechanism.signal_labels: count does not match bins")
        space.labels = tuple(mech_cfg.signal_labels)
    return mech, space


def build_accuracy(cfg: RunConfig, grid: PrivacyBudgetGrid) -> AccuracyModel:
    if cfg.accuracy.kind == "explicit-table":
        return AccuracyModel.from_table(grid, cfg.accuracy.values)
    return AccuracyModel.exponential(grid)


def build_auditor(cfg: RunConfig) -> AuditorParams:
    """Privacy-audit parameters from the penalty fields."""
    a = cfg.auditor
    return AuditorParams.dp_game(
        prior_g=a.prior_good,
        penalty_miss=a.penalty_miss,
        penalty_false_alarm=a.penalty_false_alarm,
        lam=a.lam,
    )


def build_general_auditor(cfg: RunConfig) -> AuditorParams | None:
    """Full-utility parameters when the config asks for the general path."""
    a = cfg.auditor
    if a.utility is None:
        return None
    utility = np.array(
        [
            [a.utility.good_clear, a.utility.good_flag],
            [a.utility.bad_clear, a.utility.bad_flag],
        ]
    )
    return AuditorParams(
        prior_g=a.prior_good, prior_b=1.0 - a.prior_good, utility=utility, lam=a.lam
    )


def developer_weights(cfg: RunConfig, grid: PrivacyBudgetGrid) -> np.ndarray:
    """Irresponsible posture from the config; uniform over deviations by default."""
    if cfg.developer.weights is not None:
        weights = np.asarray(cfg.developer.weights, dtype=float)
        if weights.size != grid.size:
            raise ParameterError(
                f"developer.weights: expected {grid.size} entries, got {weights.size}"
            )
        return weights
    deviations = grid.deviation_indices()
    if not deviations:
        raise ParameterError("developer.weights: grid has no deviation budgets")
    weights = np.zeros(grid.size)
    weights[deviations] = 1.0 / len(deviations)
    return weights


def lambda_values(cfg: RunConfig) -> list[float]:
    vals = _expand(cfg.auditor.lambda_grid)
    if not vals:
        raise ParameterError("auditor.lambda_grid: required and non-empty for a lambda sweep")
    return vals


def ratio_values(cfg: RunConfig) -> list[float]:
    if cfg.run.sweep is None:
        raise ParameterError("run.sweep: missing")
    vals = _expand(cfg.run.sweep.ratios)
    if not vals:
        raise ParameterError("run.sweep.ratios: required and non-empty for a qratio sweep")
    return vals


def build_instance(cfg: RunConfig, base_dir: Path | None = None):
    """Assemble the full game instance; returns (instance, signal space)."""
    grid = build_grid(cfg)
    mech, space = build_mechanism(cfg, base_dir)
    from .signal_model import output_distribution

    p = output_distribution(mech, grid, space)
    instance = GameInstance(
        grid=grid,
        p=p,
        acc=build_accuracy(cfg, grid),
        auditor=build_auditor(cfg),
        beta=cfg.developer.beta,
        signal_labels=space.labels,
    )
    return instance, space, mech
