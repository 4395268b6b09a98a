"""Signal-generation side of the audit game.

A developer runs a noisy mechanism at some privacy budget; the auditor only
sees which bin the released value lands in.  This module builds the
conditional signal distributions p(s|eps) for every budget on the grid, the
accuracy curve A(eps), the privacy-loss self-check, and the mixing of
developer strategies into the two audit hypotheses.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError

SIMPLEX_TOL = 1e-12


def _as_distribution(values, name: str, tol: float = SIMPLEX_TOL) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise ParameterError(f"{name} must be a one-dimensional vector")
    if np.any(arr < 0):
        raise ParameterError(f"{name} has negative entries")
    total = float(arr.sum())
    if abs(total - 1.0) > tol:
        raise ParameterError(f"{name} sums to {total!r}, expected 1")
    return arr


@dataclass
class PrivacyBudgetGrid:
    """Finite menu of privacy budgets with one entry marked as claimed."""

    values: np.ndarray
    claimed_index: int = 0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 1 or self.values.size == 0:
            raise ParameterError("budget grid must be a non-empty vector")
        if np.any(self.values <= 0):
            raise ParameterError("budget values must be strictly positive")
        if self.values.size > 1 and np.any(np.diff(self.values) <= 0):
            raise ParameterError("budget values must be strictly increasing")
        if not 0 <= int(self.claimed_index) < self.values.size:
            raise ParameterError(
                f"claimed_index {self.claimed_index} outside grid of size {self.values.size}"
            )
        self.claimed_index = int(self.claimed_index)

    @property
    def size(self) -> int:
        return int(self.values.size)

    @property
    def claimed(self) -> float:
        """The published budget eps'."""
        return float(self.values[self.claimed_index])

    def deviation_indices(self) -> list[int]:
        """Indices of every budget except the claimed one."""
        return [i for i in range(self.size) if i != self.claimed_index]


@dataclass
class SignalSpace:
    """Discrete signal alphabet, optionally backed by bins on the real line.

    For binned mechanisms ``bin_edges`` has ``size + 1`` strictly increasing
    entries; mass outside the outer edges is folded into the boundary bins.
    Label-only spaces (explicit signal tables) carry no edges.
    """

    size: int
    bin_edges: np.ndarray | None = None
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        self.size = int(self.size)
        if self.size < 2:
            raise ParameterError("signal space needs at least two signals")
        if self.bin_edges is not None:
            self.bin_edges = np.asarray(self.bin_edges, dtype=float)
            if self.bin_edges.shape != (self.size + 1,):
                raise ParameterError(
                    f"expected {self.size + 1} bin edges, got {self.bin_edges.shape}"
                )
            if np.any(np.diff(self.bin_edges) <= 0):
                raise ParameterError("bin edges must be strictly increasing")
        if not self.labels:
            self.labels = tuple(f"s{i}" for i in range(self.size))
        elif len(self.labels) != self.size:
            raise ParameterError("label count does not match signal count")

    @classmethod
    def from_range(cls, lo: float, hi: float, size: int) -> "SignalSpace":
        return cls(size=size, bin_edges=np.linspace(lo, hi, size + 1))

    @classmethod
    def labeled(cls, labels: tuple[str, ...]) -> "SignalSpace":
        return cls(size=len(labels), bin_edges=None, labels=tuple(labels))


@dataclass
class MechanismModel:
    """Noisy release mechanism, either a discretized Laplace law or a table."""

    kind: str = "discretized-laplace"
    true_value: float = 0.0
    sensitivity: float = 1.0
    table: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in ("discretized-laplace", "explicit-table"):
            raise ParameterError(f"unknown mechanism kind {self.kind!r}")
        if self.kind == "discretized-laplace" and self.sensitivity <= 0:
            raise ParameterError("sensitivity must be strictly positive")
        if self.kind == "explicit-table":
            if self.table is None:
                raise ParameterError("explicit-table mechanism needs a table")
            self.table = np.asarray(self.table, dtype=float)
            if self.table.ndim != 2:
                raise ParameterError("mechanism table must be two-dimensional")


@dataclass
class AccuracyModel:
    """Accuracy curve A(eps), bound to the budget grid it was built for."""

    budgets: np.ndarray
    kind: str = "exponential-saturation"
    values: np.ndarray | None = None

    def __post_init__(self):
        self.budgets = np.asarray(self.budgets, dtype=float)
        if self.kind not in ("exponential-saturation", "explicit-table"):
            raise ParameterError(f"unknown accuracy kind {self.kind!r}")
        if self.kind == "explicit-table":
            if self.values is None:
                raise ParameterError("explicit-table accuracy needs values")
            self.values = np.asarray(self.values, dtype=float)
            if self.values.shape != self.budgets.shape:
                raise ParameterError("accuracy values must align with the budget grid")
            if np.any(np.diff(self.values) <= 0):
                raise ParameterError("accuracy must be strictly increasing in the budget")

    @classmethod
    def exponential(cls, grid: PrivacyBudgetGrid) -> "AccuracyModel":
        return cls(budgets=grid.values)

    @classmethod
    def from_table(cls, grid: PrivacyBudgetGrid, values) -> "AccuracyModel":
        return cls(budgets=grid.values, kind="explicit-table", values=np.asarray(values, dtype=float))


def accuracy(model: AccuracyModel, eps: float) -> float:
    """Evaluate A(eps).

    The exponential-saturation default is A(eps) = 1 - exp(-eps): bounded,
    strictly increasing, and zero at zero budget.  Table models only answer
    for budgets they were tabulated at.
    """
    if model.kind == "exponential-saturation":
        return float(1.0 - np.exp(-float(eps)))
    hits = np.nonzero(np.abs(model.budgets - eps) <= 1e-12)[0]
    if hits.size == 0:
        raise ParameterError(f"budget {eps!r} is not tabulated")
    return float(model.values[hits[0]])


def accuracy_values(model: AccuracyModel) -> np.ndarray:
    """A(eps) for every budget on the model's grid, in grid order."""
    out = np.array([accuracy(model, e) for e in model.budgets])
    if np.any(np.diff(out) <= 0):
        raise ParameterError("accuracy must be strictly increasing across the grid")
    return out


@dataclass
class HypothesisPair:
    """Signal distributions under the two audit hypotheses.

    ``q_g`` is the signal law when the developer is responsible, ``q_b`` when
    irresponsible.  ``v`` is their plain (unweighted) per-signal total; this is
    the weight the confidence objective attaches to each signal's divergence
    term.
    """

    q_g: np.ndarray
    q_b: np.ndarray
    v: np.ndarray = field(init=False)

    def __post_init__(self):
        self.q_g = _as_distribution(self.q_g, "q_g")
        self.q_b = _as_distribution(self.q_b, "q_b")
        if self.q_g.shape != self.q_b.shape:
            raise ParameterError("hypothesis rows must have equal length")
        self.v = self.q_g + self.q_b

    @property
    def size(self) -> int:
        return int(self.q_g.size)

    def ratio(self) -> np.ndarray:
        """Per-signal q_b(s)/v(s); NaN where the signal has zero mass."""
        out = np.full(self.size, np.nan)
        mass = self.v > 0
        out[mass] = self.q_b[mass] / self.v[mass]
        return out


def _laplace_cdf(x: np.ndarray, loc: float, scale: float) -> np.ndarray:
    z = (np.asarray(x, dtype=float) - loc) / scale
    return np.where(z < 0, 0.5 * np.exp(z), 1.0 - 0.5 * np.exp(-z))


def _laplace_bin_masses(space: SignalSpace, loc: float, scale: float) -> np.ndarray:
    """Bin masses of Laplace(loc, scale), tails folded into the outer bins."""
    if space.bin_edges is None:
        raise ParameterError("signal space has no bin edges")
    inner = _laplace_cdf(space.bin_edges[1:-1], loc, scale)
    cum = np.concatenate(([0.0], inner, [1.0]))
    return np.diff(cum)


def output_distribution(
    mech: MechanismModel, grid: PrivacyBudgetGrid, space: SignalSpace
) -> np.ndarray:
    """Conditional signal distributions, one row per grid budget.

    For the Laplace kind the row for eps integrates the Laplace(true_value,
    sensitivity/eps) density over each bin; CDF differences make the masses
    exact up to rounding.
    """
    if mech.kind == "explicit-table":
        if mech.table.shape != (grid.size, space.size):
            raise ParameterError(
                f"mechanism table shape {mech.table.shape} does not match "
                f"{grid.size} budgets x {space.size} signals"
            )
        for i in range(grid.size):
            _as_distribution(mech.table[i], f"p(s|eps_{i})")
        return np.array(mech.table, dtype=float)

    rows = np.empty((grid.size, space.size))
    for i, eps in enumerate(grid.values):
        rows[i] = _laplace_bin_masses(space, mech.true_value, mech.sensitivity / eps)
    return rows


@dataclass
class DpCheckResult:
    """Observed worst-case log mass ratio for one budget, plus the slack."""

    epsilon: float
    max_log_ratio: float
    slack: float


def check_dp_inequality(
    mech: MechanismModel,
    eps: float,
    space: SignalSpace,
    shift: float | None = None,
) -> DpCheckResult:
    """Self-check of the epsilon-DP guarantee on the binned mechanism.

    Compares the bin masses produced at the true value against those produced
    when the input shifts by one sensitivity (the worst neighboring dataset
    for a scalar query) and reports the largest absolute log ratio.  For the
    Laplace mechanism the pointwise density ratio is bounded by e^eps
    uniformly, so binning cannot break the bound; ``slack`` records any
    numerically observed excess over eps.
    """
    if mech.kind != "discretized-laplace":
        raise ParameterError("privacy self-check supports only the discretized-laplace kind")
    if eps <= 0:
        raise ParameterError("budget must be strictly positive")
    if space.bin_edges is None or space.size < 1:
        raise ParameterError("privacy self-check needs a binned signal space")
    if shift is None:
        shift = mech.sensitivity
    scale = mech.sensitivity / eps
    p1 = _laplace_bin_masses(space, mech.true_value, scale)
    p2 = _laplace_bin_masses(space, mech.true_value + shift, scale)
    # Bins whose mass underflows to zero under both laws are treated as
    # matching; a bin empty under exactly one law is an honest infinity.
    both = (p1 > 0) & (p2 > 0)
    ratios = np.zeros_like(p1)
    ratios[both] = np.abs(np.log(p1[both]) - np.log(p2[both]))
    ratios[(p1 > 0) != (p2 > 0)] = np.inf
    worst = float(np.max(ratios))
    return DpCheckResult(epsilon=float(eps), max_log_ratio=worst, slack=max(0.0, worst - eps))


def _strategy_weights(strategy, name: str) -> np.ndarray:
    weights = getattr(strategy, "weights", strategy)
    return _as_distribution(weights, name)


def mix_hypotheses(p: np.ndarray, q_g, q_b, claimed_index: int | None = None) -> HypothesisPair:
    """Mix developer strategies through the mechanism into Q_g and Q_b.

    ``q_g`` and ``q_b`` may be plain weight vectors or developer strategies
    (anything with a ``weights`` attribute).  An irresponsible strategy must
    put no mass on the claimed budget; the claimed index is taken from the
    strategy when it carries one, or may be passed explicitly.
    """
    p = np.asarray(p, dtype=float)
    if p.ndim != 2:
        raise ParameterError("p must be a matrix of signal distributions")
    w_g = _strategy_weights(q_g, "q_g weights")
    w_b = _strategy_weights(q_b, "q_b weights")
    if w_g.size != p.shape[0] or w_b.size != p.shape[0]:
        raise ParameterError(
            f"strategy length must match the {p.shape[0]} budgets in the mechanism matrix"
        )
    if claimed_index is None:
        claimed_index = getattr(q_b, "claimed_index", None)
    if claimed_index is not None and w_b[int(claimed_index)] > 0:
        raise ParameterError(
            "irresponsible strategy puts mass on the claimed budget"
        )
    return HypothesisPair(q_g=w_g @ p, q_b=w_b @ p)
