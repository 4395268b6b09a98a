"""Mechanism, accuracy, and hypothesis plumbing."""

import numpy as np
import pytest
from scipy import integrate, stats

from auditgame import (
    AccuracyModel,
    HypothesisPair,
    MechanismModel,
    ParameterError,
    PrivacyBudgetGrid,
    SignalSpace,
    check_dp_inequality,
    mix_hypotheses,
    output_distribution,
)
from auditgame.signal_model import accuracy, accuracy_values

GRID = PrivacyBudgetGrid(values=np.array([0.5, 1.0, 2.0]))


def laplace_mech(true_value=0.0, sensitivity=1.0):
    return MechanismModel(kind="discretized-laplace", true_value=true_value, sensitivity=sensitivity)


class TestBudgetGrid:
    def test_claimed_and_deviations(self):
        grid = PrivacyBudgetGrid(values=np.array([0.5, 1.0, 2.0]), claimed_index=1)
        assert grid.claimed == 1.0
        assert grid.deviation_indices() == [0, 2]

    @pytest.mark.parametrize(
        "values",
        [np.array([]), np.array([1.0, 0.5]), np.array([1.0, 1.0]), np.array([-1.0, 2.0])],
    )
    def test_rejects_bad_grids(self, values):
        with pytest.raises(ParameterError):
            PrivacyBudgetGrid(values=values)

    def test_rejects_out_of_range_claim(self):
        with pytest.raises(ParameterError):
            PrivacyBudgetGrid(values=np.array([1.0, 2.0]), claimed_index=5)


def test_bin_masses_match_quadrature():
    """The CDF-difference bins agree with numerically integrating the density."""
    space = SignalSpace.from_range(-4.0, 4.0, 6)
    rows = output_distribution(laplace_mech(), GRID, space)
    for i, eps in enumerate(GRID.values):
        scale = 1.0 / eps
        dist = stats.laplace(loc=0.0, scale=scale)
        for j in range(1, space.size - 1):
            lo, hi = space.bin_edges[j], space.bin_edges[j + 1]
            mass, _err = integrate.quad(dist.pdf, lo, hi)
            assert rows[i, j] == pytest.approx(mass, abs=1e-10)


def test_tails_fold_into_boundary_bins():
    space = SignalSpace.from_range(-4.0, 4.0, 6)
    rows = output_distribution(laplace_mech(), GRID, space)
    dist = stats.laplace(loc=0.0, scale=1.0 / GRID.values[0])
    assert rows[0, 0] == pytest.approx(dist.cdf(space.bin_edges[1]), abs=1e-12)
    assert rows[0, -1] == pytest.approx(dist.sf(space.bin_edges[-2]), abs=1e-12)
    assert np.allclose(rows.sum(axis=1), 1.0, atol=1e-12)


def test_sharper_budget_concentrates_mass():
    space = SignalSpace.from_range(-8.0, 8.0, 8)
    rows = output_distribution(laplace_mech(), GRID, space)
    center = [rows[i, 3] + rows[i, 4] for i in range(3)]
    assert center[0] < center[1] < center[2]


def test_explicit_table_is_copied_and_validated():
    table = np.array([[0.75, 0.25], [0.25, 0.75]])
    mech = MechanismModel(kind="explicit-table", table=table)
    space = SignalSpace.labeled(("low", "high"))
    grid = PrivacyBudgetGrid(values=np.array([0.5, 1.0]))
    rows = output_distribution(mech, grid, space)
    assert np.array_equal(rows, table)
    rows[0, 0] = 0.0
    assert mech.table[0, 0] == 0.75

    bad = MechanismModel(kind="explicit-table", table=np.array([[0.9, 0.2], [0.25, 0.75]]))
    with pytest.raises(ParameterError, match="sums to"):
        output_distribution(bad, grid, space)
    with pytest.raises(ParameterError, match="does not match"):
        output_distribution(mech, GRID, space)


class TestDpCheck:
    def test_laplace_satisfies_its_budget(self):
        space = SignalSpace.from_range(-16.0, 16.0, 8)
        for eps in GRID.values:
            res = check_dp_inequality(laplace_mech(), float(eps), space)
            assert res.max_log_ratio <= eps + 1e-9
            assert res.slack <= 1e-9

    def test_zero_shift_gives_zero_ratio(self):
        space = SignalSpace.from_range(-16.0, 16.0, 8)
        res = check_dp_inequality(laplace_mech(), 1.0, space, shift=0.0)
        assert res.max_log_ratio == 0.0
        assert res.slack == 0.0

    def test_shift_beyond_sensitivity_can_violate(self):
        space = SignalSpace.from_range(-16.0, 16.0, 8)
        res = check_dp_inequality(laplace_mech(), 1.0, space, shift=3.0)
        assert res.slack > 0.1

    def test_rejects_table_mechanisms(self):
        mech = MechanismModel(kind="explicit-table", table=np.array([[0.5, 0.5]]))
        with pytest.raises(ParameterError, match="discretized-laplace"):
            check_dp_inequality(mech, 1.0, SignalSpace.labeled(("a", "b")))


def test_accuracy_exponential_curve():
    model = AccuracyModel.exponential(GRID)
    assert accuracy(model, 1.0) == pytest.approx(1.0 - np.exp(-1.0))
    vals = accuracy_values(model)
    assert np.all(np.diff(vals) > 0)


def test_accuracy_table_must_increase():
    with pytest.raises(ParameterError, match="increasing"):
        AccuracyModel.from_table(GRID, [0.5, 0.4, 0.9])
    model = AccuracyModel.from_table(GRID, [0.3, 0.6, 0.9])
    assert accuracy(model, 2.0) == 0.9
    with pytest.raises(ParameterError, match="not tabulated"):
        accuracy(model, 1.5)


class TestHypotheses:
    def test_sum_tolerance_is_tight(self):
        HypothesisPair(q_g=np.array([0.5, 0.5 + 5e-13]), q_b=np.array([0.3, 0.7]))
        with pytest.raises(ParameterError):
            HypothesisPair(q_g=np.array([0.5, 0.5 + 5e-11]), q_b=np.array([0.3, 0.7]))

    def test_ratio_nan_on_dead_signal(self):
        hyp = HypothesisPair(q_g=np.array([1.0, 0.0]), q_b=np.array([1.0, 0.0]))
        assert np.isnan(hyp.ratio()[1])
        assert hyp.ratio()[0] == 0.5

    def test_mixing_is_linear(self):
        rng = np.random.default_rng(7)
        p = rng.dirichlet(np.ones(4), size=3)
        w1 = np.array([0.0, 1.0, 0.0])
        w2 = np.array([0.0, 0.0, 1.0])
        blend = np.array([0.0, 0.4, 0.6])
        resp = np.array([1.0, 0.0, 0.0])
        h1 = mix_hypotheses(p, resp, w1, claimed_index=0)
        h2 = mix_hypotheses(p, resp, w2, claimed_index=0)
        hb = mix_hypotheses(p, resp, blend, claimed_index=0)
        assert np.allclose(hb.q_b, 0.4 * h1.q_b + 0.6 * h2.q_b)

    def test_mixing_rejects_mass_on_claimed(self):
        p = np.full((3, 2), 0.5)
        with pytest.raises(ParameterError, match="claimed"):
            mix_hypotheses(p, [1.0, 0.0, 0.0], [0.5, 0.5, 0.0], claimed_index=0)
