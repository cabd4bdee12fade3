import math

import numpy as np
import pytest
from scipy.optimize import brentq

from qcvar.dgp import DgpSpec, NearUnitBase, local_sequence, simulate
from qcvar.exceptions import QcvarError, TableCoverageError
from qcvar.inference import (
    bonferroni_ci,
    chi2_quantile,
    ci_coefficient_given_lambda,
    ci_lambda,
    lr_coefficient,
    lr_lambda,
)
from qcvar.likelihood import LambdaGrid, make_design, profile_a, profile_lambda
from qcvar.limitdist import LimitDistConfig, QuantileTable, TableEntry, build_table


def sim_local(seed, n=300, c=-5.0, a=1.0):
    base = NearUnitBase(
        a=np.array([[a]]), k=1,
        stationary=(np.array([[1.0], [0.0]]), np.array([[0.4]])),
    )
    ls = local_sequence(np.array([[c]]), n, base)
    y, _ = simulate(DgpSpec.simple(ls.realized, n), seed)
    lam_true = np.array([[1.0 + c / n]])
    return y, lam_true


@pytest.fixture(scope="module")
def small_table(tmp_path_factory):
    template = LimitDistConfig(
        q=1, c_star=np.zeros((1, 1)), det="trend", steps=300, reps=3000,
        seed=31, levels=(0.001, 0.5, 0.95, 0.999),
    )
    path = tmp_path_factory.mktemp("tables") / "small.tbl"
    return build_table(list(np.arange(-30.0, 0.5, 2.0)), template, str(path))


class TestChi2:
    def test_reference_quantile(self):
        assert chi2_quantile(0.95) == pytest.approx(3.841459, abs=1e-6)

    def test_independent_erf_inversion(self):
        # P(chi2_1 <= x) = erf(sqrt(x/2)), inverted by bisection
        for level in (0.5, 0.9, 0.95, 0.99):
            oracle = brentq(lambda x: math.erf(math.sqrt(x / 2.0)) - level, 1e-12, 50.0)
            assert chi2_quantile(level) == pytest.approx(oracle, abs=1e-9)


class TestLrLambda:
    def test_zero_at_grid_argmax_with_grid_reference(self):
        y, _ = sim_local(0)
        grid = LambdaGrid(family="scalar", q=1, rho=0.9, eig_step=0.01)
        prof = profile_lambda(grid, y, 1, "trend")
        stat = lr_lambda(prof.best_lam, y, 1, "trend", grid, reference="grid")
        # refinement can only push the reference above the node value
        assert 0.0 <= stat.value <= 0.2

    def test_finer_grid_weakly_raises_value(self):
        y, _ = sim_local(1)
        lams = [np.array([[v]]) for v in np.linspace(0.9, 1.0, 21)]
        fine = LambdaGrid(family="scalar", q=1, rho=0.9, candidates=tuple(lams))
        coarse = LambdaGrid(family="scalar", q=1, rho=0.9, candidates=tuple(lams[::4]))
        lam0 = np.array([[0.93]])
        v_fine = lr_lambda(lam0, y, 1, "trend", fine, reference="grid").value
        v_coarse = lr_lambda(lam0, y, 1, "trend", coarse, reference="grid").value
        assert v_fine >= v_coarse - 1e-8

    def test_ols_reference_dominates_grid(self):
        y, lam_true = sim_local(2)
        grid = LambdaGrid(family="scalar", q=1, rho=0.9, eig_step=0.01)
        v_ols = lr_lambda(lam_true, y, 1, "trend").value
        v_grid = lr_lambda(lam_true, y, 1, "trend", grid, reference="grid").value
        assert v_ols >= v_grid - 1e-8

    def test_nonnegative(self):
        y, lam_true = sim_local(3)
        assert lr_lambda(lam_true, y, 1, "trend").value >= 0.0


class TestLrCoefficient:
    def test_zero_at_conditional_optimum(self):
        y, lam_true = sim_local(4)
        fit = profile_a(lam_true, y, 1, "trend")
        stat = lr_coefficient(float(fit.a_hat[0, 0]), 0, 0, lam_true, y, 1, "trend")
        assert stat.value == pytest.approx(0.0, abs=1e-8)

    def test_monotone_away_from_optimum(self):
        y, lam_true = sim_local(5)
        dz = make_design(y, 1, "trend")
        fit = profile_a(lam_true, y, 1, "trend", design=dz)
        center = float(fit.a_hat[0, 0])
        offsets = np.linspace(0.0, 0.2, 11)
        for sign in (-1.0, 1.0):
            values = [
                lr_coefficient(center + sign * off, 0, 0, lam_true, y, 1, "trend",
                               design=dz, fit_at_lambda0=fit).value
                for off in offsets
            ]
            diffs = np.diff(values)
            assert (diffs >= -1e-6).all()


class TestCiLambda:
    def test_alpha_limits(self, small_table):
        y, _ = sim_local(6)
        grid = LambdaGrid(family="scalar", q=1, rho=0.9, eig_step=0.01)
        sets = {
            alpha1: ci_lambda(alpha1, y, 1, "trend", grid, small_table, reference="grid")
            for alpha1 in (0.999, 0.5, 0.05, 0.001)
        }
        sizes = [len(sets[a].accepted) for a in (0.999, 0.5, 0.05, 0.001)]
        assert sizes == sorted(sizes)
        assert sizes[-1] == len(grid.points())  # alpha1 -> 0 accepts everything
        accepted_at_999 = {
            float(lam[0, 0]) for _, lam, _, _ in sets[0.999].accepted
        }
        accepted_at_05 = {float(lam[0, 0]) for _, lam, _, _ in sets[0.05].accepted}
        assert accepted_at_999 <= accepted_at_05

    def test_coverage_contains_truth_typically(self, small_table):
        y, lam_true = sim_local(7)
        grid = LambdaGrid(family="scalar", q=1, rho=0.9, eig_step=0.01)
        cset = ci_lambda(0.05, y, 1, "trend", grid, small_table)
        lams = [float(lam[0, 0]) for _, lam, _, _ in cset.accepted]
        assert lams, "95% block set should not be empty here"
        assert min(lams) - 0.01 <= float(lam_true[0, 0]) <= max(lams) + 0.01

    def test_missing_coverage_raises(self, small_table):
        y, _ = sim_local(8, n=600)  # C range [-60, 0] exceeds the table
        grid = LambdaGrid(family="scalar", q=1, rho=0.9, eig_step=0.01)
        with pytest.raises(TableCoverageError):
            ci_lambda(0.05, y, 1, "trend", grid, small_table)

    def test_halving_grid_step_moves_endpoints_by_at_most_one_step(self, small_table):
        y, _ = sim_local(17)
        coarse = LambdaGrid(family="scalar", q=1, rho=0.9, eig_step=0.01)
        fine = LambdaGrid(family="scalar", q=1, rho=0.9, eig_step=0.005)
        c_set = ci_lambda(0.05, y, 1, "trend", coarse, small_table)
        f_set = ci_lambda(0.05, y, 1, "trend", fine, small_table)
        assert c_set.hull is not None and f_set.hull is not None
        assert abs(c_set.hull[0] - f_set.hull[0]) <= 0.01 + 1e-12
        assert abs(c_set.hull[1] - f_set.hull[1]) <= 0.01 + 1e-12


class TestCiCoefficient:
    def test_center_inside(self):
        y, lam_true = sim_local(9)
        fit = profile_a(lam_true, y, 1, "trend")
        cset = ci_coefficient_given_lambda(0.05, 0, 0, lam_true, y, 1, "trend")
        assert cset.contains(float(fit.a_hat[0, 0]))

    def test_nested_levels(self):
        y, lam_true = sim_local(10)
        c95 = ci_coefficient_given_lambda(0.05, 0, 0, lam_true, y, 1, "trend")
        c99 = ci_coefficient_given_lambda(0.01, 0, 0, lam_true, y, 1, "trend")
        assert c99.intervals[0][0] <= c95.intervals[0][0]
        assert c99.intervals[0][1] >= c95.intervals[0][1]

    def test_endpoints_invert_the_test(self):
        y, lam_true = sim_local(11)
        cset = ci_coefficient_given_lambda(0.05, 0, 0, lam_true, y, 1, "trend")
        lo, hi = cset.intervals[0]
        thr = chi2_quantile(0.95)
        for endpoint in (lo, hi):
            stat = lr_coefficient(endpoint, 0, 0, lam_true, y, 1, "trend")
            assert stat.value == pytest.approx(thr, abs=1e-2)


class TestBonferroni:
    def test_singleton_block_set_equals_conditional(self, small_table):
        import warnings

        y, lam_true = sim_local(12)
        single = LambdaGrid(family="scalar", q=1, rho=0.9, candidates=(lam_true,))
        with warnings.catch_warnings():
            # whether the single node is accepted or argmax-fallback fires,
            # the result is the conditional interval at that node
            warnings.simplefilter("ignore", UserWarning)
            bset = bonferroni_ci(0.05, 0.05, 0, 0, y, 1, "trend", single, small_table)
        cond = ci_coefficient_given_lambda(0.05, 0, 0, lam_true, y, 1, "trend")
        assert bset.intervals == cond.intervals

    def test_union_contains_each_conditional(self, small_table):
        y, _ = sim_local(13)
        grid = LambdaGrid(family="scalar", q=1, rho=0.9, eig_step=0.02)
        bset = bonferroni_ci(0.05, 0.05, 0, 0, y, 1, "trend", grid, small_table)
        assert bset.accepted
        for _, lam, _, _ in bset.accepted:
            cond = ci_coefficient_given_lambda(0.05, 0, 0, lam, y, 1, "trend")
            for lo, hi in cond.intervals:
                assert bset.contains(lo + 1e-9) and bset.contains(hi - 1e-9)

    def test_empty_block_set_falls_back_with_warning(self):
        y, _ = sim_local(14)
        # absurd table whose critical values are all zero rejects everything
        zero_table = QuantileTable(
            q=1, det="trend", steps=300, reps=3000, seed=0, levels=(0.95,),
            entries=tuple(
                TableEntry(c=np.array([[c]]), quantiles=(0.0,), se=(0.0,), redrawn=0)
                for c in (-40.0, 0.0)
            ),
        )
        grid = LambdaGrid(family="scalar", q=1, rho=0.9, eig_step=0.02)
        with pytest.warns(UserWarning, match="empty"):
            bset = bonferroni_ci(0.05, 0.05, 0, 0, y, 1, "trend", grid, zero_table)
        assert bset.intervals  # still informative
        assert any("fallback" in d for d in bset.diagnostics)

    def test_monotone_in_alphas(self, small_table):
        y, _ = sim_local(15)
        grid = LambdaGrid(family="scalar", q=1, rho=0.9, eig_step=0.02)
        loose = bonferroni_ci(0.001, 0.01, 0, 0, y, 1, "trend", grid, small_table)
        tight = bonferroni_ci(0.5, 0.10, 0, 0, y, 1, "trend", grid, small_table)
        probe = np.linspace(loose.hull[0], loose.hull[1], 41)
        for v in probe:
            if tight.contains(v):
                assert loose.contains(v)

    def test_alpha_budget_validated(self, small_table):
        y, _ = sim_local(16)
        grid = LambdaGrid(family="scalar", q=1, rho=0.9, eig_step=0.02)
        with pytest.raises(QcvarError):
            bonferroni_ci(0.7, 0.5, 0, 0, y, 1, "trend", grid, small_table)


class TestEstimatorConcentration:
    def test_profile_estimate_concentrates_at_rate_n(self):
        # interquartile range of n (a_hat - a_true) stays bounded as n grows
        a_true = 1.0
        base = NearUnitBase(
            a=np.array([[a_true]]), k=1,
            stationary=(np.array([[1.0], [0.0]]), np.array([[0.4]])),
        )
        iqr = {}
        for n in (250, 500, 1000):
            ls = local_sequence(np.array([[-5.0]]), n, base)
            spec = DgpSpec.simple(ls.realized, n)
            grid = LambdaGrid(family="scalar", q=1, rho=0.9, eig_step=0.02)
            devs = np.empty(500)
            for rep in range(500):
                y, _ = simulate(spec, 40_000 + rep)
                prof = profile_lambda(grid, y, 1, "trend", refine=True)
                devs[rep] = n * (float(prof.best_fit.a_hat[0, 0]) - a_true)
            lo, hi = np.quantile(devs, [0.25, 0.75])
            iqr[n] = hi - lo
        values = np.array([iqr[n] for n in (250, 500, 1000)])
        assert values.max() / values.min() <= 2.0, iqr
