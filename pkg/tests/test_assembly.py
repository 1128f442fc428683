import math
from fractions import Fraction as F

import numpy as np
import pytest

from heptaspline.assembly import EndConditionMode, build, min_knots, row_residual
from heptaspline.cascade import IvpProblem
from heptaspline.forces import ForceExpr, ForceTerm
from heptaspline.linsolve import lu_solve
from heptaspline.oracle import BENCHMARKS
from heptaspline.spline_params import (
    STANDARD_END_ROW_H9_CONSTANTS,
    SplineParams,
    optimal_family,
)

TAB_PARAMS = [
    SplineParams(F(1, 2), F(19, 2), F(49, 2), F(51, 2)),
    SplineParams(0, 0, 0, 60),
    SplineParams(10, 10, 10, 30),
]


def f_zero_problem(a=0.0, b=1.0) -> IvpProblem:
    return IvpProblem(a, b, ForceExpr.zero(), ForceExpr.zero(), (0.0,) * 7)


class TestBuildContract:
    def test_dimensions_and_grid(self):
        bench = BENCHMARKS[0]
        system = build(bench.problem, TAB_PARAMS[0], EndConditionMode.STANDARD, 12)
        assert system.matrix.shape == (12, 12)
        assert system.rhs.shape == (12,)
        assert len(system.grid) == 13
        assert system.grid[0] == bench.problem.a
        assert system.grid[-1] == pytest.approx(bench.problem.b)

    def test_interior_rows_are_banded(self):
        bench = BENCHMARKS[0]
        n = 16
        system = build(bench.problem, TAB_PARAMS[0], EndConditionMode.STANDARD, n)
        for i in range(7, n + 1):          # knot index of the interior row
            row = system.matrix[6 + (i - 7)]
            cols = np.nonzero(row)[0] + 1  # matrix column j holds knot j+1
            assert cols.min() >= max(1, i - 7)
            assert cols.max() <= i

    def test_exactly_six_end_rows(self):
        bench = BENCHMARKS[0]
        n = 12
        system = build(bench.problem, TAB_PARAMS[0], EndConditionMode.IMPROVED, n)
        assert system.matrix.shape[0] - (n - 6) == 6

    @pytest.mark.parametrize("mode,bad_n", [(EndConditionMode.STANDARD, 8),
                                            (EndConditionMode.IMPROVED, 9)])
    def test_too_few_knots_rejected(self, mode, bad_n):
        with pytest.raises(ValueError, match="n >="):
            build(BENCHMARKS[0].problem, TAB_PARAMS[0], mode, bad_n)

    def test_min_knots_values(self):
        assert min_knots(EndConditionMode.STANDARD) == 9
        assert min_knots(EndConditionMode.IMPROVED) == 10

    def test_unvalidated_params_rejected(self):
        with pytest.raises(ValueError, match="60"):
            build(BENCHMARKS[0].problem, SplineParams(1, 1, 1, 1),
                  EndConditionMode.STANDARD, 12)

    def test_non_seventh_order_problem_rejected(self):
        problem = IvpProblem(0.0, 1.0, ForceExpr.zero(), ForceExpr.zero(), (0.0,) * 5)
        with pytest.raises(ValueError, match="7th order"):
            build(problem, TAB_PARAMS[0], EndConditionMode.STANDARD, 12)


class TestPolynomialExactness:
    """Exact-rational residuals pin every stored coefficient."""

    @pytest.mark.parametrize("params", TAB_PARAMS)
    @pytest.mark.parametrize("interval", [(0.0, 1.0), (-1.0, 1.0)])
    def test_interior_rows_annihilate_degree_le_8(self, params, interval):
        problem = f_zero_problem(*interval)
        n = 12
        for row in (7, 10, n):
            for degree in range(9):
                assert row_residual(problem, params, EndConditionMode.STANDARD,
                                    degree, n, row) == 0

    @pytest.mark.parametrize("delta", [0, 30, F(51, 2), -7])
    def test_interior_rows_on_optimal_family_annihilate_degree_le_12(self, delta):
        problem = f_zero_problem()
        params = optimal_family(delta)
        for degree in range(13):
            assert row_residual(problem, params, EndConditionMode.STANDARD,
                                degree, 12, 9) == 0

    def test_interior_rows_not_exact_beyond_design_order(self):
        problem = f_zero_problem()
        assert row_residual(problem, TAB_PARAMS[0], EndConditionMode.STANDARD,
                            9, 12, 9) != 0
        assert row_residual(problem, optimal_family(30), EndConditionMode.STANDARD,
                            13, 14, 9) != 0

    @pytest.mark.parametrize("row", range(1, 7))
    @pytest.mark.parametrize("interval,n", [((0.0, 1.0), 12), ((-1.0, 1.0), 10)])
    def test_standard_end_rows_annihilate_degree_le_8(self, row, interval, n):
        problem = f_zero_problem(*interval)
        for degree in range(9):
            assert row_residual(problem, TAB_PARAMS[0], EndConditionMode.STANDARD,
                                degree, n, row) == 0

    @pytest.mark.parametrize("row", range(1, 7))
    @pytest.mark.parametrize("interval,n", [((0.0, 1.0), 12), ((-1.0, 1.0), 10)])
    def test_improved_end_rows_annihilate_degree_le_11(self, row, interval, n):
        problem = f_zero_problem(*interval)
        for degree in range(12):
            assert row_residual(problem, TAB_PARAMS[0], EndConditionMode.IMPROVED,
                                degree, n, row) == 0

    @pytest.mark.parametrize("row", range(1, 7))
    def test_improved_end_rows_reach_degree_12(self, row):
        problem = f_zero_problem()
        assert row_residual(problem, TAB_PARAMS[0], EndConditionMode.IMPROVED,
                            12, 12, row) == 0

    def test_degree_seven_balances_both_sides_of_interior_rows(self):
        # y = t^7 gives U identically 5040; each interior row balances at
        # 5040 * 120 * h^7 for any sum-60 parameter set.
        problem = f_zero_problem()
        for params in TAB_PARAMS:
            for row in range(7, 13):
                assert row_residual(problem, params, EndConditionMode.STANDARD,
                                    7, 12, row) == 0

    def test_row_residual_requires_f_zero(self):
        with pytest.raises(ValueError, match="f identically zero"):
            row_residual(BENCHMARKS[0].problem, TAB_PARAMS[0],
                         EndConditionMode.STANDARD, 3, 12, 7)


class TestEndRowTruncationConstants:
    def test_standard_h9_constants_match_published_magnitudes(self):
        # Unit step so the degree-9 residual equals the row constant times 9!.
        # The published constants carry the opposite orientation to the
        # interior expansion, hence the sign flip.
        problem = f_zero_problem(0.0, 12.0)
        for i, published in enumerate(STANDARD_END_ROW_H9_CONSTANTS, start=1):
            measured = row_residual(problem, TAB_PARAMS[0], EndConditionMode.STANDARD,
                                    9, 12, i) / math.factorial(9)
            assert float(measured) == pytest.approx(-published, abs=5e-4)

    def test_interior_h9_constant_matches_c9_formula(self):
        problem = f_zero_problem(0.0, 12.0)
        for params in TAB_PARAMS:
            measured = row_residual(problem, params, EndConditionMode.STANDARD,
                                    9, 12, 9) / math.factorial(9)
            al, be, ga, de = params.alpha, params.beta, params.gamma, params.delta
            assert measured == F(1, 2) * (-100 + 25 * al + 13 * be + 5 * ga + de)


class TestFullSystemOnPolynomials:
    """build + solve reproduces polynomial solutions to near roundoff."""

    def poly_problem(self, coeffs: dict[int, float], a: float, b: float) -> tuple[IvpProblem, ForceExpr]:
        exact = ForceExpr(tuple(ForceTerm(c, m) for m, c in coeffs.items()))
        g = exact.derivative(7)
        u = tuple(exact.derivative(m).evaluate(a) for m in range(7))
        return IvpProblem(a, b, ForceExpr.zero(), g, u), exact

    @pytest.mark.parametrize("params", TAB_PARAMS)
    def test_degree_eight_solved_exactly_standard(self, params):
        problem, exact = self.poly_problem({8: 1.0, 3: -2.0, 0: 0.5}, 0.0, 1.0)
        grid = lu_solve(build(problem, params, EndConditionMode.STANDARD, 12))
        err = np.max(np.abs(grid.y - exact.evaluate(grid.t)))
        assert err <= 1e-10

    def test_degree_eleven_solved_exactly_improved(self):
        problem, exact = self.poly_problem({11: 1.0, 5: 1.0}, 0.0, 1.0)
        grid = lu_solve(build(problem, optimal_family(30), EndConditionMode.IMPROVED, 12))
        err = np.max(np.abs(grid.y - exact.evaluate(grid.t)))
        assert err <= 1e-8
