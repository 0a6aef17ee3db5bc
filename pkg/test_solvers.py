import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal
from scipy.optimize import linprog

from src.config import SolverKind
from src.core import BoxConstraint, InfeasibleError, SolverCapError, UnboundedError, corner_matrix
from src.learners import distribution
from src.solvers import (
    FREE,
    FeasibleSetSpec,
    LinearProgram,
    approximate_bound,
    curvature_matrix,
    lp_solve,
    objective_value,
    objective_value_pairwise,
    prune_dominated,
    qp_project,
    solve,
    solve_approx,
    solve_exact,
    solve_m2,
    solve_zero,
)


def random_box(rng, m):
    pairs = np.sort(rng.uniform(size=(m, 2)), axis=1)
    return BoxConstraint(pairs[:, 0], pairs[:, 1])


class TestGeometry:

    def test_curvature_psd_and_kernel(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            m = int(rng.integers(2, 12))
            Q = curvature_matrix(rng.dirichlet(np.ones(m)))
            assert Q.min_eigenvalue() >= -1e-10
            assert_allclose(Q.matvec(np.ones(m)), 0.0, atol=1e-15)
            x = rng.normal(size=m)
            assert_allclose(Q.matvec(x), Q.dense() @ x, atol=1e-14)

    def test_feasible_set_membership(self):
        spec = FeasibleSetSpec(np.array([0.5, 0.5]), 1.0)
        assert spec.contains(np.zeros(2))
        assert spec.contains(np.array([2.0, -2.0]))
        assert not spec.contains(np.array([10.0, -10.0]))
        assert not spec.contains(np.array([1.0, 0.0]))

    def test_m2_interval(self):
        lo, hi = FeasibleSetSpec(np.array([0.25, 0.75]), 0.5).m2_interval()
        assert lo == pytest.approx(-8.0)
        assert hi == pytest.approx(1.0 / 0.375)


class TestObjective:

    def test_corner_value(self):
        assert objective_value([0.5, 0.5], [1.0, 0.0], [0.0, 0.0]) == pytest.approx(0.25)

    def test_matrix_and_pairwise_forms_agree(self):
        u, loss, q = [0.5, 0.5], [1.0, 0.0], [-0.2, 0.2]
        assert objective_value(u, loss, q) == pytest.approx(0.35)
        assert objective_value_pairwise(u, loss, q) == pytest.approx(0.35)

        rng = np.random.default_rng(1)
        for _ in range(20):
            m = int(rng.integers(2, 8))
            u, loss, q = rng.dirichlet(np.ones(m)), rng.uniform(size=m), rng.normal(size=m)
            q -= q.mean()
            assert objective_value(u, loss, q) == pytest.approx(objective_value_pairwise(u, loss, q))


class TestPruning:

    def test_dominated_option_removed(self):
        box = BoxConstraint([0.0, 0.5, 0.2], [0.4, 0.9, 0.3])
        active, fixed = prune_dominated(box)
        assert_array_equal(active, [0, 2])
        assert_array_equal(fixed, [1])

    def test_identical_degenerate_boxes_keep_lowest_index(self):
        active, fixed = prune_dominated(BoxConstraint([0.5, 0.5], [0.5, 0.5]))
        assert_array_equal(active, [0])
        assert_array_equal(fixed, [1])

    def test_overlapping_boxes_all_kept(self):
        active, fixed = prune_dominated(BoxConstraint.uniform(4))
        assert_array_equal(active, np.arange(4))
        assert fixed.size == 0


class TestSimplex:

    def test_against_scipy(self):
        c = np.array([-1.0, -2.0])
        A_ub = np.array([[1.0, 1.0], [1.0, 3.0]])
        b_ub = np.array([4.0, 6.0])
        result = lp_solve(LinearProgram(c=c, A_ub=A_ub, b_ub=b_ub))
        reference = linprog(c, A_ub=A_ub, b_ub=b_ub, method="highs")
        assert result.objective == pytest.approx(reference.fun)
        assert_allclose(result.x, [3.0, 1.0], atol=1e-9)
        assert_allclose(result.duals_ub, [0.5, 0.5], atol=1e-9)
        assert result.duality_gap <= 1e-9

    def test_random_lps_match_scipy(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            n, k = int(rng.integers(2, 6)), int(rng.integers(1, 5))
            A_ub = rng.uniform(0.1, 1.0, size=(k, n))
            b_ub = rng.uniform(1.0, 2.0, size=k)
            A_eq = np.ones((1, n))
            b_eq = np.array([0.5])
            c = rng.normal(size=n)
            lp = LinearProgram(c=c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq)
            result = lp_solve(lp)
            reference = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, method="highs")
            assert result.objective == pytest.approx(reference.fun, abs=1e-8)
            assert result.duality_gap <= 1e-8

    def test_inequality_rows_only(self):
        # x >= 1 written as -x <= -1
        result = lp_solve(LinearProgram(c=[1.0], A_ub=[[-1.0]], b_ub=[-1.0]))
        assert result.x[0] == pytest.approx(1.0)
        assert result.objective == pytest.approx(1.0)
        assert_allclose(result.duals_ub, [1.0], atol=1e-9)

    def test_mixed_sign_rows_and_upper_bounds_match_scipy(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            n, k = int(rng.integers(2, 7)), int(rng.integers(1, 6))
            A_ub = rng.normal(size=(k, n))
            # x_feasible satisfies every row; some right-hand sides are negative
            x_feasible = rng.uniform(0.0, 1.0, size=n)
            b_ub = A_ub @ x_feasible + rng.uniform(0.0, 0.5, size=k)
            c = rng.normal(size=n)
            bounds = [(0.0, 3.0)] * n
            result = lp_solve(LinearProgram(c=c, A_ub=A_ub, b_ub=b_ub, bounds=bounds))
            reference = linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=bounds, method="highs")
            assert result.objective == pytest.approx(reference.fun, abs=1e-8)
            assert np.all(A_ub @ result.x <= b_ub + 1e-8)
            assert np.all(result.duals_ub >= -1e-9)

    def test_free_variables(self):
        # min x  s.t.  x >= -3  written as -x <= 3
        lp = LinearProgram(c=[1.0], A_ub=[[-1.0]], b_ub=[3.0], bounds=[FREE])
        assert lp_solve(lp).x[0] == pytest.approx(-3.0)

    def test_infeasible(self):
        lp = LinearProgram(c=[1.0, 1.0], A_eq=[[1.0, 1.0]], b_eq=[-1.0])
        with pytest.raises(InfeasibleError):
            lp_solve(lp)

    def test_unbounded(self):
        lp = LinearProgram(c=[-1.0, 0.0], A_ub=[[0.0, 1.0]], b_ub=[1.0])
        with pytest.raises(UnboundedError):
            lp_solve(lp)

    def test_bad_shapes(self):
        with pytest.raises(ValueError):
            LinearProgram(c=[1.0, 1.0], A_ub=[[1.0]], b_ub=[1.0])


class TestProjection:

    def test_feasible_point_returned_unchanged(self):
        spec = FeasibleSetSpec(np.array([0.5, 0.5]), 0.1)
        mu = np.array([0.3, -0.3])
        assert_allclose(qp_project(mu, spec), mu)

    def test_centers_when_feasible(self):
        spec = FeasibleSetSpec(np.array([0.5, 0.5]), 0.1)
        assert_allclose(qp_project(np.array([1.0, 0.4]), spec), [0.3, -0.3])

    def test_projection_against_brute_force(self):
        rng = np.random.default_rng(4)
        for _ in range(10):
            u = rng.dirichlet(np.ones(3))
            spec = FeasibleSetSpec(u, 2.0)
            mu = rng.normal(scale=5.0, size=3)
            q = qp_project(mu, spec)
            assert spec.contains(q)
            # no feasible grid point is closer
            a, b = np.meshgrid(np.linspace(-6, 6, 241), np.linspace(-6, 6, 241), indexing="ij")
            grid = np.stack([a.ravel(), b.ravel(), -(a + b).ravel()], axis=1)
            dev = 0.5 * spec.epsilon * (grid - (grid @ u)[:, None])
            feasible = grid[np.all(dev <= 1.0 + 1e-12, axis=1)]
            best = np.min(np.sum((feasible - mu) ** 2, axis=1))
            assert np.sum((q - mu) ** 2) <= best + 1e-9


class TestInnerSolvers:

    def test_m2_symmetric_unit_box(self):
        box = BoxConstraint.uniform(2)
        for outcome in (solve_m2([0.5, 0.5], 0.05, box), solve_exact([0.5, 0.5], 0.05, box)):
            assert outcome.value == pytest.approx(0.25, abs=1e-9)
            assert_allclose(outcome.q, [0.0, 0.0], atol=1e-9)

    def test_exact_matches_closed_form(self):
        rng = np.random.default_rng(5)
        for _ in range(30):
            box, u = random_box(rng, 2), rng.dirichlet(np.ones(2))
            eps = float(rng.uniform(0.01, 0.1))
            assert solve_exact(u, eps, box).value == pytest.approx(solve_m2(u, eps, box).value, abs=1e-9)

    @pytest.mark.parametrize("m", range(2, 9))
    def test_uniform_box_value(self, m):
        outcome = solve_exact(np.full(m, 1.0 / m), 1e-3, BoxConstraint.uniform(m))
        assert outcome.value == pytest.approx((m // 2) * ((m + 1) // 2) / m ** 2, abs=1e-7)

    def test_exact_value_bounded_by_zero_direction(self):
        rng = np.random.default_rng(6)
        for _ in range(20):
            m = int(rng.integers(3, 6))
            box, u = random_box(rng, m), rng.dirichlet(np.ones(m))
            exact = solve_exact(u, 0.05, box)
            assert exact.value <= solve_zero(u, 0.05, box).value + 1e-9
            assert exact.feasible_set(0.05).contains(exact.q)
            assert sum(exact.duals.values()) == pytest.approx(1.0)

    def test_pruned_entries_are_zero(self):
        box = BoxConstraint([0.0, 0.5, 0.2], [0.4, 0.9, 0.3])
        outcome = solve_exact(np.full(3, 1.0 / 3), 0.05, box)
        assert outcome.q[1] == 0.0
        assert outcome.weights[1] == 0.0
        assert outcome.weights.sum() == pytest.approx(1.0)

    def test_single_surviving_option(self):
        box = BoxConstraint([0.2, 0.6], [0.2, 0.6])
        outcome = solve_m2([0.5, 0.5], 0.1, box)
        assert outcome.value == 0.0
        assert_array_equal(outcome.q, [0.0, 0.0])
        assert_allclose(outcome.weights, [1.0, 0.0])

    def test_exact_cap(self):
        with pytest.raises(SolverCapError, match="use approximate solver"):
            solve_exact(np.full(17, 1.0 / 17), 0.1, BoxConstraint.uniform(17))

    def test_m2_rejects_other_sizes(self):
        with pytest.raises(ValueError):
            solve_m2(np.full(3, 1.0 / 3), 0.1, BoxConstraint.uniform(3))

    def test_approximate_bound_uniform_cube(self):
        assert approximate_bound(np.full(3, 1.0 / 3), BoxConstraint.uniform(3)) == pytest.approx(1.0 / 3)

    def test_approximate_dominates_exact(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            m = int(rng.integers(3, 6))
            box, u = random_box(rng, m), rng.dirichlet(np.ones(m))
            approx = solve_approx(u, 0.05, box)
            exact = solve_exact(u, 0.05, box)
            assert approx.feasible_set(0.05).contains(approx.q)
            assert approx.value >= exact.value - 1e-9

    def test_approx_matches_closed_form_direction(self):
        rng = np.random.default_rng(8)
        for _ in range(20):
            box, u = random_box(rng, 2), rng.dirichlet(np.ones(2))
            assert_allclose(solve_approx(u, 0.05, box).q, solve_m2(u, 0.05, box).q, atol=1e-6)

    def test_dispatch(self):
        box3 = BoxConstraint.uniform(3)
        u3 = np.full(3, 1.0 / 3)
        assert solve(u3, 0.1, box3, SolverKind.ZERO).kind is SolverKind.ZERO
        assert solve(u3, 0.1, box3, SolverKind.EXACT_LP).kind is SolverKind.EXACT_LP
        assert solve(u3, 0.1, box3, SolverKind.APPROXIMATE).kind is SolverKind.APPROXIMATE
        box2 = BoxConstraint.uniform(2)
        assert solve([0.5, 0.5], 0.1, box2, SolverKind.EXACT_LP).kind is SolverKind.CLOSED_FORM_M2

    def test_exact_matches_highs_for_ten_options(self):
        rng = np.random.default_rng(9)
        m = 10
        for _ in range(5):
            # overlapping intervals: nothing is pruned
            box = BoxConstraint(rng.uniform(0.0, 0.4, size=m), rng.uniform(0.6, 1.0, size=m))
            u, eps = rng.dirichlet(np.ones(m)), float(rng.uniform(0.01, 0.3))
            outcome = solve_exact(u, eps, box)
            assert outcome.active.size == m

            C = corner_matrix(box)
            QC = u * C - (C @ u)[:, None] * u
            g = np.sum(C * QC, axis=1)
            G, h = FeasibleSetSpec(u, eps).constraint_matrix()
            # variables (q, xi): min xi  s.t.  g - QC q <= xi,  G q <= h,  sum(q) = 0
            A_ub = np.vstack([np.hstack([-QC, -np.ones((C.shape[0], 1))]), np.hstack([G, np.zeros((m, 1))])])
            b_ub = np.concatenate([-g, h])
            A_eq = np.append(np.ones(m), 0.0)[None, :]
            reference = linprog(
                np.append(np.zeros(m), 1.0), A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=[0.0],
                bounds=[(None, None)] * (m + 1), method="highs",
            )
            assert outcome.value == pytest.approx(reference.fun, abs=1e-7)
            assert outcome.feasible_set(eps).contains(outcome.q)

    def test_no_point_in_box_beats_worst_corner(self):
        rng = np.random.default_rng(10)
        for _ in range(20):
            m = int(rng.integers(2, 6))
            box, u = random_box(rng, m), rng.dirichlet(np.ones(m))
            outcome = solve_exact(u, 0.05, box)
            for loss in rng.uniform(box.lower, box.upper, size=(50, m)):
                assert objective_value(outcome.weights, loss, outcome.q) <= outcome.value + 1e-9

    def test_m2_clamps_to_feasible_boundary(self):
        u = np.array([0.999, 0.001])
        box = BoxConstraint([0.0, 0.2], [0.6, 0.8])
        eps = 10.0
        outcome = solve_m2(u, eps, box)
        lo, _ = FeasibleSetSpec(u, eps).m2_interval()
        # midpoint difference -0.2 lies below the admissible range
        assert outcome.q[0] == pytest.approx(lo)
        p = distribution(outcome.weights, eps, outcome.q).probs
        assert p.min() >= 0.0
        assert p[1] == pytest.approx(0.0, abs=1e-12)
        assert p.sum() == pytest.approx(1.0)
