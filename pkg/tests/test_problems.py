import numpy as np
import pytest

from blockmin import (make_composite, make_nonlinear_pl, make_quadratic,
                      make_rank_deficient, prox_map, spectral_extremes)
from blockmin.errors import BadDimension, BadShape


def central_fd_jacobian(fun, x, m, step=1e-6):
    jac = np.zeros((m, x.size))
    for j in range(x.size):
        e = np.zeros_like(x)
        e[j] = step
        jac[:, j] = (fun(x + e) - fun(x - e)) / (2 * step)
    return jac


class TestMakeQuadratic:
    def test_condition_number(self):
        p = make_quadratic(seed=42, dim=8, cond_number=300.0)
        lo, hi = spectral_extremes(p.W.T @ p.W)
        assert hi / lo == pytest.approx(300.0, rel=1e-6)

    def test_optimum_matches_dense_solve(self, quad16):
        expected = np.linalg.solve(quad16.W.T @ quad16.W, quad16.W.T @ quad16.b)
        np.testing.assert_allclose(quad16.x_star, expected, atol=1e-9)
        assert quad16.f_star == pytest.approx(quad16.smooth_value(quad16.x_star))

    def test_cond_one_means_mu_equals_l(self):
        p = make_quadratic(seed=7, dim=8, cond_number=1.0)
        assert p.mu_global == pytest.approx(p.l_global, rel=1e-10)

    def test_optimum_dominates_random_points(self, quad16, rng):
        for _ in range(100):
            x = quad16.x_star + rng.standard_normal(16)
            assert quad16.f_star <= quad16.smooth_value(x) + 1e-12

    def test_first_order_conditions(self, quad16):
        assert np.linalg.norm(quad16.full_grad(quad16.x_star)) <= 1e-10

    def test_deterministic(self):
        p1 = make_quadratic(seed=9, dim=8, cond_number=10.0)
        p2 = make_quadratic(seed=9, dim=8, cond_number=10.0)
        np.testing.assert_array_equal(p1.W, p2.W)
        np.testing.assert_array_equal(p1.default_start, p2.default_start)

    def test_bad_dimension(self):
        with pytest.raises(BadDimension):
            make_quadratic(seed=0, dim=7, cond_number=10.0)
        with pytest.raises(BadDimension):
            make_quadratic(seed=0, dim=8, cond_number=0.5)

    def test_block_constants_bracket_global(self, quad16):
        # restriction eigenvalues sit inside the global spectrum
        for li in quad16.l_blocks:
            assert quad16.mu_global <= li <= quad16.l_global + 1e-12


class TestRankDeficient:
    def test_shape_and_constants(self, rankdef16):
        assert rankdef16.mu_global == 0.0
        assert rankdef16.lambda_min_plus > 0.0

    def test_minimum_norm_solution(self, rankdef16):
        grad = rankdef16.full_grad(rankdef16.x_star)
        assert np.linalg.norm(grad) <= 1e-9

    def test_bad_rank(self):
        with pytest.raises(BadDimension):
            make_rank_deficient(seed=0, dim=8, rank=8)


class TestMakeComposite:
    def test_gamma_zero_reduces_to_quadratic(self):
        comp = make_composite(seed=21, dim=8, gamma=0.0)
        quad = make_quadratic(seed=21, dim=8, cond_number=50.0)
        # same seed and spectrum: identical W, and the optimum solves the
        # unregularized normal equations
        np.testing.assert_allclose(comp.W, quad.W, atol=1e-14)
        np.testing.assert_allclose(comp.x_star, quad.x_star, atol=1e-8)

    def test_large_gamma_zeroes_l1_block(self):
        seed, dim = 23, 8
        probe = make_quadratic(seed=seed, dim=dim, cond_number=50.0)
        gamma = 1.1 * float(np.abs(2 * probe.W.T @ probe.b).max())
        comp = make_composite(seed=seed, dim=dim, gamma=gamma)
        assert np.abs(comp.x_star[:dim // 2]).max() <= 1e-10
        # optimality: 0 in the subdifferential at x*, i.e. zero gradient mapping
        res = prox_map(comp.handle(), comp.x_star, 0, comp.l_global)
        assert np.linalg.norm(res.g_map) <= 1e-8

    def test_reference_methods_agree(self, composite12):
        from blockmin.problems import (_coordinate_descent_reference,
                                       _composite_value, _fista_reference)
        p = composite12
        x_a = _fista_reference(p.W, p.b, p.terms, p.partition, p.l_global, 12)
        x_b = _coordinate_descent_reference(p.W, p.b, p.terms, p.partition,
                                            p.l_global, 12)
        f_a = _composite_value(p.W, p.b, p.terms, p.partition, x_a)
        f_b = _composite_value(p.W, p.b, p.terms, p.partition, x_b)
        assert abs(f_a - f_b) <= 1e-10 * (1 + abs(f_a))

    def test_optimum_mapping_norm(self, composite12):
        res = prox_map(composite12.handle(), composite12.x_star, 0, composite12.l_global)
        assert np.linalg.norm(res.g_map) <= 1e-10 * composite12.l_global

    def test_box_start_feasible(self, box12):
        assert np.all(box12.default_start >= -0.3 - 1e-12)
        assert np.all(box12.default_start <= 0.3 + 1e-12)

    def test_block_solver_matches_restricted_solve(self, composite12, rng):
        # the zero-term block has a closed-form restricted solve to compare to
        p = composite12
        h = p.handle()
        x = rng.standard_normal(12)
        z = h.exact_block_min(x, 1)
        cols = p.W[:, 6:]
        rhs = cols.T @ (p.b - p.W[:, :6] @ x[:6])
        np.testing.assert_allclose(z[6:], np.linalg.solve(cols.T @ cols, rhs),
                                   atol=1e-10)


class TestNonlinearPl:
    def test_linear_case_constants(self):
        p = make_nonlinear_pl(seed=1, n=20, m=10, eps=0.0)
        assert p.mu_j == pytest.approx(1.0)
        x = p.default_start
        jac = p.jacobian(x)
        np.testing.assert_allclose(jac, p.amat)
        lo, _ = spectral_extremes(jac @ jac.T)
        assert lo >= 1.0 - 1e-9

    def test_jacobian_matches_finite_differences(self, nonlinear20, rng):
        p = nonlinear20
        for _ in range(20):
            x = p.x_solution + rng.standard_normal(20)
            jac = p.jacobian(x)
            fd = central_fd_jacobian(p.residual, x, p.n_residuals)
            assert np.abs(jac - fd).max() <= 1e-5 * (1 + np.abs(jac).max())

    def test_jacobian_rank_bound_everywhere(self, nonlinear20, rng):
        p = nonlinear20
        for _ in range(100):
            x = 3.0 * rng.standard_normal(20)
            jac = p.jacobian(x)
            lo, _ = spectral_extremes(jac @ jac.T)
            assert lo >= p.mu_j - 1e-9

    def test_solution_is_zero_residual(self, nonlinear20):
        assert nonlinear20.smooth_value(nonlinear20.x_solution) <= 1e-24

    def test_pl_inequality_at_random_points(self, nonlinear20, rng):
        p = nonlinear20
        for _ in range(50):
            x = p.x_solution + rng.standard_normal(20)
            g = p.full_grad(x)
            assert 0.5 * float(g @ g) >= p.pl_constant * p.smooth_value(x) - 1e-9

    def test_block_argmin_quality(self, nonlinear20, rng):
        p = nonlinear20
        h = p.handle()
        x = p.x_solution + 0.5 * rng.standard_normal(20)
        for i in range(2):
            z = h.exact_block_min(x, i)
            gn = np.linalg.norm(h.block_gradient(z, i))
            assert gn <= 1e-9 * (1 + abs(h.smooth_value(z)))
            idx = h.partition.blocks[1 - i]
            np.testing.assert_array_equal(z[idx], x[idx])

    def test_bad_shape(self):
        with pytest.raises(BadShape):
            make_nonlinear_pl(seed=0, n=10, m=10)
