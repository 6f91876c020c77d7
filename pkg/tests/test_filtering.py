import json
import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given
from hypothesis import strategies as st
from scipy.sparse.csgraph import shortest_path

from graphsp import errors
from graphsp.filtering import (
    ChebyshevFilter,
    Custom,
    Heat,
    IdealHighPass,
    IdealLowPass,
    Polynomial,
    Tikhonov,
    _chebyshev_recurrence,
    apply_exact,
    apply_polynomial,
    check_shift_invariance,
    chebyshev_apply,
    chebyshev_fit,
    filter_matrix,
    identity_kernel,
    impulse_response,
    kernel_from_dict,
    kernel_from_json,
    polynomial_matrix,
    power_iteration,
    spectral_upper_bound,
)
from graphsp.generators import path_graph, random_connected_graph, random_tree
from graphsp.graph import cycle_graph, from_edge_list, shift
from graphsp.spectral import eigendecompose
from strategies import connected_graphs


def k2_laplacian():
    return shift(from_edge_list([(0, 1, 1.0)], 2), "laplacian")


def c4_adjacency():
    return shift(cycle_graph(4, directed=True), "adjacency")


class TestKernels:
    def test_ideal_boundary_in_low_band(self):
        lam = np.array([0.0, 1.0, 1.0 + 5e-10, 1.0 + 1e-8, 2.0])
        np.testing.assert_array_equal(IdealLowPass(1.0)(lam), [1, 1, 1, 0, 0])
        np.testing.assert_array_equal(IdealHighPass(1.0)(lam), [0, 0, 0, 1, 1])

    def test_heat_and_tikhonov(self):
        assert Heat(2.0)(np.array([0.5]))[0] == pytest.approx(math.exp(-1.0))
        assert Tikhonov(3.0)(np.array([2.0]))[0] == pytest.approx(1 / 7)

    def test_custom_interpolates(self):
        k = Custom(((0.0, 1.0), (2.0, 0.0)))
        np.testing.assert_allclose(k(np.array([0.0, 0.5, 2.0])), [1.0, 0.75, 0.0])
        assert k.interval == (0.0, 2.0)

    def test_domain(self):
        with pytest.raises(errors.KernelDomain):
            Custom(((0.0, 1.0), (2.0, 0.0)))(np.array([3.0]))
        with pytest.raises(errors.KernelDomain):
            Tikhonov(1.0)(np.array([-0.5]))
        # rounding-level negatives at the Laplacian null space are accepted
        Tikhonov(1.0)(np.array([-1e-15]))

    def test_complex_spectrum_needs_analytic_kernel(self):
        lam = np.array([1.0, 1j, -1j, -1.0])
        Heat(1.0)(lam)
        Polynomial((1.0, 2.0))(lam)
        with pytest.raises(errors.KernelDomain):
            IdealLowPass(0.0)(lam)

    @pytest.mark.parametrize(
        "bad",
        [
            lambda: Heat(-1.0),
            lambda: Tikhonov(-1.0),
            lambda: Polynomial(()),
            lambda: IdealLowPass(5.0, interval=(0.0, 2.0)),
            lambda: Custom(((1.0, 0.0), (0.0, 1.0))),
        ],
    )
    def test_invalid(self, bad):
        with pytest.raises(errors.InvalidKernel):
            bad()

    @pytest.mark.parametrize(
        "spec",
        [
            {"kind": "heat", "t": 1.0},
            {"kind": "lowpass", "cutoff": 0.5},
            {"kind": "highpass", "cutoff": 0.5},
            {"kind": "tikhonov", "gamma": 2.0},
            {"kind": "polynomial", "coefficients": [1.0, -0.5]},
            {"kind": "custom", "points": [[0.0, 1.0], [2.0, 0.0]]},
        ],
    )
    def test_json_roundtrip(self, spec):
        k = kernel_from_json(json.dumps(spec))
        assert k.to_dict() == spec
        assert kernel_from_dict(k.to_dict()) == k

    def test_json_errors(self):
        for text in ["{", '{"t": 1}', '{"kind": "wavelet"}', '{"kind": "heat"}']:
            with pytest.raises(errors.InvalidKernel):
                kernel_from_json(text)

    def test_json_interval(self):
        k = kernel_from_dict({"kind": "heat", "t": 1.0, "interval": [0, 4]})
        assert k.interval == (0.0, 4.0)


class TestApplyExact:
    def test_identity(self, rng):
        b = eigendecompose(shift(random_connected_graph(12, rng), "laplacian"))
        s = rng.standard_normal(12)
        np.testing.assert_allclose(apply_exact(b, identity_kernel(), s), s, atol=1e-13)

    def test_k2_heat(self):
        out = apply_exact(eigendecompose(k2_laplacian()), Heat(1.0), [1.0, 0.0])
        e2 = math.exp(-2.0)
        np.testing.assert_allclose(out, [(1 + e2) / 2, (1 - e2) / 2], atol=1e-15)
        np.testing.assert_allclose(out, [0.56767, 0.43233], atol=1e-5)

    def test_lowpass_below_lambda1_keeps_mean(self, rng):
        op = shift(random_connected_graph(15, rng), "laplacian")
        b = eigendecompose(op)
        s = rng.standard_normal(15)
        out = apply_exact(b, IdealLowPass(0.5 * b.frequencies[1]), s)
        np.testing.assert_allclose(out, np.full(15, s.mean()), atol=1e-12)

    def test_kernel_domain(self):
        b = eigendecompose(k2_laplacian())
        with pytest.raises(errors.KernelDomain):
            apply_exact(b, Custom(((0.0, 1.0), (1.0, 0.0))), [1.0, 0.0])

    def test_dimension_mismatch(self):
        with pytest.raises(errors.DimensionMismatch):
            apply_exact(eigendecompose(k2_laplacian()), Heat(1.0), [1.0])

    def test_directed_real_output(self, rng):
        b = eigendecompose(c4_adjacency())
        out = apply_exact(b, Polynomial((0.0, 1.0)), [1.0, 0.0, 0.0, 0.0])
        assert not np.iscomplexobj(out)
        np.testing.assert_allclose(out, [0, 1, 0, 0], atol=1e-15)

    @given(connected_graphs(max_n=40), st.floats(0.0, 1.0), st.integers(0, 2**31))
    def test_low_plus_high_is_identity(self, g, frac, seed):
        b = eigendecompose(shift(g, "laplacian"))
        cutoff = frac * b.eigenvalues.max()
        s = np.random.default_rng(seed).standard_normal(g.n)
        out = apply_exact(b, IdealLowPass(cutoff), s) + apply_exact(b, IdealHighPass(cutoff), s)
        assert np.abs(out - s).max() <= 1e-10 * max(1.0, np.abs(s).max())

    @given(connected_graphs(max_n=40), st.integers(0, 2**31))
    def test_eigenresponse(self, g, seed):
        op = shift(g, "laplacian")
        b = eigendecompose(op)
        k = Heat(np.random.default_rng(seed).uniform(0, 2))
        h = filter_matrix(b, k)
        for lam, v in zip(b.eigenvalues, b.vectors.T):
            np.testing.assert_allclose(h @ v, k(np.array([lam]))[0] * v, atol=1e-9)

    @given(connected_graphs(max_n=40), st.integers(0, 2**31))
    def test_linearity(self, g, seed):
        rng = np.random.default_rng(seed)
        b = eigendecompose(shift(g, "normalized"))
        s, t = rng.standard_normal((2, g.n))
        alpha, beta = rng.standard_normal(2)
        k = Tikhonov(1.5)
        lhs = apply_exact(b, k, alpha * s + beta * t)
        rhs = alpha * apply_exact(b, k, s) + beta * apply_exact(b, k, t)
        assert np.abs(lhs - rhs).max() <= 1e-10 * max(1.0, np.abs(lhs).max())


class TestApplyPolynomial:
    def test_pure_shift_delays(self):
        np.testing.assert_array_equal(apply_polynomial(c4_adjacency(), (0, 1), [1, 0, 0, 0]), [0, 1, 0, 0])

    def test_constant(self, rng):
        s = rng.standard_normal(4)
        np.testing.assert_array_equal(apply_polynomial(c4_adjacency(), (1,), s), s)

    def test_two_delays(self):
        np.testing.assert_array_equal(apply_polynomial(c4_adjacency(), (0, 0, 1), [1, 0, 0, 0]), [0, 0, 1, 0])

    def test_degree_too_high(self):
        with pytest.raises(errors.DegreeTooHigh):
            apply_polynomial(c4_adjacency(), (1, 1, 1, 1, 1), np.ones(4))
        with pytest.raises(errors.DegreeTooHigh):
            apply_exact(eigendecompose(c4_adjacency()), Polynomial((1,) * 5), np.ones(4))

    def test_dimension_mismatch(self):
        with pytest.raises(errors.DimensionMismatch):
            apply_polynomial(c4_adjacency(), (1, 1), np.ones(3))

    def test_matches_dense_matrix_polynomial(self, rng):
        op = shift(random_connected_graph(10, rng), "adjacency")
        c = rng.standard_normal(5)
        s = rng.standard_normal(10)
        dense = sum(ck * np.linalg.matrix_power(op.matrix, k) for k, ck in enumerate(c)) @ s
        np.testing.assert_allclose(apply_polynomial(op, c, s), dense, rtol=1e-12, atol=1e-12)

    @given(connected_graphs(min_n=9, max_n=64), st.integers(0, 8), st.integers(0, 2**31),
           st.sampled_from(["adjacency", "laplacian", "normalized"]))
    def test_route_equivalence(self, g, degree, seed, kind):
        rng = np.random.default_rng(seed)
        op = shift(g, kind)
        c = rng.standard_normal(degree + 1)
        s = rng.standard_normal(g.n)
        vertex = apply_polynomial(op, c, s)
        spectral = apply_exact(eigendecompose(op), Polynomial(tuple(c)), s)
        assert np.linalg.norm(vertex - spectral) <= 1e-8 * max(np.linalg.norm(vertex), 1e-300)

    @given(connected_graphs(max_n=30), st.integers(0, 2**31))
    def test_polynomial_filters_commute(self, g, seed):
        op = shift(g, "adjacency")
        c = np.random.default_rng(seed).standard_normal(min(g.n, 6))
        assert check_shift_invariance(op, polynomial_matrix(op, c), tol=1e-10)


class TestShiftInvariance:
    def test_square_plus_identity(self):
        op = c4_adjacency()
        a = op.matrix
        assert check_shift_invariance(op, a @ a + np.eye(4))

    def test_diagonal_does_not_commute(self):
        assert not check_shift_invariance(c4_adjacency(), np.diag([1.0, 2.0, 3.0, 4.0]))

    def test_identity(self):
        assert check_shift_invariance(c4_adjacency(), np.eye(4))

    def test_dimension_mismatch(self):
        with pytest.raises(errors.DimensionMismatch):
            check_shift_invariance(c4_adjacency(), np.eye(3))


class TestChebyshevFit:
    def test_constant(self):
        f = chebyshev_fit(identity_kernel(), 7, 3.0)
        assert f.coefficients[0] == pytest.approx(1.0, abs=1e-14)
        assert np.abs(f.coefficients[1:]).max() < 1e-12

    def test_linear_exact(self):
        f = chebyshev_fit(Polynomial((0.0, 1.0)), 1, 2.0)
        x = np.linspace(0, 2, 101)
        assert np.abs(f(x) - x).max() < 1e-10

    @pytest.mark.parametrize("degree", [3, 6, 10])
    def test_polynomial_exact(self, degree, rng):
        c = rng.standard_normal(degree + 1)
        f = chebyshev_fit(Polynomial(tuple(c)), degree, 4.0)
        x = np.linspace(0, 4, 500)
        ref = np.polynomial.polynomial.polyval(x, c)
        assert np.abs(f(x) - ref).max() < 1e-10 * max(1.0, np.abs(ref).max())

    def test_heat_error_shrinks(self):
        grid = np.linspace(0, 2, 1000)
        exact = np.exp(-grid)
        err = {k: np.abs(chebyshev_fit(Heat(1.0), k, 2.0)(grid) - exact).max() for k in (5, 10)}
        assert err[10] < err[5]

    def test_heat_convergence_monotone(self):
        grid = np.linspace(0, 8, 1000)
        exact = np.exp(-1.5 * grid)
        errs = [np.abs(chebyshev_fit(Heat(1.5), k, 8.0)(grid) - exact).max() for k in (2, 5, 10, 20, 40)]
        assert all(b <= a for a, b in zip(errs, errs[1:]))

    def test_invalid_interval(self):
        with pytest.raises(errors.InvalidInterval):
            chebyshev_fit(Heat(1.0), 5, 0.0)
        with pytest.raises(errors.InvalidInterval):
            chebyshev_fit(Heat(1.0), -1, 2.0)
        with pytest.raises(errors.InvalidInterval):
            chebyshev_fit(Custom(((0.0, 1.0), (1.0, 0.0))), 5, 2.0)

    def test_csv(self):
        f = ChebyshevFilter(np.array([0.5, 0.25]), 2.0)
        assert f.to_csv() == "k,c_k\n0,0.5\n1,0.25\n"


class TestChebyshevApply:
    def test_constant_series(self, rng):
        op = shift(random_connected_graph(20, rng), "laplacian")
        s = rng.standard_normal(20)
        f = chebyshev_fit(identity_kernel(), 10, spectral_upper_bound(op))
        assert np.abs(chebyshev_apply(op, f, s) - s).max() < 1e-10

    def test_degree1_is_laplacian(self, rng):
        op = k2_laplacian()
        s = rng.standard_normal(2)
        f = chebyshev_fit(Polynomial((0.0, 1.0)), 1, 2.0)
        assert np.abs(chebyshev_apply(op, f, s) - op.matrix @ s).max() < 1e-10

    def test_heat_matches_matrix_exponential(self):
        rng = np.random.default_rng(64)
        op = shift(random_connected_graph(64, rng), "laplacian")
        ub = spectral_upper_bound(op)
        t = 5.0 / ub
        s = rng.standard_normal(64)
        out = chebyshev_apply(op, chebyshev_fit(Heat(t), 30, ub), s)
        ref = scipy.linalg.expm(-t * op.matrix) @ s
        assert np.linalg.norm(out - ref) <= 1e-4 * np.linalg.norm(ref)
        exact = apply_exact(eigendecompose(op), Heat(t), s)
        assert np.linalg.norm(out - exact) <= 1e-4 * np.linalg.norm(exact)

    def test_error_bounded_by_fit_error(self, rng):
        op = shift(random_connected_graph(40, rng), "laplacian")
        b = eigendecompose(op)
        ub = 1.01 * b.eigenvalues.max()
        s = rng.standard_normal(40)
        k = Heat(3.0)
        f = chebyshev_fit(k, 6, ub)
        grid = np.linspace(0, ub, 2001)
        sup = np.abs(f(grid) - k(grid)).max()
        # evaluating at the eigenvalues can only be tighter than the grid sup; allow grid slack
        err = np.linalg.norm(chebyshev_apply(op, f, s) - apply_exact(b, k, s))
        assert err <= 1.01 * sup * np.linalg.norm(s)

    def test_exactly_degree_matvecs(self, rng):
        s = rng.standard_normal(5)
        m = shift(path_graph(5), "laplacian").matrix
        calls = []

        def matvec(x):
            calls.append(1)
            return m @ x

        for degree in (0, 1, 2, 7):
            calls.clear()
            _chebyshev_recurrence(matvec, np.ones(degree + 1), 4.0, s)
            assert len(calls) == degree

    def test_not_symmetric(self):
        f = chebyshev_fit(Heat(1.0), 3, 2.0)
        with pytest.raises(errors.NotSymmetric):
            chebyshev_apply(c4_adjacency(), f, np.ones(4))

    def test_spectrum_exceeds_bound(self, rng):
        op = shift(random_connected_graph(20, rng), "laplacian")
        lam_max = np.linalg.eigvalsh(op.matrix).max()
        f = chebyshev_fit(Heat(1.0), 5, 0.5 * lam_max)
        with pytest.raises(errors.SpectrumExceedsBound):
            chebyshev_apply(op, f, np.ones(20))

    def test_adjacency_negative_spectrum_rejected(self):
        op = shift(cycle_graph(5, directed=False), "adjacency")
        with pytest.raises(errors.SpectrumExceedsBound):
            chebyshev_apply(op, chebyshev_fit(Heat(1.0), 3, 4.0), np.ones(5))

    def test_normalized_bound_is_two(self, rng):
        op = shift(random_connected_graph(10, rng), "normalized")
        assert spectral_upper_bound(op) == 2.0

    def test_power_iteration(self, rng):
        op = shift(random_connected_graph(30, rng), "laplacian")
        lam = np.linalg.eigvalsh(op.matrix).max()
        est = power_iteration(op)
        assert est <= lam + 1e-9
        assert est >= 0.99 * lam


class TestImpulse:
    def test_identity(self):
        op = shift(path_graph(6), "laplacian")
        np.testing.assert_allclose(impulse_response(op, identity_kernel(), 3), np.eye(6)[3])
        np.testing.assert_allclose(impulse_response(op, Heat(0.0), 2), np.eye(6)[2], atol=1e-14)

    def test_shift_of_impulse(self):
        np.testing.assert_array_equal(impulse_response(c4_adjacency(), Polynomial((0.0, 1.0)), 0), [0, 1, 0, 0])

    def test_p10_degree2(self):
        op = shift(path_graph(10), "laplacian")
        f = chebyshev_fit(Heat(1.0), 2, 4.0)
        r = impulse_response(op, f, 0)
        assert np.all(r[3:] == 0)
        assert np.all(r[:3] != 0)

    def test_bad_index(self):
        with pytest.raises(errors.IndexOutOfRange):
            impulse_response(c4_adjacency(), identity_kernel(), 4)

    @given(st.integers(2, 40), st.integers(0, 12), st.integers(0, 2**31))
    def test_k_hop_support_on_trees(self, n, degree, seed):
        rng = np.random.default_rng(seed)
        g = random_tree(n, rng, weighted=True)
        op = shift(g, "laplacian")
        i = int(rng.integers(n))
        hops = shortest_path(g.adjacency_sparse, unweighted=True, indices=i)
        f = chebyshev_fit(Heat(0.7), degree, 1.01 * power_iteration(op, seed=seed) + 1e-3)
        r = impulse_response(op, f, i)
        assert np.all(np.abs(r[hops > degree]) <= 1e-12)
