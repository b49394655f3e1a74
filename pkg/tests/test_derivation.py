import numpy as np
import pytest

from derivlab.derivation import (
    DEFAULT_T_GRID,
    ad_apply,
    ad_superoperator,
    derivation_kernel,
    difference_quotient_check,
    flow,
    iterated_commutator,
    kernel_stabilization_report,
    pairing_derivative_check,
)
from derivlab.errors import ZeroT
from derivlab.numlin import frob, subspace_distance, unvec, vec
from derivlab.spectral import spectral_resolution

from conftest import (
    eigenbasis_kernel_oracle,
    matrix_unit,
    random_hermitian,
    random_matrix,
)


class TestAdSuperoperator:
    def test_identity_generator_is_zero(self):
        sop = ad_superoperator(np.eye(3))
        assert frob(sop.matrix) == 0.0

    def test_unit_eigenvector(self):
        d = np.diag([0.0, 1.0, 2.0])
        x = matrix_unit(3, 0, 2)
        out = ad_superoperator(d).apply(x)
        assert frob(out - (-2j) * x) <= 1e-14

    def test_matrix_action_matches_direct_commutator(self):
        d = random_hermitian(5, seed=21)
        x = random_matrix(5, seed=22)
        sop = ad_superoperator(d)
        direct = ad_apply(d, x)  # oracle: i(Dx - xD) without vectorization
        assert frob(sop.apply(x) - direct) <= 1e-12 * max(1.0, frob(direct))

    def test_spectrum_is_eigenvalue_differences(self):
        d = random_hermitian(4, seed=23)
        w = np.linalg.eigvalsh(d)
        # sort key quantizes the real part at the matching tolerance: the
        # computed real parts are pure roundoff around 0
        key = lambda z: (round(z.real / 1e-8), z.imag)
        expected = sorted((1j * (wr - wc) for wr in w for wc in w), key=key)
        actual = sorted(np.linalg.eigvals(ad_superoperator(d).matrix), key=key)
        assert np.max(np.abs(np.array(actual) - np.array(expected))) <= 1e-8


class TestIteratedCommutator:
    def test_kernel_element_maps_to_zero(self):
        d = np.diag([0.0, 1.0, 2.0])
        x = np.diag([3.0, -1.0, 2.0])
        assert frob(iterated_commutator(d, x, 1)) == 0.0

    @pytest.mark.parametrize("k", [1, 2, 3, 4])
    def test_integer_diagonal_exact(self, k):
        # oracle: entries are exactly (i (d_r - d_c))^k x_rc, and every
        # intermediate product is integer-valued, so equality is exact
        d_vals = np.array([0, 1, 2, 3, 4])
        d = np.diag(d_vals).astype(complex)
        rng = np.random.default_rng(31)
        x = rng.integers(-9, 10, size=(5, 5)).astype(complex)
        expected = np.empty((5, 5), dtype=complex)
        for r in range(5):
            for c in range(5):
                expected[r, c] = (1j * (d_vals[r] - d_vals[c])) ** k * x[r, c]
        assert np.array_equal(iterated_commutator(d, x, k), expected)

    def test_matches_superoperator_power(self):
        d = random_hermitian(4, seed=32)
        x = random_matrix(4, seed=33)
        sop = ad_superoperator(d)
        via_power = unvec(np.linalg.matrix_power(sop.matrix, 3) @ vec(x), 4)
        direct = iterated_commutator(d, x, 3)
        assert frob(direct - via_power) <= 1e-9 * max(1.0, frob(direct))

    def test_rejects_k_zero(self):
        with pytest.raises(ValueError):
            iterated_commutator(np.eye(2), np.eye(2), 0)


class TestDerivationKernel:
    def test_distinct_diagonal_kernel_is_diagonal(self):
        kernel = derivation_kernel(np.diag([0.0, 1.0, 2.0]))
        assert kernel.dim == 3
        for b in kernel.basis:
            assert frob(b - np.diag(np.diag(b))) <= 1e-10

    def test_multiplicity_counts(self):
        kernel = derivation_kernel(np.diag([1.0, 1.0, 2.0]))
        assert kernel.dim == 2**2 + 1**2

    def test_zero_generator_full_space(self):
        kernel = derivation_kernel(np.zeros((3, 3)))
        assert kernel.dim == 9

    def test_contains_identity(self):
        kernel = derivation_kernel(random_hermitian(5, seed=41))
        assert kernel.membership_residual(np.eye(5)) <= 1e-9

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_matches_eigenbasis_oracle(self, k, gapped_hermitian):
        d = gapped_hermitian(6, 42)
        oracle = eigenbasis_kernel_oracle(d)
        assert subspace_distance(derivation_kernel(d, k), oracle) <= 1e-8


class TestKernelStabilization:
    def test_distinct_diagonal(self):
        report = kernel_stabilization_report(np.diag([0.0, 1.0, 2.0]), 4)
        assert report.kernel_dims == (3, 3, 3, 3)
        assert max(report.distances) <= 1e-8
        assert report.passed

    def test_identity(self):
        report = kernel_stabilization_report(np.eye(3), 3)
        assert report.kernel_dims == (9, 9, 9)
        assert max(report.distances) <= 1e-12

    def test_double_eigenvalue_instance(self, gapped_hermitian):
        from derivlab.cli import generate

        d = generate(
            "hermitian_with_multiplicity", 8, 5, multiplicities=[2, 1, 1, 1, 1, 1, 1]
        )
        report = kernel_stabilization_report(d, 5)
        # oracle: ker ad^k is spanned by eigen-units with equal eigenvalues,
        # independent of k, so dim = sum of squared multiplicities
        assert report.kernel_dims == (10, 10, 10, 10, 10)
        assert report.passed

    def test_json_envelope(self):
        report = kernel_stabilization_report(np.diag([0.0, 1.0, 2.0]), 3)
        data = report.to_json_dict()
        for key in ("n", "spectrum", "multiplicities", "kernel_dims", "distances", "pass", "tolerances"):
            assert key in data
        assert data["pass"] is True
        assert data["tolerances"]["subspace"] == report.distance_tol


class TestDerivationAlgebra:
    @pytest.mark.parametrize("seed", range(5))
    def test_leibniz_rule(self, seed):
        d = random_hermitian(4, seed=100 + seed)
        x = random_matrix(4, seed=200 + seed)
        y = random_matrix(4, seed=300 + seed)
        lhs = ad_apply(d, x @ y)
        rhs = ad_apply(d, x) @ y + x @ ad_apply(d, y)
        assert frob(lhs - rhs) <= 1e-10 * max(1.0, frob(lhs))

    @pytest.mark.parametrize("seed", range(5))
    def test_star_derivation(self, seed):
        d = random_hermitian(4, seed=400 + seed)
        x = random_matrix(4, seed=500 + seed)
        assert frob(ad_apply(d, x.conj().T) - ad_apply(d, x).conj().T) <= 1e-12

    def test_kernel_is_unital_star_algebra(self, gapped_hermitian):
        kernel = derivation_kernel(gapped_hermitian(5, 77))
        assert kernel.membership_residual(np.eye(5)) <= 1e-9
        for a in kernel.basis[:3]:
            assert kernel.membership_residual(a.conj().T) <= 1e-9
            for b in kernel.basis[:3]:
                assert kernel.membership_residual(a @ b) <= 1e-9

    def test_kernel_dim_is_sum_of_squared_multiplicities(self, gapped_hermitian):
        from derivlab.cli import generate

        for n, mult in [(4, [2, 2]), (5, [3, 1, 1]), (6, [2, 2, 2])]:
            d = generate("hermitian_with_multiplicity", n, 11, multiplicities=mult)
            res = spectral_resolution(d)
            assert sorted(res.multiplicities) == sorted(mult)
            assert derivation_kernel(d).dim == sum(m**2 for m in mult)


class TestFlow:
    def test_t_zero(self):
        d = random_hermitian(4, seed=51)
        x = random_matrix(4, seed=52)
        res = spectral_resolution(d)
        assert frob(flow(res, x, 0.0) - x) <= 1e-12

    def test_kernel_elements_are_fixed(self, gapped_hermitian):
        d = gapped_hermitian(4, 53)
        res = spectral_resolution(d)
        kernel = derivation_kernel(d)
        for t in (0.3, -1.7, 4.0):
            for b in kernel.basis[:3]:
                assert frob(flow(res, b, t) - b) <= 1e-9

    def test_scalar_conjugation(self):
        res = spectral_resolution(np.diag([0.0, 1.0]))
        x = matrix_unit(2, 0, 1)
        for t in (0.4, 1.9):
            # oracle: e^{it*0} * 1 * e^{-it*1} = e^{-it}
            assert frob(flow(res, x, t) - np.exp(-1j * t) * x) <= 1e-12

    def test_norm_preservation(self):
        d = random_hermitian(5, seed=54)
        x = random_matrix(5, seed=55)
        res = spectral_resolution(d)
        assert abs(frob(flow(res, x, 0.83)) - frob(x)) <= 1e-9


class TestDifferenceQuotient:
    def test_kernel_element_zero_residual(self, gapped_hermitian):
        d = gapped_hermitian(4, 61)
        res = spectral_resolution(d)
        kernel = derivation_kernel(d)
        report = difference_quotient_check(res, d, kernel.basis[0])
        assert max(report.residuals) <= 1e-10
        assert report.passed

    def test_first_order_convergence(self):
        d = random_hermitian(4, seed=62)
        x = random_matrix(4, seed=63)
        res = spectral_resolution(d)
        report = difference_quotient_check(
            res, d, x, t_list=[1e-2, 5e-3, 2.5e-3]
        )
        ratios = [
            report.residuals[i] / report.residuals[i + 1]
            for i in range(len(report.residuals) - 1)
        ]
        for ratio in ratios:
            assert abs(ratio - 2.0) <= 0.2
        assert report.passed

    def test_scalar_lipschitz_is_exact(self):
        d = np.diag([0.0, 1.0])
        res = spectral_resolution(d)
        x = matrix_unit(2, 0, 1)
        report = difference_quotient_check(res, d, x, t_list=[0.5, 0.1, 1e-3])
        for t, ratio in zip(report.t_values, report.lipschitz_ratios):
            # oracle: ||alpha_t(x) - x|| = |e^{-it} - 1| <= |t| exactly
            assert abs(ratio * abs(t) - abs(np.exp(-1j * t) - 1.0)) <= 1e-12
            assert ratio * abs(t) <= abs(t)

    def test_bounds_hold_on_default_grid(self):
        d = random_hermitian(5, seed=64)
        x = random_matrix(5, seed=65)
        res = spectral_resolution(d)
        report = difference_quotient_check(res, d, x)
        assert report.t_values == tuple(DEFAULT_T_GRID)
        for r, rb in zip(report.residuals, report.residual_bounds):
            assert r <= rb
        for l, lb in zip(report.lipschitz_ratios, report.lipschitz_bounds):
            assert l <= lb
        assert report.monotone

    def test_zero_t_rejected(self):
        d = np.eye(2)
        res = spectral_resolution(d)
        with pytest.raises(ZeroT):
            difference_quotient_check(res, d, np.eye(2), t_list=[0.0, 1e-2])


class TestPairingDerivative:
    def test_kernel_element(self, gapped_hermitian):
        d = gapped_hermitian(3, 71)
        res = spectral_resolution(d)
        kernel = derivation_kernel(d)
        h = np.array([1.0, 0.0, 0.0])
        k = np.array([0.0, 1.0, 0.0])
        assert pairing_derivative_check(res, d, kernel.basis[0], h, k, 0.2, 1e-3) <= 1e-12

    def test_scalar_case(self):
        d = np.diag([0.0, 1.0])
        res = spectral_resolution(d)
        x = matrix_unit(2, 0, 1)
        h = np.array([0.0, 1.0])
        k = np.array([1.0, 0.0])
        delta = 1e-3
        residual = pairing_derivative_check(res, d, x, h, k, 0.0, delta)
        # oracle: the pairing is s -> e^{-is}; the central difference of it
        # misses the derivative -i by exactly |1 - sin(delta)/delta|
        assert abs(residual - abs(1.0 - np.sin(delta) / delta)) <= 1e-14
        assert residual <= delta**2

    def test_quadratic_convergence(self):
        d = random_hermitian(6, seed=72)
        x = random_matrix(6, seed=73)
        res = spectral_resolution(d)
        rng = np.random.default_rng(74)
        h = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        k = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        r1 = pairing_derivative_check(res, d, x, h, k, 0.3, 1e-3)
        r2 = pairing_derivative_check(res, d, x, h, k, 0.3, 5e-4)
        assert abs(r1 / r2 - 4.0) <= 1.0
        bound = frob(d) ** 3 * frob(x) * np.linalg.norm(h) * np.linalg.norm(k)
        assert r1 <= bound * (1e-3) ** 2
