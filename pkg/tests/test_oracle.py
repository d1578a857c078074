import numpy as np
import pytest

from ghz_witness import oracle
from ghz_witness.errors import CapExceededError
from ghz_witness.witness import WitnessCoefficients, separable_bound


class TestMatrices:
    def test_pauli_matrix_sign(self):
        np.testing.assert_allclose(oracle.pauli_matrix("-ZZ"), -np.diag([1, -1, -1, 1]))

    def test_partial_trace(self, random_density):
        a, b = random_density(1), random_density(2)
        rho = np.kron(a, b)
        np.testing.assert_allclose(oracle.partial_trace_keep(rho, [0]), a, atol=1e-12)
        np.testing.assert_allclose(oracle.partial_trace_keep(rho, [1, 2]), b, atol=1e-12)

    def test_partial_trace_reorders(self, random_density):
        a, b = random_density(1), random_density(1)
        rho = np.kron(a, b)
        np.testing.assert_allclose(oracle.partial_trace_keep(rho, [1, 0]), np.kron(b, a), atol=1e-12)

    def test_thermal_matrix_is_normalised(self):
        rho = oracle.thermal_stabilizer_matrix(["XX", "ZZ"], 2.0)
        assert np.trace(rho).real == pytest.approx(1)

    def test_witness_cap(self):
        with pytest.raises(CapExceededError):
            oracle.witness_from_projectors(np.zeros(1 << 9))


class TestProductStates:
    def test_single_term(self):
        assert oracle.max_over_product_states(WitnessCoefficients.single(3, 0), restarts=4) == pytest.approx(1.0, abs=1e-5)

    def test_zero(self):
        assert oracle.max_over_product_states(np.zeros(4)) == 0.0

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_non_negative_coefficients_reach_bound(self, n, rng):
        b = rng.uniform(0, 1, 1 << n)
        coeffs = WitnessCoefficients(n, (1 << n) * b / b.sum())
        assert oracle.max_over_product_states(coeffs, restarts=6) == pytest.approx(separable_bound(coeffs), abs=1e-5)

    @pytest.mark.parametrize("seed", range(5))
    def test_never_exceeds_bound(self, seed):
        rng = np.random.default_rng(seed)
        b = rng.normal(size=4)
        coeffs = WitnessCoefficients(2, 4 * b / np.abs(b).sum())
        assert oracle.max_over_product_states(coeffs, restarts=6, seed=seed) <= separable_bound(coeffs) + 1e-9

    def test_bound_is_not_tight_for_signed_coefficients(self):
        # one qubit, b = (1, -1): W = X/2 - X/2 = 0
        assert oracle.max_over_product_states(np.array([1.0, -1.0])) == pytest.approx(0.0, abs=1e-12)
        assert separable_bound(WitnessCoefficients(1, np.array([1.0, -1.0]))) == 1.0


class TestIdentities:
    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_appendix_suite(self, n):
        report = oracle.verify_appendix_identities(n, trials=5, seed=n)
        assert report.passed, report.text()

    def test_sampled_sizes(self):
        assert oracle.verify_appendix_identities(5, trials=2).passed

    def test_rejects_large(self):
        with pytest.raises(ValueError):
            oracle.verify_appendix_identities(7)

    def test_tampered_tolerance_fails(self):
        report = oracle.verify_appendix_identities(3, trials=5, tol=-1.0)
        assert not report.passed
        assert "FAIL" in report.text()

    def test_closed_forms(self):
        assert oracle.check_closed_forms().passed


class TestWScan:
    def test_bell_pair_value(self):
        result = oracle.w_state_scan(2, 3, seed=0)
        assert result.full_value == pytest.approx(2.0, abs=1e-6)
        assert result.estimate == 2

    def test_three_of_four(self):
        result = oracle.w_state_scan(3, 4, seed=7)
        assert result.estimate == 3
        assert not result.low_confidence
        inside = [result.values[p] for p in result.positions]
        assert inside == pytest.approx([4 / 3] * 3, abs=1e-4)

    def test_rejects_bad_sizes(self):
        with pytest.raises(ValueError):
            oracle.w_state_scan(4, 3)


class TestRing:
    @pytest.mark.parametrize("beta", [0.1, 1.0, 10.0])
    def test_exceeds_one(self, beta):
        value, exceeds = oracle.ring_wb_exceeds_one(4, beta)
        assert exceeds and value > 1

    def test_rejects_small(self):
        with pytest.raises(ValueError):
            oracle.ring_wb_exceeds_one(2, 1.0)
