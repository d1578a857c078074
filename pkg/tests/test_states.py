import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ghz_witness import oracle
from ghz_witness.errors import CapExceededError, DimensionError, ModelError
from ghz_witness.frames import LocalFrame
from ghz_witness.models import cluster_generators, ghz_generators
from ghz_witness.pauli import PauliString
from ghz_witness.states import (
    CorrelatorTable,
    DenseState,
    RingExcitationState,
    StabilizerThermalState,
    correlator,
    full_xy_table,
    fwht,
    postselect_pair,
    singlet_fidelity,
)


def as_text(gens):
    return [str(g) for g in gens]


class TestFwht:
    @pytest.mark.parametrize("n", [1, 2, 3, 5])
    def test_matches_hadamard_matrix(self, n, rng):
        from scipy.linalg import hadamard

        v = rng.normal(size=1 << n)
        np.testing.assert_allclose(fwht(v), hadamard(1 << n) @ v, atol=1e-12)

    def test_rejects_bad_length(self):
        with pytest.raises(ValueError):
            fwht(np.ones(3))


class TestCorrelatorTable:
    def test_rejects_odd_entries(self):
        with pytest.raises(ValueError):
            CorrelatorTable.from_mapping(2, {"xy": 0.5})

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            CorrelatorTable.from_mapping(2, {"yy": 1.5})

    def test_rejects_wrong_length(self):
        with pytest.raises(DimensionError):
            CorrelatorTable(2, np.zeros(3))

    def test_indexing_and_len(self):
        table = CorrelatorTable.from_mapping(3, {"xxx": 0.25, "yyx": -0.5})
        assert table["yyx"] == -0.5 and table[0] == 0.25
        assert len(table) == 4
        assert table.nonzero() == {"xxx": 0.25, "yyx": -0.5}

    def test_csv_round_trip(self):
        table = CorrelatorTable.from_mapping(3, {"xxx": 1 / 3, "xyy": -0.125})
        buf = io.StringIO()
        table.to_csv(buf)
        assert buf.getvalue().splitlines()[0] == "l,T"
        buf.seek(0)
        again = CorrelatorTable.from_csv(buf)
        np.testing.assert_allclose(again.values, table.values, atol=1e-12)


class TestStabilizerThermalState:
    @pytest.mark.parametrize(
        "gens, error",
        [
            (["XX"], ModelError),
            (["XI", "ZI"], ValueError),
            (["XX", "XX"], ModelError),
            (["XX", "II"], ModelError),
            (["XX", "ZZZ"], DimensionError),
        ],
    )
    def test_rejects_bad_generators(self, gens, error):
        with pytest.raises(error):
            StabilizerThermalState(tuple(gens), 1.0)

    def test_rejects_negative_beta(self):
        with pytest.raises(ValueError):
            StabilizerThermalState(("XX", "ZZ"), -1.0)

    @pytest.mark.parametrize("family", [ghz_generators, cluster_generators])
    @pytest.mark.parametrize("n", [3, 4])
    @pytest.mark.parametrize("beta", [0.3, 1.7])
    def test_dense_matches_expm(self, family, n, beta):
        gens = as_text(family(n))
        state = StabilizerThermalState(tuple(gens), beta)
        np.testing.assert_allclose(state.to_dense().matrix, oracle.thermal_stabilizer_matrix(gens, beta), atol=1e-12)

    @given(st.text("IXYZ", min_size=3, max_size=3), st.floats(0, 5))
    @settings(max_examples=60, deadline=None)
    def test_expectation_matches_trace(self, text, beta):
        gens = as_text(cluster_generators(3))
        state = StabilizerThermalState(tuple(gens), beta)
        rho = oracle.thermal_stabilizer_matrix(gens, beta)
        expected = np.trace(oracle.pauli_matrix(text) @ rho).real
        assert state.expectation(PauliString.from_str(text)) == pytest.approx(expected, abs=1e-12)

    def test_ghz_correlator_is_thermal_power(self):
        state = StabilizerThermalState(tuple(as_text(ghz_generators(3))), 1.0)
        t = np.tanh(0.5)
        assert state.expectation(PauliString.from_str("XXX")) == pytest.approx(t)
        assert state.expectation(PauliString.from_str("YYX")) == pytest.approx(-(t**2))

    def test_cap(self):
        with pytest.raises(CapExceededError):
            StabilizerThermalState(tuple(as_text(ghz_generators(4))), 1.0).to_dense(cap=3)


class TestDenseState:
    def test_validation(self):
        with pytest.raises(ValueError):
            DenseState(np.diag([0.5, 0.6]))
        with pytest.raises(ValueError):
            DenseState(np.diag([1.5, -0.5]))
        with pytest.raises(ValueError):
            DenseState(np.array([[0.5, 0.5], [0.0, 0.5]]))
        with pytest.raises(DimensionError):
            DenseState(np.eye(3) / 3)

    def test_from_vector_normalises(self):
        state = DenseState.from_vector([1, 0, 0, 1])
        assert state.n_qubits == 2
        assert np.trace(state.matrix).real == pytest.approx(1)

    def test_cap(self):
        with pytest.raises(CapExceededError):
            DenseState.maximally_mixed(3, cap=2)


class TestCorrelators:
    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_dense_against_explicit_traces(self, n, random_density, rng):
        rho = random_density(n)
        frame = LocalFrame.from_angles(rng.uniform(0, 2 * np.pi, (n, 3)))
        table = full_xy_table(DenseState(rho), frame)
        for l, t in oracle.explicit_table(rho, frame.unitaries()).items():
            assert table[l] == pytest.approx(t, abs=1e-12)
            assert correlator(DenseState(rho), l, frame) == pytest.approx(t, abs=1e-12)

    @pytest.mark.parametrize("tags", [["+X+Y"] * 3, ["+Z+X", "-Y+Z", "+X-Y"], ["+Y+X", "+X+Z", "-Z-Y"]])
    def test_stabilizer_table_against_dense(self, tags):
        state = StabilizerThermalState(tuple(as_text(cluster_generators(3))), 0.8)
        frame = LocalFrame.from_tags(tags)
        fast = full_xy_table(state, frame).values
        slow = full_xy_table(state.to_dense(), frame).values
        np.testing.assert_allclose(fast, slow, atol=1e-12)

    def test_size_mismatch(self):
        state = DenseState.maximally_mixed(2)
        with pytest.raises(DimensionError):
            correlator(state, "xxx", LocalFrame.aligned(2))
        with pytest.raises(DimensionError):
            correlator(state, "xx", LocalFrame.aligned(3))


class TestRing:
    @pytest.mark.parametrize("n", [3, 4, 5])
    @pytest.mark.parametrize("beta", [0.0, 1.0, np.inf])
    def test_embedding_is_a_density_matrix(self, n, beta):
        dense = RingExcitationState(n, beta).to_dense()
        assert np.trace(dense.matrix).real == pytest.approx(1)

    @pytest.mark.parametrize("n", [3, 4, 5])
    def test_table_matches_dense(self, n, rng):
        ring = RingExcitationState(n, 1.3)
        frame = LocalFrame.from_angles(rng.uniform(0, 2 * np.pi, (n, 3)))
        np.testing.assert_allclose(
            full_xy_table(ring, frame).values, full_xy_table(ring.to_dense(), frame).values, atol=1e-12
        )

    @pytest.mark.parametrize("n", range(3, 9))
    @pytest.mark.parametrize("beta", [0.0, 0.1, 1.0, 10.0])
    def test_all_z_correlator(self, n, beta):
        frame = LocalFrame.from_tags(["+Z+X"] * n)
        assert correlator(RingExcitationState(n, beta), "x" * n, frame) == pytest.approx(-1.0, abs=1e-12)

    def test_fidelity_at_beta_one(self):
        # 1/2 - <E>/4 with <E> the thermal band energy
        ring = RingExcitationState(4, 1.0)
        expected = 0.5 - np.dot(ring.weights, ring.energies) / 4
        assert singlet_fidelity(ring) == pytest.approx(expected, abs=1e-12)
        assert singlet_fidelity(ring) == pytest.approx(0.880797, abs=1e-6)

    def test_fidelity_limits(self):
        assert singlet_fidelity(RingExcitationState(4, 0.0)) == pytest.approx(0.5)
        assert singlet_fidelity(RingExcitationState(4, 50.0)) == pytest.approx(1.0, abs=1e-6)

    def test_postselected_pair_is_normalised(self):
        block = postselect_pair(RingExcitationState(5, 2.0), 4)
        assert np.trace(block).real == pytest.approx(1)
        np.testing.assert_allclose(block, block.conj().T)

    def test_rejects_small_rings(self):
        with pytest.raises(ValueError):
            RingExcitationState(2, 1.0)
