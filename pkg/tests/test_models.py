import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ghz_witness import oracle
from ghz_witness.errors import ModelError, NoRootError
from ghz_witness.frames import LocalFrame
from ghz_witness.models import (
    ClusterShape,
    cluster_closed_form,
    cluster_generators,
    cluster_limit_value,
    cluster_state,
    critical_beta,
    ghz_closed_form,
    ghz_critical_scaling,
    ghz_generators,
    ghz_state,
    parse_model,
    scaling_exponent,
)
from ghz_witness.optimize import clifford_prescan
from ghz_witness.pauli import check_commuting, group_table
from ghz_witness.witness import w_a_fixed_frame, w_b_fixed_frame

BETAS = [0.2, 0.5, 1.0, 2.0, 5.0]
# Clifford frames at which the product formula is attained on chains with N % 3 != 0
FORMULA_FRAMES = {
    4: "+X+Y +X+Z +X+Z +X+Y",
    5: "+X+Y +X+Z +X+Z +X+Y +Z+Y",
    7: "+X+Y +X+Z +X+Z +X+Y +X+Z +X+Z +X+Y",
}


def cubic_root(coeffs):
    roots = np.roots(coeffs)
    return float(next(r.real for r in roots if abs(r.imag) < 1e-12 and 0 < r.real < 1))


def min_full_support_subset(n):
    codes, _, sizes = group_table(cluster_generators(n))
    full = np.all(codes != 0, axis=1)
    return int(sizes[full].min())


class TestGenerators:
    @pytest.mark.parametrize("family", [ghz_generators, cluster_generators])
    @pytest.mark.parametrize("n", [2, 3, 6])
    def test_commuting(self, family, n):
        gens = family(n)
        assert len(gens) == n
        check_commuting(gens)

    def test_ghz_ground_state(self):
        rho = oracle.thermal_stabilizer_matrix([str(g) for g in ghz_generators(3)], 60.0)
        ghz = oracle.ghz_vector(0, 3, 1)
        assert ghz @ rho @ ghz == pytest.approx(1.0)

    def test_too_small(self):
        with pytest.raises(ModelError):
            ghz_generators(1)


class TestClusterShape:
    @pytest.mark.parametrize("n, m, r", [(3, 1, 0), (4, 0, 2), (5, 1, 1), (6, 2, 0), (7, 1, 2), (8, 2, 1), (10, 2, 2)])
    def test_decomposition(self, n, m, r):
        shape = ClusterShape.of(n)
        assert (shape.m, shape.r) == (m, r)
        assert 3 * m + 2 * r == n

    @pytest.mark.parametrize("n", range(3, 15))
    def test_minimal_product_size(self, n):
        assert min_full_support_subset(n) == ClusterShape.of(n).min_product_size

    def test_two_site_chain_rejected(self):
        with pytest.raises(ModelError):
            cluster_closed_form(2, 1.0)


class TestClosedForms:
    @pytest.mark.parametrize("n", range(3, 9))
    @pytest.mark.parametrize("beta", BETAS)
    def test_ghz_equals_prescan(self, n, beta):
        state = ghz_state(n, beta)
        for kind, value in (("wa", clifford_prescan(state, "wa").value_wa), ("wb", clifford_prescan(state, "wb").value_wb)):
            assert value == pytest.approx(ghz_closed_form(n, beta, kind), abs=1e-10)

    @pytest.mark.parametrize("n", [3, 6, 9])
    @pytest.mark.parametrize("beta", BETAS)
    def test_cluster_equals_prescan_when_n_divisible_by_three(self, n, beta):
        state = cluster_state(n, beta)
        assert clifford_prescan(state, "wa").value_wa == pytest.approx(cluster_closed_form(n, beta, "wa"), abs=1e-10)
        assert clifford_prescan(state, "wb").value_wb == pytest.approx(cluster_closed_form(n, beta, "wb"), abs=1e-10)

    @pytest.mark.parametrize("n", sorted(FORMULA_FRAMES))
    @pytest.mark.parametrize("beta", BETAS)
    def test_cluster_formula_attained_otherwise(self, n, beta):
        state = cluster_state(n, beta)
        frame = LocalFrame.from_tags(FORMULA_FRAMES[n].split())
        assert w_a_fixed_frame(state, frame) == pytest.approx(cluster_closed_form(n, beta, "wa"), abs=1e-12)
        assert w_b_fixed_frame(state, frame) == pytest.approx(cluster_closed_form(n, beta, "wb"), abs=1e-12)
        # a better Clifford frame exists on these chains
        assert clifford_prescan(state, "wa").value_wa > cluster_closed_form(n, beta, "wa")

    @pytest.mark.parametrize("n", [3, 4, 5])
    def test_ghz_against_expm(self, n):
        gens = [str(g) for g in ghz_generators(n)]
        us = LocalFrame.aligned(n).unitaries()
        for beta in BETAS:
            rho = oracle.thermal_stabilizer_matrix(gens, beta)
            assert oracle.explicit_w_a(rho, us) == pytest.approx(ghz_closed_form(n, beta, "wa"), abs=1e-10)

    def test_cluster_seven_value(self):
        t = math.tanh(1.0)
        assert cluster_closed_form(7, 2.0, "wa") == pytest.approx(t**3 * (1 + t**2) ** 2, abs=1e-12)
        assert cluster_closed_form(7, 2.0, "wa") == pytest.approx(1.1028, abs=1e-4)

    @pytest.mark.parametrize("n, limit", [(5, 16), (7, 4), (6, 8)])
    def test_saturation(self, n, limit):
        value = ghz_closed_form(n, np.inf) if n == 5 else cluster_closed_form(n, np.inf)
        assert value == pytest.approx(limit)

    @given(st.integers(3, 12), st.floats(0.0, 20.0), st.floats(0.0, 20.0))
    @settings(max_examples=80, deadline=None)
    def test_monotone_in_beta(self, n, b1, b2):
        lo, hi = sorted((b1, b2))
        for kind in ("wa", "wb"):
            assert ghz_closed_form(n, lo, kind) <= ghz_closed_form(n, hi, kind) + 1e-15
            assert cluster_closed_form(n, lo, kind) <= cluster_closed_form(n, hi, kind) + 1e-15

    def test_limit_factorisation(self):
        u = math.tanh(0.8)
        for n in (9, 12, 15):
            shape = ClusterShape.of(n)
            ratio = cluster_closed_form(n, 1.6) / cluster_limit_value(1.6) ** (shape.m + shape.r)
            assert ratio == pytest.approx((1 + u) ** 2 / (1 + u**2))


class TestCriticalBeta:
    def test_cluster_limit(self):
        u = cubic_root([1, 0, 1, -1])
        assert critical_beta("cluster-limit", "wa") == pytest.approx(2 * math.atanh(u), abs=1e-8)
        assert critical_beta("cluster-limit", "wb") == pytest.approx(2 * math.atanh(math.sqrt(u)), abs=1e-8)
        assert critical_beta("cluster-limit", "wa") == pytest.approx(1.667, abs=0.005)
        assert critical_beta("cluster-limit", "wb") == pytest.approx(2.351, abs=0.005)

    def test_ghz_three(self):
        t = cubic_root([1, 2, 1, -1])
        assert critical_beta("ghz:3", "wa") == pytest.approx(2 * math.atanh(t), abs=1e-8)
        assert critical_beta("ghz:3", "wa") == pytest.approx(1.00880, abs=1e-5)

    @pytest.mark.parametrize("n", [3, 5, 10, 30])
    def test_kind_relation(self, n):
        ta = math.tanh(critical_beta(f"ghz:{n}", "wa") / 2)
        tb = math.tanh(critical_beta(f"ghz:{n}", "wb") / 2)
        assert ta == pytest.approx(tb**2, abs=1e-8)

    @pytest.mark.parametrize(
        "model, threshold",
        [(m, th) for m in ("ghz:4", "cluster:6", "cluster:7") for th in (0.5, 1.0, 2.0)]
        + [("cluster-limit", 0.5), ("cluster-limit", 1.0)],
    )
    def test_inverts_closed_form(self, model, threshold):
        m = parse_model(model)
        beta = critical_beta(m, "wa", threshold)
        assert m.value(beta, "wa") == pytest.approx(threshold, abs=1e-8)

    def test_unreachable(self):
        with pytest.raises(NoRootError):
            critical_beta("cluster:7", "wa", threshold=5.0)
        with pytest.raises(NoRootError):
            critical_beta("cluster-limit", "wa", threshold=2.0)

    def test_bad_threshold(self):
        with pytest.raises(ValueError):
            critical_beta("ghz:3", "wa", threshold=0.0)

    def test_scaling_decreases(self):
        points = ghz_critical_scaling(range(3, 65))
        betas = [b for _, b in points]
        assert all(a > b for a, b in zip(betas, betas[1:]))
        assert betas[-1] < 0.3
        assert scaling_exponent(points) < 0


class TestParseModel:
    @pytest.mark.parametrize("spec", ["ghz", "ghz:x", "torus:3", "ghz:1", "cluster:2"])
    def test_rejects(self, spec):
        with pytest.raises(ValueError):
            parse_model(spec)

    def test_names(self):
        assert parse_model(" GHZ:5 ").name == "ghz:5"
        assert parse_model("cluster-limit").value(np.inf, "wa") == 2.0
