import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import entropy_direct, kl_direct, mutual_information_direct
from swexp.extreal import ExtReal
from swexp.info_core import (
    Channel,
    Distribution,
    JointSource,
    TypeDescriptor,
    cond_kl_divergence,
    entropy,
    enumerate_types,
    kl_divergence,
    load_source,
    log_type_class_size,
    mutual_information,
    type_class_log_prob,
    type_class_size,
)

LN2 = math.log(2.0)


def probs(draw_list):
    v = np.asarray(draw_list, dtype=float) + 1e-9
    return Distribution(v / v.sum())


distributions = st.lists(st.floats(0.01, 1.0), min_size=2, max_size=5).map(probs)


class TestConstruction:
    def test_renormalizes_within_tolerance(self):
        d = Distribution([0.5 + 4e-13, 0.5])
        assert abs(float(d.probs.sum()) - 1.0) < 1e-15

    def test_rejects_outside_tolerance(self):
        with pytest.raises(ValueError):
            Distribution([0.5, 0.6])

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            Distribution([-0.1, 1.1])

    def test_positive_marginal_rejects_zero(self):
        with pytest.raises(ValueError):
            Distribution([0.0, 1.0], require_positive=True)

    def test_channel_rows_stochastic(self):
        with pytest.raises(ValueError):
            Channel([[0.7, 0.2], [0.5, 0.5]])

    def test_joint_requires_positive_marginals(self):
        with pytest.raises(ValueError):
            JointSource([[0.5, 0.5], [0.0, 0.0]])

    def test_joint_rejects_degenerate_conditional(self):
        # X a deterministic function of Y: H(X|Y) = 0
        with pytest.raises(ValueError):
            JointSource([[0.5, 0.0], [0.0, 0.5]])

    def test_joint_derivations_consistent(self):
        src = JointSource([[0.4, 0.1], [0.2, 0.3]])
        recon = src.marginal_x.probs[:, None] * src.forward.rows
        assert np.abs(recon - src.joint).max() < 1e-12
        recon_b = src.marginal_y.probs[None, :] * src.backward.rows.T
        assert np.abs(recon_b - src.joint).max() < 1e-12

    def test_json_contract(self):
        doc = {"alphabet_x": 2, "alphabet_y": 2, "joint": [[0.4, 0.1], [0.2, 0.3]]}
        src = load_source(doc)
        assert src.alphabet_x == 2 and src.alphabet_y == 2
        with pytest.raises(ValueError):
            load_source({"alphabet_x": 2, "joint": [[1.0]]})
        with pytest.raises(ValueError):
            load_source({"alphabet_x": 3, "alphabet_y": 2, "joint": [[0.4, 0.1], [0.2, 0.3]]})
        json.dumps(doc)  # the schema is plain JSON


class TestMeasures:
    def test_entropy_uniform(self):
        assert abs(entropy(Distribution([0.5, 0.5])) - LN2) < 1e-15

    def test_entropy_point_mass(self):
        assert entropy(Distribution.point_mass(3, 1)) == 0.0

    def test_entropy_binary_005(self):
        # direct evaluation of -p ln p - (1-p) ln(1-p) at p = 0.05
        assert abs(entropy(Distribution([0.05, 0.95])) - 0.19851524334587258) < 1e-15
        assert abs(entropy(Distribution([0.05, 0.95])) - entropy_direct([0.05, 0.95])) < 1e-15

    def test_mutual_information_identical_rows(self):
        q = Distribution([0.3, 0.7])
        w = Channel([[0.2, 0.8], [0.2, 0.8]])
        assert abs(mutual_information(q, w)) < 1e-15

    def test_mutual_information_noiseless(self):
        assert abs(mutual_information(Distribution([0.5, 0.5]), Channel([[1, 0], [0, 1]])) - LN2) < 1e-15

    def test_mutual_information_bsc(self, uniform2, bsc05):
        expect = LN2 - 0.19851524334587258
        assert abs(mutual_information(uniform2, bsc05) - expect) < 1e-12
        assert abs(expect - 0.4946319372140727) < 1e-15

    def test_mutual_information_dimension_mismatch(self, bsc05):
        with pytest.raises(ValueError):
            mutual_information(Distribution([0.2, 0.3, 0.5]), bsc05)

    def test_kl_identity(self):
        d = Distribution([0.3, 0.7])
        assert float(kl_divergence(d, d)) == 0.0

    def test_kl_support_violation(self):
        assert not kl_divergence(Distribution([1.0, 0.0]), Distribution([0.0, 1.0])).finite

    def test_kl_binary_value(self):
        got = kl_divergence(Distribution([0.5, 0.5]), Distribution([0.05, 0.95]))
        assert abs(float(got) - 0.8303656034108254) < 1e-12
        assert abs(float(got) - kl_direct([0.5, 0.5], [0.05, 0.95])) < 1e-15

    def test_cond_kl_zero_and_infinite(self, uniform2, bsc05):
        assert float(cond_kl_divergence(bsc05, bsc05, uniform2)) == 0.0
        v = Channel([[0.5, 0.5], [0.5, 0.5]])
        w = Channel([[1.0, 0.0], [0.0, 1.0]])
        assert not cond_kl_divergence(v, w, uniform2).finite

    def test_cond_kl_matches_row_composition(self, uniform2, bsc05):
        v = Channel([[0.9, 0.1], [0.2, 0.8]])
        per_row = 0.5 * kl_direct([0.9, 0.1], [0.95, 0.05]) + 0.5 * kl_direct([0.2, 0.8], [0.05, 0.95])
        assert abs(float(cond_kl_divergence(v, bsc05, uniform2)) - per_row) < 1e-14

    def test_cond_kl_ignores_zero_weight_rows(self, bsc05):
        v = Channel([[0.0, 1.0], [0.05, 0.95]])
        q = Distribution([0.0, 1.0])
        assert float(cond_kl_divergence(v, bsc05, q)) == 0.0

    @given(distributions, distributions)
    @settings(max_examples=60, deadline=None)
    def test_kl_nonnegative_zero_iff_equal(self, q, p):
        if q.alphabet_size != p.alphabet_size:
            return
        d = kl_divergence(q, p)
        assert float(d) >= 0.0
        if np.abs(q.probs - p.probs).max() < 1e-12:
            assert float(d) < 1e-10
        elif np.abs(q.probs - p.probs).max() > 1e-4:
            assert float(d) > 0.0

    @given(st.integers(2, 4), st.integers(2, 4), st.integers(0, 10_000))
    @settings(max_examples=40, deadline=None)
    def test_chain_identity(self, kx, ky, seed):
        rng = np.random.default_rng(seed)
        q = rng.dirichlet(np.ones(kx))
        w = rng.dirichlet(np.ones(ky), size=kx)
        lhs = mutual_information(Distribution(q), Channel(w))
        out = q @ w
        rhs = entropy_direct(out) - sum(q[x] * entropy_direct(w[x]) for x in range(kx))
        assert abs(lhs - rhs) < 1e-12


class TestTypes:
    def test_binary_n4_enumeration(self):
        types = enumerate_types(4, 2)
        assert len(types) == 5
        assert sorted(t.counts for t in types) == [(0, 4), (1, 3), (2, 2), (3, 1), (4, 0)]

    def test_class_size_exact(self):
        assert type_class_size(TypeDescriptor((2, 2), 4)) == 6
        assert type_class_size(TypeDescriptor((1, 2, 3), 6)) == 60

    def test_log_size_matches_exact(self):
        for t in enumerate_types(10, 3):
            assert abs(log_type_class_size(t) - math.log(type_class_size(t))) < 1e-10

    @pytest.mark.parametrize("k", [2, 3])
    def test_class_size_entropy_bounds(self, k):
        # (n+1)^{-k} e^{nH} <= |class| <= e^{nH}, exhaustively for n <= 12
        for n in range(1, 13):
            for t in enumerate_types(n, k):
                h = entropy(t.distribution())
                size = type_class_size(t)
                assert size <= math.exp(n * h) * (1 + 1e-9)
                assert size >= math.exp(n * h) / (n + 1) ** k * (1 - 1e-9)

    @pytest.mark.parametrize("k,p", [(2, [0.3, 0.7]), (3, [0.2, 0.5, 0.3])])
    def test_total_probability_identity(self, k, p):
        dist = Distribution(p)
        for n in (1, 4, 8, 12):
            total = sum(
                type_class_size(t) * math.exp(type_class_log_prob(t, dist))
                for t in enumerate_types(n, k)
            )
            assert abs(total - 1.0) < 1e-9

    def test_log_prob_support_violation(self):
        t = TypeDescriptor((2, 2), 4)
        assert type_class_log_prob(t, Distribution([1.0, 0.0])) == -math.inf

    def test_invalid_type_rejected(self):
        with pytest.raises(ValueError):
            TypeDescriptor((2, 3), 4)


class TestExtReal:
    def test_ordering_total(self):
        vals = [ExtReal.of(0.0), ExtReal.of(1.5), ExtReal.infinity()]
        assert vals[0] < vals[1] < vals[2]
        assert ExtReal.infinity() == ExtReal.infinity()
        assert ExtReal.of(2.0) > 1.0
        assert max(vals) == ExtReal.infinity()

    def test_arithmetic(self):
        assert float(ExtReal.of(1.0) + 2.0) == 3.0
        assert not (ExtReal.infinity() + 5.0).finite
        assert float(ExtReal.infinity()) == math.inf

    def test_rejects_negative_or_nan(self):
        with pytest.raises(ValueError):
            ExtReal.of(-1.0)
        with pytest.raises(ValueError):
            ExtReal(finite=True, value=math.nan)
