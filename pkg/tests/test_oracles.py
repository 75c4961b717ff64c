import math

import numpy as np
import pytest

from ldplab.accounting import kl_level
from ldplab.bounds import (
    assouad_testing_bound,
    bernoulli_pair,
    braverman_hellinger_bound,
    info_budget_full_interactive,
    sdpi_bernoulli_pair,
    sdpi_bounded_likelihood,
)
from ldplab.channels import DiscreteChannel, random_pure_dp_channel
from ldplab.oracles import (
    FiniteJoint,
    binary_joint,
    conditional_mutual_information,
    coordinate_marginals,
    exact_assouad_testing_risk,
    exact_divergences,
    exact_mutual_information,
    hypercube_joint,
    info_decomposition_check,
    mutual_information,
    pipeline_marginal,
    random_sequential_pipeline,
    sdpi_constant_search,
)


class TestMutualInformation:
    def test_binary_symmetric_channel(self):
        pxy = 0.5 * np.array([[0.75, 0.25], [0.25, 0.75]])
        assert mutual_information(pxy) == pytest.approx(0.13081203594113696, rel=1e-13)

    def test_independent(self):
        assert mutual_information(np.outer([0.3, 0.7], [0.1, 0.9])) == pytest.approx(0.0, abs=1e-15)

    def test_conditional_chain_rule(self):
        gen = np.random.default_rng(0)
        p = gen.random((2, 3, 2))
        p /= p.sum()
        # I(A; B, C) = I(A; C) + I(A; B | C)
        lhs = conditional_mutual_information(p, (0,), (1, 2))
        rhs = conditional_mutual_information(p, (0,), (2,)) + conditional_mutual_information(p, (0,), (1,), (2,))
        assert lhs == pytest.approx(rhs, abs=1e-14)

    def test_single_sample_rr(self):
        joint = FiniteJoint.build([1.0], [[0.5, 0.5]], 1, DiscreteChannel.randomized_response(1.0))
        # uniform input through RR(1): I = log 2 - h(e / (1 + e))
        pi = math.e / (1 + math.e)
        expected = math.log(2) + pi * math.log(pi) + (1 - pi) * math.log(1 - pi)
        assert exact_mutual_information(joint, "X;Z") == pytest.approx(expected, rel=1e-13)

    def test_queries(self):
        joint = binary_joint(*bernoulli_pair(0.5), 2, DiscreteChannel.randomized_response(1.0))
        i_xz_v = exact_mutual_information(joint, "X;Z|V")
        i_vz = exact_mutual_information(joint, "V;Z")
        i_xz = exact_mutual_information(joint, "X;Z")
        # V - X - Z is a Markov chain, so I(X;Z) = I(V;Z) + I(X;Z|V)
        assert i_xz == pytest.approx(i_vz + i_xz_v, abs=1e-14)
        per_v = [exact_mutual_information(joint, "X;Z", given_v=v) for v in (0, 1)]
        assert i_xz_v == pytest.approx(np.mean(per_v), abs=1e-14)
        with pytest.raises(ValueError):
            exact_mutual_information(joint, "Z;Z")
        with pytest.raises(ValueError):
            exact_mutual_information(joint, "V;Z", given_v=0)


class TestFiniteJoint:
    def test_tensor_normalized(self):
        joint = binary_joint(*bernoulli_pair(0.3), 3, DiscreteChannel.randomized_response(0.5))
        assert joint.tensor().sum() == pytest.approx(1.0, abs=1e-14)
        assert joint.tensor().shape == (2,) + (2,) * 3 + (2,) * 3

    def test_adaptive_channel(self):
        rr = DiscreteChannel.randomized_response(1.0).probs
        joint = FiniteJoint.build([0.5, 0.5], [[0.5, 0.5], [0.2, 0.8]], 2, [rr, lambda prev: rr if prev[0] == 0 else rr[::-1]])
        assert joint.kernels[1].shape == (2, 2, 2)
        np.testing.assert_allclose(joint.kernels[1][1], rr[::-1])

    def test_atom_limit(self):
        with pytest.raises(ValueError):
            binary_joint([0.5, 0.5], [0.4, 0.6], 11, np.full((2, 4), 0.25))

    def test_validation(self):
        with pytest.raises(ValueError):
            FiniteJoint.build([0.5, 0.6], [[0.5, 0.5], [0.5, 0.5]], 1, np.eye(2))
        with pytest.raises(ValueError):
            FiniteJoint.build([1.0], [[0.5, 0.5]], 1, np.eye(3))

    def test_marginal_rows(self):
        joint = binary_joint(*bernoulli_pair(0.3), 2, DiscreteChannel.randomized_response(0.5))
        m = pipeline_marginal(joint)
        assert m.shape == (2, 4)
        np.testing.assert_allclose(m.sum(axis=1), 1.0)


class TestDivergences:
    def test_kl_oracle(self):
        res = exact_divergences([0.75, 0.25], [0.25, 0.75])
        assert res.kl == pytest.approx(0.54930614433405485, rel=1e-13)
        assert res.tv == pytest.approx(0.5)

    def test_rr_kl_matches_kl_level(self):
        ch = DiscreteChannel.randomized_response(1.0).probs
        res = exact_divergences(ch[0], ch[1])
        assert res.kl == pytest.approx(0.46211715726000976, rel=1e-13)
        assert res.kl <= kl_level(1.0)

    def test_pinsker_and_hellinger_sandwich(self):
        gen = np.random.default_rng(1)
        for _ in range(500):
            k = int(gen.integers(2, 8))
            p, q = gen.dirichlet(np.ones(k)), gen.dirichlet(np.ones(k))
            res = exact_divergences(p, q)
            assert res.tv <= math.sqrt(res.kl / 2) + 1e-12
            assert res.hellinger_sq <= res.tv + 1e-12
            assert res.tv <= math.sqrt(2 * res.hellinger_sq) + 1e-12

    def test_renyi_monotone_in_order(self):
        gen = np.random.default_rng(2)
        for _ in range(200):
            p, q = gen.dirichlet(np.ones(4)), gen.dirichlet(np.ones(4))
            vals = [exact_divergences(p, q, a).renyi for a in (1.0, 1.5, 2.0, 5.0, math.inf)]
            assert all(a <= b + 1e-12 for a, b in zip(vals, vals[1:]))

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            exact_divergences([1.0], [0.5, 0.5])


class TestSdpi:
    def test_bounded_likelihood_dominates_search(self):
        gen = np.random.default_rng(3)
        checked = 0
        while checked < 1000:
            k = int(gen.integers(2, 5))
            p_minus = gen.dirichlet(np.ones(k))
            tilt = gen.uniform(-1, 1, k)
            p_plus = p_minus * np.exp(tilt)
            p_plus /= p_plus.sum()
            b = float(np.max(np.abs(np.log(p_plus / p_minus))))
            if b > 1.0:
                continue
            w = gen.dirichlet(np.ones(int(gen.integers(2, 5))), size=k)
            px_v = np.vstack([p_minus, p_plus])
            pvxz = 0.5 * px_v[:, :, None] * w[None, :, :]
            i_vz = conditional_mutual_information(pvxz, (0,), (2,))
            i_xz = conditional_mutual_information(pvxz, (1,), (2,))
            assert i_vz <= sdpi_bounded_likelihood(b).beta * i_xz + 1e-12
            checked += 1

    @pytest.mark.parametrize("delta", [0.1, 0.2, 0.5])
    def test_search_below_pair_bound(self, delta):
        found = sdpi_constant_search(*bernoulli_pair(delta), 4, 300, np.random.default_rng(4))
        assert 0 < found <= sdpi_bernoulli_pair(delta).beta

    def test_search_rejects_large_alphabet(self):
        with pytest.raises(ValueError):
            sdpi_constant_search(np.full(9, 1 / 9), np.full(9, 1 / 9), 2, 1, 0)


class TestAssouadExact:
    @pytest.mark.parametrize(
        "eps,expected",
        [(0.25, 0.48445587477855047), (0.5, 0.46938516719953636), (1.0, 0.44223535534249878)],
    )
    def test_single_coordinate_oracle(self, eps, expected):
        joint = binary_joint(*bernoulli_pair(0.5), 1, DiscreteChannel.randomized_response(eps))
        m = pipeline_marginal(joint)
        risk = exact_assouad_testing_risk(m[1], m[0])
        assert risk == pytest.approx(expected, rel=1e-13)
        bound = assouad_testing_bound(1, sdpi_bernoulli_pair(0.5), info_budget_full_interactive(1, kl_level(eps)))
        assert risk >= bound

    def test_hypercube_risk_dominates_bound(self):
        d, n, eps, delta = 2, 2, 0.5, 0.2
        joint = hypercube_joint(d, *bernoulli_pair(delta), n, np.kron(*[DiscreteChannel.randomized_response(eps).probs] * 2))
        plus, minus = coordinate_marginals(joint, d)
        risk = exact_assouad_testing_risk(plus, minus)
        # the product channel spends eps per coordinate, 2 eps per sample
        bound = assouad_testing_bound(d, sdpi_bernoulli_pair(delta), info_budget_full_interactive(n, kl_level(2 * eps)))
        assert risk >= bound
        assert risk <= d / 2


class TestInformationBudget:
    def test_full_interactive_budget_on_random_pipelines(self):
        gen = np.random.default_rng(5)
        for _ in range(40):
            n = int(gen.integers(1, 4))
            eps = float(gen.choice([0.25, 0.5, 1.0, 2.0]))
            chans = random_sequential_pipeline(n, eps, gen, max_outputs=3 if n < 3 else 2)
            pair = bernoulli_pair(float(gen.uniform(0.05, 0.9)))
            joint = binary_joint(*pair, n, chans)
            info = exact_mutual_information(joint, "X;Z|V")
            assert info <= info_budget_full_interactive(n, kl_level(eps)) + 1e-12

    def test_random_pure_dp_channel_level(self):
        from ldplab.channels import audit_pure_dp

        ch = random_pure_dp_channel(3, 4, 0.7, np.random.default_rng(6))
        assert audit_pure_dp(ch) <= 0.7 + 1e-12


class TestBraverman:
    def test_hellinger_dominated(self):
        gen = np.random.default_rng(7)
        for _ in range(30):
            n = int(gen.integers(1, 3))
            pair = bernoulli_pair(float(gen.uniform(0.05, 0.6)))
            chans = random_sequential_pipeline(n, float(gen.uniform(0.2, 2)), gen)
            joint = binary_joint(*pair, n, chans)
            m = pipeline_marginal(joint)
            h2 = exact_divergences(m[0], m[1]).hellinger_sq
            b = float(np.max(np.abs(np.log(pair[1] / pair[0]))))
            info = min(exact_mutual_information(joint, "X;Z", given_v=v) for v in (0, 1))
            assert h2 <= braverman_hellinger_bound(sdpi_bounded_likelihood(b), info) + 1e-12


class TestDecomposition:
    def test_random_product_channels(self):
        gen = np.random.default_rng(8)
        for d, n in [(1, 1), (2, 1), (2, 2), (3, 1)]:
            for _ in range(5):
                w = gen.dirichlet(np.ones(4), size=2**d)
                joint = hypercube_joint(d, *bernoulli_pair(float(gen.uniform(0.1, 0.9))), n, w)
                assert info_decomposition_check(joint, d)

    def test_parity_channel_is_strict(self):
        # releasing only the parity of two coordinates reveals nothing about each one alone
        parity = np.zeros((4, 2))
        for x in range(4):
            parity[x, bin(x).count("1") % 2] = 1.0
        joint = hypercube_joint(2, *bernoulli_pair(0.0), 1, parity)
        res = info_decomposition_check(joint, 2)
        assert res.per_coordinate_sum == pytest.approx(0.0, abs=1e-14)
        assert res.total == pytest.approx(math.log(2), rel=1e-12)
        assert res.gap > 0.5

    def test_identity_channel_is_tight(self):
        joint = hypercube_joint(2, *bernoulli_pair(0.4), 1, np.eye(4))
        res = info_decomposition_check(joint, 2)
        assert res.per_coordinate_sum == pytest.approx(res.total, abs=1e-12)

    def test_bad_alphabet(self):
        joint = binary_joint([0.5, 0.5], [0.4, 0.6], 1, np.eye(2))
        with pytest.raises(ValueError):
            info_decomposition_check(joint, 3)
