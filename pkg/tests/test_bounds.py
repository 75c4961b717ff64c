import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ldplab.bounds import (
    LowerBoundReport,
    SdpiEstimate,
    SeparationSpec,
    assouad_minimax_bound,
    assouad_testing_bound,
    bernoulli_instantiated,
    bernoulli_pair,
    binary_entropy,
    braverman_hellinger_bound,
    corollary_bernoulli_bound,
    corollary_gaussian_bound,
    corollary_logistic_bound,
    corollary_sparse_gaussian_bound,
    info_bound_eta,
    info_budget_approx_dp,
    info_budget_full_interactive,
    sdpi_bernoulli_pair,
    sdpi_bounded_likelihood,
)


class TestSdpi:
    def test_bounded_likelihood_value(self):
        est = sdpi_bounded_likelihood(0.1)
        assert est.beta == pytest.approx(0.022121844017749169, rel=1e-13)
        assert est.llr_bound == 0.1

    def test_clamped(self):
        assert sdpi_bounded_likelihood(2.0).beta == 1.0

    def test_zero(self):
        est = sdpi_bounded_likelihood(0.0)
        assert est.beta == 0.0

    def test_bernoulli_pair(self):
        est = sdpi_bernoulli_pair(0.1)
        assert est.beta == pytest.approx(0.02 / 0.81, rel=1e-14)
        assert est.llr_bound == pytest.approx(0.10536051565782630, rel=1e-14)

    def test_pair_llr_is_tight(self):
        p, q = bernoulli_pair(0.3)
        assert np.max(np.abs(np.log(q / p))) == pytest.approx(sdpi_bernoulli_pair(0.3).llr_bound, rel=1e-12)

    def test_invariants(self):
        with pytest.raises(ValueError):
            SdpiEstimate(1.5, 0.1)
        with pytest.raises(ValueError):
            SdpiEstimate(0.1, 0.0)
        with pytest.raises(ValueError):
            sdpi_bernoulli_pair(1.0)


class TestAssouad:
    def test_zero_info_gives_half_d(self):
        assert assouad_testing_bound(8, sdpi_bounded_likelihood(0.5), 0.0) == 4.0

    def test_floor_at_zero(self):
        assert assouad_testing_bound(2, sdpi_bounded_likelihood(0.5), 1e6) == 0.0

    def test_formula(self):
        s = sdpi_bernoulli_pair(0.2)
        expected = 5.0 * (1 - math.sqrt(7 * (math.exp(s.llr_bound) + 1) * s.beta * 3.0 / 10) - 0.1)
        assert assouad_testing_bound(10, s, 3.0, slack=0.1) == pytest.approx(expected, rel=1e-14)

    @given(st.integers(1, 1000), st.floats(0, 3), st.floats(0, 1e4))
    def test_range(self, d, b, info):
        t = assouad_testing_bound(d, sdpi_bounded_likelihood(b), info)
        assert 0.0 <= t <= d / 2

    def test_minimax(self):
        assert assouad_minimax_bound(SeparationSpec(0.25, 4), 2.0) == 0.5
        with pytest.raises(ValueError):
            assouad_minimax_bound(SeparationSpec(0.25, 4), 5.0)
        with pytest.raises(ValueError):
            SeparationSpec(0.0, 4)


class TestBudgets:
    def test_full_interactive(self):
        assert info_budget_full_interactive(100, 0.25) == 25.0

    def test_approx_dp_branches(self):
        assert info_budget_approx_dp(10, 0.1) == pytest.approx(10 * 0.75)
        assert info_budget_approx_dp(10, 0.01) == pytest.approx(10 * 75e-4)

    def test_binary_entropy(self):
        assert binary_entropy(0.5) == pytest.approx(math.log(2))
        assert binary_entropy(0.0) == 0.0


class TestEta:
    def test_oracle(self):
        # precomputed in extended precision
        eps, delta = 0.1, 1e-8
        res = info_bound_eta(eps, delta, math.sqrt(delta * eps), 2)
        assert res.p_eta == pytest.approx(8.766857581448090e-4, rel=1e-12)
        assert res.first == pytest.approx(0.60765528198136607, rel=1e-12)
        assert res.second == pytest.approx(0.50105486519009922, rel=1e-12)
        assert res.best == res.second

    def test_second_display_needs_small_eta(self):
        # 0.05 * (2 e^0.6 / (e^0.3 - 1) + 1) ~ 0.57 > 1/2
        res = info_bound_eta(0.1, 1e-8, 0.05, 2)
        assert res.second is None and res.first is not None

    def test_unavailable_when_p_exceeds_one(self):
        res = info_bound_eta(0.1, 0.5, 0.01, 2)
        assert res.first is None and res.best is None


class TestBraverman:
    def test_value_and_clamp(self):
        s = sdpi_bounded_likelihood(0.1)
        assert braverman_hellinger_bound(s, 1.0) == pytest.approx(3.5 * (math.exp(0.1) + 1) * s.beta)
        assert braverman_hellinger_bound(s, 1e6) == 1.0


def _dense_grid_oracle(n, d, eps_kl, loss):
    # independent evaluation on a fine grid, written out from the closed forms
    g = np.linspace(1e-7, 1 - 1e-7, 400_001)
    beta = np.minimum(2 * g**2 / (1 - g) ** 2, 1.0)
    b = -np.log1p(-g)
    t = np.maximum(0.5 * d * (1 - np.sqrt(7 * (np.exp(b) + 1) * beta * n * eps_kl / d)), 0.0)
    sep = (g / 4) ** 2 if loss == "squared" else g / 4
    return float(np.max(sep * t))


class TestBernoulliCorollary:
    @pytest.mark.parametrize("n,d,eps_kl", [(100, 4, 1.0), (10_000, 16, 0.5), (50, 8, 2.0)])
    @pytest.mark.parametrize("loss", ["squared", "absolute"])
    def test_instantiated_matches_grid(self, n, d, eps_kl, loss):
        _, val = bernoulli_instantiated(n, d, eps_kl, loss)
        ref = _dense_grid_oracle(n, d, eps_kl, loss)
        assert val >= ref * (1 - 1e-9)
        assert val == pytest.approx(ref, rel=1e-4)

    def test_scaling_form(self):
        r = corollary_bernoulli_bound(10_000, 16, 1.0)
        assert r.risk_bound == pytest.approx(16 * 16 / 10_000)
        assert corollary_bernoulli_bound(1, 16, 1.0).risk_bound == 16.0
        assert corollary_bernoulli_bound(10_000, 16, 1.0, "absolute").risk_bound == pytest.approx(16 * 0.04)

    def test_substitution_keeps_constant_ratio(self):
        # optimizing the gap recovers the d * loss(sqrt(d / (n eps))) rate up to a fixed constant
        ratios = []
        for n, d, eps in [(10_000, 4, 1.0), (100_000, 16, 0.5), (1_000_000, 64, 1.0), (10**8, 128, 0.1)]:
            r = corollary_bernoulli_bound(n, d, eps)
            ratios.append(r.instantiated / r.risk_bound)
        assert max(ratios) / min(ratios) < 1.05

    def test_report_contents(self):
        r = corollary_bernoulli_bound(1000, 4, 1.0)
        assert r.setting == "bernoulli"
        assert 0 < r.testing_bound <= 2.0
        assert r.ingredients["info_budget"] == 1000.0
        assert r.instantiated == pytest.approx(r.ingredients["delta_sep"] * r.testing_bound, rel=1e-9)

    def test_json_round_trip(self):
        r = corollary_bernoulli_bound(1000, 4, 1.0)
        back = LowerBoundReport.from_dict(json.loads(r.to_json()))
        assert back == r

    def test_bad_loss(self):
        with pytest.raises(ValueError):
            corollary_bernoulli_bound(10, 2, 1.0, "huber")


class TestOtherCorollaries:
    def test_gaussian(self):
        r = corollary_gaussian_bound(10_000, 8, 1.0, 0.5)
        assert r.risk_bound == pytest.approx(8 / 0.5 * 8 / 10_000)
        assert r.testing_bound is None
        assert corollary_gaussian_bound(1, 8, 1.0, 0.5).risk_bound == 8.0
        # large eps_kl hands over to the non-private rate
        assert corollary_gaussian_bound(100, 2, 1.0, 10.0).risk_bound == pytest.approx(0.02)

    def test_sparse(self):
        r = corollary_sparse_gaussian_bound(10_000, 64, 1, 1.0, 1.0)
        assert r.risk_bound == pytest.approx(64 / 10_000)
        r = corollary_sparse_gaussian_bound(10_000, 4, 1, 1.0, 100.0)
        assert r.risk_bound == pytest.approx(math.log(4) / 10_000)
        with pytest.raises(ValueError):
            corollary_sparse_gaussian_bound(100, 3, 2, 1.0, 1.0)

    def test_logistic(self):
        assert corollary_logistic_bound(1000, 4, 0.5).risk_bound == pytest.approx(16 / 500)

    def test_negative_risk_rejected(self):
        with pytest.raises(ValueError):
            LowerBoundReport("x", "y", {}, None, -1.0)
