"""Retail engine: choice probabilities, forecasting, optimization."""

import math

import numpy as np
import pytest
from scipy import integrate

from araprice.randkit import InverseGammaParams, RngStream
from araprice.retail import (
    RetailScenario,
    estimate_expected_utility,
    optimize_price,
    probit_choice_prob,
    sample_competitor_prices,
    t_choice_prob,
)
from araprice.oracle import quadrature_competitor_objective


def make_scenario(**overrides) -> RetailScenario:
    base = dict(
        cost=5.0,
        competitor_cost=5.0,
        max_price=50.0,
        competitor_max_price=40.0,
        customer_noise=InverseGammaParams(2.0, 2.0),
        competitor_noise=InverseGammaParams(0.5, 0.5),
        prior_exponent=2.0,
        grid_step=0.5,
        n1=100,
        n2=100,
    )
    base.update(overrides)
    return RetailScenario(**base)


CASE1 = make_scenario(fixed_sigma=0.01, known_competitor_price=30.0)
CASE2 = make_scenario(known_competitor_price=30.0)
CASE3 = make_scenario()


def t_density(x, dof):
    c = math.gamma((dof + 1) / 2) / (math.sqrt(dof * math.pi) * math.gamma(dof / 2))
    return c * (1 + x * x / dof) ** (-(dof + 1) / 2)


class TestProbitChoice:
    def test_equal_prices(self):
        assert probit_choice_prob(30.0, 30.0, 2.7) == 0.5

    def test_sharp_preference(self):
        assert probit_choice_prob(29.5, 30.0, 0.01) == pytest.approx(1.0, abs=1e-12)

    def test_one_unit_gap_vs_erfc_oracle(self):
        expected = 0.5 * math.erfc(1.0 / math.sqrt(2.0))  # 1 - Phi(1)
        assert probit_choice_prob(31.0, 30.0, 1.0) == pytest.approx(expected, abs=1e-14)
        assert expected == pytest.approx(0.158655, abs=1e-6)

    def test_invalid_sigma(self):
        with pytest.raises(ValueError):
            probit_choice_prob(1.0, 2.0, 0.0)
        with pytest.raises(ValueError):
            probit_choice_prob(1.0, 2.0, -1.0)


class TestTChoice:
    def test_equal_prices(self):
        assert t_choice_prob(30.0, 30.0, InverseGammaParams(2.0, 2.0)) == 0.5

    def test_unit_gap_against_quadrature(self):
        # survival mass of a t with 4 dof beyond 1
        tail, _ = integrate.quad(t_density, 1.0, np.inf, args=(4.0,), epsabs=1e-13)
        value = t_choice_prob(31.0, 30.0, InverseGammaParams(2.0, 2.0))
        assert value == pytest.approx(tail, abs=1e-10)
        assert value == pytest.approx(0.1870, abs=2e-4)

    def test_marginalizes_probit_over_noise_prior(self):
        # the closed form equals the Monte Carlo average of the probit over
        # variance draws; light version of the full acceptance check
        noise = InverseGammaParams(2.0, 2.0)
        sigma = np.sqrt(
            1.0 / RngStream(41).generator.gamma(noise.shape, 1.0 / noise.scale, 300_000)
        )
        worst = 0.0
        for gap in np.arange(-5.0, 5.5, 1.0):
            mc = float(np.mean(1.0 - _phi(gap / sigma)))
            worst = max(worst, abs(mc - t_choice_prob(30.0 + gap, 30.0, noise)))
        assert worst <= 0.004


def _phi(x):
    from scipy.special import ndtr

    return ndtr(x)


class TestCompetitorForecast:
    def test_support_within_feasible_range(self):
        draws = sample_competitor_prices(CASE3, RngStream(7))
        assert draws.size == CASE3.n1
        assert draws.min() >= 5.0 and draws.max() <= 40.0

    def test_known_price_degenerate(self):
        draws = sample_competitor_prices(CASE1, RngStream(7))
        assert np.all(draws == 30.0)

    def test_sharp_limit_undercuts_our_price(self):
        # our price is (almost) surely 40 and choice noise is (almost) zero:
        # the rival's payoff is margin times 1{her price < 40}, so the best
        # response is the largest grid point strictly below 40
        scenario = make_scenario(
            cost=39.9999999,
            max_price=40.0000001,
            fixed_sigma=1e-9,
        )
        draws = sample_competitor_prices(scenario, RngStream(11))
        assert np.all(draws == 39.5)

    def test_single_forecast_matches_quadrature_argmax(self):
        scenario = make_scenario(n1=1, n2=10_000)
        draw = sample_competitor_prices(scenario, RngStream(13))[0]
        grid, objective = quadrature_competitor_objective(scenario, nodes=512)
        oracle_argmax = grid[int(np.argmax(objective))]
        assert abs(draw - oracle_argmax) <= scenario.grid_step + 1e-12


class TestExpectedUtility:
    def test_zero_margin_price(self):
        value, se = estimate_expected_utility(5.0, [30.0, 28.0], CASE3)
        assert value == 0.0

    def test_benchmark_point_value(self):
        value, _ = estimate_expected_utility(29.5, [30.0], CASE1)
        assert value == 24.5

    def test_perishable_identity(self):
        perishable = make_scenario(utility_variant="perishable")
        samples = np.array([22.0, 30.0, 35.0])
        for p1 in np.arange(5.0, 50.5, 4.5):
            plain, _ = estimate_expected_utility(p1, samples, CASE3)
            salvage, _ = estimate_expected_utility(p1, samples, perishable)
            accept = plain / (p1 - 5.0) if p1 > 5.0 else None
            if accept is not None:
                assert plain - salvage == pytest.approx(5.0 * (1 - accept), abs=1e-10)

    def test_input_validation(self):
        with pytest.raises(ValueError, match="empty"):
            estimate_expected_utility(10.0, [], CASE3)
        with pytest.raises(ValueError, match="outside"):
            estimate_expected_utility(60.0, [30.0], CASE3)


class TestOptimizePrice:
    def test_benchmark_case_selects_just_below_rival(self):
        for seed in (1, 42, 993):
            curve = optimize_price(CASE1, RngStream(seed))
            assert curve.optimum == 29.5
            assert curve.optimum_utility == pytest.approx(24.5, abs=1e-9)

    def test_acceptance_column_monotone_nonincreasing(self):
        curve = optimize_price(CASE3, RngStream(21))
        assert np.all(np.diff(curve.accept_prob) <= 1e-15)

    def test_expected_utility_nonnegative(self):
        curve = optimize_price(CASE3, RngStream(22))
        assert np.all(curve.expected_utility >= 0.0)

    def test_endpoint_behavior(self):
        curve = optimize_price(CASE3, RngStream(23))
        assert curve.accept_prob[0] == curve.accept_prob.max()
        assert curve.expected_utility[0] == 0.0
        assert curve.expected_utility[-1] < 0.05 * curve.expected_utility.max()

    def test_seed_determinism(self):
        a = optimize_price(CASE3, RngStream(31))
        b = optimize_price(CASE3, RngStream(31))
        assert np.array_equal(a.expected_utility, b.expected_utility)
        assert np.array_equal(a.accept_prob, b.accept_prob)
        assert np.array_equal(a.std_err, b.std_err)
        c = optimize_price(CASE3, RngStream(32))
        assert not np.array_equal(a.expected_utility, c.expected_utility)

    def test_worker_count_does_not_change_results(self):
        a = optimize_price(CASE3, RngStream(33), workers=1)
        b = optimize_price(CASE3, RngStream(33), workers=4)
        assert np.array_equal(a.expected_utility, b.expected_utility)
        assert np.array_equal(a.accept_prob, b.accept_prob)

    def test_invalid_scenario_rejected(self):
        bad = make_scenario(n1=0)
        with pytest.raises(ValueError, match="n1"):
            optimize_price(bad, RngStream(1))
