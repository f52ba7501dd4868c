import math

import numpy as np
import pytest

from srfgame.errors import AssumptionViolation, OutOfDomain
from srfgame.model import CostFunction
from srfgame.strategy import AifStrategy
from srfgame.two_player import CLASSIFICATIONS, TwoPlayerGame, solve, theta_root, payoff_curves

THETA0 = 0.401058137541547  # mpmath root of exp(-y)(1-y) - y
V_STAR = 1.1706161613662412  # mpmath root of p_identity' for c=2, lambda=1


def const_marginal(k):
    return CostFunction("custom", math.inf, psi_fn=lambda x: k * np.asarray(x), dpsi_fn=lambda x: k + 0 * np.asarray(x))


def test_theta_zero_cost_rate_independent():
    for rate in (0.5, 1.0, 3.0):
        assert theta_root(CostFunction.zero(), rate) == pytest.approx(THETA0, abs=1e-10)


def test_theta_shrinks_with_marginal_cost():
    theta = theta_root(const_marginal(0.9), 1.0)
    assert theta == pytest.approx(0.0338993503934494, abs=1e-10)  # mpmath reference
    assert theta < THETA0


def test_theta_is_root():
    y = theta_root(CostFunction.zero(), 1.0)
    assert abs(math.exp(-y) * (1 - y) - y) < 1e-10


def test_p_identity_examples():
    g = TwoPlayerGame(2.0, 1.0, 1.0)
    assert g.p_identity(1, 1.0) == pytest.approx(1.0)
    assert abs(g.p_identity_prime(1, 1.17062)) < 1e-4
    assert g.p_identity(1, 0.0) == 0.0
    with pytest.raises(OutOfDomain):
        g.p_identity(1, 2.5)


def test_p_identity_prime_matches_finite_difference():
    g = TwoPlayerGame(2.0, 1.3, 0.7, CostFunction.quadratic(0.05))
    v = np.linspace(1.0, 1.9, 19)
    h = 1e-6
    for i in (1, 2):
        fd = (g.p_identity(i, v + h) - g.p_identity(i, v - h)) / (2 * h)
        assert np.allclose(g.p_identity_prime(i, v), fd, atol=1e-7)
        fd = (g.p_flat(i, v + h, 2.0) - g.p_flat(i, v - h, 2.0)) / (2 * h)
        assert np.allclose(g.p_flat_prime(i, v, 2.0), fd, atol=1e-7)


def test_p_flat_examples():
    g = TwoPlayerGame(2.0, 1.0, 1.0, CostFunction.quadratic(0.1))
    assert g.p_flat(1, 2.0, 2.0) == pytest.approx(-g.cost.psi(2.0))
    g0 = TwoPlayerGame(2.0, 1.0, 1.0)
    assert g0.p_flat(1, 1.5, 2.0) == pytest.approx(0.590204010431050, abs=1e-12)
    for v in (1.1, 1.5, 1.9):
        assert g0.p_identity(1, v) - g0.p_flat(1, v, 2.0) == pytest.approx(v * math.exp(-v))


def test_success_probability_examples():
    g = TwoPlayerGame(2.0, 1.0, 1.0)
    ident = AifStrategy(2.0)
    assert g.success_probability(1, 0.4, ident) == 1.0
    assert g.success_probability(1, 1.5, ident) == pytest.approx(0.616599500435796, abs=1e-12)
    flat = AifStrategy(2.0, (1.0,))
    assert g.success_probability(1, 1.5, flat) == pytest.approx(0.393469340287367, abs=1e-12)


def test_case_a():
    sol = solve(TwoPlayerGame(2.0, 1.0, 2.0))
    assert sol.classification == "AIF1/AIF1"
    s1, s2 = sol.strategies
    assert s1.switch_points == s2.switch_points
    assert s1.switch_points[0] == pytest.approx(V_STAR, abs=1e-9)


def test_case_b():
    sol = solve(TwoPlayerGame(2.0, 1.0, 3.0))
    s1, s2 = sol.strategies
    assert sol.classification == "AIF3/AIF1"
    assert s2.switch_points == pytest.approx((V_STAR,), abs=1e-9)
    # mpmath references for the level crossing and the flat-payoff maximizer
    assert s1.switch_points == pytest.approx((V_STAR, 1.23075935613476, 1.44239276712370), abs=1e-9)


def test_case_b_mirrored():
    sol = solve(TwoPlayerGame(2.0, 3.0, 1.0))
    assert sol.classification == "AIF1/AIF3"
    assert sol.strategies[1].order == 3


def test_small_capacity_identity():
    sol = solve(TwoPlayerGame(0.2, 1.0, 1.0))
    assert sol.classification == "AIF0/AIF0"
    assert all(s.order == 0 for s in sol.strategies)


def test_symmetric_game_common_switch():
    sol = solve(TwoPlayerGame(2.0, 1.5, 1.5))
    assert sol.classification == "AIF1/AIF1"


def test_assumption_violation():
    with pytest.raises(AssumptionViolation):
        TwoPlayerGame(2.0, 1.0, 1.0, CostFunction.quadratic(0.6))


def test_best_response_examples():
    g = TwoPlayerGame(2.0, 1.0, 2.0)
    s1, s2 = solve(g).strategies
    assert g.best_response_analytic(1, 0.8, s2) == 0.8
    assert g.best_response_analytic(1, 1.8, s2) == pytest.approx(V_STAR, abs=1e-6)
    g1 = TwoPlayerGame(2.0, 1.0, 1.0)
    assert g1.best_response_analytic(1, 1.1, AifStrategy(2.0)) == pytest.approx(1.1, abs=1e-6)


@pytest.mark.parametrize("rates", [(1.0, 2.0), (1.0, 3.0), (2.0, 0.7), (1.0, 1.0)])
def test_equilibrium_fixed_point(rates):
    g = TwoPlayerGame(2.0, *rates)
    sol = solve(g)
    for i in (1, 2):
        own, opp = sol.strategies[i - 1], sol.strategies[2 - i]
        for v in np.linspace(0.01, 2.0, 200):
            assert g.best_response_analytic(i, v, opp) == pytest.approx(own.eval(v), abs=1e-4), (i, v)


def test_classification_list():
    for r1 in (0.5, 1.0, 2.0, 4.0):
        for r2 in (0.5, 1.0, 3.0):
            assert solve(TwoPlayerGame(2.0, r1, r2)).classification in CLASSIFICATIONS


def test_curves_columns():
    g = TwoPlayerGame(2.0, 1.0, 2.0)
    cols = payoff_curves(g, solve(g), 11)
    assert list(cols) == ["v", "p_identity_1", "p_flat_1", "p_identity_2", "p_flat_2", "s_1", "s_2"]
    assert all(len(c) == 11 for c in cols.values())
