
import numpy as np
import pytest
from hypothesis import given, strategies as st

from srfgame.errors import OutOfDomain
from srfgame.gaussian import solve_gaussian, strategy_moments
from srfgame.model import DemandModel
from srfgame.sim import (
    SimGame, allocate, allocate_batch, best_response_oracle, certify_equilibrium, empirical_load, empirical_success,
    shift_switch_points, simulate_grants,
)
from srfgame.strategy import AifStrategy
from srfgame.two_player import TwoPlayerGame

V_STAR = 1.1706161613662412


def test_allocate_examples():
    out = allocate([0.5, 1.2, 0.4], 1.2, np.random.default_rng(0))
    assert out.granted.tolist() == [True, False, True]
    assert out.leftover == pytest.approx(0.3)
    out = allocate([0.3, 0.9, 0.6], 1.0, np.random.default_rng(0))
    assert out.granted.tolist() == [True, False, True]  # all-or-nothing stops at the first misfit
    assert allocate([], 1.0).leftover == 1.0


def test_allocate_stops_after_first_rejection():
    out = allocate([0.2, 0.5, 0.5, 0.1], 0.9, np.random.default_rng(1))
    # 0.1, 0.2 fit; one 0.5 fits (total 0.8); the second 0.5 does not
    assert out.granted.sum() == 3 and out.granted[0] and out.granted[3]


def test_allocate_domain():
    with pytest.raises(OutOfDomain):
        allocate([0.5, 2.0], 1.0)
    with pytest.raises(OutOfDomain):
        allocate([-0.1], 1.0)


def test_tie_frequency():
    rng = np.random.default_rng(7)
    wins = np.zeros(3)
    runs = 30_000
    for _ in range(runs):
        wins += allocate([1.0, 1.0, 1.0], 2.0, rng).granted
    assert np.all(np.abs(wins / runs - 2 / 3) < 0.01)


@given(st.lists(st.floats(0, 1), min_size=1, max_size=12), st.floats(0.01, 3), st.integers(0, 2**32 - 1))
def test_allocate_properties(reqs, cap, seed):
    reqs = [min(r, cap) for r in reqs]
    rng = np.random.default_rng(seed)
    out = allocate(reqs, cap, rng)
    assert out.granted_amounts.sum() <= cap + 1e-12
    r = np.asarray(reqs)
    if out.granted.any() and (~out.granted).any():
        assert r[out.granted].max() <= r[~out.granted].min()
    i = int(rng.integers(len(reqs)))
    if out.granted[i]:
        lowered = r.copy()
        lowered[i] *= rng.random()
        assert allocate(lowered, cap, rng).granted[i]


def test_batch_matches_allocate_without_ties():
    rng = np.random.default_rng(3)
    req = rng.random((500, 6))
    batch = allocate_batch(req, 2.0, rng)
    for row, g in zip(req, batch):
        assert np.array_equal(allocate(row, 2.0, rng).granted, g)


def test_empirical_success_matches_closed_form():
    g = TwoPlayerGame(2.0, 1.0, 1.0)
    p, se = empirical_success(1.5, AifStrategy(2.0), SimGame.from_two_player(g), 200_000, seed=11)
    assert abs(p - g.success_probability(1, 1.5, AifStrategy(2.0))) < 4 * se


def test_monotone_success_in_request():
    g = SimGame.from_two_player(TwoPlayerGame(2.0, 1.0, 2.0))
    s = AifStrategy(2.0, (V_STAR,))
    grants = simulate_grants(np.linspace(0, 2, 41), s, g, 20_000, seed=5)
    assert np.all(np.diff(grants.mean(axis=0)) <= 1e-12)


def test_reproducible():
    g = SimGame.from_two_player(TwoPlayerGame(2.0, 1.0, 3.0))
    s = AifStrategy(2.0, (V_STAR,))
    a = simulate_grants([1.0, 1.5], s, g, 5000, seed=9)
    b = simulate_grants([1.0, 1.5], s, g, 5000, seed=9)
    c = simulate_grants([1.0, 1.5], s, g, 5000, seed=10)
    assert np.array_equal(a, b) and not np.array_equal(a, c)
    # block streams: a longer run extends a shorter one
    assert np.array_equal(simulate_grants([1.0], s, g, 3000, seed=9), a[:3000, :1])


def test_tie_rules_order():
    g = SimGame.from_two_player(TwoPlayerGame(2.0, 1.0, 2.0))
    s = AifStrategy(2.0, (1.5,))
    p = {r: empirical_success(1.5, s, g, 20_000, seed=2, tie_rule=r)[0] for r in ("probe_first", "random", "probe_last")}
    assert p["probe_first"] > p["random"] > p["probe_last"]
    with pytest.raises(ValueError):
        empirical_success(1.0, s, g, 10, seed=2, tie_rule="coin")


def test_best_response_oracle_identity_region():
    game = TwoPlayerGame(2.0, 1.0, 3.0)
    sol_s2 = AifStrategy(2.0, (V_STAR,))
    x, _ = best_response_oracle(0.5, sol_s2, SimGame.from_two_player(game), 0.01, 20_000, seed=1)
    assert x == pytest.approx(0.5)


def test_certificate_csv_and_shape():
    game = TwoPlayerGame(2.0, 1.0, 3.0)
    s = AifStrategy(2.0, (V_STAR,))
    cert = certify_equilibrium([s, s], SimGame.from_two_player(game), grid=5, replications=2000, seed=0)
    assert len(cert.value_grid) == 10 and set(cert.player) == {1, 2}
    text = cert.to_csv()
    assert text.startswith("# srfgame gap-certificate v1\n")
    assert len(text.strip().splitlines()) == 12
    assert np.all(cert.gaps >= -1e-12)


def test_shift_switch_points():
    s = shift_switch_points(AifStrategy(2.0, (1.0, 1.5)), 0.3)
    assert s.switch_points == pytest.approx((1.3, 1.8))


def test_empirical_load_converges(exp_game_120):
    s, _ = solve_gaussian(exp_game_120)
    v = np.linspace(0, 30, 61)
    exact = strategy_moments(exp_game_120, s, v)[0]
    approx = empirical_load(s, DemandModel.exponential(1.0, cap=120), 400_001, v, seed=4)
    assert np.max(np.abs(approx - exact)) < 0.01
