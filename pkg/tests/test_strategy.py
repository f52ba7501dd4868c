import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from srfgame.errors import OutOfDomain, ParseError
from srfgame.strategy import (
    AifStrategy, ChatteringStrategy, EquilibriumStrategy, deserialize, load_profile, save_profile, serialize,
)

AIF3 = AifStrategy(2.0, (1.17062, 1.23076, 1.44239))


def aif_strategies(cap=10.0):
    return st.lists(st.floats(0.01, cap - 0.01), min_size=0, max_size=6, unique=True).map(
        lambda xs: AifStrategy(cap, tuple(sorted(set(round(x, 6) for x in xs)))))


def test_eval_aif1():
    s = AifStrategy(2.0, (1.17062,))
    assert s.eval(0.5) == 0.5
    assert s.eval(1.8) == 1.17062


def test_identity_is_aif0():
    assert AifStrategy(2.0).eval(0.3) == 0.3
    assert AifStrategy(2.0).order == 0


def test_aif3_segments():
    assert AIF3.eval(1.2) == 1.17062
    assert AIF3.eval(1.3) == 1.3
    assert AIF3.eval(1.9) == 1.44239


def test_eval_domain():
    with pytest.raises(OutOfDomain):
        AIF3.eval(2.5)
    with pytest.raises(OutOfDomain):
        AIF3.eval(-0.1)


def test_invalid_switch_points():
    with pytest.raises(ValueError):
        AifStrategy(2.0, (1.5, 1.2))
    with pytest.raises(ValueError):
        AifStrategy(2.0, (2.0,))


def test_generalized_inverse_examples():
    s = AifStrategy(2.0, (1.0,))
    assert s.generalized_inverse(0.7) == 0.7
    assert s.generalized_inverse(1.2) == math.inf
    assert AIF3.generalized_inverse(1.2) == 1.23076


def test_generalized_inverse_against_dense_grid():
    grid = np.linspace(0, 2, 2_000_001)
    vals = AIF3.eval(grid)
    for x in (0.3, 1.17062, 1.18, 1.2, 1.23076, 1.3, 1.44239, 1.5):
        hits = grid[vals >= x]
        oracle = hits[0] if hits.size else math.inf
        assert AIF3.generalized_inverse(x) == pytest.approx(oracle, abs=2e-6)


@given(aif_strategies(), st.lists(st.floats(0, 10), min_size=2, max_size=50))
def test_generalized_inverse_nondecreasing(s, xs):
    xs = np.sort(xs)
    inv = s.generalized_inverse(xs)
    assert np.all(inv[1:] >= inv[:-1])


@given(aif_strategies())
def test_assumption2_on_grid(s):
    v = np.linspace(0, s.cap, 10_000)
    out = s.eval(v)
    assert out[0] == 0
    assert np.all(np.diff(out) >= 0)
    assert np.all(out <= v)


@given(aif_strategies(), st.floats(0, 10))
def test_inverse_of_eval_on_identity_parts(s, v):
    sp = np.asarray(s.switch_points)
    j = np.searchsorted(sp, v, side="right")
    if j % 2 == 0 and not np.any(np.isclose(sp, v)):
        assert s.generalized_inverse(s.eval(v)) == pytest.approx(v, abs=1e-10)


def make_chattering(points=1000):
    v = np.linspace(3.0, 5.0, points)
    eta = 3.0 + 0.4 * (v - 3.0) - 0.01 * (v - 3.0) ** 2
    return ChatteringStrategy(3.0, 5.0, v, eta, "slope_nonpositive")


def test_composite_eval():
    ch = make_chattering()
    s = EquilibriumStrategy(AifStrategy(10.0, (2.0, 2.5)), ch)
    assert s.eval(1.0) == 1.0
    assert s.eval(2.2) == 2.0
    assert s.eval(2.7) == 2.7
    assert s.eval(4.0) == pytest.approx(3.39, abs=1e-6)
    assert s.eval(9.0) == pytest.approx(ch.eta[-1])
    v = np.linspace(0, 10, 10_000)
    out = s.eval(v)
    assert np.all(np.diff(out) >= 0) and np.all(out <= v)


def test_round_trip_aif3():
    back = deserialize(serialize(AIF3))
    assert back.switch_points == AIF3.switch_points
    assert back == EquilibriumStrategy(AIF3)


def test_round_trip_chattering_grid():
    s = EquilibriumStrategy(AifStrategy(10.0, (2.0, 3.0)), make_chattering(1000))
    back = deserialize(serialize(s))
    assert back == s
    assert np.array_equal(back.chattering.eta, s.chattering.eta)


def test_profile_round_trip(tmp_path):
    path = tmp_path / "p.json"
    save_profile([AIF3, AifStrategy(2.0, (1.17062,))], path)
    a, b = load_profile(path)
    assert a.switch_points == AIF3.switch_points and b.switch_points == (1.17062,)


@pytest.mark.parametrize("text, fragment", [
    ("{not json", "line 1"),
    ('{"switch_points": [1]}', "cap"),
    ('{"cap": 2, "switch_points": [1.5, "x"]}', "switch_points[1]"),
    ('{"cap": 2, "switch_points": [1.5, 1.2]}', "increasing"),
    ('{"cap": 2, "switch_points": [], "chattering": {"entry": 1, "exit": 2, "grid": [[1, 2, 3]]}}', "grid"),
    ('[1, 2]', "object"),
])
def test_malformed_files(text, fragment):
    with pytest.raises(ParseError, match=None) as err:
        deserialize(text)
    assert fragment in str(err.value)
