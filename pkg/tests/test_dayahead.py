from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from ddservices.dayahead import (
    ScenarioDistribution,
    TwoStagePrices,
    convexity_probe,
    expected_cost,
    minimize_dayahead,
    relaxed_cost,
    relaxed_minimize,
)
from ddservices.demand import DemandProfile, demand_profile, duration_vector
from oracles import min_purchase

TOY_D = (1, 1)
TOY_DIST = ScenarioDistribution.from_pairs([((1, 1), "1/2"), ((0, 0), "1/2")])
TOY_PRICES = TwoStagePrices(1, 3)


def brute_cost(y, h, dist, prices):
    recourse = sum(f * min_purchase([a + b for a, b in zip(r, y)], h) for r, f in dist.scenarios)
    return prices.c_da * sum(y) + prices.c_rt * recourse


def brute_minimum(d, dist, prices, cap):
    h = demand_profile(d).durations
    best = None
    for y in product(range(cap + 1), repeat=len(d)):
        cost = brute_cost(y, h, dist, prices)
        if best is None or cost < best[1]:
            best = (y, cost)
    return best


def test_toy_optimum():
    res = minimize_dayahead(TOY_D, TOY_DIST, TOY_PRICES)
    assert res.y == (1, 1) and res.cost == 2
    assert res.method == "exhaustive"
    assert brute_minimum(TOY_D, TOY_DIST, TOY_PRICES, 1) == ((1, 1), 2)
    assert expected_cost((0, 0), TOY_D, TOY_DIST, TOY_PRICES) == 3
    assert expected_cost((1, 0), TOY_D, TOY_DIST, TOY_PRICES) == Fraction(5, 2)


def test_toy_touches_cap_and_warns(caplog):
    res = minimize_dayahead(TOY_D, TOY_DIST, TOY_PRICES)
    assert res.at_cap
    assert "search cap" in caplog.text
    wider = minimize_dayahead(TOY_D, TOY_DIST, TOY_PRICES, y_cap=3)
    assert wider.y == (1, 1) and not wider.at_cap


def test_toy_convexity_probe():
    assert convexity_probe(TOY_D, TOY_DIST, TOY_PRICES, trials=1000, rng=0)


def test_distribution_validation():
    with pytest.raises(ValueError):
        ScenarioDistribution(())
    with pytest.raises(ValueError):
        ScenarioDistribution.from_pairs([((1,), "1/2")])
    with pytest.raises(ValueError):
        ScenarioDistribution.from_pairs([((1,), "1/2"), ((1, 2), "1/2")])
    with pytest.raises(ValueError):
        ScenarioDistribution.from_pairs([((1,), 0), ((2,), 1)])
    floats = ScenarioDistribution.from_pairs([((1,), 0.25), ((2,), 0.75)])
    assert floats.horizon == 1
    assert ScenarioDistribution.deterministic((3, 1)).scenarios == (((3, 1), 1),)


def test_minimize_rejects_non_distribution():
    with pytest.raises(ValueError):
        minimize_dayahead(TOY_D, [((1, 1), 1)], TOY_PRICES)
    with pytest.raises(ValueError):
        minimize_dayahead(TOY_D, TOY_DIST, TOY_PRICES, method="magic")


def test_cheap_real_time_buys_nothing_ahead():
    res = minimize_dayahead(TOY_D, TOY_DIST, TwoStagePrices(3, 1))
    assert res.y == (0, 0)


def test_deterministic_supply_buys_exact_shortfall():
    d = (2, 1, 1)
    dist = ScenarioDistribution.deterministic((0, 0, 1))
    res = minimize_dayahead(d, dist, TwoStagePrices(1, 2))
    assert sum(res.y) == 3 and res.cost == 3


@st.composite
def instances(draw):
    T = draw(st.integers(1, 3))
    h = draw(st.lists(st.integers(0, T), max_size=4))
    d = tuple(duration_vector(DemandProfile(tuple(h), T)))
    k = draw(st.integers(1, 3))
    weights = draw(st.lists(st.integers(1, 4), min_size=k, max_size=k))
    supplies = draw(st.lists(st.lists(st.integers(0, 3), min_size=T, max_size=T),
                             min_size=k, max_size=k))
    total = sum(weights)
    dist = ScenarioDistribution.from_pairs(
        [(tuple(s), Fraction(w, total)) for s, w in zip(supplies, weights)]
    )
    prices = TwoStagePrices(draw(st.integers(0, 4)), draw(st.integers(0, 6)))
    return d, dist, prices


@settings(max_examples=150, deadline=None)
@given(instances())
def test_exhaustive_matches_flow_oracle(case):
    d, dist, prices = case
    cap = max(d, default=0)
    res = minimize_dayahead(d, dist, prices, method="exhaustive")
    y, cost = brute_minimum(d, dist, prices, cap)
    assert res.cost == cost
    assert res.y == y


@settings(max_examples=60, deadline=None)
@given(instances())
def test_relaxation_bounds_integer_optimum(case):
    d, dist, prices = case
    exact = minimize_dayahead(d, dist, prices, method="exhaustive")
    _, lower = relaxed_minimize(d, dist, prices, exact.y_cap)
    assert lower <= float(exact.cost) + 1e-7
    heuristic = minimize_dayahead(d, dist, prices, method="relaxed")
    assert heuristic.cost >= exact.cost
    assert heuristic.cost == expected_cost(heuristic.y, d, dist, prices)


@settings(max_examples=60, deadline=None)
@given(instances())
def test_relaxed_cost_agrees_on_integers(case):
    d, dist, prices = case
    for y in product(range(2), repeat=len(d)):
        assert relaxed_cost(y, d, dist, prices) == pytest.approx(float(expected_cost(y, d, dist, prices)))


@settings(max_examples=40, deadline=None)
@given(instances(), st.integers(0, 2**32 - 1))
def test_cost_is_convex(case, seed):
    d, dist, prices = case
    assert convexity_probe(d, dist, prices, trials=50, rng=seed)


def test_auto_switches_to_relaxation_for_big_boxes():
    d = (3,) * 12
    dist = ScenarioDistribution.from_pairs([((1,) * 12, "1/2"), ((3,) * 12, "1/2")])
    res = minimize_dayahead(d, dist, TwoStagePrices(1, 3))
    assert res.method == "relaxed"
    # buying (2,..,2) ahead is optimal: J = 24 vs anything else
    assert res.cost == expected_cost(res.y, d, dist, TwoStagePrices(1, 3))
    assert res.cost == 24
