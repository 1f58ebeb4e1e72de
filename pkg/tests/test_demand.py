import pytest
from hypothesis import given, strategies as st

from ddservices.demand import DemandProfile, DurationVector, as_profile, demand_profile, duration_vector


def test_five_load_profile():
    h = DemandProfile((1, 2, 2, 3, 6), 6)
    assert tuple(duration_vector(h)) == (5, 4, 2, 1, 1, 1)
    assert h.energy == 14


def test_round_trip_sorts_durations():
    d = duration_vector(DemandProfile((1, 2, 2, 3, 6), 6))
    assert demand_profile(d).durations == (6, 3, 2, 2, 1)


def test_zero_duration_loads_survive_round_trip():
    h = DemandProfile((2, 0, 0), 3)
    d = duration_vector(h)
    assert tuple(d) == (1, 1, 0) and d.population == 3
    assert demand_profile(d).durations == (2, 0, 0)


def test_empty_profile():
    d = duration_vector(DemandProfile((), 4))
    assert tuple(d) == (0, 0, 0, 0)
    assert demand_profile(d).durations == ()


def test_validation():
    with pytest.raises(ValueError):
        DemandProfile((7,), 6)
    with pytest.raises(ValueError):
        DurationVector((1, 2), 5)
    with pytest.raises(ValueError):
        DurationVector((3, 1), 2)
    with pytest.raises(ValueError):
        as_profile(DemandProfile((1,), 2), 3)


@st.composite
def profiles(draw):
    T = draw(st.integers(0, 8))
    h = draw(st.lists(st.integers(0, T), max_size=10))
    return DemandProfile(tuple(h), T)


@given(profiles())
def test_duration_vector_invariants(h):
    d = duration_vector(h)
    assert len(d) == h.horizon
    assert sum(d) == h.energy
    assert all(a >= b for a, b in zip(d, d[1:]))
    for t in range(h.horizon):
        assert d[t] == sum(1 for x in h if x >= t + 1)


@given(profiles())
def test_bijection_up_to_order(h):
    back = demand_profile(duration_vector(h))
    assert sorted(back.durations) == sorted(h.durations)
    assert duration_vector(back) == duration_vector(h)
