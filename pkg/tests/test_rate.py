import numpy as np
import pytest
from hypothesis import given, strategies as st

from ddservices.adequacy import is_adequate, llf_allocate
from ddservices.demand import DemandProfile, duration_vector
from ddservices.rate import (
    RateSpec,
    UnservableSpecError,
    compose_allocation,
    decompose,
    split_allocation,
)
from oracles import rate_feasible


def test_decompositions():
    assert decompose(RateSpec(7, 3, 3)).durations == (3, 2, 2)
    assert decompose(RateSpec(100, 10, 10)).durations == (10,) * 10
    assert decompose(RateSpec(0, 2, 4)).durations == (0, 0)
    assert RateSpec(7, 3, 3).split() == (2, 1)


def test_unservable_spec():
    with pytest.raises(UnservableSpecError):
        RateSpec(5, 2, 2)
    with pytest.raises(ValueError):
        RateSpec(-1, 2, 2)


def test_zero_rate_spec_has_no_units():
    spec = RateSpec(0, 0, 3)
    assert decompose(spec).durations == ()
    assert compose_allocation([], spec).tolist() == [0, 0, 0]
    assert split_allocation([0, 0, 0], spec).shape == (0, 3)


def test_compose_validates_rows():
    spec = RateSpec(3, 2, 2)
    with pytest.raises(ValueError):
        compose_allocation([[1, 1], [1, 1]], spec)
    with pytest.raises(ValueError):
        compose_allocation([[2, 0], [1, 0]])
    with pytest.raises(ValueError):
        compose_allocation([])
    assert compose_allocation([[1, 1], [0, 1]], spec).tolist() == [1, 2]


def test_split_validates_allocation():
    spec = RateSpec(3, 2, 2)
    with pytest.raises(ValueError):
        split_allocation([3, 0], spec)
    with pytest.raises(ValueError):
        split_allocation([1, 1], spec)
    with pytest.raises(ValueError):
        split_allocation([1, 1, 1], spec)


@st.composite
def rate_allocations(draw):
    T = draw(st.integers(1, 8))
    m = draw(st.integers(1, 5))
    A = draw(st.lists(st.integers(0, m), min_size=T, max_size=T))
    return RateSpec(sum(A), m, T), A


@given(rate_allocations())
def test_split_then_compose_is_identity(case):
    spec, A = case
    rows = split_allocation(A, spec)
    assert np.isin(rows, (0, 1)).all()
    assert sorted(rows.sum(axis=1).tolist(), reverse=True) == list(spec.unit_durations())
    assert compose_allocation(rows, spec).tolist() == A


@given(rate_allocations())
def test_unit_durations_shape(case):
    spec, _ = case
    units = spec.unit_durations()
    assert len(units) == spec.max_rate
    assert sum(units) == spec.energy
    assert max(units) - min(units) <= 1


@st.composite
def mixed_instances(draw):
    T = draw(st.integers(1, 3))
    n = draw(st.integers(1, 2))
    specs = []
    for _ in range(n):
        m = draw(st.integers(1, 3))
        specs.append((draw(st.integers(0, m * T)), m))
    p = draw(st.lists(st.integers(0, 4), min_size=T, max_size=T))
    return T, specs, p


@given(mixed_instances())
def test_decomposed_adequacy_matches_enumeration(case):
    T, specs, p = case
    units = [u for E, m in specs for u in decompose(RateSpec(E, m, T)).durations]
    d = duration_vector(DemandProfile(tuple(units), T))
    assert is_adequate(p, d) == rate_feasible(specs, p)


@given(mixed_instances())
def test_llf_on_units_yields_rate_allocations(case):
    T, specs, p = case
    units = [u for E, m in specs for u in decompose(RateSpec(E, m, T)).durations]
    h = DemandProfile(tuple(units), T)
    if not is_adequate(p, duration_vector(h)):
        return
    A = llf_allocate(p, h)
    row = 0
    for E, m in specs:
        rate = compose_allocation(A[row:row + m], RateSpec(E, m, T))
        assert rate.sum() == E and rate.max(initial=0) <= m
        row += m
