from itertools import product

import pytest
from hypothesis import given, strategies as st

from ddservices.majorization import (
    RhTransfer,
    first_tail_violation,
    majorizes,
    replay_chain,
    rh_chain,
    rh_transfer,
    sort_desc,
    tail_sums,
    weakly_majorizes,
)
from strategies import same_length_pair, vectors


def brute_weak(d, p):
    # tail sums of the sorted vectors, spelled out
    ds, ps = sorted(d), sorted(p)
    return all(sum(ds[:k]) <= sum(ps[:k]) for k in range(1, len(d) + 1))


def test_tail_sums_of_sorted_vector():
    assert tail_sums([1, 5, 3, 1, 2, 2]) == (14, 9, 6, 4, 2, 1)
    assert tail_sums([]) == ()


def test_five_load_vectors():
    d = (5, 4, 2, 1, 1, 1)
    assert majorizes(d, (1, 5, 3, 1, 2, 2))
    assert not weakly_majorizes(d, (2, 5, 3, 2, 2, 0))
    assert first_tail_violation(d, (2, 5, 3, 2, 2, 0)) == 5


def test_weak_but_not_exact():
    assert weakly_majorizes((2, 1), (3, 1))
    assert not majorizes((2, 1), (3, 1))


def test_length_mismatch_raises():
    with pytest.raises(ValueError):
        weakly_majorizes((1, 2), (1, 2, 3))


def test_negative_entries_rejected():
    with pytest.raises(ValueError):
        majorizes((1, -1), (0, 0))


@given(same_length_pair())
def test_weak_matches_prefix_definition(pair):
    d, p = pair
    assert weakly_majorizes(d, p) == brute_weak(d, p)


@given(vectors())
def test_reflexive(v):
    assert majorizes(v, v)


@given(vectors(), st.permutations(range(6)))
def test_permutation_invariant(v, perm):
    perm = [i for i in perm if i < len(v)]
    w = [v[i] for i in perm]
    assert majorizes(v, w) and majorizes(w, v)


@given(same_length_pair(max_len=4, max_value=3), st.data())
def test_transitive(pair, data):
    a, b = pair
    c = data.draw(st.lists(st.integers(0, 3), min_size=len(a), max_size=len(a)))
    if weakly_majorizes(a, b) and weakly_majorizes(b, c):
        assert weakly_majorizes(a, c)


@given(same_length_pair(max_len=5, max_value=4))
def test_antisymmetric_up_to_sorting(pair):
    a, b = pair
    if majorizes(a, b) and majorizes(b, a):
        assert sort_desc(a) == sort_desc(b)


def test_rh_transfer_moves_one_unit():
    assert rh_transfer((5, 2, 1), 0, 2) == (4, 2, 2)
    with pytest.raises(ValueError):
        rh_transfer((2, 2), 0, 1)
    with pytest.raises(IndexError):
        rh_transfer((2, 1), 0, 5)


@given(vectors(min_len=2), st.data())
def test_rh_transfer_result_is_above(v, data):
    t = data.draw(st.integers(0, len(v) - 1))
    s = data.draw(st.integers(0, len(v) - 1))
    if v[t] > v[s]:
        w = rh_transfer(v, t, s)
        assert majorizes(v, w)
        assert sum(w) == sum(v)


def test_chain_example():
    chain = rh_chain((4, 0, 0), (2, 1, 1))
    path = replay_chain((4, 0, 0), chain)
    assert path[0] == (4, 0, 0) and path[-1] == (2, 1, 1)
    assert all(isinstance(step, RhTransfer) for step in chain)


def test_chain_identity_is_empty():
    assert rh_chain((3, 1), (1, 3)) == []


def test_chain_rejects_unordered_pair():
    with pytest.raises(ValueError):
        rh_chain((2, 1, 1), (4, 0, 0))


def test_chain_on_all_small_pairs():
    for a in product(range(4), repeat=3):
        for b in product(range(4), repeat=3):
            if not majorizes(a, b):
                continue
            path = replay_chain(a, rh_chain(a, b))
            assert path[-1] == sort_desc(b)
            for x, y in zip(path, path[1:]):
                assert majorizes(x, y) and majorizes(y, b)
