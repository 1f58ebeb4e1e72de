"""Integer-vector majorization primitives.

All comparisons use the tail-sum convention in which ``d`` is "below" ``p``
when every tail sum of the non-increasing rearrangement of ``d`` is at most
the matching tail sum of ``p``. This is the reverse of the textbook
direction and lets adequacy read as ``demand <= supply``.

Indices exposed by this module are 0-based.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import accumulate
from typing import Iterable, Sequence

IntVector = tuple[int, ...]


@dataclass(frozen=True)
class RhTransfer:
    """One unit moved from ``from_index`` to ``to_index`` of a sorted vector."""

    from_index: int
    to_index: int


def as_vector(values: Iterable[int]) -> IntVector:
    v = tuple(int(x) for x in values)
    if any(x < 0 for x in v):
        raise ValueError(f"vector entries must be non-negative: {v}")
    return v


def sort_desc(v: Iterable[int]) -> IntVector:
    return tuple(sorted(as_vector(v), reverse=True))


def tail_sums(v: Iterable[int]) -> IntVector:
    """Suffix sums of the non-increasing rearrangement of ``v``.

    Entry ``t`` is the sum of the ``len(v) - t`` smallest entries.
    """
    desc = sort_desc(v)
    return tuple(accumulate(reversed(desc)))[::-1]


def _check_lengths(a: Sequence[int], b: Sequence[int]) -> None:
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} != {len(b)}")


def first_tail_violation(d: Iterable[int], p: Iterable[int]) -> int | None:
    """Smallest index ``t`` where the tail sum of ``d`` exceeds that of ``p``."""
    d, p = as_vector(d), as_vector(p)
    _check_lengths(d, p)
    for t, (dt, pt) in enumerate(zip(tail_sums(d), tail_sums(p))):
        if dt > pt:
            return t
    return None


def weakly_majorizes(d: Iterable[int], p: Iterable[int]) -> bool:
    """True iff every tail sum of ``d`` is at most the tail sum of ``p``."""
    return first_tail_violation(d, p) is None


def majorizes(d: Iterable[int], p: Iterable[int]) -> bool:
    d, p = as_vector(d), as_vector(p)
    return weakly_majorizes(d, p) and sum(d) == sum(p)


def rh_transfer(v: Iterable[int], t: int, s: int) -> IntVector:
    """Move one unit from entry ``t`` to entry ``s`` and re-sort.

    Requires ``v[t] > v[s]``. The result is majorized-above ``v`` in the
    tail-sum order, i.e. ``majorizes(v, result)`` holds.
    """
    v = list(as_vector(v))
    if not (0 <= t < len(v) and 0 <= s < len(v)):
        raise IndexError(f"transfer indices out of range: {t}, {s}")
    if v[t] <= v[s]:
        raise ValueError(f"RH transfer needs v[{t}] > v[{s}], got {v[t]} <= {v[s]}")
    v[t] -= 1
    v[s] += 1
    return sort_desc(v)


def _next_transfer(a: IntVector, b: IntVector) -> RhTransfer:
    # a, b sorted non-increasing, a != b, majorizes(a, b)
    t = next(i for i, (x, y) in enumerate(zip(a, b)) if x != y)
    s = next(j for j in range(t + 1, len(a)) if a[t] - a[j] > 1)
    return RhTransfer(t, s)


def rh_chain(a: Iterable[int], b: Iterable[int]) -> list[RhTransfer]:
    """Sequence of unit RH transfers carrying ``sort_desc(a)`` to ``sort_desc(b)``.

    Each transfer is expressed against the running sorted vector: replay it
    with :func:`replay_chain`. Every intermediate vector sits between ``a``
    and ``b`` in the majorization order.
    """
    a, b = sort_desc(a), sort_desc(b)
    _check_lengths(a, b)
    if not majorizes(a, b):
        raise ValueError(f"{a} is not majorized below {b}; no RH chain exists")
    chain = []
    current = a
    while current != b:
        step = _next_transfer(current, b)
        chain.append(step)
        current = rh_transfer(current, step.from_index, step.to_index)
    return chain


def replay_chain(a: Iterable[int], chain: Iterable[RhTransfer]) -> list[IntVector]:
    """All vectors visited by ``chain`` starting from ``sort_desc(a)``, inclusive."""
    current = sort_desc(a)
    visited = [current]
    for step in chain:
        current = rh_transfer(current, step.from_index, step.to_index)
        visited.append(current)
    return visited
