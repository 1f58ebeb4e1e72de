"""Minimum-cost supplemental purchases that make a supply profile adequate.

Two information regimes are covered. In the oracle regime the whole supply
profile is known before anything is bought. In the run-time regime slot
``t`` is revealed just before it starts and ``a_t`` must be committed
then. Both reach the same minimal cost.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import accumulate
from numbers import Rational
from typing import Iterable

import numpy as np

from .adequacy import llf_allocate
from .demand import DurationVector, demand_profile
from .majorization import as_vector, sort_desc, tail_sums

Price = Rational | int


def as_price(c) -> Fraction:
    """Exact non-negative price from an int, Fraction, or "p/q" string."""
    if isinstance(c, float):
        c = Fraction(str(c))
    c = Fraction(c)
    if c < 0:
        raise ValueError(f"price must be non-negative, got {c}")
    return c


@dataclass(frozen=True)
class PurchasePlan:
    purchases: tuple[int, ...]
    unit_price: Fraction

    @property
    def quantity(self) -> int:
        return sum(self.purchases)

    @property
    def total_cost(self) -> Fraction:
        return self.unit_price * self.quantity


def shortfall(p: Iterable[int], d) -> int:
    """Fewest extra kW-slots that make ``p`` adequate for ``d``.

    ``max_t (sum_{s >= t} (d_s - p_desc_s))^+`` with both vectors sorted
    non-increasing.
    """
    p, d = as_vector(p), as_vector(d)
    if len(p) != len(d):
        raise ValueError(f"length mismatch: {len(d)} != {len(p)}")
    gaps = [dt - pt for dt, pt in zip(tail_sums(d), tail_sums(p))]
    return max([0, *gaps])


def optimal_supplement_cost(p: Iterable[int], d, c) -> Fraction:
    return as_price(c) * shortfall(p, d)


def oracle_purchase(p: Iterable[int], d, c) -> PurchasePlan:
    """Buy one unit at a time in a currently-smallest slot until adequate.

    Topping up a minimum entry raises every binding tail sum by one, so the
    greedy stops after exactly :func:`shortfall` units. Among tied minima
    the latest slot is chosen.
    """
    c = as_price(c)
    p, d = as_vector(p), as_vector(d)
    need = shortfall(p, d)
    x = list(p)
    a = [0] * len(p)
    for _ in range(need):
        low = min(x)
        t = max(i for i, v in enumerate(x) if v == low)
        x[t] += 1
        a[t] += 1
    return PurchasePlan(tuple(a), c)


class RuntimeProcurer:
    """Online purchase policy; :meth:`observe` sees one slot at a time.

    After slot ``t`` is revealed the smallest ``a_t`` is bought such that the
    augmented prefix ``(p_1 + a_1, ..., p_t + a_t)`` weakly dominates the
    last ``t`` entries of ``d`` in the tail-sum order. Constraints not
    involving slot ``t`` already hold from earlier steps, so

        a_t = max(0, max_k (D_k - S_{k-1}) - p_t)

    where ``D_k`` is the sum of the ``k`` smallest demands and ``S_j`` the
    sum of the ``j`` smallest earlier augmented supplies.
    """

    def __init__(self, d):
        self.d = sort_desc(d)
        self.horizon = len(self.d)
        self._demand_tail = [0, *accumulate(reversed(self.d))]
        self.augmented: list[int] = []
        self.purchases: list[int] = []

    def observe(self, p_t: int) -> int:
        t = len(self.augmented)
        if t >= self.horizon:
            raise RuntimeError("all slots already observed")
        if p_t < 0:
            raise ValueError(f"supply must be non-negative, got {p_t}")
        smallest = [0, *accumulate(sorted(self.augmented))]
        need = max(self._demand_tail[k] - smallest[k - 1] for k in range(1, t + 2))
        a_t = max(0, need - p_t)
        self.augmented.append(p_t + a_t)
        self.purchases.append(a_t)
        return a_t


def runtime_purchase(d, supply_stream: Iterable[int], c=1) -> tuple[PurchasePlan, np.ndarray]:
    """Run :class:`RuntimeProcurer` over a stream and LLF-allocate the result.

    LLF decides slot ``t`` from slot ``t`` supply and past service only, so
    allocating the final augmented profile equals allocating online.
    """
    procurer = RuntimeProcurer(d)
    for p_t in supply_stream:
        procurer.observe(int(p_t))
    if len(procurer.augmented) != procurer.horizon:
        raise ValueError(
            f"stream has {len(procurer.augmented)} slots, horizon is {procurer.horizon}"
        )
    plan = PurchasePlan(tuple(procurer.purchases), as_price(c))
    h = demand_profile(d if isinstance(d, DurationVector) else procurer.d)
    return plan, llf_allocate(procurer.augmented, h)
