"""Forward and spot markets for duration-differentiated services.

All consumers share one utility table ``U(0..T)`` with ``U(0) = 0``. The
forward market sells a service of duration ``h`` (1 kW in any ``h`` slots)
at price ``pi(h)``. The supplier owns free renewable power ``r`` and buys
extra power day-ahead at ``c_da`` per kW-slot. In the spot market a price
is cleared slot by slot and consumers bid myopically.

Money values are :class:`fractions.Fraction` throughout.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Iterable, Sequence

import numpy as np

from .demand import DemandProfile, DurationVector, as_profile, demand_profile, duration_vector
from .majorization import as_vector, sort_desc, weakly_majorizes
from .procurement import as_price, oracle_purchase, shortfall

CONVEX = "convex"
CONCAVE = "concave"

_CURVATURE_ALIASES = {
    "convex": CONVEX,
    "convex-increments": CONVEX,
    "concave": CONCAVE,
    "concave-increments": CONCAVE,
}

# verify_equilibrium enumerates every bundle up to this size
EXHAUSTIVE_MAX_T = 6
EXHAUSTIVE_MAX_N = 20


class MarketPreconditionError(ValueError):
    pass


class InfeasibleAllocationError(ValueError):
    pass


@dataclass(frozen=True)
class UtilitySpec:
    """Utility ``values[h] = U(h)`` for ``h = 0..T`` with a curvature flag.

    ``convex`` means non-decreasing increments, ``concave`` non-increasing.
    """

    values: tuple[Fraction, ...]
    curvature: str

    def __post_init__(self):
        values = tuple(as_price(v) if not isinstance(v, Fraction) else v for v in self.values)
        object.__setattr__(self, "values", values)
        curvature = _CURVATURE_ALIASES.get(self.curvature)
        if curvature is None:
            raise ValueError(f"unknown curvature {self.curvature!r}")
        object.__setattr__(self, "curvature", curvature)
        if not values or values[0] != 0:
            raise ValueError("utility table must start with U(0) = 0")
        inc = self.increments
        if any(x < 0 for x in inc):
            raise ValueError(f"utility increments must be non-negative: {inc}")
        pairs = list(zip(inc, inc[1:]))
        if curvature == CONVEX and any(a > b for a, b in pairs):
            raise ValueError(f"increments {inc} are not non-decreasing")
        if curvature == CONCAVE and any(a < b for a, b in pairs):
            raise ValueError(f"increments {inc} are not non-increasing")

    @classmethod
    def from_function(cls, fn, horizon: int, curvature: str):
        return cls(tuple(Fraction(fn(h)) for h in range(horizon + 1)), curvature)

    @property
    def horizon(self) -> int:
        return len(self.values) - 1

    @property
    def increments(self) -> tuple[Fraction, ...]:
        """``increments[h-1] = U(h) - U(h-1)`` for ``h = 1..T``."""
        return tuple(b - a for a, b in zip(self.values, self.values[1:]))

    def __call__(self, h: int) -> Fraction:
        return self.values[h]

    def marginal(self, held: int) -> Fraction:
        """Value of one more slot to a consumer already holding ``held``."""
        return self.values[held + 1] - self.values[held]


@dataclass(frozen=True)
class WelfareOptimum:
    k_star: int
    d: DurationVector
    h: DemandProfile
    y: tuple[int, ...]
    welfare: Fraction


@dataclass(frozen=True)
class EquilibriumOutcome:
    prices: tuple[Fraction, ...]  # pi(0..T), pi(0) = 0
    production: tuple[int, ...]  # n_1..n_T
    demand: DemandProfile
    dayahead_purchase: tuple[int, ...]
    k_star: int = 0


@dataclass(frozen=True)
class EquilibriumCheck:
    consumer_surplus: bool
    profit_max: bool
    market_clearing: bool
    exhaustive: bool

    def __bool__(self) -> bool:
        return self.consumer_surplus and self.profit_max and self.market_clearing


@dataclass
class SpotTrace:
    prices: list[Fraction] = field(default_factory=list)
    purchases: np.ndarray | None = None  # N x T, 1 if consumer bought in slot
    topups: list[int] = field(default_factory=list)
    histograms: list[tuple[int, ...]] = field(default_factory=list)
    holdings: list[int] = field(default_factory=list)
    payments: list[Fraction] = field(default_factory=list)
    utilities: list[Fraction] = field(default_factory=list)
    supplier_profit: Fraction = Fraction(0)
    topup_cost: Fraction = Fraction(0)

    @property
    def consumer_net(self) -> list[Fraction]:
        return [u - pay for u, pay in zip(self.utilities, self.payments)]

    @property
    def welfare(self) -> Fraction:
        return sum(self.utilities, Fraction(0)) - self.topup_cost


@dataclass(frozen=True)
class GapReport:
    forward: Fraction
    spot: Fraction

    @property
    def gap(self) -> Fraction:
        return self.forward - self.spot


def _check_horizon(r, U: UtilitySpec):
    if len(r) != U.horizon:
        raise ValueError(f"supply has {len(r)} slots but U covers horizon {U.horizon}")


def welfare(h, y: Iterable[int], r: Iterable[int], U: UtilitySpec, c_da) -> Fraction:
    """Total utility minus day-ahead spend, for a feasible ``(h, y)``."""
    r, y = as_vector(r), as_vector(y)
    h = as_profile(h, len(r))
    supply = [a + b for a, b in zip(r, y)]
    if len(y) != len(r) or not weakly_majorizes(duration_vector(h), supply):
        raise InfeasibleAllocationError(f"supply {supply} cannot serve durations {h.durations}")
    return sum((U(hi) for hi in h), Fraction(0)) - as_price(c_da) * sum(y)


def convex_k_star(U: UtilitySpec, c_da) -> int:
    """Smallest ``k < T`` whose average remaining increment reaches ``c_da``, else T."""
    T = U.horizon
    c = as_price(c_da)
    for k in range(T):
        if (U(T) - U(k)) / (T - k) >= c:
            return k
    return T


def concave_k_star(U: UtilitySpec, c_da) -> int:
    """Largest ``k`` with ``U(k) - U(k-1) >= c_da``, or 0 if none.

    Under non-increasing increments this is the duration each consumer
    would extend to when paying ``c_da`` per slot.
    """
    c = as_price(c_da)
    k = 0
    for h, inc in enumerate(U.increments, start=1):
        if inc >= c:
            k = h
    return k


def _check_population(r_desc, N, U):
    if U.curvature == CONVEX and r_desc and N < r_desc[0]:
        raise MarketPreconditionError(f"need N >= max(r) = {r_desc[0]}, got N = {N}")
    if U.curvature == CONCAVE and N < sum(r_desc):
        raise MarketPreconditionError(f"need N >= sum(r) = {sum(r_desc)}, got N = {N}")


def social_welfare_optimum(r: Sequence[int], N: int, U: UtilitySpec, c_da) -> WelfareOptimum:
    r = as_vector(r)
    _check_horizon(r, U)
    T = len(r)
    r_desc = sort_desc(r)
    _check_population(r_desc, N, U)
    if U.curvature == CONVEX:
        k = convex_k_star(U, c_da)
        if k == 0:
            d = (N,) * T
        else:
            d = tuple(r_desc[t] if t < k - 1 else r_desc[k - 1] for t in range(T))
    else:
        k = concave_k_star(U, c_da)
        if k == 0:
            d = (sum(r),) + (0,) * (T - 1) if T else ()
        else:
            d = tuple(N if t < k else 0 for t in range(T))
    dv = DurationVector(d, N)
    h = demand_profile(dv)
    y = oracle_purchase(r, d, c_da).purchases
    return WelfareOptimum(k, dv, h, y, welfare(h, y, r, U, c_da))


def equilibrium(r: Sequence[int], N: int, U: UtilitySpec, c_da) -> EquilibriumOutcome:
    """Prices, production and consumption of an efficient competitive equilibrium.

    Convex utilities are priced at ``pi(h) = U(h)``; concave ones at
    ``pi(h) = min(c_da, U(1)) * h``.
    """
    r = as_vector(r)
    _check_horizon(r, U)
    T = len(r)
    c = as_price(c_da)
    r_desc = sort_desc(r)
    _check_population(r_desc, N, U)
    n = [0] * T
    if U.curvature == CONVEX:
        k = convex_k_star(U, c)
        prices = U.values
        if k == 0:
            n[T - 1] = N
        else:
            padded = r_desc + (0,)
            for t in range(1, k):
                n[t - 1] = padded[t - 1] - padded[t]
            n[T - 1] = r_desc[k - 1]
    else:
        k = concave_k_star(U, c)
        mu = min(c, U(1))
        prices = tuple(mu * h for h in range(T + 1))
        if k == 0:
            if T:
                n[0] = sum(r)
        else:
            n[k - 1] = N
    durations = [t for t in range(T, 0, -1) for _ in range(n[t - 1])]
    durations += [0] * (N - len(durations))
    h = DemandProfile(tuple(durations), T)
    y = oracle_purchase(r, duration_vector(h), c).purchases
    return EquilibriumOutcome(tuple(prices), tuple(n), h, y, k)


def _bundle_d(n: Sequence[int]) -> tuple[int, ...]:
    # d_t = sum_{i >= t} n_i
    d, acc = [], 0
    for count in reversed(n):
        acc += count
        d.append(acc)
    return tuple(reversed(d))


def _profit(n, prices, r, c) -> Fraction:
    revenue = sum((count * prices[t] for t, count in enumerate(n, start=1)), Fraction(0))
    return revenue - c * shortfall(r, _bundle_d(n))


def _best_profit_exhaustive(r, N, prices, c) -> Fraction:
    T = len(r)
    best = None
    for combo in combinations_with_replacement(range(T + 1), N):
        counts = Counter(combo)
        n = [counts.get(t, 0) for t in range(1, T + 1)]
        value = _profit(n, prices, r, c)
        if best is None or value > best:
            best = value
    return best if best is not None else Fraction(0)


def _neighbours(n, N):
    T = len(n)
    total = sum(n)
    for t in range(T):
        if total < N:
            yield [v + (i == t) for i, v in enumerate(n)]
        if n[t] > 0:
            yield [v - (i == t) for i, v in enumerate(n)]
            for s in range(T):
                if s != t:
                    yield [v - (i == t) + (i == s) for i, v in enumerate(n)]


def check_equilibrium(out: EquilibriumOutcome, r: Sequence[int], U: UtilitySpec, c_da) -> EquilibriumCheck:
    """Test the three equilibrium conditions on ``out``.

    Profit maximization is checked over every bundle of at most N services
    when ``T <= 6`` and ``N <= 20``; above that only single-service changes
    to ``out.production`` are tried.
    """
    r = as_vector(r)
    c = as_price(c_da)
    T = len(r)
    N = len(out.demand)
    prices = tuple(out.prices)
    if len(prices) != T + 1 or prices[0] != 0:
        raise ValueError("price menu must list pi(0..T) with pi(0) = 0")

    surplus = [U(h) - prices[h] for h in range(T + 1)]
    best_surplus = max(surplus)
    consumer_ok = all(surplus[h] == best_surplus for h in out.demand)

    counts = Counter(out.demand.durations)
    clearing_ok = list(out.production) == [counts.get(t, 0) for t in range(1, T + 1)]

    n = list(out.production)
    y = as_vector(out.dayahead_purchase)
    supply = [a + b for a, b in zip(r, y)]
    feasible = len(y) == T and weakly_majorizes(_bundle_d(n), supply)
    exhaustive = T <= EXHAUSTIVE_MAX_T and N <= EXHAUSTIVE_MAX_N
    if not feasible or sum(n) > N:
        profit_ok = False
    else:
        revenue = sum((count * prices[t] for t, count in enumerate(n, start=1)), Fraction(0))
        own = revenue - c * sum(y)
        if exhaustive:
            profit_ok = own >= _best_profit_exhaustive(r, N, prices, c)
        else:
            profit_ok = all(own >= _profit(m, prices, r, c) for m in _neighbours(n, N))
    return EquilibriumCheck(consumer_ok, profit_ok, clearing_ok, exhaustive)


def verify_equilibrium(out: EquilibriumOutcome, r, U: UtilitySpec, c_da) -> bool:
    return bool(check_equilibrium(out, r, U, c_da))


def _bid_groups(held_max: int, U: UtilitySpec):
    # holdings ordered by willingness to pay, highest first
    if U.curvature == CONVEX:
        return range(held_max, -1, -1)
    return range(0, held_max + 1)


def spot_price(t: int, r_t: int, x: Sequence[int], U: UtilitySpec, c_rt,
               n_consumers: int | None = None) -> Fraction:
    """Clearing price of slot ``t`` (0-based) in the myopic spot market.

    ``x[j]`` is the number of consumers holding ``j`` kW-slots from the
    ``t`` earlier markets, so ``len(x) == t + 1``. Walking the holder
    groups from highest to lowest willingness, the price is
    ``min(c_rt, U(j+1) - U(j))`` for the first group ``j`` that free supply
    ``r_t`` cannot cover, and 0 once ``r_t`` covers every consumer.
    """
    c = as_price(c_rt)
    x = as_vector(x)
    if len(x) != t + 1:
        raise ValueError(f"slot {t} needs a histogram of length {t + 1}, got {len(x)}")
    N = sum(x)
    if n_consumers is not None and n_consumers != N:
        raise ValueError(f"histogram sums to {N}, expected {n_consumers}")
    covered = 0
    for held in _bid_groups(t, U):
        covered += x[held]
        if r_t < covered:
            return min(c, U.marginal(held))
    return Fraction(0)


def spot_simulate(r: Sequence[int], N: int, U: UtilitySpec, c_rt) -> SpotTrace:
    """Run the ``T`` sequential spot markets with myopic consumers.

    Consumers whose bid equals the price buy. Free power goes to the
    highest bidders first, ties to the lower consumer index. The supplier
    tops up from the real-time market only when the price equals ``c_rt``.
    """
    r = as_vector(r)
    _check_horizon(r, U)
    c = as_price(c_rt)
    T = len(r)
    trace = SpotTrace(purchases=np.zeros((N, T), dtype=np.int64))
    held = [0] * N
    paid = [Fraction(0)] * N
    for t in range(T):
        x = tuple(sum(1 for v in held if v == j) for j in range(t + 1))
        price = spot_price(t, r[t], x, U, c, N)
        bids = [U.marginal(held[i]) for i in range(N)]
        buyers = sorted((i for i in range(N) if bids[i] >= price), key=lambda i: (-bids[i], i))
        if price == c:
            sold = len(buyers)
        else:
            sold = min(r[t], len(buyers))
        topup = max(0, sold - r[t])
        for i in buyers[:sold]:
            held[i] += 1
            paid[i] += price
            trace.purchases[i, t] = 1
        trace.prices.append(price)
        trace.topups.append(topup)
        trace.histograms.append(x)
    trace.holdings = held
    trace.payments = paid
    trace.utilities = [U(v) for v in held]
    trace.topup_cost = c * sum(trace.topups)
    trace.supplier_profit = sum(paid, Fraction(0)) - trace.topup_cost
    return trace


def efficiency_gap(r: Sequence[int], N: int, U: UtilitySpec, price) -> GapReport:
    """Forward-market optimum versus spot-market outcome at ``c_da = c_rt``."""
    forward = social_welfare_optimum(r, N, U, price).welfare
    spot = spot_simulate(r, N, U, price).welfare
    return GapReport(forward, spot)
