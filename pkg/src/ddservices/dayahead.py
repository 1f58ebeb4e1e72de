"""Two-stage supplier cost: buy ``y`` day-ahead, top up optimally in real time.

    J(y) = c_da * sum(y) + c_rt * E_r[ shortfall(r + y, d) ]

where ``shortfall`` is the minimum real-time purchase from
:mod:`ddservices.procurement`. The integer problem is solved by exhaustive
search at desk scale; a linear-programming relaxation gives a lower bound
and a starting point for a rounding heuristic on larger horizons.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import linprog

from .majorization import as_vector, sort_desc
from .procurement import as_price, shortfall

log = logging.getLogger(__name__)

EXHAUSTIVE_LIMIT = 250_000


def _as_probability(f):
    if isinstance(f, float):
        return f
    f = Fraction(f)
    if f <= 0:
        raise ValueError(f"scenario probability must be positive, got {f}")
    return f


@dataclass(frozen=True)
class ScenarioDistribution:
    """Finite-support pmf over renewable supply vectors of a common horizon."""

    scenarios: tuple[tuple[tuple[int, ...], Fraction | float], ...]

    def __post_init__(self):
        cleaned = tuple(
            (as_vector(r), _as_probability(f)) for r, f in self.scenarios
        )
        object.__setattr__(self, "scenarios", cleaned)
        if not cleaned:
            raise ValueError("scenario distribution is empty")
        lengths = {len(r) for r, _ in cleaned}
        if len(lengths) != 1:
            raise ValueError(f"scenario vectors have differing lengths {sorted(lengths)}")
        if any(f <= 0 for _, f in cleaned):
            raise ValueError("scenario probabilities must be positive")
        total = sum(f for _, f in cleaned)
        if any(isinstance(f, float) for _, f in cleaned):
            if abs(total - 1.0) > 1e-12:
                raise ValueError(f"probabilities sum to {total}, not 1")
        elif total != 1:
            raise ValueError(f"probabilities sum to {total}, not 1")

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[Sequence[int], object]]):
        return cls(tuple((tuple(r), f) for r, f in pairs))

    @classmethod
    def deterministic(cls, r: Sequence[int]):
        return cls(((tuple(r), Fraction(1)),))

    @property
    def horizon(self) -> int:
        return len(self.scenarios[0][0])


@dataclass(frozen=True)
class TwoStagePrices:
    c_da: Fraction
    c_rt: Fraction

    def __post_init__(self):
        object.__setattr__(self, "c_da", as_price(self.c_da))
        object.__setattr__(self, "c_rt", as_price(self.c_rt))


@dataclass(frozen=True)
class DayAheadResult:
    y: tuple[int, ...]
    cost: Fraction
    y_cap: int
    method: str

    @property
    def at_cap(self) -> bool:
        """True when the minimizer touches the search box boundary."""
        return any(v == self.y_cap for v in self.y)


def expected_cost(y, d, dist: ScenarioDistribution, prices: TwoStagePrices):
    y, d = as_vector(y), as_vector(d)
    if len(y) != dist.horizon or len(d) != dist.horizon:
        raise ValueError("y, d and scenarios must share one horizon")
    recourse = sum(
        f * shortfall([rt + yt for rt, yt in zip(r, y)], d) for r, f in dist.scenarios
    )
    return prices.c_da * sum(y) + prices.c_rt * recourse


def relaxed_cost(y, d, dist: ScenarioDistribution, prices: TwoStagePrices) -> float:
    """``J`` evaluated at a real-valued ``y`` in floating point."""
    y = np.asarray(y, dtype=float)
    d_desc = np.asarray(sort_desc(d), dtype=float)
    d_tails = np.cumsum(d_desc[::-1])[::-1]
    recourse = 0.0
    for r, f in dist.scenarios:
        x = np.sort(np.asarray(r, dtype=float) + y)[::-1]
        x_tails = np.cumsum(x[::-1])[::-1]
        recourse += float(f) * max(0.0, float(np.max(d_tails - x_tails)))
    return float(prices.c_da) * float(y.sum()) + float(prices.c_rt) * recourse


def convexity_probe(d, dist, prices, trials=1000, rng=None, y_max=None, tol=1e-9) -> bool:
    """Sample ``(y1, y2, lam)`` and test the convexity inequality of J."""
    rng = np.random.default_rng(rng)
    T = dist.horizon
    if y_max is None:
        y_max = max(as_vector(d), default=0) + 1
    for _ in range(trials):
        y1 = rng.uniform(0, y_max, T)
        y2 = rng.uniform(0, y_max, T)
        lam = rng.uniform()
        mid = relaxed_cost(lam * y1 + (1 - lam) * y2, d, dist, prices)
        chord = lam * relaxed_cost(y1, d, dist, prices) + (1 - lam) * relaxed_cost(
            y2, d, dist, prices
        )
        if mid > chord + tol:
            return False
    return True


def _exhaustive(d, dist, prices, y_cap):
    best_y, best_cost = None, None
    for y in product(range(y_cap + 1), repeat=dist.horizon):
        cost = expected_cost(y, d, dist, prices)
        if best_cost is None or cost < best_cost:
            best_y, best_cost = y, cost
    return best_y, best_cost


def relaxed_minimize(d, dist, prices, y_cap=None):
    """Solve the continuous relaxation of the day-ahead problem as an LP.

    The sum of the ``k`` smallest entries of ``x`` equals
    ``max_lam k*lam - sum_j (lam - x_j)^+``, so each scenario's shortfall
    becomes a set of linear constraints with auxiliary ``lam`` and ``u``.
    Returns ``(y, value)`` with ``value`` a lower bound on the integer
    optimum within the same box.
    """
    d = sort_desc(d)
    T = dist.horizon
    S = len(dist.scenarios)
    d_tail = np.cumsum(d[::-1])  # d_tail[k-1] = sum of k smallest
    # variable layout: y (T) | z (S) | lam (S*T) | u (S*T*T)
    n_y, n_z, n_lam = T, S, S * T
    n = n_y + n_z + n_lam + S * T * T

    def lam_idx(s, k):
        return n_y + n_z + s * T + k

    def u_idx(s, k, j):
        return n_y + n_z + n_lam + (s * T + k) * T + j

    cost = np.zeros(n)
    cost[:T] = float(prices.c_da)
    for s, (_, f) in enumerate(dist.scenarios):
        cost[n_y + s] = float(prices.c_rt) * float(f)
    A, b = [], []
    for s, (r, _) in enumerate(dist.scenarios):
        for k in range(T):
            # z_s >= D_{k+1} - ((k+1) lam - sum_j u_j)
            row = np.zeros(n)
            row[n_y + s] = -1.0
            row[lam_idx(s, k)] = -(k + 1)
            for j in range(T):
                row[u_idx(s, k, j)] = 1.0
            A.append(row)
            b.append(-float(d_tail[k]))
            for j in range(T):
                # u_j >= lam - r_j - y_j
                row = np.zeros(n)
                row[lam_idx(s, k)] = 1.0
                row[u_idx(s, k, j)] = -1.0
                row[j] = -1.0
                A.append(row)
                b.append(float(r[j]))
    bounds = [(0, y_cap)] * T + [(0, None)] * n_z + [(None, None)] * n_lam + [(0, None)] * (S * T * T)
    res = linprog(cost, A_ub=np.array(A), b_ub=np.array(b), bounds=bounds, method="highs")
    if not res.success:
        raise RuntimeError(f"relaxed day-ahead LP failed: {res.message}")
    return res.x[:T], float(res.fun)


def _local_search(y, d, dist, prices, y_cap):
    y = list(y)
    best = expected_cost(y, d, dist, prices)
    improved = True
    while improved:
        improved = False
        for t, step in product(range(len(y)), (-1, 1)):
            cand = list(y)
            cand[t] += step
            if not 0 <= cand[t] <= y_cap:
                continue
            cost = expected_cost(cand, d, dist, prices)
            if cost < best or (cost == best and cand < y):
                y, best, improved = cand, cost, True
    return tuple(y), best


def _rounded(d, dist, prices, y_cap):
    y_rel, _ = relaxed_minimize(d, dist, prices, y_cap)
    lo = np.floor(y_rel + 1e-9).astype(int)
    T = dist.horizon
    frac = [t for t in range(T) if y_rel[t] - lo[t] > 1e-9]
    best_y, best_cost = None, None
    # try rounding up each subset of at most 12 fractional coordinates
    frac = frac[:12]
    for size in range(len(frac) + 1):
        for ups in combinations(frac, size):
            y = lo.copy()
            y[list(ups)] += 1
            y = tuple(int(min(v, y_cap)) for v in y)
            cost = expected_cost(y, d, dist, prices)
            if best_cost is None or cost < best_cost or (cost == best_cost and y < best_y):
                best_y, best_cost = y, cost
    return _local_search(best_y, d, dist, prices, y_cap)


def minimize_dayahead(d, dist: ScenarioDistribution, prices: TwoStagePrices,
                      y_cap: int | None = None, method: str = "auto") -> DayAheadResult:
    """Integer day-ahead purchase ``y`` in ``[0, y_cap]^T`` minimizing J.

    ``method`` is ``"exhaustive"``, ``"relaxed"`` (LP relaxation, rounding and
    coordinate descent) or ``"auto"``, which enumerates whenever the box has
    at most :data:`EXHAUSTIVE_LIMIT` points. Exhaustive ties resolve to the
    lexicographically smallest ``y``.
    """
    if not isinstance(dist, ScenarioDistribution) or not dist.scenarios:
        raise ValueError("a non-empty ScenarioDistribution is required")
    d = as_vector(d)
    if len(d) != dist.horizon:
        raise ValueError(f"length mismatch: {len(d)} != {dist.horizon}")
    if y_cap is None:
        y_cap = max(d, default=0)
    if method == "auto":
        method = "exhaustive" if (y_cap + 1) ** dist.horizon <= EXHAUSTIVE_LIMIT else "relaxed"
    if method == "exhaustive":
        y, cost = _exhaustive(d, dist, prices, y_cap)
    elif method == "relaxed":
        y, cost = _rounded(d, dist, prices, y_cap)
    else:
        raise ValueError(f"unknown method {method!r}")
    result = DayAheadResult(tuple(y), cost, y_cap, method)
    if result.at_cap:
        log.warning("day-ahead minimizer %s touches the search cap %d", result.y, y_cap)
    return result
