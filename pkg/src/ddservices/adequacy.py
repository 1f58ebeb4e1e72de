"""Supply adequacy, Least-Laxity-First allocation and allocation checks.

An allocation is an ``N x T`` integer array with entries in ``{0, 1}``;
``A[i, t] == 1`` means load ``i`` draws 1 kW in slot ``t``.
"""
from __future__ import annotations

import json
from typing import Iterable

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_flow

from .demand import DemandProfile, as_profile, duration_vector
from .majorization import as_vector, first_tail_violation, majorizes, weakly_majorizes


class InadequateSupplyError(ValueError):
    """Raised when a supply profile cannot serve the loads.

    ``index`` is the 0-based slot at which the failure was detected: the
    first violated tail sum for an up-front check, or the slot where some
    load's laxity went negative during allocation.
    """

    def __init__(self, index: int, message: str):
        super().__init__(message)
        self.index = index


def _counts(d) -> tuple[int, ...]:
    return as_vector(d)


def is_exactly_adequate(p: Iterable[int], d) -> bool:
    return majorizes(_counts(d), as_vector(p))


def is_adequate(p: Iterable[int], d) -> bool:
    return weakly_majorizes(_counts(d), as_vector(p))


def llf_allocate(p: Iterable[int], h, check: bool = True) -> np.ndarray:
    """Serve loads slot by slot, least laxity first.

    At slot ``t`` the up-to-``p[t]`` unfinished loads with the smallest
    laxity ``T - t - remaining_i`` are served; ties go to the lower load
    index. Surplus power is left unassigned.

    With ``check`` the supply is tested for adequacy first and the error
    carries the first violated tail-sum index. Without it, allocation runs
    until some unfinished load has negative laxity.
    """
    p = as_vector(p)
    T = len(p)
    h = as_profile(h, T)
    if check:
        bad = first_tail_violation(duration_vector(h), p)
        if bad is not None:
            raise InadequateSupplyError(
                bad, f"supply {p} is inadequate: tail sum from slot {bad} is short"
            )
    N = len(h)
    A = np.zeros((N, T), dtype=np.int64)
    remaining = list(h.durations)
    for t in range(T):
        active = [i for i in range(N) if remaining[i] > 0]
        laxity = {i: T - t - remaining[i] for i in active}
        late = [i for i in active if laxity[i] < 0]
        if late:
            raise InadequateSupplyError(
                t, f"loads {late} have negative laxity at slot {t}; supply inadequate"
            )
        active.sort(key=lambda i: (laxity[i], i))
        for i in active[: p[t]]:
            A[i, t] = 1
            remaining[i] -= 1
    if any(remaining):
        # only reachable with check=False on inadequate input
        raise InadequateSupplyError(T, f"loads left unserved: {remaining}")
    return A


def verify_allocation(A, p: Iterable[int], h, exact: bool = False) -> bool:
    """Check row sums equal the durations and column sums respect supply.

    With ``exact`` the column sums must equal the supply.
    """
    p = as_vector(p)
    h = as_profile(h, len(p))
    A = np.asarray(A, dtype=np.int64).reshape(len(h), len(p))
    if not np.isin(A, (0, 1)).all():
        return False
    if A.sum(axis=1).tolist() != list(h.durations):
        return False
    cols = A.sum(axis=0)
    if exact:
        return cols.tolist() == list(p)
    return bool((cols <= np.asarray(p, dtype=np.int64)).all())


def max_served(p: Iterable[int], h) -> int:
    """Maximum load-slots servable from ``p``, by max flow.

    Network: source -> load i (capacity h_i), load i -> slot t (capacity 1),
    slot t -> sink (capacity p_t).
    """
    p = as_vector(p)
    h = as_profile(h, len(p))
    N, T = len(h), len(p)
    if N == 0 or T == 0:
        return 0
    n = N + T + 2
    source, sink = 0, n - 1
    rows = [source] * N
    cols = list(range(1, N + 1))
    caps = list(h.durations)
    for i in range(N):
        rows.extend([1 + i] * T)
        cols.extend(range(1 + N, 1 + N + T))
        caps.extend([1] * T)
    rows.extend(range(1 + N, 1 + N + T))
    cols.extend([sink] * T)
    caps.extend(p)
    graph = csr_matrix(
        (np.asarray(caps, dtype=np.int32), (rows, cols)), shape=(n, n)
    )
    return int(maximum_flow(graph, source, sink).flow_value)


def flow_adequacy_oracle(p: Iterable[int], h) -> bool:
    """Adequacy decided by max flow, independent of any majorization test."""
    h = as_profile(h, len(as_vector(p)))
    return max_served(p, h) == h.energy


def augment_with_fictitious(p: Iterable[int], h) -> DemandProfile:
    """Pad ``h`` with unit loads so total demand equals total supply.

    If ``p`` is adequate for ``h`` it is exactly adequate for the result.
    """
    p = as_vector(p)
    h = as_profile(h, len(p))
    surplus = sum(p) - h.energy
    if surplus < 0:
        raise ValueError(f"supply total {sum(p)} below demand total {h.energy}")
    return DemandProfile(h.durations + (1,) * surplus, h.horizon)


def count_interruptions(row: Iterable[int]) -> int:
    """Number of gaps between maximal served runs in one allocation row."""
    runs = 0
    prev = 0
    for a in row:
        if a and not prev:
            runs += 1
        prev = a
    return max(runs - 1, 0)


def local_minima(q: Iterable[int]) -> int:
    """Count plateaus of ``q`` lower than every existing neighbour."""
    q = list(q)
    if not q:
        return 0
    plateaus = []
    for x in q:
        if plateaus and plateaus[-1] == x:
            continue
        plateaus.append(x)
    count = 0
    for k, x in enumerate(plateaus):
        left = plateaus[k - 1] if k > 0 else None
        right = plateaus[k + 1] if k + 1 < len(plateaus) else None
        if (left is None or left > x) and (right is None or right > x):
            count += 1
    return count


def allocation_to_json(A) -> str:
    return json.dumps(np.asarray(A, dtype=np.int64).tolist(), separators=(",", ":"))


def allocation_from_json(text: str, horizon: int) -> np.ndarray:
    rows = json.loads(text)
    return np.asarray(rows, dtype=np.int64).reshape(len(rows), horizon)
