"""Rate-constrained energy services ``(E, m)`` as bundles of unit-rate loads.

A consumer asking for ``E`` kW-slots at no more than ``m`` kW per slot is,
for allocation purposes, the same as ``m`` unit loads: with
``E = k*m + r`` and ``0 <= r < m``, ``r`` of them last ``k + 1`` slots and
``m - r`` last ``k``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .demand import DemandProfile


class UnservableSpecError(ValueError):
    pass


@dataclass(frozen=True)
class RateSpec:
    energy: int
    max_rate: int
    horizon: int

    def __post_init__(self):
        if self.energy < 0 or self.max_rate < 0 or self.horizon < 0:
            raise ValueError(f"negative field in {self}")
        if self.energy > self.max_rate * self.horizon:
            raise UnservableSpecError(
                f"energy {self.energy} exceeds max_rate * horizon = {self.max_rate * self.horizon}"
            )

    def split(self) -> tuple[int, int]:
        """``(k, r)`` with ``energy = k * max_rate + r`` and ``r < max_rate``."""
        if self.max_rate == 0:
            return 0, 0
        return divmod(self.energy, self.max_rate)

    def unit_durations(self) -> tuple[int, ...]:
        k, r = self.split()
        return (k + 1,) * r + (k,) * (self.max_rate - r)


def decompose(spec: RateSpec) -> DemandProfile:
    return DemandProfile(spec.unit_durations(), spec.horizon)


def compose_allocation(unit_rows: Iterable[Sequence[int]], spec: RateSpec | None = None) -> np.ndarray:
    """Sum binary unit-load rows into one rate allocation.

    With ``spec`` the row sums must match :meth:`RateSpec.unit_durations`
    as a multiset.
    """
    rows = np.asarray(list(unit_rows), dtype=np.int64)
    if spec is not None:
        rows = rows.reshape(-1, spec.horizon)
    if rows.size and not np.isin(rows, (0, 1)).all():
        raise ValueError("unit rows must be binary")
    if spec is not None:
        got = sorted(rows.sum(axis=1).tolist(), reverse=True)
        want = list(spec.unit_durations())
        if got != want:
            raise ValueError(f"row sums {got} do not match the decomposition {want}")
        if rows.shape[0] == 0:
            return np.zeros(spec.horizon, dtype=np.int64)
    if rows.ndim != 2 or rows.shape[0] == 0:
        raise ValueError("need at least one unit row, or a spec for the empty case")
    return rows.sum(axis=0)


def split_allocation(A: Sequence[int], spec: RateSpec) -> np.ndarray:
    """Peel a rate allocation into ``max_rate`` binary unit rows.

    Row ``n`` takes the ``k + 1`` (first ``r`` rows) or ``k`` (remaining
    rows) slots with the largest leftover allocation; ties go to the
    earliest slot.
    """
    A = np.asarray(A, dtype=np.int64)
    m = spec.max_rate
    if A.shape != (spec.horizon,):
        raise ValueError(f"allocation must have {spec.horizon} slots")
    if A.min(initial=0) < 0 or A.max(initial=0) > m or int(A.sum()) != spec.energy:
        raise ValueError(f"allocation {A.tolist()} violates 0 <= A_t <= {m}, sum = {spec.energy}")
    left = A.copy()
    rows = np.zeros((m, spec.horizon), dtype=np.int64)
    for n, width in enumerate(spec.unit_durations()):
        order = sorted(range(spec.horizon), key=lambda t: (-left[t], t))[:width]
        if any(left[t] == 0 for t in order):
            raise ValueError(f"cannot peel row {n}: fewer than {width} slots left")
        rows[n, order] = 1
        left -= rows[n]
    return rows
