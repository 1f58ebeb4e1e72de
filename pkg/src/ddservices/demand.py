"""Demand profiles of unit-power loads and their demand-duration vectors."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator


@dataclass(frozen=True)
class DemandProfile:
    """Per-load service durations ``h_i`` over a horizon of ``horizon`` slots.

    Zero-duration loads are allowed; they model consumers who end up with no
    service in a market outcome.
    """

    durations: tuple[int, ...]
    horizon: int

    def __post_init__(self):
        object.__setattr__(self, "durations", tuple(int(h) for h in self.durations))
        if self.horizon < 0:
            raise ValueError(f"horizon must be non-negative, got {self.horizon}")
        bad = [h for h in self.durations if not 0 <= h <= self.horizon]
        if bad:
            raise ValueError(f"durations {bad} outside [0, {self.horizon}]")

    def __iter__(self) -> Iterator[int]:
        return iter(self.durations)

    def __len__(self) -> int:
        return len(self.durations)

    @property
    def energy(self) -> int:
        return sum(self.durations)


@dataclass(frozen=True)
class DurationVector:
    """``counts[t]`` loads need at least ``t + 1`` slots; ``population`` is N."""

    counts: tuple[int, ...]
    population: int

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        object.__setattr__(self, "counts", counts)
        if any(c < 0 for c in counts):
            raise ValueError(f"counts must be non-negative: {counts}")
        if any(a < b for a, b in zip(counts, counts[1:])):
            raise ValueError(f"duration vector must be non-increasing: {counts}")
        if counts and counts[0] > self.population:
            raise ValueError(
                f"d_1 = {counts[0]} exceeds the population {self.population}"
            )

    def __iter__(self) -> Iterator[int]:
        return iter(self.counts)

    def __len__(self) -> int:
        return len(self.counts)

    def __getitem__(self, t):
        return self.counts[t]

    @property
    def horizon(self) -> int:
        return len(self.counts)


def as_profile(h, horizon: int | None = None) -> DemandProfile:
    """Coerce a plain duration sequence into a :class:`DemandProfile`."""
    if isinstance(h, DemandProfile):
        if horizon is not None and horizon != h.horizon:
            raise ValueError(f"horizon mismatch: {h.horizon} != {horizon}")
        return h
    durations = tuple(int(x) for x in h)
    if horizon is None:
        horizon = max(durations, default=0)
    return DemandProfile(durations, horizon)


def duration_vector(h: DemandProfile) -> DurationVector:
    counts = [0] * h.horizon
    for hi in h.durations:
        for t in range(hi):
            counts[t] += 1
    return DurationVector(tuple(counts), len(h.durations))


def demand_profile(d: DurationVector | Iterable[int], population: int | None = None) -> DemandProfile:
    """Inverse of :func:`duration_vector`; durations come out non-increasing.

    ``d[t-1] - d[t]`` loads get duration ``t`` and ``N - d[0]`` loads get
    duration zero.
    """
    if not isinstance(d, DurationVector):
        counts = tuple(int(c) for c in d)
        if population is None:
            population = counts[0] if counts else 0
        d = DurationVector(counts, population)
    elif population is not None and population != d.population:
        raise ValueError(f"population mismatch: {d.population} != {population}")
    counts = d.counts + (0,)
    durations: list[int] = []
    for t in range(d.horizon, 0, -1):
        durations.extend([t] * (counts[t - 1] - counts[t]))
    durations.extend([0] * (d.population - (counts[0] if d.horizon else 0)))
    return DemandProfile(tuple(durations), d.horizon)
