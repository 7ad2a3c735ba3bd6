"""Deletion-count estimators from tweet-count differences, and their scoring.

A decrease in an account's total tweet count between two observations is a
lower bound on the tweets it deleted in between: deletions offset by new
posts are invisible, and a flat or rising count supports no inference at all.
These estimators quantify that bound and compare it against actual per-day
deletion records.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from datetime import date
from typing import Iterable, Sequence

import numpy as np

from .ingest import AccountTimeline, DailyDeletionRecord

#: Estimate/actual pairs with an estimate below this are dropped before scoring.
DEFAULT_ESTIMATE_FLOOR = 10

#: Label permutations used for a significance estimate unless overridden.
DEFAULT_PERMUTATIONS = 10_000


def estimate_consecutive(count_start: int, count_end: int) -> int | None:
    """Estimated deletions between two consecutive-day tweet counts.

    Returns the count decrease, or None when the count held or rose
    (no deletions can be inferred then).
    """
    diff = count_start - count_end
    return diff if diff > 0 else None


@dataclass(frozen=True, slots=True)
class DeletionEstimate:
    """Estimated per-day deletions for one account over one interval.

    The interval is half-open on the left: it covers the days after
    ``interval_start`` up to and including ``interval_end``. ``is_gap`` marks
    intervals longer than one day, where the total count decrease is spread
    uniformly across the covered days.
    """

    account_id: int
    interval_start: date
    interval_end: date
    estimated_daily: float
    is_gap: bool

    def __post_init__(self):
        span = (self.interval_end - self.interval_start).days
        if span < 1:
            raise ValueError("interval_end must be after interval_start")
        if self.estimated_daily <= 0:
            raise ValueError("estimated_daily must be positive")
        if self.is_gap != (span > 1):
            raise ValueError("is_gap must reflect the interval length")


def estimate_gap(
    count_start: int,
    count_end: int,
    start: date,
    end: date,
    account_id: int = 0,
) -> DeletionEstimate | None:
    """Per-day deletion estimate across a multi-day observation gap.

    ``start`` is the last day a count was available and ``end`` the next day
    one was; the count decrease is averaged over the days in between. A
    one-day span reduces exactly to the consecutive-day estimate.
    """
    span = (end - start).days
    if span < 1:
        raise ValueError(f"end must be after start, got {start} .. {end}")
    diff = count_start - count_end
    if diff <= 0:
        return None
    return DeletionEstimate(account_id, start, end, diff / span, span > 1)


def estimate_timeline(timeline: AccountTimeline) -> list[DeletionEstimate]:
    """All count-decrease estimates derivable from one account's snapshots.

    Adjacent days with observable counts yield consecutive-day estimates;
    longer spans (suspensions, missing queries) yield gap estimates.
    """
    counts = timeline.available_counts()
    estimates = []
    for (day_a, count_a), (day_b, count_b) in zip(counts, counts[1:]):
        estimate = estimate_gap(count_a, count_b, day_a, day_b, timeline.account_id)
        if estimate is not None:
            estimates.append(estimate)
    return estimates


def estimate_from_sampled_tweets(observations: Iterable[tuple]) -> int | None:
    """Count-difference estimate from sampled tweets of one account.

    Each observation is a (timestamp, tweet count) pair as carried on the
    sampled tweets. Requires at least two observations; applies the
    consecutive-day rule to the chronologically first and last counts.
    """
    ordered = sorted(observations, key=lambda pair: pair[0])
    if len(ordered) < 2:
        return None
    return estimate_consecutive(ordered[0][1], ordered[-1][1])


def ccdf(samples: Sequence[float]) -> list[tuple[float, float]]:
    """Complementary cumulative distribution as (value, fraction >= value).

    Evaluated at each distinct sample value, ascending; the fractions are
    monotone non-increasing and start at 1.0.
    """
    values = np.sort(np.asarray(list(samples), dtype=float))
    if values.size == 0:
        raise ValueError("ccdf requires a non-empty sample")
    distinct = np.unique(values)
    at_least = values.size - np.searchsorted(values, distinct, side="left")
    fractions = at_least / values.size
    return list(zip(distinct.tolist(), fractions.tolist()))


def _ks_statistic(a: np.ndarray, b: np.ndarray) -> float:
    a = np.sort(a)
    b = np.sort(b)
    grid = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, grid, side="right") / a.size
    cdf_b = np.searchsorted(b, grid, side="right") / b.size
    return float(np.abs(cdf_a - cdf_b).max())


@dataclass(frozen=True, slots=True)
class KsResult:
    statistic: float
    p_value: float | None


def ks_two_sample(
    a: Sequence[float],
    b: Sequence[float],
    permutations: int | None = None,
    seed: int | None = None,
) -> KsResult:
    """Two-sided two-sample Kolmogorov-Smirnov statistic D.

    D is the supremum of the absolute difference between the two empirical
    CDFs. When ``permutations`` is given, a significance level is estimated
    by label-permutation resampling with a seeded generator (the +1 adjusted
    count, so p is never exactly zero).
    """
    xs = np.asarray(list(a), dtype=float)
    ys = np.asarray(list(b), dtype=float)
    if xs.size == 0 or ys.size == 0:
        raise ValueError("both samples must be non-empty")
    statistic = _ks_statistic(xs, ys)
    if permutations is None:
        return KsResult(statistic, None)
    if permutations < 1:
        raise ValueError("permutations must be >= 1")
    rng = np.random.default_rng(seed)
    pooled = np.concatenate([xs, ys])
    at_least = 0
    for _ in range(permutations):
        shuffled = rng.permutation(pooled)
        if _ks_statistic(shuffled[: xs.size], shuffled[xs.size :]) >= statistic:
            at_least += 1
    return KsResult(statistic, (at_least + 1) / (permutations + 1))


@dataclass(frozen=True, slots=True)
class PairedDeletion:
    """One estimated/actual pair; ``day`` is None for per-account medians."""

    account_id: int
    day: date | None
    estimated: float
    actual: float


@dataclass(frozen=True, slots=True)
class ComparisonReport:
    """Estimated-vs-actual deletion comparison over paired account/days."""

    paired: tuple[PairedDeletion, ...]
    mean_estimated: float | None
    mean_actual: float | None
    underestimation_fraction: float | None
    ks_statistic: float | None
    ccdf_estimated: tuple[tuple[float, float], ...]
    ccdf_actual: tuple[tuple[float, float], ...]

    @property
    def is_empty(self) -> bool:
        return not self.paired

    @classmethod
    def from_pairs(
        cls,
        pairs: Iterable[PairedDeletion],
        floor: int = DEFAULT_ESTIMATE_FLOOR,
        per_account_median: bool = False,
    ) -> "ComparisonReport":
        """Score pre-paired observations.

        Pairs whose estimate is below ``floor`` are dropped first; with
        ``per_account_median`` the surviving pairs are then reduced to one
        median pair per account.
        """
        kept = [p for p in pairs if p.estimated >= floor]
        if per_account_median:
            kept = _account_medians(kept)
        if not kept:
            return cls((), None, None, None, None, (), ())
        estimated = [p.estimated for p in kept]
        actual = [p.actual for p in kept]
        mean_estimated = float(np.mean(estimated))
        mean_actual = float(np.mean(actual))
        fraction = None
        if mean_actual != 0:
            fraction = (mean_actual - mean_estimated) / mean_actual
        return cls(
            tuple(kept),
            mean_estimated,
            mean_actual,
            fraction,
            ks_two_sample(estimated, actual).statistic,
            tuple(ccdf(estimated)),
            tuple(ccdf(actual)),
        )


def _account_medians(pairs: list[PairedDeletion]) -> list[PairedDeletion]:
    grouped: dict[int, list[PairedDeletion]] = {}
    for pair in pairs:
        grouped.setdefault(pair.account_id, []).append(pair)
    return [
        PairedDeletion(
            account_id,
            None,
            float(np.median([p.estimated for p in group])),
            float(np.median([p.actual for p in group])),
        )
        for account_id, group in sorted(grouped.items())
    ]


def pair_observations(
    estimates: Iterable[DeletionEstimate],
    actuals: Iterable[DailyDeletionRecord],
    include_gaps: bool = True,
) -> list[PairedDeletion]:
    """Pair each actual deletion day with its enclosing estimate interval.

    A day pairs with the interval (start, end] that contains it; when
    hand-built intervals overlap, the one starting latest (then ending
    earliest) wins. Days outside every interval produce no pair.
    """
    by_account: dict[int, list[DeletionEstimate]] = {}
    for estimate in estimates:
        if not include_gaps and estimate.is_gap:
            continue
        by_account.setdefault(estimate.account_id, []).append(estimate)
    for candidates in by_account.values():
        candidates.sort(key=lambda e: (e.interval_start, e.interval_end))

    pairs = []
    for record in actuals:
        candidates = by_account.get(record.account_id)
        if not candidates:
            continue
        day = record.day
        starts = [e.interval_start for e in candidates]
        best: DeletionEstimate | None = None
        for index in range(bisect_left(starts, day) - 1, -1, -1):
            estimate = candidates[index]
            if estimate.interval_end < day:
                if best is not None and estimate.interval_start < best.interval_start:
                    break
                continue
            if best is None:
                best = estimate
            elif estimate.interval_start == best.interval_start and (
                estimate.interval_end < best.interval_end
            ):
                best = estimate
            elif estimate.interval_start < best.interval_start:
                break
        if best is not None:
            pairs.append(
                PairedDeletion(
                    record.account_id,
                    day,
                    best.estimated_daily,
                    float(record.deletion_count),
                )
            )
    return pairs


def compare(
    estimates: Iterable[DeletionEstimate],
    actuals: Iterable[DailyDeletionRecord],
    floor: int = DEFAULT_ESTIMATE_FLOOR,
    include_gaps: bool = True,
    per_account_median: bool = False,
) -> ComparisonReport:
    """Pair estimates with actual deletion records and score the agreement."""
    pairs = pair_observations(estimates, actuals, include_gaps=include_gaps)
    return ComparisonReport.from_pairs(
        pairs, floor=floor, per_account_median=per_account_median
    )
