"""Aggregation of raw notices into per-account per-day records and timelines.

Day boundaries are UTC midnight. Account-days below the inclusion threshold
are dropped, not zero-filled: downstream estimators treat the resulting holes
as gap intervals. Aggregation output is deterministic regardless of input
order, so sharded runs merge reproducibly.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from datetime import date
from typing import Callable, Iterable, Iterator, Sequence

from .records import (
    MIN_TIME_ENCODED_ID,
    SNOWFLAKE_EPOCH_MS,
    AccountSnapshot,
    AccountStatus,
    ComplianceNotice,
    NoticeKind,
    RecordParseError,
    snapshot_from_dict,
    snapshot_to_dict,
)

#: Account-days with fewer deletions than this are out of scope.
DEFAULT_INCLUSION_THRESHOLD = 10

_DAY_MS = 86_400_000
_UNIX_EPOCH_ORDINAL = date(1970, 1, 1).toordinal()


class DuplicateSnapshotError(ValueError):
    """Two snapshots for the same (account, day): corrupt input."""


@dataclass(frozen=True, slots=True)
class DailyDeletionRecord:
    """Actual deletions by one account on one UTC day.

    ``deleted_ages_days`` holds the whole-day age of each deleted tweet whose
    ID carries a decodable creation time; undecodable IDs are excluded, so it
    may be shorter than ``deletion_count``. ``tweet_ids`` retains the deleted
    tweet IDs for downstream graph construction. Both tuples are sorted.
    """

    account_id: int
    day: date
    deletion_count: int
    deleted_ages_days: tuple[int, ...]
    tweet_ids: tuple[int, ...]

    def __post_init__(self):
        if self.deletion_count < 1:
            raise ValueError("deletion_count must be >= 1")
        if len(self.tweet_ids) != self.deletion_count:
            raise ValueError("tweet_ids must list exactly deletion_count IDs")
        if len(self.deleted_ages_days) > self.deletion_count:
            raise ValueError("more ages than deletions")


@dataclass(frozen=True, slots=True)
class UnlikeRecord:
    """Total unlike notices for one (liker, tweet) pair over the collection."""

    liker_id: int
    tweet_id: int
    unlike_count: int

    def __post_init__(self):
        if self.unlike_count < 1:
            raise ValueError("unlike_count must be >= 1")


@dataclass(frozen=True, slots=True)
class AccountTimeline:
    """Day-ordered snapshots and deletion records for one account."""

    account_id: int
    snapshots: tuple[AccountSnapshot, ...]
    deletion_days: tuple[DailyDeletionRecord, ...]

    def __post_init__(self):
        for seq, day_of in (
            (self.snapshots, lambda s: s.snapshot_day),
            (self.deletion_days, lambda r: r.day),
        ):
            days = [day_of(item) for item in seq]
            if any(b <= a for a, b in zip(days, days[1:])):
                raise ValueError("timeline days must be strictly increasing")

    def active_days(self) -> tuple[date, ...]:
        return tuple(
            s.snapshot_day for s in self.snapshots if s.status is AccountStatus.ACTIVE
        )

    def suspended_days(self) -> tuple[date, ...]:
        return tuple(
            s.snapshot_day for s in self.snapshots if s.status is AccountStatus.SUSPENDED
        )

    def available_counts(self) -> tuple[tuple[date, int], ...]:
        """(day, tweet count) pairs for days the count was observable."""
        return tuple(
            (s.snapshot_day, s.statuses_count)
            for s in self.snapshots
            if s.status is AccountStatus.ACTIVE and s.statuses_count is not None
        )

    def deletions_by_day(self) -> dict[date, int]:
        return {r.day: r.deletion_count for r in self.deletion_days}

    def final_status(self) -> AccountStatus | None:
        return self.snapshots[-1].status if self.snapshots else None


def aggregate_daily(
    notices: Iterable[ComplianceNotice],
    threshold: int = DEFAULT_INCLUSION_THRESHOLD,
) -> list[DailyDeletionRecord]:
    """Group deletion notices by (account, UTC day), keeping days >= threshold.

    Tweet ages are measured in whole days from the start of the deletion day
    to the ID-encoded creation time, clamped at zero; undecodable IDs
    contribute to the count but not to the age multiset. Output is sorted by
    (account_id, day) and independent of input order.
    """
    if threshold < 1:
        raise ValueError(f"threshold must be >= 1, got {threshold}")
    groups: dict[tuple[int, int], list[int]] = {}
    tweet_delete = NoticeKind.TWEET_DELETE
    for notice in notices:
        if notice.kind is not tweet_delete:
            continue
        key = (notice.actor_id, notice.observed_at.toordinal())
        ids = groups.get(key)
        if ids is None:
            groups[key] = [notice.object_id]
        else:
            ids.append(notice.object_id)

    records = []
    for (account_id, ordinal), ids in groups.items():
        if len(ids) < threshold:
            continue
        day_start_ms = (ordinal - _UNIX_EPOCH_ORDINAL) * _DAY_MS
        ages = []
        for tweet_id in ids:
            if tweet_id < MIN_TIME_ENCODED_ID:
                continue
            age = (day_start_ms - SNOWFLAKE_EPOCH_MS - (tweet_id >> 22)) // _DAY_MS
            ages.append(age if age > 0 else 0)
        ids.sort()
        ages.sort()
        records.append(
            DailyDeletionRecord(
                account_id,
                date.fromordinal(ordinal),
                len(ids),
                tuple(ages),
                tuple(ids),
            )
        )
    records.sort(key=lambda r: (r.account_id, r.day))
    return records


def _aggregate_shard(args) -> list[DailyDeletionRecord]:
    source, threshold = args
    return aggregate_daily(source(), threshold)


def aggregate_daily_sharded(
    shard_sources: Sequence[Callable[[], Iterable[ComplianceNotice]]],
    threshold: int = DEFAULT_INCLUSION_THRESHOLD,
    processes: int | None = None,
) -> list[DailyDeletionRecord]:
    """Aggregate account-disjoint shards in worker processes and merge.

    Each source is a picklable zero-argument callable returning an iterable
    of notices. All notices for a given account must come from a single
    source (shard by account_id hash); violations are detected and raised.
    """
    from multiprocessing import get_context

    sources = list(shard_sources)
    if not sources:
        return []
    if processes is None:
        processes = min(len(sources), os.cpu_count() or 1)
    if processes <= 1 or len(sources) == 1:
        parts = [_aggregate_shard((src, threshold)) for src in sources]
    else:
        # imap so the parent deserializes finished shards while others run
        with get_context().Pool(processes) as pool:
            parts = list(
                pool.imap(_aggregate_shard, [(src, threshold) for src in sources])
            )

    merged: list[DailyDeletionRecord] = [record for part in parts for record in part]
    merged.sort(key=lambda r: (r.account_id, r.day))
    for a, b in zip(merged, merged[1:]):
        if a.account_id == b.account_id and a.day == b.day:
            raise ValueError(
                f"shards are not account-disjoint: account {a.account_id} day {a.day}"
            )
    return merged


def aggregate_unlikes(notices: Iterable[ComplianceNotice]) -> list[UnlikeRecord]:
    """Total unlike count per (liker, tweet) pair, sorted by the pair."""
    counts: dict[tuple[int, int], int] = {}
    unlike = NoticeKind.UNLIKE
    for notice in notices:
        if notice.kind is not unlike:
            continue
        key = (notice.actor_id, notice.object_id)
        counts[key] = counts.get(key, 0) + 1
    return [
        UnlikeRecord(liker_id, tweet_id, count)
        for (liker_id, tweet_id), count in sorted(counts.items())
    ]


def build_timelines(
    snapshots: Iterable[AccountSnapshot],
    daily_records: Iterable[DailyDeletionRecord],
) -> list[AccountTimeline]:
    """Outer-join snapshots and deletion records into per-account timelines.

    Accounts with any deleted-status snapshot are excluded entirely (their
    deletions are platform-driven teardown, not behavior). Duplicate
    (account, day) snapshots are corrupt input and raise.
    """
    snaps_by_account: dict[int, dict[date, AccountSnapshot]] = {}
    removed: set[int] = set()
    for snapshot in snapshots:
        per_account = snaps_by_account.setdefault(snapshot.account_id, {})
        if snapshot.snapshot_day in per_account:
            raise DuplicateSnapshotError(
                f"duplicate snapshot for account {snapshot.account_id} "
                f"on {snapshot.snapshot_day}"
            )
        per_account[snapshot.snapshot_day] = snapshot
        if snapshot.status is AccountStatus.DELETED:
            removed.add(snapshot.account_id)

    records_by_account: dict[int, dict[date, DailyDeletionRecord]] = {}
    for record in daily_records:
        per_account = records_by_account.setdefault(record.account_id, {})
        if record.day in per_account:
            raise ValueError(
                f"duplicate deletion record for account {record.account_id} "
                f"on {record.day}"
            )
        per_account[record.day] = record

    timelines = []
    for account_id in sorted(set(snaps_by_account) | set(records_by_account)):
        if account_id in removed:
            continue
        snaps = snaps_by_account.get(account_id, {})
        records = records_by_account.get(account_id, {})
        timelines.append(
            AccountTimeline(
                account_id,
                tuple(snaps[d] for d in sorted(snaps)),
                tuple(records[d] for d in sorted(records)),
            )
        )
    return timelines


# -- newline-delimited serialization ----------------------------------------


def daily_record_to_dict(record: DailyDeletionRecord) -> dict:
    return {
        "account_id": record.account_id,
        "day": record.day.isoformat(),
        "deletion_count": record.deletion_count,
        "deleted_ages_days": list(record.deleted_ages_days),
        "tweet_ids": list(record.tweet_ids),
    }


def daily_record_from_dict(raw: dict, line_number: int = 0) -> DailyDeletionRecord:
    try:
        return DailyDeletionRecord(
            raw["account_id"],
            date.fromisoformat(raw["day"]),
            raw["deletion_count"],
            tuple(raw["deleted_ages_days"]),
            tuple(raw["tweet_ids"]),
        )
    except (KeyError, TypeError, ValueError) as err:
        raise RecordParseError(f"bad deletion record: {err}", line_number) from None


def unlike_record_to_dict(record: UnlikeRecord) -> dict:
    return {
        "liker_id": record.liker_id,
        "tweet_id": record.tweet_id,
        "unlike_count": record.unlike_count,
    }


def unlike_record_from_dict(raw: dict, line_number: int = 0) -> UnlikeRecord:
    try:
        return UnlikeRecord(raw["liker_id"], raw["tweet_id"], raw["unlike_count"])
    except (KeyError, TypeError, ValueError) as err:
        raise RecordParseError(f"bad unlike record: {err}", line_number) from None


def timeline_to_dict(timeline: AccountTimeline) -> dict:
    return {
        "account_id": timeline.account_id,
        "snapshots": [snapshot_to_dict(s) for s in timeline.snapshots],
        "deletion_days": [daily_record_to_dict(r) for r in timeline.deletion_days],
    }


def timeline_from_dict(raw: dict, line_number: int = 0) -> AccountTimeline:
    try:
        return AccountTimeline(
            raw["account_id"],
            tuple(snapshot_from_dict(s, line_number) for s in raw["snapshots"]),
            tuple(
                daily_record_from_dict(r, line_number) for r in raw["deletion_days"]
            ),
        )
    except (KeyError, TypeError, ValueError) as err:
        raise RecordParseError(f"bad timeline: {err}", line_number) from None


def _write_ndjson(path, items, to_dict) -> int:
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for item in items:
            fh.write(json.dumps(to_dict(item), separators=(",", ":")))
            fh.write("\n")
            count += 1
    return count


def _read_ndjson(path, from_dict) -> Iterator:
    with open(path, encoding="utf-8") as fh:
        for number, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as err:
                raise RecordParseError(f"invalid JSON: {err}", number) from None
            yield from_dict(raw, number)


def write_daily_records(path, records) -> int:
    return _write_ndjson(path, records, daily_record_to_dict)


def read_daily_records(path) -> Iterator[DailyDeletionRecord]:
    return _read_ndjson(path, daily_record_from_dict)


def write_unlike_records(path, records) -> int:
    return _write_ndjson(path, records, unlike_record_to_dict)


def read_unlike_records(path) -> Iterator[UnlikeRecord]:
    return _read_ndjson(path, unlike_record_from_dict)


def write_timelines(path, timelines) -> int:
    return _write_ndjson(path, timelines, timeline_to_dict)


def read_timelines(path) -> Iterator[AccountTimeline]:
    return _read_ndjson(path, timeline_from_dict)
