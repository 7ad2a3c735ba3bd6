"""Seeded synthetic event streams and snapshots with labeled ground truth.

Every generated dataset is internally consistent by construction: each
snapshot count equals the initial count plus cumulative posts minus
cumulative deletions, so downstream estimators and detectors can be checked
against exact per-account truth. The same seed always produces byte-identical
output files.

Two kinds of deliberate imperfection are available for exercising edge
paths: ``gap_days`` drop snapshots (suspension-style observation gaps) and
``stale_days`` report counts that ignore that day's deletions (a lagging
count source). Stale days break the consistency identity on purpose, so
downstream labels may diverge from truth there.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from datetime import date, timedelta
from enum import Enum
from pathlib import Path

import numpy as np

from .behavior import Category
from .flooding import DEFAULT_DAILY_LIMIT
from .ingest import DEFAULT_INCLUSION_THRESHOLD
from .records import (
    MIN_TIME_ENCODED_ID,
    SNOWFLAKE_EPOCH_MS,
    AccountSnapshot,
    AccountStatus,
    ComplianceNotice,
    NoticeKind,
    ms_to_datetime,
)

_DAY_MS = 86_400_000
_UNIX_EPOCH_ORDINAL = date(1970, 1, 1).toordinal()


class ProfileKind(str, Enum):
    NORMAL_DELETER = "normal_deleter"
    MASS_DELETER = "mass_deleter"
    FLOODER = "flooder"
    LIKE_FARM_HUB = "like_farm_hub"
    LIKE_FARM_SPOKE = "like_farm_spoke"
    IDLE = "idle"


#: Per-day deletion ceiling observed for bulk-deletion tooling that walks the
#: most recent retrievable timeline page.
TIMELINE_RETRIEVAL_CAP = 3200


@dataclass(frozen=True)
class BehaviorProfile:
    """Parameters for one synthetic behavior.

    ``delete_days`` lists the window day indices on which the account
    deletes (None means every day). Flood days must leave the previous day's
    snapshot intact to be detectable downstream. Spokes are never generated
    directly: a ``like_farm_hub`` cohort spawns ``farm_size`` spokes per hub.
    """

    kind: ProfileKind
    post_rate: float = 0.0
    delete_rate: float = 0.0
    delete_days: tuple[int, ...] | None = None
    min_daily_deletions: int = DEFAULT_INCLUSION_THRESHOLD
    age_median_days: float = 0.0
    age_sigma: float = 0.75
    cycle_posts: int = 2400
    cycles_per_day: int = 6
    flood_days: tuple[int, ...] = ()
    farm_size: int = 0
    farm_tweets: int = 10
    farm_day: int = 0
    spoke_unlikes: int = 5
    gap_days: tuple[int, ...] = ()
    stale_days: tuple[int, ...] = ()
    initial_count: int = 50_000
    seed: int = 0

    def __post_init__(self):
        if not isinstance(self.kind, ProfileKind):
            object.__setattr__(self, "kind", ProfileKind(self.kind))
        for name in ("delete_days", "flood_days", "gap_days", "stale_days"):
            value = getattr(self, name)
            if value is not None and not isinstance(value, tuple):
                object.__setattr__(self, name, tuple(value))
        if self.post_rate < 0 or self.delete_rate < 0:
            raise ValueError("rates must be non-negative")
        if self.min_daily_deletions < 1:
            raise ValueError("min_daily_deletions must be >= 1")
        if self.cycle_posts < 1 or self.cycles_per_day < 1:
            raise ValueError("flood cycle parameters must be >= 1")
        if self.farm_size < 0 or self.farm_tweets < 1 or self.spoke_unlikes < 1:
            raise ValueError("farm parameters out of range")
        if self.initial_count < 0:
            raise ValueError("initial_count must be >= 0")


@dataclass(frozen=True)
class Cohort:
    profile: BehaviorProfile
    count: int

    def __post_init__(self):
        if self.count < 0:
            raise ValueError(f"cohort count must be >= 0, got {self.count}")


@dataclass(frozen=True)
class PopulationSpec:
    cohorts: tuple[Cohort, ...]
    days: int = 30
    start_day: date = date(2021, 4, 26)

    def __post_init__(self):
        if self.days < 1:
            raise ValueError(f"days must be >= 1, got {self.days}")
        if not isinstance(self.cohorts, tuple):
            object.__setattr__(self, "cohorts", tuple(self.cohorts))


@dataclass(frozen=True)
class PlantedFarm:
    hub_id: int
    spoke_ids: tuple[int, ...]
    tweet_id: int
    spoke_unlikes: int


@dataclass(frozen=True)
class GroundTruth:
    """Exact per-account activity and labels for a generated dataset."""

    days: int
    start_day: date
    daily_posts: dict[int, tuple[int, ...]]
    daily_deletions: dict[int, tuple[int, ...]]
    categories: dict[int, Category]
    kinds: dict[int, ProfileKind]
    flood_days: dict[int, tuple[int, ...]]
    stale_days: dict[int, tuple[int, ...]]
    farms: tuple[PlantedFarm, ...] = field(default_factory=tuple)


@dataclass(frozen=True)
class SyntheticDataset:
    notices: tuple[ComplianceNotice, ...]
    snapshots: tuple[AccountSnapshot, ...]
    truth: GroundTruth


_DESCRIPTIONS = {
    ProfileKind.NORMAL_DELETER: (
        "coffee first, opinions later",
        "posting through it",
        "here for the threads",
        "dog photos and hot takes",
    ),
    ProfileKind.MASS_DELETER: (
        "spring cleaning my feed",
        "backup account, wiping often",
        "privacy matters, old posts go",
        "fresh start every month",
    ),
    ProfileKind.FLOODER: (
        "promo deals every hour",
        "follow for giveaways and promo codes",
        "nonstop updates, turn on notifications",
        "24/7 promo stream",
    ),
    ProfileKind.LIKE_FARM_HUB: (
        "follow back train, promo boost",
        "grow your followers fast",
        "engagement boost services",
        "promo hub, follow train daily",
    ),
    ProfileKind.LIKE_FARM_SPOKE: (
        "follow train rider",
        "follow back instantly",
        "like for like, follow train",
        "boost crew member",
    ),
    ProfileKind.IDLE: (
        "",
        "lurking",
        "mostly reading",
    ),
}


class _IdAllocator:
    """Unique tweet IDs: time-encoded when creation is in range, legacy below."""

    def __init__(self):
        self._sequence = 0
        self._legacy = 0

    def for_creation_ms(self, created_ms: int) -> int:
        if created_ms < SNOWFLAKE_EPOCH_MS:
            self._legacy += 1
            if self._legacy >= MIN_TIME_ENCODED_ID:
                raise ValueError("legacy ID space exhausted")
            return self._legacy
        self._sequence += 1
        return ((created_ms - SNOWFLAKE_EPOCH_MS) << 22) | (
            self._sequence & 0x3FFFFF
        )


def _day_start_ms(start_day: date, day_index: int) -> int:
    return (start_day.toordinal() - _UNIX_EPOCH_ORDINAL + day_index) * _DAY_MS


def _event_ms(day_start: int, index: int, count: int) -> int:
    # Spread events over 01:00..23:00 so every event stays inside its day.
    return day_start + 3_600_000 + (index * 79_200_000) // count


class _Account:
    def __init__(self, account_id: int, profile: BehaviorProfile, days: int):
        self.account_id = account_id
        self.profile = profile
        self.posts = [0] * days
        self.deletions = [0] * days


def _plan_activity(account: _Account, rng: np.random.Generator, days: int) -> None:
    profile = account.profile
    kind = profile.kind
    flood_days = set(profile.flood_days)
    delete_days = (
        set(range(days)) if profile.delete_days is None else set(profile.delete_days)
    )
    for day in range(days):
        if kind is ProfileKind.FLOODER and day in flood_days:
            account.posts[day] = profile.cycle_posts * profile.cycles_per_day
            account.deletions[day] = profile.cycle_posts * (profile.cycles_per_day - 1)
            continue
        if kind is ProfileKind.LIKE_FARM_HUB:
            if day == profile.farm_day:
                deleted = max(profile.min_daily_deletions, profile.farm_tweets)
                account.posts[day] = deleted
                account.deletions[day] = deleted
            continue
        if profile.post_rate > 0:
            account.posts[day] = int(rng.poisson(profile.post_rate))
        if kind in (ProfileKind.IDLE, ProfileKind.LIKE_FARM_SPOKE):
            continue
        if profile.delete_rate > 0 and day in delete_days:
            drawn = max(profile.min_daily_deletions, int(rng.poisson(profile.delete_rate)))
            if kind is ProfileKind.MASS_DELETER:
                drawn = min(TIMELINE_RETRIEVAL_CAP, drawn)
            account.deletions[day] = drawn


def _deletion_notices(
    account: _Account,
    rng: np.random.Generator,
    start_day: date,
    alloc: _IdAllocator,
    notices: list,
) -> list[int]:
    """Emit deletion events for the account; returns farm-day tweet IDs."""
    profile = account.profile
    aged = profile.age_median_days > 0
    log_median = math.log(profile.age_median_days) if aged else 0.0
    farm_tweet_ids: list[int] = []
    for day, count in enumerate(account.deletions):
        if count == 0:
            continue
        day_start = _day_start_ms(start_day, day)
        ages_ms = None
        if aged:
            ages = rng.lognormal(mean=log_median, sigma=profile.age_sigma, size=count)
            ages_ms = (ages * _DAY_MS).astype(np.int64)
        for index in range(count):
            at_ms = _event_ms(day_start, index, count)
            if ages_ms is None:
                created_ms = at_ms - 1_800_000
            else:
                created_ms = at_ms - int(ages_ms[index])
            tweet_id = alloc.for_creation_ms(created_ms)
            if (
                profile.kind is ProfileKind.LIKE_FARM_HUB
                and day == profile.farm_day
            ):
                farm_tweet_ids.append(tweet_id)
            notices.append(
                ComplianceNotice(
                    NoticeKind.TWEET_DELETE,
                    account.account_id,
                    tweet_id,
                    ms_to_datetime(at_ms),
                )
            )
    return farm_tweet_ids


def _snapshots(
    account: _Account,
    rng: np.random.Generator,
    start_day: date,
    days: int,
    snapshots: list,
) -> None:
    profile = account.profile
    pool = _DESCRIPTIONS[profile.kind]
    description = pool[int(rng.integers(len(pool)))]
    created_at = ms_to_datetime(
        _day_start_ms(start_day, 0)
        - (300 + (account.account_id * 37) % 2000) * _DAY_MS
    )
    gap_days = set(profile.gap_days)
    stale_days = set(profile.stale_days)
    running = profile.initial_count
    for day in range(days):
        running += account.posts[day] - account.deletions[day]
        if running < 0:
            raise ValueError(
                f"account {account.account_id}: initial_count {profile.initial_count}"
                " is too small for the profile's deletion volume"
            )
        if day in gap_days:
            continue
        reported = running + (account.deletions[day] if day in stale_days else 0)
        snapshot_day = start_day + timedelta(days=day)
        snapshots.append(
            AccountSnapshot(
                account.account_id,
                snapshot_day,
                reported,
                AccountStatus.ACTIVE,
                description,
                created_at,
                ms_to_datetime(_day_start_ms(start_day, day + 1) + 35 * 60_000),
            )
        )


def _unlike_notices(
    farm: PlantedFarm, start_day: date, farm_day: int, notices: list
) -> None:
    day_start = _day_start_ms(start_day, farm_day)
    for spoke_index, spoke_id in enumerate(farm.spoke_ids):
        for repeat in range(farm.spoke_unlikes):
            at_ms = day_start + 3_600_000 + spoke_index * 60_000 + repeat * 1_000
            notices.append(
                ComplianceNotice(
                    NoticeKind.UNLIKE, spoke_id, farm.tweet_id, ms_to_datetime(at_ms)
                )
            )


def _true_category(account: _Account, days: int) -> Category | None:
    deleting = sum(
        1 for count in account.deletions if count >= DEFAULT_INCLUSION_THRESHOLD
    )
    if any(posted > DEFAULT_DAILY_LIMIT for posted in account.posts):
        return Category.SUSPICIOUS
    if deleting == 0:
        return None
    if deleting == 1:
        return Category.ONE_DAY
    if deleting == days:
        return Category.THIRTY_DAY
    return Category.OTHER


def _check_day_indices(profile: BehaviorProfile, days: int) -> None:
    named = {
        "delete_days": profile.delete_days or (),
        "flood_days": profile.flood_days,
        "gap_days": profile.gap_days,
        "stale_days": profile.stale_days,
    }
    for name, indices in named.items():
        for index in indices:
            if not 0 <= index < days:
                raise ValueError(f"{name} index {index} outside window of {days} days")
    if profile.kind is ProfileKind.LIKE_FARM_HUB and not 0 <= profile.farm_day < days:
        raise ValueError(f"farm_day {profile.farm_day} outside window of {days} days")


def generate(spec: PopulationSpec, seed: int) -> SyntheticDataset:
    """Generate a labeled dataset for a population specification.

    Account IDs are assigned sequentially in cohort order (hubs directly
    followed by their spokes). Events are sorted by time, snapshots by day,
    and all randomness flows from the given seed.
    """
    notices: list[ComplianceNotice] = []
    snapshots: list[AccountSnapshot] = []
    truth_posts: dict[int, tuple[int, ...]] = {}
    truth_deletions: dict[int, tuple[int, ...]] = {}
    categories: dict[int, Category] = {}
    kinds: dict[int, ProfileKind] = {}
    flood_days: dict[int, tuple[int, ...]] = {}
    stale_days: dict[int, tuple[int, ...]] = {}
    farms: list[PlantedFarm] = []

    alloc = _IdAllocator()
    next_id = 1
    for cohort_index, cohort in enumerate(spec.cohorts):
        profile = cohort.profile
        if profile.kind is ProfileKind.LIKE_FARM_SPOKE:
            raise ValueError("like_farm_spoke cohorts are spawned by like_farm_hub")
        _check_day_indices(profile, spec.days)
        for account_index in range(cohort.count):
            rng = np.random.default_rng(
                [seed & 0xFFFFFFFFFFFFFFFF, profile.seed, cohort_index, account_index]
            )
            account = _Account(next_id, profile, spec.days)
            next_id += 1
            spoke_ids: tuple[int, ...] = ()
            if profile.kind is ProfileKind.LIKE_FARM_HUB:
                spoke_ids = tuple(range(next_id, next_id + profile.farm_size))
                next_id += profile.farm_size

            _plan_activity(account, rng, spec.days)
            farm_tweets = _deletion_notices(
                account, rng, spec.start_day, alloc, notices
            )
            _snapshots(account, rng, spec.start_day, spec.days, snapshots)

            truth_posts[account.account_id] = tuple(account.posts)
            truth_deletions[account.account_id] = tuple(account.deletions)
            kinds[account.account_id] = profile.kind
            category = _true_category(account, spec.days)
            if category is not None:
                categories[account.account_id] = category
            if profile.kind is ProfileKind.FLOODER and profile.flood_days:
                flood_days[account.account_id] = tuple(sorted(profile.flood_days))
            if profile.stale_days:
                stale_days[account.account_id] = tuple(sorted(profile.stale_days))

            if profile.kind is ProfileKind.LIKE_FARM_HUB and spoke_ids:
                farm = PlantedFarm(
                    account.account_id,
                    spoke_ids,
                    farm_tweets[0],
                    profile.spoke_unlikes,
                )
                farms.append(farm)
                _unlike_notices(farm, spec.start_day, profile.farm_day, notices)
                for spoke_id in spoke_ids:
                    kinds[spoke_id] = ProfileKind.LIKE_FARM_SPOKE
                    truth_posts[spoke_id] = (0,) * spec.days
                    truth_deletions[spoke_id] = (0,) * spec.days

    notices.sort(key=lambda n: (n.observed_at, n.kind.value, n.actor_id, n.object_id))
    snapshots.sort(key=lambda s: (s.snapshot_day, s.account_id))
    truth = GroundTruth(
        spec.days,
        spec.start_day,
        truth_posts,
        truth_deletions,
        categories,
        kinds,
        flood_days,
        stale_days,
        tuple(farms),
    )
    return SyntheticDataset(tuple(notices), tuple(snapshots), truth)


# -- declarative spec files and ground-truth serialization -------------------

_PROFILE_FIELDS = {f.name for f in dataclasses.fields(BehaviorProfile)}


def profile_from_dict(raw: dict) -> BehaviorProfile:
    if "kind" not in raw:
        raise ValueError("profile requires a 'kind'")
    unknown = set(raw) - _PROFILE_FIELDS
    if unknown:
        raise ValueError(f"unknown profile fields: {sorted(unknown)}")
    values = dict(raw)
    values["kind"] = ProfileKind(values["kind"])
    for name in ("delete_days", "flood_days", "gap_days", "stale_days"):
        if values.get(name) is not None:
            values[name] = tuple(values[name])
    return BehaviorProfile(**values)


def spec_from_dict(raw: dict) -> PopulationSpec:
    """Build a population spec from its declarative form.

    Each cohort entry carries ``count`` plus the profile fields inline.
    """
    if not isinstance(raw, dict) or "cohorts" not in raw:
        raise ValueError("population spec requires a 'cohorts' list")
    cohorts = []
    for entry in raw["cohorts"]:
        if not isinstance(entry, dict) or "count" not in entry:
            raise ValueError("each cohort requires a 'count'")
        entry = dict(entry)
        count = entry.pop("count")
        if isinstance(count, bool) or not isinstance(count, int) or count < 0:
            raise ValueError(f"cohort count must be a non-negative integer, got {count!r}")
        cohorts.append(Cohort(profile_from_dict(entry), count))
    days = raw.get("days", 30)
    if isinstance(days, bool) or not isinstance(days, int):
        raise ValueError("'days' must be an integer")
    start_raw = raw.get("start_day", "2021-04-26")
    return PopulationSpec(tuple(cohorts), days, date.fromisoformat(start_raw))


def read_population_spec(path) -> PopulationSpec:
    with open(path, encoding="utf-8") as fh:
        return spec_from_dict(json.load(fh))


def ground_truth_to_dict(truth: GroundTruth) -> dict:
    return {
        "days": truth.days,
        "start_day": truth.start_day.isoformat(),
        "daily_posts": {str(k): list(v) for k, v in sorted(truth.daily_posts.items())},
        "daily_deletions": {
            str(k): list(v) for k, v in sorted(truth.daily_deletions.items())
        },
        "categories": {
            str(k): v.value for k, v in sorted(truth.categories.items())
        },
        "kinds": {str(k): v.value for k, v in sorted(truth.kinds.items())},
        "flood_days": {str(k): list(v) for k, v in sorted(truth.flood_days.items())},
        "stale_days": {str(k): list(v) for k, v in sorted(truth.stale_days.items())},
        "farms": [
            {
                "hub_id": farm.hub_id,
                "spoke_ids": list(farm.spoke_ids),
                "tweet_id": farm.tweet_id,
                "spoke_unlikes": farm.spoke_unlikes,
            }
            for farm in truth.farms
        ],
    }


def ground_truth_from_dict(raw: dict) -> GroundTruth:
    return GroundTruth(
        raw["days"],
        date.fromisoformat(raw["start_day"]),
        {int(k): tuple(v) for k, v in raw["daily_posts"].items()},
        {int(k): tuple(v) for k, v in raw["daily_deletions"].items()},
        {int(k): Category(v) for k, v in raw["categories"].items()},
        {int(k): ProfileKind(v) for k, v in raw["kinds"].items()},
        {int(k): tuple(v) for k, v in raw["flood_days"].items()},
        {int(k): tuple(v) for k, v in raw["stale_days"].items()},
        tuple(
            PlantedFarm(
                farm["hub_id"],
                tuple(farm["spoke_ids"]),
                farm["tweet_id"],
                farm["spoke_unlikes"],
            )
            for farm in raw["farms"]
        ),
    )


def write_ground_truth(path, truth: GroundTruth) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(ground_truth_to_dict(truth), fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_ground_truth(path) -> GroundTruth:
    with open(path, encoding="utf-8") as fh:
        return ground_truth_from_dict(json.load(fh))


def write_dataset(dataset: SyntheticDataset, out_dir) -> dict[str, str]:
    """Write events, snapshots, and ground truth; returns the file names."""
    from .records import write_notices, write_snapshots

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    names = {
        "events": "events.ndjson",
        "snapshots": "snapshots.ndjson",
        "ground_truth": "ground_truth.json",
    }
    write_notices(out / names["events"], dataset.notices)
    write_snapshots(out / names["snapshots"], dataset.snapshots)
    write_ground_truth(out / names["ground_truth"], dataset.truth)
    return names
