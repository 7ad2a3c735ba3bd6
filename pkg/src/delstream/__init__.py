"""Deletion-event stream analytics: estimators, behavior statistics, and
detection of limit-circumventing flooding and coordinated like/unlike abuse."""

__version__ = "0.1.0"

from .behavior import (
    AccountBehaviorSummary,
    Category,
    FrequencyBucket,
    SuspensionRow,
    SuspensionTable,
    daily_volume_ccdf,
    frequency_buckets,
    median_age_ccdf,
    profile_terms,
    summarize,
    suspension_stats,
)
from .coordination import (
    CoordinationGraph,
    CoordinationNode,
    TripartiteNetwork,
    build_tripartite,
    detect_coordination,
    filter_components,
    filter_unlikers,
    project_bipartite,
    raw_role_ratio,
    role_ratio,
)
from .estimate import (
    ComparisonReport,
    DeletionEstimate,
    KsResult,
    PairedDeletion,
    ccdf,
    compare,
    estimate_consecutive,
    estimate_from_sampled_tweets,
    estimate_gap,
    estimate_timeline,
    ks_two_sample,
)
from .flooding import (
    FloodingViolation,
    ViolatorProfile,
    detect,
    profile_violators,
    total_posted,
)
from .ingest import (
    AccountTimeline,
    DailyDeletionRecord,
    DuplicateSnapshotError,
    UnlikeRecord,
    aggregate_daily,
    aggregate_daily_sharded,
    aggregate_unlikes,
    build_timelines,
)
from .records import (
    AccountSnapshot,
    AccountStatus,
    ComplianceNotice,
    NoticeKind,
    RecordParseError,
    TweetCreationTime,
    UnknownKindError,
    decode_creation_time,
    parse_notice,
    serialize_notice,
)
from .synth import (
    BehaviorProfile,
    Cohort,
    GroundTruth,
    PlantedFarm,
    PopulationSpec,
    ProfileKind,
    SyntheticDataset,
    generate,
)

__all__ = [
    "AccountBehaviorSummary",
    "AccountSnapshot",
    "AccountStatus",
    "AccountTimeline",
    "BehaviorProfile",
    "Category",
    "Cohort",
    "ComparisonReport",
    "ComplianceNotice",
    "CoordinationGraph",
    "CoordinationNode",
    "DailyDeletionRecord",
    "DeletionEstimate",
    "DuplicateSnapshotError",
    "FloodingViolation",
    "FrequencyBucket",
    "GroundTruth",
    "KsResult",
    "NoticeKind",
    "PairedDeletion",
    "PlantedFarm",
    "PopulationSpec",
    "ProfileKind",
    "RecordParseError",
    "SuspensionRow",
    "SuspensionTable",
    "SyntheticDataset",
    "TripartiteNetwork",
    "TweetCreationTime",
    "UnknownKindError",
    "UnlikeRecord",
    "ViolatorProfile",
    "aggregate_daily",
    "aggregate_daily_sharded",
    "aggregate_unlikes",
    "build_timelines",
    "build_tripartite",
    "ccdf",
    "compare",
    "daily_volume_ccdf",
    "decode_creation_time",
    "detect",
    "detect_coordination",
    "estimate_consecutive",
    "estimate_from_sampled_tweets",
    "estimate_gap",
    "estimate_timeline",
    "filter_components",
    "filter_unlikers",
    "frequency_buckets",
    "generate",
    "ks_two_sample",
    "median_age_ccdf",
    "parse_notice",
    "profile_terms",
    "profile_violators",
    "project_bipartite",
    "raw_role_ratio",
    "role_ratio",
    "serialize_notice",
    "summarize",
    "suspension_stats",
    "total_posted",
]
