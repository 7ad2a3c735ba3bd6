"""Command-line entry point wiring the analysis stages together.

Every run writes a machine-readable manifest alongside its outputs recording
the command, inputs, and parameters, so a run can be reproduced from its
manifest alone. Outputs are deterministic for deterministic inputs: no
timestamps, sorted records, stable float formatting.

Exit codes: 0 success, 2 usage errors or missing input files, 3 malformed
input records or invalid configuration.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from datetime import date
from pathlib import Path

from . import __version__
from .behavior import (
    Category,
    daily_volume_ccdf,
    frequency_buckets,
    median_age_ccdf,
    profile_terms,
    summarize,
    suspension_stats,
    volume_slices,
)
from .coordination import (
    DEFAULT_MIN_COMPONENT,
    DEFAULT_MIN_UNLIKES,
    build_tripartite,
    filter_components,
    filter_unlikers,
    project_bipartite,
)
from .estimate import (
    DEFAULT_ESTIMATE_FLOOR,
    DEFAULT_PERMUTATIONS,
    compare,
    estimate_timeline,
    ks_two_sample,
)
from .flooding import DEFAULT_DAILY_LIMIT, detect, write_violations, read_violations
from .ingest import (
    DEFAULT_INCLUSION_THRESHOLD,
    aggregate_daily,
    aggregate_unlikes,
    build_timelines,
    read_daily_records,
    read_timelines,
    read_unlike_records,
    write_daily_records,
    write_timelines,
    write_unlike_records,
)
from .records import RecordParseError, read_notices, read_snapshots
from .synth import generate, read_population_spec, write_dataset


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, date):
        return value.isoformat()
    return str(value)


def _write_csv(path, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(value) for value in row])


def _write_manifest(directory: Path, name: str, command: str, inputs: dict,
                    parameters: dict, outputs: list[str]) -> None:
    payload = {
        "command": command,
        "inputs": inputs,
        "outputs": sorted(outputs),
        "parameters": parameters,
        "tool": {"name": "delstream", "version": __version__},
    }
    with open(directory / name, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _resolve_timelines(path_arg) -> Path:
    path = Path(path_arg)
    return path / "timelines.ndjson" if path.is_dir() else path


def _read_allowlist(path) -> frozenset[int]:
    ids = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line and not line.startswith("#"):
                ids.append(int(line))
    return frozenset(ids)


def _read_bot_scores(path) -> dict[int, float]:
    scores: dict[int, float] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "account_id" not in reader.fieldnames:
            raise ValueError(f"{path}: expected a CSV with an 'account_id' column")
        for row in reader:
            scores[int(row["account_id"])] = float(row["bot_score"])
    return scores


def _cmd_generate(args) -> int:
    spec = read_population_spec(args.spec)
    dataset = generate(spec, args.seed)
    out = _out_dir(args)
    names = write_dataset(dataset, out)
    _write_manifest(
        out,
        "manifest.json",
        "generate",
        {"spec": str(args.spec)},
        {
            "seed": args.seed,
            "days": spec.days,
            "start_day": spec.start_day.isoformat(),
            "accounts": len(dataset.truth.kinds),
            "events": len(dataset.notices),
        },
        [*names.values(), "manifest.json"],
    )
    return 0


def _cmd_aggregate(args) -> int:
    daily = aggregate_daily(read_notices(args.events), args.threshold)
    unlikes = aggregate_unlikes(read_notices(args.events))
    snapshots = list(read_snapshots(args.snapshots)) if args.snapshots else []
    timelines = build_timelines(snapshots, daily)
    out = _out_dir(args)
    write_daily_records(out / "daily_deletions.ndjson", daily)
    write_unlike_records(out / "unlikes.ndjson", unlikes)
    write_timelines(out / "timelines.ndjson", timelines)
    _write_manifest(
        out,
        "manifest.json",
        "aggregate",
        {"events": str(args.events), "snapshots": str(args.snapshots or "")},
        {"threshold": args.threshold},
        [
            "daily_deletions.ndjson",
            "unlikes.ndjson",
            "timelines.ndjson",
            "manifest.json",
        ],
    )
    return 0


def _cmd_estimate(args) -> int:
    timelines = list(read_timelines(_resolve_timelines(args.timelines)))
    estimates = [e for tl in timelines for e in estimate_timeline(tl)]
    actuals = [record for tl in timelines for record in tl.deletion_days]
    report = compare(
        estimates,
        actuals,
        floor=args.floor,
        include_gaps=not args.no_gaps,
        per_account_median=args.per_account_median,
    )
    p_value = None
    if args.permutations > 0 and not report.is_empty:
        p_value = ks_two_sample(
            [p.estimated for p in report.paired],
            [p.actual for p in report.paired],
            permutations=args.permutations,
            seed=args.seed,
        ).p_value

    out = _out_dir(args)
    with open(out / "report.json", "w", encoding="utf-8") as fh:
        json.dump(
            {
                "pair_count": len(report.paired),
                "account_count": len({p.account_id for p in report.paired}),
                "mean_estimated": report.mean_estimated,
                "mean_actual": report.mean_actual,
                "underestimation_fraction": report.underestimation_fraction,
                "ks_statistic": report.ks_statistic,
                "ks_p_value": p_value,
                "floor": args.floor,
                "include_gaps": not args.no_gaps,
                "per_account_median": args.per_account_median,
            },
            fh,
            indent=2,
            sort_keys=True,
        )
        fh.write("\n")
    _write_csv(
        out / "pairs.csv",
        ["account_id", "day", "estimated", "actual"],
        ((p.account_id, p.day, p.estimated, p.actual) for p in report.paired),
    )
    _write_csv(out / "ccdf_estimated.csv", ["value", "fraction"], report.ccdf_estimated)
    _write_csv(out / "ccdf_actual.csv", ["value", "fraction"], report.ccdf_actual)
    _write_manifest(
        out,
        "manifest.json",
        "estimate",
        {"timelines": str(args.timelines)},
        {
            "floor": args.floor,
            "include_gaps": not args.no_gaps,
            "per_account_median": args.per_account_median,
            "permutations": args.permutations,
            "seed": args.seed,
        },
        [
            "report.json",
            "pairs.csv",
            "ccdf_estimated.csv",
            "ccdf_actual.csv",
            "manifest.json",
        ],
    )
    return 0


def _cmd_stats(args) -> int:
    timelines = list(read_timelines(_resolve_timelines(args.timelines)))
    violations = read_violations(args.violations) if args.violations else []
    bot_scores = _read_bot_scores(args.bot_scores) if args.bot_scores else None
    summaries = summarize(
        timelines, violations, window_days=args.window, bot_scores=bot_scores
    )
    buckets = frequency_buckets(summaries, window_days=args.window)
    final_statuses = {
        tl.account_id: status
        for tl in timelines
        if (status := tl.final_status()) is not None
    }
    table = suspension_stats(summaries, final_statuses)
    descriptions = {
        tl.account_id: tl.snapshots[-1].description
        for tl in timelines
        if tl.snapshots
    }

    def texts(members) -> list[str]:
        return [descriptions.get(s.account_id, "") for s in members]

    suspicious = [s for s in summaries if s.category is Category.SUSPICIOUS]
    top_30, bottom_30 = volume_slices(summaries, Category.THIRTY_DAY, 0.1)
    term_rows = []
    for group, members in (
        ("suspicious", suspicious),
        ("thirty_day_top", top_30),
        ("thirty_day_bottom", bottom_30),
    ):
        for term, count in profile_terms(texts(members), args.top_terms):
            term_rows.append((group, term, count))

    out = _out_dir(args)
    _write_csv(
        out / "summaries.csv",
        [
            "account_id",
            "deleting_days",
            "mean_daily_deletions",
            "median_deleted_age_days",
            "category",
            "bot_score",
        ],
        (
            (
                s.account_id,
                s.deleting_days,
                s.mean_daily_deletions,
                s.median_deleted_age_days,
                s.category.value,
                s.bot_score,
            )
            for s in summaries
        ),
    )
    _write_csv(
        out / "buckets.csv",
        ["deleting_days", "count", "min", "q1", "median", "q3", "max"],
        (
            (b.deleting_days, b.count, b.minimum, b.q1, b.median, b.q3, b.maximum)
            for b in buckets
        ),
    )
    _write_csv(
        out / "age_ccdf.csv",
        ["category", "age_days", "fraction"],
        (
            (category.value, age, fraction)
            for category in Category
            for age, fraction in median_age_ccdf(summaries, category)
        ),
    )
    _write_csv(
        out / "daily_volume_ccdf.csv",
        ["deletions", "fraction"],
        daily_volume_ccdf(
            record for tl in timelines for record in tl.deletion_days
        ),
    )
    _write_csv(
        out / "suspensions.csv",
        ["category", "suspended", "total", "unknown", "fraction"],
        (
            (r.category.value, r.suspended, r.total, r.unknown, r.fraction)
            for r in table.rows
        ),
    )
    _write_csv(out / "terms.csv", ["group", "term", "count"], term_rows)
    _write_manifest(
        out,
        "manifest.json",
        "stats",
        {
            "timelines": str(args.timelines),
            "violations": str(args.violations or ""),
            "bot_scores": str(args.bot_scores or ""),
        },
        {"window": args.window, "top_terms": args.top_terms},
        [
            "summaries.csv",
            "buckets.csv",
            "age_ccdf.csv",
            "daily_volume_ccdf.csv",
            "suspensions.csv",
            "terms.csv",
            "manifest.json",
        ],
    )
    return 0


def _cmd_detect_flooding(args) -> int:
    timelines = read_timelines(_resolve_timelines(args.timelines))
    allowlist = _read_allowlist(args.allowlist) if args.allowlist else frozenset()
    violations = detect(
        timelines,
        limit=args.limit,
        allowlist=allowlist,
        exclude_stale=args.exclude_stale,
    )
    out_file = Path(args.out)
    out_file.parent.mkdir(parents=True, exist_ok=True)
    write_violations(out_file, violations)
    _write_manifest(
        out_file.parent,
        out_file.name + ".manifest.json",
        "detect-flooding",
        {"timelines": str(args.timelines), "allowlist": str(args.allowlist or "")},
        {
            "limit": args.limit,
            "exclude_stale": args.exclude_stale,
            "violations": len(violations),
        },
        [out_file.name, out_file.name + ".manifest.json"],
    )
    return 0


def _cmd_detect_coordination(args) -> int:
    daily = list(read_daily_records(args.deletions))
    unlikes = list(read_unlike_records(args.unlikes))
    net = build_tripartite(daily, unlikes)
    filtered = filter_unlikers(net, args.min_unlikes)
    graph = filter_components(project_bipartite(filtered), args.min_component)

    component_of = {node.account_id: node.component_id for node in graph.nodes}
    edge_counts: dict[int, int] = {members[0]: 0 for members in graph.components}
    for source, _ in graph.edges:
        edge_counts[component_of[source]] += 1

    out = _out_dir(args)
    _write_csv(out / "edges.csv", ["source", "target"], graph.edges)
    _write_csv(
        out / "nodes.csv",
        ["account_id", "unlike_total", "deletion_total", "role_ratio", "component_id"],
        (
            (n.account_id, n.unlike_total, n.deletion_total, n.role_ratio, n.component_id)
            for n in graph.nodes
        ),
    )
    _write_csv(
        out / "components.csv",
        ["component_id", "node_count", "edge_count"],
        (
            (members[0], len(members), edge_counts[members[0]])
            for members in graph.components
        ),
    )
    _write_manifest(
        out,
        "manifest.json",
        "detect-coordination",
        {"deletions": str(args.deletions), "unlikes": str(args.unlikes)},
        {
            "min_unlikes": args.min_unlikes,
            "min_component": args.min_component,
            # The repeat-unlike filter reported both ways: edges and accounts.
            "liker_edges_before": len(net.liker_edges),
            "liker_edges_after": len(filtered.liker_edges),
            "liker_accounts_before": len(net.likers()),
            "liker_accounts_after": len(filtered.likers()),
        },
        ["edges.csv", "nodes.csv", "components.csv", "manifest.json"],
    )
    return 0


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    parser = argparse.ArgumentParser(
        prog="delstream",
        description="Deletion-event stream analytics and abuse detection.",
    )
    parser.add_argument("--version", action="version", version=f"delstream {__version__}")
    subparsers = parser.add_subparsers(dest="subcommand", metavar="COMMAND")
    registry: dict[str, argparse.ArgumentParser] = {}

    def register(name: str, func, help_text: str) -> argparse.ArgumentParser:
        sub = subparsers.add_parser(name, help=help_text)
        sub.add_argument(
            "--config",
            default=None,
            help="JSON file of option defaults; explicit flags override it",
        )
        sub.set_defaults(func=func)
        registry[name] = sub
        return sub

    sub = register("generate", _cmd_generate, "generate a labeled synthetic dataset")
    sub.add_argument("--spec", required=True, help="population spec (JSON)")
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--out", required=True, help="output directory")

    sub = register("aggregate", _cmd_aggregate, "aggregate raw events into daily records")
    sub.add_argument("--events", required=True, help="newline-delimited event file")
    sub.add_argument("--snapshots", default=None, help="newline-delimited snapshot file")
    sub.add_argument("--threshold", type=int, default=DEFAULT_INCLUSION_THRESHOLD)
    sub.add_argument("--out", required=True, help="output directory")

    sub = register("estimate", _cmd_estimate, "score count-based deletion estimates")
    sub.add_argument("--timelines", required=True, help="timelines file or aggregate output dir")
    sub.add_argument("--floor", type=int, default=DEFAULT_ESTIMATE_FLOOR)
    sub.add_argument("--no-gaps", action="store_true", help="ignore gap intervals")
    sub.add_argument("--per-account-median", action="store_true")
    sub.add_argument("--permutations", type=int, nargs="?", default=0,
                     const=DEFAULT_PERMUTATIONS,
                     help="enable a permutation KS significance estimate; bare flag "
                          f"uses {DEFAULT_PERMUTATIONS:,} permutations (0 = off)")
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--out", required=True, help="output directory")

    sub = register("stats", _cmd_stats, "behavioral statistics and category labels")
    sub.add_argument("--timelines", required=True, help="timelines file or aggregate output dir")
    sub.add_argument("--violations", default=None, help="violations CSV from detect-flooding")
    sub.add_argument("--bot-scores", default=None, help="CSV of externally computed bot scores")
    sub.add_argument("--window", type=int, default=30, help="collection window length in days")
    sub.add_argument("--top-terms", type=int, default=25)
    sub.add_argument("--out", required=True, help="output directory")

    sub = register("detect-flooding", _cmd_detect_flooding, "find daily-limit violations")
    sub.add_argument("--timelines", required=True, help="timelines file or aggregate output dir")
    sub.add_argument("--limit", type=int, default=DEFAULT_DAILY_LIMIT)
    sub.add_argument("--allowlist", default=None, help="file of sanctioned account IDs")
    sub.add_argument("--exclude-stale", action="store_true",
                     help="drop violations flagged as stale-count suspects")
    sub.add_argument("--out", required=True, help="output CSV file")

    sub = register(
        "detect-coordination", _cmd_detect_coordination, "find coordinated like/unlike clusters"
    )
    sub.add_argument("--deletions", required=True, help="daily deletion records (NDJSON)")
    sub.add_argument("--unlikes", required=True, help="unlike records (NDJSON)")
    sub.add_argument("--min-unlikes", type=int, default=DEFAULT_MIN_UNLIKES)
    sub.add_argument("--min-component", type=int, default=DEFAULT_MIN_COMPONENT)
    sub.add_argument("--out", required=True, help="output directory")

    return parser, registry


def _apply_config_defaults(argv: list[str], registry: dict) -> None:
    if "--config" not in argv:
        return
    config_path = argv[argv.index("--config") + 1]
    subcommand = next((token for token in argv if token in registry), None)
    if subcommand is None:
        return
    with open(config_path, encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise ValueError(f"{config_path}: config must be a JSON object")
    sub = registry[subcommand]
    valid = {action.dest for action in sub._actions}
    unknown = set(raw) - valid
    if unknown:
        raise ValueError(f"{config_path}: unknown config keys {sorted(unknown)}")
    sub.set_defaults(**raw)
    for action in sub._actions:
        if action.dest in raw:
            action.required = False


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, registry = build_parser()
    try:
        _apply_config_defaults(argv, registry)
        args = parser.parse_args(argv)
        if not hasattr(args, "func"):
            parser.print_usage(sys.stderr)
            return 2
        return args.func(args)
    except FileNotFoundError as err:
        print(f"delstream: input not found: {err}", file=sys.stderr)
        return 2
    except (RecordParseError, ValueError, KeyError, json.JSONDecodeError) as err:
        print(f"delstream: invalid input: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
