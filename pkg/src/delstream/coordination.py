"""Coordinated like/unlike/delete detection via tripartite projection.

Starting from accounts that deleted tweets and accounts that repeatedly
unliked those same tweets, the pipeline builds a deleter-tweet-liker
tripartite network, discards casual unlikers, projects the rest onto a
directed liker-to-deleter graph, and keeps only weakly connected components
large enough to indicate coordination. All outputs are sorted by ID so graph
files are byte-reproducible.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable

from .ingest import DailyDeletionRecord, UnlikeRecord

#: A liker must have unliked the same tweet at least this many times to count.
DEFAULT_MIN_UNLIKES = 5

#: Weakly connected components smaller than this are discarded.
DEFAULT_MIN_COMPONENT = 10


def role_ratio(unlike_total: int, deletion_total: int) -> float:
    """Unlike share of a node's activity: 1.0 pure liker, 0.0 pure deleter.

    Normalized to [0, 1]; defined as 0 when the node has no activity at all.
    """
    combined = unlike_total + deletion_total
    if combined == 0:
        return 0.0
    return unlike_total / combined


def raw_role_ratio(unlike_total: int, deletion_total: int) -> float | None:
    """Plain unlikes-over-deletions ratio; None where it is undefined."""
    if deletion_total == 0:
        return None
    return unlike_total / deletion_total


@dataclass(frozen=True, slots=True)
class TripartiteNetwork:
    """Deleter-tweet and liker-tweet edges around eventually-deleted tweets."""

    deleter_edges: frozenset[tuple[int, int]]
    liker_edges: frozenset[tuple[int, int, int]]

    def __post_init__(self):
        deleted = {tweet_id for _, tweet_id in self.deleter_edges}
        for liker_id, tweet_id, unlike_count in self.liker_edges:
            if tweet_id not in deleted:
                raise ValueError(f"liker edge references undeleted tweet {tweet_id}")
            if unlike_count < 1:
                raise ValueError("unlike_count must be >= 1")

    def tweets(self) -> set[int]:
        return {tweet_id for _, tweet_id in self.deleter_edges}

    def likers(self) -> set[int]:
        return {liker_id for liker_id, _, _ in self.liker_edges}

    def deleters(self) -> set[int]:
        return {deleter_id for deleter_id, _ in self.deleter_edges}


@dataclass(frozen=True, slots=True)
class CoordinationNode:
    account_id: int
    unlike_total: int
    deletion_total: int
    role_ratio: float
    in_degree: int
    component_id: int


@dataclass(frozen=True, slots=True)
class CoordinationGraph:
    """Directed liker-to-deleter graph with component structure.

    ``nodes`` are sorted by account ID, ``edges`` by (source, target), and
    ``components`` lists each component's sorted members, ordered by the
    component ID (the smallest member account ID).
    """

    nodes: tuple[CoordinationNode, ...]
    edges: tuple[tuple[int, int], ...]
    components: tuple[tuple[int, ...], ...]

    @property
    def node_ids(self) -> tuple[int, ...]:
        return tuple(node.account_id for node in self.nodes)

    def node(self, account_id: int) -> CoordinationNode:
        for candidate in self.nodes:
            if candidate.account_id == account_id:
                return candidate
        raise KeyError(account_id)


def build_tripartite(
    daily_deletions: Iterable[DailyDeletionRecord],
    unlikes: Iterable[UnlikeRecord],
) -> TripartiteNetwork:
    """Join deletion and unlike records around the deleted tweets.

    Unlikes of tweets never seen deleted are out of scope and dropped.
    """
    deleter_edges = {
        (record.account_id, tweet_id)
        for record in daily_deletions
        for tweet_id in record.tweet_ids
    }
    deleted = {tweet_id for _, tweet_id in deleter_edges}
    liker_edges = {
        (record.liker_id, record.tweet_id, record.unlike_count)
        for record in unlikes
        if record.tweet_id in deleted
    }
    return TripartiteNetwork(frozenset(deleter_edges), frozenset(liker_edges))


def filter_unlikers(
    net: TripartiteNetwork, min_unlikes: int = DEFAULT_MIN_UNLIKES
) -> TripartiteNetwork:
    """Drop liker edges below the repeat-unlike threshold.

    Likers left with no edges disappear with their edges; deleter edges are
    untouched.
    """
    if min_unlikes < 1:
        raise ValueError(f"min_unlikes must be >= 1, got {min_unlikes}")
    kept = frozenset(
        edge for edge in net.liker_edges if edge[2] >= min_unlikes
    )
    return TripartiteNetwork(net.deleter_edges, kept)


def _weakly_connected_components(
    node_ids: Iterable[int], edges: Iterable[tuple[int, int]]
) -> list[tuple[int, ...]]:
    adjacency: dict[int, set[int]] = {node_id: set() for node_id in node_ids}
    for source, target in edges:
        adjacency[source].add(target)
        adjacency[target].add(source)
    seen: set[int] = set()
    components = []
    for start in sorted(adjacency):
        if start in seen:
            continue
        members = []
        queue = deque([start])
        seen.add(start)
        while queue:
            node = queue.popleft()
            members.append(node)
            for neighbor in adjacency[node]:
                if neighbor not in seen:
                    seen.add(neighbor)
                    queue.append(neighbor)
        components.append(tuple(sorted(members)))
    components.sort(key=lambda members: members[0])
    return components


def project_bipartite(net: TripartiteNetwork) -> CoordinationGraph:
    """Project the tripartite network onto directed liker-to-deleter edges.

    Every (liker of T, deleter of T) pair becomes one unweighted edge;
    multiple shared tweets collapse to a single edge. Self-loops (an account
    unliking its own later-deleted tweet) are retained. Node annotations are
    totals over the projected network's accounts in the source tripartite.
    """
    deleters_of: dict[int, set[int]] = {}
    for deleter_id, tweet_id in net.deleter_edges:
        deleters_of.setdefault(tweet_id, set()).add(deleter_id)

    edges: set[tuple[int, int]] = set()
    for liker_id, tweet_id, _ in net.liker_edges:
        for deleter_id in deleters_of.get(tweet_id, ()):
            edges.add((liker_id, deleter_id))

    node_ids = {source for source, _ in edges} | {target for _, target in edges}

    unlike_totals = {node_id: 0 for node_id in node_ids}
    for liker_id, _, unlike_count in net.liker_edges:
        if liker_id in unlike_totals:
            unlike_totals[liker_id] += unlike_count
    deletion_totals = {node_id: 0 for node_id in node_ids}
    for deleter_id, _ in net.deleter_edges:
        if deleter_id in deletion_totals:
            deletion_totals[deleter_id] += 1
    in_degrees = {node_id: 0 for node_id in node_ids}
    for _, target in edges:
        in_degrees[target] += 1

    components = _weakly_connected_components(node_ids, edges)
    component_of = {
        member: members[0] for members in components for member in members
    }

    nodes = tuple(
        CoordinationNode(
            node_id,
            unlike_totals[node_id],
            deletion_totals[node_id],
            role_ratio(unlike_totals[node_id], deletion_totals[node_id]),
            in_degrees[node_id],
            component_of[node_id],
        )
        for node_id in sorted(node_ids)
    )
    return CoordinationGraph(nodes, tuple(sorted(edges)), tuple(components))


def filter_components(
    graph: CoordinationGraph, min_nodes: int = DEFAULT_MIN_COMPONENT
) -> CoordinationGraph:
    """Keep only weakly connected components with at least ``min_nodes`` nodes."""
    if min_nodes < 1:
        raise ValueError(f"min_nodes must be >= 1, got {min_nodes}")
    kept_components = tuple(
        members for members in graph.components if len(members) >= min_nodes
    )
    kept_ids = {member for members in kept_components for member in members}
    nodes = tuple(node for node in graph.nodes if node.account_id in kept_ids)
    edges = tuple(
        (source, target)
        for source, target in graph.edges
        if source in kept_ids and target in kept_ids
    )
    return CoordinationGraph(nodes, edges, kept_components)


def detect_coordination(
    daily_deletions: Iterable[DailyDeletionRecord],
    unlikes: Iterable[UnlikeRecord],
    min_unlikes: int = DEFAULT_MIN_UNLIKES,
    min_component: int = DEFAULT_MIN_COMPONENT,
) -> CoordinationGraph:
    """Full pipeline: build, filter unlikers, project, filter components."""
    net = build_tripartite(daily_deletions, unlikes)
    filtered = filter_unlikers(net, min_unlikes)
    return filter_components(project_bipartite(filtered), min_component)
