"""Dependency graphs on vertices 1..p and their domination machinery.

A dependency graph encodes which coordinates of a random vector are allowed
to depend on each other: subcollections indexed by non-adjacent vertex sets
are independent.  Everything downstream (masking, variance bounds, covering
arguments) is driven by d-dominating sets, where d counts how many members
of the dominating set can crowd within graph distance 3 of a single vertex.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence


class EdgeListError(ValueError):
    """Raised for malformed edge-list input; carries the 1-based line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class NotDominatingError(ValueError):
    """Raised when a candidate set fails domination; carries a witness vertex."""

    def __init__(self, witness: int):
        super().__init__(
            f"vertex {witness} is not in the set and has no neighbor in it"
        )
        self.witness = witness


class DependencyGraph:
    """Undirected simple graph on vertices 1..p."""

    def __init__(self, p: int, edges: Iterable[tuple[int, int]] = ()):
        if not isinstance(p, int) or p < 1:
            raise ValueError(f"vertex count must be a positive integer, got {p!r}")
        self.p = p
        adj: list[set[int]] = [set() for _ in range(p)]
        seen: set[tuple[int, int]] = set()
        for u, v in edges:
            self._check_vertex(u)
            self._check_vertex(v)
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            key = (u, v) if u < v else (v, u)
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen.add(key)
            adj[u - 1].add(v)
            adj[v - 1].add(u)
        self._adj: tuple[tuple[int, ...], ...] = tuple(
            tuple(sorted(s)) for s in adj
        )
        self._edges = frozenset(seen)
        self._ball_cache: dict[tuple[int, int], frozenset[int]] = {}

    def _check_vertex(self, v: int) -> None:
        if not isinstance(v, int) or isinstance(v, bool) or not 1 <= v <= self.p:
            raise ValueError(f"vertex {v!r} outside 1..{self.p}")

    @property
    def vertices(self) -> range:
        return range(1, self.p + 1)

    @property
    def edges(self) -> frozenset[tuple[int, int]]:
        return self._edges

    @property
    def num_edges(self) -> int:
        return len(self._edges)

    def neighbors(self, v: int) -> tuple[int, ...]:
        self._check_vertex(v)
        return self._adj[v - 1]

    def degree(self, v: int) -> int:
        return len(self.neighbors(v))

    @property
    def max_degree(self) -> int:
        return max((len(a) for a in self._adj), default=0)

    def has_edge(self, u: int, v: int) -> bool:
        self._check_vertex(u)
        self._check_vertex(v)
        if u == v:
            return False
        return (min(u, v), max(u, v)) in self._edges

    def distance(self, u: int, v: int) -> int | float:
        """Shortest-path distance; math.inf when u and v are disconnected."""
        self._check_vertex(u)
        self._check_vertex(v)
        if u == v:
            return 0
        dist = {u: 0}
        queue = deque([u])
        while queue:
            w = queue.popleft()
            for x in self._adj[w - 1]:
                if x not in dist:
                    dist[x] = dist[w] + 1
                    if x == v:
                        return dist[x]
                    queue.append(x)
        return math.inf

    def ball(self, v: int, r: int) -> frozenset[int]:
        """Closed ball of radius r around v.  Radii up to 3 are memoized."""
        self._check_vertex(v)
        if not isinstance(r, int) or r < 0:
            raise ValueError(f"radius must be a nonnegative integer, got {r!r}")
        key = (v, r)
        if r <= 3 and key in self._ball_cache:
            return self._ball_cache[key]
        dist = {v: 0}
        queue = deque([v])
        while queue:
            w = queue.popleft()
            if dist[w] == r:
                continue
            for x in self._adj[w - 1]:
                if x not in dist:
                    dist[x] = dist[w] + 1
                    queue.append(x)
        result = frozenset(dist)
        if r <= 3:
            self._ball_cache[key] = result
        return result

    def __repr__(self) -> str:
        return f"DependencyGraph(p={self.p}, edges={self.num_edges})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DependencyGraph):
            return NotImplemented
        return self.p == other.p and self._edges == other._edges

    def __hash__(self) -> int:
        return hash((self.p, self._edges))


@dataclass(frozen=True)
class DominatingSetCertificate:
    """A verified d-dominating set.

    d is minimal: some vertex has exactly d members of the set within
    graph distance 3.  max_ball2_size is the largest |B_2(v)| over the
    set, which never exceeds d * (max_degree + 1).
    """

    vertices: tuple[int, ...]
    d: int
    max_ball2_size: int


def sets_adjacent(g: DependencyGraph, first: Iterable[int], second: Iterable[int]) -> bool:
    """Whether two vertex sets intersect or are joined by at least one edge."""
    a = frozenset(first)
    b = frozenset(second)
    for v in a | b:
        g._check_vertex(v)
    if a & b:
        return True
    small, large = (a, b) if len(a) <= len(b) else (b, a)
    for v in small:
        if not large.isdisjoint(g.neighbors(v)):
            return True
    return False


def verify_dominating(g: DependencyGraph, vertices: Iterable[int]) -> DominatingSetCertificate:
    """Check domination and count the exact d.

    d is the largest number of members of the set found within graph
    distance 3 of any single vertex (BFS from each member to depth 3,
    counters incremented).  Members of the set themselves need no
    neighbor in the set.
    """
    vset = sorted(set(vertices))
    if not vset:
        raise ValueError("dominating set must be nonempty")
    for v in vset:
        g._check_vertex(v)
    members = frozenset(vset)
    for u in g.vertices:
        if u in members:
            continue
        if members.isdisjoint(g.neighbors(u)):
            raise NotDominatingError(u)
    counts = [0] * (g.p + 1)
    for v in vset:
        for u in g.ball(v, 3):
            counts[u] += 1
    return DominatingSetCertificate(
        vertices=tuple(vset),
        d=max(counts[1:]),
        max_ball2_size=max(len(g.ball(v, 2)) for v in vset),
    )


def greedy_dominating_set(g: DependencyGraph) -> DominatingSetCertificate:
    """Build a dominating set greedily and certify it.

    Repeatedly picks the uncovered vertex whose closed neighborhood covers
    the most still-uncovered vertices, breaking ties by smallest id.
    Deterministic.  Neither |set| nor d is minimized; only the returned d
    is exact for the set produced.
    """
    uncovered = set(g.vertices)
    chosen: list[int] = []
    while uncovered:
        best_v = -1
        best_gain = 0
        for v in sorted(uncovered):
            gain = len(uncovered.intersection((v, *g.neighbors(v))))
            if gain > best_gain:
                best_gain = gain
                best_v = v
        chosen.append(best_v)
        uncovered.discard(best_v)
        uncovered.difference_update(g.neighbors(best_v))
    return verify_dominating(g, chosen)


def auxiliary_graph(
    g: DependencyGraph, dominating: DominatingSetCertificate | Iterable[int]
) -> DependencyGraph:
    """Graph on the dominating set whose edges join radius-2 balls that touch.

    Vertex i of the result stands for the i-th member in ascending order;
    i and j are adjacent when the radius-2 balls around the corresponding
    members intersect or are joined by an edge.  Its maximum degree is at
    most d**3, so greedy coloring needs at most d**3 + 1 classes.
    """
    if not isinstance(dominating, DominatingSetCertificate):
        dominating = verify_dominating(g, dominating)
    members = dominating.vertices
    balls = [g.ball(v, 2) for v in members]
    edges = [
        (i + 1, j + 1)
        for i in range(len(members))
        for j in range(i + 1, len(members))
        if sets_adjacent(g, balls[i], balls[j])
    ]
    return DependencyGraph(len(members), edges)


def greedy_coloring(g: DependencyGraph) -> tuple[tuple[int, ...], ...]:
    """Partition vertices into independent classes by greedy coloring.

    Vertices are processed in increasing id order and assigned the
    smallest color not used by an earlier neighbor, so the output is
    deterministic.  At most max_degree + 1 classes are produced, no class
    contains two adjacent vertices, and the classes cover V exactly once.
    """
    color: dict[int, int] = {}
    classes: list[list[int]] = []
    for v in g.vertices:
        taken = {color[u] for u in g.neighbors(v) if u in color}
        c = 0
        while c in taken:
            c += 1
        color[v] = c
        if c == len(classes):
            classes.append([])
        classes[c].append(v)
    return tuple(tuple(cls) for cls in classes)


def ball_intersection_subsets(
    g: DependencyGraph,
    members: Sequence[int],
    radius: int = 2,
    max_size: int | None = None,
):
    """Yield (subset, intersection) for subsets of members with nonempty balls.

    Subsets are emitted in depth-first order over members sorted ascending;
    branches are pruned as soon as the running intersection of radius-r
    balls empties, so only subsets with nonempty intersection appear.
    """
    ordered = sorted(set(members))
    balls = {v: g.ball(v, radius) for v in ordered}

    def extend(prefix: list[int], inter: frozenset[int], start: int):
        for idx in range(start, len(ordered)):
            v = ordered[idx]
            nxt = inter & balls[v] if prefix else balls[v]
            if not nxt:
                continue
            prefix.append(v)
            yield tuple(prefix), nxt
            if max_size is None or len(prefix) < max_size:
                yield from extend(prefix, nxt, idx + 1)
            prefix.pop()

    yield from extend([], frozenset(), 0)


def m_dependent_graph(p: int, m: int) -> DependencyGraph:
    """Band graph on 1..p joining indices at most m apart."""
    if not isinstance(m, int) or m < 0:
        raise ValueError(f"dependence range must be a nonnegative integer, got {m!r}")
    edges = [
        (i, i + k)
        for i in range(1, p + 1)
        for k in range(1, m + 1)
        if i + k <= p
    ]
    return DependencyGraph(p, edges)


def block_graph(sizes: Sequence[int]) -> DependencyGraph:
    """Disjoint cliques with the given block sizes, numbered consecutively."""
    if not sizes:
        raise ValueError("at least one block is required")
    for s in sizes:
        if not isinstance(s, int) or s < 1:
            raise ValueError(f"block sizes must be positive integers, got {s!r}")
    edges = []
    start = 1
    for s in sizes:
        members = range(start, start + s)
        edges.extend(
            (u, v) for u in members for v in members if u < v
        )
        start += s
    return DependencyGraph(start - 1, edges)


def parse_edge_list(text: str) -> DependencyGraph:
    """Parse the plain-text graph format.

    The first significant line holds the vertex count; every further line
    holds one edge as two vertex ids.  Blank lines and lines starting with
    '#' are ignored.  Errors report the offending 1-based line number.
    """
    p: int | None = None
    edges: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if p is None:
            if len(tokens) != 1:
                raise EdgeListError(
                    f"expected a single vertex count, got {line!r}", lineno
                )
            try:
                p = int(tokens[0])
            except ValueError:
                raise EdgeListError(
                    f"vertex count is not an integer: {tokens[0]!r}", lineno
                ) from None
            if p < 1:
                raise EdgeListError(f"vertex count must be positive, got {p}", lineno)
            continue
        if len(tokens) != 2:
            raise EdgeListError(f"expected two vertex ids, got {line!r}", lineno)
        try:
            u, v = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise EdgeListError(f"vertex ids must be integers: {line!r}", lineno) from None
        if not (1 <= u <= p and 1 <= v <= p):
            raise EdgeListError(f"edge ({u}, {v}) outside 1..{p}", lineno)
        if u == v:
            raise EdgeListError(f"self-loop at vertex {u}", lineno)
        key = (min(u, v), max(u, v))
        if key in seen:
            raise EdgeListError(f"duplicate edge {key}", lineno)
        seen.add(key)
        edges.append((u, v))
    if p is None:
        raise EdgeListError("empty input: no vertex count found", 1)
    return DependencyGraph(p, edges)


def format_edge_list(g: DependencyGraph) -> str:
    """Inverse of parse_edge_list, with edges in sorted order."""
    lines = [str(g.p)]
    lines.extend(f"{u} {v}" for u, v in sorted(g.edges))
    return "\n".join(lines) + "\n"
