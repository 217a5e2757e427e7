"""Synthesis graph over input segment boundaries and the three search strategies.

Nodes ``0..p`` are segment boundaries of the input. An arc ``(i, n)`` lays
one syllable of ``n`` segments over input segments ``[i, i + n)``; its weight
is the distance to the closest dictionary syllable of that length. Weights
are computed only when a search asks for them, and cached.

A search counts the distinct arcs whose weights it requested
(``arcs_evaluated``) and the partial solutions it extended
(``nodes_expanded``). States that can no longer reach node ``p`` are never
generated; reachability depends only on the allowed lengths, so pruning
costs no weight evaluations.
"""

from __future__ import annotations

import enum
import threading
from collections import deque
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator

from segsyl.compare import SyllableGroup, best_pattern
from segsyl.errors import NoCompletePathError, ValidationError
from segsyl.trajectory import Dictionary, SegmentedInput

WeightFn = Callable[[int, int], "tuple[float, str | None]"]


class SearchStrategy(str, enum.Enum):
    FULL = "full"
    DFS = "dfs"
    BFS = "bfs"


def count_compositions(p: int, lengths: Iterable[int]) -> int:
    """Number of ordered ways to write ``p`` as a sum of parts from ``lengths``."""
    if p < 0:
        raise ValueError("p must be >= 0")
    parts = sorted({int(n) for n in lengths if int(n) >= 1})
    counts = [1] + [0] * p
    for total in range(1, p + 1):
        counts[total] = sum(counts[total - n] for n in parts if n <= total)
    return counts[p]


class SynthesisGraph:
    """Lazily weighted lattice over boundaries ``0..p``.

    ``weight_fn(i, n)`` returns ``(distance, label)`` for the arc covering
    segments ``[i, i + n)``. It is called at most once per arc; concurrent
    queries of the same arc are safe.
    """

    def __init__(self, p: int, lengths: Iterable[int], weight_fn: WeightFn):
        if p < 0:
            raise ValidationError("segment count must be >= 0")
        self.p = int(p)
        self.allowed_lengths = tuple(sorted({int(n) for n in lengths if int(n) >= 1}))
        self._weight_fn = weight_fn
        self._cache: dict[tuple[int, int], tuple[float, str | None]] = {}
        self._lock = threading.Lock()
        self.evaluations = 0
        # finishable[v]: some composition leads from v to p
        finishable = [False] * (self.p + 1)
        finishable[self.p] = True
        for v in range(self.p - 1, -1, -1):
            finishable[v] = any(v + n <= self.p and finishable[v + n] for n in self.allowed_lengths)
        self._finishable = tuple(finishable)

    @property
    def node_count(self) -> int:
        return self.p + 1

    def has_arc(self, i: int, n: int) -> bool:
        return n in self.allowed_lengths and 0 <= i and i + n <= self.p

    def arcs_from(self, i: int) -> list[int]:
        """Lengths of all arcs leaving node ``i``, ascending."""
        return [n for n in self.allowed_lengths if i + n <= self.p]

    def successors(self, i: int) -> list[int]:
        """Lengths of arcs from ``i`` whose head can still reach ``p``."""
        return [n for n in self.arcs_from(i) if self._finishable[i + n]]

    def can_finish(self, v: int) -> bool:
        return self._finishable[v]

    @property
    def has_complete_path(self) -> bool:
        return self._finishable[0]

    def arc(self, i: int, n: int) -> tuple[float, str | None]:
        if not self.has_arc(i, n):
            raise KeyError(f"no arc ({i}, {n})")
        key = (i, n)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        with self._lock:
            hit = self._cache.get(key)
            if hit is None:
                d, label = self._weight_fn(i, n)
                if not d >= 0.0:
                    raise ValidationError(f"arc ({i}, {n}) has invalid weight {d!r}")
                hit = (float(d), label)
                self._cache[key] = hit
                self.evaluations += 1
        return hit

    def weight(self, i: int, n: int) -> float:
        return self.arc(i, n)[0]


def build_graph(segmented: SegmentedInput, dictionary: Dictionary) -> SynthesisGraph:
    if len(dictionary) == 0:
        raise ValidationError("dictionary is empty")
    if segmented.trajectory.dim != dictionary.parameter_dim:
        raise ValidationError(
            f"input has {segmented.trajectory.dim} parameters, dictionary has {dictionary.parameter_dim}"
        )
    segments = segmented.segments()

    def weight(i: int, n: int):
        pattern, d = best_pattern(SyllableGroup.from_segments(segments, i, n), dictionary)
        return d, pattern.label

    return SynthesisGraph(len(segments), dictionary.lengths, weight)


@dataclass(frozen=True)
class SearchStats:
    arcs_evaluated: int
    nodes_expanded: int
    paths_considered: int = 1


@dataclass(frozen=True)
class SolutionPath:
    nodes: tuple[int, ...]
    labels: tuple[str | None, ...]
    weights: tuple[float, ...]
    cost: float
    stats: SearchStats

    @property
    def hops(self) -> int:
        return len(self.nodes) - 1

    @property
    def lengths(self) -> tuple[int, ...]:
        return tuple(b - a for a, b in zip(self.nodes, self.nodes[1:]))

    def __str__(self) -> str:
        return "-".join(map(str, self.nodes))


class _Tracker:
    """Per-search view of the graph that records which arcs were queried."""

    def __init__(self, graph: SynthesisGraph):
        self.graph = graph
        self.touched: set[tuple[int, int]] = set()
        self.expanded = 0

    def arc(self, i: int, n: int):
        self.touched.add((i, n))
        return self.graph.arc(i, n)

    def solution(self, nodes, paths_considered=1) -> SolutionPath:
        hops = [self.arc(a, b - a) for a, b in zip(nodes, nodes[1:])]
        weights = tuple(w for w, _ in hops)
        stats = SearchStats(len(self.touched), self.expanded, paths_considered)
        return SolutionPath(tuple(nodes), tuple(l for _, l in hops), weights, sum(weights), stats)


def _require_path(graph: SynthesisGraph) -> None:
    if not graph.has_complete_path:
        raise NoCompletePathError(
            f"no complete path: {graph.p} segments cannot be split into parts {list(graph.allowed_lengths)}"
        )


def _iter_paths(graph: SynthesisGraph, on_expand=None) -> Iterator[tuple[int, ...]]:
    if not graph.can_finish(0):
        return
    stack = [(0,)]
    while stack:
        path = stack.pop()
        v = path[-1]
        if v == graph.p:
            yield path
            continue
        if on_expand is not None:
            on_expand()
        # reversed push keeps ascending-length order on pop
        for n in reversed(graph.successors(v)):
            stack.append(path + (v + n,))


def enumerate_paths(graph: SynthesisGraph) -> list[tuple[int, ...]]:
    """All complete node sequences ``0 -> ... -> p`` in lexicographic order."""
    return list(_iter_paths(graph))


def search_full(graph: SynthesisGraph) -> SolutionPath:
    """Exhaustive search: cost every complete path and keep the cheapest.

    Equal costs keep the lexicographically smaller node sequence.
    """
    _require_path(graph)
    t = _Tracker(graph)
    best_nodes, best_cost, count = None, float("inf"), 0

    def expand():
        t.expanded += 1

    for nodes in _iter_paths(graph, expand):
        count += 1
        cost = sum(t.arc(a, b - a)[0] for a, b in zip(nodes, nodes[1:]))
        if cost < best_cost:
            best_nodes, best_cost = nodes, cost
    return t.solution(best_nodes, count)


def search_dfs(graph: SynthesisGraph) -> SolutionPath:
    """First complete path of a depth-first descent, shortest syllables tried first.

    Each arc's weight is evaluated when the search steps along it.
    """
    _require_path(graph)
    t = _Tracker(graph)
    stack = [(0,)]
    while stack:
        path = stack.pop()
        v = path[-1]
        if len(path) > 1:
            t.arc(path[-2], v - path[-2])
        if v == graph.p:
            return t.solution(path)
        t.expanded += 1
        for n in reversed(graph.successors(v)):
            stack.append(path + (v + n,))
    raise AssertionError("unreachable: finishable graph yielded no path")


def search_bfs(graph: SynthesisGraph) -> SolutionPath:
    """First complete path found breadth-first, so it has the fewest syllables.

    Children are generated in ascending length order; each generated arc is
    evaluated and the goal test happens at generation.
    """
    _require_path(graph)
    t = _Tracker(graph)
    if graph.p == 0:
        return t.solution((0,))
    queue = deque([(0,)])
    while queue:
        path = queue.popleft()
        v = path[-1]
        t.expanded += 1
        for n in graph.successors(v):
            t.arc(v, n)
            child = path + (v + n,)
            if v + n == graph.p:
                return t.solution(child)
            queue.append(child)
    raise AssertionError("unreachable: finishable graph yielded no path")


_STRATEGIES = {
    SearchStrategy.FULL: search_full,
    SearchStrategy.DFS: search_dfs,
    SearchStrategy.BFS: search_bfs,
}


def search(graph: SynthesisGraph, strategy: SearchStrategy | str = SearchStrategy.FULL) -> SolutionPath:
    return _STRATEGIES[SearchStrategy(strategy)](graph)
