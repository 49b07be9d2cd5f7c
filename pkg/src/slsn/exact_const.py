"""Exact polynomial-time solvers for a constant number of demands.

Two variants:
  - solve_unit_length: unit lengths, arbitrary costs.  Guesses, per demand,
    the junction vertices where its optimal path meets other demands' paths
    plus a hop budget for each resulting subpath, then unions the cheapest
    hop-bounded path per subpath and keeps the best feasible union.
  - solve_unit_cost: arbitrary positive integer lengths, unit costs.  Same
    skeleton, but guesses an edge-count budget per subpath and connects it
    with the shortest-length path under that edge budget.

Guess space. Every optimal solution admits a path assignment where two
paths overlap in at most one maximal shared subpath, so each demand's path
decomposes at junction vertices into at most 2(p-1)+1 subpaths whose
endpoints are junctions or terminals.  The solver therefore enumerates, per
demand, a chain: an ordered sequence of at most min(2(p-1), budget-1)
distinct intermediate vertices together with one budget per consecutive
pair, with budgets consistent across demands for a shared pair.  Chains
whose segments admit no path within budget are skipped, as are combinations
with a non-terminal intermediate used by fewer than two demands (junctions
are shared by definition); neither skip can remove the optimal guess.  All
surviving unions are feasibility-checked and costed exactly, so the
returned cost equals the optimum whenever the optimal guess is enumerated,
which the decomposition above guarantees.

Runtime is n^O(p^4) as for the plain guess loops; in practice the search is
driven by cost-bound pruning (a partial union at or above the incumbent
cost can be abandoned, since union cost only grows).
"""

from __future__ import annotations

import warnings
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from heapq import heappop, heappush
from typing import Callable, Iterator, Optional

from .core import (
    Path,
    SlsnInstance,
    Solution,
    WeightedGraph,
    canonical_path_assignment,
    feasibility_check,
    restricted_min_cost_path,
)


@dataclass(frozen=True)
class SubpathGuess:
    """One realized guess: junction set Q and per-pair budgets over Q'.

    ``budgets`` maps unordered vertex pairs over Q' = Q + all demand
    endpoints to hop budgets (or, in the unit-cost variant, cost budgets).
    """

    q_vertices: frozenset[int]
    budgets: dict[tuple[int, int], int]

    def validate(self, p: int) -> None:
        if len(self.q_vertices) > p * (p - 1):
            raise ValueError("junction set exceeds p(p-1) vertices")
        for (u, v), b in self.budgets.items():
            if u == v:
                raise ValueError("budget pair with equal endpoints")
            if b < 1:
                raise ValueError("budgets must be at least 1")


def hop_distances(graph: WeightedGraph, source: int) -> list[Optional[int]]:
    """Unweighted BFS hop counts from source (None if unreachable)."""
    dist: list[Optional[int]] = [None] * graph.vertex_count
    dist[source] = 0
    queue = [source]
    while queue:
        nxt = []
        for v in queue:
            for idx in graph.incident(v):
                w = graph.edges[idx].other(v)
                if dist[w] is None:
                    dist[w] = dist[v] + 1
                    nxt.append(w)
        queue = nxt
    return dist


def length_distances(graph: WeightedGraph, source: int) -> list[Optional[Fraction]]:
    """Exact shortest path lengths from source (None if unreachable)."""
    dist: list[Optional[Fraction]] = [None] * graph.vertex_count
    dist[source] = Fraction(0)
    heap: list[tuple[Fraction, int]] = [(Fraction(0), source)]
    settled: set[int] = set()
    while heap:
        d, v = heappop(heap)
        if v in settled:
            continue
        settled.add(v)
        for idx in graph.incident(v):
            e = graph.edges[idx]
            w = e.other(v)
            nd = d + e.length
            if dist[w] is None or nd < dist[w]:
                dist[w] = nd
                heappush(heap, (nd, w))
    for v in range(graph.vertex_count):
        if v not in settled:
            dist[v] = None
    dist[source] = Fraction(0)
    return dist


def shortest_length_under_edge_budget(
    graph: WeightedGraph, u: int, v: int, edge_budget: int
) -> Optional[Path]:
    """Shortest-length u-v path using at most edge_budget edges.

    The dual Bellman-Ford: levels count edges, values are exact lengths.
    """
    if edge_budget < 0:
        raise ValueError("edge_budget must be nonnegative")
    n = graph.vertex_count
    edge_budget = min(edge_budget, max(n - 1, 0))
    dp: list[Optional[Fraction]] = [None] * n
    dp[u] = Fraction(0)
    levels = [list(dp)]
    parent: dict[tuple[int, int], tuple[int, int]] = {}
    for h in range(1, edge_budget + 1):
        prev = levels[-1]
        cur = list(prev)
        for idx, e in enumerate(graph.edges):
            for a, b in ((e.u, e.v), (e.v, e.u)):
                if prev[a] is not None:
                    nl = prev[a] + e.length
                    if cur[b] is None or nl < cur[b]:
                        cur[b] = nl
                        parent[(h, b)] = (a, idx)
        if cur == prev:
            break
        levels.append(cur)
    if levels[-1][v] is None:
        return None
    h = len(levels) - 1
    w = v
    vertices = [v]
    edge_seq: list[int] = []
    while h > 0:
        if (h, w) in parent and levels[h][w] != levels[h - 1][w]:
            a, idx = parent[(h, w)]
            edge_seq.append(idx)
            vertices.append(a)
            w = a
        h -= 1
    vertices.reverse()
    edge_seq.reverse()
    return Path.from_edge_sequence(graph, vertices, edge_seq)


@dataclass(frozen=True)
class _Chain:
    """One demand's guess: intermediates plus a budget per segment."""

    sequence: tuple[int, ...]  # s, intermediates..., t
    items: tuple[tuple[tuple[int, int], int], ...]  # ((u,v) sorted, budget)
    edges: frozenset[int]  # union of the segment paths
    cost: Fraction
    intermediates: frozenset[int]


def _enumerate_chains(
    instance: SlsnInstance,
    s: int,
    t: int,
    max_intermediates: int,
    total_budget: int,
    seg_min: Callable[[int, int], Optional[int]],
    seg_path: Callable[[int, int, int], Optional[Path]],
) -> list[_Chain]:
    """All honest chains for one demand, cheapest first.

    seg_min gives the smallest admissible budget for a pair (None when no
    path can ever exist); seg_path resolves a (u, v, budget) segment.
    """
    graph = instance.graph
    pool = [w for w in range(graph.vertex_count) if w != s and w != t]
    chains: list[_Chain] = []

    def budgets_for(seq: list[int]) -> Iterator[tuple[int, ...]]:
        mins = []
        for a, b in zip(seq, seq[1:]):
            lo = seg_min(a, b)
            if lo is None:
                return
            mins.append(lo)
        if sum(mins) > total_budget:
            return
        slack = total_budget - sum(mins)

        def rec(pos: int, used_extra: int, acc: list[int]) -> Iterator[tuple[int, ...]]:
            if pos == len(mins):
                yield tuple(acc)
                return
            for extra in range(slack - used_extra + 1):
                acc.append(mins[pos] + extra)
                yield from rec(pos + 1, used_extra + extra, acc)
                acc.pop()

        yield from rec(0, 0, [])

    def emit(seq: list[int]) -> None:
        for budgets in budgets_for(seq):
            items = []
            edges: set[int] = set()
            ok = True
            for (a, b), budget in zip(zip(seq, seq[1:]), budgets):
                pair = (min(a, b), max(a, b))
                path = seg_path(a, b, budget)
                if path is None:
                    ok = False
                    break
                items.append((pair, budget))
                edges.update(path.edges)
            if not ok:
                continue
            chains.append(
                _Chain(
                    tuple(seq),
                    tuple(items),
                    frozenset(edges),
                    graph.total_cost(edges),
                    frozenset(seq[1:-1]),
                )
            )

    def build(seq: list[int], depth: int) -> None:
        emit(seq + [t])
        if depth == max_intermediates:
            return
        for w in pool:
            if w in seq:
                continue
            lo = seg_min(seq[-1], w)
            if lo is None:
                continue
            seq.append(w)
            build(seq, depth + 1)
            seq.pop()

    build([s], 0)
    chains.sort(key=lambda c: (c.cost, c.sequence, c.items))
    return chains


def _search_best_union(
    instance: SlsnInstance,
    chain_lists: list[list[_Chain]],
) -> Optional[tuple[frozenset[int], dict[tuple[int, int], int], frozenset[int]]]:
    """Depth-first join of per-demand chains with cost-bound pruning.

    Returns (edge union, pair->budget map, junction vertex set) of the
    cheapest feasible combination, or None.  Combinations where some
    non-terminal intermediate appears in a single chain are skipped: a
    junction is by definition shared between two paths, so the optimal
    canonical guess never needs one.
    """
    graph = instance.graph
    terminals = instance.demands.vertices()
    edge_cost = [e.cost for e in graph.edges]
    best: dict = {"cost": None, "edges": None, "budgets": None, "q": None}

    def accept(
        cost: Fraction,
        union: frozenset[int],
        budgets: dict[tuple[int, int], int],
        inters: list[frozenset[int]],
    ) -> None:
        counts = Counter(w for s_ in inters for w in s_)
        q = set()
        for s_ in inters:
            for w in s_:
                if w not in terminals:
                    if counts[w] < 2:
                        return  # junction used by one path only: never canonical
                    q.add(w)
        # Explicit feasibility test, kept even for the unit-length variant
        # where honest chain construction already implies it.
        if not feasibility_check(instance, union).feasible:
            return
        best["cost"] = cost
        best["edges"] = union
        best["budgets"] = dict(budgets)
        best["q"] = frozenset(q)

    def rec(
        i: int,
        budgets: dict[tuple[int, int], int],
        inters: list[frozenset[int]],
        union: frozenset[int],
        cost: Fraction,
    ) -> None:
        if best["cost"] is not None and cost >= best["cost"]:
            return
        if i == len(chain_lists):
            accept(cost, union, budgets, inters)
            return
        for chain in chain_lists[i]:
            if best["cost"] is not None and chain.cost >= best["cost"]:
                break  # chains sorted by own cost; union cost dominates it
            conflict = False
            for pair, b in chain.items:
                if budgets.get(pair, b) != b:
                    conflict = True
                    break
            if conflict:
                continue
            added = chain.edges - union
            new_cost = cost + sum((edge_cost[e] for e in added), Fraction(0))
            if best["cost"] is not None and new_cost >= best["cost"]:
                continue
            new_budgets = dict(budgets)
            new_budgets.update(chain.items)
            rec(i + 1, new_budgets, inters + [chain.intermediates], union | added, new_cost)

    rec(0, {}, [], frozenset(), Fraction(0))
    if best["edges"] is None:
        return None
    return best["edges"], best["budgets"], best["q"]


def _finish(instance: SlsnInstance, union: frozenset[int]) -> Solution:
    paths = canonical_path_assignment(instance, union)
    return Solution.build(instance, union, paths)


def _warn_large_p(p: int) -> None:
    if p > 4:
        warnings.warn(
            f"p={p} demands: runtime grows as n^O(p^4); expect this to be slow",
            RuntimeWarning,
            stacklevel=3,
        )


def solve_unit_length(instance: SlsnInstance) -> Optional[Solution]:
    """Exact optimum for unit-length arbitrary-cost instances, or None."""
    graph = instance.graph
    if not graph.has_unit_lengths():
        raise ValueError("solve_unit_length requires unit edge lengths")
    p = instance.demands.size
    if p < 1:
        raise ValueError("at least one demand required")
    _warn_large_p(p)
    hop_budget = min(int(instance.L), max(graph.vertex_count - 1, 0))
    if hop_budget < 1:
        return None
    hops = [hop_distances(graph, v) for v in range(graph.vertex_count)]
    path_memo: dict[tuple[int, int, int], Optional[Path]] = {}

    def seg_min(a: int, b: int) -> Optional[int]:
        return hops[a][b]

    def seg_path(a: int, b: int, budget: int) -> Optional[Path]:
        key = (min(a, b), max(a, b), budget)
        if key not in path_memo:
            path_memo[key] = restricted_min_cost_path(graph, key[0], key[1], budget)
        return path_memo[key]

    max_inter = min(2 * (p - 1), hop_budget - 1)
    chain_lists = [
        _enumerate_chains(instance, s, t, max_inter, hop_budget, seg_min, seg_path)
        for s, t in instance.demands.pairs
    ]
    if any(not lst for lst in chain_lists):
        return None
    found = _search_best_union(instance, chain_lists)
    if found is None:
        return None
    union, budgets, q = found
    guess = SubpathGuess(q, budgets)
    guess.validate(p)
    return _finish(instance, union)


def solve_unit_cost(instance: SlsnInstance) -> Optional[Solution]:
    """Exact optimum for integer-length unit-cost instances, or None."""
    graph = instance.graph
    if not graph.has_unit_costs():
        raise ValueError("solve_unit_cost requires unit edge costs")
    if not graph.has_integer_lengths():
        raise ValueError("solve_unit_cost requires positive integer edge lengths")
    p = instance.demands.size
    if p < 1:
        raise ValueError("at least one demand required")
    _warn_large_p(p)
    n = graph.vertex_count
    cost_budget = max(n - 1, 0)  # simple paths use at most n-1 edges
    if cost_budget < 1:
        return None
    hops = [hop_distances(graph, v) for v in range(n)]
    lengths = [length_distances(graph, v) for v in range(n)]
    path_memo: dict[tuple[int, int, int], Optional[Path]] = {}

    def seg_min(a: int, b: int) -> Optional[int]:
        return hops[a][b]

    def seg_path(a: int, b: int, budget: int) -> Optional[Path]:
        key = (min(a, b), max(a, b), budget)
        if key not in path_memo:
            path_memo[key] = shortest_length_under_edge_budget(
                graph, key[0], key[1], budget
            )
        return path_memo[key]

    max_inter = min(2 * (p - 1), cost_budget - 1)

    def length_filtered_chains(s: int, t: int) -> list[_Chain]:
        chains = _enumerate_chains(
            instance, s, t, max_inter, cost_budget, seg_min, seg_path
        )
        kept = []
        for chain in chains:
            # A chain whose segments cannot jointly meet L is useless: even
            # with unbounded cost budgets the concatenation is too long.
            total = Fraction(0)
            ok = True
            for a, b in zip(chain.sequence, chain.sequence[1:]):
                d = lengths[a][b]
                if d is None:
                    ok = False
                    break
                total += d
            if ok and total <= instance.L:
                kept.append(chain)
        return kept

    chain_lists = [length_filtered_chains(s, t) for s, t in instance.demands.pairs]
    if any(not lst for lst in chain_lists):
        if feasibility_check(instance, range(graph.edge_count)).feasible:
            raise AssertionError("feasible instance but no admissible chains")
        return None
    found = _search_best_union(instance, chain_lists)
    if found is None:
        return None
    union, budgets, q = found
    guess = SubpathGuess(q, budgets)
    guess.validate(p)
    return _finish(instance, union)
