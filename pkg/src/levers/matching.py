"""Bipartite double cover and maximum matching.

The digraph is doubled: every factor gets an out-copy in the top layer and
an in-copy in the bottom layer, and each influence u -> v becomes the
bipartite edge (u_top, v_bottom). Maximum matchings of the cover are what
the control-configuration analysis consumes; only the structure matters
here, weights and signs are ignored.

All orderings are deterministic (sorted factor ids drive BFS/DFS order), so
repeated runs return the identical matching.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping

from .model import FcmGraph

_BRUTE_MAX_NODES = 15


class OracleSizeError(ValueError):
    """Brute-force oracle invoked on a graph beyond its size guard."""


@dataclass(frozen=True)
class BipartiteGraph:
    """Double cover of a digraph: top = out-copies, bottom = in-copies."""

    top: tuple[str, ...]
    bottom: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]

    def out_adjacency(self) -> dict[str, list[str]]:
        """top node -> sorted list of bottom neighbours."""
        adj: dict[str, list[str]] = {u: [] for u in self.top}
        for u, v in self.edges:
            adj[u].append(v)
        for u in adj:
            adj[u].sort()
        return adj


@dataclass(frozen=True)
class Matching:
    """A maximum matching of the double cover.

    ``pairs`` maps each matched bottom node to its top partner; it is
    injective in both directions. ``unmatched`` holds the bottom nodes with
    no matched in-edge; these are exactly the driver candidates.
    """

    pairs: Mapping[str, str]
    cardinality: int
    unmatched: frozenset[str]


def to_bipartite(graph: FcmGraph) -> BipartiteGraph:
    """Double cover of the graph; |edges| equals |influences|."""
    ids = graph.factor_ids
    edges = tuple(sorted((e.source, e.target) for e in graph.influences))
    return BipartiteGraph(top=ids, bottom=ids, edges=edges)


_INF = float("inf")


def hopcroft_karp(bg: BipartiteGraph) -> Matching:
    """Maximum-cardinality matching via Hopcroft-Karp.

    BFS builds layers of alternating paths from every free top node, DFS
    augments along shortest paths only; both process nodes in sorted order,
    which pins the tie-breaks (a star a -> b, a -> c matches a to b).
    """
    adj = bg.out_adjacency()
    tops = sorted(bg.top)
    pair_top: dict[str, str] = {}
    pair_bottom: dict[str, str] = {}
    dist: dict[str, float] = {}

    def bfs() -> bool:
        queue: deque[str] = deque()
        for u in tops:
            if u not in pair_top:
                dist[u] = 0
                queue.append(u)
            else:
                dist[u] = _INF
        found_free = _INF
        while queue:
            u = queue.popleft()
            if dist[u] >= found_free:
                continue
            for v in adj[u]:
                if v not in pair_bottom:
                    found_free = min(found_free, dist[u] + 1)
                else:
                    nxt = pair_bottom[v]
                    if dist[nxt] == _INF:
                        dist[nxt] = dist[u] + 1
                        queue.append(nxt)
        return found_free != _INF

    def dfs(u: str) -> bool:
        for v in adj[u]:
            if v not in pair_bottom:
                pair_top[u] = v
                pair_bottom[v] = u
                return True
            nxt = pair_bottom[v]
            if dist[nxt] == dist[u] + 1 and dfs(nxt):
                pair_top[u] = v
                pair_bottom[v] = u
                return True
        dist[u] = _INF
        return False

    while bfs():
        for u in tops:
            if u not in pair_top and dist[u] == 0:
                dfs(u)

    unmatched = frozenset(v for v in bg.bottom if v not in pair_bottom)
    return Matching(
        pairs=dict(sorted(pair_bottom.items())),
        cardinality=len(pair_bottom),
        unmatched=unmatched,
    )


def max_matching_brute(bg: BipartiteGraph) -> int:
    """Exhaustive maximum-matching cardinality, the test oracle.

    Enumerates every injective assignment of top nodes to bottom nodes
    (memoised on the set of used bottoms, which prunes repeated states).
    Guarded to 15 nodes per side.
    """
    if len(bg.top) > _BRUTE_MAX_NODES:
        raise OracleSizeError(
            f"brute-force matching limited to {_BRUTE_MAX_NODES} nodes, "
            f"got {len(bg.top)}"
        )
    bottoms = sorted(bg.bottom)
    bottom_index = {v: i for i, v in enumerate(bottoms)}
    adj_masks = []
    out_adj = bg.out_adjacency()
    for u in sorted(bg.top):
        mask = 0
        for v in out_adj[u]:
            mask |= 1 << bottom_index[v]
        adj_masks.append(mask)

    @lru_cache(maxsize=None)
    def best(i: int, used: int) -> int:
        if i == len(adj_masks):
            return 0
        result = best(i + 1, used)
        available = adj_masks[i] & ~used
        while available:
            bit = available & -available
            result = max(result, 1 + best(i + 1, used | bit))
            available &= available - 1
        return result

    try:
        return best(0, 0)
    finally:
        best.cache_clear()
