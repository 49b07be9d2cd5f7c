"""Demand-graph dichotomy: star, constant-size, or provably hard.

A demand graph H is easy when it is a star (any size) or has fewer than
8k^10 edges for the chosen parameter k >= 2.  Otherwise a hard witness is
extracted constructively: an induced subgraph isomorphic to one of five
patterns, each of which supports a clique-encoding gadget.

Pattern vocabulary (q = k(k-1) throughout):
  H_k0_star  star with q leaves plus one edge disjoint from it
  H_k1_star  star with q+1 leaves plus an edge hanging off one leaf
  H_k2_star  star with q+2 leaves plus an edge between two leaves
  H_kk       induced matching of q+1 edges
  H_2k       q+2 vertices containing a complete 2-by-q bipartite subgraph

The extraction follows the constructive argument: low maximum degree
yields a large greedy induced matching; otherwise a high-degree vertex s
is examined -- a second vertex adjacent to many of its neighbors S gives
the bipartite pattern, an independent S gives a star-plus-edge pattern,
and an edge inside S survives a minimum-degree deletion loop that builds
the star-with-internal-edge pattern.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

from .core import DemandGraph


class HardCase(enum.Enum):
    H_K0_STAR = "h0star"
    H_K1_STAR = "h1star"
    H_K2_STAR = "h2star"
    H_KK = "matching"
    H_2K = "bipartite"


@dataclass(frozen=True)
class HardWitness:
    """An injection of a hard pattern's roles into H's vertices.

    Role keys by case:
      H_k0_star: "center", ("leaf", i), "edge_u", "edge_v"
      H_k1_star: "center", ("leaf", i), "edge_u" (a leaf), "edge_v" (outside)
      H_k2_star: "center", ("leaf", i), "edge_u", "edge_v" (both leaves)
      H_kk:      ("m", i, 0) and ("m", i, 1), endpoints of matching edge i
      H_2k:      ("side2", 0), ("side2", 1), ("big", i)
    """

    case_tag: HardCase
    k: int
    vertex_map: dict


class DemandClassKind(enum.Enum):
    STAR = "star"
    BOUNDED = "bounded"
    HARD = "hard"


@dataclass(frozen=True)
class DemandClass:
    kind: DemandClassKind
    root: Optional[int] = None  # star root
    size: Optional[int] = None  # |H| when bounded
    witness: Optional[HardWitness] = None


def hardness_threshold(k: int) -> int:
    return 8 * k**10


def classify(H: DemandGraph, k: int = 2) -> DemandClass:
    """Place H in the dichotomy: Star | Bounded(|H|) | Hard(witness)."""
    if k < 2:
        raise ValueError("k must be at least 2")
    if H.size == 0:
        return DemandClass(DemandClassKind.BOUNDED, size=0)
    root = H.star_root()
    if root is not None:
        return DemandClass(DemandClassKind.STAR, root=root)
    if H.size < hardness_threshold(k):
        return DemandClass(DemandClassKind.BOUNDED, size=H.size)
    witness = find_hard_pattern(H, k)
    if not verify_witness(H, witness):
        raise AssertionError("constructed hard witness failed verification")
    return DemandClass(DemandClassKind.HARD, witness=witness)


def _adjacency(H: DemandGraph) -> dict[int, set[int]]:
    adj: dict[int, set[int]] = {}
    for s, t in H.pairs:
        adj.setdefault(s, set()).add(t)
        adj.setdefault(t, set()).add(s)
    return adj


def find_hard_pattern(H: DemandGraph, k: int) -> HardWitness:
    """Extract a hard induced pattern from a large non-star demand graph.

    Requires H not a star with at least 8k^10 edges.  All choices are
    deterministic: lowest-index edges and vertices are preferred.
    """
    if H.star_root() is not None:
        raise ValueError("H is a star; no hard pattern exists")
    if H.size < hardness_threshold(k):
        raise ValueError(f"H has {H.size} < 8k^10 edges")
    q = k * (k - 1)
    adj = _adjacency(H)
    deg_cap = 2 * k**4

    if max(len(a) for a in adj.values()) < deg_cap:
        return _greedy_induced_matching(H, adj, k)

    s = min(v for v, a in adj.items() if len(a) >= deg_cap)
    S = adj[s]

    # another vertex adjacent to >= q vertices of S: bipartite pattern
    for w in sorted(adj):
        if w == s:
            continue
        common = sorted(adj[w] & S)
        if len(common) >= q:
            picked = [x for x in common if x != w][:q]
            vmap: dict = {("side2", 0): s, ("side2", 1): w}
            for i, x in enumerate(picked):
                vmap[("big", i)] = x
            return HardWitness(HardCase.H_2K, k, vmap)

    internal = [
        (a, b) for a, b in H.pairs if a in S and b in S
    ]
    if not internal:
        # S independent: some edge has an endpoint outside S + {s}
        for a, b in H.pairs:
            if a not in S | {s} or b not in S | {s}:
                u, v = a, b
                break
        else:
            raise AssertionError("non-star H with independent S must leave S+s")
        T = sorted(S - adj[u] - adj[v] - {u, v})[:q]
        vmap = {"center": s, "edge_u": u, "edge_v": v}
        in_star = [x for x in (u, v) if x in S]
        if in_star:
            # one endpoint is a star leaf: H_k1_star with that endpoint as u
            leaf = in_star[0]
            outside = v if leaf == u else u
            vmap = {"center": s, "edge_u": leaf, "edge_v": outside}
            for i, x in enumerate(T):
                vmap[("leaf", i)] = x
            return HardWitness(HardCase.H_K1_STAR, k, vmap)
        for i, x in enumerate(T):
            vmap[("leaf", i)] = x
        return HardWitness(HardCase.H_K0_STAR, k, vmap)

    # minimum-degree deletion loop inside S
    S_t = set(S)
    T: list[int] = []
    while len(T) < q:
        assert any(a in S_t and b in S_t for a, b in H.pairs), (
            "loop invariant: an edge inside S_t must survive"
        )
        v_t = min(S_t, key=lambda v: (len(adj[v] & S_t), v))
        T.append(v_t)
        S_t -= adj[v_t] | {v_t}
    for a, b in H.pairs:
        if a in S_t and b in S_t:
            u, v = min(a, b), max(a, b)
            break
    else:
        raise AssertionError("deletion loop left no internal edge")
    vmap = {"center": s, "edge_u": u, "edge_v": v}
    for i, x in enumerate(T):
        vmap[("leaf", i)] = x
    return HardWitness(HardCase.H_K2_STAR, k, vmap)


def _greedy_induced_matching(
    H: DemandGraph, adj: dict[int, set[int]], k: int
) -> HardWitness:
    need = k * (k - 1) + 1
    alive: set[int] = set(adj)
    matching: list[tuple[int, int]] = []
    for a, b in H.pairs:  # lowest-index edge first
        if a in alive and b in alive:
            matching.append((a, b))
            if len(matching) == need:
                break
            alive -= adj[a] | adj[b] | {a, b}
    if len(matching) < need:
        raise AssertionError("greedy matching below guaranteed size")
    vmap: dict = {}
    for i, (a, b) in enumerate(matching):
        vmap[("m", i, 0)] = a
        vmap[("m", i, 1)] = b
    return HardWitness(HardCase.H_KK, k, vmap)


def verify_witness(H: DemandGraph, w: HardWitness) -> bool:
    """Check the tagged pattern structurally against H's induced subgraph.

    Direct structural tests (star center adjacency, leaf independence,
    matching independence, bipartite containment), no isomorphism search.
    Returns False on any failure.
    """
    q = w.k * (w.k - 1)
    vmap = w.vertex_map
    image = list(vmap.values())
    if len(set(image)) != len(image):
        return False
    adj = _adjacency(H)
    for v in image:
        if v not in adj:
            return False

    def connected(a: int, b: int) -> bool:
        return b in adj[a]

    if w.case_tag is HardCase.H_KK:
        keys = sorted((key for key in vmap if key[0] == "m"), key=lambda x: (x[1], x[2]))
        count = len(keys) // 2
        if count != q + 1 or len(keys) != 2 * count:
            return False
        ends = [(vmap[("m", i, 0)], vmap[("m", i, 1)]) for i in range(count)]
        for i, (a, b) in enumerate(ends):
            if not connected(a, b):
                return False
            for j in range(i + 1, count):
                c, d = ends[j]
                if any(connected(x, y) for x in (a, b) for y in (c, d)):
                    return False  # not induced: cross edge between matched pairs
        return True

    if w.case_tag is HardCase.H_2K:
        side = [vmap.get(("side2", 0)), vmap.get(("side2", 1))]
        big = [vmap[key] for key in sorted(k_ for k_ in vmap if k_[0] == "big")]
        if None in side or len(big) != q or len(vmap) != q + 2:
            return False
        return all(connected(s_, b_) for s_ in side for b_ in big)

    center = vmap.get("center")
    u, v = vmap.get("edge_u"), vmap.get("edge_v")
    leaves = [vmap[key] for key in sorted(k_ for k_ in vmap if isinstance(k_, tuple) and k_[0] == "leaf")]
    if center is None or u is None or v is None:
        return False
    if not connected(u, v):
        return False
    if any(not connected(center, leaf) for leaf in leaves):
        return False
    if any(connected(a, b) for i, a in enumerate(leaves) for b in leaves[i + 1 :]):
        return False  # leaves must be mutually non-adjacent (induced star)
    if any(connected(u, leaf) or connected(v, leaf) for leaf in leaves):
        return False  # the extra edge's endpoints must avoid the plain leaves

    if w.case_tag is HardCase.H_K0_STAR:
        return (
            len(leaves) == q
            and not connected(center, u)
            and not connected(center, v)
        )
    if w.case_tag is HardCase.H_K1_STAR:
        # u is one more leaf; v stays outside the star entirely
        return (
            len(leaves) == q
            and connected(center, u)
            and not connected(center, v)
        )
    if w.case_tag is HardCase.H_K2_STAR:
        return len(leaves) == q and connected(center, u) and connected(center, v)
    return False
