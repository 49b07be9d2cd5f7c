"""Seeded random instance generators for tests and the bench suite."""

from __future__ import annotations

import random
from fractions import Fraction

from .core import DemandGraph, SlsnInstance, WeightedGraph


def random_instance(
    rng: random.Random,
    n_max: int = 8,
    m_max: int = 12,
    p_choices: tuple[int, ...] = (1, 2, 3),
    cost_range: tuple[int, int] = (1, 10),
    length_kind: str = "unit",  # unit | integer | rational
    length_range: tuple[int, int] = (1, 4),
    L_range: tuple[int, int] = (1, 4),
    star: bool = False,
    p_max_star: int = 4,
) -> SlsnInstance:
    """One random connected-ish instance within the desk-scale envelope."""
    n = rng.randint(3, n_max)
    max_m = n * (n - 1) // 2
    m = rng.randint(min(n - 1, max_m), min(m_max, max_m))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    rng.shuffle(pairs)

    def length() -> Fraction:
        if length_kind == "unit":
            return Fraction(1)
        if length_kind == "integer":
            return Fraction(rng.randint(*length_range))
        return Fraction(rng.randint(1, 2 * length_range[1]), rng.randint(1, 3))

    def cost() -> Fraction:
        return Fraction(rng.randint(*cost_range))

    edges = [(u, v, length(), cost()) for u, v in pairs[:m]]
    graph = WeightedGraph(n, edges)
    if star:
        root = rng.randrange(n)
        others = [v for v in range(n) if v != root]
        rng.shuffle(others)
        p = rng.randint(1, min(p_max_star, len(others)))
        demands = DemandGraph([(root, t) for t in others[:p]])
    else:
        cand = [(u, v) for u in range(n) for v in range(u + 1, n)]
        rng.shuffle(cand)
        p = rng.choice(p_choices)
        demands = DemandGraph(cand[:p])
    L = Fraction(rng.randint(*L_range))
    return SlsnInstance(graph, L, demands)


def random_unit_cost_instance(rng: random.Random, **kw) -> SlsnInstance:
    """Unit costs, integer lengths 1..4 (the corollary setting)."""
    inst = random_instance(
        rng, length_kind="integer", cost_range=(1, 1), L_range=(2, 8), **kw
    )
    return inst
