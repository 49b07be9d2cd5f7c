import random

import pytest

from slsn.core import DemandGraph, SlsnInstance, WeightedGraph


@pytest.fixture
def triangle_unit():
    """Triangle a-b-c with unit lengths and unit costs."""
    return WeightedGraph(3, [(0, 1, 1, 1), (1, 2, 1, 1), (0, 2, 1, 1)])


@pytest.fixture
def two_route():
    """Direct 0-2 edge (cost 5) vs two-edge route via 1 (cost 1+1)."""
    return WeightedGraph(3, [(0, 2, 1, 5), (0, 1, 1, 1), (1, 2, 1, 1)])


@pytest.fixture
def detour_graph():
    """Path 0-1-2 (costs 1,1) plus direct 0-2 (cost 3), unit lengths."""
    return WeightedGraph(3, [(0, 1, 1, 1), (1, 2, 1, 1), (0, 2, 1, 3)])


@pytest.fixture
def theta_graph():
    """Two demands that share a middle edge on a theta-shaped graph.

    0-2-3-1 is the shared spine (length 3); 0-4-1 and 0-5-1 are longer,
    more expensive side arcs (length 4 each).
    """
    edges = [
        (0, 2, 1, 1),
        (2, 3, 1, 1),
        (3, 1, 1, 1),
        (0, 4, 2, 4),
        (4, 1, 2, 4),
        (0, 5, 2, 4),
        (5, 1, 2, 4),
    ]
    return WeightedGraph(6, edges)


def make_instance(graph, L, pairs):
    return SlsnInstance(graph, L, DemandGraph(pairs))


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)
