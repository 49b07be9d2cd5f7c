import json
from fractions import Fraction

import pytest

from slsn.core import DemandGraph, SlsnInstance, WeightedGraph
from slsn.formats import (
    dump_instance_json,
    dump_instance_text,
    dump_mcc,
    parse_instance,
    parse_mcc,
    solution_from_json,
    solution_to_json,
)
from slsn.oracle import brute_force_slsn

SAMPLE = """\
slsn 1
# a three vertex chain with a shortcut
3 3 1
3/2
0 1 1 1
1 2 1 1
0 2 1 3
0 2
"""


def test_parse_text():
    inst = parse_instance(SAMPLE)
    assert inst.graph.vertex_count == 3
    assert inst.graph.edge_count == 3
    assert inst.L == Fraction(3, 2)
    assert inst.demands.pairs == ((0, 2),)


def test_text_round_trip():
    inst = parse_instance(SAMPLE)
    again = parse_instance(dump_instance_text(inst))
    assert dump_instance_text(again) == dump_instance_text(inst)


def test_json_mirror_round_trip():
    inst = parse_instance(SAMPLE)
    blob = dump_instance_json(inst)
    again = parse_instance(blob)
    assert dump_instance_text(again) == dump_instance_text(inst)
    data = json.loads(blob)
    assert data["version"] == 1 and data["L"] == "3/2"


def test_labels_survive_json():
    g = WeightedGraph(2, [(0, 1, 1, 1)], labels=["r", "l_{1,2}"])
    inst = SlsnInstance(g, 1, DemandGraph([(0, 1)]))
    again = parse_instance(dump_instance_json(inst))
    assert again.graph.labels == ("r", "l_{1,2}")


def test_missing_header_rejected():
    with pytest.raises(ValueError):
        parse_instance("3 3 1\n2\n0 1 1 1\n")


def test_mcc_round_trip():
    text = dump_mcc(3, [(0, 1), (1, 2)], {0: 1, 1: 2, 2: 3}, 3)
    n, edges, coloring, k = parse_mcc(text)
    assert (n, k) == (3, 3)
    assert edges == [(0, 1), (1, 2)]
    assert coloring == {0: 1, 1: 2, 2: 3}


def test_solution_round_trip():
    inst = parse_instance(SAMPLE.replace("3/2", "2"))
    sol = brute_force_slsn(inst)
    data = solution_to_json(sol)
    back = solution_from_json(inst, data)
    assert back.total_cost == sol.total_cost
    assert back.edge_subset == sol.edge_subset


def test_solution_rejects_cost_mismatch():
    inst = parse_instance(SAMPLE.replace("3/2", "2"))
    sol = brute_force_slsn(inst)
    data = solution_to_json(sol)
    data["cost"] = "999"
    with pytest.raises(ValueError):
        solution_from_json(inst, data)


def test_solution_rejects_broken_path():
    inst = parse_instance(SAMPLE.replace("3/2", "2"))
    sol = brute_force_slsn(inst)
    data = solution_to_json(sol)
    data["paths"] = [[0, 2]]  # edge 0-2 is not in the chosen subset
    with pytest.raises(ValueError):
        solution_from_json(inst, data)
