import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_spanning_trees
from pfaffform.corpus import random_graph, random_suite
from pfaffform.graph import (
    CycleBasis,
    Graph,
    GraphError,
    GraphParseError,
    contract_edge,
    cycle_matrix,
    default_tree,
    delete_edge,
    dipole,
    fundamental_cycle_basis,
    incidence_matrix,
    is_bridge,
    parse_graph,
    path_matrix,
    spanning_trees,
    subdivide_edge,
    subdivided_basis,
    tree_path,
    validate_cycle_basis,
)
from pfaffform.linalg import RingMatrix, determinant, minor


def test_parse_text_and_json_agree():
    a = parse_graph("e 1 2 1\ne 2 1 3  # comment; with semicolon\ne 3 2 3\ne 4 2 3")
    b = parse_graph(json.dumps({"edges": [[2, 1], [1, 3], [2, 3], [2, 3]]}))
    c = parse_graph("e 1 2 1; e 2 1 3; e 3 2 3; e 4 2 3")
    assert a == b == c
    assert a.num_vertices == 3 and a.v_star == 3 and a.loop_number == 2
    assert parse_graph(a.to_text()) == a
    assert parse_graph(a.to_json_text()) == a


def test_v_star_round_trip():
    g = parse_graph("e 1 1 2; e 2 2 3; vstar 1")
    assert g.v_star == 1
    assert parse_graph(g.to_text()) == g


@pytest.mark.parametrize("text", [
    "e 1 1 2; e 3 2 3",       # label gap
    "e 1 1 2; e 1 2 3",       # duplicate label
    "edge 1 2",               # unknown record
    "e 1 a 2",                # non-integer
    "{not json",
])
def test_parse_errors(text):
    with pytest.raises(GraphParseError):
        parse_graph(text)


def test_disconnected_graph_rejected():
    with pytest.raises(GraphError):
        Graph(4, ((1, 2), (3, 4)))
    with pytest.raises(GraphError):
        parse_graph("e 1 0 1")


def test_dunce_spanning_trees(dunce):
    # brute force: {3,4} is a pair of parallel edges and so is not a tree
    trees = spanning_trees(dunce)
    assert trees == ((1, 2), (1, 3), (1, 4), (2, 3), (2, 4))
    assert list(trees) == brute_spanning_trees(dunce)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from([0, 1, 2, 3]))
def test_spanning_trees_match_brute_force(seed, loops):
    import random

    g = random_graph(random.Random(seed), loops, max_edges=7)
    assert list(spanning_trees(g)) == brute_spanning_trees(g)


def test_incidence_matrix_signs(dunce):
    inc = incidence_matrix(dunce)
    # columns are vertices 1, 2 (v_star = 3 dropped); tail -1, head +1
    assert inc == RingMatrix([[1, -1], [-1, 0], [0, -1], [0, -1]])
    loop = parse_graph("e 1 1 2; e 2 2 2")
    assert incidence_matrix(loop).row(1) == (0,)


def test_fundamental_basis_of_dunce(dunce):
    b = fundamental_cycle_basis(dunce, (2, 4))
    assert b.columns == ((1, 1, 0, -1), (0, 0, 1, -1))
    assert b.defining_edges == (1, 3)
    assert b.is_simple_cycles(dunce)


def test_theta_fundamental_basis(theta):
    b = fundamental_cycle_basis(theta, (3,))
    assert cycle_matrix(theta, b) == RingMatrix([[1, 0], [0, 1], [-1, -1]])


def test_path_matrix_is_left_inverse(suite50):
    for g in suite50:
        inc = incidence_matrix(g)
        for t in spanning_trees(g)[:3]:
            p = path_matrix(g, t)
            assert p.T @ inc == RingMatrix.identity(g.num_vertices - 1)
            c = cycle_matrix(g, fundamental_cycle_basis(g, t))
            assert (inc.T @ c).is_zero()


def test_tree_path_is_signed():
    g = parse_graph("e 1 1 2; e 2 3 2")
    assert tree_path(g, (1, 2), 3, 1) == [-1, 1]


def test_fundamental_minors_unimodular(suite50):
    for g in suite50:
        t = default_tree(g)
        c = cycle_matrix(g, fundamental_cycle_basis(g, t))
        tbar = [e for e in range(1, g.num_edges + 1) if e not in t]
        assert determinant(minor(c, [e - 1 for e in tbar], None, "keep")) == 1


def test_invalid_bases_rejected(dunce):
    good = fundamental_cycle_basis(dunce)
    with pytest.raises(GraphError):
        validate_cycle_basis(dunce, CycleBasis((good.columns[0],), num_edges=4))
    doubled = CycleBasis((good.columns[0], tuple(2 * x for x in good.columns[1])), num_edges=4)
    with pytest.raises(GraphError):
        validate_cycle_basis(dunce, doubled)
    with pytest.raises(GraphError):
        validate_cycle_basis(dunce, CycleBasis(((1, 0, 0, 0), good.columns[1]), num_edges=4))
    with pytest.raises(GraphError):
        fundamental_cycle_basis(dunce, (3, 4))


def test_subdividing_theta_gives_dunce(theta, dunce):
    assert subdivide_edge(theta, 1) == dunce


def test_double_triangle_construction():
    from pfaffform.corpus import load_example

    theta = load_example("theta")
    assert subdivide_edge(subdivide_edge(theta, 3), 1) == load_example("double_triangle")


def test_subdivided_basis_duplicates_row(theta):
    b = fundamental_cycle_basis(theta, (3,))
    b2 = subdivided_basis(b, 1)
    assert b2.columns == ((1, 1, 0, -1), (0, 0, 1, -1))
    validate_cycle_basis(subdivide_edge(theta, 1), b2)


def test_contract_delete_and_bridges(dunce):
    assert is_bridge(dunce, 1) is False
    path = parse_graph("e 1 1 2; e 2 2 3; e 3 3 3")
    assert is_bridge(path, 1)
    with pytest.raises(GraphError):
        delete_edge(path, 1)
    g = contract_edge(dunce, 1)
    assert g.num_vertices == 2 and g.num_edges == 3 and g.loop_number == 2
    with pytest.raises(GraphError):
        contract_edge(path, 3)


def test_dipole():
    g = dipole(5)
    assert g.num_vertices == 2 and g.loop_number == 4
    assert len(spanning_trees(g)) == 5


def test_random_suite_properties():
    gs = random_suite(seed=0, count=50)
    assert len(gs) == 50
    assert {g.loop_number for g in gs} == {0, 2, 4}
    assert all(g.num_edges <= 9 for g in gs)
    assert [g.fingerprint() for g in gs] == [g.fingerprint() for g in random_suite(seed=0, count=50)]
