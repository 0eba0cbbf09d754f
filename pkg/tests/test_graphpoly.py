import pytest

from oracles import brute_symanzik_terms
from pfaffform.corpus import corpus, load_example
from pfaffform.graph import GraphError, fundamental_cycle_basis, parse_graph, path_matrix
from pfaffform.graphpoly import (
    concatenated_det_identities,
    cycle_basis_change,
    cycle_laplacian,
    dodgson,
    edge_dodgson,
    expanded_laplacian,
    inverse_entries_via_dodgson,
    laplacian_bundle,
    matrix_tree_checks,
    symanzik,
    symanzik_properties,
    vertex_index,
)
from pfaffform.linalg import RingMatrix, determinant
from pfaffform.poly import MultiPoly, parse_poly

DUNCE_PSI = "a1*a3 + a1*a4 + a2*a3 + a2*a4 + a3*a4"


def test_theta_symanzik(theta):
    assert symanzik(theta).to_text() == "a1*a2 + a1*a3 + a2*a3"


@pytest.mark.parametrize("method", ["trees", "expanded_det", "cycle_det"])
def test_dunce_symanzik_all_routes(dunce, method):
    assert symanzik(dunce, method) == parse_poly(DUNCE_PSI, 4)


def test_symanzik_of_tree_is_one():
    g = parse_graph("e 1 1 2; e 2 3 2; e 3 2 4")
    for method in ("trees", "expanded_det", "cycle_det"):
        assert symanzik(g, method) == MultiPoly.const(3, 1)


def test_symanzik_matches_brute_force(suite50):
    for g in suite50[:20]:
        expected = MultiPoly.from_terms(g.num_edges, [(e, 1) for e in brute_symanzik_terms(g)])
        assert symanzik(g) == expected


def test_dunce_dodgsons(dunce):
    assert dodgson(dunce, [1], [3]).to_text() == "-a4"
    assert dodgson(dunce, [1], [3], "expansion") == dodgson(dunce, [1], [3])
    assert edge_dodgson(dunce, 3, 1) == edge_dodgson(dunce, 1, 3)
    # psi^{e,e} is psi of the graph with e deleted: a triangle here
    assert edge_dodgson(dunce, 4, 4) == parse_poly("a1 + a2 + a3", 4)


def test_vertex_indices(dunce):
    assert vertex_index(dunce, 1) == 5 and vertex_index(dunce, 2) == 6
    with pytest.raises(GraphError):
        vertex_index(dunce, 3)
    # 2-forests separating v1 from v_star: {1}, {3}, {4}; weight = edges left out
    assert dodgson(dunce, [5], [5]) == parse_poly("a2*a3*a4 + a1*a2*a4 + a1*a2*a3", 4)


def test_expanded_laplacian_shape_and_det(dunce):
    m = expanded_laplacian(dunce)
    assert m.shape == (6, 6)
    assert determinant(m) == symanzik(dunce)


def test_theta_cycle_laplacian(theta):
    lam = cycle_laplacian(theta, fundamental_cycle_basis(theta, (3,)))
    a1, a2, a3 = (MultiPoly.var(3, k) for k in (1, 2, 3))
    assert lam == RingMatrix([[a1 + a3, a3], [a3, a2 + a3]])


def test_basis_change_is_congruence(dunce):
    b = fundamental_cycle_basis(dunce)
    p = RingMatrix([[1, 1], [0, 1]])
    lam = cycle_laplacian(dunce, b)
    pp = p.map(lambda x: MultiPoly.const(4, x))
    assert cycle_basis_change(dunce, b, p.to_lists()) == pp.T @ lam @ pp


def test_concatenated_minor_for_dunce(dunce):
    # [C | I] is 4x4 with det = +-(number of spanning trees)
    b = laplacian_bundle(dunce)
    assert abs(determinant(b.C.hstack(b.I))) == 5
    assert abs(determinant(b.C.hstack(path_matrix(dunce)))) == 1


@pytest.mark.parametrize("report", [symanzik_properties, inverse_entries_via_dodgson,
                                    concatenated_det_identities, matrix_tree_checks])
def test_reports_pass_on_corpus(report):
    for name, g in corpus().items():
        rep = report(g)
        assert rep.passed, f"{name}: {rep.failures()}"


@pytest.mark.parametrize("report", [symanzik_properties, inverse_entries_via_dodgson,
                                    concatenated_det_identities, matrix_tree_checks])
def test_reports_pass_on_random_suite(report, suite50):
    for g in suite50:
        rep = report(g)
        assert rep.passed, f"{g.fingerprint()}: {rep.failures()}"


def test_identities_hold_for_non_fundamental_basis(dunce):
    b = fundamental_cycle_basis(dunce).transform([[1, 1], [0, 1]])
    assert concatenated_det_identities(dunce, b).passed
    assert matrix_tree_checks(dunce, b).passed


def test_double_triangle_psi():
    # theta with edge 3 split, then edge 1 split: psi pulls back from theta
    g = load_example("double_triangle")
    expected = parse_poly("a1*a3 + a2*a3 + a1*a4 + a1*a5 + a2*a4 + a2*a5 + a3*a4 + a3*a5", 5)
    assert symanzik(g) == expected
    assert symanzik(g).evaluate([1] * 5) == 8
