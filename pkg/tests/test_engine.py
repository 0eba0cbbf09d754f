import random
from fractions import Fraction

import pytest

from pfaffform.corpus import corpus, load_example, reference_basis
from pfaffform.engine import (
    LoopNumberTooLarge,
    alpha_form,
    basis_change_check,
    dipole_basis,
    dipole_phi,
    phi_form,
    property_checks,
    random_unimodular,
    sign_factor,
    subdivision_check,
    subdivision_images,
    verify_main_theorem,
)
from pfaffform.forms import FormExpression, PolyForm
from pfaffform.graph import dipole, fundamental_cycle_basis, parse_graph, path_matrix, subdivide_edge
from pfaffform.graphpoly import symanzik
from pfaffform.poly import variables


def da(n, *edges):
    return PolyForm.da(n, *edges)


def dunce_alpha_golden():
    a1, a2, a3, a4 = variables(4)
    psi = a1 * a3 + a2 * a3 + a1 * a4 + a2 * a4 + a3 * a4
    num = (PolyForm.term((1, 3), -a4) + PolyForm.term((2, 3), -a4)
           + PolyForm.term((1, 4), a3) + PolyForm.term((2, 4), a3)
           + PolyForm.term((3, 4), -(a1 + a2)))
    return FormExpression(Fraction(1, 8), -1, 3, psi, num)


def theta_phi_golden():
    a1, a2, a3 = variables(3)
    psi = a1 * a2 + a2 * a3 + a1 * a3
    num = PolyForm.term((2, 3), a1) - PolyForm.term((1, 3), a2) + PolyForm.term((1, 2), a3)
    return FormExpression(Fraction(1, 2), -1, 3, psi, num)


def double_triangle_alpha_golden():
    # t12, t31, t23, t24, t43 are our edges 1..5
    t12, t31, t23, t24, t43 = variables(5)
    x, y, z = t12 + t31, t23, t24 + t43
    dx = da(5, 1) + da(5, 2)
    dy = da(5, 3)
    dz = da(5, 4) + da(5, 5)
    psi = x * y + x * z + y * z
    num = (dy * dz) * x - (dx * dz) * y + (dx * dy) * z
    return FormExpression(Fraction(-1, 8), -1, 3, psi, num)


def test_dunce_alpha_golden(dunce):
    assert alpha_form(dunce) == dunce_alpha_golden()


def test_theta_phi_golden(theta):
    b = fundamental_cycle_basis(theta, (3,))
    for method in ("direct", "trees", "dodgson_trees", "hafnian"):
        assert phi_form(theta, b, method) == theta_phi_golden()


def test_dunce_phi_is_minus_four_alpha(dunce):
    b = fundamental_cycle_basis(dunce, (2, 4))
    assert phi_form(dunce, b) == alpha_form(dunce).scale(-4)
    assert sign_factor(dunce, b) == -1


def test_theta_sign_factor(theta):
    # C = [(1,0,-1), (0,1,-1)], P = (0,0,-1): det = -1
    assert sign_factor(theta, fundamental_cycle_basis(theta, (3,))) == -1
    rep = verify_main_theorem(theta, fundamental_cycle_basis(theta, (3,)))
    assert rep.passed and rep.data["alpha / phi"] == "-1/4"


def test_sign_factor_independent_of_path_matrix(dunce):
    b = fundamental_cycle_basis(dunce, (2, 4))
    for t in ((1, 2), (1, 3), (2, 3)):
        assert sign_factor(dunce, b, path_matrix(dunce, t)) == -1


def test_double_triangle_alpha_golden():
    g = load_example("double_triangle")
    assert alpha_form(g) == double_triangle_alpha_golden()


def test_double_triangle_from_theta_phi():
    # alpha'' = (-4)^-1 s_1^* s_3^* phi_theta
    theta = load_example("theta")
    g1 = subdivide_edge(theta, 3)
    pulled = theta_phi_golden().pullback(subdivision_images(theta, 3), symanzik(g1))
    g2 = subdivide_edge(g1, 1)
    pulled = pulled.pullback(subdivision_images(g1, 1), symanzik(g2))
    assert alpha_form(g2) == pulled.scale(Fraction(-1, 4))


def test_tree_and_odd_cases(triangle):
    tree = parse_graph("e 1 1 2; e 2 3 2")
    assert phi_form(tree) == FormExpression.constant(symanzik(tree), 1)
    assert alpha_form(tree).numerator.degrees() == {0}
    assert alpha_form(triangle).is_zero()
    assert phi_form(triangle).is_zero()
    assert verify_main_theorem(tree).passed


def test_self_loop_forms_vanish():
    g = load_example("triangle_self_loop")
    assert g.loop_number == 2
    assert phi_form(g).is_zero() and alpha_form(g).is_zero()


def test_main_theorem_on_corpus():
    for name, g in corpus().items():
        rep = verify_main_theorem(g, reference_basis(name, g))
        assert rep.passed, f"{name}: {rep.failures()}"


def test_main_theorem_on_suite(suite50):
    for g in suite50:
        rep = verify_main_theorem(g)
        assert rep.passed, f"{g.fingerprint()}: {rep.failures()}"


def test_property_checks_on_corpus():
    for name, g in corpus().items():
        rep = property_checks(g, reference_basis(name, g))
        assert rep.passed, f"{name}: {rep.failures()}"


def test_subdivision_chain():
    theta = load_example("theta")
    b = fundamental_cycle_basis(theta, (3,))
    assert subdivision_check(theta, 1, b).passed
    rep = subdivision_check(theta, 3, b)
    assert rep.passed
    g1 = subdivide_edge(theta, 3)
    assert subdivision_check(g1, 1).passed


def test_subdivision_on_suite(suite50):
    rng = random.Random(3)
    for g in suite50[:15]:
        e = rng.randint(1, g.num_edges)
        rep = subdivision_check(g, e)
        assert rep.passed, f"{g.fingerprint()} e={e}: {rep.failures()}"


def test_odd_loop_subdivision_sign(triangle):
    # both forms vanish; only the determinant sign carries information
    rep = subdivision_check(triangle, 2)
    assert rep.passed
    assert rep.data["det[C'|P']"] == rep.data["det[C|P]"] * (-1) ** (2 + 1 + 1)


@pytest.mark.parametrize("i", [1, 2])
def test_dipole_closed_form(i):
    g = dipole(2 * i + 1)
    assert dipole_phi(i) == phi_form(g, dipole_basis(i))
    assert dipole_phi(i).numerator.degrees() == {2 * i}


def test_dipole_phi_matches_theta_golden():
    assert dipole_phi(1) == theta_phi_golden()
    with pytest.raises(ValueError):
        dipole_phi(0)


def test_basis_change_scales_by_determinant(suite50):
    rng = random.Random(11)
    for g in [x for x in suite50 if x.loop_number > 0][:10]:
        b = fundamental_cycle_basis(g)
        p = random_unimodular(rng, g.loop_number)
        assert basis_change_check(g, b, p).passed


def test_loop_cap():
    g = dipole(9)
    with pytest.raises(LoopNumberTooLarge):
        alpha_form(g)


def test_pullback_of_zero_form(triangle):
    g2 = subdivide_edge(triangle, 1)
    z = alpha_form(triangle).pullback(subdivision_images(triangle, 1), symanzik(g2))
    assert z.is_zero()


def test_report_serialises(dunce):
    rep = verify_main_theorem(dunce, fundamental_cycle_basis(dunce, (2, 4)))
    assert rep.data["alpha / phi"] == "-1/4"
    text = rep.to_text()
    assert text.splitlines()[0].startswith("== alpha versus phi")
    assert "FAIL" not in text
    assert rep.to_json()["passed"] is True
