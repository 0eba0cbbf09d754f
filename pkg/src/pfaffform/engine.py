"""The topological form alpha and the Pfaffian form phi of a graph.

alpha is built from its spanning-tree expansion over edge Dodgson
polynomials.  phi has three independent routes:

* ``direct``   Pfaffian of dLambda . adj(Lambda) . dLambda
* ``trees``    spanning-tree sum of edge Dodgson products
* ``hafnian``  spanning-tree sum of hafnians of adj(Lambda_T), Lambda_T the
               cycle Laplacian of the fundamental basis of T

Every route returns a :class:`FormExpression` over the Symanzik polynomial.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import permutations
from math import factorial

from .forms import FormExpression, PolyForm
from .graph import (
    CycleBasis,
    Graph,
    complement,
    default_tree,
    fundamental_cycle_basis,
    incidence_matrix,
    path_matrix,
    spanning_trees,
    subdivide_edge,
    subdivided_basis,
    validate_cycle_basis,
)
from .graphpoly import cycle_laplacian, edge_dodgson, symanzik
from .linalg import RingMatrix, adjugate, determinant, hafnian, is_skew_symmetric, minor, pfaffian
from .poly import MultiPoly
from .report import Report

MAX_ALPHA_LOOPS = 6


class LoopNumberTooLarge(ValueError):
    pass


class SkewnessError(AssertionError):
    pass


def _as_poly(g: Graph, x) -> MultiPoly:
    return x if isinstance(x, MultiPoly) else MultiPoly.const(g.num_edges, x)


def _pair_product_sum(g: Graph, fs) -> MultiPoly:
    """Sum over all orderings sigma of ``fs`` of
    psi^{s1,s2} psi^{s3,s4} ... (consecutive pairs)."""
    m = g.num_edges
    total = MultiPoly(m)
    for perm in permutations(fs):
        term = MultiPoly.const(m, 1)
        for k in range(0, len(perm), 2):
            term = term * edge_dodgson(g, perm[k], perm[k + 1])
            if term.is_zero():
                break
        total = total + term
    return total


def _tree_incidence_det(g: Graph, t) -> int:
    return determinant(minor(incidence_matrix(g), [e - 1 for e in t], None, "keep"))


def _cycle_minor(g: Graph, basis: CycleBasis, tbar) -> int:
    return determinant(minor(basis.matrix(), [e - 1 for e in tbar], None, "keep"))


def alpha_form(g: Graph) -> FormExpression:
    """Topological form from its spanning-tree Dodgson expansion."""
    l = g.loop_number
    psi = symanzik(g)
    if l % 2:
        return FormExpression.zero(psi)
    if l > MAX_ALPHA_LOOPS:
        raise LoopNumberTooLarge(
            f"loop number {l} exceeds the permutation-sum limit {MAX_ALPHA_LOOPS}; use phi_form instead")
    num = PolyForm(g.num_edges)
    for t in spanning_trees(g):
        sign = _tree_incidence_det(g, t)
        tbar = complement(g, t)
        s = _pair_product_sum(g, tbar)
        if s.is_zero():
            continue
        num = num + PolyForm.term(tbar, s.scale(sign))
    scalar = Fraction(1, 4 ** l * factorial(l // 2))
    return FormExpression(scalar, -(l // 2), l + 1, psi, num)


def _resolve_basis(g: Graph, basis: CycleBasis | None) -> CycleBasis:
    if basis is None:
        return fundamental_cycle_basis(g)
    validate_cycle_basis(g, basis)
    return basis


def phi_form(g: Graph, basis: CycleBasis | None = None, method: str = "direct") -> FormExpression:
    """Pfaffian form for the cycle basis ``basis`` (default: fundamental basis
    of the lowest spanning tree)."""
    basis = _resolve_basis(g, basis)
    psi = symanzik(g)
    l = g.loop_number
    if l % 2:
        return FormExpression.zero(psi)
    if method == "direct":
        return _phi_direct(g, basis, psi)
    if method in ("trees", "dodgson_trees"):
        return _phi_trees(g, basis, psi)
    if method == "hafnian":
        return _phi_hafnian(g, basis, psi)
    raise ValueError(f"unknown method {method!r}")


def _phi_direct(g: Graph, basis: CycleBasis, psi: MultiPoly) -> FormExpression:
    m, l = g.num_edges, g.loop_number
    lam = cycle_laplacian(g, basis)
    d_lam = lam.map(lambda p: PolyForm.differential(_as_poly(g, p)))
    adj = adjugate(lam).map(lambda p: PolyForm.scalar(m, _as_poly(g, p)))
    b = d_lam @ adj @ d_lam
    b = b.map(lambda x: x if isinstance(x, PolyForm) else PolyForm.scalar(m, _as_poly(g, x)))
    if not is_skew_symmetric(b):
        raise SkewnessError("dLambda adj(Lambda) dLambda is not skew-symmetric")
    pf = pfaffian(b)
    if not isinstance(pf, PolyForm):
        pf = PolyForm.scalar(m, _as_poly(g, pf))
    scalar = Fraction(1, (-2) ** (l // 2))
    return FormExpression(scalar, -(l // 2), l + 1, psi, pf)


def _phi_trees(g: Graph, basis: CycleBasis, psi: MultiPoly) -> FormExpression:
    l = g.loop_number
    num = PolyForm(g.num_edges)
    for t in spanning_trees(g):
        tbar = complement(g, t)
        sign = (-1) ** sum(tbar) * _cycle_minor(g, basis, tbar)
        s = _pair_product_sum(g, tbar)
        if s.is_zero():
            continue
        num = num + PolyForm.term(tbar, s.scale(sign))
    scalar = Fraction(1, (-1) ** (l // 2) * 2 ** l * factorial(l // 2))
    return FormExpression(scalar, -(l // 2), l + 1, psi, num)


def _phi_hafnian(g: Graph, basis: CycleBasis, psi: MultiPoly) -> FormExpression:
    # haf(Lambda_T^-1) = haf(adj Lambda_T) / psi^(l/2)
    l = g.loop_number
    num = PolyForm(g.num_edges)
    for t in spanning_trees(g):
        tbar = complement(g, t)
        lam_t = cycle_laplacian(g, fundamental_cycle_basis(g, t))
        h = _as_poly(g, hafnian(adjugate(lam_t)) if l else 1)
        num = num + PolyForm.term(tbar, h.scale(_cycle_minor(g, basis, tbar)))
    scalar = Fraction(1, (-2) ** (l // 2))
    return FormExpression(scalar, -(l // 2), l + 1, psi, num)


def sign_factor(g: Graph, basis: CycleBasis | None = None, pathm: RingMatrix | None = None) -> int:
    """``det[C | P]``: +-1, and the same for every path matrix."""
    basis = _resolve_basis(g, basis)
    pathm = path_matrix(g) if pathm is None else pathm
    c = basis.matrix()
    s = determinant(c.hstack(pathm))
    if s not in (1, -1):
        raise ValueError(f"det[C | P] = {s}; the basis or path matrix is invalid")
    trees = spanning_trees(g)
    if len(trees) > 1:
        other = trees[-1] if trees[-1] != default_tree(g) else trees[0]
        s2 = determinant(c.hstack(path_matrix(g, other)))
        if s2 != s:
            raise AssertionError(f"det[C | P] changed from {s} to {s2} with another path matrix")
    return s


def _ratio_text(r) -> str:
    if r is None:
        return "not proportional"
    c, p = r
    return f"{c}" if p == 0 else f"{c} * pi^{p}"


def verify_main_theorem(g: Graph, basis: CycleBasis | None = None,
                        methods=("direct", "trees", "hafnian")) -> Report:
    """alpha = det[C|P] / 2^l * phi, with phi by every requested route."""
    basis = _resolve_basis(g, basis)
    rep = Report("alpha versus phi", g.fingerprint())
    l = g.loop_number
    alpha = alpha_form(g)
    sign = sign_factor(g, basis)
    rep.data["loop number"] = l
    rep.data["cycle basis"] = [list(c) for c in basis.columns]
    rep.data["det[C|P]"] = sign
    rep.data["alpha"] = alpha.to_text()
    phis = {m: phi_form(g, basis, m) for m in methods}
    first = phis[methods[0]]
    rep.data["phi"] = first.to_text()
    for m in methods[1:]:
        rep.check(f"phi routes agree: {methods[0]} = {m}", phis[m].equals(first))
    expected = first.scale(Fraction(sign, 2 ** l))
    rep.data["alpha / phi"] = _ratio_text(alpha.scale_ratio(first)) if not first.is_zero() else "phi is zero"
    rep.check("alpha = det[C|P] / 2^l * phi", alpha.equals(expected),
              f"expected ratio {Fraction(sign, 2 ** l)}")
    if l == 0:
        rep.check("tree: alpha = +-1 and phi = 1",
                  alpha.equals(FormExpression.constant(alpha.psi, sign)) and first.equals(FormExpression.constant(first.psi, 1)))
    return rep


def dipole_phi(i: int) -> FormExpression:
    """Closed form of the Pfaffian form of the dipole with 2i+1 edges."""
    if i < 1:
        raise ValueError("i must be a positive integer")
    m = 2 * i + 1
    from .graph import dipole

    psi = symanzik(dipole(m))
    prod = MultiPoly.monomial(m, [i - 1] * m)
    num = PolyForm(m)
    for e in range(1, m + 1):
        rest = [f for f in range(1, m + 1) if f != e]
        num = num + PolyForm.term(tuple(rest), (MultiPoly.var(m, e) * prod).scale((-1) ** (e - 1)))
    scalar = Fraction(factorial(2 * i), 4 ** i * factorial(i))
    return FormExpression(scalar, -i, 2 * i + 1, psi, num)


def dipole_basis(i: int) -> CycleBasis:
    """Fundamental basis of the dipole for the tree made of its last edge."""
    from .graph import dipole

    m = 2 * i + 1
    return fundamental_cycle_basis(dipole(m), (m,))


def subdivision_images(g: Graph, e: int) -> list[MultiPoly]:
    """Images of a_1..a_m under the subdivision pullback into the ring of g'."""
    m2 = g.num_edges + 1
    images = []
    for f in range(1, g.num_edges + 1):
        if f < e:
            images.append(MultiPoly.var(m2, f))
        elif f == e:
            images.append(MultiPoly.var(m2, e) + MultiPoly.var(m2, e + 1))
        else:
            images.append(MultiPoly.var(m2, f + 1))
    return images


def subdivision_check(g: Graph, e: int, basis: CycleBasis | None = None) -> Report:
    """phi and alpha of the subdivided graph against the pulled-back forms."""
    basis = _resolve_basis(g, basis)
    g2 = subdivide_edge(g, e)
    basis2 = subdivided_basis(basis, e)
    rep = Report(f"subdivision of edge {e}", g.fingerprint())
    rep.data["subdivided graph"] = g2.fingerprint()
    images = subdivision_images(g, e)
    psi2 = symanzik(g2)
    rep.check("psi pulls back to psi of the subdivision", symanzik(g).substitute(images, g2.num_edges) == psi2)
    phi = phi_form(g, basis)
    phi2 = phi_form(g2, basis2)
    rep.check("phi' = s^* phi", phi2.equals(phi.pullback(images, psi2)))
    sgn = (-1) ** (e + 1)
    alpha = alpha_form(g)
    alpha2 = alpha_form(g2)
    rep.check(f"alpha' = ({sgn:+d}) s^* alpha", alpha2.equals(alpha.pullback(images, psi2).scale(sgn)))
    s1 = sign_factor(g, basis)
    s2 = sign_factor(g2, basis2)
    rep.data["det[C|P]"] = s1
    rep.data["det[C'|P']"] = s2
    # the column expansion gives (-1)^(e+l+1); equal to (-1)^(e+1) for even l
    dsgn = (-1) ** (e + g.loop_number + 1)
    rep.check(f"det[C'|P'] = ({dsgn:+d}) det[C|P]", s2 == dsgn * s1)
    return rep


def property_checks(g: Graph, basis: CycleBasis | None = None) -> Report:
    """Closedness, wedge square, vanishing and projectivity of phi and alpha."""
    basis = _resolve_basis(g, basis)
    rep = Report("form properties", g.fingerprint())
    l = g.loop_number
    phi = phi_form(g, basis)
    alpha = alpha_form(g)
    rep.check("d phi = 0", phi.d().is_zero())
    rep.check("d alpha = 0", alpha.d().is_zero())
    if l == 0:
        # phi = 1 on trees, so the square is 1 rather than 0
        rep.check("tree: phi ^ phi = 1", phi.wedge(phi).equals(FormExpression.constant(phi.psi, 1)))
    else:
        trivial = 2 * l > g.num_edges
        rep.check("phi ^ phi = 0", phi.wedge(phi).is_zero(), "zero by degree" if trivial else "nontrivial")
        rep.check("alpha ^ alpha = 0", alpha.wedge(alpha).is_zero())
    if l % 2:
        rep.check("odd loop number: phi = 0 and alpha = 0", phi.is_zero() and alpha.is_zero())
    if g.has_self_loop():
        rep.check("self-loop: phi = 0 and alpha = 0", phi.is_zero() and alpha.is_zero())
    rep.check("phi is projective (grading 0)", phi.grading() == 0)
    rep.check("alpha is projective (grading 0)", alpha.grading() == 0)
    return rep


def basis_change_check(g: Graph, basis: CycleBasis, p: RingMatrix) -> Report:
    """phi for the basis C P equals det(P) times phi for C."""
    rep = Report("cycle basis change", g.fingerprint())
    det_p = determinant(p)
    rep.data["det(P)"] = det_p
    new = basis.transform(p.to_lists())
    rep.check("phi_{CP} = det(P) phi_C", phi_form(g, new).equals(phi_form(g, basis).scale(det_p)))
    return rep


def random_unimodular(rng, n: int, steps: int = 6) -> RingMatrix:
    """Product of random elementary integer matrices and sign flips (det +-1)."""
    p = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(steps):
        if n > 1 and rng.random() < 0.7:
            i, j = rng.sample(range(n), 2)
            k = rng.choice((-2, -1, 1, 2))
            for r in range(n):
                p[r][j] += k * p[r][i]
        else:
            j = rng.randrange(n)
            for r in range(n):
                p[r][j] = -p[r][j]
    return RingMatrix(p, n)


__all__ = [
    "LoopNumberTooLarge",
    "MAX_ALPHA_LOOPS",
    "SkewnessError",
    "alpha_form",
    "basis_change_check",
    "dipole_basis",
    "dipole_phi",
    "phi_form",
    "property_checks",
    "random_unimodular",
    "sign_factor",
    "subdivision_check",
    "subdivision_images",
    "verify_main_theorem",
]
