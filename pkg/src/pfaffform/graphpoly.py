"""Symanzik and Dodgson polynomials, graph Laplacians, and the polynomial
identities relating them.

Every identity involving an inverse matrix is checked in adjugate form,
multiplied through by the relevant determinants, so each check is an exact
identity between polynomials.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

from .graph import (
    CycleBasis,
    Graph,
    GraphError,
    complement,
    contract_edge,
    cycle_matrix,
    default_tree,
    delete_edge,
    fundamental_cycle_basis,
    incidence_matrix,
    is_bridge,
    path_matrix,
    spanning_trees,
    validate_cycle_basis,
)
from .linalg import RingMatrix, adjugate, determinant, minor
from .poly import MultiPoly, variables
from .report import Report


def _a(g: Graph) -> list[MultiPoly]:
    return variables(g.num_edges)


def _prod_all(g: Graph) -> MultiPoly:
    return MultiPoly.monomial(g.num_edges, [1] * g.num_edges)


def edge_variable_matrix(g: Graph) -> RingMatrix:
    zero = MultiPoly(g.num_edges)
    return RingMatrix.diagonal(_a(g), zero)


@lru_cache(maxsize=256)
def expanded_laplacian(g: Graph) -> RingMatrix:
    """Block matrix [[D, I], [-I^T, 0]] with edges first, then reduced vertices."""
    m, n = g.num_edges, g.num_vertices - 1
    a = _a(g)
    inc = incidence_matrix(g)
    zero = MultiPoly(m)
    rows = []
    for e in range(m):
        rows.append([a[e] if f == e else zero for f in range(m)] + [MultiPoly.const(m, x) for x in inc.row(e)])
    for v in range(n):
        rows.append([MultiPoly.const(m, -inc[f, v]) for f in range(m)] + [zero] * n)
    return RingMatrix(rows, m + n)


def vertex_laplacian_cleared(g: Graph) -> RingMatrix:
    """``prod(a) * I^T D^{-1} I``, a polynomial matrix."""
    m = g.num_edges
    inc = incidence_matrix(g)
    prod_others = [MultiPoly.monomial(m, [0 if f == e else 1 for f in range(m)]) for e in range(m)]
    n = inc.cols
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = MultiPoly(m)
            for e in range(m):
                x = inc[e, i] * inc[e, j]
                if x:
                    acc = acc + prod_others[e].scale(x)
            row.append(acc)
        rows.append(row)
    return RingMatrix(rows, n)


def cycle_laplacian(g: Graph, basis: CycleBasis) -> RingMatrix:
    """``C^T D C``: symmetric l x l matrix of linear forms."""
    m = g.num_edges
    a = _a(g)
    cols = basis.columns
    rows = []
    for i in range(len(cols)):
        row = []
        for j in range(len(cols)):
            acc = MultiPoly(m)
            for e in range(m):
                x = cols[i][e] * cols[j][e]
                if x:
                    acc = acc + a[e].scale(x)
            row.append(acc)
        rows.append(row)
    return RingMatrix(rows, len(cols))


@dataclass(frozen=True)
class LaplacianBundle:
    D: RingMatrix
    I: RingMatrix
    M: RingMatrix
    L: RingMatrix  # prod(a) * vertex Laplacian
    L_scale: MultiPoly  # prod(a): true Laplacian is L / L_scale
    Lambda_C: RingMatrix
    C: RingMatrix
    basis: CycleBasis


def laplacian_bundle(g: Graph, basis: CycleBasis | None = None) -> LaplacianBundle:
    basis = fundamental_cycle_basis(g) if basis is None else basis
    validate_cycle_basis(g, basis)
    return LaplacianBundle(
        D=edge_variable_matrix(g),
        I=incidence_matrix(g),
        M=expanded_laplacian(g),
        L=vertex_laplacian_cleared(g),
        L_scale=_prod_all(g),
        Lambda_C=cycle_laplacian(g, basis),
        C=cycle_matrix(g, basis),
        basis=basis,
    )


# -- Symanzik ---------------------------------------------------------------

@lru_cache(maxsize=256)
def _symanzik_trees(g: Graph) -> MultiPoly:
    m = g.num_edges
    return MultiPoly.from_terms(
        m, [(tuple(0 if e in t else 1 for e in range(1, m + 1)), 1) for t in map(set, spanning_trees(g))]
    )


def symanzik(g: Graph, method: str = "trees", basis: CycleBasis | None = None) -> MultiPoly:
    """Symanzik polynomial via the spanning-tree sum, det of the expanded
    Laplacian, or det of a cycle Laplacian."""
    if method == "trees":
        return _symanzik_trees(g)
    if method == "expanded_det":
        return _as_poly(g, determinant(expanded_laplacian(g)))
    if method == "cycle_det":
        basis = fundamental_cycle_basis(g) if basis is None else basis
        validate_cycle_basis(g, basis)
        return _as_poly(g, determinant(cycle_laplacian(g, basis)))
    raise ValueError(f"unknown method {method!r}")


def _as_poly(g: Graph, x) -> MultiPoly:
    return x if isinstance(x, MultiPoly) else MultiPoly.const(g.num_edges, x)


# -- Dodgson ----------------------------------------------------------------

def vertex_index(g: Graph, v: int) -> int:
    """1-based row/column of vertex ``v`` inside the expanded Laplacian."""
    if v == g.v_star:
        raise GraphError(f"v_star = {v} has no row in the expanded Laplacian")
    if not 1 <= v <= g.num_vertices:
        raise GraphError(f"vertex {v} out of range")
    return g.num_edges + g.reduced_vertices().index(v) + 1


def _check_index_sets(g: Graph, a, b):
    size = g.num_edges + g.num_vertices - 1
    if len(a) != len(b):
        raise ValueError(f"index sets differ in size: {len(a)} vs {len(b)}")
    for i in list(a) + list(b):
        if not 1 <= i <= size:
            raise ValueError(f"index {i} outside 1..{size}")
    if len(set(a)) != len(a) or len(set(b)) != len(b):
        raise ValueError("repeated index")


def dodgson(g: Graph, a, b, method: str = "det") -> MultiPoly:
    """``det M(A, B)``: expanded Laplacian with rows A and columns B removed.

    Indices are 1-based rows of M: edges ``1..|E|``, then reduced vertices
    (see :func:`vertex_index`).  ``method="expansion"`` uses the signed
    spanning-forest expansion and accepts edge indices only.
    """
    a, b = tuple(a), tuple(b)
    _check_index_sets(g, a, b)
    if method == "det":
        return _dodgson_det(g, tuple(sorted(a)), tuple(sorted(b)))
    if method == "expansion":
        if any(i > g.num_edges for i in a + b):
            raise ValueError("the expansion route takes edge indices only")
        return _dodgson_expansion(g, a, b)
    raise ValueError(f"unknown method {method!r}")


@lru_cache(maxsize=8192)
def _dodgson_det(g: Graph, a, b) -> MultiPoly:
    m = minor(expanded_laplacian(g), [i - 1 for i in a], [j - 1 for j in b], "remove")
    return _as_poly(g, determinant(m))


def _dodgson_expansion(g: Graph, a, b) -> MultiPoly:
    m = g.num_edges
    inc = incidence_matrix(g)
    sa, sb = set(a), set(b)
    pool = [e for e in range(1, m + 1) if e not in sa and e not in sb]
    k = g.loop_number - len(a)
    if k < 0:
        return MultiPoly(m)
    terms = []
    for u in combinations(pool, k):
        da = determinant(minor(inc, [e - 1 for e in u + a], None, "remove"))
        if da == 0:
            continue
        db = determinant(minor(inc, [e - 1 for e in u + b], None, "remove"))
        if db == 0:
            continue
        sign_exp = sum(sum(1 for x in a if x < e) - sum(1 for x in b if x < e) for e in u)
        sign = -1 if sign_exp % 2 else 1
        terms.append((tuple(1 if e in u else 0 for e in range(1, m + 1)), sign * da * db))
    return MultiPoly.from_terms(m, terms)


def edge_dodgson(g: Graph, i: int, j: int) -> MultiPoly:
    """Memoised single-edge Dodgson polynomial psi^{i,j} (det route)."""
    if i > j:
        i, j = j, i
    return _dodgson_det(g, (i,), (j,))


# -- verification suites ------------------------------------------------------

def _poly_matrix(g, m: RingMatrix) -> RingMatrix:
    return m.map(lambda x: _as_poly(g, x))


def _const_matrix(g: Graph, m: RingMatrix) -> RingMatrix:
    return m.map(lambda x: MultiPoly.const(g.num_edges, x))


def inverse_entries_via_dodgson(g: Graph, bundle: LaplacianBundle | None = None) -> Report:
    """Inverse-Laplacian entries as Dodgson polynomials, plus the projector
    identity relating the vertex and cycle Laplacians."""
    bundle = laplacian_bundle(g) if bundle is None else bundle
    rep = Report("inverse Laplacian entries", g.fingerprint())
    m = g.num_edges
    n = g.num_vertices - 1
    psi = symanzik(g)
    prod = bundle.L_scale
    D = bundle.D
    I = _const_matrix(g, bundle.I)
    C = _const_matrix(g, bundle.C)
    Lt = bundle.L
    det_Lt = _as_poly(g, determinant(Lt))
    adj_Lt = _poly_matrix(g, adjugate(Lt))
    adj_Lam = _poly_matrix(g, adjugate(bundle.Lambda_C))

    rep.check("cleared vertex Laplacian determinant", det_Lt == prod ** max(n - 1, 0) * psi
              if n >= 1 else det_Lt == 1,
              "det(prod(a) L) = prod(a)^(|V|-2) psi")

    # projector identity: D - I L^-1 I^T = D C Lambda^-1 C^T D
    ILI = I @ adj_Lt @ I.T
    lhs = D.scale(psi * det_Lt) - ILI.scale(psi * prod)
    rhs = (D @ C @ adj_Lam @ C.T @ D).scale(det_Lt)
    rep.check("projector identity", lhs == rhs, "D - I L^-1 I^T = D C Lambda^-1 C^T D")

    # vertex entries
    ok = True
    bad = None
    verts = g.reduced_vertices()
    for i in range(n):
        for j in range(n):
            lhs_ij = adj_Lt[i, j] * prod * psi
            sign = -1 if (i + j) % 2 else 1
            d_ij = dodgson(g, [vertex_index(g, verts[i])], [vertex_index(g, verts[j])])
            rhs_ij = d_ij * det_Lt * sign
            if lhs_ij != rhs_ij:
                ok = False
                bad = (verts[i], verts[j])
    rep.check("vertex Laplacian inverse entries", ok,
              "(L^-1)_{vi,vj} = (-1)^(i+j) psi^{vi,vj} / psi" + (f"; fails at {bad}" if bad else ""))

    # cycle entries
    CAC = C @ adj_Lam @ C.T
    ok = all(CAC[i, j] == edge_dodgson(g, i + 1, j + 1).scale(-1 if (i + j) % 2 else 1)
             for i in range(m) for j in range(m))
    rep.check("cycle Laplacian inverse entries", ok,
              "(C Lambda^-1 C^T)_{ei,ej} = (-1)^(i+j) psi^{ei,ej} / psi")

    # D^-1 I L^-1 I^T entries, cleared by a_i * det(Lt) / psi
    a = _a(g)
    ok_off, ok_diag = True, True
    for i in range(m):
        for j in range(m):
            lhs_ij = ILI[i, j] * prod * psi
            delta = psi if i == j else MultiPoly(m)
            rhs_ij = a[i] * det_Lt * (delta - a[j] * edge_dodgson(g, i + 1, j + 1).scale(-1 if (i + j) % 2 else 1))
            if lhs_ij != rhs_ij:
                ok_off = False
        contracted = psi.set_zero(i + 1)
        if ILI[i, i] * prod * psi != a[i] * det_Lt * contracted:
            ok_diag = False
    rep.check("edge projector entries", ok_off,
              "(D^-1 I L^-1 I^T)_{ei,ej} = delta - (-1)^(i+j) a_ej psi^{ei,ej} / psi")
    rep.check("edge projector diagonal via contraction", ok_diag,
              "(D^-1 I L^-1 I^T)_{e,e} = psi_{G/e} / psi")

    # fundamental basis inverse
    if g.loop_number:
        fb = fundamental_cycle_basis(g)
        adj_T = _poly_matrix(g, adjugate(cycle_laplacian(g, fb)))
        f = fb.defining_edges
        ok = all(adj_T[i, j] == edge_dodgson(g, f[i], f[j]).scale(-1 if (f[i] + f[j]) % 2 else 1)
                 for i in range(len(f)) for j in range(len(f)))
    else:
        ok = True
    rep.check("fundamental basis inverse", ok, "(Lambda_T^-1)_{Ci,Cj} = (-1)^(fi+fj) psi^{fi,fj} / psi")
    return rep


def concatenated_det_identities(g: Graph, basis: CycleBasis | None = None,
                                pathm: RingMatrix | None = None) -> Report:
    """Determinants of concatenated matrices [C | R], sign relations between
    incidence and cycle minors, and two linear Dodgson identities."""
    basis = fundamental_cycle_basis(g) if basis is None else basis
    validate_cycle_basis(g, basis)
    pathm = path_matrix(g) if pathm is None else pathm
    rep = Report("concatenated determinants and signs", g.fingerprint())
    m = g.num_edges
    l = g.loop_number
    psi = symanzik(g)
    a = _a(g)
    Cint = cycle_matrix(g, basis)
    Iint = incidence_matrix(g)
    C = _const_matrix(g, Cint)
    I = _const_matrix(g, Iint)
    D = edge_variable_matrix(g)
    DC = D @ C

    det_DC_I = _as_poly(g, determinant(DC.hstack(I)))
    rep.check("[C | D^-1 I] squared", det_DC_I * det_DC_I == psi * psi,
              "det[C | D^-1 I]^2 = psi^2 / prod(a)^2")

    CP = Cint.hstack(pathm)
    sign = determinant(CP)
    rep.check("[C | P] is unimodular", sign in (1, -1), f"det[C | P] = {sign}")
    rep.data["det[C|P]"] = sign
    rep.check("[C | R] times [C | D^-1 I]", det_DC_I.scale(sign) == psi,
              "det[C | R] det[C | D^-1 I] = psi / prod(a)")

    others = [t for t in spanning_trees(g) if t != default_tree(g)]
    alt = path_matrix(g, others[-1]) if others else pathm
    sign2 = determinant(Cint.hstack(alt))
    rep.check("[C | P] independent of P", sign2 == sign, f"second path matrix gives {sign2}")

    adj_Lam = _poly_matrix(g, adjugate(cycle_laplacian(g, basis)))
    S_cleared = D @ C @ adj_Lam if l else DC
    det_S = _as_poly(g, determinant(S_cleared.hstack(I)))
    rep.check("[S | D^-1 I] times [C | D^-1 I]", det_S * det_DC_I == psi ** (l + 1),
              "det[S | D^-1 I] det[C | D^-1 I] = psi / prod(a)^2 with S = C Lambda^-1")

    ntrees = len(spanning_trees(g))
    det_CI = determinant(Cint.hstack(Iint))
    rep.check("[C | I] counts spanning trees", det_CI == sign * ntrees,
              f"det[C | I] = {det_CI}, det[C|P] * #trees = {sign * ntrees}")

    # sign relation over every subset of |V|-1 edges
    base = (-1) ** (l * (l + 1) // 2) * sign
    ok = True
    nonzero = 0
    for t in combinations(range(1, m + 1), g.num_vertices - 1):
        tbar = complement(g, t)
        d_inc = determinant(minor(Iint, [e - 1 for e in t], None, "keep"))
        d_cyc = determinant(minor(Cint, [e - 1 for e in tbar], None, "keep"))
        rhs = base * (-1) ** sum(tbar) * d_cyc
        if d_inc != rhs:
            ok = False
        nonzero += d_inc != 0
    rep.check("incidence vs cycle minors over all subsets", ok and nonzero == ntrees,
              "det I[T] = (-1)^(l(l+1)/2) det[C|P] (-1)^(sum of non-T edges) det C[Tbar]")

    # a_e psi_{G/e} = psi^{s,s} + psi^{t,t} - 2 (-1)^{s+t} psi^{s,t}
    ok = True
    for e in range(1, m + 1):
        s, t = g.edges[e - 1]
        if s == t:
            continue

        def vd(x, y):
            if g.v_star in (x, y):
                return MultiPoly(m)
            return dodgson(g, [vertex_index(g, x)], [vertex_index(g, y)])

        rhs = vd(s, s) + vd(t, t) - vd(s, t).scale(2 * (-1) ** (s + t))
        if a[e - 1] * psi.set_zero(e) != rhs:
            ok = False
    rep.check("contracted edge via vertex Dodgsons", ok,
              "a_e psi_{G/e} = psi^{s,s} + psi^{t,t} - 2(-1)^(s+t) psi^{s,t}")

    ok = True
    for col in basis.columns:
        for i in range(1, m + 1):
            acc = psi.scale(col[i - 1])
            for j in range(1, m + 1):
                if col[j - 1]:
                    acc = acc - (a[j - 1] * edge_dodgson(g, i, j)).scale((-1) ** (i + j) * col[j - 1])
            if acc:
                ok = False
    rep.check("cycle relation for edge Dodgsons", ok,
              "c_i psi - sum_j (-1)^(i+j) c_j a_j psi^{i,j} = 0")
    return rep


def symanzik_properties(g: Graph) -> Report:
    """Three-way Symanzik agreement, Dodgson route agreement on single-edge
    pairs, contraction-deletion, multilinearity."""
    rep = Report("Symanzik and Dodgson routes", g.fingerprint())
    m = g.num_edges
    psi = symanzik(g, "trees")
    rep.check("symanzik: expanded determinant", symanzik(g, "expanded_det") == psi)
    rep.check("symanzik: cycle Laplacian determinant", symanzik(g, "cycle_det") == psi)
    ok = all(dodgson(g, [i], [j], "det") == dodgson(g, [i], [j], "expansion")
             for i in range(1, m + 1) for j in range(1, m + 1))
    rep.check("dodgson: determinant vs expansion", ok)
    rep.check("dodgson: empty index sets give psi", dodgson(g, [], [], "expansion") == psi)

    ok = True
    for e in range(1, m + 1):
        if g.is_self_loop(e):
            # contraction of a loop is not defined; psi = a_e * psi_{G - e}
            ok &= psi == MultiPoly.var(m, e) * _embed(symanzik(delete_edge(g, e)), e)
            continue
        contracted = _embed(symanzik(contract_edge(g, e)), e)
        ok &= psi.set_zero(e) == contracted
        if is_bridge(g, e):
            ok &= psi == contracted and edge_dodgson(g, e, e).is_zero()
        else:
            deleted = _embed(symanzik(delete_edge(g, e)), e)
            ok &= psi == MultiPoly.var(m, e) * deleted + contracted
            ok &= edge_dodgson(g, e, e) == deleted
    rep.check("contraction-deletion", ok, "psi = a_e psi_{G-e} + psi_{G/e}")

    multilinear = all(psi.degree_in(e) <= 1 for e in range(1, m + 1))
    positive = all(isinstance(c, int) and c > 0 for c in psi.coefficients())
    rep.check("multilinear with positive integer coefficients", multilinear and positive)
    rep.check("tree count at a = 1", psi.evaluate([1] * m) == len(spanning_trees(g)))
    return rep


def _embed(p: MultiPoly, e: int) -> MultiPoly:
    """Polynomial of a graph with edge e removed, re-indexed into the original ring."""
    return p.insert_variable(e)


def matrix_tree_checks(g: Graph, basis: CycleBasis | None = None) -> Report:
    """Incidence and cycle minors are +-1 exactly on spanning trees; path and
    cycle matrices are orthogonal to the incidence matrix as required."""
    basis = fundamental_cycle_basis(g) if basis is None else basis
    rep = Report("matrix-tree", g.fingerprint())
    inc = incidence_matrix(g)
    C = cycle_matrix(g, basis)
    trees = set(spanning_trees(g))
    ok = True
    for u in combinations(range(1, g.num_edges + 1), g.num_vertices - 1):
        di = determinant(minor(inc, [e - 1 for e in u], None, "keep"))
        dc = determinant(minor(C, [e - 1 for e in complement(g, u)], None, "keep"))
        expect = u in trees
        ok &= (di in (1, -1)) == expect and (di == 0) != expect
        ok &= (dc in (1, -1)) == expect and (dc == 0) != expect
    rep.check("minors are unimodular exactly on spanning trees", ok)
    P = path_matrix(g)
    n = g.num_vertices - 1
    rep.check("path matrix is a left inverse of the incidence matrix", P.T @ inc == RingMatrix.identity(n))
    rep.check("cycles are orthogonal to the incidence matrix", (inc.T @ C).is_zero())
    return rep


def cycle_basis_change(g: Graph, basis: CycleBasis, p) -> RingMatrix:
    """Cycle Laplacian of ``basis.transform(p)``; equals P^T Lambda P."""
    return cycle_laplacian(g, basis.transform(p))


__all__ = [
    "LaplacianBundle",
    "concatenated_det_identities",
    "cycle_laplacian",
    "dodgson",
    "edge_dodgson",
    "edge_variable_matrix",
    "expanded_laplacian",
    "inverse_entries_via_dodgson",
    "laplacian_bundle",
    "matrix_tree_checks",
    "symanzik",
    "symanzik_properties",
    "vertex_index",
    "vertex_laplacian_cleared",
]
