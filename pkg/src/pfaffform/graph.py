"""Connected directed multigraphs with labelled edges, their spanning trees,
incidence/cycle/path matrices and simple surgeries.

Vertices are ``1..num_vertices`` and edges ``1..num_edges`` in list order.
Self-loops and parallel edges are allowed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .linalg import RingMatrix, bareiss, minor


class GraphError(ValueError):
    """Invalid graph, edge label, tree or cycle basis."""


class GraphParseError(GraphError):
    pass


EdgeSet = tuple  # sorted tuple of edge labels


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n + 1))

    def find(self, x):
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[rb] = ra
        return True

    def copy(self):
        uf = _UnionFind.__new__(_UnionFind)
        uf.parent = list(self.parent)
        return uf


@dataclass(frozen=True)
class Graph:
    num_vertices: int
    edges: tuple
    v_star: int | None = None

    def __post_init__(self):
        edges = tuple((int(t), int(h)) for t, h in self.edges)
        object.__setattr__(self, "edges", edges)
        n = self.num_vertices
        if n < 1:
            raise GraphError("a graph needs at least one vertex")
        for i, (t, h) in enumerate(edges, 1):
            if not (1 <= t <= n and 1 <= h <= n):
                raise GraphError(f"edge {i} = {t}->{h} has a vertex outside 1..{n}")
        vs = n if self.v_star is None else int(self.v_star)
        if not 1 <= vs <= n:
            raise GraphError(f"v_star {vs} outside 1..{n}")
        object.__setattr__(self, "v_star", vs)
        uf = _UnionFind(n)
        comps = n
        for t, h in edges:
            if uf.union(t, h):
                comps -= 1
        if comps != 1:
            raise GraphError(f"graph is disconnected ({comps} components)")

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def loop_number(self) -> int:
        return self.num_edges - self.num_vertices + 1

    def tail(self, e: int) -> int:
        return self.edges[e - 1][0]

    def head(self, e: int) -> int:
        return self.edges[e - 1][1]

    def is_self_loop(self, e: int) -> bool:
        t, h = self.edges[e - 1]
        return t == h

    def has_self_loop(self) -> bool:
        return any(t == h for t, h in self.edges)

    def check_edge(self, e: int):
        if not 1 <= e <= self.num_edges:
            raise GraphError(f"edge label {e} outside 1..{self.num_edges}")

    def reduced_vertices(self) -> list[int]:
        """Vertices other than v_star, in label order (columns of the incidence matrix)."""
        return [v for v in range(1, self.num_vertices + 1) if v != self.v_star]

    def fingerprint(self) -> str:
        body = ";".join(f"{t}>{h}" for t, h in self.edges)
        return f"V{self.num_vertices}*{self.v_star}|{body}"

    # -- serialisation ---------------------------------------------------
    def to_text(self) -> str:
        lines = [f"e {i} {t} {h}" for i, (t, h) in enumerate(self.edges, 1)]
        # connected => the vertex count is the largest index mentioned
        if self.v_star != self.num_vertices:
            lines.append(f"vstar {self.v_star}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {"edges": [list(e) for e in self.edges], "v_star": self.v_star}

    def to_json_text(self) -> str:
        return json.dumps(self.to_json())


def _max_vertex(edges, default):
    return max([default] + [max(t, h) for t, h in edges])


def parse_graph(source) -> Graph:
    """Parse the line format (``e <label> <tail> <head>``, ``vstar <k>``,
    ``#`` comments) or a JSON document ``{"edges": [[t, h], ...], "v_star": k}``.

    ``source`` may also be a dict (already-decoded JSON).  Lines may be
    separated by newlines or semicolons.
    """
    if isinstance(source, dict):
        return _graph_from_doc(source)
    text = source.strip()
    if text.startswith("{"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise GraphParseError(f"invalid JSON: {exc}") from None
        return _graph_from_doc(doc)
    edges: dict[int, tuple[int, int]] = {}
    v_star = None
    # comments run to the end of a physical line; ';' separates records
    records = [(lineno, rec) for lineno, raw in enumerate(text.splitlines(), 1)
               for rec in raw.split("#", 1)[0].split(";")]
    for lineno, raw in records:
        line = raw.strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "e" and len(parts) == 4:
                label, t, h = (int(x) for x in parts[1:])
                if label in edges:
                    raise GraphParseError(f"line {lineno}: duplicate edge label {label}")
                edges[label] = (t, h)
            elif parts[0] == "vstar" and len(parts) == 2:
                v_star = int(parts[1])
            else:
                raise GraphParseError(f"line {lineno}: cannot parse {raw.strip()!r}")
        except ValueError as exc:
            if isinstance(exc, GraphParseError):
                raise
            raise GraphParseError(f"line {lineno}: non-integer field in {raw.strip()!r}") from None
    m = len(edges)
    if sorted(edges) != list(range(1, m + 1)):
        raise GraphParseError(f"edge labels must be 1..{m} without gaps, got {sorted(edges)}")
    ordered = [edges[i] for i in range(1, m + 1)]
    for t, h in ordered:
        if t < 1 or h < 1:
            raise GraphError("vertex indices start at 1")
    n = _max_vertex(ordered, v_star or 1)
    return Graph(n, tuple(ordered), v_star)


def _graph_from_doc(doc) -> Graph:
    try:
        edges = [tuple(int(x) for x in e) for e in doc["edges"]]
    except (KeyError, TypeError, ValueError):
        raise GraphParseError("document needs an 'edges' list of [tail, head] pairs") from None
    if any(len(e) != 2 for e in edges):
        raise GraphParseError("each edge must be a [tail, head] pair")
    v_star = doc.get("v_star")
    if any(min(e) < 1 for e in edges):
        raise GraphError("vertex indices start at 1")
    n = _max_vertex(edges, int(v_star) if v_star is not None else 1)
    return Graph(n, tuple(edges), v_star)


# -- spanning trees --------------------------------------------------------

@lru_cache(maxsize=512)
def spanning_trees(g: Graph) -> tuple[EdgeSet, ...]:
    """All spanning trees as sorted edge tuples, in lexicographic order.

    Edges are added in increasing label order with an incremental union-find,
    pruning any prefix that closes a cycle.
    """
    k = g.num_vertices - 1
    candidates = [e for e in range(1, g.num_edges + 1) if not g.is_self_loop(e)]
    out = []

    def extend(start, chosen, uf):
        if len(chosen) == k:
            out.append(tuple(chosen))
            return
        need = k - len(chosen)
        for idx in range(start, len(candidates) - need + 1):
            e = candidates[idx]
            t, h = g.edges[e - 1]
            if uf.find(t) == uf.find(h):
                continue
            nuf = uf.copy()
            nuf.union(t, h)
            chosen.append(e)
            extend(idx + 1, chosen, nuf)
            chosen.pop()

    extend(0, [], _UnionFind(g.num_vertices))
    return tuple(out)


def is_spanning_tree(g: Graph, t) -> bool:
    t = tuple(t)
    if len(t) != g.num_vertices - 1 or len(set(t)) != len(t):
        return False
    uf = _UnionFind(g.num_vertices)
    for e in t:
        if not 1 <= e <= g.num_edges:
            return False
        if not uf.union(*g.edges[e - 1]):
            return False
    return True


def default_tree(g: Graph) -> EdgeSet:
    """Greedy minimum-label spanning tree (Kruskal in label order)."""
    uf = _UnionFind(g.num_vertices)
    return tuple(e for e, (t, h) in enumerate(g.edges, 1) if uf.union(t, h))


def complement(g: Graph, t) -> EdgeSet:
    ts = set(t)
    return tuple(e for e in range(1, g.num_edges + 1) if e not in ts)


def _require_tree(g: Graph, t) -> EdgeSet:
    t = tuple(sorted(t))
    if not is_spanning_tree(g, t):
        raise GraphError(f"{t} is not a spanning tree")
    return t


def tree_path(g: Graph, t, source: int, target: int) -> list[int]:
    """Signed edge vector (length |E|) of the path from source to target in tree t."""
    adj: dict[int, list[tuple[int, int, int]]] = {v: [] for v in range(1, g.num_vertices + 1)}
    for e in t:
        a, b = g.edges[e - 1]
        adj[a].append((b, e, +1))
        adj[b].append((a, e, -1))
    parent: dict[int, tuple[int, int, int] | None] = {source: None}
    stack = [source]
    while stack:
        v = stack.pop()
        for w, e, s in adj[v]:
            if w not in parent:
                parent[w] = (v, e, s)
                stack.append(w)
    if target not in parent:
        raise GraphError(f"no path from {source} to {target} in tree {tuple(t)}")
    vec = [0] * g.num_edges
    v = target
    while parent[v] is not None:
        u, e, s = parent[v]
        vec[e - 1] = s
        v = u
    return vec


# -- matrices --------------------------------------------------------------

@lru_cache(maxsize=512)
def incidence_matrix(g: Graph) -> RingMatrix:
    """Reduced vertex incidence matrix: |E| x (|V|-1), -1 at the tail, +1 at the head."""
    cols = g.reduced_vertices()
    rows = []
    for t, h in g.edges:
        r = []
        for v in cols:
            x = 0
            if v == t:
                x -= 1
            if v == h:
                x += 1
            r.append(x)
        rows.append(r)
    return RingMatrix(rows, len(cols))


@dataclass(frozen=True)
class CycleBasis:
    """Ordered integral basis of the cycle space; ``columns[j][e-1]`` is the
    coefficient of edge ``e`` in cycle ``j``."""

    columns: tuple
    defining_edges: tuple | None = None
    tree: tuple | None = None
    num_edges: int = field(default=0, compare=False)

    def __post_init__(self):
        cols = tuple(tuple(int(x) for x in c) for c in self.columns)
        object.__setattr__(self, "columns", cols)
        if cols:
            object.__setattr__(self, "num_edges", len(cols[0]))
        if any(len(c) != self.num_edges for c in cols):
            raise GraphError("cycle vectors have different lengths")

    @property
    def size(self) -> int:
        return len(self.columns)

    def matrix(self) -> RingMatrix:
        m = self.num_edges
        return RingMatrix([[c[e] for c in self.columns] for e in range(m)], len(self.columns))

    def transform(self, p) -> CycleBasis:
        """The basis ``C @ P`` for an integer matrix P (list of rows)."""
        l = self.size
        cols = []
        for j in range(l):
            cols.append(tuple(sum(self.columns[i][e] * p[i][j] for i in range(l)) for e in range(self.num_edges)))
        return CycleBasis(tuple(cols), num_edges=self.num_edges)

    def is_simple_cycles(self, g: Graph) -> bool:
        return all(_is_simple_cycle(g, c) for c in self.columns)


def _is_simple_cycle(g: Graph, vec) -> bool:
    support = [e for e in range(1, g.num_edges + 1) if vec[e - 1]]
    if not support or any(abs(vec[e - 1]) != 1 for e in support):
        return False
    if len(support) == 1:
        return g.is_self_loop(support[0])
    degree: dict[int, int] = {}
    for e in support:
        t, h = g.edges[e - 1]
        if t == h:
            return False
        degree[t] = degree.get(t, 0) + 1
        degree[h] = degree.get(h, 0) + 1
    if any(d != 2 for d in degree.values()):
        return False
    uf = _UnionFind(g.num_vertices)
    for e in support:
        uf.union(*g.edges[e - 1])
    return len({uf.find(v) for v in degree}) == 1


def validate_cycle_basis(g: Graph, basis: CycleBasis):
    """Raise GraphError unless ``basis`` is an integral basis of the cycle space."""
    if basis.size != g.loop_number:
        raise GraphError(f"basis has {basis.size} cycles, loop number is {g.loop_number}")
    if basis.size == 0:
        return
    if basis.num_edges != g.num_edges:
        raise GraphError("cycle vectors do not match the edge count")
    inc = incidence_matrix(g)
    if not (inc.T @ basis.matrix()).is_zero():
        raise GraphError("basis vectors are not cycles (incidence^T C != 0)")
    t = default_tree(g)
    sub = minor(basis.matrix(), [e - 1 for e in complement(g, t)], None, "keep")
    if abs(bareiss(sub)) != 1:
        raise GraphError("cycles do not form an integral basis of the cycle space")


def fundamental_cycle_basis(g: Graph, t=None) -> CycleBasis:
    """Fundamental cycles of tree ``t`` (default: :func:`default_tree`),
    ordered by defining edge, each oriented along its defining edge."""
    t = default_tree(g) if t is None else _require_tree(g, t)
    cols = []
    defining = complement(g, t)
    for f in defining:
        tail, head = g.edges[f - 1]
        vec = tree_path(g, t, head, tail) if tail != head else [0] * g.num_edges
        vec[f - 1] = 1
        cols.append(tuple(vec))
    return CycleBasis(tuple(cols), defining, t, g.num_edges)


def path_matrix(g: Graph, t=None) -> RingMatrix:
    """Column j: signed path from v_star to the j-th reduced vertex inside tree ``t``."""
    t = default_tree(g) if t is None else _require_tree(g, t)
    cols = [tree_path(g, t, g.v_star, v) for v in g.reduced_vertices()]
    return RingMatrix([[c[e] for c in cols] for e in range(g.num_edges)], len(cols))


def cycle_matrix(g: Graph, basis: CycleBasis) -> RingMatrix:
    if basis.size == 0:
        return RingMatrix([[] for _ in range(g.num_edges)], 0)
    return basis.matrix()


# -- surgeries -------------------------------------------------------------

def contract_edge(g: Graph, e: int) -> Graph:
    """Contract a non-loop edge; the merged vertex keeps the lower label."""
    g.check_edge(e)
    t, h = g.edges[e - 1]
    if t == h:
        raise GraphError(f"cannot contract self-loop {e}")
    lo, hi = min(t, h), max(t, h)

    def rel(v):
        if v == hi:
            v = lo
        return v - 1 if v > hi else v

    edges = tuple((rel(a), rel(b)) for i, (a, b) in enumerate(g.edges, 1) if i != e)
    return Graph(g.num_vertices - 1, edges, rel(g.v_star))


def delete_edge(g: Graph, e: int) -> Graph:
    """Delete an edge; raises GraphError if that disconnects the graph."""
    g.check_edge(e)
    edges = tuple(x for i, x in enumerate(g.edges, 1) if i != e)
    return Graph(g.num_vertices, edges, g.v_star)


def is_bridge(g: Graph, e: int) -> bool:
    try:
        delete_edge(g, e)
    except GraphError:
        return True
    return False


def subdivide_edge(g: Graph, e: int) -> Graph:
    """Split edge ``e = v -> w`` into ``e' = v -> 1`` (label e) and
    ``e'' = 1 -> w`` (label e+1) through a new vertex 1; old vertices shift up."""
    g.check_edge(e)
    edges = []
    for i, (a, b) in enumerate(g.edges, 1):
        if i == e:
            edges.append((a + 1, 1))
            edges.append((1, b + 1))
        else:
            edges.append((a + 1, b + 1))
    return Graph(g.num_vertices + 1, tuple(edges), g.v_star + 1)


def subdivided_basis(basis: CycleBasis, e: int) -> CycleBasis:
    """Induced basis after subdividing ``e``: each occurrence of e becomes e' e''."""
    cols = []
    for c in basis.columns:
        c = list(c)
        cols.append(tuple(c[:e] + [c[e - 1]] + c[e:]))
    return CycleBasis(tuple(cols), num_edges=basis.num_edges + 1)


def dipole(num_edges: int) -> Graph:
    """Two vertices joined by ``num_edges`` parallel edges, all 1 -> 2."""
    return Graph(2, tuple((1, 2) for _ in range(num_edges)))


def number_of_spanning_trees(g: Graph) -> int:
    return len(spanning_trees(g))


def integer_rank(m: RingMatrix) -> int:
    rows = [[Fraction(x) for x in r] for r in m.data]
    rank = 0
    ncols = m.cols
    for c in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i][c] != 0:
                f = rows[i][c] / rows[rank][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[rank])]
        rank += 1
    return rank
