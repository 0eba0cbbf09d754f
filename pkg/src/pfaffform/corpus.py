"""Bundled example graphs and a seeded generator of random connected graphs."""

from __future__ import annotations

import random
from importlib import resources

from .graph import CycleBasis, Graph, fundamental_cycle_basis, parse_graph

CORPUS_NAMES = (
    "dunces_cap",
    "theta",
    "double_triangle",
    "dipole5",
    "triangle",
    "single_edge",
    "triangle_self_loop",
)


def load_example(name: str) -> Graph:
    try:
        text = resources.files("pfaffform.data").joinpath(f"{name}.graph").read_text()
    except FileNotFoundError:
        raise KeyError(f"no bundled graph named {name!r}") from None
    return parse_graph(text)


def corpus() -> dict[str, Graph]:
    return {name: load_example(name) for name in CORPUS_NAMES}


def reference_basis(name: str, g: Graph) -> CycleBasis:
    """Cycle basis the golden tests use: the theta graph with the
    tree {3}, the dunce's cap with {2, 4}, otherwise the default."""
    if name == "theta":
        return fundamental_cycle_basis(g, (3,))
    if name == "dunces_cap":
        return fundamental_cycle_basis(g, (2, 4))
    return fundamental_cycle_basis(g)


def random_graph(rng: random.Random, loops: int, max_edges: int = 9,
                 self_loop_prob: float = 0.05) -> Graph:
    """Random connected multigraph with the given loop number.

    A random tree on ``n`` vertices plus ``loops`` extra edges; orientations
    and labels are shuffled.
    """
    lo = loops + 1
    if max_edges < lo:
        raise ValueError(f"need at least {lo} edges for {loops} loops")
    m = rng.randint(lo, max_edges)
    n = m - loops + 1
    edges = []
    for v in range(2, n + 1):
        edges.append((rng.randint(1, v - 1), v))
    for _ in range(loops):
        if rng.random() < self_loop_prob:
            v = rng.randint(1, n)
            edges.append((v, v))
        else:
            a, b = rng.sample(range(1, n + 1), 2)
            edges.append((a, b))
    perm = list(range(1, n + 1))
    rng.shuffle(perm)
    edges = [(perm[a - 1], perm[b - 1]) for a, b in edges]
    edges = [(b, a) if rng.random() < 0.5 else (a, b) for a, b in edges]
    rng.shuffle(edges)
    return Graph(n, tuple(edges))


def random_suite(seed: int = 0, count: int = 50, loops=(0, 2, 4), max_edges: int = 9) -> list[Graph]:
    """``count`` seeded random connected graphs cycling through ``loops``."""
    rng = random.Random(seed)
    return [random_graph(rng, loops[k % len(loops)], max_edges) for k in range(count)]
