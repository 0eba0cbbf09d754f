"""Command-line front end.

Exit status: 0 when every requested check passes, 1 when a check fails,
2 on bad input.  ``PFAFFFORM_WORKERS`` sets the number of worker processes
used by ``verify``; output order never depends on it.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .corpus import CORPUS_NAMES, load_example, random_suite, reference_basis
from .engine import (
    MAX_ALPHA_LOOPS,
    alpha_form,
    basis_change_check,
    dipole_basis,
    dipole_phi,
    phi_form,
    property_checks,
    random_unimodular,
    subdivision_check,
    verify_main_theorem,
)
from .graph import (
    CycleBasis,
    Graph,
    GraphError,
    dipole,
    fundamental_cycle_basis,
    incidence_matrix,
    parse_graph,
    subdivide_edge,
    subdivided_basis,
    validate_cycle_basis,
)
from .graphpoly import (
    concatenated_det_identities,
    cycle_laplacian,
    dodgson,
    expanded_laplacian,
    inverse_entries_via_dodgson,
    matrix_tree_checks,
    symanzik,
    symanzik_properties,
    vertex_index,
    vertex_laplacian_cleared,
)
from .report import Report

WORKERS_ENV = "PFAFFFORM_WORKERS"
SUITES = ("main", "laplacian", "signs", "forms")


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    graph: str | None = None
    example: str | None = None
    graph_format: str = "auto"
    tree: tuple[int, ...] | None = None
    basis: tuple[tuple[int, ...], ...] | None = None
    seed: int = 0
    max_loops: int = MAX_ALPHA_LOOPS
    max_edges: int = 12
    output: str = "text"
    extra: dict = field(default_factory=dict)


# -- input --------------------------------------------------------------------

def _int_list(text: str) -> tuple[int, ...]:
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(int(x) for x in text.replace(",", " ").split())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma separated list of integers, got {text!r}") from None


def _basis_arg(text: str):
    try:
        cols = json.loads(text)
        return tuple(tuple(int(x) for x in c) for c in cols)
    except (ValueError, TypeError):
        raise argparse.ArgumentTypeError("basis must be a JSON list of cycle vectors") from None


def load_graph(cfg: RunConfig) -> tuple[str, Graph]:
    if cfg.example:
        try:
            return cfg.example, load_example(cfg.example)
        except KeyError as exc:
            raise InputError(str(exc)) from None
    if not cfg.graph:
        raise InputError("give a graph file or --example NAME")
    if cfg.graph == "-":
        text = sys.stdin.read()
    else:
        try:
            text = Path(cfg.graph).read_text()
        except OSError as exc:
            raise InputError(f"cannot read {cfg.graph}: {exc.strerror}") from None
    if cfg.graph_format == "json" and not text.lstrip().startswith("{"):
        raise InputError("--format json but the input is not a JSON object")
    if cfg.graph_format == "text" and text.lstrip().startswith("{"):
        raise InputError("--format text but the input looks like JSON")
    return Path(cfg.graph).stem if cfg.graph != "-" else "stdin", parse_graph(text)


def _check_caps(cfg: RunConfig, g: Graph, need_alpha: bool = False):
    if g.num_edges > cfg.max_edges:
        raise InputError(f"graph has {g.num_edges} edges, cap is {cfg.max_edges} (--max-edges)")
    if need_alpha and g.loop_number > cfg.max_loops:
        raise InputError(f"loop number {g.loop_number} exceeds cap {cfg.max_loops} (--max-loops)")


def choose_basis(cfg: RunConfig, name: str, g: Graph) -> CycleBasis:
    if cfg.basis is not None:
        basis = CycleBasis(cfg.basis, num_edges=g.num_edges)
        validate_cycle_basis(g, basis)
        return basis
    if cfg.tree is not None:
        return fundamental_cycle_basis(g, cfg.tree)
    if cfg.example:
        return reference_basis(name, g)
    return fundamental_cycle_basis(g)


# -- output -------------------------------------------------------------------

def _entry_text(x) -> str:
    return x.to_text() if hasattr(x, "to_text") else str(x)


def matrix_text(m) -> list[str]:
    cells = [[_entry_text(x) for x in row] for row in m.data]
    if not cells:
        return ["[]"]
    widths = [max(len(r[j]) for r in cells) for j in range(m.cols)] if m.cols else []
    return ["[ " + "  ".join(c.rjust(w) for c, w in zip(r, widths)) + " ]" for r in cells]


def matrix_json(m):
    return [[_entry_text(x) for x in row] for row in m.data]


class Output:
    def __init__(self, mode: str):
        self.mode = mode
        self.lines: list[str] = []
        self.doc: dict = {}

    def put(self, key: str, value, text: str | None = None):
        self.doc[key] = value
        self.lines.append(f"{key}: {text if text is not None else value}")

    def block(self, key: str, lines: list[str], value):
        self.doc[key] = value
        self.lines.append(f"{key}:")
        self.lines.extend("  " + ln for ln in lines)

    def report(self, rep: Report):
        self.doc.setdefault("reports", []).append(rep.to_json())
        self.lines.append(rep.to_text())

    def render(self) -> str:
        if self.mode == "json":
            return json.dumps(self.doc, sort_keys=True, indent=1)
        return "\n".join(self.lines)


# -- commands -----------------------------------------------------------------

def cmd_symanzik(cfg: RunConfig, out: Output) -> bool:
    name, g = load_graph(cfg)
    _check_caps(cfg, g)
    psi = symanzik(g, cfg.extra.get("method", "trees"))
    out.put("graph", g.fingerprint())
    out.put("symanzik", psi.to_text())
    return True


def _dodgson_indices(g: Graph, text: str) -> list[int]:
    idx = []
    for tok in text.replace(",", " ").split():
        try:
            if tok.lower().startswith("v"):
                idx.append(vertex_index(g, int(tok[1:])))
            else:
                idx.append(int(tok))
        except ValueError as exc:
            raise InputError(f"bad Dodgson index {tok!r}: {exc}") from None
    return idx


def cmd_dodgson(cfg: RunConfig, out: Output) -> bool:
    name, g = load_graph(cfg)
    _check_caps(cfg, g)
    a = _dodgson_indices(g, cfg.extra["a"])
    b = _dodgson_indices(g, cfg.extra["b"])
    method = cfg.extra.get("method", "det")
    p = dodgson(g, a, b, method)
    out.put("graph", g.fingerprint())
    out.put("rows removed", a)
    out.put("columns removed", b)
    out.put("dodgson", p.to_text())
    return True


def cmd_laplacians(cfg: RunConfig, out: Output) -> bool:
    name, g = load_graph(cfg)
    _check_caps(cfg, g)
    basis = choose_basis(cfg, name, g)
    out.put("graph", g.fingerprint())
    out.put("cycle basis", [list(c) for c in basis.columns])
    inc = incidence_matrix(g)
    out.block("incidence matrix", matrix_text(inc), matrix_json(inc))
    m = expanded_laplacian(g)
    out.block("expanded Laplacian", matrix_text(m), matrix_json(m))
    lt = vertex_laplacian_cleared(g)
    out.block("vertex Laplacian times prod(a)", matrix_text(lt), matrix_json(lt))
    lam = cycle_laplacian(g, basis)
    out.block("cycle Laplacian", matrix_text(lam), matrix_json(lam))
    return True


def _form_out(out: Output, key: str, form, g: Graph):
    out.put(key, form.to_json(), form.to_text())
    if form.is_zero() and g.loop_number % 2:
        out.put("note", "odd loop number")
    elif form.is_zero() and g.has_self_loop():
        out.put("note", "graph has a self-loop")


def cmd_alpha(cfg: RunConfig, out: Output) -> bool:
    name, g = load_graph(cfg)
    _check_caps(cfg, g, need_alpha=True)
    out.put("graph", g.fingerprint())
    out.put("psi", symanzik(g).to_text())
    _form_out(out, "alpha", alpha_form(g), g)
    return True


def cmd_phi(cfg: RunConfig, out: Output) -> bool:
    name, g = load_graph(cfg)
    _check_caps(cfg, g)
    basis = choose_basis(cfg, name, g)
    out.put("graph", g.fingerprint())
    out.put("cycle basis", [list(c) for c in basis.columns])
    out.put("psi", symanzik(g).to_text())
    _form_out(out, "phi", phi_form(g, basis, cfg.extra.get("method", "direct")), g)
    return True


def run_suites(g: Graph, basis: CycleBasis, suites, seed: int) -> list[Report]:
    reps = []
    if "main" in suites:
        reps.append(verify_main_theorem(g, basis))
    if "laplacian" in suites:
        reps.append(symanzik_properties(g))
        reps.append(inverse_entries_via_dodgson(g))
        reps.append(matrix_tree_checks(g, basis))
    if "signs" in suites:
        reps.append(concatenated_det_identities(g, basis))
    if "forms" in suites:
        reps.append(property_checks(g, basis))
        if g.loop_number:
            rng = random.Random(f"{seed}:{g.fingerprint()}")
            reps.append(basis_change_check(g, basis, random_unimodular(rng, g.loop_number)))
        for e in range(1, g.num_edges + 1):
            reps.append(subdivision_check(g, e, basis))
    return reps


def _suite_job(args):
    g, columns, suites, seed = args
    basis = CycleBasis(columns, num_edges=g.num_edges)
    return run_suites(g, basis, suites, seed)


def _workers() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        raise InputError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None
    if n < 1:
        raise InputError(f"{WORKERS_ENV} must be positive")
    return n


def cmd_verify(cfg: RunConfig, out: Output) -> bool:
    suite = cfg.extra.get("suite", "all")
    suites = SUITES if suite == "all" else (suite,)
    targets: list[tuple[str, Graph, CycleBasis]] = []
    if cfg.extra.get("corpus"):
        for name in CORPUS_NAMES:
            g = load_example(name)
            targets.append((name, g, reference_basis(name, g)))
    if cfg.graph or cfg.example:
        name, g = load_graph(cfg)
        targets.append((name, g, choose_basis(cfg, name, g)))
    n_random = cfg.extra.get("random", 0)
    if n_random:
        for k, g in enumerate(random_suite(cfg.seed, n_random)):
            targets.append((f"random-{k}", g, fundamental_cycle_basis(g)))
    if not targets:
        raise InputError("nothing to verify: give a graph, --example, --corpus or --random N")
    for name, g, _ in targets:
        _check_caps(cfg, g, need_alpha="main" in suites or "forms" in suites)

    jobs = [(g, b.columns, suites, cfg.seed) for _, g, b in targets]
    workers = min(_workers(), len(jobs))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_suite_job, jobs))
    else:
        results = [_suite_job(j) for j in jobs]

    ok = True
    summary = []
    for (name, g, _), reps in zip(targets, results):
        passed = all(r.passed for r in reps)
        ok &= passed
        summary.append({"name": name, "graph": g.fingerprint(), "passed": passed})
        out.lines.append(f"## {name}")
        for r in reps:
            out.report(r)
    failed = [s["name"] for s in summary if not s["passed"]]
    out.doc["summary"] = summary
    out.put("result", "PASS" if ok else "FAIL",
            ("PASS" if ok else "FAIL") + f" ({len(summary) - len(failed)}/{len(summary)} graphs"
            + (f"; failing: {', '.join(failed)}" if failed else "") + ")")
    if not ok:
        for (name, _, _), reps in zip(targets, results):
            for r in reps:
                for c in r.failures():
                    print(f"check failed: {name}: {r.title}: {c.name}" + (f" [{c.detail}]" if c.detail else ""),
                          file=sys.stderr)
    return ok


def cmd_dipole(cfg: RunConfig, out: Output) -> bool:
    i = cfg.extra["i"]
    if i < 1:
        raise InputError("--i must be a positive integer")
    g = dipole(2 * i + 1)
    closed = dipole_phi(i)
    out.put("graph", g.fingerprint())
    out.put("closed form", closed.to_json(), closed.to_text())
    rep = Report("dipole closed form", g.fingerprint())
    rep.check("closed form = phi (direct route)", closed.equals(phi_form(g, dipole_basis(i))))
    if cfg.extra.get("integrate"):
        from .dipole import BudgetExhausted, integrate_dipole_numeric

        try:
            res = integrate_dipole_numeric(i, cfg.extra.get("scheme"), cfg.extra.get("budget"),
                                           seed=cfg.seed)
        except BudgetExhausted as exc:
            rep.check("numerical integral reaches tolerance", False, str(exc))
        else:
            rep.data["integral"] = f"{res.estimate:.6f} +- {res.error:.2g} ({res.scheme}, {res.evaluations} evaluations)"
            rep.check("integral = 1 within error", abs(res.estimate - 1) <= res.error)
    out.report(rep)
    return rep.passed


def cmd_subdivide(cfg: RunConfig, out: Output) -> bool:
    name, g = load_graph(cfg)
    _check_caps(cfg, g, need_alpha=True)
    e = cfg.extra["edge"]
    if not 1 <= e <= g.num_edges:
        raise InputError(f"edge {e} out of range 1..{g.num_edges}")
    basis = choose_basis(cfg, name, g)
    g2 = subdivide_edge(g, e)
    out.put("subdivided graph", g2.to_json(), g2.to_text().replace("\n", "; "))
    out.put("induced cycle basis", [list(c) for c in subdivided_basis(basis, e).columns])
    rep = subdivision_check(g, e, basis)
    out.report(rep)
    return rep.passed


COMMANDS = {
    "symanzik": cmd_symanzik,
    "dodgson": cmd_dodgson,
    "laplacians": cmd_laplacians,
    "alpha": cmd_alpha,
    "phi": cmd_phi,
    "verify": cmd_verify,
    "dipole": cmd_dipole,
    "subdivide": cmd_subdivide,
}


# -- parsing ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", choices=("text", "json"), default="text")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--max-loops", type=int, default=MAX_ALPHA_LOOPS)
    common.add_argument("--max-edges", type=int, default=12)

    graph_args = argparse.ArgumentParser(add_help=False)
    graph_args.add_argument("graph", nargs="?", help="graph file ('-' for stdin)")
    graph_args.add_argument("--example", choices=CORPUS_NAMES, help="use a bundled graph")
    graph_args.add_argument("--format", dest="graph_format", choices=("auto", "text", "json"), default="auto")
    basis_args = argparse.ArgumentParser(add_help=False)
    basis_args.add_argument("--tree", type=_int_list, help="spanning tree for the fundamental cycle basis, e.g. 2,4")
    basis_args.add_argument("--basis", type=_basis_arg, help="explicit cycle basis as JSON columns")

    p = argparse.ArgumentParser(prog="pfaffform", description="Graph polynomials and differential forms of graphs.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("symanzik", parents=[common, graph_args], help="Symanzik polynomial")
    s.add_argument("--method", choices=("trees", "expanded_det", "cycle_det"), default="trees")

    s = sub.add_parser("dodgson", parents=[common, graph_args], help="Dodgson polynomial")
    s.add_argument("--a", required=True, help="removed rows: edge labels, or vK for vertex K")
    s.add_argument("--b", required=True, help="removed columns, same syntax")
    s.add_argument("--method", choices=("det", "expansion"), default="det")

    sub.add_parser("laplacians", parents=[common, graph_args, basis_args], help="graph matrices")
    sub.add_parser("alpha", parents=[common, graph_args], help="topological form")

    s = sub.add_parser("phi", parents=[common, graph_args, basis_args], help="Pfaffian form")
    s.add_argument("--method", choices=("direct", "trees", "hafnian"), default="direct")

    s = sub.add_parser("verify", parents=[common, graph_args, basis_args], help="run identity checks")
    s.add_argument("--suite", choices=SUITES + ("all",), default="all")
    s.add_argument("--corpus", action="store_true", help="include every bundled graph")
    s.add_argument("--random", type=int, default=0, metavar="N", help="include N seeded random graphs")

    s = sub.add_parser("dipole", parents=[common], help="dipole closed form and integral")
    s.add_argument("--i", type=int, required=True)
    s.add_argument("--integrate", action="store_true")
    s.add_argument("--scheme", choices=("quadrature", "monte_carlo"))
    s.add_argument("--budget", type=int)

    s = sub.add_parser("subdivide", parents=[common, graph_args, basis_args], help="subdivide an edge")
    s.add_argument("--edge", type=int, required=True)
    return p


_CONFIG_KEYS = {"command", "graph", "example", "graph_format", "tree", "basis", "seed",
                "max_loops", "max_edges", "output"}


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    d = vars(ns)
    cfg = RunConfig(**{k: d[k] for k in _CONFIG_KEYS if k in d})
    cfg.extra = {k: v for k, v in d.items() if k not in _CONFIG_KEYS}
    if cfg.max_loops < 0 or cfg.max_edges < 1:
        raise InputError("caps must be positive")
    return cfg


def run(cfg: RunConfig, stdout=None) -> int:
    stdout = stdout or sys.stdout
    out = Output(cfg.output)
    try:
        ok = COMMANDS[cfg.command](cfg, out)
    except (InputError, GraphError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    stdout.write(out.render() + "\n")
    return 0 if ok else 1


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = config_from_args(ns)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
