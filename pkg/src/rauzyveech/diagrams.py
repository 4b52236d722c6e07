"""Rauzy diagrams: breadth-first closure under the two induction moves,
the labeled-over-reduced covering, vertex classification, and the structural
verifiers for the two table families.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterator, Literal

from .errors import CommutationError, DiagramTooLarge, IrreducibleError
from .iet import (
    MOVES,
    LabeledPermutation,
    Move,
    Renumbering,
    family_pi,
    family_tau,
    find_renumbering,
    other_move,
)

Mode = Literal["labeled", "reduced"]

DEFAULT_VERTEX_BUDGET = 1 << 20


@dataclass(frozen=True, slots=True)
class Edge:
    target: int
    winner: int
    loser: int


@dataclass(frozen=True)
class RauzyDiagram:
    """Directed graph of permutations closed under both induction moves.

    Vertices are numbered in BFS order from the base, exploring the t edge
    before the b edge, so numbering, reports and exports are reproducible.
    In reduced mode each vertex stores the canonical labeled representative
    (top row 1..d) of its reduced class.
    """

    mode: Mode
    vertices: tuple[LabeledPermutation, ...]
    edges: tuple[tuple[Edge, Edge], ...]  # (t-edge, b-edge) per vertex
    base: int = 0

    @property
    def size(self) -> int:
        return len(self.vertices)

    @property
    def d(self) -> int:
        return self.vertices[0].d

    def vertex_key(self, perm: LabeledPermutation):
        if self.mode == "reduced":
            return perm.reduce().perm
        return (perm.top, perm.bottom)

    def index_of(self, perm: LabeledPermutation) -> int | None:
        return self._index.get(self.vertex_key(perm))

    @property
    def _index(self) -> dict:
        cache = getattr(self, "_index_cache", None)
        if cache is None:
            cache = {self.vertex_key(v): i for i, v in enumerate(self.vertices)}
            object.__setattr__(self, "_index_cache", cache)
        return cache

    def edge(self, vertex: int, eps: Move) -> Edge:
        return self.edges[vertex][0 if eps == "t" else 1]

    def out_edges(self, vertex: int) -> Iterator[tuple[Move, Edge]]:
        yield "t", self.edges[vertex][0]
        yield "b", self.edges[vertex][1]

    # -- exports (external interface) --

    def to_dot(self, name: str = "rauzy") -> str:
        lines = [f"digraph {name} {{"]
        for i, v in enumerate(self.vertices):
            label = v.to_text().replace(" / ", "\\n")
            lines.append(f'  v{i} [label="{label}"];')
        for i, (et, eb) in enumerate(self.edges):
            for eps, e in (("t", et), ("b", eb)):
                lines.append(
                    f'  v{i} -> v{e.target} [label="{eps}:{e.winner}/{e.loser}"];'
                )
        lines.append("}")
        return "\n".join(lines) + "\n"

    def to_json_obj(self, n: int | None = None) -> dict:
        return {
            "mode": self.mode,
            "n": n if n is not None else self.d,
            "vertices": [
                {"id": i, "top": list(v.top), "bottom": list(v.bottom)}
                for i, v in enumerate(self.vertices)
            ],
            "edges": [
                {
                    "from": i,
                    "eps": eps,
                    "to": e.target,
                    "winner": e.winner,
                    "loser": e.loser,
                }
                for i in range(self.size)
                for eps, e in self.out_edges(i)
            ],
            "base": self.base,
        }

    def to_json(self, n: int | None = None) -> str:
        return json.dumps(self.to_json_obj(n), indent=2)


def build_diagram(
    base: LabeledPermutation,
    mode: Mode = "labeled",
    vertex_budget: int = DEFAULT_VERTEX_BUDGET,
) -> RauzyDiagram:
    """BFS closure of a permutation under both moves (t explored before b)."""
    if not base.irreducible():
        raise IrreducibleError(f"base permutation is reducible: {base.to_text()}")

    if mode == "reduced":
        start = base.reduce().canonical_labeled()
        key = lambda p: p.reduce().perm  # noqa: E731
    elif mode == "labeled":
        start = base
        key = lambda p: (p.top, p.bottom)  # noqa: E731
    else:
        raise ValueError(f"unknown mode {mode!r}")

    vertices: list[LabeledPermutation] = [start]
    index = {key(start): 0}
    edge_rows: list[tuple[Edge, Edge]] = []
    head = 0
    while head < len(vertices):
        perm = vertices[head]
        row = []
        for eps in MOVES:
            moved, winner, loser = perm.rauzy_move(eps)
            if not moved.irreducible():
                raise IrreducibleError("a Rauzy move produced a reducible table")
            if mode == "reduced":
                moved = moved.reduce().canonical_labeled()
            k = key(moved)
            if k not in index:
                if len(vertices) >= vertex_budget:
                    raise DiagramTooLarge(
                        f"vertex budget {vertex_budget} exceeded while closing diagram"
                    )
                index[k] = len(vertices)
                vertices.append(moved)
            row.append(Edge(index[k], winner, loser))
        edge_rows.append((row[0], row[1]))
        head += 1
    return RauzyDiagram(mode, tuple(vertices), tuple(edge_rows))


# ---------------------------------------------------------------------------
# covering of the reduced diagram by the labeled one
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CoveringMap:
    """Vertexwise projection labeled -> reduced plus the deck renumberings."""

    labeled: RauzyDiagram
    reduced: RauzyDiagram
    vertex_map: tuple[int, ...]
    deck: tuple[Renumbering, ...]

    @property
    def degree(self) -> int:
        return self.labeled.size // self.reduced.size

    def fiber(self, reduced_vertex: int) -> tuple[int, ...]:
        return tuple(
            i for i, r in enumerate(self.vertex_map) if r == reduced_vertex
        )

    def is_bijective(self) -> bool:
        return self.labeled.size == self.reduced.size


def covering(labeled: RauzyDiagram) -> CoveringMap:
    """Project each labeled vertex to its reduced class and certify that the
    projection commutes with both moves on every edge."""
    if labeled.mode != "labeled":
        raise ValueError("covering() expects a labeled diagram")
    reduced = build_diagram(labeled.vertices[labeled.base], "reduced")
    vmap = []
    for v in labeled.vertices:
        r = reduced.index_of(v)
        if r is None:
            raise CommutationError("labeled vertex has no reduced image in diagram")
        vmap.append(r)
    for i in range(labeled.size):
        for eps in MOVES:
            lab_target = labeled.edge(i, eps).target
            red_target = reduced.edge(vmap[i], eps).target
            if vmap[lab_target] != red_target:
                raise CommutationError(
                    f"move {eps} does not commute with reduction at vertex {i}"
                )
    base_perm = labeled.vertices[labeled.base]
    deck = []
    for j in covering_fiber_indices(labeled, base_perm):
        rho = find_renumbering(base_perm, labeled.vertices[j])
        if rho is not None:
            deck.append(rho)
    return CoveringMap(labeled, reduced, tuple(vmap), tuple(deck))


def covering_fiber_indices(
    labeled: RauzyDiagram, over: LabeledPermutation
) -> tuple[int, ...]:
    target = over.reduce().perm
    return tuple(
        i for i, v in enumerate(labeled.vertices) if v.reduce().perm == target
    )


def deck_is_automorphism(labeled: RauzyDiagram, rho: Renumbering) -> bool:
    """Relabeling by rho permutes the vertex set and preserves both moves."""
    for i, v in enumerate(labeled.vertices):
        image = labeled.index_of(v.relabel(rho))
        if image is None:
            return False
        for eps in MOVES:
            t1 = labeled.edge(i, eps).target
            t2 = labeled.edge(image, eps).target
            if labeled.index_of(labeled.vertices[t1].relabel(rho)) != t2:
                return False
    return True


# ---------------------------------------------------------------------------
# vertex classification in the marked family
# ---------------------------------------------------------------------------

VertexClass = Literal["central", "transition", "plain"]


def added_permutation_tables(n: int) -> dict[str, LabeledPermutation]:
    """The added tables of the marked diagram, exactly as printed.

    Keys: 'bt^k' and 'tb^k' for k = 2..n-1 plus 't' and 'b' for the two
    single-move tables.
    """
    tables: dict[str, LabeledPermutation] = {}
    for k in range(2, n):
        top = (0,) + tuple(range(2, k + 1)) + (n,) + tuple(range(k + 1, n)) + (1,)
        bottom = (
            (n,) + tuple(range(k - 1, 0, -1)) + (0,) + tuple(range(n - 1, k - 1, -1))
        )
        tables[f"bt^{k}"] = LabeledPermutation(top, bottom)
        top = (0,) + tuple(range(n - k + 2, n)) + (1, n) + tuple(range(2, n - k + 2))
        bottom = (
            (n,) + tuple(range(n - 1, n - k, -1)) + (0,) + tuple(range(n - k, 0, -1))
        )
        tables[f"tb^{k}"] = LabeledPermutation(top, bottom)
    tables["t"] = LabeledPermutation(
        (0,) + tuple(range(2, n)) + (1, n),
        (n, 0) + tuple(range(n - 1, 0, -1)),
    )
    tables["b"] = LabeledPermutation(
        (0, n) + tuple(range(2, n)) + (1,),
        (n,) + tuple(range(n - 1, 0, -1)) + (0,),
    )
    return tables


def _marked_n(diagram: RauzyDiagram) -> int:
    return diagram.d - 1


def classify_vertex(diagram: RauzyDiagram, vertex: int) -> VertexClass:
    """central: in the renumbering fiber of the marked base table;
    transition: an added table up to renumbering; plain: everything else."""
    n = _marked_n(diagram)
    perm = diagram.vertices[vertex]
    if perm.reduce().perm == family_pi(n).reduce().perm:
        return "central"
    for table in added_permutation_tables(n).values():
        if find_renumbering(table, perm) is not None:
            return "transition"
    return "plain"


@dataclass(frozen=True)
class AddedPermutationReport:
    n: int
    table_matches: dict[str, bool]
    reduced_identifications: dict[int, bool]
    renumbering_powers: dict[int, int]
    ok: bool
    failures: tuple[str, ...]


def verify_added_permutations(n: int) -> AddedPermutationReport:
    """Recompute R_b R_t^k and R_t R_b^k from the base table and compare with
    the printed added tables; check the reduced identification and find the
    deck power relating the two labeled tables."""
    if n < 3:
        raise ValueError("needs n >= 3")
    base = family_pi(n)
    tables = added_permutation_tables(n)
    matches: dict[str, bool] = {}
    identified: dict[int, bool] = {}
    powers: dict[int, int] = {}
    failures: list[str] = []

    def walk(moves: str) -> LabeledPermutation:
        p = base
        for eps in moves:
            p, _, _ = p.rauzy_move(eps)
        return p

    for k in range(2, n):
        a = walk("t" * k + "b")
        b = walk("b" * k + "t")
        matches[f"bt^{k}"] = a == tables[f"bt^{k}"]
        matches[f"tb^{k}"] = b == tables[f"tb^{k}"]
        identified[k] = a.reduce() == b.reduce()
        for key, val in ((f"bt^{k}", matches[f"bt^{k}"]), (f"tb^{k}", matches[f"tb^{k}"])):
            if not val:
                failures.append(f"table mismatch at {key}")
        if not identified[k]:
            failures.append(f"reduced identification fails at k={k}")
        power = None
        for e in range(n - 1):
            if b.relabel(Renumbering.sigma_cycle(n, e)) == a:
                power = e
                break
        if power is None:
            failures.append(f"no deck power relates the two tables at k={k}")
        else:
            powers[k] = power
    for key in ("t", "b"):
        matches[key] = walk(key) == tables[key]
        if not matches[key]:
            failures.append(f"table mismatch at {key}")
    # the two single-move tables stay distinct in the reduced diagram
    if walk("t").reduce() == walk("b").reduce():
        failures.append("single-move tables unexpectedly identified")
    return AddedPermutationReport(
        n, matches, identified, powers, not failures, tuple(failures)
    )


# ---------------------------------------------------------------------------
# symmetric-vertex detection
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SymmetricVertex:
    vertex: int
    permutation: LabeledPermutation
    fully_reversed: bool


def detect_symmetric_vertex(diagram: RauzyDiagram) -> SymmetricVertex | None:
    """First vertex whose table has the corner-swapped shape
    (alpha ... beta / beta ... alpha); reports whether the rows are in fact
    fully reversed.  Fully reversed vertices win ties."""
    best: SymmetricVertex | None = None
    for i, v in enumerate(diagram.vertices):
        corners = v.top[0] == v.bottom[-1] and v.top[-1] == v.bottom[0]
        if not corners:
            continue
        full = v.bottom == tuple(reversed(v.top))
        if full:
            return SymmetricVertex(i, v, True)
        if best is None:
            best = SymmetricVertex(i, v, False)
    return best


# ---------------------------------------------------------------------------
# the recursive structure of the hyperelliptic diagram
# ---------------------------------------------------------------------------


def branch_vertices(diagram: RauzyDiagram, root: int, eps: Move) -> frozenset[int]:
    """Vertices reachable from root by a simple path whose first move is eps
    (the root itself excluded)."""
    first = diagram.edge(root, eps).target
    if first == root:
        return frozenset()
    seen = {first}
    stack = [first]
    while stack:
        v = stack.pop()
        for _, e in diagram.out_edges(v):
            if e.target != root and e.target not in seen:
                seen.add(e.target)
                stack.append(e.target)
    return frozenset(seen)


def _rooted_branch_isomorphic(
    d1: RauzyDiagram, root1: int, s1: frozenset[int],
    d2: RauzyDiagram, root2: int, s2: frozenset[int],
    eps: Move,
) -> bool:
    """Rooted colored-digraph isomorphism between two branch subdiagrams; with
    out-degree 2 and colored edges the map is forced, so follow it and check."""
    if len(s1) != len(s2):
        return False
    if not s1:
        return True
    r1 = d1.edge(root1, eps).target
    r2 = d2.edge(root2, eps).target
    mapping = {r1: r2}
    stack = [r1]
    while stack:
        x = stack.pop()
        y = mapping[x]
        for move in MOVES:
            tx = d1.edge(x, move).target
            ty = d2.edge(y, move).target
            if (tx in s1) != (ty in s2):
                return False
            if tx in s1:
                if tx in mapping:
                    if mapping[tx] != ty:
                        return False
                else:
                    mapping[tx] = ty
                    stack.append(tx)
    return len(mapping) == len(s1) and len(set(mapping.values())) == len(s2)


@dataclass(frozen=True)
class RecursionReport:
    n: int
    partition_ok: bool
    cases: dict[tuple[str, int], bool]
    ok: bool


def verify_rauzy_recursion(n: int) -> RecursionReport:
    """The branch after R_{1-eps} from R_eps^k of the hyperelliptic base is
    isomorphic to the matching branch of the (n-k)-letter diagram."""
    diagram = build_diagram(family_tau(n), "labeled")
    base = diagram.index_of(family_tau(n))
    gt = branch_vertices(diagram, base, "t")
    gb = branch_vertices(diagram, base, "b")
    partition_ok = not (gt & gb) and len(gt) + len(gb) + 1 == diagram.size
    cases: dict[tuple[str, int], bool] = {}
    smaller: dict[int, RauzyDiagram] = {}
    for eps in MOVES:
        cur = base
        for k in range(1, n - 1):
            cur = diagram.edge(cur, eps).target
            m = n - k
            if m < 2:
                break
            if m not in smaller:
                smaller[m] = build_diagram(family_tau(m), "labeled")
            sd = smaller[m]
            sbase = sd.index_of(family_tau(m))
            o = other_move(eps)
            s1 = branch_vertices(diagram, cur, o)
            s2 = branch_vertices(sd, sbase, o)
            cases[(eps, k)] = _rooted_branch_isomorphic(
                diagram, cur, s1, sd, sbase, s2, o
            )
    ok = partition_ok and all(cases.values())
    return RecursionReport(n, partition_ok, cases, ok)
