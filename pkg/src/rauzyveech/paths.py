"""Paths and loops in Rauzy diagrams, their integer cocycles, and the
structural facts the dilatation floor rests on.

The matrix of a path is accumulated by the column rule: each step adds the
winner's column to the loser's column, which is exactly right multiplication
by the transvection I + E_{winner,loser}.  For a closed loop in a reduced
diagram the lift from the canonical labeled representative usually ends at a
renumbering of its start; the renumbering's permutation matrix P closes the
cocycle, V = Vhat . P.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator

from .diagrams import RauzyDiagram, covering_fiber_indices
from .errors import (
    BaseMismatchError,
    LoopBudgetExceeded,
    OpenPathError,
)
from .exact_linalg import (
    DEFAULT_PRECISION,
    IntMatrix,
    IntPolynomial,
    PerronRoot,
    permutation_matrix,
    perron_root,
    transvection,
)
from .iet import (
    MOVES,
    LabeledPermutation,
    Move,
    Renumbering,
    family_pi,
    find_renumbering,
)


@dataclass(frozen=True)
class RauzyPath:
    """A move sequence applied to a labeled start table.

    Stores every intermediate table plus the winner/loser trace; ``closed``
    means the final table equals the start exactly (same letters).
    """

    start: LabeledPermutation
    moves: str
    tables: tuple[LabeledPermutation, ...]
    winners: tuple[int, ...]
    losers: tuple[int, ...]

    @classmethod
    def from_moves(cls, start: LabeledPermutation, moves: str) -> "RauzyPath":
        tables = [start]
        winners: list[int] = []
        losers: list[int] = []
        p = start
        for eps in moves:
            if eps not in MOVES:
                raise ValueError(f"bad move {eps!r}")
            p, w, l = p.rauzy_move(eps)
            tables.append(p)
            winners.append(w)
            losers.append(l)
        return cls(start, moves, tuple(tables), tuple(winners), tuple(losers))

    @property
    def end(self) -> LabeledPermutation:
        return self.tables[-1]

    @property
    def length(self) -> int:
        return len(self.moves)

    @property
    def closed(self) -> bool:
        return self.end == self.start

    def end_renumbering(self) -> Renumbering | None:
        """The letter map r with relabel(end, r) == start, when end lies over
        the same reduced class."""
        return find_renumbering(self.end, self.start)

    def winner_letters(self) -> frozenset[int]:
        return frozenset(self.winners)

    def loser_letters(self) -> frozenset[int]:
        return frozenset(self.losers)

    def steps(self) -> Iterator[tuple[LabeledPermutation, Move, int, int, LabeledPermutation]]:
        for i, eps in enumerate(self.moves):
            yield self.tables[i], eps, self.winners[i], self.losers[i], self.tables[i + 1]

    def transition_matrix(self) -> IntMatrix:
        """Vhat by incremental column additions (alphabet order indexing)."""
        alphabet = self.start.alphabet
        col = {c: i for i, c in enumerate(alphabet)}
        d = len(alphabet)
        rows = [[1 if i == j else 0 for j in range(d)] for i in range(d)]
        for w, l in zip(self.winners, self.losers):
            a, b = col[w], col[l]
            for r in range(d):
                rows[r][b] += rows[r][a]
        return IntMatrix.from_rows(rows)

    def transvection_product(self) -> IntMatrix:
        """Same cocycle as an explicit product of transvections (cross-check)."""
        alphabet = self.start.alphabet
        col = {c: i for i, c in enumerate(alphabet)}
        d = len(alphabet)
        acc = IntMatrix.identity(d)
        for w, l in zip(self.winners, self.losers):
            acc = acc @ transvection(d, col[w] + 1, col[l] + 1)
        return acc


# ---------------------------------------------------------------------------
# loops inside a built diagram
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Loop:
    """A closed path in a diagram, canonical under cyclic rotation."""

    diagram: RauzyDiagram
    base: int
    moves: str

    def __post_init__(self) -> None:
        v = self.base
        for eps in self.moves:
            v = self.diagram.edge(v, eps).target
        if v != self.base:
            raise OpenPathError("move sequence does not close at its base vertex")

    @property
    def length(self) -> int:
        return len(self.moves)

    def vertices(self) -> tuple[int, ...]:
        out = [self.base]
        v = self.base
        for eps in self.moves:
            v = self.diagram.edge(v, eps).target
            out.append(v)
        return tuple(out)

    def edge_trace(self) -> tuple[tuple[int, Move, int, int, int], ...]:
        """(from, move, winner, loser, to) per step, in diagram letters."""
        out = []
        v = self.base
        for eps in self.moves:
            e = self.diagram.edge(v, eps)
            out.append((v, eps, e.winner, e.loser, e.target))
            v = e.target
        return tuple(out)

    def rotate(self, k: int) -> "Loop":
        verts = self.vertices()
        return Loop(self.diagram, verts[k], self.moves[k:] + self.moves[:k])

    def rotations(self) -> Iterator["Loop"]:
        for k in range(self.length):
            yield self.rotate(k)

    def canonical(self) -> "Loop":
        verts = self.vertices()[:-1]
        best = min(
            range(self.length),
            key=lambda k: (verts[k], self.moves[k:] + self.moves[:k], k),
        )
        return self.rotate(best)

    def canonical_key(self) -> tuple[int, str]:
        c = self.canonical()
        return (c.base, c.moves)

    def primitive_period(self) -> int:
        verts = self.vertices()[:-1]
        token = list(zip(verts, self.moves))
        for p in range(1, self.length + 1):
            if self.length % p == 0 and token == token[p:] + token[:p]:
                return p
        return self.length

    def winner_letters(self) -> frozenset[int]:
        return frozenset(w for _, _, w, _, _ in self.edge_trace())

    def to_json_obj(self) -> dict:
        return {"base": self.base, "moves": self.moves}


def enumerate_closed_loops(
    diagram: RauzyDiagram,
    max_len: int,
    through: Iterable[int] | None = None,
    budget: int = 1_000_000,
) -> list[Loop]:
    """All closed loops of length <= max_len, one canonical representative per
    cyclic-rotation class, sorted by (length, base, moves).

    ``through`` restricts to loops visiting at least one of the given
    vertices.  Raises LoopBudgetExceeded beyond ``budget`` loops.
    """
    want = set(through) if through is not None else None
    seen: set[tuple[int, str]] = set()
    out: list[Loop] = []

    edges = diagram.edges

    def dfs(v0: int, v: int, moves: list[str]) -> None:
        if moves and v == v0:
            loop = Loop(diagram, v0, "".join(moves))
            key = loop.canonical_key()
            if key not in seen:
                seen.add(key)
                if want is None or want.intersection(loop.vertices()):
                    if len(out) >= budget:
                        raise LoopBudgetExceeded(f"more than {budget} loops")
                    out.append(loop.canonical())
        if len(moves) == max_len:
            return
        moves.append("t")
        dfs(v0, edges[v][0].target, moves)
        moves[-1] = "b"
        dfs(v0, edges[v][1].target, moves)
        moves.pop()

    for v0 in range(diagram.size):
        dfs(v0, v0, [])
    out.sort(key=lambda L: (L.length, L.base, L.moves))
    return out


def enumerate_primitive_loops(
    diagram: RauzyDiagram,
    max_len: int,
    through: Iterable[int] | None = None,
    budget: int = 1_000_000,
) -> Iterator[tuple[Loop, bool]]:
    """Stream every canonical loop of length <= max_len tagged with the
    winner-criterion primitivity of its matrix (equivalently, the Wielandt
    test; the two agree and the matrix route is what we compute)."""
    for loop in enumerate_closed_loops(diagram, max_len, through=through, budget=budget):
        yield loop, path_matrix(loop, want_perron=False).primitive


# ---------------------------------------------------------------------------
# lifting reduced paths
# ---------------------------------------------------------------------------


def lift_path(
    diagram: RauzyDiagram,
    loop_or_moves: Loop | str,
    labeled_base: LabeledPermutation,
    start_vertex: int | None = None,
) -> RauzyPath:
    """Lift a reduced path to labeled tables by replaying its move sequence.

    For a closed loop the lift may start at any vertex along it: the loop is
    rotated so its start matches the reduced class of ``labeled_base``.
    """
    if isinstance(loop_or_moves, Loop):
        loop = loop_or_moves
        base_key = labeled_base.reduce().perm
        for rotated in loop.rotations():
            if diagram.vertices[rotated.base].reduce().perm == base_key:
                return RauzyPath.from_moves(labeled_base, rotated.moves)
        raise BaseMismatchError(
            "labeled base does not sit over any vertex of the loop"
        )
    if start_vertex is not None:
        if diagram.vertices[start_vertex].reduce().perm != labeled_base.reduce().perm:
            raise BaseMismatchError("labeled base does not sit over the start vertex")
    return RauzyPath.from_moves(labeled_base, loop_or_moves)


# ---------------------------------------------------------------------------
# loop matrices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LoopMatrixReport:
    """The full integer cocycle of one closed loop."""

    loop: Loop
    lift: RauzyPath
    vhat: IntMatrix
    renumbering: Renumbering
    p_matrix: IntMatrix
    v: IntMatrix
    charpoly: IntPolynomial
    primitive: bool
    perron: PerronRoot | None

    def to_json_obj(self) -> dict:
        return {
            "loop": self.loop.to_json_obj(),
            "vhat": self.vhat.to_json_obj(),
            "p": self.p_matrix.to_json_obj(),
            "v": self.v.to_json_obj(),
            "charpoly": self.charpoly.to_json_obj(),
            "primitive": self.primitive,
            "perron": self.perron.to_json_obj() if self.perron else None,
        }


def path_matrix(
    loop: Loop,
    precision: Fraction = DEFAULT_PRECISION,
    want_perron: bool = True,
    verify_cocycle: bool = False,
) -> LoopMatrixReport:
    """Vhat from the lift based at the loop vertex's stored table, P from the
    endpoint renumbering, V = Vhat . P, with primitivity and (for primitive
    loops) a certified Perron enclosure.

    ``verify_cocycle`` re-derives Vhat as an explicit transvection product
    and insists the two routes agree entrywise.
    """
    diagram = loop.diagram
    base_perm = diagram.vertices[loop.base]
    lift = RauzyPath.from_moves(base_perm, loop.moves)
    vhat = lift.transition_matrix()
    if verify_cocycle and vhat != lift.transvection_product():
        raise AssertionError("column-addition cocycle disagrees with transvections")
    rho = lift.end_renumbering()
    if rho is None:
        raise OpenPathError(
            "loop lift does not end over its start; no renumbering closes it"
        )
    alphabet = base_perm.alphabet
    col = {c: i for i, c in enumerate(alphabet)}
    p_mat = permutation_matrix([col[rho(c)] for c in alphabet])
    v = vhat @ p_mat
    charpoly = v.charpoly()
    primitive = v.is_primitive()
    perron = None
    if primitive and want_perron:
        perron = perron_root(charpoly, precision)
    return LoopMatrixReport(
        loop, lift, vhat, rho, p_mat, v, charpoly, primitive, perron
    )


# ---------------------------------------------------------------------------
# structural-lemma verifiers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StructuralReport:
    ok: bool
    failures: tuple[str, ...]


def check_winner_persistence(loop: Loop) -> StructuralReport:
    """In the hyperelliptic diagram, after any non-self step with winner a
    the loop must also contain a step leaving the target with the same
    winner a."""
    trace = loop.edge_trace()
    failures = []
    steps_from: dict[int, set[int]] = {}
    for frm, _, w, _, _ in trace:
        steps_from.setdefault(frm, set()).add(w)
    for frm, eps, w, l, to in trace:
        if frm == to:
            continue
        if w not in steps_from.get(to, set()):
            failures.append(f"winner {w} not repeated from vertex {to}")
    return StructuralReport(not failures, tuple(failures))


def check_all_losers_lifts(
    reduced_loop: Loop,
    labeled_diagram: RauzyDiagram,
) -> StructuralReport:
    """The marked-family floor engine: a primitive loop in the reduced marked
    diagram passes through the central class; its rotation based there lifts
    (from every central table) to a path containing all letters as losers."""
    diagram = reduced_loop.diagram
    n = diagram.d - 1
    central_key = family_pi(n).reduce().perm
    rotated = None
    for cand in reduced_loop.rotations():
        if diagram.vertices[cand.base].reduce().perm == central_key:
            rotated = cand
            break
    if rotated is None:
        return StructuralReport(False, ("loop avoids the central class",))
    alphabet = frozenset(family_pi(n).alphabet)
    failures = []
    fiber = covering_fiber_indices(labeled_diagram, family_pi(n))
    if len(fiber) != n - 1:
        failures.append(f"central fiber has size {len(fiber)}, expected {n - 1}")
    for idx in fiber:
        start = labeled_diagram.vertices[idx]
        lifted = RauzyPath.from_moves(start, rotated.moves)
        if lifted.end_renumbering() is None:
            failures.append(f"lift from central vertex {idx} leaves the fiber")
            continue
        if lifted.loser_letters() != alphabet:
            missing = sorted(alphabet - lifted.loser_letters())
            failures.append(f"lift from vertex {idx} missing losers {missing}")
    return StructuralReport(not failures, tuple(failures))


@lru_cache(maxsize=None)
def _propagation_context(n: int):
    """Reference steps of the continuation lemma, precomputed per n.

    Returns (principal, secondary): principal[(eps, k)] is a triple of steps
    (trigger, continuation, mirrored-continuations); secondary[(eps, k, k')]
    is (trigger, forced continuation).  Steps are pairs of labeled tables.
    """
    base = family_pi(n)

    def power_table(start: LabeledPermutation, eps: Move, k: int) -> LabeledPermutation:
        p = start
        for _ in range(k):
            p, _, _ = p.rauzy_move(eps)
        return p

    principal = {}
    secondary = {}
    for eps in MOVES:
        o = "b" if eps == "t" else "t"
        for k in range(2, n - 1):
            prev = power_table(base, eps, k - 1)
            cur = power_table(base, eps, k)
            nxt = power_table(base, eps, k + 1)
            mirrored = []
            for i in range(n - 1):
                s = base.relabel(Renumbering.sigma_cycle(n, i))
                mirrored.append((power_table(s, o, k), power_table(s, o, k + 1)))
            principal[(eps, k)] = ((prev, cur), (cur, nxt), tuple(mirrored))
            root = power_table(base, o, k)
            for kp in range(2, n - k + 1):
                secondary[(eps, k, kp)] = (
                    (power_table(root, eps, kp - 1), power_table(root, eps, kp)),
                    (power_table(root, eps, kp), power_table(root, eps, kp + 1)),
                )
    return principal, secondary


def check_step_propagation(labeled_loop: Loop, n: int) -> StructuralReport:
    """The two-case continuation lemma for closed paths in the marked labeled
    diagram: a step along a secondary branch forces the next branch step, and
    a step along a principal branch forces its continuation in the same leaf
    or the mirrored continuation in some renumbered leaf."""
    diagram = labeled_loop.diagram
    trace = labeled_loop.edge_trace()
    contains = {
        (diagram.vertices[frm], diagram.vertices[to]) for frm, _, _, _, to in trace
    }
    principal, secondary = _propagation_context(n)
    failures = []
    for (eps, k), (trigger, continuation, mirrored) in principal.items():
        if trigger in contains and continuation not in contains:
            if not any(step in contains for step in mirrored):
                failures.append(f"case b fails at eps={eps} k={k}")
    for (eps, k, kp), (trigger, continuation) in secondary.items():
        if trigger in contains and continuation not in contains:
            failures.append(f"case a fails at eps={eps} k={k} k'={kp}")
    return StructuralReport(not failures, tuple(failures))


def check_structural_lemmas(
    loop: Loop,
    labeled_diagram: RauzyDiagram | None = None,
) -> StructuralReport:
    """Run every structural check that applies to the loop's diagram.

    Hyperelliptic-family loops get the winner-persistence clause plus, when
    primitive, the all-letters-win criterion.  Marked-family reduced loops
    additionally need the labeled diagram to check the central-passage and
    all-losers clauses; marked-family labeled loops get the step-propagation
    clause.
    """
    diagram = loop.diagram
    failures: list[str] = []
    d = diagram.d
    # Rauzy classes partition the irreducible tables, so one membership test
    # identifies the diagram: does it hold the marked family's class?
    marked_key = family_pi(d - 1).reduce().perm if d >= 3 else None
    is_marked = marked_key is not None and any(
        v.reduce().perm == marked_key for v in diagram.vertices
    )

    if not is_marked:
        report = check_winner_persistence(loop)
        failures.extend(report.failures)
        matrix_report = path_matrix(loop, want_perron=False)
        if matrix_report.primitive:
            alphabet = frozenset(diagram.vertices[loop.base].alphabet)
            if loop.winner_letters() != alphabet:
                failures.append("primitive loop misses a winner letter")
        return StructuralReport(not failures, tuple(failures))

    if diagram.mode == "reduced":
        if labeled_diagram is None:
            raise ValueError("marked reduced loops need the labeled diagram")
        if path_matrix(loop, want_perron=False).primitive:
            report = check_all_losers_lifts(loop, labeled_diagram)
            failures.extend(report.failures)
    else:
        report = check_step_propagation(loop, d - 1)
        failures.extend(report.failures)
    return StructuralReport(not failures, tuple(failures))


# ---------------------------------------------------------------------------
# systole search
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SystoleResult:
    minimum: PerronRoot
    witness: Loop
    primitive_count: int
    loop_count: int


def _root_definitely_less(a: PerronRoot, b: PerronRoot) -> bool | None:
    """True/False when the certified intervals separate the roots, None when
    they still overlap."""
    if a.hi < b.lo:
        return True
    if b.hi < a.lo:
        return False
    return None


def compare_perron_roots(a: PerronRoot, b: PerronRoot) -> int:
    """-1, 0, 1 sign of a - b, decided exactly.

    Refines both enclosures; if they keep overlapping, equality is certified
    by a common factor of the squarefree parts straddling both intervals.
    """
    for _ in range(8):
        less = _root_definitely_less(a, b)
        if less is True:
            return -1
        if less is False:
            return 1
        g = a.squarefree.gcd(b.squarefree)
        if g.degree >= 1:
            lo, hi = min(a.lo, b.lo), max(a.hi, b.hi)
            if g(lo) * g(hi) < 0:
                return 0
        a = a.refined(a.width / 1024)
        b = b.refined(b.width / 1024)
    raise RuntimeError("could not separate two algebraic numbers")


def systole_search(
    diagram: RauzyDiagram,
    max_len: int,
    precision: Fraction = DEFAULT_PRECISION,
    through: Iterable[int] | None = None,
) -> SystoleResult:
    """Minimum certified Perron root over all primitive loops of length
    <= max_len, with a deterministic witness (canonical loop order breaks
    ties)."""
    loops = enumerate_closed_loops(diagram, max_len, through=through)
    best: tuple[PerronRoot, Loop] | None = None
    primitive_count = 0
    for loop in loops:
        report = path_matrix(loop, precision)
        if not report.primitive:
            continue
        primitive_count += 1
        assert report.perron is not None
        if best is None or compare_perron_roots(report.perron, best[0]) < 0:
            best = (report.perron, loop)
    if best is None:
        raise LoopBudgetExceeded("no primitive loop found within the length budget")
    return SystoleResult(best[0], best[1], primitive_count, len(loops))
