"""The closed-form example families: their matrices, generating induction
paths, exact polynomial identities, and certified dilatation bounds.

Each family comes with a polynomial identity that acts as a checksum for the
matrix templates; wherever the printed block pictures are ambiguous the
expansion below is the one that satisfies the identity exactly (see the
inline notes).
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import EndpointMismatchError
from .exact_linalg import (
    DEFAULT_PRECISION,
    IntMatrix,
    IntPolynomial,
    PerronRoot,
    permutation_matrix,
    perron_root,
    sqrt2_bounds,
)
from .iet import (
    LabeledPermutation,
    Renumbering,
    family_genperm_odd,
    find_renumbering,
)
from .paths import RauzyPath
from .suspensions import reversed_companion

WHICH = ("A1", "A2-even", "A2-odd", "B")


@dataclass(frozen=True)
class FamilySpec:
    which: str
    g: int

    def __post_init__(self) -> None:
        if self.which not in WHICH:
            raise ValueError(f"unknown family {self.which!r}")
        if self.which == "A1" and self.g < 2:
            raise ValueError("A1 needs g >= 2")
        if self.which == "A2-even" and (self.g < 2 or self.g % 2):
            raise ValueError("A2-even needs even g >= 2")
        if self.which == "A2-odd" and (self.g < 3 or self.g % 2 == 0):
            raise ValueError("A2-odd needs odd g >= 3")
        if self.which == "B" and (self.g < 3 or self.g % 2 == 0):
            raise ValueError("B needs odd g >= 3")


# ---------------------------------------------------------------------------
# permutations and paths
# ---------------------------------------------------------------------------


def single_zero_table(g: int) -> LabeledPermutation:
    """The one-zero family table on letters 1..2g (top row is the identity)."""
    top = tuple(range(1, 2 * g + 1))
    bottom = (2 * g,) + tuple(range(g, 0, -1)) + tuple(range(2 * g - 1, g, -1))
    return LabeledPermutation(top, bottom)


def double_zero_table(g: int) -> LabeledPermutation:
    """The two-zero family table on letters 1..2g+1."""
    top = tuple(range(1, 2 * g + 2))
    bottom = (
        (2 * g + 1,) + tuple(range(g + 1, 0, -1)) + tuple(range(2 * g, g + 1, -1))
    )
    return LabeledPermutation(top, bottom)


def family_moves(spec: FamilySpec) -> str:
    if spec.which == "A1":
        return "b" * spec.g + "t"
    if spec.which == "A2-even":
        return "b" * (spec.g + 1) + "tt"
    if spec.which == "A2-odd":
        return "b" * spec.g + "tbtt"
    return "tbtbtb"


@dataclass(frozen=True)
class FamilyPathResult:
    spec: FamilySpec
    moves: str
    winners: tuple[int, ...]
    losers: tuple[int, ...]
    vhat: IntMatrix
    renumbering: Renumbering
    p_matrix: IntMatrix
    v: IntMatrix
    start: object
    end: object


def _close_with_renumbering(alphabet, vhat: IntMatrix, rho: Renumbering) -> tuple[IntMatrix, IntMatrix]:
    col = {c: i for i, c in enumerate(alphabet)}
    p_mat = permutation_matrix([col[rho(c)] for c in alphabet])
    return p_mat, vhat @ p_mat


def family_path(spec: FamilySpec) -> FamilyPathResult:
    """Replay the family's induction path and close its cocycle.

    The path starts at the row-reversed companion table (families A) or at
    the sphere generalized permutation (family B) and must end at a
    renumbering of its target table.
    """
    moves = family_moves(spec)
    if spec.which == "B":
        start = family_genperm_odd(spec.g)
        d = 2 * spec.g + 1
        rows = [[1 if i == j else 0 for j in range(d)] for i in range(d)]
        winners: list[int] = []
        losers: list[int] = []
        cur = start
        for eps in moves:
            cur, w, l = cur.rauzy_move(eps)
            winners.append(w)
            losers.append(l)
            a, b = w - 1, l - 1
            for r in range(d):
                rows[r][b] += rows[r][a]
        vhat = IntMatrix.from_rows(rows)
        rho_map: dict[int, int] = {}
        for row_e, row_s in zip(cur.rows(), start.rows()):
            if len(row_e) != len(row_s):
                raise EndpointMismatchError("row lengths changed over the loop")
            for a, b in zip(row_e, row_s):
                if rho_map.setdefault(a, b) != b:
                    raise EndpointMismatchError(
                        "endpoint is not a renumbering of the generalized permutation"
                    )
        rho = Renumbering(rho_map)
        p_mat, v = _close_with_renumbering(start.alphabet, vhat, rho)
        return FamilyPathResult(
            spec, moves, tuple(winners), tuple(losers), vhat, rho, p_mat, v, start, cur
        )

    target = single_zero_table(spec.g) if spec.which == "A1" else double_zero_table(spec.g)
    start = reversed_companion(target)
    path = RauzyPath.from_moves(start, moves)
    rho = find_renumbering(path.end, target)
    if rho is None:
        raise EndpointMismatchError("path endpoint is not a renumbering of the target")
    vhat = path.transition_matrix()
    p_mat, v = _close_with_renumbering(target.alphabet, vhat, rho)
    return FamilyPathResult(
        spec, moves, path.winners, path.losers, vhat, rho, p_mat, v, start, path.end
    )


# ---------------------------------------------------------------------------
# matrix templates
# ---------------------------------------------------------------------------


def matrix_A1(g: int) -> IntMatrix:
    """2g x 2g block template of the one-zero family.

    The printed itemized rules mix i and j in the third bullet; the block
    picture (and the checksum (X+1) chi = X^{2g+1} - 2X^{2g-1} - 2X^2 + 1)
    pin the intended reading: rows g+1..2g-1 carry the identity block in
    columns 1..g-1.
    """
    d = 2 * g
    rows = [[0] * d for _ in range(d)]
    rows[0][g - 1] = 2
    for j in range(g + 1, 2 * g + 1):
        rows[0][j - 1] = 1
    for i in range(2, g + 1):
        rows[i - 1][i + g - 2] = 1
    for i in range(g + 1, 2 * g):
        rows[i - 1][i - g - 1] = 1
    rows[d - 1][g - 1] = 1
    rows[d - 1][d - 1] = 1
    return IntMatrix.from_rows(rows)


def matrix_A2_even(g: int) -> IntMatrix:
    """(2g+1) x (2g+1) template of the two-zero family, even path."""
    d = 2 * g + 1
    rows = [[0] * d for _ in range(d)]
    rows[0][g - 1] = 2
    rows[0][g] = 2
    for j in range(g + 2, 2 * g + 1):
        rows[0][j - 1] = 1
    rows[0][d - 1] = 1
    for i in range(2, g + 2):
        rows[i - 1][g + i - 2] = 1
    for i in range(1, g):
        rows[g + i][i - 1] = 1
    rows[d - 1][g - 1] = 1
    rows[d - 1][g] = 1
    rows[d - 1][d - 1] = 1
    return IntMatrix.from_rows(rows)


def matrix_B_vhat(g: int) -> IntMatrix:
    """The sphere family's labeled renormalization matrix.

    The printed schematic elides most rows and carries one misprint: the
    checksum charpoly identity forces entry (g+1, 2g+1) to be 1, not 2.
    """
    d = 2 * g + 1
    rows = [[0] * d for _ in range(d)]
    rows[0][0] = 2
    rows[0][d - 1] = 1
    for i in range(2, g + 1):
        rows[i - 1][i - 1] = 1
    rows[g][0] = 2
    rows[g][g] = 1
    rows[g][g + 1] = 1
    rows[g][d - 1] = 1
    rows[g + 1][g] = 1
    rows[g + 1][g + 1] = 2
    for i in range(g + 3, 2 * g + 1):
        rows[i - 1][i - 1] = 1
    rows[d - 1][0] = 1
    rows[d - 1][g] = 1
    rows[d - 1][d - 1] = 1
    return IntMatrix.from_rows(rows)


def matrix_B_p(g: int) -> IntMatrix:
    """Cyclic renumbering matrix: the last coordinate wraps to the first."""
    d = 2 * g + 1
    return permutation_matrix([(i + 1) % d for i in range(d)])


def matrix_family(spec: FamilySpec):
    """The family matrix; for B the pair (vhat, p) is returned alongside v."""
    if spec.which == "A1":
        return matrix_A1(spec.g)
    if spec.which == "A2-even":
        return matrix_A2_even(spec.g)
    if spec.which == "A2-odd":
        # no printed template exists; the path is the definition
        return family_path(spec).v
    vhat = matrix_B_vhat(spec.g)
    p = matrix_B_p(spec.g)
    return vhat, p, vhat @ p


# ---------------------------------------------------------------------------
# polynomial identities
# ---------------------------------------------------------------------------


def target_polynomial(spec: FamilySpec) -> IntPolynomial:
    """The paper's closed form, including its cyclotomic cofactor."""
    g = spec.g
    if spec.which == "A1":
        coeffs = [0] * (2 * g + 2)
        coeffs[0], coeffs[2], coeffs[2 * g - 1], coeffs[2 * g + 1] = 1, -2, -2, 1
        return IntPolynomial(tuple(coeffs))
    if spec.which == "A2-even":
        coeffs = [0] * (2 * g + 3)
        coeffs[0], coeffs[2], coeffs[g + 1], coeffs[2 * g], coeffs[2 * g + 2] = (
            1, -2, -2, -2, 1,
        )
        return IntPolynomial(tuple(coeffs))
    if spec.which == "A2-odd":
        coeffs = [0] * (2 * g + 3)
        coeffs[0], coeffs[2], coeffs[g], coeffs[g + 2], coeffs[2 * g], coeffs[2 * g + 2] = (
            -1, 2, 4, -4, -2, 1,
        )
        return IntPolynomial(tuple(coeffs))
    core = [0] * (2 * g + 1)
    core[0], core[1], core[g], core[2 * g - 1], core[2 * g] = 1, -1, -4, -1, 1
    return IntPolynomial((-1, 1)) * IntPolynomial(tuple(core))


def dilatation_polynomial(spec: FamilySpec) -> IntPolynomial:
    """The factor actually carrying the dilatation (cofactor divided out)."""
    target = target_polynomial(spec)
    if spec.which == "B":
        return target.divide_exact(IntPolynomial((-1, 1)))
    return target  # the (X+1) cofactor does not move the Perron root


def family_matrix_v(spec: FamilySpec) -> IntMatrix:
    m = matrix_family(spec)
    return m[2] if isinstance(m, tuple) else m


def verify_polynomial_identity(spec: FamilySpec) -> bool:
    """Exact coefficientwise comparison of the closed form with the charpoly
    of the template matrix (times the stated cofactor)."""
    v = family_matrix_v(spec)
    chi = v.charpoly()
    if spec.which == "B":
        return chi == target_polynomial(spec)
    return IntPolynomial((1, 1)) * chi == target_polynomial(spec)


# ---------------------------------------------------------------------------
# certified bounds
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundReport:
    spec: FamilySpec
    theta: PerronRoot
    target: str
    margin: float
    passed: bool

    def to_json_obj(self) -> dict:
        return {
            "which": self.spec.which,
            "g": self.spec.g,
            "theta": self.theta.to_json_obj(),
            "target": self.target,
            "margin": self.margin,
            "pass": self.passed,
        }


def _exceeds_sqrt2(x: Fraction) -> bool:
    return x > 0 and x * x > 2


def _below_sqrt2(x: Fraction) -> bool:
    return x <= 0 or x * x < 2


def certify_sqrt2_window(
    theta: PerronRoot, upper_gap: Fraction, require_margin_factor: int = 10
) -> tuple[PerronRoot, float, bool]:
    """Certify sqrt(2) < theta < sqrt(2) + upper_gap with margin at least
    require_margin_factor times the enclosure width, refining as needed."""
    for _ in range(6):
        lower_ok = _exceeds_sqrt2(theta.lo)
        upper_ok = _below_sqrt2(theta.hi - upper_gap)
        s2lo, s2hi = sqrt2_bounds(40)
        margin = min(theta.lo - s2lo, (s2hi + upper_gap) - theta.hi)
        if lower_ok and upper_ok and margin >= require_margin_factor * theta.width:
            return theta, float(margin), True
        theta = theta.refined(theta.width / 2**10)
    return theta, float(margin), False


def verify_bounds(
    spec: FamilySpec, precision: Fraction = DEFAULT_PRECISION
) -> BoundReport:
    """Certify the family's dilatation window at the given precision.

    A1: 0 < theta - sqrt(2) < 2^(1-g); A2: 0 < theta - sqrt(2) < 4/sqrt(2)^g;
    B: 1 < theta, with the sequence facts (decrease, limit) handled by the
    suite since they compare different g.
    """
    theta = perron_root(dilatation_polynomial(spec), precision)
    if spec.which == "A1":
        gap = Fraction(2) ** (1 - spec.g)
        theta, margin, ok = certify_sqrt2_window(theta, gap)
        return BoundReport(spec, theta, f"sqrt2 < theta < sqrt2 + 2^(1-{spec.g})", margin, ok)
    if spec.which in ("A2-even", "A2-odd"):
        # 4 / sqrt(2)^g = 2^(2 - g/2); use the exact square comparison
        if spec.g % 2 == 0:
            gap = Fraction(2) ** (2 - spec.g // 2)
        else:
            # rational lower bound of 4/sqrt(2)^g: certifying the smaller
            # window implies the claimed one
            _, s2hi = sqrt2_bounds(40)
            gap = 4 / s2hi**spec.g
        theta, margin, ok = certify_sqrt2_window(theta, gap)
        return BoundReport(spec, theta, f"sqrt2 < theta < sqrt2 + 4/sqrt2^{spec.g}", margin, ok)
    margin = float(theta.lo - 1)
    ok = theta.lo > 1
    return BoundReport(spec, theta, "1 < theta (sequence facts in suite)", margin, ok)


# ---------------------------------------------------------------------------
# the per-family verification suite
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FamilyCase:
    g: int
    identity: bool
    path_match: bool
    primitive: bool
    bounds: BoundReport

    def ok(self) -> bool:
        return self.identity and self.path_match and self.primitive and self.bounds.passed


def _case_for(args: tuple[str, int, Fraction]) -> FamilyCase:
    which, g, precision = args
    spec = FamilySpec(which, g)
    identity = verify_polynomial_identity(spec)
    template = family_matrix_v(spec)
    path = family_path(spec)
    path_match = path.v == template
    if which == "A1":
        expected_wl = [(1, 2 * g)] + [(1, j) for j in range(g, 1, -1)] + [(2 * g, 1)]
        path_match = path_match and list(zip(path.winners, path.losers)) == expected_wl
    primitive = template.is_primitive()
    bounds = verify_bounds(spec, precision)
    return FamilyCase(g, identity, path_match, primitive, bounds)


def spec_range(which: str, g_range: Iterable[int]) -> list[int]:
    if which == "A1":
        return [g for g in g_range if g >= 2]
    if which == "A2-even":
        return [g for g in g_range if g >= 2 and g % 2 == 0]
    if which in ("A2-odd", "B"):
        return [g for g in g_range if g >= 3 and g % 2 == 1]
    raise ValueError(which)


def run_family_suite(
    which: str,
    g_range: Sequence[int],
    precision: Fraction = DEFAULT_PRECISION,
    jobs: int | None = None,
) -> dict:
    """Run identity/path/bounds checks for every g; independent g values may
    run in parallel processes (RAUZY_THREADS caps the worker count)."""
    if which in ("A2",):
        gs = [("A2-even" if g % 2 == 0 else "A2-odd", g) for g in g_range if g >= 2]
        gs = [(w, g) for (w, g) in gs if not (w == "A2-odd" and g < 3)]
    else:
        gs = [(which, g) for g in spec_range(which, g_range)]
    if not gs:
        raise ValueError(f"g range {list(g_range)} holds no valid genus for {which}")
    jobs = jobs or int(os.environ.get("RAUZY_THREADS", "1"))
    args = [(w, g, precision) for w, g in gs]
    if jobs > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            cases = list(pool.map(_case_for, args))
    else:
        cases = [_case_for(a) for a in args]
    cases.sort(key=lambda c: c.g)

    extra: dict = {}
    if which == "B":
        thetas = [(c.g, c.bounds.theta) for c in cases]
        decreasing = all(
            _strictly_less(t2, t1) for (_, t1), (_, t2) in zip(thetas, thetas[1:])
        )
        extra["strictly_decreasing"] = decreasing
        # informational only: the stated 1 + 1/g comparison is not a family fact
        extra["exceeds_1_plus_1_over_g"] = {
            g: bool(t.lo > 1 + Fraction(1, g)) for g, t in thetas
        }
        if thetas:
            extra["last_theta_below_1.2"] = thetas[-1][1].hi < Fraction(12, 10)

    payload = {
        "suite": which,
        "precision": float(precision),
        "cases": [
            {
                "g": c.g,
                "identity": "pass" if c.identity else "fail",
                "path_match": "pass" if c.path_match else "fail",
                "primitive": "pass" if c.primitive else "fail",
                "bounds": {
                    "theta": c.bounds.theta.value,
                    "target": c.bounds.target,
                    "margin": c.bounds.margin,
                    "pass": c.bounds.passed,
                },
            }
            for c in cases
        ],
        **extra,
    }
    all_ok = all(c.ok() for c in cases)
    if which == "B":
        all_ok = all_ok and extra.get("strictly_decreasing", False)
    payload["summary"] = {"cases": len(cases), "all_pass": all_ok}
    return payload


def _strictly_less(a: PerronRoot, b: PerronRoot) -> bool:
    while not (a.hi < b.lo or b.hi < a.lo):
        a = a.refined(a.width / 1024)
        b = b.refined(b.width / 1024)
    return a.hi < b.lo


def suite_to_json(payload: dict) -> str:
    return json.dumps(payload, indent=2)
