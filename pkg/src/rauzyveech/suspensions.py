"""Suspension data over interval exchanges, the polygon model of the
associated translation surface, stratum bookkeeping, and pseudo-Anosov
certificates built from primitive loops.

A suspension datum over (pi, lambda) is a height vector tau whose partial
sums along the top row stay positive and along the bottom row stay negative;
the vectors zeta = (lambda, tau) then span a polygon between two broken
lines, which closes into a translation surface.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import mpmath as mp

from .errors import (
    CertificationFailed,
    GaussBonnetError,
    RotationMismatchError,
    SelfIntersectionError,
    TieError,
)
from .exact_linalg import (
    DEFAULT_PRECISION,
    IntMatrix,
    PerronRoot,
    eigen_residual,
    eigenvector,
    perron_root,
)
from .iet import (
    LabeledPermutation,
    Renumbering,
    family_pi,
    family_tau,
    find_renumbering,
)
from .paths import Loop, LoopMatrixReport, RauzyPath, path_matrix


# ---------------------------------------------------------------------------
# suspension data
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SuspensionDatum:
    """(pi, lambda, tau) with positive lengths; validity is checked on demand."""

    permutation: LabeledPermutation
    lam: Mapping[int, object]
    tau: Mapping[int, object]

    def __post_init__(self) -> None:
        lam = dict(self.lam)
        tau = dict(self.tau)
        alphabet = set(self.permutation.alphabet)
        if set(lam) != alphabet or set(tau) != alphabet:
            raise ValueError("lambda and tau must be keyed by the alphabet")
        if any(not v > 0 for v in lam.values()):
            raise ValueError("lambda must be strictly positive")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "tau", tau)

    @property
    def total_length(self):
        return sum(self.lam.values())


@dataclass(frozen=True)
class MarginReport:
    valid: bool
    margin: object
    top_sums: tuple
    bottom_sums: tuple
    first_violation: str | None


def validate_suspension(
    permutation: LabeledPermutation, lam: Mapping[int, object], tau: Mapping[int, object]
) -> MarginReport:
    """All 2(d-1) partial sums of tau: top prefixes must be positive, bottom
    prefixes negative.  The margin is the smallest absolute partial sum."""
    top_sums = []
    acc = 0
    for c in permutation.top[:-1]:
        acc = acc + tau[c]
        top_sums.append(acc)
    bottom_sums = []
    acc = 0
    for c in permutation.bottom[:-1]:
        acc = acc + tau[c]
        bottom_sums.append(acc)
    violation = None
    for k, s in enumerate(top_sums, start=1):
        if not s > 0:
            violation = f"top prefix sum k={k} is {s}"
            break
    if violation is None:
        for k, s in enumerate(bottom_sums, start=1):
            if not s < 0:
                violation = f"bottom prefix sum k={k} is {s}"
                break
    sums = top_sums + bottom_sums
    margin = min(abs(s) for s in sums) if sums else None
    return MarginReport(violation is None, margin, tuple(top_sums), tuple(bottom_sums), violation)


def suspension_rauzy_step(datum: SuspensionDatum) -> SuspensionDatum:
    """One induction step on suspension data: the inverse transvection
    subtracts the loser's coordinate from the winner's, in both lambda and
    tau."""
    perm = datum.permutation
    tl, bl = perm.top[-1], perm.bottom[-1]
    if datum.lam[tl] == datum.lam[bl]:
        raise TieError("equal rightmost lengths; induction undefined")
    eps = "t" if datum.lam[tl] > datum.lam[bl] else "b"
    new_perm, winner, loser = perm.rauzy_move(eps)
    lam = dict(datum.lam)
    tau = dict(datum.tau)
    lam[winner] = lam[winner] - lam[loser]
    tau[winner] = tau[winner] - tau[loser]
    return SuspensionDatum(new_perm, lam, tau)


def teich_flow(datum: SuspensionDatum, t) -> SuspensionDatum:
    """Diagonal scaling: lambda -> e^t lambda, tau -> e^-t tau."""
    if t == 0:
        return datum
    et = mp.e ** mp.mpf(t)
    inv = 1 / et
    return SuspensionDatum(
        datum.permutation,
        {c: v * et for c, v in datum.lam.items()},
        {c: v * inv for c, v in datum.tau.items()},
    )


def renormalized_step(datum: SuspensionDatum) -> SuspensionDatum:
    """Induction step followed by the diagonal scaling that restores total
    length one (so the step preserves the |Re zeta| = 1 section)."""
    stepped = suspension_rauzy_step(datum)
    s = stepped.total_length
    return SuspensionDatum(
        stepped.permutation,
        {c: v / s for c, v in stepped.lam.items()},
        {c: v * s for c, v in stepped.tau.items()},
    )


# ---------------------------------------------------------------------------
# the polygon model
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PolygonSurface:
    """The two broken lines spanned by the zeta vectors, plus side pairing."""

    permutation: LabeledPermutation
    top_chain: tuple[tuple[object, object], ...]
    bottom_chain: tuple[tuple[object, object], ...]

    @property
    def endpoint(self) -> tuple[object, object]:
        return self.top_chain[-1]

    def side(self, row: str, index: int) -> tuple[tuple, tuple]:
        chain = self.top_chain if row == "t" else self.bottom_chain
        return chain[index], chain[index + 1]

    def area(self):
        """Signed shoelace area of the closed boundary (top forward, bottom
        backward)."""
        pts = list(self.top_chain) + list(reversed(self.bottom_chain))[1:-1]
        acc = 0
        for (x1, y1), (x2, y2) in zip(pts, pts[1:] + pts[:1]):
            acc = acc + (x1 * y2 - x2 * y1)
        return acc / 2

    def to_svg(self, scale: float = 120.0) -> str:
        """Plain SVG with each glued side pair drawn in one color."""
        letters = list(self.permutation.alphabet)
        palette = [
            "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
            "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
        ]
        color = {c: palette[i % len(palette)] for i, c in enumerate(letters)}
        pts = list(self.top_chain) + list(self.bottom_chain)
        xs = [float(x) for x, _ in pts]
        ys = [float(y) for _, y in pts]
        pad = 0.2
        x0, x1 = min(xs) - pad, max(xs) + pad
        y0, y1 = min(ys) - pad, max(ys) + pad
        w = (x1 - x0) * scale
        h = (y1 - y0) * scale

        def pt(p):
            x, y = float(p[0]), float(p[1])
            return (x - x0) * scale, (y1 - y) * scale

        rows = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0f}" height="{h:.0f}" '
            f'viewBox="0 0 {w:.2f} {h:.2f}">'
        ]
        for row, chain in (("t", self.top_chain), ("b", self.bottom_chain)):
            seq = self.permutation.top if row == "t" else self.permutation.bottom
            for i, letter in enumerate(seq):
                (ax, ay), (bx, by) = pt(chain[i]), pt(chain[i + 1])
                rows.append(
                    f'<line x1="{ax:.2f}" y1="{ay:.2f}" x2="{bx:.2f}" y2="{by:.2f}" '
                    f'stroke="{color[letter]}" stroke-width="2"><title>{letter}</title></line>'
                )
        rows.append("</svg>")
        return "\n".join(rows) + "\n"


def _orient(p, q, r):
    return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])


def _segments_cross(a, b, c, d) -> bool:
    """Proper interior crossing of segments ab and cd (shared endpoints do not
    count; exact when inputs are exact)."""
    o1, o2 = _orient(a, b, c), _orient(a, b, d)
    o3, o4 = _orient(c, d, a), _orient(c, d, b)
    if o1 == 0 and o2 == 0:
        return False  # collinear overlaps don't occur for valid data
    sign = lambda x: (x > 0) - (x < 0)  # noqa: E731
    return (
        sign(o1) * sign(o2) < 0
        and sign(o3) * sign(o4) < 0
    )


def build_polygon(
    permutation: LabeledPermutation,
    lam: Mapping[int, object],
    tau: Mapping[int, object],
) -> PolygonSurface:
    """Concatenate the zeta vectors in top and in bottom order; both chains
    must share start and endpoint, and must not cross each other."""
    def chain(row: Sequence[int]):
        pts = [(0 * next(iter(lam.values())), 0 * next(iter(lam.values())))]
        for c in row:
            x, y = pts[-1]
            pts.append((x + lam[c], y + tau[c]))
        return tuple(pts)

    top_chain = chain(permutation.top)
    bottom_chain = chain(permutation.bottom)
    ex = top_chain[-1][0] - bottom_chain[-1][0]
    ey = top_chain[-1][1] - bottom_chain[-1][1]
    scale = abs(top_chain[-1][0]) + abs(top_chain[-1][1])
    tol = scale * (0 if isinstance(ex, (int, Fraction)) else 64 * mp.eps)
    if abs(ex) > tol or abs(ey) > tol:
        raise ValueError("broken lines do not share their endpoint")
    # snap the shared endpoint so the crossing test sees it as one point
    # (inexact arithmetic leaves the two sums a rounding error apart)
    bottom_chain = bottom_chain[:-1] + (top_chain[-1],)
    for i in range(len(permutation.top)):
        a, b = top_chain[i], top_chain[i + 1]
        for j in range(len(permutation.bottom)):
            c, dd = bottom_chain[j], bottom_chain[j + 1]
            if _segments_cross(a, b, c, dd):
                raise SelfIntersectionError(
                    "broken lines intersect; requires zippered rectangles"
                )
    return PolygonSurface(permutation, top_chain, bottom_chain)


# ---------------------------------------------------------------------------
# strata
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StratumSignature:
    """Zero orders (0 entries are regular marked points), genus, and flags."""

    orders: tuple[int, ...]
    genus: int
    hyperelliptic_family: str | None  # 'tau', 'pi', or None
    h: int
    left_corner_order: int

    @property
    def zero_count(self) -> int:
        return len(self.orders)


def _vertex_classes(permutation: LabeledPermutation) -> tuple[list[list[int]], int]:
    """Identification classes of polygon boundary vertices, reported as the
    groups of interior top gaps 1..d-1, plus the index of the class holding
    the left corner.

    The walk is pure bookkeeping on the table: gluing the top side carrying
    letter c to its bottom side identifies matching endpoints, so we unite
    top gap j with bottom gap pi_b(c) (right ends) and top gap j-1 with
    bottom gap pi_b(c)-1 (left ends), plus the two shared corners.  Each
    singularity owns one downward vertical separatrix per 2 pi of cone angle,
    and those separatrices are exactly the interior top gaps, so the order of
    a class is its gap count minus one.
    """
    d = permutation.d
    parent: dict = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    union(("t", 0), ("b", 0))
    union(("t", d), ("b", d))
    for j in range(1, d + 1):
        c = permutation.top[j - 1]
        k = permutation.bottom_position(c)
        union(("t", j), ("b", k))
        union(("t", j - 1), ("b", k - 1))
    groups: dict = {}
    for j in range(1, d):
        groups.setdefault(find(("t", j)), []).append(j)
    left = find(("t", 0))
    classes = list(groups.values())
    left_index = None
    for i, root in enumerate(groups):
        if root == left:
            left_index = i
    if left_index is None:
        raise RuntimeError("left corner class carries no vertical separatrix")
    return classes, left_index


def stratum_signature(permutation: LabeledPermutation) -> StratumSignature:
    """Singularity data of the suspended surface, from the table alone."""
    classes, left_index = _vertex_classes(permutation)
    orders = tuple(sorted((len(c) - 1 for c in classes), reverse=True))
    total = sum(orders)
    if total % 2:
        raise GaussBonnetError(f"orders {orders} sum to odd number {total}")
    genus = (total + 2) // 2
    d = permutation.d
    family = None
    if find_renumbering(permutation, family_tau(d)) is not None:
        family = "tau"
    elif d >= 3 and find_renumbering(permutation, family_pi(d - 1)) is not None:
        family = "pi"
    left_order = len(classes[left_index]) - 1
    return StratumSignature(orders, genus, family, 2 * genus + len(orders) - 1, left_order)


def spin_parity(orders: Sequence[int]) -> int:
    """Parity of the spin structure of the orientation double cover of a
    sphere quadratic differential: floor(|n_{+1} - n_{-1}| / 4) mod 2, where
    n_{+1}, n_{-1} count orders congruent to +1, -1 mod 4."""
    if sum(orders) != -4:
        raise GaussBonnetError(f"sphere orders must sum to -4, got {sum(orders)}")
    n_plus = sum(1 for k in orders if k % 4 == 1)
    n_minus = sum(1 for k in orders if k % 4 == 3)
    return (abs(n_plus - n_minus) // 4) % 2


# ---------------------------------------------------------------------------
# pseudo-Anosov certificates
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PseudoAnosovCertificate:
    """A loop, its certified dilatation, eigen-data that validates as a
    suspension, and the residuals of the full round trip."""

    loop_report: LoopMatrixReport
    dilatation: PerronRoot
    permutation: LabeledPermutation
    lam: tuple
    tau: tuple
    tau_sign_flipped: bool
    fixed_separatrix: str  # 'singular' or 'regular-marked'
    suspension_margin: float
    eigen_residuals: tuple[float, float]
    orbit_residual: float

    def to_json_obj(self) -> dict:
        lr = self.loop_report
        return {
            "loop": lr.loop.to_json_obj(),
            "matrix": lr.v.to_json_obj(),
            "charpoly": lr.charpoly.to_json_obj(),
            "dilatation": {
                "value": self.dilatation.value,
                "lo": f"{self.dilatation.lo.numerator}/{self.dilatation.lo.denominator}",
                "hi": f"{self.dilatation.hi.numerator}/{self.dilatation.hi.denominator}",
            },
            "lambda": [mp.nstr(v, 17) for v in self.lam],
            "tau": [mp.nstr(v, 17) for v in self.tau],
            "kind": self.fixed_separatrix,
            "residuals": {
                "eigen_lambda": self.eigen_residuals[0],
                "eigen_tau": self.eigen_residuals[1],
                "orbit": self.orbit_residual,
                "suspension_margin": self.suspension_margin,
                "tau_sign_flipped": self.tau_sign_flipped,
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), indent=2)


def _signed_tau(matrix: IntMatrix, theta, perm: LabeledPermutation, alphabet):
    """theta^{-1}-eigenvector with the sign that validates the suspension
    inequalities; the paper states conflicting sign conventions, so validity
    is the operational criterion."""
    raw = eigenvector(matrix, 1 / theta)
    tau_map = dict(zip(alphabet, raw))
    report = validate_suspension(perm, {c: 1 for c in alphabet}, tau_map)
    if report.valid:
        return raw, False, report
    flipped = tuple(-v for v in raw)
    report2 = validate_suspension(perm, {c: 1 for c in alphabet}, dict(zip(alphabet, flipped)))
    if report2.valid:
        return flipped, True, report2
    raise CertificationFailed(
        f"neither sign of tau validates: {report.first_violation} / {report2.first_violation}"
    )


def veech_pa_from_loop(
    loop: Loop,
    precision: Fraction = DEFAULT_PRECISION,
) -> PseudoAnosovCertificate:
    """Run the loop-to-pseudo-Anosov construction and certify it end to end.

    Checks performed: the loop matrix is primitive; lambda is a positive
    Perron vector and tau a theta^{-1}-eigenvector validating the suspension
    inequalities; iterating the suspension induction along the loop returns
    (pi, theta^{-1} lambda, theta tau) after the endpoint renumbering.
    """
    report = path_matrix(loop, precision)
    if not report.primitive:
        raise CertificationFailed("loop matrix is not primitive")
    assert report.perron is not None
    theta_root = report.perron
    digits = max(30, 2 * _precision_digits(precision))
    with mp.workdps(digits):
        theta = theta_root.mpf(digits)
        base_perm = report.lift.start
        alphabet = base_perm.alphabet
        lam = eigenvector(report.v, theta, sign="positive")
        tau_vec, flipped, _ = _signed_tau(report.v, theta, base_perm, alphabet)
        res_l = eigen_residual(report.v, theta, lam)
        res_t = eigen_residual(report.v, 1 / theta, tau_vec)
        datum = SuspensionDatum(
            base_perm, dict(zip(alphabet, lam)), dict(zip(alphabet, tau_vec))
        )
        margin = validate_suspension(base_perm, datum.lam, datum.tau)
        if not margin.valid:
            raise CertificationFailed(f"suspension invalid: {margin.first_violation}")
        orbit_residual = _loop_orbit_residual(
            datum, loop.moves, report.renumbering, theta, lam, tau_vec, alphabet
        )
        tol = float(precision)
        if orbit_residual > tol:
            raise CertificationFailed(
                f"loop orbit residual {orbit_residual} exceeds {tol}"
            )
        signature = stratum_signature(base_perm)
        kind = "regular-marked" if signature.left_corner_order == 0 else "singular"
        return PseudoAnosovCertificate(
            report,
            theta_root,
            base_perm,
            tuple(lam),
            tuple(tau_vec),
            flipped,
            kind,
            float(margin.margin),
            (res_l, res_t),
            orbit_residual,
        )


def _precision_digits(precision: Fraction) -> int:
    import math

    return max(1, int(-math.log10(float(precision))) + 1)


def _loop_orbit_residual(
    datum: SuspensionDatum,
    moves: str,
    rho: Renumbering,
    theta,
    lam: Sequence,
    tau_vec: Sequence,
    alphabet: Sequence[int],
) -> float:
    """Iterate the suspension induction along the loop; after pulling back by
    the endpoint renumbering the data must equal (theta^-1 lambda, theta tau)."""
    current = datum
    for eps_planned in moves:
        perm = current.permutation
        tl, bl = perm.top[-1], perm.bottom[-1]
        eps_dynamic = "t" if current.lam[tl] > current.lam[bl] else "b"
        if eps_dynamic != eps_planned:
            raise CertificationFailed(
                "dynamical induction type diverged from the loop's move sequence"
            )
        current = suspension_rauzy_step(current)
    rho_inv = rho.inverse()
    scale = max(abs(v) for v in lam)
    worst = mp.mpf(0)
    for i, c in enumerate(alphabet):
        pulled_l = current.lam[rho_inv(c)]
        pulled_t = current.tau[rho_inv(c)]
        worst = max(worst, abs(pulled_l - lam[i] / theta) / scale)
        worst = max(worst, abs(pulled_t - tau_vec[i] * theta) / scale)
    return float(worst)


# ---------------------------------------------------------------------------
# the rotation-closure construction of the appendix families
# ---------------------------------------------------------------------------


def reversed_companion(perm: LabeledPermutation) -> LabeledPermutation:
    """Rows reversed and swapped: the table of the 180-degree rotated polygon."""
    return LabeledPermutation(
        tuple(reversed(perm.bottom)), tuple(reversed(perm.top))
    )


@dataclass(frozen=True)
class RotationClosureCertificate:
    path: RauzyPath
    matrix: IntMatrix
    dilatation: PerronRoot
    lam: tuple
    tau: tuple
    suspension_margins: tuple[float, float]
    rotation_residual: float

    def to_json_obj(self) -> dict:
        return {
            "moves": self.path.moves,
            "matrix": self.matrix.to_json_obj(),
            "dilatation": self.dilatation.to_json_obj(),
            "lambda": [mp.nstr(v, 17) for v in self.lam],
            "tau": [mp.nstr(v, 17) for v in self.tau],
            "margins": list(self.suspension_margins),
            "rotation_residual": self.rotation_residual,
        }


def rotation_closure_pa(
    perm: LabeledPermutation,
    perm_prime: LabeledPermutation,
    moves: str,
    precision: Fraction = DEFAULT_PRECISION,
    rotation: str = "half-turn",
) -> RotationClosureCertificate:
    """Certify the appendix construction: a path from the reversed companion
    perm_prime back to a renumbering of perm, whose eigen-data suspends both
    tables, with the two polygons identified by a 180-degree rotation.

    ``rotation='identity'`` runs the control comparison without rotating and
    is expected to fail with RotationMismatchError.
    """
    if reversed_companion(perm) != perm_prime:
        raise ValueError("perm_prime must be the row-reversed companion of perm")
    path = RauzyPath.from_moves(perm_prime, moves)
    rho = find_renumbering(path.end, perm)
    if rho is None:
        raise RotationMismatchError("path endpoint is not a renumbering of perm")
    vhat = path.transition_matrix()
    alphabet = perm.alphabet
    col = {c: i for i, c in enumerate(alphabet)}
    from .exact_linalg import permutation_matrix

    p_mat = permutation_matrix([col[rho(c)] for c in alphabet])
    matrix = vhat @ p_mat
    theta_root = perron_root(matrix, precision)
    digits = max(30, 2 * _precision_digits(precision))
    with mp.workdps(digits):
        theta = theta_root.mpf(digits)
        lam = eigenvector(matrix, theta, sign="positive")
        tau_vec, _, _ = _signed_tau(matrix, theta, perm, alphabet)
        lam_map = dict(zip(alphabet, lam))
        tau_map = dict(zip(alphabet, tau_vec))
        m1 = validate_suspension(perm, lam_map, tau_map)
        m2 = validate_suspension(perm_prime, lam_map, tau_map)
        if not (m1.valid and m2.valid):
            raise CertificationFailed("eigen-data does not suspend both tables")
        poly1 = build_polygon(perm, lam_map, tau_map)
        poly2 = build_polygon(perm_prime, lam_map, tau_map)
        residual = _rotation_residual(poly1, poly2, rotation)
        tol = float(precision) ** 0.5  # geometric comparison at half the digits
        if residual > tol:
            raise RotationMismatchError(
                f"polygon chains differ by {residual} under {rotation}"
            )
        return RotationClosureCertificate(
            path,
            matrix,
            theta_root,
            tuple(lam),
            tuple(tau_vec),
            (float(m1.margin), float(m2.margin)),
            residual,
        )


def _rotation_residual(poly1: PolygonSurface, poly2: PolygonSurface, rotation: str) -> float:
    """Sup distance between poly2's chains and the rotated image of poly1's.

    The half turn about the midpoint of (0, endpoint) sends z to E - z, so the
    rotated top chain of poly1 must retrace poly2's bottom chain and vice
    versa."""
    ex, ey = poly1.endpoint
    if rotation == "half-turn":
        transform = lambda p: (ex - p[0], ey - p[1])  # noqa: E731
        image_top = tuple(transform(p) for p in reversed(poly1.bottom_chain))
        image_bottom = tuple(transform(p) for p in reversed(poly1.top_chain))
    elif rotation == "identity":
        image_top = poly1.top_chain
        image_bottom = poly1.bottom_chain
    else:
        raise ValueError(f"unknown rotation {rotation!r}")
    worst = mp.mpf(0)
    scale = abs(ex) + abs(ey)
    for chain, image in ((poly2.top_chain, image_top), (poly2.bottom_chain, image_bottom)):
        if len(chain) != len(image):
            return float("inf")
        for (x1, y1), (x2, y2) in zip(chain, image):
            worst = max(worst, abs(x1 - x2) + abs(y1 - y2))
    return float(worst / scale)
