"""Exact integer matrices, characteristic polynomials, and certified real
root isolation.

Everything here is arbitrary precision: matrix entries and polynomial
coefficients are Python ints, interval endpoints are Fractions, so the
certificates produced (sign changes, isolating intervals) are exact
statements rather than floating-point estimates.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath as mp

from .errors import IllConditionedError, NegativeEntryError, NoRootAboveOne

DEFAULT_PRECISION = Fraction(1, 10**12)


# ---------------------------------------------------------------------------
# matrices
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class IntMatrix:
    """Immutable square matrix with integer entries."""

    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        rows = tuple(tuple(int(x) for x in r) for r in self.rows)
        if any(len(r) != len(rows) for r in rows):
            raise ValueError("matrix must be square")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def identity(cls, d: int) -> "IntMatrix":
        return cls(tuple(tuple(1 if i == j else 0 for j in range(d)) for i in range(d)))

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int]]) -> "IntMatrix":
        return cls(tuple(tuple(r) for r in rows))

    @property
    def d(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.rows[i][j]

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        d = self.d
        if other.d != d:
            raise ValueError("dimension mismatch")
        ot = tuple(zip(*other.rows))
        return IntMatrix(
            tuple(
                tuple(sum(a * b for a, b in zip(row, col)) for col in ot)
                for row in self.rows
            )
        )

    def transpose(self) -> "IntMatrix":
        return IntMatrix(tuple(zip(*self.rows)))

    def is_nonnegative(self) -> bool:
        return all(x >= 0 for row in self.rows for x in row)

    def det(self) -> int:
        """Fraction-free Bareiss elimination; exact."""
        d = self.d
        a = [list(r) for r in self.rows]
        sign = 1
        prev = 1
        for k in range(d - 1):
            if a[k][k] == 0:
                for i in range(k + 1, d):
                    if a[i][k]:
                        a[k], a[i] = a[i], a[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, d):
                for j in range(k + 1, d):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            prev = a[k][k]
        return sign * a[-1][-1]

    def charpoly(self) -> "IntPolynomial":
        """det(X I - M) by the division-free Samuelson-Berkowitz scheme."""
        n = self.d
        m = self.rows
        coeffs = [1, -m[0][0]]  # high -> low degree, grows each step
        for i in range(1, n):
            pivot = m[i][i]
            row = m[i][:i]
            col = [m[k][i] for k in range(i)]
            block = [r[:i] for r in m[:i]]
            scalars = []
            v = list(col)
            for _ in range(i):
                scalars.append(sum(row[j] * v[j] for j in range(i)))
                v = [sum(block[r][c] * v[c] for c in range(i)) for r in range(i)]
            toeplitz_col = [1, -pivot] + [-s for s in scalars]
            out = [0] * (i + 2)
            for r in range(i + 2):
                acc = 0
                for c in range(i + 1):
                    k = r - c
                    if 0 <= k < len(toeplitz_col):
                        acc += toeplitz_col[k] * coeffs[c]
                out[r] = acc
            coeffs = out
        return IntPolynomial(tuple(reversed(coeffs)))

    def is_primitive(self) -> bool:
        """Some power is entrywise positive.

        Tested over the boolean (reachability) semiring at the Wielandt
        exponent (d-1)^2 + 1, which bounds the exponent of every primitive
        matrix; exact big-integer powers are never formed.
        """
        if not self.is_nonnegative():
            raise NegativeEntryError("primitivity is defined for nonnegative matrices")
        d = self.d
        if d == 1:
            return self.rows[0][0] > 0
        # bitmask rows: bit j of row i set iff entry (i, j) nonzero
        cur = [sum(1 << j for j in range(d) if self.rows[i][j]) for i in range(d)]
        full = (1 << d) - 1
        target = (d - 1) ** 2 + 1
        e = 1
        while e < target:
            cur = [
                _bool_row_mul(cur, cur[i], d)
                for i in range(d)
            ]
            e *= 2
        return all(r == full for r in cur)

    def row_sums(self) -> tuple[int, ...]:
        return tuple(sum(r) for r in self.rows)

    def column_sums(self) -> tuple[int, ...]:
        return tuple(sum(c) for c in zip(*self.rows))

    # -- external interface: row-major decimal strings --

    def to_json_obj(self) -> dict:
        return {"d": self.d, "entries": [str(x) for row in self.rows for x in row]}

    @classmethod
    def from_json_obj(cls, data: dict) -> "IntMatrix":
        d = data["d"]
        flat = [int(x) for x in data["entries"]]
        return cls(tuple(tuple(flat[i * d : (i + 1) * d]) for i in range(d)))

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())


def _bool_row_mul(rows: list[int], mask: int, d: int) -> int:
    out = 0
    for k in range(d):
        if mask >> k & 1:
            out |= rows[k]
    return out


def transvection(d: int, alpha: int, beta: int) -> IntMatrix:
    """I + E_{alpha beta} with 1-based indices."""
    if alpha == beta:
        raise ValueError("transvection requires alpha != beta")
    if not (1 <= alpha <= d and 1 <= beta <= d):
        raise IndexError("transvection index out of range")
    rows = [[1 if i == j else 0 for j in range(d)] for i in range(d)]
    rows[alpha - 1][beta - 1] = 1
    return IntMatrix.from_rows(rows)


def permutation_matrix(images: Sequence[int]) -> IntMatrix:
    """P with P[i][j] = 1 iff j = images[i] (0-based positions)."""
    d = len(images)
    rows = [[0] * d for _ in range(d)]
    for i, j in enumerate(images):
        rows[i][j] = 1
    return IntMatrix.from_rows(rows)


def companion_matrix(p: "IntPolynomial") -> IntMatrix:
    """Companion matrix of a monic integer polynomial."""
    if p.coeffs[-1] != 1:
        raise ValueError("companion matrix needs a monic polynomial")
    n = p.degree
    rows = [[0] * n for _ in range(n)]
    for i in range(1, n):
        rows[i][i - 1] = 1
    for i in range(n):
        rows[i][n - 1] = -p.coeffs[i]
    return IntMatrix.from_rows(rows)


# ---------------------------------------------------------------------------
# integer polynomials
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class IntPolynomial:
    """Dense integer polynomial, coefficients low to high degree."""

    coeffs: tuple[int, ...]

    def __post_init__(self) -> None:
        c = list(self.coeffs)
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(int(x) for x in c))

    @classmethod
    def x_power(cls, k: int, scale: int = 1) -> "IntPolynomial":
        return cls((0,) * k + (scale,))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1  # degree of 0 is -1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __add__(self, other: "IntPolynomial") -> "IntPolynomial":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        return IntPolynomial(tuple(x + y for x, y in zip(a, b)) + a[len(b):])

    def __neg__(self) -> "IntPolynomial":
        return IntPolynomial(tuple(-c for c in self.coeffs))

    def __sub__(self, other: "IntPolynomial") -> "IntPolynomial":
        return self + (-other)

    def __mul__(self, other: "IntPolynomial") -> "IntPolynomial":
        if self.is_zero() or other.is_zero():
            return IntPolynomial(())
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IntPolynomial(tuple(out))

    def derivative(self) -> "IntPolynomial":
        return IntPolynomial(tuple(i * c for i, c in enumerate(self.coeffs))[1:])

    def divide_exact(self, divisor: "IntPolynomial") -> "IntPolynomial":
        q, r = _frac_divmod(self.coeffs, divisor.coeffs)
        if r:
            raise ValueError("division is not exact")
        return IntPolynomial(tuple(_as_ints(q)))

    def try_divide(self, divisor: "IntPolynomial") -> "IntPolynomial | None":
        q, r = _frac_divmod(self.coeffs, divisor.coeffs)
        if r:
            return None
        try:
            return IntPolynomial(tuple(_as_ints(q)))
        except ValueError:
            return None

    def content(self) -> int:
        return math.gcd(*self.coeffs) if self.coeffs else 0

    def primitive(self) -> "IntPolynomial":
        if self.is_zero():
            return self
        g = self.content()
        sign = 1 if self.coeffs[-1] > 0 else -1
        return IntPolynomial(tuple(sign * c // g for c in self.coeffs))

    def gcd(self, other: "IntPolynomial") -> "IntPolynomial":
        """Primitive gcd over Q (Euclid with rational remainders)."""
        a, b = self, other
        while not b.is_zero():
            _, r = _frac_divmod(a.coeffs, b.coeffs)
            a, b = b, IntPolynomial(tuple(_primitive_ints(r)))
        return a.primitive()

    def squarefree_part(self) -> "IntPolynomial":
        if self.degree <= 1:
            return self.primitive()
        return self.divide_exact(self.gcd(self.derivative())).primitive()

    def reversed_coeffs(self) -> "IntPolynomial":
        """X^deg * p(1/X)."""
        return IntPolynomial(tuple(reversed(self.coeffs)))

    def remove_cyclotomic_linear_factors(self) -> "IntPolynomial":
        """Divide out every (X - 1) and (X + 1) factor."""
        p = self
        for root_poly in (IntPolynomial((-1, 1)), IntPolynomial((1, 1))):
            while p.degree >= 1:
                q = p.try_divide(root_poly)
                if q is None:
                    break
                p = q
        return p

    def to_json_obj(self) -> list[int]:
        return list(self.coeffs)

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        terms = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            if i == 0:
                terms.append(f"{c}")
            else:
                mag = "" if abs(c) == 1 else f"{abs(c)}*"
                power = "X" if i == 1 else f"X^{i}"
                terms.append(("-" if c < 0 else "+") + f" {mag}{power}")
        head = terms[0]
        return " ".join([head] + terms[1:]) if head[0] not in "+-" else " ".join(terms)


def _frac_divmod(a: Sequence, b: Sequence) -> tuple[list[Fraction], list[Fraction]]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    r = [Fraction(x) for x in a]
    bb = [Fraction(x) for x in b]
    q = [Fraction(0)] * max(0, len(r) - len(bb) + 1)
    while len(r) >= len(bb):
        while r and r[-1] == 0:
            r.pop()
        if len(r) < len(bb):
            break
        c = r[-1] / bb[-1]
        k = len(r) - len(bb)
        q[k] = c
        for i, bc in enumerate(bb):
            r[i + k] -= c * bc
        r.pop()
    while r and r[-1] == 0:
        r.pop()
    return q, r


def _as_ints(q: Iterable[Fraction]) -> list[int]:
    out = []
    for c in q:
        if c.denominator != 1:
            raise ValueError("non-integer coefficient")
        out.append(int(c))
    return out


def _primitive_ints(fracs: Sequence[Fraction]) -> list[int]:
    if not fracs:
        return []
    lcm = 1
    for c in fracs:
        lcm = lcm * c.denominator // math.gcd(lcm, c.denominator)
    ints = [int(c * lcm) for c in fracs]
    g = math.gcd(*ints)
    return [c // g for c in ints] if g else ints


def poly_reciprocal_check(p: IntPolynomial) -> bool:
    """True iff p equals +/- its own coefficient reversal after removing all
    (X-1) and (X+1) factors."""
    q = p.remove_cyclotomic_linear_factors()
    rev = q.reversed_coeffs()
    return rev.coeffs == q.coeffs or rev.coeffs == (-q).coeffs


# ---------------------------------------------------------------------------
# Sturm chains and certified root isolation
# ---------------------------------------------------------------------------


def sturm_chain(p: IntPolynomial) -> list[IntPolynomial]:
    chain = [p.primitive(), p.derivative().primitive()]
    while not chain[-1].is_zero():
        _, r = _frac_divmod(chain[-2].coeffs, chain[-1].coeffs)
        if not r:
            break
        chain.append(IntPolynomial(tuple(_primitive_ints([-c for c in r]))))
    return chain


def _sign_changes_at(chain: Sequence[IntPolynomial], x: Fraction) -> int:
    signs = []
    for p in chain:
        v = p(x)
        if v:
            signs.append(1 if v > 0 else -1)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _sign_changes_at_pos_inf(chain: Sequence[IntPolynomial]) -> int:
    signs = [1 if p.coeffs[-1] > 0 else -1 for p in chain if not p.is_zero()]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_real_roots(chain: Sequence[IntPolynomial], lo: Fraction, hi: Fraction) -> int:
    """Number of distinct real roots in (lo, hi] (chain of a squarefree poly)."""
    return _sign_changes_at(chain, lo) - _sign_changes_at(chain, hi)


def cauchy_root_bound(p: IntPolynomial) -> Fraction:
    lead = abs(p.coeffs[-1])
    if p.degree < 1:
        return Fraction(1)
    return 1 + max(Fraction(abs(c), lead) for c in p.coeffs[:-1])


@dataclass(frozen=True)
class PerronRoot:
    """A certified enclosure of the largest real root of an integer polynomial.

    Exactly one root of the squarefree part lies in (lo, hi), none lie above
    hi, and the endpoint signs were verified in exact rational arithmetic.
    """

    poly: IntPolynomial
    squarefree: IntPolynomial
    lo: Fraction
    hi: Fraction
    precision: Fraction

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def value(self) -> float:
        return float((self.lo + self.hi) / 2)

    def refined(self, precision: Fraction) -> "PerronRoot":
        if precision >= self.width:
            return self
        chain = sturm_chain(self.squarefree)
        lo, hi = _bisect_to(chain, self.squarefree, self.lo, self.hi, precision)
        return PerronRoot(self.poly, self.squarefree, lo, hi, precision)

    def mpf(self, dps: int = 30) -> mp.mpf:
        """Polish the enclosure midpoint with Newton at dps digits; the result
        is re-checked against the certified interval."""
        with mp.workdps(dps + 10):
            coeffs = [mp.mpf(c) for c in reversed(self.squarefree.coeffs)]
            x = mp.mpf(self.lo.numerator) / mp.mpf(self.lo.denominator)
            x = mp.findroot(lambda t: mp.polyval(coeffs, t), x)
            lo = mp.mpf(self.lo.numerator) / mp.mpf(self.lo.denominator)
            hi = mp.mpf(self.hi.numerator) / mp.mpf(self.hi.denominator)
            if not (lo - self.width <= x <= hi + self.width):
                raise IllConditionedError("Newton polish left the certified interval")
            return x

    def to_json_obj(self) -> dict:
        return {
            "poly": list(self.poly.coeffs),
            "lo": _frac_str(self.lo),
            "hi": _frac_str(self.hi),
            "value": self.value,
            "precision": float(self.precision),
        }


def _frac_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def _split_point(q: IntPolynomial, lo: Fraction, hi: Fraction) -> Fraction:
    """Midpoint, nudged off any exact root of q (at most one root lies in the
    interval whenever this is called during refinement)."""
    mid = (lo + hi) / 2
    if q(mid) != 0:
        return mid
    alt = lo + (hi - lo) * Fraction(1, 4)
    if q(alt) != 0:
        return alt
    return lo + (hi - lo) * Fraction(3, 4)


def _bisect_to(
    chain: Sequence[IntPolynomial],
    q: IntPolynomial,
    lo: Fraction,
    hi: Fraction,
    precision: Fraction,
) -> tuple[Fraction, Fraction]:
    while hi - lo > precision:
        mid = _split_point(q, lo, hi)
        if count_real_roots(chain, mid, hi) >= 1:
            lo = mid
        else:
            hi = mid
    return lo, hi


def isolate_largest_real_root(
    p: IntPolynomial, precision: Fraction = DEFAULT_PRECISION
) -> PerronRoot | None:
    """Certified enclosure of the largest real root, or None when there is no
    real root at all."""
    q = p.squarefree_part()
    chain = sturm_chain(q)
    bound = cauchy_root_bound(q)
    lo, hi = -bound - 1, bound
    if count_real_roots(chain, lo, hi) == 0:
        return None
    # first shrink until (lo, hi] holds exactly the top root, then to precision
    while count_real_roots(chain, lo, hi) > 1:
        mid = _split_point(q, lo, hi)
        if count_real_roots(chain, mid, hi) >= 1:
            lo = mid
        else:
            hi = mid
    lo, hi = _bisect_to(chain, q, lo, hi, precision)
    return PerronRoot(p, q, lo, hi, precision)


def perron_root(
    source: IntMatrix | IntPolynomial, precision: Fraction = DEFAULT_PRECISION
) -> PerronRoot:
    """Certified enclosure of the dominant real eigenvalue/root (> 1).

    For a primitive nonnegative matrix the largest real root of the
    characteristic polynomial is its spectral radius.
    """
    if isinstance(source, IntMatrix):
        if not source.is_nonnegative():
            raise NegativeEntryError("matrix must be nonnegative")
        p = source.charpoly()
    else:
        p = source
    root = isolate_largest_real_root(p, precision)
    if root is None or root.hi <= 1:
        raise NoRootAboveOne(f"no real root greater than 1 for {p}")
    if root.lo < 1:
        # re-certify strictly above 1
        chain = sturm_chain(root.squarefree)
        if count_real_roots(chain, Fraction(1), root.hi) < 1:
            raise NoRootAboveOne(f"no real root greater than 1 for {p}")
        lo, hi = _bisect_to(chain, root.squarefree, Fraction(1), root.hi, precision)
        root = PerronRoot(p, root.squarefree, lo, hi, precision)
    return root


# ---------------------------------------------------------------------------
# high-precision eigenvectors
# ---------------------------------------------------------------------------


def eigenvector(
    matrix: IntMatrix,
    eigenvalue,
    residual_bound: float = 1e-9,
    dps: int | None = None,
    sign: str = "pivot",
):
    """Unit (sup-norm) eigenvector for an approximately known simple
    eigenvalue, by inverse iteration at elevated precision.

    ``sign='pivot'`` normalizes the largest-magnitude entry to +1;
    ``sign='positive'`` additionally demands an entrywise-positive vector
    (flipping globally if needed) and raises IllConditionedError when the
    entries have mixed signs.  The residual ||Mx - eigenvalue x|| must stay
    below residual_bound * ||x||.
    """
    d = matrix.d
    work_dps = dps or max(30, 2 * int(-mp.log10(mp.mpf(residual_bound))) + 10)
    with mp.workdps(work_dps):
        mu = mp.mpf(eigenvalue) if not isinstance(eigenvalue, mp.mpf) else eigenvalue
        A = mp.matrix(d, d)
        for i in range(d):
            for j in range(d):
                A[i, j] = mp.mpf(matrix.rows[i][j]) - (mu if i == j else 0)
        x = mp.matrix([mp.mpf(1)] * d)
        for _ in range(8):
            try:
                y = mp.lu_solve(A, x)
            except (ZeroDivisionError, ValueError):
                B = A.copy()
                bump = mp.mpf(10) ** (-work_dps + 5)
                for i in range(d):
                    B[i, i] += bump
                y = mp.lu_solve(B, x)
            pivot = max(range(d), key=lambda i: abs(y[i]))
            x = y / y[pivot]
        vec = tuple(x[i] for i in range(d))
        r = _residual(matrix, mu, vec)
        if r > residual_bound:
            raise IllConditionedError(f"eigenvector residual {r} > {residual_bound}")
        if sign == "positive":
            if all(v < 0 for v in vec):
                vec = tuple(-v for v in vec)
            if not all(v > 0 for v in vec):
                raise IllConditionedError("eigenvector is not of one sign")
        elif sign != "pivot":
            raise ValueError(f"unknown sign rule {sign!r}")
        return vec


def _residual(matrix: IntMatrix, mu, vec) -> float:
    d = matrix.d
    norm = max(abs(v) for v in vec)
    worst = mp.mpf(0)
    for i in range(d):
        acc = mp.mpf(0)
        for j in range(d):
            acc += matrix.rows[i][j] * vec[j]
        worst = max(worst, abs(acc - mu * vec[i]))
    return float(worst / norm)


def eigen_residual(matrix: IntMatrix, mu, vec) -> float:
    """sup-norm relative residual ||Mv - mu v|| / ||v||."""
    return _residual(matrix, mu, vec)


# ---------------------------------------------------------------------------
# exact comparisons against sqrt(2) + c
# ---------------------------------------------------------------------------


def sqrt2_bounds(digits: int = 30) -> tuple[Fraction, Fraction]:
    """Rational lo < sqrt(2) < hi with hi - lo = 10^-digits."""
    scale = 10**digits
    lo = math.isqrt(2 * scale * scale)
    return Fraction(lo, scale), Fraction(lo + 1, scale)
