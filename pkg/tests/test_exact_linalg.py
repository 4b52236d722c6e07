import math
from fractions import Fraction

import pytest

from rauzyveech import (
    IntMatrix,
    IntPolynomial,
    NegativeEntryError,
    NoRootAboveOne,
    companion_matrix,
    eigenvector,
    isolate_largest_real_root,
    perron_root,
    poly_reciprocal_check,
    transvection,
)
from rauzyveech.exact_linalg import eigen_residual, sqrt2_bounds, sturm_chain

M2 = IntMatrix.from_rows([[0, 2, 1, 1], [0, 0, 1, 0], [1, 0, 0, 0], [0, 1, 0, 1]])
CHI2 = IntPolynomial((1, -1, -1, -1, 1))


def naive_charpoly(matrix: IntMatrix) -> IntPolynomial:
    """Independent oracle: cofactor expansion of det(XI - M) over polynomial
    entries (exponential, fine for small d)."""
    d = matrix.d
    x = IntPolynomial((0, 1))
    entries = [
        [
            (x if i == j else IntPolynomial(())) - IntPolynomial((matrix.rows[i][j],))
            for j in range(d)
        ]
        for i in range(d)
    ]

    def det(rows, cols):
        if len(cols) == 1:
            return entries[rows[0]][cols[0]]
        acc = IntPolynomial(())
        for k, c in enumerate(cols):
            minor = det(rows[1:], cols[:k] + cols[k + 1 :])
            term = entries[rows[0]][c] * minor
            acc = acc + term if k % 2 == 0 else acc - term
        return acc

    return det(tuple(range(d)), tuple(range(d)))


class TestTransvection:
    def test_basic(self):
        assert transvection(2, 1, 2) == IntMatrix.from_rows([[1, 1], [0, 1]])

    def test_empty_product_is_identity(self):
        acc = IntMatrix.identity(3)
        for _ in []:
            acc = acc @ transvection(3, 1, 2)
        assert acc == IntMatrix.identity(3)

    def test_index_errors(self):
        with pytest.raises(ValueError):
            transvection(3, 2, 2)
        with pytest.raises(IndexError):
            transvection(3, 0, 1)

    def test_determinant_one(self):
        assert transvection(5, 2, 4).det() == 1


class TestCharpoly:
    def test_identity(self):
        chi = IntMatrix.identity(3).charpoly()
        assert chi == IntPolynomial((-1, 1)) * IntPolynomial((-1, 1)) * IntPolynomial((-1, 1))

    def test_m2_against_cofactor_oracle(self):
        assert M2.charpoly() == naive_charpoly(M2) == CHI2

    def test_random_against_cofactor_oracle(self):
        import random

        rng = random.Random(11)
        for d in (2, 3, 4, 5):
            m = IntMatrix.from_rows(
                [[rng.randint(-4, 4) for _ in range(d)] for _ in range(d)]
            )
            assert m.charpoly() == naive_charpoly(m)

    def test_companion_identity(self):
        p = IntPolynomial((3, -2, 0, 5, 1))
        assert companion_matrix(p).charpoly() == p

    def test_charpoly_constant_term_is_signed_det(self):
        assert M2.charpoly().coeffs[0] == M2.det() * (-1) ** M2.d


class TestPrimitivity:
    def test_fibonacci(self):
        assert IntMatrix.from_rows([[1, 1], [1, 0]]).is_primitive()

    def test_identity_not_primitive(self):
        assert not IntMatrix.identity(3).is_primitive()

    def test_permutation_matrix_not_primitive(self):
        assert not IntMatrix.from_rows([[0, 1], [1, 0]]).is_primitive()

    def test_negative_raises(self):
        with pytest.raises(NegativeEntryError):
            IntMatrix.from_rows([[1, -1], [0, 1]]).is_primitive()


def golden_ratio(digits: int) -> Fraction:
    scale = 10**digits
    return Fraction(scale + math.isqrt(5 * scale * scale), 2 * scale)


class TestPerronRoot:
    def test_golden_ratio(self):
        root = perron_root(IntPolynomial((-1, -1, 1)))
        assert root.width <= Fraction(1, 10**12)
        phi = golden_ratio(30)
        assert root.lo < phi < root.hi

    def test_chi2_value(self):
        root = perron_root(CHI2)
        assert abs(root.value - 1.7220838057390422) < 1e-11

    def test_chi2_against_float_spectral_oracle(self):
        import numpy as np

        root = perron_root(M2)
        spectral = max(abs(v) for v in np.linalg.eigvals(np.array(M2.rows, float)))
        assert abs(root.value - spectral) < 1e-9

    def test_interval_certificate_signs(self):
        root = perron_root(CHI2)
        q = root.squarefree
        assert q(root.lo) * q(root.hi) < 0

    def test_no_root_above_one(self):
        with pytest.raises(NoRootAboveOne):
            perron_root(IntPolynomial((-1, 1)) * IntPolynomial((-1, 1)))

    def test_no_real_root_at_all(self):
        assert isolate_largest_real_root(IntPolynomial((1, 0, 1))) is None

    def test_rational_root_exact_split(self):
        # largest root is exactly 2: splits must dodge it
        p = IntPolynomial((-2, 1)) * IntPolynomial((-1, -1, 1))
        root = perron_root(p)
        assert root.lo < 2 < root.hi

    def test_refined_shrinks(self):
        root = perron_root(CHI2)
        finer = root.refined(Fraction(1, 10**20))
        assert finer.width <= Fraction(1, 10**20)
        assert root.lo <= finer.lo and finer.hi <= root.hi

    def test_sturm_counts_roots(self):
        p = IntPolynomial((-1, -1, 1)) * IntPolynomial((-3, 1))  # roots phi, -1/phi, 3
        chain = sturm_chain(p.squarefree_part())
        from rauzyveech.exact_linalg import count_real_roots

        assert count_real_roots(chain, Fraction(-10), Fraction(10)) == 3
        assert count_real_roots(chain, Fraction(2), Fraction(10)) == 1


class TestEigenvector:
    def test_2x2_closed_form(self):
        m = IntMatrix.from_rows([[2, 1], [1, 1]])
        theta = (3 + math.sqrt(5)) / 2
        vec = eigenvector(m, theta)
        assert eigen_residual(m, theta, vec) < 1e-9
        ratio = vec[0] / vec[1]
        assert abs(float(ratio) - (1 + math.sqrt(5)) / 2) < 1e-9

    def test_m2_perron_vector_positive(self):
        root = perron_root(M2)
        vec = eigenvector(M2, root.mpf(30))
        if vec[0] < 0:
            vec = tuple(-v for v in vec)
        assert all(v > 0 for v in vec)
        assert eigen_residual(M2, root.mpf(30), vec) < 1e-12


class TestReciprocal:
    def test_chi2_is_reciprocal(self):
        assert poly_reciprocal_check(CHI2)

    def test_p2_after_removing_x_plus_1(self):
        p2 = IntPolynomial((1, 0, -2, -2, 0, 1))  # X^5 - 2X^3 - 2X^2 + 1
        assert poly_reciprocal_check(p2)

    def test_non_reciprocal(self):
        assert not poly_reciprocal_check(IntPolynomial((0, -2, 1)))


class TestSerialization:
    def test_matrix_json_roundtrip(self):
        assert IntMatrix.from_json_obj(M2.to_json_obj()) == M2

    def test_matrix_json_uses_decimal_strings(self):
        assert M2.to_json_obj()["entries"][1] == "2"

    def test_perron_json(self):
        obj = perron_root(CHI2).to_json_obj()
        assert set(obj) == {"poly", "lo", "hi", "value", "precision"}
        assert "/" in obj["lo"]

    def test_poly_str(self):
        assert str(CHI2) == "1 - X - X^2 - X^3 + X^4"


class TestSqrt2Bounds:
    def test_enclosure(self):
        lo, hi = sqrt2_bounds(25)
        assert lo * lo < 2 < hi * hi
        assert hi - lo == Fraction(1, 10**25)
