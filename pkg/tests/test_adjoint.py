"""
Tests for iterated adjoints and the coefficient tables.
"""

import math
import unittest
from fractions import Fraction

from app.components.adjoint import (
    adjoint_power,
    gap_step,
    gap_step_closed_form,
    lemma2_table,
    lemma3_check,
    lemma4_closed_form,
    lowering_closed_form,
    rescale_unit_table,
)
from app.components.polynomials import X, Y, BivariatePoly
from app.utils.error_handling import InvalidArgumentError

EPSILONS = [Fraction(0), Fraction(1), Fraction(2), Fraction(-1), Fraction(1, 2)]


class TestAdjointPower(unittest.TestCase):
    """Test cases for adjoint_power"""

    def test_examples(self):
        """Test the closed form and the zeroth power"""
        self.assertEqual(adjoint_power(X ** 2, Y ** 3, 3), BivariatePoly.monomial(3, 0, 48))
        self.assertEqual(adjoint_power(X + Y, X * Y, 0), X * Y)

    def test_constant_from_table(self):
        """Test that the last iterate is the table's constant"""
        value = adjoint_power(X ** 2 - Y, Y ** 3, 6)
        table = lemma2_table(2, 3, 1)
        self.assertEqual(value, BivariatePoly.constant(table.coefficient(0, 6)))
        self.assertEqual(value.degree, 0)

    def test_closed_form_grid(self):
        """Test adj_{x^p}^q(y^q) = p^q q! x^(pq-q) for 1 <= p, q <= 6"""
        for p in range(1, 7):
            for q in range(1, 7):
                self.assertEqual(adjoint_power(X ** p, Y ** q, q), lemma4_closed_form(p, q), (p, q))

    def test_negative_power_rejected(self):
        """Test that a negative iteration count is rejected"""
        with self.assertRaises(InvalidArgumentError):
            adjoint_power(X, Y, -1)


class TestCoeffTable(unittest.TestCase):
    """Test cases for lemma2_table"""

    def test_first_row(self):
        """Test the initial row"""
        table = lemma2_table(3, 4, 1)
        self.assertEqual(table.rows[0], (0, 0, 0, 0, 1))
        self.assertEqual(len(table.rows), 13)
        self.assertEqual(len(table.rows[-1]), 1)

    def test_row_lengths(self):
        """Test that row n stores k = 0..floor(q - n/p)"""
        for p in range(1, 5):
            for q in range(1, 5):
                table = lemma2_table(p, q, 1)
                for n, row in enumerate(table.rows):
                    self.assertEqual(len(row), table.bound(n) + 1, (p, q, n))
        self.assertEqual(lemma2_table(3, 4, 1).bound(5), 2)

    def test_epsilon_zero(self):
        """Test c_{0,q} = p^q q! and vanishing of the rest when eps = 0"""
        for p in range(1, 5):
            for q in range(1, 5):
                table = lemma2_table(p, q, 0)
                self.assertEqual(table.coefficient(0, q), p ** q * math.factorial(q))
                for k in range(1, q + 1):
                    self.assertEqual(table.coefficient(k, q), 0)

    def test_out_of_range_reads_zero(self):
        """Test that entries beyond the bound read as zero"""
        table = lemma2_table(2, 3, 1)
        self.assertEqual(table.coefficient(3, 5), 0)
        self.assertEqual(table.coefficient(-1, 2), 0)
        with self.assertRaises(InvalidArgumentError):
            table.coefficient(0, 7)

    def test_reconstruction_matches_iteration(self):
        """Test every row against direct iteration for all small p, q, eps"""
        for p in range(1, 7):
            for q in range(1, 7):
                for eps in EPSILONS:
                    table = lemma2_table(p, q, eps)
                    operator = X ** p - Y * eps
                    value = Y ** q
                    for n in range(p * q + 1):
                        self.assertEqual(table.reconstruct(n), value, (p, q, eps, n))
                        value = adjoint_power(operator, value, 1)

    def test_rescaling_from_unit(self):
        """Test that the eps table follows from the eps = 1 table"""
        for p, q in [(2, 3), (3, 2), (2, 5), (4, 3)]:
            unit = lemma2_table(p, q, 1)
            for eps in [Fraction(2), Fraction(-1), Fraction(1, 2)]:
                self.assertEqual(rescale_unit_table(unit, eps), lemma2_table(p, q, eps))
        with self.assertRaises(InvalidArgumentError):
            rescale_unit_table(lemma2_table(2, 3, 1), 0)

    def test_text_forms(self):
        """Test the table dumps"""
        table = lemma2_table(1, 1, 1)
        self.assertEqual(table.to_text(), "0: 0=0, 1=1\n1: 0=1")
        self.assertEqual(table.to_lines(), "0 0 0/1\n0 1 1/1\n1 0 1/1")

    def test_rejects_non_positive_exponents(self):
        """Test the exponent preconditions"""
        with self.assertRaises(InvalidArgumentError):
            lemma2_table(0, 3, 1)


class TestNonvanishing(unittest.TestCase):
    """Test cases for lemma3_check"""

    def test_grid(self):
        """Test both nonvanishing claims for 2 <= p, q <= 5"""
        for p in range(2, 6):
            for q in range(2, 6):
                self.assertTrue(lemma3_check(p, q).holds, (p, q))

    def test_smallest_case(self):
        """Test (p, q) = (1, 1)"""
        check = lemma3_check(1, 1)
        self.assertEqual(check.top, 1)
        self.assertTrue(check.holds)

    def test_shape_of_lower_row(self):
        """Test that row p(q-1) is c0 x^p + c1 y"""
        p, q = 2, 3
        check = lemma3_check(p, q)
        value = adjoint_power(X ** p - Y, Y ** q, p * (q - 1))
        self.assertEqual(value, X ** p * check.lower_constant + Y * check.lower_linear)

    def test_constant_column(self):
        """Test c_{0,i} = 0 for i < q and nonzero for q <= i <= pq"""
        for p in range(2, 7):
            for q in range(2, 7):
                table = lemma2_table(p, q, 1)
                for i in range(p * q + 1):
                    if i < q:
                        self.assertEqual(table.coefficient(0, i), 0)
                    else:
                        self.assertNotEqual(table.coefficient(0, i), 0)


class TestGapStep(unittest.TestCase):
    """Test cases for the exponent-moving identities"""

    def test_gap_step(self):
        """Test the closed form of adj_{x^p}^(q-1) adj_{y^q}(x^m)"""
        self.assertEqual(gap_step(2, 3, 2), BivariatePoly.monomial(3, 0, -48))
        for p in range(1, 5):
            for q in range(1, 5):
                for m in range(1, 5):
                    self.assertEqual(gap_step(p, q, m), gap_step_closed_form(p, q, m), (p, q, m))

    def test_lowering(self):
        """Test repeated brackets with y and with x"""
        for e in range(0, 6):
            for n in range(0, 7):
                self.assertEqual(adjoint_power(Y, X ** e, n), lowering_closed_form("x", e, n))
                self.assertEqual(adjoint_power(X, Y ** e, n), lowering_closed_form("y", e, n))


if __name__ == '__main__':
    unittest.main()
