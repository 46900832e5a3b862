"""
Tests for Danielewski surfaces and their derivations.
"""

import random
import unittest
from fractions import Fraction

from app.components.danielewski import (
    SurfaceDerivation,
    SurfacePoly,
    apply_derivation,
    derivation_bracket,
    derivation_closure,
    reduce_normal_form,
    squarefree,
    standard_derivations,
    surface_closure_containment,
    tangency_spanning,
)
from app.components.polynomials import UnivariatePoly
from app.utils.error_handling import DegreeCapError, IllDefinedDerivationError, InvalidArgumentError

QUADRATIC = UnivariatePoly.from_coefficients([-1, 0, 1])
CUBIC = UnivariatePoly.from_coefficients([0, -1, 0, 1])


def random_surface_poly(rng: random.Random, p: UnivariatePoly, terms: int = 4) -> SurfacePoly:
    raw = {}
    for _ in range(terms):
        raw[(rng.randint(0, 2), rng.randint(0, 2), rng.randint(0, 2))] = Fraction(rng.randint(-4, 4), rng.randint(1, 3))
    return reduce_normal_form(raw, p)


class TestNormalForm(unittest.TestCase):
    """Test cases for reduce_normal_form"""

    def setUp(self):
        """Set up test fixtures"""
        self.rng = random.Random(8)

    def test_examples(self):
        """Test the rewriting of mixed monomials"""
        self.assertEqual(dict(reduce_normal_form({(1, 1, 0): 1}, QUADRATIC).terms), {(0, 0, 2): 1, (0, 0, 0): -1})
        self.assertEqual(dict(reduce_normal_form({(2, 1, 0): 1}, QUADRATIC).terms), {(1, 0, 2): 1, (1, 0, 0): -1})
        self.assertEqual(dict(reduce_normal_form({(1, 0, 1): 3}, QUADRATIC).terms), {(1, 0, 1): 3})

    def test_relation_vanishes(self):
        """Test that xy - p(z) is zero on the surface"""
        self.assertTrue(reduce_normal_form({(1, 1, 0): 1, (0, 0, 3): -1, (0, 0, 1): 1}, CUBIC).is_zero())

    def test_idempotent_and_linear(self):
        """Test idempotence and linearity of the rewriting"""
        for _ in range(10):
            f = random_surface_poly(self.rng, CUBIC)
            g = random_surface_poly(self.rng, CUBIC)
            self.assertEqual(reduce_normal_form(f.terms, CUBIC), f)
            raw = dict(f.terms)
            for key, coeff in g.terms.items():
                raw[key] = raw.get(key, 0) + coeff
            self.assertEqual(reduce_normal_form(raw, CUBIC), f + g)
            self.assertTrue(all(a * b == 0 for a, b, _ in (f * g).terms))

    def test_text_forms(self):
        """Test printing"""
        f = reduce_normal_form({(2, 0, 1): 1, (0, 1, 0): -2}, QUADRATIC)
        self.assertEqual(str(f), "x^2*z - 2*y")
        self.assertEqual(f.to_lines(), "2 0 1 1/1\n0 1 0 -2/1")

    def test_rejects_small_p(self):
        """Test that p needs degree at least 2"""
        with self.assertRaises(InvalidArgumentError):
            reduce_normal_form({(1, 1, 0): 1}, UnivariatePoly.from_coefficients([1, 1]))
        with self.assertRaises(InvalidArgumentError):
            SurfacePoly.constant(1, QUADRATIC) + SurfacePoly.constant(1, CUBIC)


class TestDerivations(unittest.TestCase):
    """Test cases for the standard derivations and their brackets"""

    def setUp(self):
        """Set up test fixtures"""
        self.rng = random.Random(21)
        self.x = SurfacePoly.variable("x", QUADRATIC)
        self.y = SurfacePoly.variable("y", QUADRATIC)
        self.z = SurfacePoly.variable("z", QUADRATIC)
        self.d1, self.d2, self.d3, self.d4 = standard_derivations(QUADRATIC)

    def test_images(self):
        """Test D1(z) = y, D3(z) = y^2 and the kernels"""
        self.assertEqual(apply_derivation(self.d1, self.z), self.y)
        self.assertEqual(apply_derivation(self.d3, self.z), self.y * self.y)
        self.assertTrue(apply_derivation(self.d1, self.y).is_zero())
        self.assertTrue(apply_derivation(self.d2, self.x).is_zero())

    def test_well_defined(self):
        """Test the generators and all their brackets for two surfaces"""
        for p in (QUADRATIC, CUBIC):
            derivations = standard_derivations(p)
            for d in derivations:
                self.assertTrue(d.is_well_defined(), str(d))
            for d in derivations:
                for e in derivations:
                    self.assertTrue(derivation_bracket(d, e).is_well_defined())

    def test_ill_defined(self):
        """Test that d/dx alone is rejected"""
        zero = SurfacePoly.constant(0, QUADRATIC)
        partial_x = SurfaceDerivation(SurfacePoly.constant(1, QUADRATIC), zero, zero)
        self.assertFalse(partial_x.is_well_defined())
        with self.assertRaises(IllDefinedDerivationError):
            apply_derivation(partial_x, self.x)

    def test_brackets(self):
        """Test [D1, D1] = 0, [D1, D3] = 0 and [D1, D2] on a sample function"""
        self.assertTrue(derivation_bracket(self.d1, self.d1).is_zero())
        self.assertTrue(derivation_bracket(self.d1, self.d3).is_zero())
        sample = self.x * self.z
        bracket = derivation_bracket(self.d1, self.d2)
        self.assertEqual(
            apply_derivation(bracket, sample),
            apply_derivation(self.d1, apply_derivation(self.d2, sample))
            - apply_derivation(self.d2, apply_derivation(self.d1, sample)),
        )

    def test_leibniz(self):
        """Test D(fg) = D(f) g + f D(g)"""
        for d in (self.d1, self.d2, self.d3, self.d4):
            for _ in range(5):
                f = random_surface_poly(self.rng, QUADRATIC)
                g = random_surface_poly(self.rng, QUADRATIC)
                self.assertEqual(
                    apply_derivation(d, f * g),
                    apply_derivation(d, f) * g + f * apply_derivation(d, g),
                )

    def test_jacobi(self):
        """Test the Jacobi identity on elements of the closure"""
        elements = derivation_closure(CUBIC, 8).elements()
        for _ in range(6):
            u, v, w = (self.rng.choice(elements) for _ in range(3))
            total = (derivation_bracket(u, derivation_bracket(v, w))
                     + derivation_bracket(v, derivation_bracket(w, u))
                     + derivation_bracket(w, derivation_bracket(u, v)))
            self.assertTrue(total.is_zero())


class TestSurfaceClosure(unittest.TestCase):
    """Test cases for surface_closure_containment"""

    def test_quadratic(self):
        """Test y^k D1 and x^k D2 for k = 0..6 on xy = z^2 - 1"""
        report = surface_closure_containment(QUADRATIC, 6, 14)
        self.assertEqual(report.nu, 2)
        self.assertEqual(report.expected_start, 0)
        self.assertTrue(all(report.along_x.values()), report.along_x)
        self.assertTrue(all(report.along_y.values()), report.along_y)
        self.assertTrue(report.holds)
        self.assertTrue(report.squarefree)
        self.assertTrue(report.kernels_hold)

    def test_cubic(self):
        """Test y^k D1 and x^k D2 for k = 1..6 on xy = z^3 - z"""
        report = surface_closure_containment(CUBIC, 6, 14)
        self.assertEqual(report.expected_start, 1)
        self.assertTrue(report.holds, (report.along_x, report.along_y))
        self.assertTrue(report.along_x[0])

    def test_closure_dimension_at_small_cap(self):
        """Test the dimension of the closure on xy = z^3 - z at cap 6 and two of its brackets"""
        d1, d2, d3, d4 = standard_derivations(CUBIC)
        basis = derivation_closure(CUBIC, 6)
        self.assertEqual(len(basis), 33)
        for element in (derivation_bracket(d1, d2), derivation_bracket(d3, d4)):
            if not element.is_zero() and element.degree <= 6:
                self.assertTrue(basis.contains(element), str(element))

    def test_closure_dimension(self):
        """Test the dimension of the closure on xy = z^3 - z at cap 8"""
        self.assertEqual(len(derivation_closure(CUBIC, 8)), 61)

    def test_cap_too_small(self):
        """Test that the reported powers must fit the cap"""
        with self.assertRaises(DegreeCapError):
            surface_closure_containment(CUBIC, 6, 7)

    def test_squarefree(self):
        """Test the simple-root check"""
        self.assertTrue(squarefree(CUBIC))
        self.assertFalse(squarefree(UnivariatePoly.from_coefficients([1, -1, -1, 1])))


class TestTangency(unittest.TestCase):
    """Test cases for tangency_spanning"""

    def test_regular_points(self):
        """Test independence where p'(z) is nonzero"""
        for point in [(3, 1, 2), (1, 3, 2), (-3, -1, 2), (Fraction(1, 2), 6, 2)]:
            self.assertTrue(tangency_spanning(QUADRATIC, point), point)

    def test_critical_point(self):
        """Test dependence where p'(z) = 0"""
        self.assertFalse(tangency_spanning(QUADRATIC, (1, -1, 0)))

    def test_point_off_surface(self):
        """Test that points must satisfy xy = p(z)"""
        with self.assertRaises(InvalidArgumentError):
            tangency_spanning(QUADRATIC, (1, 1, 1))


if __name__ == '__main__':
    unittest.main()
