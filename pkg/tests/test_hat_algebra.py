"""
Tests for the extended algebra with the grading element delta.
"""

import random
import unittest
from fractions import Fraction

from app.components.hat_algebra import (
    HatElement,
    grading_action,
    hat_bracket,
    hat_closure,
    hat_generation_chain,
    hat_to_field,
)
from app.components.lie_closure import vector_closure
from app.components.polynomials import (
    ONE,
    X,
    Y,
    BivariatePoly,
    euler_field,
    hamiltonian_field,
    poisson_bracket,
)
from app.utils.error_handling import DegreeCapError, InvalidArgumentError, UsageError

from tests.test_polynomials import random_poly


class TestHatBracket(unittest.TestCase):
    """Test cases for hat_bracket"""

    def setUp(self):
        """Set up test fixtures"""
        self.rng = random.Random(3)
        self.delta = HatElement.delta()

    def random_element(self) -> HatElement:
        return HatElement(Fraction(self.rng.randint(-3, 3)), random_poly(self.rng))

    def test_grading(self):
        """Test [delta, x^a y^b] = (a + b - 2) x^a y^b"""
        self.assertEqual(hat_bracket(self.delta, HatElement.of(Y ** 3)), HatElement.of(Y ** 3))
        self.assertTrue(hat_bracket(self.delta, HatElement.of(X * Y)).is_zero())
        self.assertEqual(grading_action(X ** 4 + ONE), 2 * X ** 4 - 2)

    def test_generator_bracket(self):
        """Test {x^2 + 2y, delta + y^3}"""
        value = hat_bracket(HatElement.of(X ** 2 + 2 * Y), HatElement(1, Y ** 3))
        self.assertEqual(value, HatElement.of(2 * Y + 6 * X * Y ** 2))

    def test_jacobi(self):
        """Test the Jacobi identity on random triples"""
        for _ in range(8):
            u, v, w = self.random_element(), self.random_element(), self.random_element()
            total = (hat_bracket(u, hat_bracket(v, w))
                     + hat_bracket(v, hat_bracket(w, u))
                     + hat_bracket(w, hat_bracket(u, v)))
            self.assertTrue(total.is_zero())

    def test_delta_is_a_derivation(self):
        """Test delta{f, g} = {delta f, g} + {f, delta g}"""
        for _ in range(8):
            f, g = random_poly(self.rng), random_poly(self.rng)
            self.assertEqual(
                grading_action(poisson_bracket(f, g)),
                poisson_bracket(grading_action(f), g) + poisson_bracket(f, grading_action(g)),
            )

    def test_generation_chain(self):
        """Test every bracket of the chain"""
        chain = hat_generation_chain()
        self.assertEqual(len(chain), 8)
        for step in chain:
            self.assertTrue(step.holds, f"[{step.left}, {step.right}] = {step.value}")
        self.assertEqual(chain[2].value, HatElement.of(-2 + 12 * X ** 3 - 36 * X * Y))
        self.assertEqual(chain[6].value, HatElement.of(6 * Y ** 2))

    def test_projection_to_fields(self):
        """Test [Delta, V_f] = V_{delta f} and the image of delta"""
        self.assertEqual(hat_to_field(self.delta), euler_field())
        for _ in range(5):
            f = random_poly(self.rng)
            self.assertEqual(
                euler_field().commutator(hamiltonian_field(f)),
                hamiltonian_field(grading_action(f)),
            )
            self.assertEqual(hat_to_field(HatElement.of(f)), hamiltonian_field(f))


class TestHatElementText(unittest.TestCase):
    """Test cases for the text forms of HatElement"""

    def test_str_and_lines(self):
        """Test printing"""
        element = HatElement(1, Y ** 3)
        self.assertEqual(str(element), "delta + y^3")
        self.assertEqual(element.to_lines(), "delta: 1/1\n0 3 1/1")
        self.assertEqual(HatElement.delta(-2).to_lines(), "delta: -2/1")
        self.assertEqual(str(HatElement.of(X - 1)), "x - 1")

    def test_parse(self):
        """Test parsing with the delta token"""
        self.assertEqual(HatElement.parse("delta+y^3"), HatElement(1, Y ** 3))
        self.assertEqual(HatElement.parse("x^2+2y"), HatElement.of(X ** 2 + 2 * Y))
        self.assertEqual(HatElement.parse("1/2 delta - x"), HatElement(Fraction(1, 2), -X))
        with self.assertRaises(UsageError):
            HatElement.parse("delta*x")
        with self.assertRaises(UsageError):
            HatElement.parse("delta^2")


class TestHatClosure(unittest.TestCase):
    """Test cases for hat_closure"""

    def setUp(self):
        """Set up test fixtures"""
        self.generators = [HatElement.of(X ** 2 + 2 * Y), HatElement(1, Y ** 3)]

    def test_low_degree_directions(self):
        """Test that delta, 1, x, x^2 and y are separate directions"""
        basis = hat_closure(self.generators, 12)
        for element in [HatElement.delta(), HatElement.of(ONE), HatElement.of(X),
                        HatElement.of(X ** 2), HatElement.of(Y), HatElement.of(Y ** 2)]:
            self.assertTrue(basis.contains(element), str(element))

    def test_delta_alone(self):
        """Test that delta spans a line"""
        basis = hat_closure([HatElement.delta()], 6)
        self.assertEqual(basis.elements(), [HatElement.delta()])

    def test_generates_everything_in_low_degree(self):
        """Test that delta and every monomial of degree <= 8 are reached at cap 14"""
        basis = hat_closure(self.generators, 14)
        self.assertTrue(basis.contains(HatElement.delta()))
        for d in range(9):
            for a in range(d + 1):
                self.assertTrue(basis.contains(HatElement.of(BivariatePoly.monomial(a, d - a))), (a, d - a))

    def test_contains_polynomial_closure(self):
        """Test that the delta-free part contains the closure of x^2 + 2y and y^3"""
        basis = hat_closure(self.generators, 14)
        for element in vector_closure([X ** 2 + 2 * Y, Y ** 3], 12).elements():
            self.assertTrue(basis.contains(HatElement.of(element)), str(element))

    def test_preconditions(self):
        """Test generator validation"""
        with self.assertRaises(InvalidArgumentError):
            hat_closure([HatElement()], 6)
        with self.assertRaises(DegreeCapError):
            hat_closure([HatElement(1, X ** 8)], 6)


if __name__ == '__main__':
    unittest.main()
