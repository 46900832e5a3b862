"""
The extended Lie algebra <delta> x| K[x,y], where delta acts on x^a y^b by
multiplication with a + b - 2.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Hashable, Iterable, List, Tuple

from app.components.echelon import EchelonBasis, saturate
from app.components.lie_closure import monomial_count
from app.components.polynomials import (
    ZERO,
    X,
    Y,
    BivariatePoly,
    PlaneVectorField,
    Scalar,
    add_scaled,
    as_rat,
    euler_field,
    format_rat,
    format_terms,
    hamiltonian_field,
    parse_terms,
    poisson_terms,
)
from app.utils.cache import cache_result
from app.utils.error_handling import DegreeCapError, UsageError, require

logger = logging.getLogger(__name__)

# Coordinate key of delta; ordered above every monomial
DELTA = "delta"


def grading_action(f: BivariatePoly) -> BivariatePoly:
    """delta(f): multiply the x^a y^b term by a + b - 2."""
    return BivariatePoly({(a, b): (a + b - 2) * c for (a, b), c in f.terms.items()})


@dataclass(frozen=True)
class HatElement:
    """alpha * delta + f"""
    delta_coeff: Fraction = Fraction(0)
    poly: BivariatePoly = field(default=ZERO)

    def __post_init__(self):
        object.__setattr__(self, "delta_coeff", as_rat(self.delta_coeff))
        require(isinstance(self.poly, BivariatePoly), f"expected a polynomial, got {self.poly!r}")

    @classmethod
    def of(cls, f: BivariatePoly) -> "HatElement":
        return cls(Fraction(0), f)

    @classmethod
    def delta(cls, coeff: Scalar = 1) -> "HatElement":
        return cls(as_rat(coeff), ZERO)

    def __add__(self, other: "HatElement") -> "HatElement":
        return HatElement(self.delta_coeff + other.delta_coeff, self.poly + other.poly)

    def __sub__(self, other: "HatElement") -> "HatElement":
        return HatElement(self.delta_coeff - other.delta_coeff, self.poly - other.poly)

    def scale(self, factor: Scalar) -> "HatElement":
        value = as_rat(factor)
        return HatElement(self.delta_coeff * value, self.poly.scale(value))

    def is_zero(self) -> bool:
        return self.delta_coeff == 0 and self.poly.is_zero()

    @property
    def degree(self):
        """Degree of the polynomial part; delta alone counts as degree 0."""
        if self.poly.is_zero():
            return 0 if self.delta_coeff else self.poly.degree
        return self.poly.degree

    def __str__(self) -> str:
        head = [(self.delta_coeff, [DELTA])] if self.delta_coeff else []
        tail = [(c, _factors(a, b)) for (a, b), c in self.poly.sorted_terms()]
        return format_terms(head + tail)

    def to_lines(self) -> str:
        body = self.poly.to_lines()
        head = f"delta: {format_rat(self.delta_coeff)}"
        return f"{head}\n{body}" if body else head

    @classmethod
    def parse(cls, text: str) -> "HatElement":
        """Parse a polynomial literal that may use the token "delta" linearly."""
        terms = parse_terms(text.replace("δ", "delta").replace("delta", "D"), ("D", "x", "y"))
        alpha = Fraction(0)
        poly: Dict[Tuple[int, int], Fraction] = {}
        for (d, a, b), c in terms.items():
            if d == 0:
                poly[(a, b)] = c
            elif d == 1 and a == 0 and b == 0:
                alpha = c
            else:
                raise UsageError(f"delta may only appear linearly with a constant coefficient in {text!r}")
        return cls(alpha, BivariatePoly(poly))


def _factors(a: int, b: int) -> List[str]:
    factors = []
    for name, exponent in (("x", a), ("y", b)):
        if exponent == 1:
            factors.append(name)
        elif exponent > 1:
            factors.append(f"{name}^{exponent}")
    return factors


def hat_bracket(u: HatElement, v: HatElement) -> HatElement:
    """[a1 delta + f, a2 delta + g] = {f, g} + a1 delta(g) - a2 delta(f)."""
    return HatElement(Fraction(0), BivariatePoly(_vector_bracket(_to_vector(u), _to_vector(v))))


def _to_vector(u: HatElement) -> Dict[Hashable, Fraction]:
    vector: Dict[Hashable, Fraction] = dict(u.poly.terms)
    if u.delta_coeff:
        vector[DELTA] = u.delta_coeff
    return vector


def _from_vector(vector: Dict[Hashable, Fraction]) -> HatElement:
    return HatElement(
        vector.get(DELTA, Fraction(0)),
        BivariatePoly({key: c for key, c in vector.items() if key != DELTA}),
    )


def _split(vector: Dict[Hashable, Fraction]) -> Tuple[Fraction, Dict]:
    if DELTA not in vector:
        return Fraction(0), vector
    return vector[DELTA], {key: c for key, c in vector.items() if key != DELTA}


def _vector_bracket(u: Dict[Hashable, Fraction], v: Dict[Hashable, Fraction]) -> Dict:
    alpha, f = _split(u)
    beta, g = _split(v)
    result = poisson_terms(f, g)
    if alpha:
        add_scaled(result, {(a, b): (a + b - 2) * c for (a, b), c in g.items()}, alpha)
    if beta:
        add_scaled(result, {(a, b): (a + b - 2) * c for (a, b), c in f.items()}, -beta)
    return result


def _order_key(key: Hashable) -> tuple:
    if key == DELTA:
        return (1,)
    a, b = key
    return (0, a + b, a)


def _key_degree(key: Hashable) -> int:
    return 0 if key == DELTA else key[0] + key[1]


def hat_basis(degree_cap: int) -> EchelonBasis:
    """An empty echelon basis with the delta coordinate on top."""
    return EchelonBasis(_order_key, _key_degree, _to_vector, _from_vector, degree_cap)


@cache_result()
def _hat_closure(generators: Tuple[HatElement, ...], working_cap: int) -> EchelonBasis:
    return saturate(
        hat_basis(working_cap),
        [_to_vector(g) for g in generators],
        _vector_bracket,
        lambda du, dv: du + dv - 2 <= working_cap,
        total_dimension=monomial_count(working_cap) + 1,
    )


def hat_closure(generators: Iterable[HatElement], working_cap: int) -> EchelonBasis:
    """
    Lie subalgebra of the extended algebra generated below the working cap.

    Same saturation as vector_closure; delta is one extra coordinate of degree 0.

    Args:
        generators: Nonzero elements whose polynomial parts fit the cap
        working_cap: Largest degree of any intermediate

    Returns:
        A frozen EchelonBasis of HatElement values
    """
    generators = tuple(generators)
    require(isinstance(working_cap, int) and working_cap >= 1, f"working cap must be a positive integer, got {working_cap!r}")
    for g in generators:
        require(isinstance(g, HatElement), f"generators must be HatElement values, got {g!r}")
        require(not g.is_zero(), "generators must be nonzero")
        if g.degree > working_cap:
            raise DegreeCapError(f"generator {g} has degree {g.degree} above the working cap {working_cap}")
    return _hat_closure(generators, working_cap)


@dataclass(frozen=True)
class HatBracketStep:
    left: HatElement
    right: HatElement
    claimed: HatElement

    @property
    def value(self) -> HatElement:
        return hat_bracket(self.left, self.right)

    @property
    def holds(self) -> bool:
        return self.value == self.claimed


def hat_generation_chain() -> List[HatBracketStep]:
    """
    Brackets that produce 1, x, y^2 and y^3 from x^2 + 2y and delta + y^3.

    The first six reduce delta + y^3 to a constant by bracketing with x^2 + 2y;
    the last two lift y to y^2 and y^3.
    """
    f = HatElement.of(X ** 2 + 2 * Y)
    g = HatElement(Fraction(1), Y ** 3)
    of = HatElement.of
    steps = [
        (g, of(2 * Y + 6 * X * Y ** 2)),
        (of(Y + 3 * X * Y ** 2), of(2 * X + 12 * X ** 2 * Y - 6 * Y ** 2)),
        (of(X + 6 * X ** 2 * Y - 3 * Y ** 2), of(12 * X ** 3 - 36 * X * Y - 2)),
        (of(X ** 3 - 3 * X * Y), of(6 * Y - 12 * X ** 2)),
        (of(Y - 2 * X ** 2), of(10 * X)),
        (of(X), of(BivariatePoly.constant(-2))),
    ]
    chain = [HatBracketStep(f, right, claimed) for right, claimed in steps]
    chain.append(HatBracketStep(hat_bracket(of(X ** 2), g), of(Y), of(6 * Y ** 2)))
    chain.append(HatBracketStep(of(X * Y ** 2), of(Y ** 2), of(2 * Y ** 3)))
    return chain


def hat_to_field(u: HatElement) -> PlaneVectorField:
    """alpha * delta + f  ->  alpha * (x d/dx + y d/dy) + V_f."""
    return euler_field().scale(u.delta_coeff) + hamiltonian_field(u.poly)
