"""
Exact polynomial arithmetic for the plane Lie algebra toolkit.

Polynomials in x, y are sparse maps from exponent pairs to rationals. The
Poisson bracket {f, g} = f_x g_y - f_y g_x makes them a Lie algebra; Hamiltonian
vector fields, divergence and univariate polynomials live here too.
"""

import logging
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from tokenize import TokenError
from types import MappingProxyType
from typing import Dict, Iterable, List, Mapping, Optional, Tuple, Union

from sympy import Poly, Symbol, SympifyError
from sympy.parsing.sympy_parser import (
    convert_xor,
    implicit_multiplication_application,
    parse_expr,
    standard_transformations,
)
from sympy.polys.polyerrors import BasePolynomialError

from app.utils.error_handling import InvalidArgumentError, UsageError, require

logger = logging.getLogger(__name__)

Rat = Fraction
Monomial = Tuple[int, int]
Scalar = Union[int, Fraction, str]

# Degree of the zero polynomial
MINUS_INFINITY = -math.inf


def as_rat(value: object) -> Fraction:
    """
    Convert an exact scalar to a Fraction.

    Args:
        value: int, Fraction, numbers.Rational or a "num/den" string

    Returns:
        The value in lowest terms with positive denominator
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise InvalidArgumentError(f"expected a rational number, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Rational):
        return Fraction(int(value.numerator), int(value.denominator))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise InvalidArgumentError(f"malformed rational literal {value!r}") from None
    if isinstance(value, float):
        raise InvalidArgumentError(f"floating point value {value!r} is not exact")
    raise InvalidArgumentError(f"expected a rational number, got {value!r}")


def format_rat(value: Fraction) -> str:
    """Serialise a rational as "numerator/denominator"."""
    return f"{value.numerator}/{value.denominator}"


def monomial_order_key(monomial: Monomial) -> Tuple[int, int]:
    """Graded lexicographic key with x > y: larger keys are larger monomials."""
    return monomial[0] + monomial[1], monomial[0]


def format_scalar(coeff: Fraction) -> str:
    if coeff.denominator == 1:
        return str(coeff.numerator)
    return f"{coeff.numerator}/{coeff.denominator}"


def _format_term(coeff: Fraction, factors: List[str]) -> str:
    """Render |coeff| * factors; the sign is handled by the caller."""
    magnitude = abs(coeff)
    if not factors:
        return format_scalar(magnitude)
    body = "*".join(factors)
    if magnitude == 1:
        return body
    return f"{format_scalar(magnitude)}*{body}"


def _power(name: str, exponent: int) -> List[str]:
    if exponent == 0:
        return []
    if exponent == 1:
        return [name]
    return [f"{name}^{exponent}"]


def format_terms(terms: Iterable[Tuple[Fraction, List[str]]]) -> str:
    """Join signed terms as "t1 + t2 - t3"; an empty sum renders as "0"."""
    pieces: List[str] = []
    for coeff, factors in terms:
        text = _format_term(coeff, factors)
        if not pieces:
            pieces.append(text if coeff > 0 else f"-{text}")
        else:
            pieces.append(f"+ {text}" if coeff > 0 else f"- {text}")
    return " ".join(pieces) if pieces else "0"


def parse_terms(text: str, variables: Tuple[str, ...]) -> Dict[Tuple[int, ...], Fraction]:
    """
    Parse a polynomial literal into exponent tuples over ``variables``.

    The grammar is sympy's with implicit multiplication and "^" for powers;
    single-letter variables only, so "2xy" reads as 2*x*y.

    Args:
        text: The literal, e.g. "x^2+2y"
        variables: Variable names, in the order of the exponent tuples

    Returns:
        Map from exponent tuples to nonzero coefficients
    """
    cleaned = text.replace("−", "-").strip()
    allowed = re.compile(r"^[0-9" + "".join(variables) + r"+\-*/^(). ]+$")
    if not cleaned or not allowed.match(cleaned):
        raise UsageError(f"malformed polynomial {text!r}")
    symbols = {name: Symbol(name) for name in variables}
    transformations = standard_transformations + (implicit_multiplication_application, convert_xor)
    try:
        expr = parse_expr(cleaned, local_dict=dict(symbols), transformations=transformations)
        poly = Poly(expr, *symbols.values(), domain="QQ")
    except (SyntaxError, TokenError, TypeError, ValueError, ZeroDivisionError, SympifyError, BasePolynomialError) as e:
        raise UsageError(f"malformed polynomial {text!r}: {e}") from None
    return {exps: Fraction(int(c.p), int(c.q)) for exps, c in poly.terms() if c != 0}


def add_scaled(target: Dict, source: Mapping, factor: Fraction = Fraction(1)) -> None:
    """target += factor * source, in place, dropping cancelled coefficients."""
    for key, coeff in source.items():
        value = target.get(key, 0) + factor * coeff
        if value:
            target[key] = value
        else:
            target.pop(key, None)


class BivariatePoly:
    """Immutable sparse polynomial in x, y with exact rational coefficients"""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Optional[Mapping[Monomial, Scalar]] = None):
        clean: Dict[Monomial, Fraction] = {}
        for monomial, coeff in (terms or {}).items():
            a, b = monomial
            require(
                isinstance(a, int) and isinstance(b, int) and a >= 0 and b >= 0,
                f"exponents must be non-negative integers, got {monomial!r}",
            )
            value = as_rat(coeff)
            if value:
                clean[(a, b)] = value
        self._terms = clean
        self._hash: Optional[int] = None

    @classmethod
    def _wrap(cls, terms: Dict[Monomial, Fraction]) -> "BivariatePoly":
        # Trusted constructor: terms already hold nonzero Fractions
        poly = cls.__new__(cls)
        poly._terms = terms
        poly._hash = None
        return poly

    @classmethod
    def monomial(cls, a: int, b: int, coeff: Scalar = 1) -> "BivariatePoly":
        return cls({(a, b): coeff})

    @classmethod
    def constant(cls, value: Scalar) -> "BivariatePoly":
        return cls({(0, 0): value})

    @property
    def terms(self) -> Mapping[Monomial, Fraction]:
        return MappingProxyType(self._terms)

    @property
    def degree(self) -> Union[int, float]:
        """Total degree; MINUS_INFINITY for the zero polynomial."""
        if not self._terms:
            return MINUS_INFINITY
        return max(a + b for a, b in self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def coefficient(self, a: int, b: int) -> Fraction:
        return self._terms.get((a, b), Fraction(0))

    def leading_monomial(self) -> Optional[Monomial]:
        if not self._terms:
            return None
        return max(self._terms, key=monomial_order_key)

    def sorted_terms(self) -> List[Tuple[Monomial, Fraction]]:
        """Terms in decreasing graded lexicographic order."""
        return sorted(self._terms.items(), key=lambda item: monomial_order_key(item[0]), reverse=True)

    # Arithmetic

    @staticmethod
    def _coerce(other: object) -> Optional["BivariatePoly"]:
        if isinstance(other, BivariatePoly):
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return BivariatePoly.constant(other)
        return None

    def __add__(self, other: object) -> "BivariatePoly":
        other_poly = self._coerce(other)
        if other_poly is None:
            return NotImplemented
        result = dict(self._terms)
        add_scaled(result, other_poly._terms)
        return BivariatePoly._wrap(result)

    __radd__ = __add__

    def __neg__(self) -> "BivariatePoly":
        return BivariatePoly._wrap({m: -c for m, c in self._terms.items()})

    def __sub__(self, other: object) -> "BivariatePoly":
        other_poly = self._coerce(other)
        if other_poly is None:
            return NotImplemented
        result = dict(self._terms)
        add_scaled(result, other_poly._terms, Fraction(-1))
        return BivariatePoly._wrap(result)

    def __rsub__(self, other: object) -> "BivariatePoly":
        return (-self) + other

    def scale(self, factor: Scalar) -> "BivariatePoly":
        value = as_rat(factor)
        if not value:
            return ZERO
        return BivariatePoly._wrap({m: c * value for m, c in self._terms.items()})

    def __mul__(self, other: object) -> "BivariatePoly":
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.scale(other)
        if not isinstance(other, BivariatePoly):
            return NotImplemented
        result: Dict[Monomial, Fraction] = {}
        for (a, b), c in self._terms.items():
            for (r, s), d in other._terms.items():
                key = (a + r, b + s)
                value = result.get(key, 0) + c * d
                if value:
                    result[key] = value
                else:
                    result.pop(key, None)
        return BivariatePoly._wrap(result)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "BivariatePoly":
        require(isinstance(exponent, int) and exponent >= 0, f"exponent must be a non-negative integer, got {exponent!r}")
        result = ONE
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __eq__(self, other: object) -> bool:
        other_poly = self._coerce(other)
        if other_poly is None:
            return NotImplemented
        return self._terms == other_poly._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def evaluate(self, x: Scalar, y: Scalar) -> Fraction:
        """Exact value at the rational point (x, y)."""
        xv, yv = as_rat(x), as_rat(y)
        return sum((c * xv ** a * yv ** b for (a, b), c in self._terms.items()), Fraction(0))

    def rescale(self, x_factor: Scalar, y_factor: Scalar) -> "BivariatePoly":
        """Substitute x -> x_factor * x and y -> y_factor * y."""
        sx, sy = as_rat(x_factor), as_rat(y_factor)
        result = {(a, b): c * sx ** a * sy ** b for (a, b), c in self._terms.items()}
        return BivariatePoly._wrap({m: c for m, c in result.items() if c})

    # Text forms

    def __str__(self) -> str:
        return format_terms(
            (c, _power("x", a) + _power("y", b)) for (a, b), c in self.sorted_terms()
        )

    def __repr__(self) -> str:
        return f"BivariatePoly('{self}')"

    def to_lines(self) -> str:
        """One "a b num/den" line per term, in decreasing term order."""
        return "\n".join(f"{a} {b} {format_rat(c)}" for (a, b), c in self.sorted_terms())

    @classmethod
    def from_lines(cls, text: str) -> "BivariatePoly":
        terms: Dict[Monomial, Fraction] = {}
        for number, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            fields = line.split()
            if len(fields) != 3:
                raise InvalidArgumentError(f"line {number}: expected 'a b num/den', got {line!r}")
            try:
                monomial = (int(fields[0]), int(fields[1]))
            except ValueError:
                raise InvalidArgumentError(f"line {number}: malformed exponents in {line!r}") from None
            require(monomial not in terms, f"line {number}: repeated monomial {monomial}")
            terms[monomial] = as_rat(fields[2])
        return cls(terms)

    @classmethod
    def parse(cls, text: str) -> "BivariatePoly":
        """
        Parse the command-line grammar, e.g. "x^2+2y", "3*x*y^2 - 1/2".

        Args:
            text: Sum of terms c*x^a*y^b; coefficients and exponents may be omitted

        Returns:
            The parsed polynomial
        """
        return cls(parse_terms(text, ("x", "y")))


ZERO = BivariatePoly._wrap({})
ONE = BivariatePoly._wrap({(0, 0): Fraction(1)})
X = BivariatePoly._wrap({(1, 0): Fraction(1)})
Y = BivariatePoly._wrap({(0, 1): Fraction(1)})


def poisson_terms(u: Mapping[Monomial, Fraction], v: Mapping[Monomial, Fraction]) -> Dict[Monomial, Fraction]:
    """
    Bracket of two term maps via {x^a y^b, x^r y^s} = (as - br) x^(a+r-1) y^(b+s-1).

    Args:
        u: Terms of the left argument
        v: Terms of the right argument

    Returns:
        Terms of the bracket, without zero coefficients
    """
    result: Dict[Monomial, Fraction] = {}
    for (a, b), c in u.items():
        for (r, s), d in v.items():
            det = a * s - b * r
            if det:
                key = (a + r - 1, b + s - 1)
                value = result.get(key, 0) + det * c * d
                if value:
                    result[key] = value
                else:
                    result.pop(key, None)
    return result


def poisson_bracket(f: BivariatePoly, g: BivariatePoly) -> BivariatePoly:
    """Standard Poisson bracket {f, g}, evaluated term by term."""
    return BivariatePoly._wrap(poisson_terms(f._terms, g._terms))


def partial_derivative(f: BivariatePoly, var: str) -> BivariatePoly:
    """
    Formal partial derivative.

    Args:
        f: The polynomial
        var: "x" or "y"

    Returns:
        df/dvar
    """
    if var == "x":
        return BivariatePoly._wrap({(a - 1, b): a * c for (a, b), c in f._terms.items() if a})
    if var == "y":
        return BivariatePoly._wrap({(a, b - 1): b * c for (a, b), c in f._terms.items() if b})
    raise InvalidArgumentError(f"variable must be 'x' or 'y', got {var!r}")


def bracket_via_partials(f: BivariatePoly, g: BivariatePoly) -> BivariatePoly:
    """The bracket from its definition f_x g_y - f_y g_x."""
    return (partial_derivative(f, "x") * partial_derivative(g, "y")
            - partial_derivative(f, "y") * partial_derivative(g, "x"))


@dataclass(frozen=True)
class PlaneVectorField:
    """Polynomial vector field f1 d/dx + f2 d/dy"""
    f1: BivariatePoly
    f2: BivariatePoly

    def apply(self, h: BivariatePoly) -> BivariatePoly:
        """Derivative of h along the field."""
        return self.f1 * partial_derivative(h, "x") + self.f2 * partial_derivative(h, "y")

    def commutator(self, other: "PlaneVectorField") -> "PlaneVectorField":
        """Lie bracket [V, W] with components V(W^i) - W(V^i)."""
        return PlaneVectorField(
            self.apply(other.f1) - other.apply(self.f1),
            self.apply(other.f2) - other.apply(self.f2),
        )

    def __add__(self, other: "PlaneVectorField") -> "PlaneVectorField":
        return PlaneVectorField(self.f1 + other.f1, self.f2 + other.f2)

    def __sub__(self, other: "PlaneVectorField") -> "PlaneVectorField":
        return PlaneVectorField(self.f1 - other.f1, self.f2 - other.f2)

    def scale(self, factor: Scalar) -> "PlaneVectorField":
        return PlaneVectorField(self.f1.scale(factor), self.f2.scale(factor))

    def is_zero(self) -> bool:
        return self.f1.is_zero() and self.f2.is_zero()

    def evaluate(self, x: Scalar, y: Scalar) -> Tuple[Fraction, Fraction]:
        return self.f1.evaluate(x, y), self.f2.evaluate(x, y)

    def __str__(self) -> str:
        return f"({self.f1})*d/dx + ({self.f2})*d/dy"


ZERO_FIELD = PlaneVectorField(ZERO, ZERO)


def hamiltonian_field(f: BivariatePoly) -> PlaneVectorField:
    """V_f = f_y d/dx - f_x d/dy."""
    return PlaneVectorField(partial_derivative(f, "y"), -partial_derivative(f, "x"))


def field_divergence(field: PlaneVectorField) -> BivariatePoly:
    """d f1/dx + d f2/dy."""
    return partial_derivative(field.f1, "x") + partial_derivative(field.f2, "y")


def field_bracket(first: PlaneVectorField, second: PlaneVectorField) -> PlaneVectorField:
    """
    Bracket for which f -> V_f is a Lie algebra homomorphism.

    With the usual commutator, [V_f, V_g] = -V_{f,g}; this bracket is the
    commutator taken in the opposite order, so field_bracket(V_f, V_g) = V_{f,g}.
    """
    return second.commutator(first)


def euler_field() -> PlaneVectorField:
    """Euler field x d/dx + y d/dy."""
    return PlaneVectorField(X, Y)


class UnivariatePoly:
    """Immutable sparse polynomial in one variable with rational coefficients"""

    __slots__ = ("_coeffs", "_hash")

    def __init__(self, coeffs: Optional[Mapping[int, Scalar]] = None):
        clean: Dict[int, Fraction] = {}
        for exponent, coeff in (coeffs or {}).items():
            require(isinstance(exponent, int) and exponent >= 0,
                    f"exponents must be non-negative integers, got {exponent!r}")
            value = as_rat(coeff)
            if value:
                clean[exponent] = value
        self._coeffs = clean
        self._hash: Optional[int] = None

    @classmethod
    def from_coefficients(cls, coefficients: Iterable[Scalar]) -> "UnivariatePoly":
        """Build c0 + c1 z + ... + cn z^n from the list [c0, ..., cn]."""
        return cls(dict(enumerate(coefficients)))

    @classmethod
    def monomial(cls, exponent: int, coeff: Scalar = 1) -> "UnivariatePoly":
        return cls({exponent: coeff})

    @property
    def coefficients(self) -> Mapping[int, Fraction]:
        return MappingProxyType(self._coeffs)

    @property
    def degree(self) -> Union[int, float]:
        return max(self._coeffs) if self._coeffs else MINUS_INFINITY

    def coefficient(self, exponent: int) -> Fraction:
        return self._coeffs.get(exponent, Fraction(0))

    def support(self) -> List[int]:
        return sorted(self._coeffs)

    def is_zero(self) -> bool:
        return not self._coeffs

    def evaluate(self, z: Scalar) -> Fraction:
        zv = as_rat(z)
        return sum((c * zv ** k for k, c in self._coeffs.items()), Fraction(0))

    def derivative(self) -> "UnivariatePoly":
        return UnivariatePoly({k - 1: k * c for k, c in self._coeffs.items() if k})

    def __add__(self, other: "UnivariatePoly") -> "UnivariatePoly":
        result = dict(self._coeffs)
        add_scaled(result, other._coeffs)
        return UnivariatePoly(result)

    def __sub__(self, other: "UnivariatePoly") -> "UnivariatePoly":
        result = dict(self._coeffs)
        add_scaled(result, other._coeffs, Fraction(-1))
        return UnivariatePoly(result)

    def scale(self, factor: Scalar) -> "UnivariatePoly":
        value = as_rat(factor)
        return UnivariatePoly({k: c * value for k, c in self._coeffs.items()})

    def __mul__(self, other: "UnivariatePoly") -> "UnivariatePoly":
        result: Dict[int, Fraction] = {}
        for k, c in self._coeffs.items():
            for j, d in other._coeffs.items():
                result[k + j] = result.get(k + j, 0) + c * d
        return UnivariatePoly(result)

    def __pow__(self, exponent: int) -> "UnivariatePoly":
        require(isinstance(exponent, int) and exponent >= 0, f"exponent must be a non-negative integer, got {exponent!r}")
        result = UnivariatePoly({0: 1})
        for _ in range(exponent):
            result = result * self
        return result

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, UnivariatePoly):
            return NotImplemented
        return self._coeffs == other._coeffs

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._coeffs.items()))
        return self._hash

    def to_string(self, variable: str = "z") -> str:
        return format_terms((c, _power(variable, k)) for k, c in sorted(self._coeffs.items(), reverse=True))

    def __str__(self) -> str:
        return self.to_string()

    def __repr__(self) -> str:
        return f"UnivariatePoly('{self}')"


@dataclass(frozen=True)
class BracketStep:
    """A bracket {left, right} together with the value it is claimed to take"""
    left: BivariatePoly
    right: BivariatePoly
    claimed: BivariatePoly

    @property
    def value(self) -> BivariatePoly:
        return poisson_bracket(self.left, self.right)

    @property
    def holds(self) -> bool:
        return self.value == self.claimed


def generation_chain() -> List[BracketStep]:
    """
    Brackets with x^2 + 2y that lower y^3 step by step down to a constant.

    The fourth argument is x^3 - 3xy; x^3 - 4xy would give 8y - 14x^2 instead.
    """
    f = X ** 2 + 2 * Y
    arguments_and_values = [
        (Y ** 3, 6 * X * Y ** 2),
        (X * Y ** 2, 4 * X ** 2 * Y - 2 * Y ** 2),
        (2 * X ** 2 * Y - Y ** 2, 4 * X ** 3 - 12 * X * Y),
        (X ** 3 - 3 * X * Y, 6 * Y - 12 * X ** 2),
        (Y - 2 * X ** 2, 10 * X),
        (X, BivariatePoly.constant(-2)),
    ]
    return [BracketStep(f, g, value) for g, value in arguments_and_values]


@dataclass(frozen=True)
class Identity:
    label: str
    computed: BivariatePoly
    closed_form: BivariatePoly

    @property
    def holds(self) -> bool:
        return self.computed == self.closed_form


def ladder_identities(n: int) -> List[Identity]:
    """
    Closed forms for the repeated brackets that walk monomials up and down.

    Args:
        n: Largest exponent to check

    Returns:
        One Identity per family and exponent 1..n
    """
    require(isinstance(n, int) and n >= 1, f"n must be a positive integer, got {n!r}")
    identities: List[Identity] = []
    for k in range(1, n + 1):
        y_k, x_k = Y ** k, X ** k
        identities.append(Identity(
            f"{{{{x^2, y^{k}}}, y^{k}}}",
            poisson_bracket(poisson_bracket(X ** 2, y_k), y_k),
            BivariatePoly.monomial(0, 2 * (k - 1), 2 * k * k),
        ))
        identities.append(Identity(
            f"{{{{{{y^3, x^{k}}}, x^{k}}}, x^{k}}}",
            poisson_bracket(poisson_bracket(poisson_bracket(Y ** 3, x_k), x_k), x_k),
            BivariatePoly.monomial(3 * (k - 1), 0, -6 * k ** 3),
        ))
        identities.append(Identity(f"{{x, y^{k}}}", poisson_bracket(X, y_k), BivariatePoly.monomial(0, k - 1, k)))
        identities.append(Identity(f"{{x^{k}, y}}", poisson_bracket(x_k, Y), BivariatePoly.monomial(k - 1, 0, k)))
        for s in range(1, n + 1):
            identities.append(Identity(
                f"{{x^{k}, y^{s}}}",
                poisson_bracket(x_k, Y ** s),
                BivariatePoly.monomial(k - 1, s - 1, k * s),
            ))
    logger.debug("Built %d ladder identities up to exponent %d", len(identities), n)
    return identities
