"""
Danielewski surfaces Y_p = {xy = p(z)} and their locally nilpotent derivations.

Elements of the coordinate ring are kept in the normal form where no monomial
contains both x and y: every xy is rewritten as p(z). A derivation is stored
as its images of x, y and z and must preserve the relation xy - p(z).
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType
from typing import Dict, Hashable, List, Mapping, Optional, Tuple

import sympy

from app.components.echelon import EchelonBasis, saturate
from app.components.polynomials import (
    MINUS_INFINITY,
    Scalar,
    UnivariatePoly,
    add_scaled,
    as_rat,
    format_rat,
    format_terms,
)
from app.utils.cache import cache_result
from app.utils.error_handling import DegreeCapError, IllDefinedDerivationError, InvalidArgumentError, require

logger = logging.getLogger(__name__)

SurfaceMonomial = Tuple[int, int, int]
Point3 = Tuple[Fraction, Fraction, Fraction]

_COMPONENTS = ("x", "y", "z")


def _check_defining_poly(p: UnivariatePoly) -> int:
    require(isinstance(p, UnivariatePoly), f"p must be a UnivariatePoly, got {p!r}")
    require(p.degree >= 2, f"p must have degree at least 2, got {p}")
    return int(p.degree)


@cache_result()
def _p_power(p: UnivariatePoly, m: int) -> Dict[int, Fraction]:
    return dict((p ** m).coefficients)


def _add_term(target: Dict[SurfaceMonomial, Fraction], a: int, b: int, c: int, coeff: Fraction, p: UnivariatePoly) -> None:
    """target += coeff * x^a y^b z^c, rewriting (xy)^m as p(z)^m."""
    m = min(a, b)
    if not m:
        _accumulate(target, (a, b, c), coeff)
        return
    for k, pk in _p_power(p, m).items():
        _accumulate(target, (a - m, b - m, c + k), coeff * pk)


def _accumulate(target: Dict[SurfaceMonomial, Fraction], key: SurfaceMonomial, coeff: Fraction) -> None:
    value = target.get(key, 0) + coeff
    if value:
        target[key] = value
    else:
        target.pop(key, None)


class SurfacePoly:
    """Normal-form element of K[x,y,z]/(xy - p(z))"""

    __slots__ = ("_terms", "_p", "_hash")

    def __init__(self, terms: Optional[Mapping[SurfaceMonomial, Scalar]], p: UnivariatePoly):
        _check_defining_poly(p)
        clean: Dict[SurfaceMonomial, Fraction] = {}
        for monomial, coeff in (terms or {}).items():
            require(
                len(monomial) == 3 and all(isinstance(e, int) and e >= 0 for e in monomial),
                f"exponents must be three non-negative integers, got {monomial!r}",
            )
            value = as_rat(coeff)
            if value:
                _add_term(clean, *monomial, value, p)
        self._terms = clean
        self._p = p
        self._hash: Optional[int] = None

    @classmethod
    def _wrap(cls, terms: Dict[SurfaceMonomial, Fraction], p: UnivariatePoly) -> "SurfacePoly":
        # Trusted constructor: terms already in normal form
        poly = cls.__new__(cls)
        poly._terms = terms
        poly._p = p
        poly._hash = None
        return poly

    @classmethod
    def variable(cls, name: str, p: UnivariatePoly) -> "SurfacePoly":
        require(name in _COMPONENTS, f"variable must be x, y or z, got {name!r}")
        exponents = tuple(int(name == other) for other in _COMPONENTS)
        return cls({exponents: 1}, p)

    @classmethod
    def constant(cls, value: Scalar, p: UnivariatePoly) -> "SurfacePoly":
        return cls({(0, 0, 0): value}, p)

    @classmethod
    def in_z(cls, f: UnivariatePoly, p: UnivariatePoly) -> "SurfacePoly":
        return cls({(0, 0, k): c for k, c in f.coefficients.items()}, p)

    @property
    def terms(self) -> Mapping[SurfaceMonomial, Fraction]:
        return MappingProxyType(self._terms)

    @property
    def p(self) -> UnivariatePoly:
        return self._p

    @property
    def degree(self):
        if not self._terms:
            return MINUS_INFINITY
        return max(sum(monomial) for monomial in self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def _same_ring(self, other: "SurfacePoly") -> None:
        if other._p != self._p:
            raise InvalidArgumentError(f"elements of different surfaces: p = {self._p} and p = {other._p}")

    def __add__(self, other: "SurfacePoly") -> "SurfacePoly":
        self._same_ring(other)
        result = dict(self._terms)
        add_scaled(result, other._terms)
        return SurfacePoly._wrap(result, self._p)

    def __sub__(self, other: "SurfacePoly") -> "SurfacePoly":
        self._same_ring(other)
        result = dict(self._terms)
        add_scaled(result, other._terms, Fraction(-1))
        return SurfacePoly._wrap(result, self._p)

    def __neg__(self) -> "SurfacePoly":
        return SurfacePoly._wrap({m: -c for m, c in self._terms.items()}, self._p)

    def scale(self, factor: Scalar) -> "SurfacePoly":
        value = as_rat(factor)
        if not value:
            return SurfacePoly._wrap({}, self._p)
        return SurfacePoly._wrap({m: c * value for m, c in self._terms.items()}, self._p)

    def __mul__(self, other: "SurfacePoly") -> "SurfacePoly":
        self._same_ring(other)
        result: Dict[SurfaceMonomial, Fraction] = {}
        for (a, b, c), coeff in self._terms.items():
            _add_product(result, (a, b, c), coeff, other._terms, self._p)
        return SurfacePoly._wrap(result, self._p)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SurfacePoly):
            return NotImplemented
        return self._p == other._p and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self._p, frozenset(self._terms.items())))
        return self._hash

    def evaluate(self, x: Scalar, y: Scalar, z: Scalar) -> Fraction:
        xv, yv, zv = as_rat(x), as_rat(y), as_rat(z)
        return sum((c * xv ** a * yv ** b * zv ** k for (a, b, k), c in self._terms.items()), Fraction(0))

    def sorted_terms(self) -> List[Tuple[SurfaceMonomial, Fraction]]:
        return sorted(self._terms.items(), key=lambda item: (sum(item[0]), item[0]), reverse=True)

    def __str__(self) -> str:
        return format_terms(
            (c, [f"{name}^{e}" if e > 1 else name for name, e in zip(_COMPONENTS, monomial) if e])
            for monomial, c in self.sorted_terms()
        )

    def __repr__(self) -> str:
        return f"SurfacePoly('{self}')"

    def to_lines(self) -> str:
        return "\n".join(f"{a} {b} {c} {format_rat(coeff)}" for (a, b, c), coeff in self.sorted_terms())


def _add_product(
    target: Dict[SurfaceMonomial, Fraction],
    monomial: SurfaceMonomial,
    coeff: Fraction,
    terms: Mapping[SurfaceMonomial, Fraction],
    p: UnivariatePoly,
) -> None:
    """target += coeff * monomial * terms, in normal form."""
    a, b, c = monomial
    for (a2, b2, c2), coeff2 in terms.items():
        _add_term(target, a + a2, b + b2, c + c2, coeff * coeff2, p)


def reduce_normal_form(raw: Mapping[SurfaceMonomial, Scalar], p: UnivariatePoly) -> SurfacePoly:
    """
    Rewrite a polynomial in x, y, z modulo xy = p(z).

    Args:
        raw: Map from exponent triples (a, b, c) of x^a y^b z^c to coefficients
        p: The defining polynomial, of degree at least 2

    Returns:
        The unique representative without mixed x, y monomials
    """
    return SurfacePoly(raw, p)


@dataclass(frozen=True)
class SurfaceDerivation:
    """Derivation of K[Y_p] given by the images of x, y and z"""
    dx: SurfacePoly
    dy: SurfacePoly
    dz: SurfacePoly

    def __post_init__(self):
        self.dx._same_ring(self.dy)
        self.dx._same_ring(self.dz)

    @property
    def p(self) -> UnivariatePoly:
        return self.dx.p

    @property
    def images(self) -> Tuple[SurfacePoly, SurfacePoly, SurfacePoly]:
        return self.dx, self.dy, self.dz

    def defect(self) -> SurfacePoly:
        """D(xy - p(z)) = Dx*y + x*Dy - p'(z)*Dz in normal form."""
        p = self.p
        x, y = SurfacePoly.variable("x", p), SurfacePoly.variable("y", p)
        return self.dx * y + x * self.dy - SurfacePoly.in_z(p.derivative(), p) * self.dz

    def is_well_defined(self) -> bool:
        return self.defect().is_zero()

    def times(self, f: SurfacePoly) -> "SurfaceDerivation":
        """The derivation f*D."""
        return SurfaceDerivation(f * self.dx, f * self.dy, f * self.dz)

    def __add__(self, other: "SurfaceDerivation") -> "SurfaceDerivation":
        return SurfaceDerivation(self.dx + other.dx, self.dy + other.dy, self.dz + other.dz)

    def __sub__(self, other: "SurfaceDerivation") -> "SurfaceDerivation":
        return SurfaceDerivation(self.dx - other.dx, self.dy - other.dy, self.dz - other.dz)

    def scale(self, factor: Scalar) -> "SurfaceDerivation":
        return SurfaceDerivation(self.dx.scale(factor), self.dy.scale(factor), self.dz.scale(factor))

    def is_zero(self) -> bool:
        return all(image.is_zero() for image in self.images)

    @property
    def degree(self):
        return max(image.degree for image in self.images)

    def evaluate(self, point: Tuple[Scalar, Scalar, Scalar]) -> Point3:
        return tuple(image.evaluate(*point) for image in self.images)

    def __str__(self) -> str:
        return ", ".join(f"{name} -> {image}" for name, image in zip(_COMPONENTS, self.images))


def standard_derivations(p: UnivariatePoly) -> Tuple[SurfaceDerivation, ...]:
    """
    D1 = p'(z) d/dx + y d/dz, D2 = p'(z) d/dy + x d/dz, D3 = y D1, D4 = x D2.
    """
    _check_defining_poly(p)
    zero = SurfacePoly({}, p)
    slope = SurfacePoly.in_z(p.derivative(), p)
    x, y = SurfacePoly.variable("x", p), SurfacePoly.variable("y", p)
    d1 = SurfaceDerivation(slope, zero, y)
    d2 = SurfaceDerivation(zero, slope, x)
    return d1, d2, d1.times(y), d2.times(x)


def _derive(d: SurfaceDerivation, f: SurfacePoly) -> SurfacePoly:
    # Leibniz rule on normal-form monomials
    p = d.p
    result: Dict[SurfaceMonomial, Fraction] = {}
    for (a, b, c), coeff in f.terms.items():
        if a:
            _add_product(result, (a - 1, b, c), a * coeff, d.dx.terms, p)
        if b:
            _add_product(result, (a, b - 1, c), b * coeff, d.dy.terms, p)
        if c:
            _add_product(result, (a, b, c - 1), c * coeff, d.dz.terms, p)
    return SurfacePoly._wrap(result, p)


def apply_derivation(d: SurfaceDerivation, f: SurfacePoly) -> SurfacePoly:
    """
    Apply a derivation to a normal-form element.

    Raises:
        IllDefinedDerivationError: if D does not preserve xy - p(z)
    """
    if not d.is_well_defined():
        raise IllDefinedDerivationError(f"derivation ({d}) does not preserve xy - p(z)")
    d.dx._same_ring(f)
    return _derive(d, f)


def derivation_bracket(d: SurfaceDerivation, e: SurfaceDerivation) -> SurfaceDerivation:
    """[D, E](w) = D(E(w)) - E(D(w)) for w in x, y, z."""
    d.dx._same_ring(e.dx)
    return SurfaceDerivation(*(_derive(d, ew) - _derive(e, dw) for dw, ew in zip(d.images, e.images)))


def _order_key(key: Hashable) -> tuple:
    component, (a, b, c) = key
    return (a + b + c, component, a, b, c)


def _key_degree(key: Hashable) -> int:
    return sum(key[1])


def _to_vector(d: SurfaceDerivation) -> Dict[Hashable, Fraction]:
    return {(i, monomial): c for i, image in enumerate(d.images) for monomial, c in image.terms.items()}


def derivation_basis(p: UnivariatePoly, degree_cap: int) -> EchelonBasis:
    """An empty echelon basis of derivations of K[Y_p] with images of degree <= cap."""
    _check_defining_poly(p)

    def from_vector(vector: Dict[Hashable, Fraction]) -> SurfaceDerivation:
        images: List[Dict[SurfaceMonomial, Fraction]] = [{}, {}, {}]
        for (i, monomial), c in vector.items():
            images[i][monomial] = c
        return SurfaceDerivation(*(SurfacePoly._wrap(image, p) for image in images))

    return EchelonBasis(_order_key, _key_degree, _to_vector, from_vector, degree_cap)


@cache_result()
def derivation_closure(p: UnivariatePoly, working_cap: int) -> EchelonBasis:
    """
    lie(D1, D2, D3, D4) below the working cap on image degrees.

    Every new element is bracketed with every basis element; pairs whose
    degrees sum to more than cap + 1 are skipped and results above the cap dropped.
    """
    require(isinstance(working_cap, int) and working_cap >= 1, f"working cap must be a positive integer, got {working_cap!r}")
    generators = standard_derivations(p)
    if max(g.degree for g in generators) > working_cap:
        raise DegreeCapError(f"the generators do not fit the working cap {working_cap}")
    basis = derivation_basis(p, working_cap)

    def bracket(u: Dict[Hashable, Fraction], v: Dict[Hashable, Fraction]) -> Dict[Hashable, Fraction]:
        return _to_vector(derivation_bracket(basis.from_vector(u), basis.from_vector(v)))

    return saturate(
        basis,
        [_to_vector(g) for g in generators],
        bracket,
        lambda du, dv: du + dv - 1 <= working_cap,
    )


def squarefree(p: UnivariatePoly) -> bool:
    """Whether p has only simple roots."""
    z = sympy.Symbol("z")
    expr = sum(sympy.Rational(c.numerator, c.denominator) * z ** k for k, c in p.coefficients.items())
    return sympy.Poly(expr, z, domain="QQ").is_sqf


@dataclass(frozen=True)
class SurfaceClosureReport:
    p: UnivariatePoly
    nu: int
    working_cap: int
    dimension: int
    squarefree: bool
    kernels_hold: bool
    along_x: Dict[int, bool] = field(default_factory=dict)
    along_y: Dict[int, bool] = field(default_factory=dict)

    @property
    def expected_start(self) -> int:
        return max(self.nu - 2, 0)

    @property
    def holds(self) -> bool:
        """Every y^k D1 and x^k D2 with nu - 2 <= k is present."""
        return all(
            present
            for flags in (self.along_x, self.along_y)
            for k, present in flags.items()
            if k >= self.expected_start
        )


def surface_closure_containment(p: UnivariatePoly, k_max: int, working_cap: int) -> SurfaceClosureReport:
    """
    Check which y^k D1 and x^k D2 lie in the computed lie(D1, D2, D3, D4).

    Args:
        p: Defining polynomial of degree nu >= 2
        k_max: Largest power k reported
        working_cap: Cap on the image degrees during saturation

    Returns:
        Presence flags for k = 0..k_max and the facts about p and the basis
    """
    nu = _check_defining_poly(p)
    require(isinstance(k_max, int) and k_max >= 0, f"k_max must be a non-negative integer, got {k_max!r}")
    d1, d2, _, _ = standard_derivations(p)
    if max(k_max + nu - 1, k_max + 1) > working_cap:
        raise DegreeCapError(f"y^{k_max} D1 has degree above the working cap {working_cap}")

    basis = derivation_closure(p, working_cap)
    x, y = SurfacePoly.variable("x", p), SurfacePoly.variable("y", p)
    along_x: Dict[int, bool] = {}
    along_y: Dict[int, bool] = {}
    y_power = x_power = SurfacePoly.constant(1, p)
    for k in range(k_max + 1):
        along_x[k] = basis.contains(d1.times(y_power))
        along_y[k] = basis.contains(d2.times(x_power))
        y_power, x_power = y_power * y, x_power * x

    kernels_hold = _derive(d1, y).is_zero() and _derive(d2, x).is_zero()
    report = SurfaceClosureReport(p, nu, working_cap, len(basis), squarefree(p), kernels_hold, along_x, along_y)
    logger.info("Surface closure for p = %s: dimension %d, containment %s", p, report.dimension, report.holds)
    return report


def tangency_spanning(p: UnivariatePoly, point: Tuple[Scalar, Scalar, Scalar]) -> bool:
    """
    Whether D1 and D2 span a plane at a point of Y_p.

    Raises:
        InvalidArgumentError: if the point is not on the surface
    """
    x, y, z = (as_rat(value) for value in point)
    require(x * y == p.evaluate(z), f"({x}, {y}, {z}) is not on xy = p(z)")
    d1, d2, _, _ = standard_derivations(p)
    u, v = d1.evaluate((x, y, z)), d2.evaluate((x, y, z))
    minors = (u[0] * v[1] - u[1] * v[0], u[0] * v[2] - u[2] * v[0], u[1] * v[2] - u[2] * v[1])
    return any(minors)
