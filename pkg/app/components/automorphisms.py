"""
Triangular automorphisms of the plane and the groups G_{r,s} they generate.

L_r(alpha): (x, y) -> (x + alpha y^r, y)
R_s(beta):  (x, y) -> (x, y + beta x^s)

Besides applying words of such maps to tuples of rational points, this module
normalises a tuple into the set Omega^m_1 with an explicit word in L_1 and R_2,
decides the character lattice criterion, and builds interpolating polynomials
and the separating vector fields made from them.
"""

import logging
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Callable, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Set, Tuple

import sympy

from app.components.polynomials import (
    ZERO,
    X,
    Y,
    BivariatePoly,
    PlaneVectorField,
    Scalar,
    UnivariatePoly,
    as_rat,
    format_rat,
)
from app.utils.error_handling import (
    DuplicatePointsError,
    InterpolationError,
    InvalidArgumentError,
    NotLocallyNilpotentError,
    OriginInTupleError,
    require,
)

logger = logging.getLogger(__name__)

Point = Tuple[Fraction, Fraction]

# Default bound on the number of terms of an exponential series
MAX_SERIES_ORDER = 64


@dataclass(frozen=True)
class TriangularMap:
    """L_r(alpha) for kind "L", R_s(beta) for kind "R\""""
    kind: str
    exponent: int
    param: Fraction

    def __post_init__(self):
        require(self.kind in ("L", "R"), f"kind must be 'L' or 'R', got {self.kind!r}")
        require(isinstance(self.exponent, int) and self.exponent >= 0,
                f"exponent must be a non-negative integer, got {self.exponent!r}")
        object.__setattr__(self, "param", as_rat(self.param))

    def apply(self, point: Point) -> Point:
        x, y = point
        if self.kind == "L":
            return x + self.param * y ** self.exponent, y
        return x, y + self.param * x ** self.exponent

    def inverse(self) -> "TriangularMap":
        return TriangularMap(self.kind, self.exponent, -self.param)

    def mirrored(self) -> "TriangularMap":
        """The same map after exchanging the two coordinates."""
        return TriangularMap("R" if self.kind == "L" else "L", self.exponent, self.param)

    def as_polynomial_map(self) -> "PolynomialMap":
        if self.kind == "L":
            return PolynomialMap(X + Y ** self.exponent * self.param, Y)
        return PolynomialMap(X, Y + X ** self.exponent * self.param)

    def to_line(self) -> str:
        return f"{self.kind} {self.exponent} {format_rat(self.param)}"

    @classmethod
    def from_line(cls, line: str) -> "TriangularMap":
        fields = line.split()
        if len(fields) != 3:
            raise InvalidArgumentError(f"expected 'L r num/den' or 'R s num/den', got {line!r}")
        try:
            exponent = int(fields[1])
        except ValueError:
            raise InvalidArgumentError(f"malformed exponent in {line!r}") from None
        return cls(fields[0], exponent, as_rat(fields[2]))

    def __str__(self) -> str:
        return f"{self.kind}_{self.exponent}({self.param})"


def left_map(r: int, alpha: Scalar) -> TriangularMap:
    return TriangularMap("L", r, as_rat(alpha))


def right_map(s: int, beta: Scalar) -> TriangularMap:
    return TriangularMap("R", s, as_rat(beta))


@dataclass(frozen=True)
class PointTuple:
    """An ordered tuple of m >= 1 rational points"""
    points: Tuple[Point, ...]

    def __post_init__(self):
        require(len(self.points) >= 1, "a point tuple needs at least one point")
        object.__setattr__(self, "points", tuple((as_rat(x), as_rat(y)) for x, y in self.points))

    @classmethod
    def of(cls, *points: Tuple[Scalar, Scalar]) -> "PointTuple":
        return cls(tuple(points))

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[Point]:
        return iter(self.points)

    def __getitem__(self, index: int) -> Point:
        return self.points[index]

    def xs(self) -> List[Fraction]:
        return [x for x, _ in self.points]

    def ys(self) -> List[Fraction]:
        return [y for _, y in self.points]

    def contains_origin(self) -> bool:
        return any(x == 0 and y == 0 for x, y in self.points)

    def has_duplicates(self) -> bool:
        return len(set(self.points)) != len(self.points)

    def swapped(self) -> "PointTuple":
        return PointTuple(tuple((y, x) for x, y in self.points))

    def to_lines(self) -> str:
        return "\n".join(f"{format_rat(x)} {format_rat(y)}" for x, y in self.points)

    @classmethod
    def from_lines(cls, text: str) -> "PointTuple":
        points = []
        for line in text.splitlines():
            if not line.strip():
                continue
            fields = line.split()
            if len(fields) != 2:
                raise InvalidArgumentError(f"expected 'x y' per line, got {line!r}")
            points.append((as_rat(fields[0]), as_rat(fields[1])))
        return cls(tuple(points))

    def __str__(self) -> str:
        return ", ".join(f"({x}, {y})" for x, y in self.points)


@dataclass(frozen=True)
class AutomorphismWord:
    """Maps applied left to right"""
    maps: Tuple[TriangularMap, ...] = ()

    def apply(self, t: PointTuple) -> PointTuple:
        return apply_word(self, t)

    def inverse(self) -> "AutomorphismWord":
        return AutomorphismWord(tuple(m.inverse() for m in reversed(self.maps)))

    def mirrored(self) -> "AutomorphismWord":
        return AutomorphismWord(tuple(m.mirrored() for m in self.maps))

    def __add__(self, other: "AutomorphismWord") -> "AutomorphismWord":
        return AutomorphismWord(self.maps + other.maps)

    def __len__(self) -> int:
        return len(self.maps)

    def __iter__(self) -> Iterator[TriangularMap]:
        return iter(self.maps)

    def signature(self) -> Set[Tuple[str, int]]:
        """The (kind, exponent) pairs used by the word."""
        return {(m.kind, m.exponent) for m in self.maps}

    def as_polynomial_map(self) -> "PolynomialMap":
        result = PolynomialMap(X, Y)
        for m in self.maps:
            result = m.as_polynomial_map().compose(result)
        return result

    def to_lines(self) -> str:
        return "\n".join(m.to_line() for m in self.maps)

    @classmethod
    def from_lines(cls, text: str) -> "AutomorphismWord":
        return cls(tuple(TriangularMap.from_line(line) for line in text.splitlines() if line.strip()))


def apply_word(w: AutomorphismWord, t: PointTuple) -> PointTuple:
    """Apply every map of the word, in order, to every point of the tuple."""
    points = t.points
    for m in w.maps:
        points = tuple(m.apply(point) for point in points)
    return PointTuple(points)


def substitute(f: BivariatePoly, x_image: BivariatePoly, y_image: BivariatePoly) -> BivariatePoly:
    """f(x_image, y_image)."""
    result = ZERO
    for (a, b), c in f.terms.items():
        result = result + (x_image ** a) * (y_image ** b) * c
    return result


@dataclass(frozen=True)
class PolynomialMap:
    """(x, y) -> (x_image(x, y), y_image(x, y))"""
    x_image: BivariatePoly
    y_image: BivariatePoly

    def apply(self, point: Point) -> Point:
        x, y = point
        return self.x_image.evaluate(x, y), self.y_image.evaluate(x, y)

    def compose(self, inner: "PolynomialMap") -> "PolynomialMap":
        """self after inner: the point is moved by ``inner`` first."""
        return PolynomialMap(
            substitute(self.x_image, inner.x_image, inner.y_image),
            substitute(self.y_image, inner.x_image, inner.y_image),
        )

    def __str__(self) -> str:
        return f"({self.x_image}, {self.y_image})"


def flow_map(field: PlaneVectorField, time: Scalar) -> TriangularMap:
    """
    The time-t flow of c*y^r d/dx or c*x^s d/dy as a triangular map.

    Args:
        field: A field with one monomial component, y^r in the first or x^s in the second
        time: Flow time

    Returns:
        L_r(c*t) or R_s(c*t)
    """
    t = as_rat(time)
    f1, f2 = field.f1, field.f2
    if f2.is_zero() and len(f1) == 1:
        (a, b), c = next(iter(f1.terms.items()))
        if a == 0:
            return left_map(b, c * t)
    if f1.is_zero() and len(f2) == 1:
        (a, b), c = next(iter(f2.terms.items()))
        if b == 0:
            return right_map(a, c * t)
    raise InvalidArgumentError(f"{field} is not of the form c*y^r d/dx or c*x^s d/dy")


def exponential_map(field: PlaneVectorField, time: Scalar, max_order: int = MAX_SERIES_ORDER) -> PolynomialMap:
    """
    exp(t V) applied to the coordinates: sum over k of t^k/k! V^k(x), likewise for y.

    Raises:
        NotLocallyNilpotentError: if V^k(x) or V^k(y) is still nonzero after max_order steps
    """
    t = as_rat(time)

    def series(start: BivariatePoly) -> BivariatePoly:
        total = ZERO
        term = start
        k = 0
        while not term.is_zero():
            if k > max_order:
                raise NotLocallyNilpotentError(f"{field} is not locally nilpotent on {start} within {max_order} steps")
            total = total + term * (t ** k / math.factorial(k))
            term = field.apply(term)
            k += 1
        return total

    return PolynomialMap(series(X), series(Y))


def omega_membership(t: PointTuple, d: int) -> bool:
    """
    True iff both coordinates are nonzero at every point and have pairwise
    distinct d-th powers across the points.
    """
    require(isinstance(d, int) and d >= 1, f"d must be a positive integer, got {d!r}")
    for values in (t.xs(), t.ys()):
        if any(v == 0 for v in values):
            return False
        if len({v ** d for v in values}) != len(values):
            return False
    return True


def normalization_conditions(t: PointTuple) -> Tuple[bool, bool, bool, bool]:
    """
    The conditions established by the four normalisation steps:
    x_i != 0; no pair P_i = -P_j; x_i^2 pairwise distinct; y_i nonzero and pairwise distinct.
    """
    xs, ys = t.xs(), t.ys()
    pairs = list(combinations(range(len(t)), 2))
    nonzero_x = all(x != 0 for x in xs)
    no_antipodes = all(t[i] != (-t[j][0], -t[j][1]) for i, j in pairs)
    distinct_squares = nonzero_x and len({x * x for x in xs}) == len(xs)
    distinct_y = all(y != 0 for y in ys) and len(set(ys)) == len(ys)
    return nonzero_x, no_antipodes, distinct_squares, distinct_y


def parameter_candidates() -> Iterator[Fraction]:
    """0, 1, -1, 2, -2, 3, ..."""
    yield Fraction(0)
    n = 1
    while True:
        yield Fraction(n)
        yield Fraction(-n)
        n += 1


def first_allowed(excluded: Iterable[Fraction]) -> Fraction:
    """The first candidate parameter outside a finite excluded set."""
    banned = set(excluded)
    for candidate in parameter_candidates():
        if candidate not in banned:
            return candidate
    raise AssertionError("unreachable")


def _step1_excluded(t: PointTuple) -> Set[Fraction]:
    # x_i + alpha y_i != 0
    return {-x / y for x, y in t if y != 0}


def _step2_excluded(t: PointTuple) -> Set[Fraction]:
    # y_i + y_j + 2 beta x_i^2 != 0 whenever x_j = -x_i
    excluded = set()
    for (xi, yi), (xj, yj) in combinations(t.points, 2):
        if xj == -xi:
            excluded.add(-(yi + yj) / (2 * xi * xi))
    return excluded


def _step3_excluded(t: PointTuple) -> Set[Fraction]:
    # x_i + alpha y_i != 0 and (x_i + alpha y_i)^2 != (x_j + alpha y_j)^2
    excluded = _step1_excluded(t)
    for (xi, yi), (xj, yj) in combinations(t.points, 2):
        if yi != yj:
            excluded.add((xj - xi) / (yi - yj))
        if yi != -yj:
            excluded.add(-(xi + xj) / (yi + yj))
    return excluded


def _step4_excluded(t: PointTuple) -> Set[Fraction]:
    # y_i + beta x_i^2 != 0 and pairwise distinct
    excluded = {-y / (x * x) for x, y in t}
    for (xi, yi), (xj, yj) in combinations(t.points, 2):
        excluded.add((yi - yj) / (xj * xj - xi * xi))
    return excluded


@dataclass(frozen=True)
class NormalizationStep:
    name: str
    excluded: FrozenSet[Fraction]
    map: TriangularMap
    image: PointTuple


def _check_normalizable(t: PointTuple) -> None:
    if t.contains_origin():
        raise OriginInTupleError("the tuple contains the origin, which every automorphism fixes")
    if t.has_duplicates():
        raise DuplicatePointsError("the tuple repeats a point, so it can never reach Omega^m_1")


class TupleNormalizer:
    """Move point tuples into Omega^m_1 with four triangular maps"""

    def __init__(self, exponents: Tuple[int, int] = (1, 2)):
        """
        Initialize the normalizer

        Args:
            exponents: (1, 2) for words in L_1 and R_2; (2, 1) for the mirrored
                procedure with words in R_1 and L_2
        """
        require(exponents in ((1, 2), (2, 1)), f"exponents must be (1, 2) or (2, 1), got {exponents!r}")
        self.exponents = exponents

    def trace(self, t: PointTuple) -> List[NormalizationStep]:
        """
        Run the four normalisation steps and record each one.

        Args:
            t: Tuple of distinct points, none of them the origin

        Returns:
            The four steps, each with its excluded parameters, map and image
        """
        _check_normalizable(t)
        if self.exponents == (2, 1):
            # Swap coordinates, normalise, then mirror every map back
            steps = TupleNormalizer((1, 2)).trace(t.swapped())
            return [
                NormalizationStep(step.name, step.excluded, step.map.mirrored(), step.image.swapped())
                for step in steps
            ]

        steps: List[NormalizationStep] = []

        # Step 1: L_1(alpha) makes every x-coordinate nonzero
        current = self._step(steps, "nonzero x", t, _step1_excluded, lambda a: left_map(1, a))

        # Step 2: R_2(beta) separates pairs with opposite x-coordinates
        current = self._step(steps, "no antipodal pairs", current, _step2_excluded, lambda b: right_map(2, b))

        # Step 3: L_1(alpha) makes the squares x_i^2 pairwise distinct
        current = self._step(steps, "distinct x^2", current, _step3_excluded, lambda a: left_map(1, a))

        # Step 4: R_2(beta) makes the y-coordinates nonzero and pairwise distinct
        self._step(steps, "distinct nonzero y", current, _step4_excluded, lambda b: right_map(2, b))
        return steps

    def normalize(self, t: PointTuple) -> Tuple[AutomorphismWord, PointTuple]:
        """The word of the four maps and the image tuple"""
        steps = self.trace(t)
        return AutomorphismWord(tuple(step.map for step in steps)), steps[-1].image

    def _step(
        self,
        steps: List[NormalizationStep],
        name: str,
        current: PointTuple,
        excluded_for: Callable[[PointTuple], Set[Fraction]],
        make_map: Callable[[Fraction], TriangularMap],
    ) -> PointTuple:
        excluded = frozenset(excluded_for(current))
        step_map = make_map(first_allowed(excluded))
        image = apply_word(AutomorphismWord((step_map,)), current)
        logger.debug("Step '%s': %s, %d excluded values", name, step_map, len(excluded))
        steps.append(NormalizationStep(name, excluded, step_map, image))
        return image


def trace_normalization(t: PointTuple, exponents: Tuple[int, int] = (1, 2)) -> List[NormalizationStep]:
    """The four recorded steps of TupleNormalizer(exponents).trace(t)."""
    return TupleNormalizer(exponents).trace(t)


def normalize_tuple(t: PointTuple, exponents: Tuple[int, int] = (1, 2)) -> Tuple[AutomorphismWord, PointTuple]:
    """
    Move a tuple of distinct nonzero points into Omega^m_1.

    Returns:
        The word of four triangular maps and the image tuple
    """
    return TupleNormalizer(exponents).normalize(t)


def random_point_tuple(m: int, rng: random.Random, box: int = 5) -> PointTuple:
    """
    m distinct points with coordinates in {-box..box}/{1..box}, none at the origin.
    """
    require(isinstance(m, int) and m >= 1, f"m must be a positive integer, got {m!r}")
    require(isinstance(box, int) and box >= 1, f"box must be a positive integer, got {box!r}")
    points: List[Point] = []
    seen = set()
    while len(points) < m:
        point = (
            Fraction(rng.randint(-box, box), rng.randint(1, box)),
            Fraction(rng.randint(-box, box), rng.randint(1, box)),
        )
        if point == (0, 0) or point in seen:
            continue
        seen.add(point)
        points.append(point)
    return PointTuple(tuple(points))


def root_lattice_test(r: int, s: int) -> bool:
    """Whether (-1, r) and (s, -1) generate Z^2, i.e. |rs - 1| = 1."""
    require(isinstance(r, int) and r >= 0, f"r must be a non-negative integer, got {r!r}")
    require(isinstance(s, int) and s >= 0, f"s must be a non-negative integer, got {s!r}")
    return abs(r * s - 1) == 1


def characters_generate_lattice(characters: Sequence[Tuple[int, int]]) -> bool:
    """
    Whether integer vectors generate Z^2: the gcd of their 2x2 minors is 1.
    """
    gcd = 0
    for (a, b), (c, d) in combinations(characters, 2):
        gcd = math.gcd(gcd, a * d - b * c)
    return gcd == 1


@dataclass(frozen=True)
class TransitivityProfile:
    r: int
    s: int
    lattice_generated: bool
    linear_algebraic: bool
    generically_infinitely_transitive: bool
    infinitely_transitive: bool
    d: Optional[int] = None
    d1: Optional[int] = None
    d2: Optional[int] = None


def classify_pair(r: int, s: int) -> TransitivityProfile:
    """
    What the exponents (r, s) say about the action of G_{r,s}.

    rs <= 1 gives a linear algebraic group; rs >= 2 a generically infinitely
    transitive action with gap d = rs - 1 and offsets r + 1, s + 1; only
    rs = 2 is infinitely transitive on the plane minus the origin.
    """
    lattice = root_lattice_test(r, s)
    rs = r * s
    if rs >= 2:
        return TransitivityProfile(r, s, lattice, False, True, rs == 2, rs - 1, r + 1, s + 1)
    return TransitivityProfile(r, s, lattice, True, False, False)


def interpolate(zs: Sequence[Scalar], d0: int, d: int) -> UnivariatePoly:
    """
    f(z) = c0 z^d0 prod_{j<m} (z^d - z_j^d), scaled so that f(z_m) = 1.

    Args:
        zs: z_1, ..., z_m; f vanishes at all but the last
        d0: Exponent of the leading factor
        d: Step of the exponents

    Returns:
        f, supported on exponents d0 + k d

    Raises:
        InterpolationError: if z_m = 0 or z_m^d = z_j^d for some j < m
    """
    values = [as_rat(z) for z in zs]
    require(len(values) >= 1, "at least one node is needed", InterpolationError)
    require(isinstance(d0, int) and d0 >= 0, f"d0 must be a non-negative integer, got {d0!r}", InterpolationError)
    require(isinstance(d, int) and d >= 1, f"d must be a positive integer, got {d!r}", InterpolationError)
    *others, last = values
    require(last != 0, "the last node must be nonzero", InterpolationError)
    for z in others:
        require(z ** d != last ** d, f"node {z} has the same {d}-th power as the last node {last}", InterpolationError)

    f = UnivariatePoly.monomial(d0)
    for z in others:
        f = f * UnivariatePoly({d: 1, 0: -(z ** d)})
    return f.scale(1 / f.evaluate(last))


@dataclass(frozen=True)
class SeparatingPair:
    """Fields that span the tangent plane at one point and vanish at the others"""
    index: int
    along_x: PlaneVectorField
    along_y: PlaneVectorField


def _in_y(f: UnivariatePoly) -> BivariatePoly:
    return BivariatePoly({(0, k): c for k, c in f.coefficients.items()})


def _in_x(f: UnivariatePoly) -> BivariatePoly:
    return BivariatePoly({(k, 0): c for k, c in f.coefficients.items()})


def separating_fields(t: PointTuple, r: int, s: int) -> List[SeparatingPair]:
    """
    Fields f(y) d/dx with f in y^(r+1) K[y^d] and g(x) d/dy with g in x^(s+1) K[x^d],
    d = rs - 1, that equal the coordinate directions at P_j and vanish at every other point.
    """
    profile = classify_pair(r, s)
    require(profile.generically_infinitely_transitive, f"rs must be at least 2, got r={r}, s={s}")
    require(omega_membership(t, profile.d), f"the tuple is not in Omega^m_{profile.d}")
    pairs = []
    for j in range(len(t)):
        ys = [t[l][1] for l in range(len(t)) if l != j] + [t[j][1]]
        xs = [t[l][0] for l in range(len(t)) if l != j] + [t[j][0]]
        f = interpolate(ys, profile.d1, profile.d)
        g = interpolate(xs, profile.d2, profile.d)
        pairs.append(SeparatingPair(j, PlaneVectorField(_in_y(f), ZERO), PlaneVectorField(ZERO, _in_x(g))))
    return pairs


def verify_exponential_flow() -> bool:
    """
    Check that (x, y) -> ((x - 3y^2)s + 3y^2 s^2, y s), s = e^t, is the flow of
    (x + 3y^2) d/dx + y d/dy: s d/ds of the map equals the field at the image,
    and s = 1 is the identity.
    """
    x, y, s = sympy.symbols("x y s")
    flow_x = (x - 3 * y ** 2) * s + 3 * y ** 2 * s ** 2
    flow_y = y * s
    checks = {
        "x velocity": sympy.expand(s * sympy.diff(flow_x, s) - (flow_x + 3 * flow_y ** 2)) == 0,
        "y velocity": sympy.expand(s * sympy.diff(flow_y, s) - flow_y) == 0,
        "x at s=1": sympy.expand(flow_x.subs(s, 1) - x) == 0,
        "y at s=1": sympy.expand(flow_y.subs(s, 1) - y) == 0,
    }
    for name, ok in checks.items():
        logger.debug("Flow check %s: %s", name, ok)
    return all(checks.values())
