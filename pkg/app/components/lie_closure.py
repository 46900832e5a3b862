"""
Lie subalgebras of (K[x,y], {,}) generated by finitely many polynomials,
computed up to a working degree cap.

Two engines: an exponent BFS for a pair of monomial generators, and an echelon
saturation for arbitrary generators. Both only keep what is reachable without
passing through an intermediate above the cap, so they give a lower bound for
the true subalgebra in low degrees.
"""

import logging
from dataclasses import dataclass
from typing import FrozenSet, Iterable, List, Sequence, Set, Tuple, Union

from app.components.echelon import EchelonBasis, saturate
from app.components.polynomials import (
    BivariatePoly,
    Monomial,
    X,
    Y,
    monomial_order_key,
    poisson_terms,
)
from app.utils.cache import cache_result
from app.utils.error_handling import DegreeCapError, require

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExponentOrbit:
    """Exponents reached from (p, 0) and (0, q) by admissible monomial brackets"""
    p: int
    q: int
    degree_cap: int
    exponents: FrozenSet[Monomial]

    def __contains__(self, exponent: Monomial) -> bool:
        return exponent in self.exponents

    def __len__(self) -> int:
        return len(self.exponents)

    def sorted(self) -> List[Monomial]:
        return sorted(self.exponents, key=monomial_order_key, reverse=True)


@cache_result()
def monomial_closure(p: int, q: int, degree_cap: int) -> ExponentOrbit:
    """
    Saturate {(p, 0), (0, q)} under the exponent step of the monomial bracket.

    (a, b) and (c, d) give (a + c - 1, b + d - 1) exactly when ad - bc != 0,
    both new exponents are non-negative and the new degree fits the cap.

    Args:
        p: Exponent of the x generator
        q: Exponent of the y generator
        degree_cap: Largest total degree kept

    Returns:
        The saturated exponent set
    """
    require(isinstance(p, int) and p >= 1, f"p must be a positive integer, got {p!r}")
    require(isinstance(q, int) and q >= 1, f"q must be a positive integer, got {q!r}")
    require(isinstance(degree_cap, int), f"degree cap must be an integer, got {degree_cap!r}")
    if degree_cap < p + q:
        raise DegreeCapError(f"degree cap {degree_cap} is below p + q = {p + q}")

    # Step 1: start from the exponents of the two generators
    found: List[Monomial] = [(p, 0), (0, q)]
    seen: Set[Monomial] = set(found)
    index = 0
    # Step 2: pair each new exponent with every one found so far
    while index < len(found):
        a, b = found[index]
        index += 1
        for c, d in list(found):
            if a * d - b * c == 0:
                continue
            new = (a + c - 1, b + d - 1)
            # Step 3: keep exponents that are new, non-negative and below the cap
            if new[0] < 0 or new[1] < 0 or new[0] + new[1] > degree_cap or new in seen:
                continue
            seen.add(new)
            found.append(new)
    logger.debug("Exponent orbit of (%d, %d) up to degree %d has %d members", p, q, degree_cap, len(found))
    return ExponentOrbit(p, q, degree_cap, frozenset(found))


def polynomial_basis(degree_cap: int) -> EchelonBasis:
    """An empty echelon basis for polynomials of degree at most degree_cap."""
    return EchelonBasis(
        order_key=monomial_order_key,
        key_degree=sum,
        to_vector=lambda f: dict(f.terms),
        from_vector=BivariatePoly,
        degree_cap=degree_cap,
    )


def monomial_count(degree: int) -> int:
    """Number of monomials x^a y^b with a + b <= degree."""
    return (degree + 1) * (degree + 2) // 2


def orbit_span(orbit: ExponentOrbit) -> EchelonBasis:
    """The span of the monomials of an exponent orbit, as an echelon basis."""
    basis = polynomial_basis(orbit.degree_cap)
    for a, b in orbit.sorted():
        basis.insert(BivariatePoly.monomial(a, b))
    return basis.freeze()


@cache_result()
def _vector_closure(generators: Tuple[BivariatePoly, ...], working_cap: int) -> EchelonBasis:
    basis = polynomial_basis(working_cap)
    return saturate(
        basis,
        [dict(g.terms) for g in generators],
        poisson_terms,
        lambda du, dv: du + dv - 2 <= working_cap,
        total_dimension=monomial_count(working_cap),
    )


def vector_closure(generators: Iterable[BivariatePoly], working_cap: int) -> EchelonBasis:
    """
    Echelon basis of the Lie subalgebra generated by ``generators`` below the cap.

    Only pairs with deg u + deg v - 2 <= working_cap are bracketed and results
    above the cap are discarded.

    Args:
        generators: Nonzero polynomials of degree at most working_cap
        working_cap: Largest degree of any intermediate

    Returns:
        A frozen EchelonBasis
    """
    generators = tuple(generators)
    require(isinstance(working_cap, int) and working_cap >= 1, f"working cap must be a positive integer, got {working_cap!r}")
    for g in generators:
        require(isinstance(g, BivariatePoly), f"generators must be polynomials, got {g!r}")
        require(not g.is_zero(), "generators must be nonzero")
        if g.degree > working_cap:
            raise DegreeCapError(f"generator {g} has degree {g.degree} above the working cap {working_cap}")
    return _vector_closure(generators, working_cap)


def univariate_slice(basis: Union[EchelonBasis, ExponentOrbit], var: str) -> Set[int]:
    """
    Exponents m with var^m in the subspace, for m up to the degree cap.

    For an echelon basis this is a membership test of each pure power, so it
    sees pure powers that are only combinations of several basis elements.
    """
    require(var in ("x", "y"), f"variable must be 'x' or 'y', got {var!r}")
    if isinstance(basis, ExponentOrbit):
        index = 1 if var == "x" else 0
        return {e[1 - index] for e in basis.exponents if e[index] == 0}
    power = (lambda m: BivariatePoly.monomial(m, 0)) if var == "x" else (lambda m: BivariatePoly.monomial(0, m))
    return {m for m in range(basis.degree_cap + 1) if basis.contains(power(m))}


def expected_slice(p: int, q: int, var: str, degree_cap: int) -> Set[int]:
    """{p + k(pq - p - q)} in x, or {q + k(pq - p - q)} in y, up to the cap."""
    require(min(p, q) >= 2 and max(p, q) >= 3, f"expected min(p, q) >= 2 and max(p, q) >= 3, got ({p}, {q})")
    require(var in ("x", "y"), f"variable must be 'x' or 'y', got {var!r}")
    start = p if var == "x" else q
    step = p * q - p - q
    return set(range(start, degree_cap + 1, step))


@dataclass(frozen=True)
class CodimensionReport:
    report_degree: int
    complement: Tuple[Monomial, ...]

    @property
    def dimension(self) -> int:
        return len(self.complement)


def codimension_report(basis: EchelonBasis, report_degree: int) -> CodimensionReport:
    """
    Monomials of degree <= report_degree that are not pivots of the basis.

    In a reduced echelon basis under a graded order these monomials span a
    complement of the subspace inside the polynomials of degree <= report_degree.
    """
    require(isinstance(report_degree, int) and report_degree >= 0,
            f"report degree must be a non-negative integer, got {report_degree!r}")
    require(report_degree <= basis.degree_cap,
            f"report degree {report_degree} exceeds the degree cap {basis.degree_cap}")
    pivots = set(basis.pivots())
    complement = [
        (a, d - a)
        for d in range(report_degree + 1)
        for a in range(d, -1, -1)
        if (a, d - a) not in pivots
    ]
    return CodimensionReport(report_degree, tuple(complement))


def covers_degree(basis: EchelonBasis, degree: int) -> bool:
    """True when every monomial of degree <= ``degree`` lies in the subspace."""
    return codimension_report(basis, degree).dimension == 0


@dataclass(frozen=True)
class CodimensionScan:
    p: int
    q: int
    working_cap: int
    sizes: Tuple[Tuple[int, int], ...]

    @property
    def stabilises(self) -> bool:
        return len({size for _, size in self.sizes}) == 1


def finite_codimension_scan(
    pairs: Iterable[Tuple[int, int]],
    report_degrees: Sequence[int],
    slack: int,
) -> List[CodimensionScan]:
    """
    Complement sizes of lie(x^p, y^q) at increasing report degrees.

    Args:
        pairs: Exponent pairs (p, q)
        report_degrees: Increasing report degrees
        slack: Headroom between the largest report degree and the working cap

    Returns:
        One scan per pair; a scan stabilises when every size is the same
    """
    require(len(report_degrees) > 0, "at least one report degree is needed")
    require(isinstance(slack, int) and slack >= 0, f"slack must be a non-negative integer, got {slack!r}")
    cap = max(report_degrees) + slack
    scans = []
    for p, q in pairs:
        basis = vector_closure([X ** p, Y ** q], cap)
        sizes = tuple((d, codimension_report(basis, d).dimension) for d in report_degrees)
        logger.info("Complement sizes of lie(x^%d, y^%d): %s", p, q, sizes)
        scans.append(CodimensionScan(p, q, cap, sizes))
    return scans


def low_degree_pivots(basis: EchelonBasis, report_degree: int) -> Set[Monomial]:
    return {pivot for pivot in basis.pivots() if sum(pivot) <= report_degree}


def stabilises(generators: Sequence[BivariatePoly], cap: int, report_degree: int) -> bool:
    """
    Whether raising the working cap by 2 leaves the pivots of degree <= report_degree unchanged.
    """
    require(report_degree <= cap, f"report degree {report_degree} exceeds the cap {cap}")
    before = low_degree_pivots(vector_closure(generators, cap), report_degree)
    after = low_degree_pivots(vector_closure(generators, cap + 2), report_degree)
    if before != after:
        logger.info("Pivots below degree %d changed between caps %d and %d", report_degree, cap, cap + 2)
    return before == after
