"""
Sparse reduced row echelon bases over the rationals and the bracket saturation
that grows them into Lie subalgebras.

The engine is generic in the coordinate keys: polynomials use exponent pairs,
the extended algebra adds a delta key and surface derivations use
(component, monomial) pairs. Callers supply the term order and a degree per key.
"""

import logging
from collections import deque
from fractions import Fraction
from typing import Any, Callable, Dict, Generic, Hashable, Iterable, Iterator, List, Optional, TypeVar

from app.components.polynomials import add_scaled
from app.utils.error_handling import InvalidArgumentError, require

logger = logging.getLogger(__name__)

E = TypeVar('E')
Vector = Dict[Hashable, Fraction]


class EchelonBasis(Generic[E]):
    """
    Reduced echelon basis of a finite-dimensional subspace.

    Every row is normalised so its pivot (largest key in the term order) has
    coefficient 1, and no row contains the pivot of another row. Reduction of a
    vector therefore needs a single pass over the pivots it touches.

    Args:
        order_key: Sort key of the term order on coordinate keys
        key_degree: Degree of a coordinate key, used for capping
        to_vector: Converts an element into its coordinate map
        from_vector: Converts a coordinate map back into an element
        degree_cap: Largest degree an element may have
    """

    def __init__(
        self,
        order_key: Callable[[Hashable], Any],
        key_degree: Callable[[Hashable], int],
        to_vector: Callable[[E], Vector],
        from_vector: Callable[[Vector], E],
        degree_cap: int,
    ):
        require(isinstance(degree_cap, int) and degree_cap >= 0, f"degree cap must be a non-negative integer, got {degree_cap!r}")
        self.order_key = order_key
        self.key_degree = key_degree
        self.to_vector = to_vector
        self.from_vector = from_vector
        self.degree_cap = degree_cap
        self._rows: Dict[Hashable, Vector] = {}
        self._degrees: Dict[Hashable, int] = {}
        self._frozen = False

    # Vector level

    def vector_degree(self, vector: Vector) -> int:
        return max(self.key_degree(key) for key in vector)

    def reduce_vector(self, vector: Vector) -> Vector:
        """Remainder of ``vector`` modulo the span; a fresh dict."""
        result = dict(vector)
        for pivot in [key for key in result if key in self._rows]:
            coeff = result.get(pivot)
            if coeff:
                add_scaled(result, self._rows[pivot], -coeff)
        return result

    def insert_vector(self, vector: Vector) -> Optional[Hashable]:
        """
        Add a vector to the span.

        Args:
            vector: Coordinate map with nonzero Fraction values

        Returns:
            The new pivot, or None if the vector was already in the span
        """
        require(not self._frozen, "cannot insert into a frozen basis")
        remainder = self.reduce_vector(vector)
        if not remainder:
            return None
        pivot = max(remainder, key=self.order_key)
        lead = remainder[pivot]
        if lead != 1:
            remainder = {key: coeff / lead for key, coeff in remainder.items()}

        # Rows are replaced, not mutated, so snapshots held by callers stay valid
        for other, row in list(self._rows.items()):
            coeff = row.get(pivot)
            if coeff:
                new_row = dict(row)
                add_scaled(new_row, remainder, -coeff)
                self._rows[other] = new_row
                self._degrees[other] = self.vector_degree(new_row)

        self._rows[pivot] = remainder
        self._degrees[pivot] = self.vector_degree(remainder)
        return pivot

    def row(self, pivot: Hashable) -> Vector:
        return self._rows[pivot]

    def row_degree(self, pivot: Hashable) -> int:
        return self._degrees[pivot]

    def rows(self) -> List[tuple]:
        """Snapshot of (pivot, row) pairs in insertion order."""
        return list(self._rows.items())

    # Element level

    def reduce(self, element: E) -> E:
        return self.from_vector(self.reduce_vector(self.to_vector(element)))

    def insert(self, element: E) -> Optional[Hashable]:
        return self.insert_vector(self.to_vector(element))

    def contains(self, element: E) -> bool:
        return not self.reduce_vector(self.to_vector(element))

    def __contains__(self, element: E) -> bool:
        return self.contains(element)

    def pivots(self) -> List[Hashable]:
        """Pivot keys in decreasing term order."""
        return sorted(self._rows, key=self.order_key, reverse=True)

    def elements(self) -> List[E]:
        """Basis elements in decreasing pivot order."""
        return [self.from_vector(self._rows[pivot]) for pivot in self.pivots()]

    def __iter__(self) -> Iterator[E]:
        return iter(self.elements())

    def __len__(self) -> int:
        return len(self._rows)

    @property
    def dimension(self) -> int:
        return len(self._rows)

    @property
    def frozen(self) -> bool:
        return self._frozen

    def freeze(self) -> "EchelonBasis[E]":
        self._frozen = True
        return self

    def same_span(self, other: "EchelonBasis") -> bool:
        """Reduced echelon forms are unique, so equal rows mean equal spans."""
        return self._rows == other._rows


def saturate(
    basis: EchelonBasis,
    generators: Iterable[Vector],
    bracket: Callable[[Vector, Vector], Vector],
    pair_fits: Callable[[int, int], bool],
    total_dimension: Optional[int] = None,
) -> EchelonBasis:
    """
    Close a basis under a bilinear bracket without leaving the degree cap.

    New pivots enter a FIFO worklist. Each popped row is bracketed with every
    current row whose degree passes ``pair_fits``; results above the cap are
    discarded and the rest are inserted.

    Args:
        basis: Basis to grow, usually empty
        generators: Coordinate maps of the generators, in order
        bracket: Bracket on coordinate maps
        pair_fits: Filter on the degrees of a pair before bracketing
        total_dimension: Dimension of the ambient space below the cap, for an early exit

    Returns:
        The saturated basis, frozen
    """
    # Step 1: seed the basis and the worklist with the generators
    queue: deque = deque()
    for vector in generators:
        require(bool(vector), "generators must be nonzero")
        degree = basis.vector_degree(vector)
        if degree > basis.degree_cap:
            raise InvalidArgumentError(f"generator of degree {degree} exceeds the working cap {basis.degree_cap}")
        pivot = basis.insert_vector(vector)
        if pivot is not None:
            queue.append(pivot)

    brackets = discarded = 0
    while queue:
        if total_dimension is not None and len(basis) >= total_dimension:
            logger.debug("Basis fills all %d coordinates, stopping early", total_dimension)
            break
        # Step 2: bracket the oldest new row with every row that fits the cap
        pivot = queue.popleft()
        row = basis.row(pivot)
        degree = basis.row_degree(pivot)
        for other, other_row in basis.rows():
            if other == pivot or not pair_fits(degree, _degree(basis, other, other_row)):
                continue
            result = bracket(row, other_row)
            brackets += 1
            if not result:
                continue
            # Step 3: drop results above the cap, keep the independent ones
            if basis.vector_degree(result) > basis.degree_cap:
                discarded += 1
                continue
            new_pivot = basis.insert_vector(result)
            if new_pivot is not None:
                queue.append(new_pivot)
        logger.debug("Saturation: dimension %d, queue %d", len(basis), len(queue))

    logger.info("Saturated to dimension %d after %d brackets (%d above cap)", len(basis), brackets, discarded)
    return basis.freeze()


def _degree(basis: EchelonBasis, pivot: Hashable, row: Vector) -> int:
    # A snapshot row may be older than the live one
    if basis.row(pivot) is row:
        return basis.row_degree(pivot)
    return basis.vector_degree(row)
