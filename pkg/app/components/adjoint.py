"""
Iterated adjoint operators and the coefficient recursion for adj_{x^p - eps*y}^n(y^q).

Writing adj_{x^p - eps*y}^n(y^q) = sum_k c_{k,n} x^{p(q-k)-n} y^k, the
coefficients satisfy

    c_{k,n+1} = eps (p (q - k) - n) c_{k,n} + p (k + 1) c_{k+1,n}

with c_{q,0} = 1 and c_{k,n} = 0 for k > floor(q - n/p).
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, NamedTuple, Tuple

from app.components.polynomials import (
    X,
    Y,
    BivariatePoly,
    Scalar,
    as_rat,
    format_rat,
    format_scalar,
    poisson_bracket,
)
from app.utils.cache import cache_result
from app.utils.error_handling import InvalidArgumentError, require

logger = logging.getLogger(__name__)


def adjoint_power(f: BivariatePoly, g: BivariatePoly, n: int) -> BivariatePoly:
    """
    Apply adj_f = {f, .} to g n times.

    Args:
        f: The operator polynomial
        g: The argument
        n: Number of applications

    Returns:
        adj_f^n(g)
    """
    require(isinstance(n, int) and n >= 0, f"n must be a non-negative integer, got {n!r}")
    result = g
    for _ in range(n):
        if result.is_zero():
            break
        result = poisson_bracket(f, result)
    return result


def _check_exponents(p: int, q: int) -> None:
    require(isinstance(p, int) and p >= 1, f"p must be a positive integer, got {p!r}")
    require(isinstance(q, int) and q >= 1, f"q must be a positive integer, got {q!r}")


def row_bound(p: int, q: int, n: int) -> int:
    """floor(q - n/p), the largest k with a stored entry in row n."""
    return (p * q - n) // p


@dataclass(frozen=True)
class CoeffTable:
    """Rows n = 0..pq of the coefficients c_{k,n}; row n stores k = 0..floor(q - n/p)"""
    p: int
    q: int
    epsilon: Fraction
    rows: Tuple[Tuple[Fraction, ...], ...]

    def bound(self, n: int) -> int:
        return row_bound(self.p, self.q, n)

    def coefficient(self, k: int, n: int) -> Fraction:
        require(0 <= n < len(self.rows), f"row {n} outside 0..{len(self.rows) - 1}")
        row = self.rows[n]
        if 0 <= k < len(row):
            return row[k]
        return Fraction(0)

    def reconstruct(self, n: int) -> BivariatePoly:
        """The polynomial sum_k c_{k,n} x^{p(q-k)-n} y^k encoded by row n."""
        require(0 <= n < len(self.rows), f"row {n} outside 0..{len(self.rows) - 1}")
        return BivariatePoly({
            (self.p * (self.q - k) - n, k): coeff
            for k, coeff in enumerate(self.rows[n])
        })

    def to_text(self) -> str:
        return "\n".join(
            f"{n}: " + ", ".join(f"{k}={format_scalar(c)}" for k, c in enumerate(row))
            for n, row in enumerate(self.rows)
        )

    def to_lines(self) -> str:
        return "\n".join(
            f"{n} {k} {format_rat(c)}"
            for n, row in enumerate(self.rows)
            for k, c in enumerate(row)
        )


@cache_result()
def lemma2_table(p: int, q: int, epsilon: Scalar) -> CoeffTable:
    """
    Fill the coefficient table for adj_{x^p - eps*y}^n(y^q), n = 0..pq.

    Args:
        p: Exponent of x in the operator
        q: Exponent of y in the argument
        epsilon: Coefficient of y in the operator

    Returns:
        The table, every row computed from the previous one
    """
    _check_exponents(p, q)
    eps = as_rat(epsilon)
    rows: List[Tuple[Fraction, ...]] = [tuple(Fraction(int(k == q)) for k in range(q + 1))]
    for n in range(p * q):
        previous = rows[-1]

        def c(k: int) -> Fraction:
            return previous[k] if k < len(previous) else Fraction(0)

        rows.append(tuple(
            eps * (p * (q - k) - n) * c(k) + p * (k + 1) * c(k + 1)
            for k in range(row_bound(p, q, n + 1) + 1)
        ))
    logger.debug("Built coefficient table for p=%d q=%d eps=%s", p, q, eps)
    return CoeffTable(p, q, eps, tuple(rows))


def rescale_unit_table(unit: CoeffTable, epsilon: Scalar) -> CoeffTable:
    """
    Derive the table for a nonzero eps from the eps = 1 table.

    The substitution y -> eps*y scales the bracket by eps, which gives
    c^eps_{k,n} = eps^(n + k - q) c^1_{k,n}.
    """
    eps = as_rat(epsilon)
    require(unit.epsilon == 1, f"expected a table with epsilon 1, got {unit.epsilon}")
    require(eps != 0, "epsilon must be nonzero for the rescaling")
    rows = tuple(
        tuple(eps ** (n + k - unit.q) * c for k, c in enumerate(row))
        for n, row in enumerate(unit.rows)
    )
    return CoeffTable(unit.p, unit.q, eps, rows)


class NonvanishingCheck(NamedTuple):
    """c_{0,pq}, c_{0,p(q-1)} and c_{1,p(q-1)} for eps = 1"""
    top: Fraction
    lower_constant: Fraction
    lower_linear: Fraction

    @property
    def holds(self) -> bool:
        return self.top != 0 and self.lower_constant + self.lower_linear != 0


def lemma3_check(p: int, q: int) -> NonvanishingCheck:
    """
    Read off the coefficients whose nonvanishing makes 1 and x^p + y reachable.

    Args:
        p: Positive exponent
        q: Positive exponent

    Returns:
        (c_{0,pq}, c_{0,p(q-1)}, c_{1,p(q-1)}) with eps = 1
    """
    _check_exponents(p, q)
    table = lemma2_table(p, q, 1)
    n = p * (q - 1)
    return NonvanishingCheck(table.coefficient(0, p * q), table.coefficient(0, n), table.coefficient(1, n))


def lemma4_closed_form(p: int, q: int) -> BivariatePoly:
    """p^q q! x^(pq - q), the value of adj_{x^p}^q(y^q)."""
    _check_exponents(p, q)
    return BivariatePoly.monomial(p * q - q, 0, p ** q * math.factorial(q))


def gap_step(p: int, q: int, m: int) -> BivariatePoly:
    """adj_{x^p}^(q-1) adj_{y^q}(x^m): moves x^m to x^(m + pq - p - q)."""
    _check_exponents(p, q)
    require(isinstance(m, int) and m >= 1, f"m must be a positive integer, got {m!r}")
    return adjoint_power(X ** p, poisson_bracket(Y ** q, X ** m), q - 1)


def gap_step_closed_form(p: int, q: int, m: int) -> BivariatePoly:
    _check_exponents(p, q)
    require(isinstance(m, int) and m >= 1, f"m must be a positive integer, got {m!r}")
    coeff = -m * p ** (q - 1) * math.factorial(q)
    return BivariatePoly.monomial(m + p * q - p - q, 0, coeff)


def lowering_closed_form(var: str, exponent: int, n: int) -> BivariatePoly:
    """
    Closed form of adj_y^n(x^e) (var "x") or adj_x^n(y^e) (var "y").

    Args:
        var: Variable of the power being lowered
        exponent: Exponent e of the power
        n: Number of applications

    Returns:
        (-1)^n e!/(e-n)! x^(e-n), or e!/(e-n)! y^(e-n); zero once n > e
    """
    require(isinstance(exponent, int) and exponent >= 0, f"exponent must be a non-negative integer, got {exponent!r}")
    require(isinstance(n, int) and n >= 0, f"n must be a non-negative integer, got {n!r}")
    if n > exponent:
        return BivariatePoly()
    coeff = math.perm(exponent, n)
    if var == "x":
        return BivariatePoly.monomial(exponent - n, 0, (-1) ** n * coeff)
    if var == "y":
        return BivariatePoly.monomial(0, exponent - n, coeff)
    raise InvalidArgumentError(f"variable must be 'x' or 'y', got {var!r}")
