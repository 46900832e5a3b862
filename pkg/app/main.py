"""
Command-line front end for the plane Lie algebra toolkit.

Every subcommand prints a deterministic report. ``--format lines`` switches to
the machine-readable line grammar documented with each serialiser.
"""

import argparse
import logging
import random
import re
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from app.components.adjoint import lemma2_table, lemma3_check
from app.components.automorphisms import (
    PointTuple,
    classify_pair,
    interpolate,
    normalize_tuple,
    omega_membership,
    random_point_tuple,
    root_lattice_test,
    verify_exponential_flow,
)
from app.components.danielewski import surface_closure_containment
from app.components.hat_algebra import DELTA, HatElement, hat_closure
from app.components.lie_closure import (
    codimension_report,
    expected_slice,
    monomial_closure,
    univariate_slice,
    vector_closure,
)
from app.components.polynomials import (
    BivariatePoly,
    UnivariatePoly,
    as_rat,
    field_divergence,
    format_rat,
    hamiltonian_field,
    poisson_bracket,
)
from app.components.report_formatter import (
    FORMATS,
    HUMAN,
    Report,
    ReportFormatter,
    boolean,
    monomial_list,
    poly_lines,
)
from app.utils.config import configure_logging, get_settings
from app.utils.error_handling import (
    EXIT_OK,
    EXIT_USAGE,
    PlaneAlgebraError,
    UsageError,
    translate_errors,
)

logger = logging.getLogger(__name__)

POLYNOMIAL_HELP = (
    'polynomial literal such as "x^2+2y" or "3/2*x*y^2 - 1": terms joined by + and -, '
    "implicit coefficient and exponent 1, ^ or ** for powers"
)


# Every option is long (or -h), so a single leading dash starts a value such as -1/2 or -x^2+y
NEGATIVE_OPERAND = re.compile(r"^-[^-]")


class CommandParser(argparse.ArgumentParser):
    """ArgumentParser that raises UsageError instead of exiting"""

    def __init__(self, *args: Any, **kwargs: Any):
        super().__init__(*args, **kwargs)
        # Set after -h is registered so the help flag is not taken for a value
        self._negative_number_matcher = NEGATIVE_OPERAND

    def error(self, message: str):
        raise UsageError(message)


# Argument types

def _rational(text: str) -> Fraction:
    try:
        return as_rat(text)
    except PlaneAlgebraError as e:
        raise argparse.ArgumentTypeError(f"malformed rational {text!r}") from e


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be positive, got {value}")
    return value


def _non_negative(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative, got {value}")
    return value


def _polynomial(text: str) -> BivariatePoly:
    try:
        return BivariatePoly.parse(text)
    except PlaneAlgebraError as e:
        raise argparse.ArgumentTypeError(str(e)) from e


def _hat_element(text: str) -> HatElement:
    try:
        return HatElement.parse(text)
    except PlaneAlgebraError as e:
        raise argparse.ArgumentTypeError(str(e)) from e


def _exponent_pair(text: str) -> Tuple[int, int]:
    pair = tuple(part.strip() for part in text.split(","))
    if pair not in (("1", "2"), ("2", "1")):
        raise argparse.ArgumentTypeError(f"expected 1,2 or 2,1, got {text!r}")
    return int(pair[0]), int(pair[1])


def _point_tuple(text: str) -> PointTuple:
    points = []
    for chunk in text.split(";"):
        parts = chunk.split(",")
        if len(parts) != 2:
            raise argparse.ArgumentTypeError(f"expected points as 'x,y;x,y', got {text!r}")
        points.append((_rational(parts[0].strip()), _rational(parts[1].strip())))
    return PointTuple(tuple(points))


@dataclass
class Invocation:
    """A parsed command line"""
    command: str
    options: Dict[str, Any] = field(default_factory=dict)
    output_format: str = HUMAN
    verbose: bool = False


def build_parser() -> CommandParser:
    """The parser for every subcommand and the global flags."""
    parser = CommandParser(prog="plane-lie", description="Exact computations in the Lie algebra of polynomial vector fields on the plane.")
    parser.add_argument("--format", dest="output_format", choices=FORMATS, default=HUMAN,
                        help="human-readable report or machine-readable lines")
    parser.add_argument("--verbose", action="store_true", help="log progress to stderr")
    commands = parser.add_subparsers(dest="command", metavar="command", parser_class=CommandParser)
    commands.required = True

    sub = commands.add_parser("bracket", help="Poisson bracket {f, g}")
    sub.add_argument("--f", type=_polynomial, required=True, help=POLYNOMIAL_HELP)
    sub.add_argument("--g", type=_polynomial, required=True, help=POLYNOMIAL_HELP)

    sub = commands.add_parser("hamiltonian", help="Hamiltonian field V_f and its divergence")
    sub.add_argument("--f", type=_polynomial, required=True, help=POLYNOMIAL_HELP)

    sub = commands.add_parser("adjoint-table", help="coefficients c_{k,n} of adj^n_{x^p - e y}(y^q)")
    sub.add_argument("--p", type=_positive, required=True)
    sub.add_argument("--q", type=_positive, required=True)
    sub.add_argument("--epsilon", type=_rational, default=Fraction(1))

    sub = commands.add_parser("lemma3", help="nonvanishing of c_{0,pq} and c_{0,p(q-1)} + c_{1,p(q-1)}")
    sub.add_argument("--p", type=_positive, required=True)
    sub.add_argument("--q", type=_positive, required=True)

    sub = commands.add_parser("gap", help="pure-power slices of lie(x^p, y^q)")
    sub.add_argument("--p", type=_positive, required=True)
    sub.add_argument("--q", type=_positive, required=True)
    sub.add_argument("--cap", type=_positive, default=40)

    sub = commands.add_parser("closure", help="Lie subalgebra generated by polynomials")
    sub.add_argument("--gens", type=_polynomial, nargs="+", required=True, help=POLYNOMIAL_HELP)
    sub.add_argument("--cap", type=_positive, default=12)
    sub.add_argument("--dump", action="store_true", help="print every basis element")

    sub = commands.add_parser("codim", help="monomial complement of a generated subalgebra")
    sub.add_argument("--gens", type=_polynomial, nargs="+", required=True, help=POLYNOMIAL_HELP)
    sub.add_argument("--cap", type=_positive, default=20)
    sub.add_argument("--degree", type=_non_negative, default=14)

    sub = commands.add_parser("hat-closure", help="subalgebra of the extended algebra; 'delta' is the grading element")
    sub.add_argument("--gens", type=_hat_element, nargs="+", required=True, help=POLYNOMIAL_HELP + ", plus the token delta")
    sub.add_argument("--cap", type=_positive, default=12)

    sub = commands.add_parser("lattice", help="whether (-1, r) and (s, -1) generate Z^2")
    sub.add_argument("--r", type=_non_negative, required=True)
    sub.add_argument("--s", type=_non_negative, required=True)

    sub = commands.add_parser("interpolate", help="f in z^d0 K[z^d] vanishing at all nodes but the last")
    sub.add_argument("--zs", type=_rational, nargs="+", required=True)
    sub.add_argument("--d0", type=_non_negative, required=True)
    sub.add_argument("--d", type=_positive, required=True)

    sub = commands.add_parser("transitivity", help="normalise a point tuple into Omega^m_1")
    sub.add_argument("--m", type=_positive, default=3, help="size of a random tuple")
    sub.add_argument("--seed", type=int, default=None, help="seed of the random tuple; defaults to PLANE_LIE_SEED")
    sub.add_argument("--points", type=_point_tuple, default=None, help="explicit tuple 'x,y;x,y;...' instead of a random one")
    sub.add_argument("--exponents", type=_exponent_pair, default=(1, 2), help="1,2 for L_1 and R_2; 2,1 for R_1 and L_2")

    commands.add_parser("flow-check", help="formal check of the exponential flow of (x + 3y^2) d/dx + y d/dy")

    sub = commands.add_parser("danielewski", help="derivations of xy = p(z)")
    sub.add_argument("--p", type=_rational, nargs="+", required=True, help="coefficients c0 c1 ... of p(z)")
    sub.add_argument("--k-max", dest="k_max", type=_non_negative, default=6)
    sub.add_argument("--cap", type=_positive, default=14)
    return parser


def parse_command(argv: Sequence[str]) -> Invocation:
    """
    Parse a command line.

    Raises:
        UsageError: naming the offending flag or subcommand
    """
    namespace = vars(build_parser().parse_args(list(argv)))
    command = namespace.pop("command")
    output_format = namespace.pop("output_format")
    verbose = namespace.pop("verbose")
    return Invocation(command, namespace, output_format, verbose)


# Handlers

def _bracket(f: BivariatePoly, g: BivariatePoly) -> Report:
    value = poisson_bracket(f, g)
    return Report("Poisson bracket", [f"{{{f}, {g}}} = {value}"], value.to_lines().splitlines())


def _hamiltonian(f: BivariatePoly) -> Report:
    field_ = hamiltonian_field(f)
    divergence = field_divergence(field_)
    return Report(
        "Hamiltonian field",
        [f"V_f = {field_}", f"divergence = {divergence}"],
        poly_lines("dx", field_.f1) + poly_lines("dy", field_.f2) + poly_lines("div", divergence),
    )


def _adjoint_table(p: int, q: int, epsilon: Fraction) -> Report:
    table = lemma2_table(p, q, epsilon)
    return Report(f"Coefficients for p={p}, q={q}, epsilon={epsilon}", table.to_text().splitlines(), table.to_lines().splitlines())


def _lemma3(p: int, q: int) -> Report:
    check = lemma3_check(p, q)
    return Report(
        f"Nonvanishing for p={p}, q={q}",
        [
            f"c_0,pq = {check.top}",
            f"c_0,p(q-1) = {check.lower_constant}",
            f"c_1,p(q-1) = {check.lower_linear}",
            f"holds: {boolean(check.holds)}",
        ],
        [
            f"top {format_rat(check.top)}",
            f"lower_constant {format_rat(check.lower_constant)}",
            f"lower_linear {format_rat(check.lower_linear)}",
            f"holds {boolean(check.holds)}",
        ],
    )


def _gap(p: int, q: int, cap: int) -> Report:
    orbit = monomial_closure(p, q, cap)
    human, lines = [], []
    for var in ("x", "y"):
        exponents = sorted(univariate_slice(orbit, var))
        text = " ".join(str(e) for e in exponents)
        human.append(f"{var}: {text or '(none)'}")
        lines.append(f"{var} {text}".rstrip())
    if min(p, q) >= 2 and max(p, q) >= 3:
        agrees = all(univariate_slice(orbit, var) == expected_slice(p, q, var, cap) for var in ("x", "y"))
        human.append(f"step {p * q - p - q}, matches progression: {boolean(agrees)}")
        lines.append(f"matches {boolean(agrees)}")
    return Report(f"Pure-power slices of lie(x^{p}, y^{q}) up to degree {cap}", human, lines)


def _closure(gens: List[BivariatePoly], cap: int, dump: bool) -> Report:
    basis = vector_closure(gens, cap)
    pivots = basis.pivots()
    human = [f"dimension {len(basis)}", f"pivots: {monomial_list(pivots)}"]
    for var in ("x", "y"):
        human.append(f"{var} slice: " + " ".join(str(e) for e in sorted(univariate_slice(basis, var))))
    lines = [f"pivot {a} {b}" for a, b in pivots]
    if dump:
        for i, element in enumerate(basis.elements()):
            human.append(f"[{i}] {element}")
            lines.extend(poly_lines(f"element {i}", element))
    return Report(f"Closure up to degree {cap}", human, lines)


def _codim(gens: List[BivariatePoly], cap: int, degree: int) -> Report:
    report = codimension_report(vector_closure(gens, cap), degree)
    return Report(
        f"Complement in degree <= {degree} (working cap {cap})",
        [f"dimension {report.dimension}", f"complement: {monomial_list(report.complement)}"],
        [f"dimension {report.dimension}"] + [f"monomial {a} {b}" for a, b in report.complement],
    )


def _hat_closure(gens: List[HatElement], cap: int) -> Report:
    basis = hat_closure(gens, cap)
    has_delta = basis.contains(HatElement.delta())
    pivots = basis.pivots()
    polynomial_pivots = [pivot for pivot in pivots if pivot != DELTA]
    return Report(
        f"Extended closure up to degree {cap}",
        [f"dimension {len(basis)}", f"delta: {boolean(has_delta)}", f"pivots: {monomial_list(polynomial_pivots)}"],
        [f"dimension {len(basis)}", f"delta {boolean(has_delta)}"] + [f"pivot {a} {b}" for a, b in polynomial_pivots],
    )


def _lattice(r: int, s: int) -> Report:
    profile = classify_pair(r, s)
    result = boolean(root_lattice_test(r, s))
    human = [
        result,
        f"linear algebraic group: {boolean(profile.linear_algebraic)}",
        f"generically infinitely transitive: {boolean(profile.generically_infinitely_transitive)}",
        f"infinitely transitive on the punctured plane: {boolean(profile.infinitely_transitive)}",
    ]
    if profile.d is not None:
        human.append(f"gap d = {profile.d}, offsets {profile.d1}, {profile.d2}")
    return Report(f"Character lattice for r={r}, s={s}", human, [result])


def _interpolate(zs: List[Fraction], d0: int, d: int) -> Report:
    f = interpolate(zs, d0, d)
    return Report(
        "Interpolating polynomial",
        [f"f(z) = {f}"],
        [f"{k} {format_rat(f.coefficient(k))}" for k in reversed(f.support())],
    )


def _transitivity(m: int, seed: Optional[int], points: Optional[PointTuple], exponents: Tuple[int, int]) -> Report:
    if points is None:
        seed = get_settings().default_seed if seed is None else seed
        points = random_point_tuple(m, random.Random(seed))
    word, image = normalize_tuple(points, exponents)
    in_omega = boolean(omega_membership(image, 1))
    human = ["tuple:", points.to_lines(), "word:", word.to_lines(), "image:", image.to_lines(), f"OMEGA: {in_omega}"]
    lines = [f"point {line}" for line in points.to_lines().splitlines()]
    lines += [f"map {line}" for line in word.to_lines().splitlines()]
    lines += [f"image {line}" for line in image.to_lines().splitlines()]
    lines.append(f"OMEGA: {in_omega}")
    return Report(f"Normalisation of {len(points)} points", human, lines)


def _flow_check() -> Report:
    result = boolean(verify_exponential_flow())
    return Report("Exponential flow of (x + 3y^2) d/dx + y d/dy", [result], [result])


def _danielewski(p: List[Fraction], k_max: int, cap: int) -> Report:
    report = surface_closure_containment(UnivariatePoly.from_coefficients(p), k_max, cap)
    human = [
        f"nu = {report.nu}, expected from k = {report.expected_start}",
        f"squarefree: {boolean(report.squarefree)}",
        f"kernels: {boolean(report.kernels_hold)}",
        f"basis dimension {report.dimension}",
    ]
    lines = [f"nu {report.nu}", f"squarefree {boolean(report.squarefree)}", f"dimension {report.dimension}"]
    for k in range(k_max + 1):
        human.append(f"k={k}: y^k D1 {boolean(report.along_x[k])}, x^k D2 {boolean(report.along_y[k])}")
        lines.append(f"{k} {boolean(report.along_x[k])} {boolean(report.along_y[k])}")
    human.append(f"containment: {boolean(report.holds)}")
    lines.append(f"holds {boolean(report.holds)}")
    return Report(f"Derivations of xy = {report.p}", human, lines)


HANDLERS: Dict[str, Callable[..., Report]] = {
    "bracket": _bracket,
    "hamiltonian": _hamiltonian,
    "adjoint-table": _adjoint_table,
    "lemma3": _lemma3,
    "gap": _gap,
    "closure": _closure,
    "codim": _codim,
    "hat-closure": _hat_closure,
    "lattice": _lattice,
    "interpolate": _interpolate,
    "transitivity": _transitivity,
    "flow-check": _flow_check,
    "danielewski": _danielewski,
}


def execute(inv: Invocation) -> Tuple[int, str]:
    """
    Run a parsed invocation.

    Returns:
        Exit status and output text; 3 with an error report on a violated precondition
    """
    formatter = ReportFormatter(inv.output_format)

    @translate_errors(formatter.render_error)
    def run() -> Tuple[int, str]:
        logger.info("Running %s", inv.command)
        return EXIT_OK, formatter.render(HANDLERS[inv.command](**inv.options))

    return run()


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point; returns the exit status."""
    args = sys.argv[1:] if argv is None else argv
    try:
        inv = parse_command(args)
    except UsageError as e:
        configure_logging()
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    configure_logging("DEBUG" if inv.verbose else None)
    status, text = execute(inv)
    print(text, file=sys.stdout if status == EXIT_OK else sys.stderr)
    return status
