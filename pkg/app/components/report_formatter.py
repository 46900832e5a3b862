"""
Report formatting for the command-line front end.
"""

from dataclasses import dataclass, field
from typing import List, Sequence

from app.components.polynomials import BivariatePoly, Monomial

HUMAN = "human"
LINES = "lines"
FORMATS = (HUMAN, LINES)


@dataclass
class Report:
    """Output of one subcommand in both renderings"""
    title: str
    human: List[str] = field(default_factory=list)
    lines: List[str] = field(default_factory=list)
    error: bool = False


class ReportFormatter:
    """Format reports into deterministic text"""

    def __init__(self, output_format: str = HUMAN):
        if output_format not in FORMATS:
            raise ValueError(f"unknown output format {output_format!r}")
        self.output_format = output_format

    def render(self, report: Report) -> str:
        """
        Render a report in the configured format

        Args:
            report: The report to render

        Returns:
            The text, ending without a trailing newline
        """
        if self.output_format == LINES:
            return "\n".join(report.lines)
        return self._format_human(report)

    def _format_human(self, report: Report) -> str:
        header = f"# {report.title}"
        if not report.human:
            return header
        return header + "\n" + "\n".join(report.human)

    def generate_error_report(self, error_message: str) -> Report:
        """
        Generate an error report

        Args:
            error_message: Stable message of the failed precondition

        Returns:
            Report rendering as "error: <message>" in both formats
        """
        text = f"error: {error_message}"
        return Report("Error", [text], [text], error=True)

    def render_error(self, error_message: str) -> str:
        return self.render(self.generate_error_report(error_message))


def poly_lines(prefix: str, f: BivariatePoly) -> List[str]:
    """Polynomial serialisation with every line tagged by ``prefix``."""
    body = f.to_lines()
    return [f"{prefix} {line}" for line in body.splitlines()] if body else []


def monomial_text(monomial: Monomial) -> str:
    return str(BivariatePoly.monomial(*monomial))


def monomial_list(monomials: Sequence[Monomial]) -> str:
    return ", ".join(monomial_text(m) for m in monomials) if monomials else "(none)"


def boolean(value: bool) -> str:
    return "true" if value else "false"
