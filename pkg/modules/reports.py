"""
Reports - rich tables for every CLI result.

Nothing here computes; each function takes a finished result and prints it.
"""
from typing import Iterable, List, Optional, Sequence

from rich.box import ROUNDED
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from .bounds import BoundEstimate
from .eliminate import EliminationAttempt
from .geometry import QuadRule
from .solver import SolveReport
from .verify import ConvergenceStudy, EfficiencyRow, ValidationReport

console = Console()

_CHECK_VALUES = {
    "exactness": ("max |V^T w - f|", "max_residual"),
    "positivity": ("min weight", "min_weight"),
    "interiority": ("min barycentric", "min_barycentric"),
    "symmetry": ("symmetry defect", "symmetry_defect"),
    "monomials": ("monomial error", "monomial_error"),
}


def _mark(ok: bool) -> str:
    return "[green]✓ pass[/]" if ok else "[red]✗ fail[/]"


def show_validation(report: ValidationReport, source: Optional[str] = None) -> None:
    """Print a validation report, one row per check."""
    table = Table(title=f"Validation: {report.domain} q={report.degree}, {report.num_nodes} nodes",
                  show_header=True, header_style="bold magenta", box=ROUNDED)
    table.add_column("Check", style="cyan")
    table.add_column("Quantity")
    table.add_column("Value", justify="right", style="yellow")
    table.add_column("Result", justify="center")

    for name, ok in report.checks.items():
        label, attr = _CHECK_VALUES[name]
        table.add_row(name, label, f"{getattr(report, attr):.3e}", _mark(ok))

    verdict = "[bold green]PASS[/]" if report.passed else "[bold red]FAIL[/]"
    title = f"{source} - {verdict}" if source else verdict
    console.print(Panel(table, title=title, expand=False))


def show_bounds(bound: BoundEstimate, n_q: Optional[int] = None, efficiency: Optional[float] = None) -> None:
    """Print the lower-bound orbit counts and, when given, the efficiency of a node count."""
    title = f"Lower bound: {bound.domain} q={bound.q}"
    # the two columns are narrower than the title
    table = Table(title=title, min_width=len(title) + 4,
                  show_header=True, header_style="bold magenta", box=ROUNDED)
    table.add_column("Orbit", style="cyan")
    table.add_column("Count", justify="right", style="yellow")
    for kind, count in bound.counts.items():
        table.add_row(kind.value, str(count))
    table.add_row("[bold]nodes", f"[bold]{bound.total}")
    if n_q is not None and efficiency is not None:
        style = "green" if efficiency <= 1.0 else "red"
        table.add_row("supplied nodes", str(n_q))
        table.add_row("efficiency", f"[{style}]{efficiency:.4f}[/]")
    console.print(table)


def show_orbits(rule: QuadRule, title: Optional[str] = None) -> None:
    """Orbit-by-orbit listing of a rule."""
    table = Table(title=title or f"{rule.domain} q={rule.degree}: {rule.num_nodes} nodes",
                  show_header=True, header_style="bold magenta", box=ROUNDED)
    table.add_column("#", style="cyan", justify="right")
    table.add_column("Orbit", style="green")
    table.add_column("Parameters")
    table.add_column("Weight", justify="right", style="yellow")
    for i, orbit in enumerate(rule.orbits):
        params = "  ".join(f"{p:.12f}" for p in orbit.params) or "-"
        table.add_row(str(i), orbit.kind.value, params, f"{orbit.weight:.12e}")
    console.print(table)

    counts = "  ".join(f"{kind.value}={n}" for kind, n in rule.orbit_counts().items())
    console.print(f"[dim]orbit counts: {counts}[/]")


def show_solve(report: SolveReport, rule: QuadRule) -> None:
    status = "[green]converged[/]" if report.converged else "[red]did not converge[/]"
    console.print(
        f"{rule.domain} q={rule.degree}: {status} after {report.iterations} iterations "
        f"({report.rejected_steps} rejected), |g| = {report.residual_norm:.3e}, {rule.num_nodes} nodes"
    )


def show_elimination(before: QuadRule, after: QuadRule, attempts: Sequence[EliminationAttempt]) -> None:
    """Summary of an elimination run: per-attempt rows, then the node counts."""
    table = Table(title=f"Elimination: {before.domain} q={before.degree}",
                  show_header=True, header_style="bold magenta", box=ROUNDED)
    table.add_column("Outer", style="cyan", justify="center")
    table.add_column("Criterion")
    table.add_column("Orbit", style="green")
    table.add_column("nu", justify="right")
    table.add_column("Result", justify="center")
    table.add_column("Nodes", justify="right", style="yellow")
    for attempt in attempts:
        nu = "-" if attempt.nu is None else f"{attempt.nu:.0e}"
        table.add_row(str(attempt.outer_iter), attempt.criterion,
                      f"{attempt.kind} #{attempt.orbit_index}", nu, _mark(attempt.converged),
                      str(attempt.node_count))
    console.print(table)
    console.print(f"[bold]{before.num_nodes} -> {after.num_nodes} nodes[/] "
                  f"({len(attempts)} attempts, {sum(a.converged for a in attempts)} accepted)")


def show_integral(rule: QuadRule, case: str, n: int, elements: int, approx: float, exact: float) -> None:
    table = Table(show_header=True, header_style="bold magenta", box=ROUNDED)
    table.add_column("Integrand", style="cyan")
    table.add_column("Mesh", justify="right")
    table.add_column("Approximation", justify="right", style="yellow")
    table.add_column("Reference", justify="right")
    table.add_column("Error", justify="right")
    table.add_row(case, f"n={n} ({elements} elements)", f"{approx:.16e}", f"{exact:.16e}",
                  f"{abs(approx - exact):.3e}")
    console.print(Panel(table, title=f"{rule.domain} q={rule.degree} rule", expand=False))


def show_convergence(study: ConvergenceStudy) -> None:
    table = Table(title=f"Convergence: {study.integrand}, {study.domain} q={study.degree}",
                  show_header=True, header_style="bold magenta", box=ROUNDED)
    table.add_column("n", style="cyan", justify="right")
    table.add_column("Elements", justify="right")
    table.add_column("Error", justify="right", style="yellow")
    table.add_column("Rate", justify="right", style="green")
    dim = 2 if study.domain == "tri" else 3
    for row in study.rows:
        if row.saturated:
            rate = "[dim]saturated[/]"
        else:
            rate = "-" if row.rate is None else f"{row.rate:.2f}"
        # element counts read as n^d x d!, e.g. 6^3x6
        label = f"{row.n}^{dim}x{row.elements // row.n ** dim}"
        table.add_row(str(row.n), label, f"{row.error:.3e}", rate)
    console.print(table)


def show_efficiency(rows: Iterable[EfficiencyRow]) -> None:
    """Node count, bound and efficiency per rule file, plus any published counts."""
    rows: List[EfficiencyRow] = list(rows)
    if not rows:
        console.print("[yellow]No rule files found.[/]")
        return
    sources = sorted({source for row in rows for source in row.references},
                     key=lambda name: (name != "new", name))

    table = Table(title="Rule efficiency", show_header=True, header_style="bold magenta", box=ROUNDED)
    table.add_column("Domain", style="cyan", justify="center")
    table.add_column("q", justify="right")
    table.add_column("Nodes", justify="right", style="yellow")
    table.add_column("Bound", justify="right")
    table.add_column("Efficiency", justify="right")
    for source in sources:
        table.add_column(source, justify="right", style="dim")

    for row in rows:
        style = "green" if row.efficiency <= 1.0 else "red"
        refs = ["-" if row.references.get(s) is None else str(row.references[s]) for s in sources]
        table.add_row(row.domain, str(row.q), str(row.n_q), str(row.bound),
                      f"[{style}]{row.efficiency:.4f}[/]", *refs)
    console.print(table)
