"""
Command Line Interface

Subcommands wire the library into a pipeline:

    derive        line-LG guess + Levenberg-Marquardt solve for one degree
    derive-batch  the same for a span of degrees, in parallel
    eliminate     node elimination on a converged rule
    validate      exactness, positivity, interiority and symmetry checks
    bounds        lower-bound node count for a degree
    integrate     composite quadrature of a test integrand on a uniform mesh
    convergence   error and observed rate over a sequence of meshes
    efficiency    node counts against lower bounds for a rules directory
    export        flat point set of a rule
    import        group a flat point set into symmetry orbits

Every subcommand takes ``--config FILE`` (a YAML mapping of its options)
and ``-v``/``-q``. Flags given on the command line override the file.
"""
import argparse
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

import yaml
from rich.console import Console
from rich.logging import RichHandler

from . import reports
from .basis import basis_size
from .bounds import efficiency, lower_bound
from .catalog import Catalog
from .eliminate import Criterion, ElimConfig, eliminate_all
from .errors import QuadratureError, RuleParseError, UsageError
from .geometry import QuadRule
from .initgen import generate_initial_guess, predicted_node_count, select_n1
from .rule_store import RuleStore
from .rules_io import (
    IMPORT_TOL,
    format_pointset,
    import_pointset,
    read_rule,
    serialize_rule,
    write_rule,
)
from .solver import SolveReport, SolverConfig, lm_solve
from .verify import (
    UniformMesh,
    convergence_rates,
    efficiency_report,
    get_integrand,
    integrate_on_mesh,
    validate_rule,
    write_convergence_csv,
    write_efficiency_csv,
)

logger = logging.getLogger(__name__)

err_console = Console(stderr=True)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NO_CONVERGENCE = 2
EXIT_USAGE = 3

DEGREE_RANGE = {"tri": (1, 84), "tet": (1, 40)}

# options every subcommand has that never come from a config file
_GLOBAL_DESTS = {"config", "verbose", "quiet"}
# config keys that are Python keywords as option names
_CONFIG_ALIASES = {"in": "in_file"}


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that raises ``UsageError`` instead of exiting."""

    def error(self, message):
        raise UsageError(message)


@dataclass
class RunConfig:
    """A fully resolved invocation: subcommand, merged options, verbosity."""
    command: str
    options: Dict[str, Any] = field(default_factory=dict)
    config_path: Optional[Path] = None
    verbosity: int = 0

    def get(self, name: str, default: Any = None) -> Any:
        value = self.options.get(name)
        return default if value is None else value

    def require(self, name: str) -> Any:
        value = self.options.get(name)
        if value is None:
            flag = "--in" if name == "in_file" else "--" + name.replace("_", "-")
            raise UsageError(f"{self.command}: {flag} is required (on the command line or in --config)")
        return value


def _common_options() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", type=Path, help="YAML file of option values")
    noise = common.add_mutually_exclusive_group()
    noise.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    noise.add_argument("-q", "--quiet", action="store_true", help="warnings only")
    return common


def build_parser() -> Tuple[argparse.ArgumentParser, Dict[str, argparse.ArgumentParser]]:
    """The top-level parser and its subcommand parsers by name."""
    parser = _Parser(prog="piquad", description="Symmetric PI quadrature rules on triangles and tetrahedra")
    commands = parser.add_subparsers(dest="command", metavar="COMMAND")
    common = _common_options()
    subs: Dict[str, argparse.ArgumentParser] = {}

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        sub = commands.add_parser(name, help=help_text, parents=[common])
        subs[name] = sub
        return sub

    sub = add("derive", "derive a rule of one degree from the line-LG guess")
    sub.add_argument("--domain", help="tri or tet")
    sub.add_argument("--degree", type=int)
    sub.add_argument("--n1", type=int, help="number of 1-D Legendre-Gauss nodes")
    sub.add_argument("--tol", type=float, help="residual tolerance (default 3e-15*sqrt(n_b))")
    sub.add_argument("--max-iter", type=int, default=200)
    sub.add_argument("--nu0", type=float, default=1e-3)
    sub.add_argument("--out", type=Path)
    sub.add_argument("--dump-initial", type=Path, help="also write the unconverged guess")

    sub = add("derive-batch", "derive rules for a span of degrees")
    sub.add_argument("--domain")
    sub.add_argument("--degrees", help="span A..B")
    sub.add_argument("--jobs", type=int, default=1)
    sub.add_argument("--dir", type=Path, default=Path("rules"))
    sub.add_argument("--tol", type=float)
    sub.add_argument("--max-iter", type=int, default=200)

    sub = add("eliminate", "remove orbits from a converged rule")
    sub.add_argument("--in", dest="in_file", type=Path)
    sub.add_argument("--criterion", default="auto", help="facet, weight or auto")
    sub.add_argument("--tol", type=float)
    sub.add_argument("--out", type=Path)
    sub.add_argument("--log", type=Path, help="YAML log of every attempt")

    sub = add("validate", "check a rule file")
    sub.add_argument("--in", dest="in_file", type=Path)
    sub.add_argument("--tol", type=float, default=1e-13)
    sub.add_argument("--degree", type=int, help="check exactness at this degree instead")

    sub = add("bounds", "lower-bound node count")
    sub.add_argument("--domain")
    sub.add_argument("--degree", type=int)
    sub.add_argument("--nodes", type=int, help="node count to rate against the bound")

    sub = add("integrate", "integrate a test function on a uniform mesh")
    sub.add_argument("--rule", type=Path)
    sub.add_argument("--case", help="I2, I3 or J3")
    sub.add_argument("--n", type=int, help="subdivisions per axis")

    sub = add("convergence", "observed convergence rates on a mesh sequence")
    sub.add_argument("--rule", type=Path)
    sub.add_argument("--case", default="J3")
    sub.add_argument("--n", default="6,7,8,9", help="comma-separated mesh sizes")
    sub.add_argument("--csv", type=Path)

    sub = add("efficiency", "efficiency of every rule in a directory")
    sub.add_argument("--dir", type=Path, default=Path("rules"))
    sub.add_argument("--csv", type=Path)
    sub.add_argument("--reference", action="store_true", help="add published node counts")

    sub = add("export", "write the expanded point set of a rule")
    sub.add_argument("--in", dest="in_file", type=Path)
    sub.add_argument("--pointset", type=Path)

    sub = add("import", "group a flat point set into orbits")
    sub.add_argument("--pointset", type=Path)
    sub.add_argument("--domain")
    sub.add_argument("--degree", type=int)
    sub.add_argument("--tol", type=float, default=IMPORT_TOL)
    sub.add_argument("--out", type=Path)

    return parser, subs


def _load_config_file(path: Path) -> Dict[str, Any]:
    if not path.exists():
        raise UsageError(f"config file not found: {path}")
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f)
    except yaml.YAMLError as e:
        raise UsageError(f"config file {path} is not valid YAML: {e}") from None
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise UsageError(f"config file {path} must hold a mapping of option names to values")
    return data


def parse_run_config(argv: List[str]) -> RunConfig:
    """Parse argv, merging in the ``--config`` file when one is named.

    Raises:
        UsageError: Unknown flag or config key, missing subcommand
    """
    parser, subs = build_parser()
    args = parser.parse_args(argv)
    if not args.command:
        raise UsageError("a subcommand is required: " + ", ".join(subs))

    if args.config is not None:
        sub = subs[args.command]
        known = set(vars(sub.parse_args([]))) - _GLOBAL_DESTS
        values = {}
        for key, value in _load_config_file(args.config).items():
            dest = str(key).replace("-", "_")
            dest = _CONFIG_ALIASES.get(dest, dest)
            if dest not in known:
                raise UsageError(f"unknown key '{key}' in {args.config} for '{args.command}'")
            values[dest] = value
        sub.set_defaults(**values)
        args = parser.parse_args(argv)

    options = {k: v for k, v in vars(args).items() if k not in _GLOBAL_DESTS | {"command"}}
    verbosity = 1 if args.verbose else (-1 if args.quiet else 0)
    return RunConfig(args.command, options, args.config, verbosity)


def setup_logging(verbosity: int = 0) -> None:
    """Send log records to stderr through a single RichHandler."""
    level = {1: logging.DEBUG, 0: logging.INFO, -1: logging.WARNING}[verbosity]
    root = logging.getLogger()
    for handler in list(root.handlers):
        if isinstance(handler, RichHandler):
            root.removeHandler(handler)
    handler = RichHandler(console=err_console, show_time=False, show_path=False)
    handler.setFormatter(logging.Formatter("%(message)s"))
    root.addHandler(handler)
    root.setLevel(level)


def _domain(value: Any) -> str:
    if value not in DEGREE_RANGE:
        raise UsageError(f"domain must be 'tri' or 'tet', got '{value}'")
    return value


def _degree(domain: str, value: Any) -> int:
    low, high = DEGREE_RANGE[domain]
    try:
        q = int(value)
    except (TypeError, ValueError):
        raise UsageError(f"degree must be an integer, got '{value}'") from None
    if not low <= q <= high:
        raise UsageError(f"{domain} degree must be in {low}..{high}, got {q}")
    return q


def _degree_span(domain: str, value: Any) -> List[int]:
    text = str(value)
    first, sep, last = text.partition("..")
    if not sep:
        last = first
    return list(range(_degree(domain, first), _degree(domain, last) + 1))


def _int_list(value: Any) -> List[int]:
    items = value if isinstance(value, (list, tuple)) else str(value).split(",")
    try:
        return [int(item) for item in items]
    except ValueError:
        raise UsageError(f"expected a comma-separated list of integers, got '{value}'") from None


def derive_rule(domain: str, q: int, n1: Optional[int] = None,
                solver: Optional[SolverConfig] = None) -> Tuple[QuadRule, SolveReport]:
    """Initial guess plus solve; with no explicit ``n1`` a failed solve is retried with one more 1-D node."""
    solver = solver or SolverConfig()
    rule, report = lm_solve(generate_initial_guess(domain, q, n1), solver)
    if not report.converged and n1 is None:
        retry_n1 = select_n1(domain, q) + 1
        logger.info("%s q=%d did not converge; retrying with n1=%d (%d nodes)",
                    domain, q, retry_n1, predicted_node_count(domain, retry_n1))
        rule, report = lm_solve(generate_initial_guess(domain, q, retry_n1), solver)
    return rule, report


def _check_tol(rule: QuadRule, solver: SolverConfig) -> float:
    return max(1e-13, solver.tolerance(basis_size(rule.degree, rule.simplex.dim)))


def cmd_derive(config: RunConfig) -> int:
    domain = _domain(config.require("domain"))
    q = _degree(domain, config.require("degree"))
    solver = SolverConfig(tol=config.get("tol"), max_iter=config.get("max_iter"), nu0=config.get("nu0"))
    n1 = config.get("n1")

    dump = config.get("dump_initial")
    if dump:
        write_rule(dump, generate_initial_guess(domain, q, n1), status="initial")

    rule, report = derive_rule(domain, q, n1, solver)
    reports.show_solve(report, rule)
    if not report.converged:
        return EXIT_NO_CONVERGENCE

    validation = validate_rule(rule, tol=_check_tol(rule, solver))
    if not validation.passed:
        reports.show_validation(validation)
        return EXIT_INVALID

    out = config.get("out")
    if out:
        write_rule(out, rule, status="converged")
        reports.console.print(f"[green]wrote {out}[/]")
    else:
        sys.stdout.write(serialize_rule(rule, status="converged"))
    return EXIT_OK


def _derive_worker(job: Tuple[str, int, Optional[float], int]) -> Tuple[int, Optional[QuadRule], bool, int]:
    domain, q, tol, max_iter = job
    solver = SolverConfig(tol=tol, max_iter=max_iter)
    rule, report = derive_rule(domain, q, solver=solver)
    if not report.converged or not validate_rule(rule, tol=_check_tol(rule, solver)).passed:
        return q, None, report.converged, report.iterations
    return q, rule, True, report.iterations


def cmd_derive_batch(config: RunConfig) -> int:
    domain = _domain(config.require("domain"))
    degrees = _degree_span(domain, config.require("degrees"))
    jobs = int(config.get("jobs", 1))
    if jobs < 1:
        raise UsageError(f"--jobs must be at least 1, got {jobs}")
    store = RuleStore(config.get("dir"))
    work = [(domain, q, config.get("tol"), config.get("max_iter")) for q in degrees]

    if jobs == 1:
        results = [_derive_worker(job) for job in work]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_derive_worker, work))

    failed = []
    for q, rule, converged, iterations in results:
        if rule is None:
            failed.append(q)
            logger.warning("%s q=%d %s after %d iterations", domain, q,
                           "failed validation" if converged else "did not converge", iterations)
            continue
        path = store.save(rule, status="converged")
        reports.console.print(f"[green]✓[/] {domain} q={q}: {path} ({iterations} iterations)")

    if failed:
        reports.console.print(f"[red]no rule for degrees {', '.join(map(str, failed))}[/]")
        return EXIT_NO_CONVERGENCE
    return EXIT_OK


def cmd_eliminate(config: RunConfig) -> int:
    source = read_rule(config.require("in_file"))
    elim = ElimConfig(criterion=Criterion.parse(str(config.get("criterion", "auto"))),
                      tol=config.get("tol"))
    before = source.rule
    after, attempts = eliminate_all(before, elim)
    reports.show_elimination(before, after, attempts)

    log_path = config.get("log")
    if log_path:
        with open(log_path, "w", encoding="utf-8") as f:
            yaml.safe_dump([a.to_dict() for a in attempts], f, sort_keys=False)

    validation = validate_rule(after, tol=_check_tol(after, elim.solver))
    if not validation.passed:
        reports.show_validation(validation)
        return EXIT_INVALID

    out = config.get("out")
    if out:
        write_rule(out, after, status="eliminated")
        reports.console.print(f"[green]wrote {out}[/]")
    else:
        sys.stdout.write(serialize_rule(after, status="eliminated"))
    return EXIT_OK


def cmd_validate(config: RunConfig) -> int:
    path = config.require("in_file")
    rule = read_rule(path).rule
    report = validate_rule(rule, tol=float(config.get("tol")), degree=config.get("degree"))
    reports.show_validation(report, source=str(path))
    return EXIT_OK if report.passed else EXIT_INVALID


def cmd_bounds(config: RunConfig) -> int:
    domain = _domain(config.require("domain"))
    q = _degree(domain, config.require("degree"))
    bound = lower_bound(domain, q)
    nodes = config.get("nodes")
    if nodes is not None and int(nodes) < 1:
        raise UsageError(f"--nodes must be a positive node count, got {nodes}")
    e_q = efficiency(int(nodes), bound) if nodes is not None else None
    reports.show_bounds(bound, nodes, e_q)
    return EXIT_OK


def cmd_integrate(config: RunConfig) -> int:
    rule = read_rule(config.require("rule")).rule
    integrand = get_integrand(str(config.require("case")))
    n = int(config.require("n"))
    mesh = UniformMesh(rule.simplex.dim, n)
    approx = integrate_on_mesh(rule, mesh, integrand)
    reports.show_integral(rule, integrand.name, n, mesh.num_elements, approx, integrand.exact)
    return EXIT_OK


def cmd_convergence(config: RunConfig) -> int:
    rule = read_rule(config.require("rule")).rule
    study = convergence_rates(rule, str(config.get("case")), _int_list(config.get("n")))
    reports.show_convergence(study)
    csv_path = config.get("csv")
    if csv_path:
        write_convergence_csv(study, csv_path)
    return EXIT_OK


def cmd_efficiency(config: RunConfig) -> int:
    rules_dir = Path(config.get("dir"))
    if not rules_dir.exists():
        raise FileNotFoundError(f"rules directory not found: {rules_dir}")
    catalog = Catalog() if config.get("reference") else None
    rows = efficiency_report(rules_dir, catalog)
    reports.show_efficiency(rows)
    csv_path = config.get("csv")
    if csv_path:
        write_efficiency_csv(rows, csv_path)
    return EXIT_OK


def cmd_export(config: RunConfig) -> int:
    rule = read_rule(config.require("in_file")).rule
    text = format_pointset(rule)
    out = config.get("pointset")
    if out:
        Path(out).write_text(text)
        reports.console.print(f"[green]wrote {rule.num_nodes} points to {out}[/]")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_import(config: RunConfig) -> int:
    path = Path(config.require("pointset"))
    if not path.exists():
        raise FileNotFoundError(f"point set not found: {path}")
    domain = _domain(config.require("domain"))
    q = _degree(domain, config.require("degree"))
    rule = import_pointset(path.read_text(), domain, q, float(config.get("tol")))
    reports.show_orbits(rule)

    validation = validate_rule(rule, tol=1e-12)
    if not validation.passed:
        reports.show_validation(validation, source=str(path))

    out = config.get("out")
    if out:
        write_rule(out, rule, status="imported")
        reports.console.print(f"[green]wrote {out}[/]")
    return EXIT_OK if validation.passed else EXIT_INVALID


COMMANDS: Dict[str, Callable[[RunConfig], int]] = {
    "derive": cmd_derive,
    "derive-batch": cmd_derive_batch,
    "eliminate": cmd_eliminate,
    "validate": cmd_validate,
    "bounds": cmd_bounds,
    "integrate": cmd_integrate,
    "convergence": cmd_convergence,
    "efficiency": cmd_efficiency,
    "export": cmd_export,
    "import": cmd_import,
}


def run(argv: Optional[List[str]] = None) -> int:
    """Run one subcommand and return its exit code.

    0 success, 1 validation failure or other library error, 2 solver
    non-convergence, 3 usage error, malformed rule file or missing file.
    """
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        config = parse_run_config(argv)
    except UsageError as e:
        err_console.print(f"usage error: {e}", style="bold red", markup=False)
        return EXIT_USAGE
    except SystemExit as e:
        # --help
        return e.code if isinstance(e.code, int) else EXIT_OK

    setup_logging(config.verbosity)
    try:
        return COMMANDS[config.command](config)
    except (UsageError, RuleParseError, FileNotFoundError) as e:
        err_console.print(f"ERROR: {e}", style="bold red", markup=False)
        return EXIT_USAGE
    except QuadratureError as e:
        err_console.print(f"ERROR: {e}", style="bold red", markup=False)
        return EXIT_INVALID
