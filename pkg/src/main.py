"""
Main - Command-line entry point for boselab

This module provides the `boselab` click group:
- `boselab <suite> verify` runs one theorem suite and prints a summary
- `boselab conic verify --form ...` checks a user-supplied conic
- `boselab scroll order-dim` runs order/dimension sampling on its own
- `boselab list [QUERY]` lists suites ranked by a fuzzy query
- `boselab reports [DIR]` lists saved reports

Exit codes: 0 when every check passes, 1 when a check fails, 2 on a
usage or BoseLabError error.

Functions:
    main: Application entry point
"""

import logging
import sys
from functools import wraps
from typing import Any, Callable, Optional

import click

from src import __version__
from src.config_manager import ConfigManager
from src.errors import BoseLabError
from src.harness import CheckReport, SUITES, SuiteParams, run_order_dimension, run_suite, suite_catalog
from src.reporting import ReportWriter, dumps, report_digest, report_to_dict
from src.suite_search import SuiteSearch

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

logger = logging.getLogger(__name__)


def configure_logging(level: str, log_file: Optional[str] = None) -> None:
    """Configure the root logger once; later calls are no-ops."""
    logging.basicConfig(level=getattr(logging, level.upper(), logging.WARNING), format=LOG_FORMAT, filename=log_file)


def parse_modulus(ctx: click.Context, param: click.Parameter, value: Optional[str]) -> Optional[tuple[int, int, int]]:
    if value is None:
        return None
    parts = [part.strip() for part in value.split(",")]
    if len(parts) != 3:
        raise click.BadParameter("expected three coefficients t0,t1,t2")
    try:
        return tuple(int(part) for part in parts)
    except ValueError:
        raise click.BadParameter(f"'{value}' is not a list of integers")


def suite_options(command: Callable) -> Callable:
    """Options shared by every verify command."""
    options = [
        click.option("--q", "q", type=int, default=None, help="Base field order (prime power)."),
        click.option("--modulus", callback=parse_modulus, default=None, help="Cubic modulus t0,t1,t2 with tau^3 = t0 + t1 tau + t2 tau^2."),
        click.option("--seed", type=int, default=None, help="Seed for every random draw."),
        click.option("--samples", type=int, default=None, help="Samples per randomized check."),
        click.option("--cap", type=int, default=None, help="Maximum number of points any enumeration may visit."),
        click.option("--json", "json_path", type=click.Path(dir_okay=False), default=None, help="Write the JSON report here ('-' for stdout)."),
        click.option("--save", is_flag=True, help="Also write the JSON report into the configured report_dir."),
        click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None, help="Config file (default ~/.config/boselab/config.yaml)."),
        click.option("--log-level", type=click.Choice(sorted(ConfigManager.VALID_LOG_LEVELS), case_sensitive=False), default=None),
    ]
    for option in reversed(options):
        command = option(command)
    return command


def load_settings(options: dict[str, Any]) -> dict[str, Any]:
    """
    Config file values overridden by every CLI flag that was given.

    Raises:
        click.UsageError: the merged settings do not validate
    """
    config = ConfigManager(options.get("config_path"))
    for key in ("q", "seed", "samples", "cap", "log_level"):
        if options.get(key) is not None:
            config.set(key, options[key])

    is_valid, errors = config.validate()
    if not is_valid:
        raise click.UsageError("; ".join(errors))

    configure_logging(config.get("log_level"), config.get("log_file"))
    return dict(config.config)


def build_params(settings: dict[str, Any], options: dict[str, Any], **overrides: Any) -> SuiteParams:
    values = dict(
        q=settings["q"],
        modulus=options.get("modulus"),
        seed=settings["seed"],
        samples=settings["samples"],
        cap=settings["cap"],
        rejection_budget=settings["rejection_budget"],
        order_samples=settings["order_samples"],
    )
    values.update(overrides)
    return SuiteParams(**values)


def emit(report: CheckReport, options: dict[str, Any], settings: dict[str, Any]) -> int:
    """Print the summary, write the JSON report, and return the exit code."""
    json_path = options["json_path"]
    if json_path == "-":
        click.echo(dumps(report_to_dict(report)), nl=False)
    else:
        status = "PASS" if report.passed else "FAIL"
        click.echo(f"{report.name}: {status} ({report.timing_ms:.0f} ms)")
        for check in sorted(report.checks, key=lambda c: c.name):
            mark = "PASS" if check.passed else "FAIL"
            click.echo(f"  [{mark}] {check.name}")
            if not check.passed and check.witnesses:
                click.echo(f"         witness: {check.witnesses[0]}")
        click.echo(f"digest: {report_digest(report)}")
        if json_path is not None:
            path = ReportWriter().write(report, json_path)
            click.echo(f"report: {path}")
        if options["save"]:
            path = ReportWriter(settings["report_dir"]).write(report)
            click.echo(f"report: {path}")
    return 0 if report.passed else 1


def guarded(command: Callable) -> Callable:
    """Turn BoseLabError into a one-line message and exit code 2."""

    @wraps(command)
    def wrapper(*args: Any, **kwargs: Any) -> None:
        try:
            code = command(*args, **kwargs)
        except BoseLabError as e:
            logger.debug("Command failed", exc_info=True)
            click.echo(f"error: {e}", err=True)
            code = 2
        click.get_current_context().exit(code)

    return wrapper


@click.group(name="boselab")
@click.version_option(__version__, prog_name="boselab")
def boselab() -> None:
    """Computational checks for the Bose representation of PG(2,q^3) in PG(8,q)."""


def make_verify(suite: str) -> click.Command:
    @click.command("verify", help=f"Run the {suite} suite.")
    @suite_options
    @guarded
    def verify(**options: Any) -> int:
        settings = load_settings(options)
        return emit(run_suite(suite, build_params(settings, options)), options, settings)

    return verify


@click.command("verify", help="Run the conic suite, optionally on a given conic.")
@suite_options
@click.option("--form", default=None, help='Conic over GF(q^3), e.g. "x*z:1, y^2:-1".')
@guarded
def conic_verify(**options: Any) -> int:
    settings = load_settings(options)
    params = build_params(settings, options, form=options["form"])
    return emit(run_suite("conic", params), options, settings)


@click.command("verify", help="Run the cone suite, optionally with a given conic as the base.")
@suite_options
@click.option("--form", default=None, help='Conic over GF(q^3), e.g. "x*z:1, y^2:-1".')
@guarded
def cone_verify(**options: Any) -> int:
    settings = load_settings(options)
    params = build_params(settings, options, form=options["form"])
    return emit(run_suite("cone", params), options, settings)


@click.command("order-dim", help="Sample 5-spaces against the conic scroll; --samples sets the draw count.")
@suite_options
@click.option("--anchored", is_flag=True, help="Span each draw by points on distinct generators.")
@guarded
def scroll_order_dim(**options: Any) -> int:
    settings = load_settings(options)
    draws = options["samples"] if options["samples"] is not None else settings["order_samples"]
    params = build_params(settings, options, order_samples=draws)
    return emit(run_order_dimension(params, anchored=options["anchored"]), options, settings)


SPECIAL_COMMANDS = {
    "conic": [conic_verify],
    "cone": [cone_verify],
    "scroll": [make_verify("scroll"), scroll_order_dim],
}

for _name, (_description, _) in SUITES.items():
    _group = click.Group(name=_name, help=_description)
    for _command in SPECIAL_COMMANDS.get(_name, [make_verify(_name)]):
        _group.add_command(_command)
    boselab.add_command(_group)


@boselab.command("list")
@click.argument("query", required=False, default="")
def list_suites(query: str) -> None:
    """List suites, ranked by QUERY when one is given."""
    results = SuiteSearch(suite_catalog()).search(query)
    if not results:
        click.echo(f"no suite matches '{query}'")
        return
    width = max(len(hit["name"]) for hit in results)
    for hit in results:
        click.echo(f"{hit['name']:<{width}}  {hit['description']}")


@boselab.command("reports")
@click.argument("directory", required=False, type=click.Path(file_okay=False))
@click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None)
def list_reports(directory: Optional[str], config_path: Optional[str]) -> None:
    """List saved reports in DIRECTORY (default: the configured report_dir)."""
    if directory is None:
        directory = ConfigManager(config_path).get("report_dir")
    reports = ReportWriter(directory).load_all()
    if not reports:
        click.echo(f"no reports in {directory}")
        return
    for data in reports:
        params = data["params"]
        status = "PASS" if data["pass"] else "FAIL"
        click.echo(f"{data['suite']}  q={params.get('q')}  seed={params.get('seed')}  {status}  {report_digest(data)[:12]}")


def main() -> None:
    """Main entry point for boselab."""
    boselab()


if __name__ == "__main__":
    sys.exit(main())
