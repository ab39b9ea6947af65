"""Command-line interface for plankforge.

Usage:
    $ plankforge width body.json
    $ plankforge spiky body.json
    $ plankforge cover body.json --eps 0.5 -o cover.json
    $ plankforge verify body.json cover.json --samples 100000
    $ plankforge render body.json --cover cover.json -o cover.svg

Exit codes:
    0  success (verify: certified by sampling)
    1  verify: covering refuted
    2  verify: audit failed
    3  input error (unreadable file, malformed document, invalid body)
    4  body is not spiky
    5  numerical failure
"""

import functools
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Optional, TypeVar

import click

from plankforge import __version__
from plankforge.cover import Strategy, spiky_annulus_cover
from plankforge.errors import (
    ConvergenceError,
    InvalidBodyError,
    InvalidDocumentError,
    NotOnBoundaryError,
    NotSpikyError,
    PreconditionError,
)
from plankforge.geometry import minimal_width
from plankforge.render import render_svg
from plankforge.serialization import (
    cover_from_dict,
    cover_to_dict,
    dumps,
    read_body,
    read_json,
    report_to_dict,
    spiky_to_dict,
    width_to_dict,
)
from plankforge.settings import ENV_TOLERANCE, Tolerances, override_tolerances
from plankforge.spiky import find_spiky_minimal_width_direction
from plankforge.verify import SamplePlan, audit_trace, verify_covering

logger = logging.getLogger(__name__)

EXIT_INPUT_ERROR = 3
EXIT_NOT_SPIKY = 4
EXIT_NUMERICAL = 5

F = TypeVar("F", bound=Callable[..., Any])

FilePath = click.Path(dir_okay=False, path_type=Path)


def _handle_errors(command: F) -> F:
    """Map library exceptions onto exit codes with a one-line message."""

    @functools.wraps(command)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return command(*args, **kwargs)
        except (InvalidDocumentError, InvalidBodyError, NotOnBoundaryError, PreconditionError) as e:
            click.echo(f"Error: {e}", err=True)
            sys.exit(EXIT_INPUT_ERROR)
        except NotSpikyError as e:
            click.echo(f"Error: {e}", err=True)
            sys.exit(EXIT_NOT_SPIKY)
        except ConvergenceError as e:
            click.echo(f"Error: numerical failure: {e}", err=True)
            sys.exit(EXIT_NUMERICAL)

    return wrapper  # type: ignore[return-value]


def _emit(document: str, output: Optional[Path]) -> None:
    if output is None:
        click.echo(document)
        return
    output.write_text(document + "\n", encoding="utf-8")
    logger.info(f"Wrote {output}")


@click.group()
@click.version_option(version=__version__, prog_name="plankforge")
@click.option("-v", "--verbose", is_flag=True, help="Log construction steps to stderr.")
@click.option(
    "--tol",
    type=click.FloatRange(min=0.0, max=1e-2, min_open=True, max_open=True),
    default=None,
    help=f"Geometric tolerance (overrides {ENV_TOLERANCE}; default 1e-9).",
)
def cli(verbose: bool, tol: Optional[float]) -> None:
    """plankforge: plank coverings of spiky annuli.

    Given a convex body K that is spiky in a minimal width direction and a
    ratio 0 < eps < 1, builds planks of total width strictly less than w(K)
    covering K minus a translate of eps*K, and checks such coverings
    independently.

    Bodies are JSON documents:

        {"dim": 2, "type": "polygon", "vertices": [[x, y], ...]}

        {"dim": 2, "type": "arcgon", "pieces": [...]}

        {"dim": 3, "type": "polytope", "vertices": [[x, y, z], ...]}
    """
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
        stream=sys.stderr,
    )
    if tol is not None:
        override_tolerances(Tolerances(geometric=tol))


@cli.command()
@click.argument("body_file", type=FilePath)
@_handle_errors
def width(body_file: Path) -> None:
    """Print the minimal width w and a minimizing direction u_star."""
    body = read_body(body_file)
    w, direction = minimal_width(body)
    click.echo(dumps(width_to_dict(w, direction)))


@cli.command()
@click.argument("body_file", type=FilePath)
@_handle_errors
def spiky(body_file: Path) -> None:
    """Print a spikiness witness, or "spiky": false when there is none."""
    body = read_body(body_file)
    found = find_spiky_minimal_width_direction(body)
    click.echo(dumps(spiky_to_dict(None if found is None else found[1])))


@cli.command()
@click.argument("body_file", type=FilePath)
@click.option("--eps", "epsilon", type=click.FloatRange(0.0, 1.0, min_open=True, max_open=True), required=True)
@click.option(
    "--strategy",
    type=click.Choice([s.value for s in Strategy]),
    default=None,
    help="Cross-section strategy (default: two-plank-2D in the plane, polyhedral in space).",
)
@click.option(
    "--seed",
    type=click.IntRange(min=0),
    default=0,
    show_default=True,
    help="Seed of the quasi-random delta_t cross-check on solid bodies.",
)
@click.option("-o", "--output", type=FilePath, default=None, help="Write the covering JSON here instead of stdout.")
@_handle_errors
def cover(body_file: Path, epsilon: float, strategy: Optional[str], seed: int, output: Optional[Path]) -> None:
    """Build a plank covering of K minus (eps*K + y)."""
    body = read_body(body_file)
    result = spiky_annulus_cover(body, epsilon, strategy, seed)
    _emit(dumps(cover_to_dict(result)), output)


@cli.command()
@click.argument("body_file", type=FilePath)
@click.argument("cover_file", type=FilePath)
@click.option("--samples", type=click.IntRange(min=10), default=100_000, show_default=True)
@click.option("--seed", type=click.IntRange(min=0), default=0, show_default=True)
@click.option("-o", "--output", type=FilePath, default=None, help="Write the report JSON here instead of stdout.")
@_handle_errors
def verify(body_file: Path, cover_file: Path, samples: int, seed: int, output: Optional[Path]) -> None:
    """Check a covering by sampling and re-audit its construction trace.

    Exit status: 0 certified, 1 refuted, 2 audit failed, 3 input error.
    """
    body = read_body(body_file)
    result = cover_from_dict(read_json(cover_file))
    if len(result.shift) != body.dim:
        raise InvalidDocumentError("Covering and body dimensions differ")
    inner = body.scaled(result.params.epsilon)
    report = verify_covering(
        body,
        inner,
        result.shift,
        result.planks,
        SamplePlan.from_total(samples, seed),
        audits=audit_trace(result),
    )
    _emit(dumps(report_to_dict(report)), output)
    sys.exit(report.exit_code)


@cli.command()
@click.argument("body_file", type=FilePath)
@click.option("--cover", "cover_file", type=FilePath, default=None, help="Covering JSON to draw over the body.")
@click.option("-o", "--output", type=FilePath, required=True, help="SVG file to write.")
@_handle_errors
def render(body_file: Path, cover_file: Optional[Path], output: Path) -> None:
    """Draw a planar body and optionally its covering as SVG."""
    body = read_body(body_file)
    result = None if cover_file is None else cover_from_dict(read_json(cover_file))
    output.write_text(render_svg(body, result), encoding="utf-8")
    logger.info(f"Wrote {output}")


if __name__ == "__main__":
    cli()
