from __future__ import annotations
from enum import Enum
from typing import Optional
import json
import logging

import typer
from pydantic import BaseModel
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from . import config
from .db import init_db
from .errors import DomainError, ErrorTag
from .models import ValencyType
from .reduction import Locus
from .services import (
    SCHEMA_VERSION,
    correspondence_report,
    family_ab_report,
    family_abc_report,
    family_ones_ab_report,
    invariants_report,
    lift_report,
    list_census,
    run_census,
    solve_report,
    trees_report,
)

app = typer.Typer(help="dessins4 - diameter four trees: models, reductions and lifts")
family_app = typer.Typer(help="Closed-form families (a,b), (a,b,c) and (1,...,1,a,b)")
app.add_typer(family_app, name="family")
console = Console()
log = logging.getLogger("dessins4")


class OutputFormat(str, Enum):
    text = "text"
    json = "json"


class Schedule(str, Enum):
    quadratic = "quadratic"
    chord = "chord"


FormatOpt = typer.Option(OutputFormat.text, "--format", "-f", help="text|json")


@app.callback()
def _boot(verbose: bool = typer.Option(False, "--verbose", "-v", help="debug logging on stderr")):
    level = "DEBUG" if verbose else config.log_level()
    logging.basicConfig(
        level=level,
        format="%(message)s",
        handlers=[RichHandler(console=Console(stderr=True), show_time=False)],
        force=True,
    )


def _parse_type(text: str) -> ValencyType:
    t, was_sorted = ValencyType.parse(text)
    if not was_sorted:
        log.warning("valency type %r sorted to %s", text, t)
    return t


def _precision(value: Optional[int]) -> int:
    if value is None:
        return config.precision()
    if value < 1:
        raise DomainError(ErrorTag.DEGENERATE_INPUT, f"precision must be >= 1, got {value}")
    return value


def _fail(err: DomainError, fmt: OutputFormat):
    if fmt is OutputFormat.json:
        payload = {"schema_version": SCHEMA_VERSION, "error": {"tag": err.tag.value, "message": err.message}}
        typer.echo(json.dumps(payload))
    else:
        typer.echo(f"error: {err}", err=True)
    raise typer.Exit(3)


def _emit_json(report: BaseModel):
    typer.echo(report.model_dump_json(indent=2))


def _run(fmt: OutputFormat, build, render):
    try:
        report = build()
    except DomainError as err:
        _fail(err, fmt)
    if fmt is OutputFormat.json:
        _emit_json(report)
    else:
        render(report)


def _fmt_roots(roots: list) -> str:
    return ", ".join(json.dumps(r) if not isinstance(r, str) else r for r in roots)


@app.command()
def trees(valency_type: str = typer.Argument(..., help="comma separated, e.g. 1,2,3"), fmt: OutputFormat = FormatOpt):
    """Count and enumerate the trees of a valency type."""

    def render(r):
        table = Table(title=f"Trees of type ({','.join(map(str, r.valency_type))})")
        table.add_column("Necklace", style="bold")
        table.add_column("|Aut|", justify="right", style="cyan")
        table.add_column("Normalized models", justify="right")
        for tr in r.trees:
            table.add_row(",".join(map(str, tr.necklace)), str(tr.aut_order), str(tr.normalized_models))
        console.print(table)
        console.print(f"count: {r.count}  linear arrangements: {r.linear_arrangements}")

    _run(fmt, lambda: trees_report(_parse_type(valency_type)), render)


@app.command()
def solve(
    valency_type: str = typer.Option(..., "--type", "-t"),
    p: int = typer.Option(..., "--p"),
    kmax: Optional[int] = typer.Option(None, "--kmax"),
    threads: Optional[int] = typer.Option(None, "--threads"),
    fmt: OutputFormat = FormatOpt,
):
    """Normalized models over F_{p^k}, grouped into trees and Frobenius orbits."""

    def render(r):
        table = Table(title=f"Models of ({','.join(map(str, r.valency_type))}) over F_{r.p}^k")
        table.add_column("Tree", justify="right", style="cyan")
        table.add_column("k", justify="right")
        table.add_column("|Aut|", justify="right")
        table.add_column("Moduli deg", justify="right")
        table.add_column("Roots of first model")
        for i, tr in enumerate(r.trees):
            table.add_row(
                str(i), str(tr.splitting_degree), str(tr.aut_order), str(tr.moduli_degree),
                _fmt_roots(tr.models[0].roots),
            )
        console.print(table)
        status = "complete" if r.complete else "[yellow]incomplete[/]"
        console.print(f"{r.model_count}/{r.predicted} models ({status}), orbit sizes {r.orbit_sizes}")

    _run(fmt, lambda: solve_report(_parse_type(valency_type), p, kmax, threads), render)


@app.command()
def invariants(
    valency_type: str = typer.Option(..., "--type", "-t"),
    p: Optional[list[int]] = typer.Option(None, "--p", help="repeatable; default: primes of a_i and N"),
    fmt: OutputFormat = FormatOpt,
):
    """Subset-sum invariants and the classification of bad primes."""

    def render(r):
        console.print(f"d support: {r.d.support}  (odd: {r.odd_support})")
        console.print(f"d_inf support: {r.d_infinity.support}")
        table = Table(title="Primes")
        table.add_column("p", justify="right", style="cyan")
        table.add_column("Kind", style="bold")
        table.add_column("Regular slots")
        table.add_column("Locus")
        table.add_column("e lower", justify="right")
        table.add_column("e upper", justify="right")
        for pr in r.primes:
            if not pr.bounds:
                table.add_row(str(pr.p), pr.kind, "", "", "", "")
            for b in pr.bounds:
                locus = b.locus if b.slot is None else f"{b.locus}@{b.slot}"
                slots = ",".join(map(str, pr.regular_slots))
                table.add_row(str(pr.p), pr.kind, slots, locus, str(b.lower), str(b.upper))
        console.print(table)

    _run(fmt, lambda: invariants_report(_parse_type(valency_type), p or None), render)


@app.command()
def lift(
    valency_type: str = typer.Option(..., "--type", "-t"),
    p: int = typer.Option(..., "--p"),
    precision: Optional[int] = typer.Option(None, "--precision", "-M"),
    kummer: bool = typer.Option(False, "--kummer", help="lift Kummer models (needs p > n)"),
    schedule: Schedule = typer.Option(Schedule.quadratic, "--schedule"),
    kmax: Optional[int] = typer.Option(None, "--kmax"),
    threads: Optional[int] = typer.Option(None, "--threads"),
    fmt: OutputFormat = FormatOpt,
):
    """Hensel-lift every residue model to Z_p-precision M."""
    def render(r):
        table = Table(title=f"Lifts at p = {r.p}, precision {r.precision}")
        table.add_column("Residue roots")
        table.add_column("Lifted roots (constant rows)")
        table.add_column("Steps", justify="right")
        for entry in r.lifts:
            lifted = [str(root["coeffs"][0]) for root in entry.lift.roots]
            table.add_row(_fmt_roots(entry.residue.roots), "; ".join(lifted), str(entry.steps))
        console.print(table)

    _run(
        fmt,
        lambda: lift_report(
            _parse_type(valency_type), p, _precision(precision), kummer, schedule.value, kmax, threads
        ),
        render,
    )


@app.command()
def correspondence(
    valency_type: str = typer.Option(..., "--type", "-t"),
    p: int = typer.Option(..., "--p"),
    slot: int = typer.Option(..., "--slot"),
    locus: Locus = typer.Option(Locus.ZERO, "--locus"),
    precision: Optional[int] = typer.Option(None, "--precision", "-M"),
    kmax: Optional[int] = typer.Option(None, "--kmax"),
    fmt: OutputFormat = FormatOpt,
):
    """Kummer models of the reduced type -> canonical (zero) or a_i-normalized (infinity) models."""
    def render(r):
        console.print(
            f"reduced type ({','.join(map(str, r.reduced_type))}): "
            f"{r.kummer_count} Kummer models -> {r.model_count} models"
        )
        table = Table(title=f"{r.locus} correspondence at p = {r.p}, slot {r.slot}")
        table.add_column("Kummer roots")
        table.add_column("Round trip")
        table.add_column("Reduces to (1-X)^e")
        for pair in r.pairs:
            table.add_row(
                _fmt_roots(pair.kummer.roots), "yes" if pair.round_trip else "[red]no[/]",
                "yes" if pair.reduces_to_power else "[red]no[/]",
            )
        console.print(table)

    _run(
        fmt,
        lambda: correspondence_report(
            _parse_type(valency_type), p, slot, locus, _precision(precision), kmax
        ),
        render,
    )


def _render_family(r):
    table = Table(title=f"family {r.family} {r.parameters}")
    table.add_column("Quantity", style="bold")
    table.add_column("Value")
    for key, value in r.results.items():
        table.add_row(key, value if isinstance(value, str) else json.dumps(value))
    console.print(table)


@family_app.command("ab")
def family_ab_cmd(a: int = typer.Option(..., "--a"), b: int = typer.Option(..., "--b"), fmt: OutputFormat = FormatOpt):
    _run(fmt, lambda: family_ab_report(a, b), _render_family)


@family_app.command("abc")
def family_abc_cmd(
    a: int = typer.Option(..., "--a"),
    b: int = typer.Option(..., "--b"),
    c: int = typer.Option(..., "--c"),
    p: Optional[int] = typer.Option(None, "--p", help="also classify the reduction at p"),
    fmt: OutputFormat = FormatOpt,
):
    _run(fmt, lambda: family_abc_report(a, b, c, p), _render_family)


@family_app.command("ones-ab")
def family_ones_ab_cmd(
    n: int = typer.Option(..., "--n"),
    a: int = typer.Option(..., "--a"),
    b: int = typer.Option(..., "--b"),
    root: Optional[int] = typer.Option(None, "--root", help="CRootOf index of x among the roots of h"),
    fmt: OutputFormat = FormatOpt,
):
    _run(fmt, lambda: family_ones_ab_report(n, a, b, root), _render_family)


@app.command()
def census(
    family: str = typer.Option("ones-ab", "--family"),
    nmax: int = typer.Option(5, "--nmax"),
    bmax: int = typer.Option(10, "--bmax"),
    show: bool = typer.Option(False, "--show", help="list stored rows instead of sweeping"),
    unproved: bool = typer.Option(False, "--unproved", help="with --show: rows without a criterion"),
    fmt: OutputFormat = FormatOpt,
):
    """Sweep (1,...,1,a,b) and store Galois-orbit evidence in the census database."""
    if family != "ones-ab":
        typer.echo(f"unknown family {family!r}", err=True)
        raise typer.Exit(2)
    init_db()

    def render(r):
        table = Table(title="Census (1,...,1,a,b)")
        table.add_column("n", justify="right", style="cyan")
        table.add_column("a", justify="right")
        table.add_column("b", justify="right")
        table.add_column("h irreducible")
        table.add_column("Criterion", style="magenta")
        table.add_column("p", justify="right")
        for row in r.rows:
            table.add_row(
                str(row.n), str(row.a), str(row.b), "✓" if row.h_irreducible else "",
                row.criterion, "" if row.prime is None else str(row.prime),
            )
        console.print(table)

    build = (lambda: list_census(unproved_only=unproved)) if show else (lambda: run_census(nmax, bmax))
    _run(fmt, build, render)


def main():
    app()


if __name__ == "__main__":
    main()
