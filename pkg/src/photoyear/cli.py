"""Operator command line: catalog ingest, gameplay stats, serve, migrate."""

from __future__ import annotations

import csv
import sys
from datetime import datetime
from pathlib import Path
from typing import Optional

import click

from . import analytics
from .catalog import Catalog, IngestReport, UnreadableStreamError, fetch_all, load_catalog
from .config import ConfigError, load_config
from .storage import GameMode, PointKind, Repository


@click.group()
def main():
    """Self-hostable photo year-guessing game."""


@main.command()
@click.option("--meta", required=True, type=click.Path(), help="Path to meta.csv.")
@click.option("--dest", required=True, type=click.Path(), help="Directory for resized assets.")
@click.option("--fetch", is_flag=True, help="Download and resize the images.")
@click.option("--workers", default=4, show_default=True, help="Parallel fetch workers.")
@click.option("--allow-partial-years", is_flag=True,
              help="Accept catalogs that do not cover every year 1930-1999.")
@click.option("--report", "report_path", required=True, type=click.Path(),
              help="Where to write the machine-readable ingest report.")
def ingest(meta, dest, fetch, workers, allow_partial_years, report_path):
    """Validate a metadata file and optionally fetch its image assets.

    Exit codes: 0 all rows accepted, 2 finished with rejections/fetch
    failures/coverage gaps, 1 unreadable input.
    """
    try:
        catalog, report = load_catalog(meta, allow_partial_years=allow_partial_years)
    except UnreadableStreamError as err:
        click.echo(f"error: {err}", err=True)
        sys.exit(1)

    if fetch:
        report.fetch_failures = fetch_all(catalog, dest, workers=workers)

    _write_ingest_report(report_path, meta, report)
    click.echo(
        f"accepted {report.accepted}/{report.total_rows} rows,"
        f" {len(report.rejected)} rejected,"
        f" {len(report.fetch_failures)} fetch failures,"
        f" {len(report.missing_years)} missing years"
    )
    if report.rejected or report.fetch_failures or report.missing_years:
        sys.exit(2)


def _write_ingest_report(path: str, meta: str, report: IngestReport) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fp:
        fp.write(f"# photoyear ingest report for {meta}\n")
        fp.write(
            f"# total_rows={report.total_rows} accepted={report.accepted}"
            f" rejected={len(report.rejected)}"
            f" fetch_failures={len(report.fetch_failures)}"
            f" missing_years={len(report.missing_years)}\n"
        )
        if report.missing_years:
            fp.write(f"# missing_years={','.join(map(str, report.missing_years))}\n")
        writer = csv.writer(fp)
        writer.writerow(["row", "reason", "detail"])
        for rejection in report.rejected:
            writer.writerow([rejection.row, rejection.reason.value, rejection.detail])
        for img_id, cause in report.fetch_failures:
            writer.writerow(["fetch-failure", img_id, cause])


@main.command()
@click.option("--db", "db_path", required=True, type=click.Path(exists=True),
              help="Path to the game database.")
@click.option("--from", "date_from", type=click.DateTime(["%Y-%m-%d"]), default=None,
              help="Count plays on/after this date.")
@click.option("--to", "date_to", type=click.DateTime(["%Y-%m-%d"]), default=None,
              help="Count plays before this date.")
@click.option("--include-demo", is_flag=True, help="Include demo plays.")
@click.option("--format", "fmt", type=click.Choice(["table", "csv"]), default="table",
              show_default=True)
def stats(db_path, date_from: Optional[datetime], date_to: Optional[datetime],
          include_demo, fmt):
    """Per-decade performance (guesses, images shown, correct %) plus
    per-mode accuracy from the gameplay log."""
    repo = Repository(db_path)
    try:
        catalog = Catalog(repo.list_images())
        plays = repo.list_plays(include_demo=include_demo, since=date_from, until=date_to)
        decades = analytics.decade_stats(plays, catalog, include_demo=include_demo)
        modes = analytics.mode_accuracy(plays, include_demo=include_demo)
        mode_totals = {
            mode: sum(1 for p in plays if p.mode is mode) for mode in GameMode
        }
    finally:
        repo.close()

    if fmt == "csv":
        writer = csv.writer(sys.stdout)
        writer.writerow(["row_type", "label", "total_guesses", "total_images_shown",
                         "correct_pct"])
        for stat in decades.values():
            writer.writerow([
                "decade", analytics.decade_label(stat.decade), stat.total_guesses,
                stat.total_images_shown,
                "" if stat.correct_pct is None else stat.correct_pct,
            ])
        for mode in GameMode:
            pct = modes[mode]
            writer.writerow(["mode", mode.value, mode_totals[mode], "",
                             "" if pct is None else pct])
        return

    click.echo(f"{'decade':<8} {'guesses':>8} {'shown':>8} {'correct %':>10}")
    for stat in decades.values():
        pct = "-" if stat.correct_pct is None else f"{stat.correct_pct}"
        click.echo(
            f"{analytics.decade_label(stat.decade):<8} {stat.total_guesses:>8}"
            f" {stat.total_images_shown:>8} {pct:>10}"
        )
    click.echo()
    for mode in GameMode:
        pct = "-" if modes[mode] is None else f"{modes[mode]}%"
        click.echo(f"{mode.value}: {mode_totals[mode]} plays, accuracy {pct}")


@main.command()
@click.option("--config", "config_path", type=click.Path(), default=None,
              help="JSON config file; environment overrides apply on top.")
@click.option("--host", default=None, help="Override listen host.")
@click.option("--port", type=int, default=None, help="Override listen port.")
def serve(config_path, host, port):
    """Run the HTTP service."""
    from .service import serve as run_service

    try:
        config = load_config(config_path)
    except ConfigError as err:
        click.echo(f"error: {err}", err=True)
        sys.exit(1)
    if host is not None:
        config.host = host
    if port is not None:
        config.port = port
    run_service(config)


@main.command()
@click.option("--db", "db_path", required=True, type=click.Path(),
              help="Path to the game database (created if absent).")
def migrate(db_path):
    """Apply pending schema migrations."""
    repo = Repository(db_path)
    try:
        applied = repo.migrate()
        version = repo.schema_version
    finally:
        repo.close()
    if applied:
        click.echo(f"applied migrations: {applied}; schema now at {version}")
    else:
        click.echo(f"schema already at {version}")


if __name__ == "__main__":
    main()
