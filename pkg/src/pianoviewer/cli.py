"""Operator command line: serve the API, scan a dataset, validate a session."""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .catalog import SessionStatus, scan_dataset


@click.group()
def main():
    """Multimodal piano performance data service."""


@main.command()
@click.option("--root", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--port", default=8000, show_default=True, type=int)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option(
    "--frontend",
    type=click.Path(file_okay=False),
    default=None,
    help="Directory with the built dashboard (served at /).",
)
def serve(root: str, port: int, host: str, frontend: str | None):
    """Start the REST + WebSocket service for a dataset root."""
    import uvicorn

    from .server import create_app

    app = create_app(Path(root), Path(frontend) if frontend else None)
    uvicorn.run(app, host=host, port=port)


@main.command()
@click.option("--root", required=True, type=click.Path(exists=True, file_okay=False))
def scan(root: str):
    """Scan a dataset and print one status line per session.

    Exits with code 1 when any session is incomplete or unaligned.
    """
    index = scan_dataset(Path(root))
    widths = (22, 12, 20, 12, 10)
    header = ("id", "status", "performer", "date", "duration")
    click.echo("  ".join(h.ljust(w) for h, w in zip(header, widths)))
    any_bad = False
    for r in index.records:
        if r.status is not SessionStatus.READY:
            any_bad = True
        duration = f"{r.duration_s:.1f}s" if r.duration_s is not None else "-"
        row = (
            r.id,
            r.status.value,
            r.performer_name or "-",
            r.recorded_date.isoformat() if r.recorded_date else "-",
            duration,
        )
        click.echo("  ".join(str(v).ljust(w) for v, w in zip(row, widths)))
    counts = {s: 0 for s in SessionStatus}
    for r in index.records:
        counts[r.status] += 1
    click.echo(
        f"{len(index.records)} sessions: "
        + ", ".join(f"{n} {s.value}" for s, n in counts.items())
    )
    sys.exit(1 if any_bad else 0)


@main.command()
@click.option("--root", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--session", "session_id", required=True)
def validate(root: str, session_id: str):
    """Print the warnings recorded while ingesting one session."""
    index = scan_dataset(Path(root))
    record = index.get(session_id)
    if record is None:
        raise click.ClickException(f"unknown session {session_id!r}")
    click.echo(f"{record.id}: {record.status.value}")
    for warning in record.warnings:
        click.echo(f"  warning: {warning}")
    if not record.warnings:
        click.echo("  no warnings")


if __name__ == "__main__":
    main()
