"""Command line: headless simulations, transcript replay, and the service."""

from __future__ import annotations

import json
import os
from pathlib import Path

import click

from .errors import FairnegError
from .runner import outcome_to_json, replay as replay_session, run_headless
from .service import DATA_DIR_ENV, create_app


@click.group()
def main():
    """Negotiation support engine with fairness analytics."""


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--seed", type=int, default=None, help="Override the config seed.")
@click.option("--out", "out_dir", type=click.Path(path_type=Path), default=None,
              help="Directory for transcript, change log, and analytics.")
def sim(config_path: Path, seed: int | None, out_dir: Path | None):
    """Run a fully scripted/builtin session to termination."""
    try:
        summary = run_headless(config_path, seed=seed, out_dir=out_dir)
    except FairnegError as exc:
        raise click.ClickException(str(exc)) from exc
    click.echo(json.dumps(summary, indent=2))


@main.command()
@click.option("--transcript", "transcript_path", required=True,
              type=click.Path(exists=True, path_type=Path))
def replay(transcript_path: Path):
    """Recompute all analytics from a persisted transcript."""
    try:
        runtime = replay_session(transcript_path)
    except FairnegError as exc:
        raise click.ClickException(str(exc)) from exc
    report = {
        "analytics": runtime.analytics(),
        "reports": [r.to_json() for r in runtime.reports],
        "aberrations": [a.to_json() for a in runtime.aberrations],
        "outcome": None
        if runtime.state.status == "open"
        else outcome_to_json(runtime.outcome()),
        "analytics_digest": runtime.analytics_digest(),
    }
    click.echo(json.dumps(report, indent=2))


@main.command()
@click.option("--port", type=int, default=8000)
@click.option("--data", "data_dir", type=click.Path(path_type=Path), default=None,
              help=f"Session data directory (or ${DATA_DIR_ENV}).")
def serve(port: int, data_dir: Path | None):
    """Serve the HTTP + event-stream API."""
    import uvicorn

    if data_dir is None and os.environ.get(DATA_DIR_ENV):
        data_dir = Path(os.environ[DATA_DIR_ENV])
    app = create_app(data_dir)
    uvicorn.run(app, host="127.0.0.1", port=port)


if __name__ == "__main__":
    main()
