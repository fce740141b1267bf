"""Command-line entry points: serve the API, generate for one commit, score a pair.

``generate`` writes one JSON line per approach result to stdout (or --out)
and a human-readable summary to stderr, exiting nonzero if any approach
produced an error record. ``score`` prints the three metrics at 6-decimal
precision.
"""

from __future__ import annotations

import json
import os
import sys

import click
import uvicorn

from apce.approaches import ApproachRegistry
from apce.config import (
    ENV_GITHUB_TOKEN,
    ENV_GITHUB_USERNAME,
    MissingConfigError,
    load_config,
)
from apce.github import Credentials, GithubClient, GithubError
from apce.llm import LlmClient
from apce.metrics import score_all
from apce.pipeline import GenerationResult, generate_for_commit
from apce.service import create_app


@click.group()
def main() -> None:
    """Generate and evaluate LLM-written commit messages."""


def _load(config_file: str | None):
    try:
        return load_config(config_file)
    except MissingConfigError as err:
        raise click.ClickException(str(err)) from err


@main.command()
@click.option("--bind", default="127.0.0.1:8000", show_default=True, help="host:port to listen on")
@click.option("--config", "config_file", type=click.Path(), default=None, help="JSON config file")
def serve(bind: str, config_file: str | None) -> None:
    """Run the HTTP service until interrupted."""
    config = _load(config_file)
    host, _, port = bind.rpartition(":")
    app = create_app(config)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port), log_level="info")


def _result_line(result: GenerationResult) -> str:
    return json.dumps(
        {
            "approach_name": result.approach_name,
            "success": result.success,
            "refinement_used": result.refinement_used,
            "message": result.message,
            "error_kind": result.error_kind.value if result.error_kind else None,
            "scores": result.scores.as_dict() if result.scores else None,
        },
        ensure_ascii=False,
    )


@main.command()
@click.option("--repo", required=True, help="owner/name of the repository")
@click.option("--sha", required=True, help="commit sha to generate for")
@click.option(
    "--approach",
    "approach_names",
    multiple=True,
    help="approach to run (repeatable; default: all configured)",
)
@click.option("--out", type=click.Path(), default=None, help="write JSON lines here instead of stdout")
@click.option("--config", "config_file", type=click.Path(), default=None, help="JSON config file")
def generate(
    repo: str, sha: str, approach_names: tuple[str, ...], out: str | None, config_file: str | None
) -> None:
    """Generate messages for one commit with each configured approach."""
    config = _load(config_file)
    token = os.environ.get(ENV_GITHUB_TOKEN, "")
    if not token:
        raise click.ClickException(f"environment variable {ENV_GITHUB_TOKEN} is not set")
    username = os.environ.get(ENV_GITHUB_USERNAME, "")

    registry = ApproachRegistry(config.approaches_dir)
    approaches = registry.list_approaches()
    if approach_names:
        known = {a.name: a for a in approaches}
        unknown = [name for name in approach_names if name not in known]
        if unknown:
            raise click.ClickException(
                f"unknown approach(es) {', '.join(unknown)}; known: {', '.join(sorted(known))}"
            )
        approaches = [known[name] for name in approach_names]
    if not approaches:
        raise click.ClickException("no approaches configured")

    try:
        with GithubClient(
            Credentials(token=token, username=username), base_url=config.github_base_url
        ) as client:
            context = client.get_commit_context(repo, sha)
    except GithubError as err:
        raise click.ClickException(f"cannot fetch commit context: {err}") from err

    with LlmClient(config.llm) as llm:
        results = generate_for_commit(
            context,
            approaches,
            llm.complete,
            registry.refinement_prompt,
            config.retry,
        )

    lines = [_result_line(result) for result in results]
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
    else:
        for line in lines:
            click.echo(line)

    for result in results:
        if result.success:
            click.echo(f"{result.approach_name}: ok ({len(result.message)} chars)", err=True)
        else:
            click.echo(f"{result.approach_name}: error {result.error_kind.value}", err=True)
    if not all(result.success for result in results):
        sys.exit(1)


@main.command()
@click.argument("original")
@click.argument("generated")
def score(original: str, generated: str) -> None:
    """Score GENERATED against ORIGINAL with all three metrics."""
    scores = score_all(original, generated)
    click.echo(f"bleu {scores.bleu:.6f}")
    click.echo(f"meteor {scores.meteor:.6f}")
    click.echo(f"rouge_l {scores.rouge_l:.6f}")


if __name__ == "__main__":
    main()
