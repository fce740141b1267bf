"""Shared fixtures: commit contexts, scripted LLMs, and fixture servers.

The git-host and LLM fixtures implement the same REST shapes as the real
services. Each is a transport-agnostic handler that can be mounted either
as an ``httpx.MockTransport`` (inside unit tests) or as a real HTTP server
on localhost (for CLI and end-to-end runs).
"""

from __future__ import annotations

import json
import re
import threading
import time
from urllib.parse import parse_qs, urlsplit

import httpx
import pytest
import uvicorn
from fastapi import FastAPI, Request, Response

from apce.github import CommitContext, CommitType, FileChange, FileStatus
from apce.llm import LlmTransportError

FULL_SHA = "a1b2c3d4e5f60718293a4b5c6d7e8f9012345678"

FIXTURE_GITHUB_TOKEN = "fixture-github-token-123"
RATE_LIMITED_TOKEN = "rate-limited-token"
FIXTURE_LLM_KEY = "fixture-openrouter-key"


def make_context(**overrides) -> CommitContext:
    fields = dict(
        commit_id=FULL_SHA,
        repo="octo/widget",
        original_message="Fix overflow in parser",
        diff=(
            "diff --git a/parser.c b/parser.c\n--- a/parser.c\n+++ b/parser.c\n"
            "@@ -1 +1 @@\n-int x;\n+long x;"
        ),
        commit_type=CommitType.BUG_FIX,
        timestamp="2024-05-04T12:00:00Z",
        files=[FileChange("parser.c", FileStatus.MODIFIED, 1, 1, 2)],
        pr_title="Fix parser overflow",
        issue_report="Parser crashes on long input\n\nSteps to reproduce: feed 5k chars.",
    )
    fields.update(overrides)
    return CommitContext(**fields)


class ScriptedLlm:
    """Callable standing in for the LLM transport.

    Pops replies from ``script`` in call order; an Exception instance in the
    script is raised instead of returned. Once the script is exhausted,
    ``fallback`` is used (or the call fails the test).
    """

    def __init__(self, *script, fallback: str | None = None):
        self.script = list(script)
        self.fallback = fallback
        self.calls: list[str] = []

    def __call__(self, prompt: str) -> str:
        self.calls.append(prompt)
        if self.script:
            item = self.script.pop(0)
        elif self.fallback is not None:
            item = self.fallback
        else:
            raise AssertionError("ScriptedLlm ran out of scripted replies")
        if isinstance(item, Exception):
            raise item
        return item


class FailingLlm:
    """Raises a transport error on every call."""

    def __init__(self):
        self.calls: list[str] = []

    def __call__(self, prompt: str) -> str:
        self.calls.append(prompt)
        raise LlmTransportError("connection refused")


class LiveServer:
    """Run an ASGI app on an ephemeral localhost port in a thread."""

    def __init__(self, app):
        config = uvicorn.Config(app, host="127.0.0.1", port=0, log_level="warning")
        self.server = uvicorn.Server(config)
        self.thread = threading.Thread(target=self.server.run, daemon=True)

    def __enter__(self) -> str:
        self.thread.start()
        deadline = time.time() + 10
        while not self.server.started:
            if time.time() > deadline:
                raise RuntimeError("fixture server failed to start")
            time.sleep(0.01)
        port = self.server.servers[0].sockets[0].getsockname()[1]
        return f"http://127.0.0.1:{port}"

    def __exit__(self, *exc) -> None:
        self.server.should_exit = True
        self.thread.join(timeout=10)


@pytest.fixture
def commit_context() -> CommitContext:
    return make_context()


def fixture_commit(
    sha: str,
    message: str,
    date: str,
    files: list[dict],
    pulls: list[dict] | None = None,
) -> dict:
    return {
        "sha": sha,
        "commit": {"message": message, "author": {"date": date}},
        "files": files,
        "pulls": pulls or [],
    }


def default_git_fixture() -> "GitHostFixture":
    """One repo, three commits, with files, a PR, and an issue reference."""
    commits = [
        fixture_commit(
            "c3" * 20,
            "Fix overflow (#12)",
            "2024-05-06T12:00:00Z",
            files=[
                {
                    "filename": "parser.c",
                    "status": "modified",
                    "additions": 3,
                    "deletions": 1,
                    "changes": 4,
                    "patch": "@@ -10,2 +10,4 @@\n-int n = read();\n+long n = read();\n+check(n);\n+log(n);",
                }
            ],
            pulls=[{"number": 7, "title": "Guard parser against overflow", "body": "Closes #12"}],
        ),
        fixture_commit(
            "b2" * 20,
            "Add retry logic to http client",
            "2024-05-05T12:00:00Z",
            files=[
                {
                    "filename": "client.py",
                    "status": "modified",
                    "additions": 8,
                    "deletions": 2,
                    "changes": 10,
                    "patch": "@@ -1,2 +1,8 @@\n-resp = get(url)\n+resp = get_with_retry(url)",
                },
                {
                    "filename": "tests/test_client.py",
                    "status": "added",
                    "additions": 12,
                    "deletions": 0,
                    "changes": 12,
                    "patch": "@@ -0,0 +1,12 @@\n+def test_retry(): ...",
                },
            ],
        ),
        fixture_commit(
            "a1" * 20,
            "docs: describe setup steps",
            "2024-05-04T12:00:00Z",
            files=[
                {
                    "filename": "README.md",
                    "status": "modified",
                    "additions": 5,
                    "deletions": 0,
                    "changes": 5,
                    "patch": "@@ -1 +1,6 @@\n+## Setup",
                }
            ],
        ),
    ]
    return GitHostFixture(
        repos={"octo/widget": commits},
        issues={("octo/widget", 12): {
            "number": 12,
            "title": "Overflow on long input",
            "body": "Parser crashes when fed more than 4k chars.",
        }},
    )


class GitHostFixture:
    """GitHub-v3-shaped fixture: repos, commits, pulls, issues, auth."""

    def __init__(
        self,
        repos: dict[str, list[dict]],
        issues: dict[tuple[str, int], dict] | None = None,
        token: str = FIXTURE_GITHUB_TOKEN,
    ):
        self.repos = repos
        self.issues = issues or {}
        self.token = token
        self.requests: list[str] = []

    def handle(self, method: str, path: str, query: str, headers: dict) -> tuple[int, object, dict]:
        self.requests.append(f"{method} {path}")
        auth = headers.get("authorization", "")
        supplied = auth.split(" ", 1)[1] if " " in auth else ""
        if supplied == RATE_LIMITED_TOKEN:
            return (
                403,
                {"message": "API rate limit exceeded"},
                {"X-RateLimit-Remaining": "0", "X-RateLimit-Reset": "1700001234"},
            )
        if supplied != self.token:
            return 401, {"message": "Bad credentials"}, {}
        params = {k: v[0] for k, v in parse_qs(query).items()}

        if path == "/user/repos":
            page = int(params.get("page", 1))
            per_page = int(params.get("per_page", 100))
            all_repos = [
                {"id": idx + 1, "full_name": name, "name": name.split("/")[1]}
                for idx, name in enumerate(sorted(self.repos))
            ]
            start = (page - 1) * per_page
            return 200, all_repos[start : start + per_page], {}

        m = re.fullmatch(r"/repos/([^/]+/[^/]+)/commits", path)
        if m:
            repo = m.group(1)
            if repo not in self.repos:
                return 404, {"message": "Not Found"}, {}
            page = int(params.get("page", 1))
            per_page = int(params.get("per_page", 30))
            start = (page - 1) * per_page
            batch = self.repos[repo][start : start + per_page]
            return 200, [{"sha": c["sha"], "commit": c["commit"]} for c in batch], {}

        m = re.fullmatch(r"/repos/([^/]+/[^/]+)/commits/([0-9a-f]+)/pulls", path)
        if m:
            commit = self._find_commit(m.group(1), m.group(2))
            if commit is None:
                return 404, {"message": "Not Found"}, {}
            return 200, commit["pulls"], {}

        m = re.fullmatch(r"/repos/([^/]+/[^/]+)/commits/([0-9a-f]+)", path)
        if m:
            commit = self._find_commit(m.group(1), m.group(2))
            if commit is None:
                return 404, {"message": "Not Found"}, {}
            return 200, {k: commit[k] for k in ("sha", "commit", "files")}, {}

        m = re.fullmatch(r"/repos/([^/]+/[^/]+)/issues/(\d+)", path)
        if m:
            issue = self.issues.get((m.group(1), int(m.group(2))))
            if issue is None:
                return 404, {"message": "Not Found"}, {}
            return 200, issue, {}

        return 404, {"message": "Not Found"}, {}

    def _find_commit(self, repo: str, sha: str) -> dict | None:
        for commit in self.repos.get(repo, []):
            if commit["sha"] == sha or commit["sha"].startswith(sha):
                return commit
        return None

    def transport(self) -> httpx.MockTransport:
        def handler(request: httpx.Request) -> httpx.Response:
            status, body, resp_headers = self.handle(
                request.method,
                request.url.path,
                request.url.query.decode(),
                {k.lower(): v for k, v in request.headers.items()},
            )
            return httpx.Response(status, json=body, headers=resp_headers)

        return httpx.MockTransport(handler)

    def asgi_app(self) -> FastAPI:
        app = FastAPI()

        @app.api_route("/{rest:path}", methods=["GET"])
        async def route(rest: str, request: Request) -> Response:
            status, body, resp_headers = self.handle(
                request.method,
                "/" + rest,
                urlsplit(str(request.url)).query,
                {k.lower(): v for k, v in request.headers.items()},
            )
            return Response(
                content=json.dumps(body),
                status_code=status,
                media_type="application/json",
                headers=resp_headers,
            )

        return app


def default_llm_reply(prompt: str, model: str) -> str:
    """Deterministic replies: echo for refinement prompts, canned drafts otherwise."""
    if "Evaluate the commit message below" in prompt:
        m = re.search(r'Commit message to evaluate: "(.*)"', prompt, re.DOTALL)
        return m.group(1) if m else "Fix parser bug"
    if "Summarize" in prompt:
        return "Fix parser crash on long input"
    return "Add parser bounds check for long input"


class LlmFixture:
    """OpenRouter-compatible chat-completions fixture."""

    def __init__(self, reply_fn=default_llm_reply, fail_all: bool = False):
        self.reply_fn = reply_fn
        self.fail_all = fail_all
        self.captured: list[dict] = []

    def handle(self, body: dict) -> tuple[int, dict]:
        self.captured.append(body)
        if self.fail_all:
            return 500, {"error": "upstream unavailable"}
        prompt = body["messages"][0]["content"]
        reply = self.reply_fn(prompt, body.get("model", ""))
        if reply is None:  # reply_fn signals a simulated provider failure
            return 500, {"error": "upstream unavailable"}
        return 200, {"choices": [{"message": {"role": "assistant", "content": reply}}]}

    def transport(self) -> httpx.MockTransport:
        def handler(request: httpx.Request) -> httpx.Response:
            status, body = self.handle(json.loads(request.content.decode()))
            return httpx.Response(status, json=body)

        return httpx.MockTransport(handler)

    def asgi_app(self) -> FastAPI:
        app = FastAPI()

        @app.post("/chat/completions")
        async def complete(request: Request) -> Response:
            status, body = self.handle(await request.json())
            return Response(
                content=json.dumps(body), status_code=status, media_type="application/json"
            )

        return app
