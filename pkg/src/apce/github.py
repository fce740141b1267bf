"""Git-hosting REST client: repositories, commit timelines, per-commit context.

Talks to any endpoint compatible with the public GitHub v3 API. The base URL
is configurable so tests (and self-hosted forges) can point at a local
fixture server. Tokens are sent as bearer credentials and are never included
in reprs or log output.
"""

from __future__ import annotations

import re
import threading
from dataclasses import dataclass, field
from enum import Enum

import httpx

DEFAULT_BASE_URL = "https://api.github.com"
DEFAULT_MAX_DIFF_BYTES = 64 * 1024
DIFF_TRUNCATION_MARKER = "... [diff truncated]"

_SHA_RE = re.compile(r"^[0-9a-f]{7,40}$")
_ISSUE_REF_RE = re.compile(r"#(\d+)")
_CONVENTIONAL_PREFIX_RE = re.compile(
    r"^(?P<kind>feat|fix|docs|refactor|test|chore)(\([^)]*\))?!?:", re.IGNORECASE
)

_DOC_SUFFIXES = (".md", ".rst", ".txt", ".adoc")


class GithubError(Exception):
    """Base for all git-host client failures."""


class AuthError(GithubError):
    pass


class NotFoundError(GithubError):
    pass


class ApiError(GithubError):
    pass


class RateLimitError(GithubError):
    """Hourly rate limit exhausted; carries the reset time when the server sent one."""

    def __init__(self, message: str, reset_epoch: int | None = None):
        super().__init__(message)
        self.reset_epoch = reset_epoch


class CommitType(str, Enum):
    FEATURE = "feature"
    BUG_FIX = "bug_fix"
    DOCS = "docs"
    REFACTOR = "refactor"
    TEST = "test"
    CHORE = "chore"
    UNKNOWN = "unknown"

    def human_label(self) -> str:
        return "bug fix" if self is CommitType.BUG_FIX else self.value


class FileStatus(str, Enum):
    ADDED = "added"
    MODIFIED = "modified"
    DELETED = "deleted"
    RENAMED = "renamed"


_STATUS_MAP = {
    "added": FileStatus.ADDED,
    "copied": FileStatus.ADDED,
    "modified": FileStatus.MODIFIED,
    "changed": FileStatus.MODIFIED,
    "unchanged": FileStatus.MODIFIED,
    "removed": FileStatus.DELETED,
    "deleted": FileStatus.DELETED,
    "renamed": FileStatus.RENAMED,
}


@dataclass(frozen=True)
class FileChange:
    filename: str
    status: FileStatus
    additions: int
    deletions: int
    changes: int

    def __post_init__(self):
        if self.additions < 0 or self.deletions < 0:
            raise ValueError("additions/deletions must be non-negative")
        if self.changes != self.additions + self.deletions:
            raise ValueError("changes must equal additions + deletions")


@dataclass(frozen=True)
class Credentials:
    token: str
    username: str = ""

    def __repr__(self) -> str:  # keep the token out of logs and tracebacks
        return f"Credentials(token='***', username={self.username!r})"


@dataclass(frozen=True)
class CommitContext:
    """Everything the prompt placeholders and the stored submission need."""

    commit_id: str
    repo: str
    original_message: str
    diff: str
    commit_type: CommitType
    timestamp: str
    files: list[FileChange] = field(default_factory=list)
    pr_title: str | None = None
    issue_report: str | None = None

    def __post_init__(self):
        if not _SHA_RE.match(self.commit_id):
            raise ValueError(f"commit_id is not a 7-40 char hex sha: {self.commit_id!r}")


@dataclass(frozen=True)
class RepoInfo:
    id: int
    full_name: str


@dataclass(frozen=True)
class CommitSummary:
    sha: str
    summary: str
    timestamp: str


def classify_commit_type(message: str, files: list[FileChange]) -> CommitType:
    """Heuristic commit-type classification.

    A conventional-commit prefix wins; otherwise keyword matching on the
    message; otherwise docs-only file sets classify as docs; otherwise
    unknown.
    """
    head = message.strip()
    prefix = _CONVENTIONAL_PREFIX_RE.match(head)
    if prefix:
        kind = prefix.group("kind").lower()
        return {
            "feat": CommitType.FEATURE,
            "fix": CommitType.BUG_FIX,
            "docs": CommitType.DOCS,
            "refactor": CommitType.REFACTOR,
            "test": CommitType.TEST,
            "chore": CommitType.CHORE,
        }[kind]
    words = {w.strip(".,!:;()[]'\"").lower() for w in head.split()}
    if words & {"fix", "fixes", "fixed", "bug", "bugfix"}:
        return CommitType.BUG_FIX
    if words & {"add", "adds", "added", "implement", "implements", "implemented"}:
        return CommitType.FEATURE
    if files and all(f.filename.lower().endswith(_DOC_SUFFIXES) or "docs/" in f.filename for f in files):
        return CommitType.DOCS
    return CommitType.UNKNOWN


def truncate_diff(diff: str, max_bytes: int) -> str:
    """Cap a diff at ``max_bytes`` of UTF-8, appending a marker when cut."""
    encoded = diff.encode("utf-8")
    if len(encoded) <= max_bytes:
        return diff
    clipped = encoded[:max_bytes].decode("utf-8", errors="ignore")
    return clipped + "\n" + DIFF_TRUNCATION_MARKER


class GithubClient:
    """Synchronous client over the GitHub-compatible REST surface.

    Stateless per call apart from connection reuse; an in-flight semaphore
    (default 4) keeps concurrent callers polite under rate limits.
    """

    def __init__(
        self,
        creds: Credentials,
        base_url: str = DEFAULT_BASE_URL,
        timeout_s: float = 30.0,
        max_diff_bytes: int = DEFAULT_MAX_DIFF_BYTES,
        max_in_flight: int = 4,
        transport: httpx.BaseTransport | None = None,
    ):
        if not creds.token:
            raise AuthError("a non-empty token is required")
        self._creds = creds
        self._max_diff_bytes = max_diff_bytes
        self._in_flight = threading.BoundedSemaphore(max_in_flight)
        self._client = httpx.Client(
            base_url=base_url.rstrip("/"),
            headers={
                "Authorization": f"Bearer {creds.token}",
                "Accept": "application/vnd.github+json",
            },
            timeout=timeout_s,
            transport=transport,
        )

    def close(self) -> None:
        self._client.close()

    def __enter__(self) -> "GithubClient":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def _get(self, path: str, params: dict | None = None):
        with self._in_flight:
            try:
                response = self._client.get(path, params=params)
            except httpx.HTTPError as err:
                raise ApiError(f"transport failure for {path}: {err}") from err
        if response.status_code == 401:
            raise AuthError("credentials rejected (401)")
        if response.status_code == 403:
            if response.headers.get("X-RateLimit-Remaining") == "0":
                reset = response.headers.get("X-RateLimit-Reset")
                raise RateLimitError(
                    "rate limit exhausted",
                    reset_epoch=int(reset) if reset and reset.isdigit() else None,
                )
            raise AuthError("access forbidden (403)")
        if response.status_code == 404:
            raise NotFoundError(f"not found: {path}")
        if response.status_code >= 300:
            raise ApiError(f"unexpected status {response.status_code} for {path}")
        try:
            return response.json()
        except ValueError as err:
            raise ApiError(f"malformed JSON body for {path}") from err

    def list_repositories(self) -> list[RepoInfo]:
        repos: list[RepoInfo] = []
        page = 1
        while True:
            batch = self._get("/user/repos", params={"per_page": 100, "page": page})
            if not batch:
                break
            repos.extend(RepoInfo(id=item["id"], full_name=item["full_name"]) for item in batch)
            if len(batch) < 100:
                break
            page += 1
        return repos

    def list_commits(self, repo: str, page: int = 1, per_page: int = 30) -> list[CommitSummary]:
        batch = self._get(f"/repos/{repo}/commits", params={"page": page, "per_page": per_page})
        summaries = []
        for item in batch:
            message = item["commit"]["message"]
            summaries.append(
                CommitSummary(
                    sha=item["sha"],
                    summary=message.splitlines()[0] if message else "",
                    timestamp=item["commit"]["author"]["date"],
                )
            )
        return summaries

    def get_commit_context(self, repo: str, sha: str) -> CommitContext:
        data = self._get(f"/repos/{repo}/commits/{sha}")
        message = data["commit"]["message"]
        files = [
            FileChange(
                filename=f["filename"],
                status=_STATUS_MAP.get(f.get("status", "modified"), FileStatus.MODIFIED),
                additions=f.get("additions", 0),
                deletions=f.get("deletions", 0),
                changes=f.get("changes", f.get("additions", 0) + f.get("deletions", 0)),
            )
            for f in data.get("files", [])
        ]
        diff = truncate_diff(self._compose_diff(data.get("files", [])), self._max_diff_bytes)
        pr_title, pr_body = self._associated_pull(repo, sha)
        issue_report = self._resolve_issue_report(repo, message, pr_body)
        return CommitContext(
            commit_id=data["sha"],
            repo=repo,
            original_message=message,
            diff=diff,
            commit_type=classify_commit_type(message, files),
            timestamp=data["commit"]["author"]["date"],
            files=files,
            pr_title=pr_title,
            issue_report=issue_report,
        )

    @staticmethod
    def _compose_diff(file_entries: list[dict]) -> str:
        parts = []
        for entry in file_entries:
            patch = entry.get("patch")
            if patch is None:
                continue
            name = entry["filename"]
            parts.append(f"diff --git a/{name} b/{name}\n--- a/{name}\n+++ b/{name}\n{patch}")
        return "\n".join(parts)

    def _associated_pull(self, repo: str, sha: str) -> tuple[str | None, str]:
        try:
            pulls = self._get(f"/repos/{repo}/commits/{sha}/pulls")
        except NotFoundError:
            return None, ""
        if not pulls:
            return None, ""
        first = pulls[0]
        return first.get("title"), first.get("body") or ""

    def _resolve_issue_report(self, repo: str, message: str, pr_body: str) -> str | None:
        match = _ISSUE_REF_RE.search(message) or _ISSUE_REF_RE.search(pr_body)
        if not match:
            return None
        try:
            issue = self._get(f"/repos/{repo}/issues/{match.group(1)}")
        except NotFoundError:
            return None
        title = issue.get("title") or ""
        body = issue.get("body") or ""
        return f"{title}\n\n{body}" if body else title
