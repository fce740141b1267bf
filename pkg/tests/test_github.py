"""Git-host client against the REST-shaped fixture server."""

from __future__ import annotations

import pytest

from apce.github import (
    AuthError,
    CommitType,
    Credentials,
    FileStatus,
    GithubClient,
    NotFoundError,
    RateLimitError,
    classify_commit_type,
    truncate_diff,
    DIFF_TRUNCATION_MARKER,
)
from apce.github import FileChange
from tests.conftest import (
    FIXTURE_GITHUB_TOKEN,
    RATE_LIMITED_TOKEN,
    GitHostFixture,
    default_git_fixture,
    fixture_commit,
)


def make_client(fixture: GitHostFixture, token: str = FIXTURE_GITHUB_TOKEN) -> GithubClient:
    return GithubClient(
        Credentials(token=token, username="tester"),
        base_url="https://git.fixture",
        transport=fixture.transport(),
    )


class TestAuthAndErrors:
    def test_invalid_token_is_auth_error(self):
        client = make_client(default_git_fixture(), token="wrong")
        with pytest.raises(AuthError):
            client.list_repositories()

    def test_rate_limit_error_carries_reset(self):
        client = make_client(default_git_fixture(), token=RATE_LIMITED_TOKEN)
        with pytest.raises(RateLimitError) as exc:
            client.list_repositories()
        assert exc.value.reset_epoch == 1700001234

    def test_rate_limit_distinct_from_auth_by_type(self):
        assert not issubclass(RateLimitError, AuthError)
        assert not issubclass(AuthError, RateLimitError)

    def test_empty_token_rejected_up_front(self):
        with pytest.raises(AuthError):
            GithubClient(Credentials(token=""))

    def test_unknown_repo_not_found(self):
        client = make_client(default_git_fixture())
        with pytest.raises(NotFoundError):
            client.list_commits("octo/secret", page=1)


class TestListRepositories:
    def test_two_repo_fixture(self):
        fixture = GitHostFixture(repos={"octo/widget": [], "octo/gadget": []})
        repos = make_client(fixture).list_repositories()
        assert sorted(r.full_name for r in repos) == ["octo/gadget", "octo/widget"]
        assert all(r.id > 0 for r in repos)


class TestListCommits:
    def test_newest_first(self):
        client = make_client(default_git_fixture())
        commits = client.list_commits("octo/widget", page=1)
        assert [c.timestamp for c in commits] == sorted(
            (c.timestamp for c in commits), reverse=True
        )
        assert commits[0].summary == "Fix overflow (#12)"

    def test_summary_is_first_line(self):
        fixture = GitHostFixture(
            repos={
                "octo/widget": [
                    fixture_commit("ab" * 20, "Fix thing\n\nLong body here", "2024-05-04T12:00:00Z", [])
                ]
            }
        )
        commits = make_client(fixture).list_commits("octo/widget")
        assert commits[0].summary == "Fix thing"

    def test_page_beyond_end_is_empty(self):
        client = make_client(default_git_fixture())
        assert client.list_commits("octo/widget", page=9) == []

    def test_pagination_union_complete_no_duplicates(self):
        commits = [
            fixture_commit(f"{i:02x}" * 20, f"change {i}", f"2024-05-{20 - i:02d}T00:00:00Z", [])
            for i in range(5)
        ]
        fixture = GitHostFixture(repos={"octo/widget": commits})
        client = make_client(fixture)
        seen: list[str] = []
        page = 1
        while True:
            batch = client.list_commits("octo/widget", page=page, per_page=2)
            if not batch:
                break
            seen.extend(c.sha for c in batch)
            page += 1
        assert len(seen) == len(set(seen)) == 5
        assert set(seen) == {c["sha"] for c in commits}


class TestGetCommitContext:
    def test_files_and_diff(self):
        client = make_client(default_git_fixture())
        context = client.get_commit_context("octo/widget", "c3" * 20)
        assert len(context.files) == 1
        change = context.files[0]
        assert change.filename == "parser.c"
        assert change.status is FileStatus.MODIFIED
        assert (change.additions, change.deletions, change.changes) == (3, 1, 4)
        assert "long n = read();" in context.diff
        assert "--- a/parser.c" in context.diff

    def test_pr_title_attached(self):
        client = make_client(default_git_fixture())
        context = client.get_commit_context("octo/widget", "c3" * 20)
        assert context.pr_title == "Guard parser against overflow"

    def test_issue_resolved_from_message_reference(self):
        client = make_client(default_git_fixture())
        context = client.get_commit_context("octo/widget", "c3" * 20)
        assert "Overflow on long input" in context.issue_report
        assert "4k chars" in context.issue_report

    def test_commit_without_pr_or_issue(self):
        client = make_client(default_git_fixture())
        context = client.get_commit_context("octo/widget", "b2" * 20)
        assert context.pr_title is None
        assert context.issue_report is None

    def test_unknown_sha_not_found(self):
        client = make_client(default_git_fixture())
        with pytest.raises(NotFoundError):
            client.get_commit_context("octo/widget", "ff" * 20)

    def test_issue_reference_to_missing_issue_is_absent(self):
        fixture = GitHostFixture(
            repos={
                "octo/widget": [
                    fixture_commit("ab" * 20, "Fix thing (#99)", "2024-05-04T12:00:00Z", [])
                ]
            }
        )
        context = make_client(fixture).get_commit_context("octo/widget", "ab" * 20)
        assert context.issue_report is None

    def test_original_message_and_type(self):
        client = make_client(default_git_fixture())
        context = client.get_commit_context("octo/widget", "a1" * 20)
        assert context.original_message == "docs: describe setup steps"
        assert context.commit_type is CommitType.DOCS

    def test_oversized_diff_truncated(self):
        big_patch = "+line of change\n" * 10_000
        fixture = GitHostFixture(
            repos={
                "octo/widget": [
                    fixture_commit(
                        "ab" * 20,
                        "Huge refactor",
                        "2024-05-04T12:00:00Z",
                        files=[{
                            "filename": "big.c",
                            "status": "modified",
                            "additions": 10_000,
                            "deletions": 0,
                            "changes": 10_000,
                            "patch": big_patch,
                        }],
                    )
                ]
            }
        )
        client = GithubClient(
            Credentials(token=FIXTURE_GITHUB_TOKEN),
            base_url="https://git.fixture",
            transport=fixture.transport(),
            max_diff_bytes=4096,
        )
        context = client.get_commit_context("octo/widget", "ab" * 20)
        assert context.diff.endswith(DIFF_TRUNCATION_MARKER)
        assert len(context.diff.encode()) < 5000


class TestTruncateDiff:
    def test_short_diff_untouched(self):
        assert truncate_diff("small", 100) == "small"

    def test_cut_respects_utf8_boundaries(self):
        diff = "é" * 100
        cut = truncate_diff(diff, 33)
        assert cut.endswith(DIFF_TRUNCATION_MARKER)
        cut.encode("utf-8")  # must not raise


class TestClassifyCommitType:
    @pytest.mark.parametrize(
        ("message", "expected"),
        [
            ("fix: handle empty diff", CommitType.BUG_FIX),
            ("feat(parser): add arrays", CommitType.FEATURE),
            ("docs: update readme", CommitType.DOCS),
            ("refactor!: split module", CommitType.REFACTOR),
            ("test: cover retry", CommitType.TEST),
            ("chore: bump deps", CommitType.CHORE),
            ("Add retry logic", CommitType.FEATURE),
            ("Fixed the crash", CommitType.BUG_FIX),
            ("Implement caching layer", CommitType.FEATURE),
            ("misc", CommitType.UNKNOWN),
        ],
    )
    def test_heuristics(self, message, expected):
        assert classify_commit_type(message, []) is expected

    def test_docs_only_files(self):
        files = [FileChange("README.md", FileStatus.MODIFIED, 1, 0, 1)]
        assert classify_commit_type("misc", files) is CommitType.DOCS

    def test_mixed_files_fall_back_to_unknown(self):
        files = [
            FileChange("README.md", FileStatus.MODIFIED, 1, 0, 1),
            FileChange("core.py", FileStatus.MODIFIED, 1, 0, 1),
        ]
        assert classify_commit_type("misc", files) is CommitType.UNKNOWN


class TestInFlightCap:
    def test_at_most_four_concurrent_requests(self):
        import threading
        import time as time_mod

        import httpx

        lock = threading.Lock()
        state = {"current": 0, "peak": 0}

        def handler(request: httpx.Request) -> httpx.Response:
            with lock:
                state["current"] += 1
                state["peak"] = max(state["peak"], state["current"])
            time_mod.sleep(0.05)
            with lock:
                state["current"] -= 1
            return httpx.Response(200, json=[])

        client = GithubClient(
            Credentials(token=FIXTURE_GITHUB_TOKEN),
            base_url="https://git.fixture",
            transport=httpx.MockTransport(handler),
        )
        threads = [
            threading.Thread(target=lambda: client.list_commits("octo/widget"))
            for _ in range(12)
        ]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert state["peak"] <= 4


class TestInvariants:
    def test_file_change_consistency_enforced(self):
        with pytest.raises(ValueError):
            FileChange("a.py", FileStatus.MODIFIED, 1, 1, 3)

    def test_credentials_repr_redacts_token(self):
        creds = Credentials(token="ghp_secret", username="alice")
        assert "ghp_secret" not in repr(creds)

    def test_context_rejects_bad_sha(self):
        from tests.conftest import make_context

        with pytest.raises(ValueError):
            make_context(commit_id="not-a-sha")
