"""HTTP surface tying the tool together.

Flow for a participant session: create a session, fetch the consent
document, accept it, hand over git-host credentials, browse repositories
and commits, trigger generation, and submit ratings. Every data endpoint is
gated on accepted consent. Credentials live only in server memory; nothing
that identifies the participant reaches the submission store.

Generated candidates return in a server-shuffled display order with
arbitrary 1-based indexes and no approach names; the server keeps the
index-to-approach mapping and re-associates ratings before persisting, so
the stored records are independent of the display permutation.

Research endpoints live under ``/api/research`` behind a password
(``APCE_RESEARCH_PASSWORD``) checked through a salted-hash, constant-time
comparison that trades a short-lived bearer token.
"""

from __future__ import annotations

import hashlib
import hmac
import random
import secrets
import threading
import time
from dataclasses import dataclass, field

from fastapi import Depends, FastAPI, Header, HTTPException, Query
from pydantic import BaseModel, Field

from apce.approaches import (
    Approach,
    ApproachRegistry,
    DuplicateApproachError,
    InvalidApproachError,
    InvalidRefinementPromptError,
    UnknownApproachError,
)
from apce.config import AppConfig
from apce.github import (
    AuthError,
    CommitContext,
    Credentials,
    GithubClient,
    GithubError,
    NotFoundError,
    RateLimitError,
)
from apce.llm import LlmClient
from apce.pipeline import GenerationResult, generate_for_commit
from apce.store import RatingRecord, Submission, SubmissionStore, ValidationError


@dataclass
class GenerationRecord:
    """Server-side memory of one generation: snapshot plus blind mapping."""

    generation_id: str
    context: CommitContext
    results: list[GenerationResult]  # registry order
    display_order: list[int]  # display position -> index into results


@dataclass
class Session:
    session_id: str
    created_at: float
    consent_viewed: bool = False
    consent_accepted: bool = False
    credentials: Credentials | None = None
    generations: dict[str, GenerationRecord] = field(default_factory=dict)


class ConsentBody(BaseModel):
    accepted: bool


class CredentialsBody(BaseModel):
    token: str = Field(min_length=1)
    username: str = ""


class GenerateBody(BaseModel):
    repo: str
    sha: str


class RatingBody(BaseModel):
    display_index: int
    likert: dict[str, int]
    rationale: str


class SubmitBody(BaseModel):
    generation_id: str
    ratings: list[RatingBody]


class LoginBody(BaseModel):
    password: str


class ApproachBody(BaseModel):
    name: str
    template: str
    refinement_enabled: bool = True


class RefinementFlagBody(BaseModel):
    enabled: bool


class RefinementPromptBody(BaseModel):
    template: str


def _error(status: int, code: str, message: str, **extra) -> HTTPException:
    return HTTPException(status_code=status, detail={"code": code, "message": message, **extra})


def _result_payload(result: GenerationResult, display_index: int) -> dict:
    return {
        "display_index": display_index,
        "success": result.success,
        "message": result.message,
        "error_kind": result.error_kind.value if result.error_kind else None,
        "scores": result.scores.as_dict() if result.scores else None,
    }


def _submission_payload(sub: Submission) -> dict:
    from apce.store import submission_to_record

    return submission_to_record(sub)


def create_app(config: AppConfig) -> FastAPI:
    app = FastAPI(title="apce", docs_url=None, redoc_url=None)

    registry = ApproachRegistry(config.approaches_dir)
    store = SubmissionStore.at_dir(config.data_dir)
    llm_client = LlmClient(config.llm, transport=config.llm_transport)

    state_lock = threading.Lock()
    sessions: dict[str, Session] = {}
    research_tokens: dict[str, float] = {}
    shuffle_rng = random.Random(config.shuffle_seed)

    password_salt = secrets.token_bytes(16)
    password_hash = (
        hashlib.sha256(password_salt + config.research_password.encode()).digest()
        if config.research_password
        else None
    )

    def read_consent() -> tuple[str, str]:
        if config.consent_path is None or not config.consent_path.exists():
            raise _error(500, "consent_not_configured", "no consent document is configured")
        text = config.consent_path.read_text(encoding="utf-8")
        version = hashlib.sha256(text.encode()).hexdigest()[:12]
        return text, version

    def get_session(x_session_id: str = Header(default="")) -> Session:
        with state_lock:
            session = sessions.get(x_session_id)
            if session is None:
                raise _error(401, "invalid_session", "unknown or expired session")
            if time.time() - session.created_at > config.session_ttl_s:
                del sessions[x_session_id]
                raise _error(401, "invalid_session", "unknown or expired session")
            return session

    def get_unlocked_session(session: Session = Depends(get_session)) -> Session:
        if not session.consent_accepted:
            raise _error(403, "consent_required", "consent has not been accepted")
        if session.credentials is None:
            raise _error(403, "credentials_required", "no git-host credentials supplied")
        return session

    def github_client(session: Session) -> GithubClient:
        return GithubClient(
            session.credentials,
            base_url=config.github_base_url,
            transport=config.github_transport,
        )

    def map_github_error(err: GithubError) -> HTTPException:
        if isinstance(err, RateLimitError):
            return _error(429, "rate_limited", str(err), reset_epoch=err.reset_epoch)
        if isinstance(err, NotFoundError):
            return _error(404, "not_found", str(err))
        if isinstance(err, AuthError):
            return _error(502, "github_auth_failed", str(err))
        return _error(502, "github_error", str(err))

    def get_research_auth(x_research_token: str = Header(default="")) -> None:
        with state_lock:
            expiry = research_tokens.get(x_research_token)
            if expiry is None or expiry < time.time():
                raise _error(401, "research_auth_required", "missing or expired research token")

    # --- health and consent -------------------------------------------------

    @app.get("/api/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.get("/api/consent")
    def get_consent(x_session_id: str = Header(default="")) -> dict:
        text, version = read_consent()
        with state_lock:
            session = sessions.get(x_session_id)
            if session is not None:
                session.consent_viewed = True
        return {"text": text, "version": version}

    # --- session lifecycle --------------------------------------------------

    @app.post("/api/session")
    def create_session() -> dict:
        session = Session(session_id=secrets.token_hex(16), created_at=time.time())
        with state_lock:
            sessions[session.session_id] = session
        return {"session_id": session.session_id}

    @app.post("/api/session/consent")
    def accept_consent(body: ConsentBody, session: Session = Depends(get_session)) -> dict:
        if body.accepted and not session.consent_viewed:
            raise _error(
                409, "consent_not_viewed", "fetch the consent document before accepting it"
            )
        session.consent_accepted = body.accepted
        return {"consent_accepted": session.consent_accepted}

    @app.post("/api/session/credentials")
    def set_credentials(body: CredentialsBody, session: Session = Depends(get_session)) -> dict:
        if not session.consent_accepted:
            raise _error(403, "consent_required", "consent has not been accepted")
        session.credentials = Credentials(token=body.token, username=body.username)
        return {"ok": True}

    # --- repository browsing ------------------------------------------------

    @app.get("/api/repos")
    def list_repos(session: Session = Depends(get_unlocked_session)) -> list[dict]:
        try:
            with github_client(session) as client:
                return [
                    {"id": r.id, "full_name": r.full_name} for r in client.list_repositories()
                ]
        except GithubError as err:
            raise map_github_error(err) from err

    @app.get("/api/repos/{owner}/{name}/commits")
    def list_commits(
        owner: str,
        name: str,
        page: int = Query(default=1, ge=1),
        session: Session = Depends(get_unlocked_session),
    ) -> list[dict]:
        try:
            with github_client(session) as client:
                commits = client.list_commits(f"{owner}/{name}", page=page)
        except GithubError as err:
            raise map_github_error(err) from err
        return [
            {"sha": c.sha, "summary": c.summary, "timestamp": c.timestamp} for c in commits
        ]

    @app.get("/api/repos/{owner}/{name}/commits/{sha}")
    def commit_detail(
        owner: str,
        name: str,
        sha: str,
        session: Session = Depends(get_unlocked_session),
    ) -> dict:
        try:
            with github_client(session) as client:
                context = client.get_commit_context(f"{owner}/{name}", sha)
        except GithubError as err:
            raise map_github_error(err) from err
        return {
            "commit_id": context.commit_id,
            "repo": context.repo,
            "original_message": context.original_message,
            "diff": context.diff,
            "commit_type": context.commit_type.value,
            "timestamp": context.timestamp,
            "pr_title": context.pr_title,
            "issue_report": context.issue_report,
            "files": [
                {
                    "filename": f.filename,
                    "status": f.status.value,
                    "additions": f.additions,
                    "deletions": f.deletions,
                    "changes": f.changes,
                }
                for f in context.files
            ],
        }

    # --- generation and submission -------------------------------------------

    @app.post("/api/generate")
    def generate(body: GenerateBody, session: Session = Depends(get_unlocked_session)) -> dict:
        approaches = registry.list_approaches()
        if not approaches:
            raise _error(409, "no_approaches", "no generation approaches are configured")
        try:
            with github_client(session) as client:
                context = client.get_commit_context(body.repo, body.sha)
        except GithubError as err:
            raise map_github_error(err) from err
        results = generate_for_commit(
            context,
            approaches,
            llm_client.complete,
            registry.refinement_prompt,
            config.retry,
            config.sleep,
        )
        with state_lock:
            display_order = list(range(len(results)))
            shuffle_rng.shuffle(display_order)
        record = GenerationRecord(
            generation_id=secrets.token_hex(16),
            context=context,
            results=results,
            display_order=display_order,
        )
        session.generations[record.generation_id] = record
        return {
            "generation_id": record.generation_id,
            "candidates": [
                _result_payload(results[result_idx], display_index)
                for display_index, result_idx in enumerate(display_order, start=1)
            ],
        }

    @app.post("/api/submissions")
    def submit_ratings(body: SubmitBody, session: Session = Depends(get_unlocked_session)) -> dict:
        record = session.generations.get(body.generation_id)
        if record is None:
            raise _error(
                409, "stale_generation", "generation unknown or not performed in this session"
            )
        by_display: dict[int, int] = {
            display_index: result_idx
            for display_index, result_idx in enumerate(record.display_order, start=1)
        }
        rated: dict[int, RatingBody] = {}
        for rating in body.ratings:
            if rating.display_index not in by_display:
                raise _error(422, "unknown_display_index", f"no candidate {rating.display_index}")
            result_idx = by_display[rating.display_index]
            if not record.results[result_idx].success:
                raise _error(
                    422, "rated_failed_candidate", "failed generations cannot be rated"
                )
            if rating.display_index in rated:
                raise _error(422, "duplicate_rating", "candidate rated twice")
            rated[rating.display_index] = rating
        missing = [
            display_index
            for display_index, result_idx in by_display.items()
            if record.results[result_idx].success and display_index not in rated
        ]
        if missing:
            raise _error(
                422,
                "incomplete_ratings",
                f"every successful candidate needs a rating; missing {sorted(missing)}",
            )

        ratings_by_result: dict[int, RatingBody] = {
            by_display[display_index]: rating for display_index, rating in rated.items()
        }
        rating_records = []
        for result_idx, result in enumerate(record.results):
            if result.success:
                rated_body = ratings_by_result[result_idx]
                rating_records.append(
                    RatingRecord(
                        approach_name=result.approach_name,
                        success=True,
                        refinement_used=result.refinement_used,
                        generated_message=result.message,
                        likert=dict(rated_body.likert),
                        rationale=rated_body.rationale,
                        scores=result.scores,
                    )
                )
            else:
                rating_records.append(
                    RatingRecord(
                        approach_name=result.approach_name,
                        success=False,
                        refinement_used=result.refinement_used,
                    )
                )
        context = record.context
        submission = Submission(
            commit_id=context.commit_id,
            commit_type=context.commit_type,
            original_message=context.original_message,
            commit_timestamp=context.timestamp,
            files=list(context.files),
            ratings=rating_records,
            pr_title=context.pr_title,
            issue_report=context.issue_report,
        )
        try:
            submission_id = store.save_submission(submission)
        except ValidationError as err:
            raise _error(422, "invalid_submission", "submission failed validation", errors=err.errors)
        return {"submission_id": submission_id}

    # --- research view --------------------------------------------------------

    @app.post("/api/research/login")
    def research_login(body: LoginBody) -> dict:
        if password_hash is None:
            raise _error(500, "research_not_configured", "no research password is configured")
        attempt = hashlib.sha256(password_salt + body.password.encode()).digest()
        if not hmac.compare_digest(attempt, password_hash):
            raise _error(401, "bad_password", "research password rejected")
        token = secrets.token_hex(16)
        with state_lock:
            research_tokens[token] = time.time() + config.session_ttl_s
        return {"token": token}

    @app.get("/api/research/approaches")
    def research_list_approaches(_: None = Depends(get_research_auth)) -> list[dict]:
        return [
            {
                "name": a.name,
                "template": a.template,
                "refinement_enabled": a.refinement_enabled,
            }
            for a in registry.list_approaches()
        ]

    @app.post("/api/research/approaches", status_code=201)
    def research_add_approach(body: ApproachBody, _: None = Depends(get_research_auth)) -> dict:
        try:
            registry.add_approach(
                Approach(body.name, body.template, body.refinement_enabled)
            )
        except DuplicateApproachError as err:
            raise _error(409, "duplicate_approach", str(err)) from err
        except InvalidApproachError as err:
            raise _error(422, "invalid_approach", str(err)) from err
        return {"ok": True}

    @app.delete("/api/research/approaches/{name}")
    def research_remove_approach(name: str, _: None = Depends(get_research_auth)) -> dict:
        try:
            registry.remove_approach(name)
        except UnknownApproachError as err:
            raise _error(404, "unknown_approach", str(err)) from err
        return {"ok": True}

    @app.put("/api/research/approaches/{name}/refinement")
    def research_set_refinement(
        name: str, body: RefinementFlagBody, _: None = Depends(get_research_auth)
    ) -> dict:
        try:
            registry.set_refinement(name, body.enabled)
        except UnknownApproachError as err:
            raise _error(404, "unknown_approach", str(err)) from err
        return {"ok": True}

    @app.get("/api/research/refinement-prompt")
    def research_get_refinement_prompt(_: None = Depends(get_research_auth)) -> dict:
        return {"template": registry.refinement_prompt}

    @app.put("/api/research/refinement-prompt")
    def research_set_refinement_prompt(
        body: RefinementPromptBody, _: None = Depends(get_research_auth)
    ) -> dict:
        try:
            registry.set_refinement_prompt(body.template)
        except InvalidRefinementPromptError as err:
            raise _error(422, "invalid_refinement_prompt", str(err)) from err
        return {"ok": True}

    @app.get("/api/research/submissions")
    def research_list_submissions(
        approach: str | None = None,
        since: str | None = None,
        until: str | None = None,
        _: None = Depends(get_research_auth),
    ) -> list[dict]:
        return [
            _submission_payload(sub)
            for sub in store.list_submissions(approach_name=approach, since=since, until=until)
        ]

    @app.get("/api/research/export")
    def research_export(
        format: str = Query(default="csv"), _: None = Depends(get_research_auth)
    ):
        from fastapi import Response

        if format not in ("csv", "jsonl"):
            raise _error(422, "bad_format", "format must be csv or jsonl")
        payload = store.export_submissions(format)
        media = "text/csv" if format == "csv" else "application/x-ndjson"
        return Response(content=payload, media_type=media)

    return app
