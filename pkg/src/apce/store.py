"""Append-only storage of human-evaluation submissions.

A submission snapshots one commit (id, type, message, PR/issue context,
files) and carries one rating record per evaluated approach. Records for
failed generations keep ``success=False`` with no message, Likert values,
or scores. Nothing in the schema identifies the evaluator: no username, no
token.

The store validates before writing and reports every violated invariant at
once. Backends are pluggable behind a two-method interface; the default is
a JSONL file (one submission per line, version-stamped) which append-writes
under a lock so concurrent readers never see a torn record.
"""

from __future__ import annotations

import csv
import io
import json
import re
import threading
import uuid
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Protocol

from apce.github import CommitType, FileChange, FileStatus
from apce.metrics import MetricScores

SCHEMA_VERSION = 1

LIKERT_CRITERIA = ("accuracy", "integrity", "readability", "applicability", "completeness")

CSV_COLUMNS = [
    "submission_id",
    "created_at",
    "commit_id",
    "commit_type",
    "commit_timestamp",
    "original_message",
    "pr_title",
    "issue_report",
    "files",
    "approach_name",
    "success",
    "refinement_used",
    "generated_message",
    "rationale",
    "likert_accuracy",
    "likert_integrity",
    "likert_readability",
    "likert_applicability",
    "likert_completeness",
    "bleu",
    "meteor",
    "rouge_l",
]

_SHA_RE = re.compile(r"^[0-9a-f]{7,40}$")


class StorageError(Exception):
    pass


class ValidationError(StorageError):
    """Carries every violated invariant, not just the first."""

    def __init__(self, errors: list[str]):
        super().__init__("; ".join(errors))
        self.errors = errors


@dataclass(frozen=True)
class RatingRecord:
    approach_name: str
    success: bool
    refinement_used: bool
    generated_message: str | None = None
    likert: dict[str, int] | None = None
    rationale: str = ""
    scores: MetricScores | None = None


@dataclass(frozen=True)
class Submission:
    commit_id: str
    commit_type: CommitType
    original_message: str
    commit_timestamp: str
    files: list[FileChange]
    ratings: list[RatingRecord]
    pr_title: str | None = None
    issue_report: str | None = None
    submission_id: str = ""
    created_at: str = ""


def validate_submission(sub: Submission) -> list[str]:
    errors: list[str] = []
    if not _SHA_RE.match(sub.commit_id):
        errors.append(f"commit_id is not a 7-40 char hex sha: {sub.commit_id!r}")
    if not sub.ratings:
        errors.append("ratings must be non-empty")
    for idx, rating in enumerate(sub.ratings):
        where = f"ratings[{idx}]"
        if not rating.approach_name:
            errors.append(f"{where}: approach_name must be non-empty")
        if rating.success:
            if rating.generated_message is None:
                errors.append(f"{where}: successful rating needs generated_message")
            if not rating.rationale.strip():
                errors.append(f"{where}: rationale must be non-empty")
            likert = rating.likert or {}
            for criterion in LIKERT_CRITERIA:
                if criterion not in likert:
                    errors.append(f"{where}: missing likert criterion {criterion!r}")
                elif likert[criterion] not in (1, 2, 3, 4, 5):
                    errors.append(
                        f"{where}: likert {criterion!r} must be 1..5, got {likert[criterion]!r}"
                    )
            for criterion in likert:
                if criterion not in LIKERT_CRITERIA:
                    errors.append(f"{where}: unknown likert criterion {criterion!r}")
        else:
            if rating.generated_message is not None:
                errors.append(f"{where}: failed rating must not carry generated_message")
            if rating.likert:
                errors.append(f"{where}: failed rating must not carry likert values")
            if rating.scores is not None:
                errors.append(f"{where}: failed rating must not carry scores")
    return errors


def _rating_to_record(rating: RatingRecord) -> dict:
    return {
        "approach_name": rating.approach_name,
        "success": rating.success,
        "refinement_used": rating.refinement_used,
        "generated_message": rating.generated_message,
        "likert": dict(rating.likert) if rating.likert is not None else None,
        "rationale": rating.rationale,
        "scores": rating.scores.as_dict() if rating.scores is not None else None,
    }


def _rating_from_record(record: dict) -> RatingRecord:
    scores = record.get("scores")
    return RatingRecord(
        approach_name=record["approach_name"],
        success=record["success"],
        refinement_used=record["refinement_used"],
        generated_message=record.get("generated_message"),
        likert=record.get("likert"),
        rationale=record.get("rationale", ""),
        scores=MetricScores(**scores) if scores is not None else None,
    )


def submission_to_record(sub: Submission) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "submission_id": sub.submission_id,
        "created_at": sub.created_at,
        "commit_id": sub.commit_id,
        "commit_type": sub.commit_type.value,
        "original_message": sub.original_message,
        "pr_title": sub.pr_title,
        "issue_report": sub.issue_report,
        "commit_timestamp": sub.commit_timestamp,
        "files": [
            {
                "filename": f.filename,
                "status": f.status.value,
                "additions": f.additions,
                "deletions": f.deletions,
                "changes": f.changes,
            }
            for f in sub.files
        ],
        "ratings": [_rating_to_record(r) for r in sub.ratings],
    }


def submission_from_record(record: dict) -> Submission:
    return Submission(
        submission_id=record["submission_id"],
        created_at=record["created_at"],
        commit_id=record["commit_id"],
        commit_type=CommitType(record["commit_type"]),
        original_message=record["original_message"],
        pr_title=record.get("pr_title"),
        issue_report=record.get("issue_report"),
        commit_timestamp=record["commit_timestamp"],
        files=[
            FileChange(
                filename=f["filename"],
                status=FileStatus(f["status"]),
                additions=f["additions"],
                deletions=f["deletions"],
                changes=f["changes"],
            )
            for f in record.get("files", [])
        ],
        ratings=[_rating_from_record(r) for r in record.get("ratings", [])],
    )


class StorageBackend(Protocol):
    def append(self, record: dict) -> None: ...

    def load(self) -> list[dict]: ...


class MemoryBackend:
    def __init__(self):
        self._records: list[dict] = []
        self._lock = threading.Lock()

    def append(self, record: dict) -> None:
        with self._lock:
            self._records.append(json.loads(json.dumps(record)))

    def load(self) -> list[dict]:
        with self._lock:
            return [json.loads(json.dumps(r)) for r in self._records]


class JsonlBackend:
    """One JSON submission per line; appends are serialized and flushed."""

    def __init__(self, path: str | Path):
        self._path = Path(path)
        self._path.parent.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    @property
    def path(self) -> Path:
        return self._path

    def append(self, record: dict) -> None:
        line = json.dumps(record, ensure_ascii=False)
        with self._lock:
            try:
                with self._path.open("a", encoding="utf-8") as fh:
                    fh.write(line + "\n")
                    fh.flush()
            except OSError as err:
                raise StorageError(f"cannot append to {self._path}: {err}") from err

    def load(self) -> list[dict]:
        with self._lock:
            if not self._path.exists():
                return []
            try:
                text = self._path.read_text(encoding="utf-8")
            except OSError as err:
                raise StorageError(f"cannot read {self._path}: {err}") from err
        records = []
        for line in text.splitlines():
            if line.strip():
                records.append(json.loads(line))
        return records


def _parse_instant(value: str | datetime) -> datetime:
    if isinstance(value, datetime):
        return value if value.tzinfo else value.replace(tzinfo=timezone.utc)
    parsed = datetime.fromisoformat(value.replace("Z", "+00:00"))
    return parsed if parsed.tzinfo else parsed.replace(tzinfo=timezone.utc)


class SubmissionStore:
    """Validating facade over a storage backend. Append-only by design."""

    def __init__(self, backend: StorageBackend | None = None):
        self._backend = backend if backend is not None else MemoryBackend()

    @classmethod
    def at_dir(cls, data_dir: str | Path) -> "SubmissionStore":
        return cls(JsonlBackend(Path(data_dir) / "submissions.jsonl"))

    def save_submission(self, sub: Submission) -> str:
        errors = validate_submission(sub)
        if errors:
            raise ValidationError(errors)
        stamped = replace(
            sub,
            submission_id=uuid.uuid4().hex,
            created_at=datetime.now(timezone.utc).isoformat(),
        )
        self._backend.append(submission_to_record(stamped))
        return stamped.submission_id

    def get(self, submission_id: str) -> Submission:
        for record in self._backend.load():
            if record["submission_id"] == submission_id:
                return submission_from_record(record)
        raise StorageError(f"no submission with id {submission_id!r}")

    def list_submissions(
        self,
        approach_name: str | None = None,
        since: str | datetime | None = None,
        until: str | datetime | None = None,
    ) -> list[Submission]:
        subs = [submission_from_record(r) for r in self._backend.load()]
        if approach_name is not None:
            subs = [s for s in subs if any(r.approach_name == approach_name for r in s.ratings)]
        if since is not None:
            low = _parse_instant(since)
            subs = [s for s in subs if _parse_instant(s.created_at) >= low]
        if until is not None:
            high = _parse_instant(until)
            subs = [s for s in subs if _parse_instant(s.created_at) <= high]
        return sorted(subs, key=lambda s: (s.created_at, s.submission_id), reverse=True)

    def export_submissions(self, fmt: str) -> bytes:
        """Denormalized export: one row/record per rating. ``fmt``: csv | jsonl."""
        if fmt not in ("csv", "jsonl"):
            raise ValueError(f"unsupported export format: {fmt!r}")
        rows = []
        for sub in self.list_submissions():
            for rating in sub.ratings:
                likert = rating.likert or {}
                scores = rating.scores
                rows.append(
                    {
                        "submission_id": sub.submission_id,
                        "created_at": sub.created_at,
                        "commit_id": sub.commit_id,
                        "commit_type": sub.commit_type.value,
                        "commit_timestamp": sub.commit_timestamp,
                        "original_message": sub.original_message,
                        "pr_title": sub.pr_title,
                        "issue_report": sub.issue_report,
                        "files": [
                            {
                                "filename": f.filename,
                                "status": f.status.value,
                                "additions": f.additions,
                                "deletions": f.deletions,
                                "changes": f.changes,
                            }
                            for f in sub.files
                        ],
                        "approach_name": rating.approach_name,
                        "success": rating.success,
                        "refinement_used": rating.refinement_used,
                        "generated_message": rating.generated_message,
                        "rationale": rating.rationale,
                        "likert_accuracy": likert.get("accuracy"),
                        "likert_integrity": likert.get("integrity"),
                        "likert_readability": likert.get("readability"),
                        "likert_applicability": likert.get("applicability"),
                        "likert_completeness": likert.get("completeness"),
                        "bleu": scores.bleu if scores else None,
                        "meteor": scores.meteor if scores else None,
                        "rouge_l": scores.rouge_l if scores else None,
                    }
                )
        if fmt == "jsonl":
            return ("".join(json.dumps(row, ensure_ascii=False) + "\n" for row in rows)).encode(
                "utf-8"
            )
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        for row in rows:
            flat = dict(row)
            flat["files"] = json.dumps(flat["files"], ensure_ascii=False)
            writer.writerow(flat)
        return buffer.getvalue().encode("utf-8")
