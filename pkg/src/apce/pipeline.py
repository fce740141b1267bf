"""Two-agent generation pipeline: draft, refine, select, score.

Per approach: the generation agent drafts a message from the rendered
prompt; if refinement is enabled the refinement agent evaluates the draft
(echoing it back signals approval) and the selection rules pick between the
draft and the refinement reply. Every successful result is scored against
the commit's original message.

Length rules count Unicode code points of the trimmed message. "Short"
means strictly under 72 characters; the no-refinement path accepts replies
strictly under 200 characters.

Validity here is mechanical only: non-empty single line, no code fencing,
no error sentinel, no conversational preamble. Judging mood or clarity is
the refinement agent's job, not this gate's.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from enum import Enum
from typing import Callable

from apce.approaches import Approach, render_prompt, render_refinement_prompt
from apce.github import CommitContext
from apce.llm import LlmError
from apce.metrics import MetricScores, score_all

SHORT_MESSAGE_LIMIT = 72
UNREFINED_MESSAGE_LIMIT = 200

_PREAMBLE_PREFIXES = ("sure", "here is", "here's", "i ")
_ERROR_SENTINEL_PREFIXES = ("error:",)


class PipelineError(Exception):
    pass


class BothInvalidError(PipelineError):
    """Both the draft and the refinement reply failed the validity gate."""


class LlmUnavailableError(PipelineError):
    """All retry attempts failed; carries the last underlying error."""

    def __init__(self, last_error: Exception):
        super().__init__(f"llm unavailable after retries: {last_error}")
        self.last_error = last_error


class MessageSource(str, Enum):
    GENERATION_AGENT = "generation_agent"
    REFINEMENT_AGENT = "refinement_agent"


class ErrorKind(str, Enum):
    LLM_UNAVAILABLE = "llm_unavailable"
    BOTH_INVALID = "both_invalid"
    INVALID_UNREFINED = "invalid_unrefined"
    TOO_LONG_UNREFINED = "too_long_unrefined"


@dataclass(frozen=True)
class CandidateMessage:
    text: str
    source: MessageSource

    @classmethod
    def from_reply(cls, reply: str, source: MessageSource) -> "CandidateMessage":
        return cls(text=reply.strip(), source=source)


@dataclass(frozen=True)
class RetryPolicy:
    max_attempts: int = 3
    delay_ms: int = 5000

    def __post_init__(self):
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be >= 1")
        if self.delay_ms < 0:
            raise ValueError("delay_ms must be >= 0")


@dataclass(frozen=True)
class GenerationResult:
    approach_name: str
    success: bool
    refinement_used: bool
    message: str | None = None
    error_kind: ErrorKind | None = None
    scores: MetricScores | None = None

    def __post_init__(self):
        if self.success != (self.message is not None) or self.success != (
            self.error_kind is None
        ):
            raise ValueError("success implies message present and error_kind absent")
        if self.scores is not None and not self.success:
            raise ValueError("scores only accompany successful results")


def is_valid_commit_message(text: str) -> bool:
    """Mechanical validity gate for an LLM reply."""
    trimmed = text.strip()
    if not trimmed:
        return False
    if len(trimmed.splitlines()) != 1:
        return False
    if "```" in trimmed:
        return False
    lowered = trimmed.lower()
    if lowered == "error" or lowered.startswith(_ERROR_SENTINEL_PREFIXES):
        return False
    if lowered.startswith(_PREAMBLE_PREFIXES):
        return False
    return True


def select_message(potential: CandidateMessage, alternative: CandidateMessage) -> CandidateMessage:
    """Pick between the draft and the refinement reply.

    In order: an invalid side loses to a valid one; two invalid sides raise
    ``BothInvalidError``; if exactly one is short (< 72 chars) it wins; if
    both are long the shorter wins; if both are short the longer wins. Length
    ties go to the refinement reply, whose text most recently passed the
    evaluating agent.
    """
    potential_valid = is_valid_commit_message(potential.text)
    alternative_valid = is_valid_commit_message(alternative.text)
    if not potential_valid and not alternative_valid:
        raise BothInvalidError("neither candidate is a valid commit message")
    if potential_valid != alternative_valid:
        return potential if potential_valid else alternative
    potential_short = len(potential.text) < SHORT_MESSAGE_LIMIT
    alternative_short = len(alternative.text) < SHORT_MESSAGE_LIMIT
    if potential_short != alternative_short:
        return potential if potential_short else alternative
    if len(potential.text) == len(alternative.text):
        return alternative
    if potential_short:  # both short: prefer the longer
        return potential if len(potential.text) > len(alternative.text) else alternative
    # both long: prefer the shorter
    return potential if len(potential.text) < len(alternative.text) else alternative


def call_with_retry(
    complete: Callable[[str], str],
    prompt: str,
    policy: RetryPolicy = RetryPolicy(),
    sleep: Callable[[float], None] = time.sleep,
) -> str:
    """Call ``complete`` up to ``policy.max_attempts`` times.

    Waits ``policy.delay_ms`` between consecutive failed attempts; the first
    success short-circuits. Raises ``LlmUnavailableError`` carrying the last
    underlying error once attempts are exhausted.
    """
    last_error: Exception | None = None
    for attempt in range(1, policy.max_attempts + 1):
        try:
            return complete(prompt)
        except LlmError as err:
            last_error = err
            if attempt < policy.max_attempts:
                sleep(policy.delay_ms / 1000.0)
    raise LlmUnavailableError(last_error)


def run_approach(
    approach: Approach,
    context: CommitContext,
    complete: Callable[[str], str],
    refinement_template: str,
    policy: RetryPolicy = RetryPolicy(),
    sleep: Callable[[float], None] = time.sleep,
) -> GenerationResult:
    """Run the two-agent flow for one approach and score the outcome."""

    def failure(kind: ErrorKind, refinement_used: bool) -> GenerationResult:
        return GenerationResult(
            approach_name=approach.name,
            success=False,
            refinement_used=refinement_used,
            error_kind=kind,
        )

    prompt = render_prompt(approach.template, context)
    try:
        draft_reply = call_with_retry(complete, prompt, policy, sleep)
    except LlmUnavailableError:
        return failure(ErrorKind.LLM_UNAVAILABLE, refinement_used=False)
    potential = CandidateMessage.from_reply(draft_reply, MessageSource.GENERATION_AGENT)

    if not approach.refinement_enabled:
        if not is_valid_commit_message(potential.text):
            return failure(ErrorKind.INVALID_UNREFINED, refinement_used=False)
        if len(potential.text) >= UNREFINED_MESSAGE_LIMIT:
            return failure(ErrorKind.TOO_LONG_UNREFINED, refinement_used=False)
        selected = potential
        refinement_used = False
    else:
        refinement_used = True
        refinement_prompt = render_refinement_prompt(refinement_template, potential.text)
        try:
            refined_reply = call_with_retry(complete, refinement_prompt, policy, sleep)
        except LlmUnavailableError:
            return failure(ErrorKind.LLM_UNAVAILABLE, refinement_used=True)
        alternative = CandidateMessage.from_reply(refined_reply, MessageSource.REFINEMENT_AGENT)
        if alternative.text == potential.text:
            # an exact echo is the refinement agent's approval signal
            selected = potential
        else:
            try:
                selected = select_message(potential, alternative)
            except BothInvalidError:
                return failure(ErrorKind.BOTH_INVALID, refinement_used=True)

    return GenerationResult(
        approach_name=approach.name,
        success=True,
        refinement_used=refinement_used,
        message=selected.text,
        scores=score_all(context.original_message, selected.text),
    )


def generate_for_commit(
    context: CommitContext,
    approaches: list[Approach],
    complete: Callable[[str], str],
    refinement_template: str,
    policy: RetryPolicy = RetryPolicy(),
    sleep: Callable[[float], None] = time.sleep,
) -> list[GenerationResult]:
    """Run every approach against one commit; one result per approach, in order.

    A failing approach yields an error result without aborting the rest.
    """
    if not approaches:
        raise ValueError("approaches must be non-empty")
    return [
        run_approach(approach, context, complete, refinement_template, policy, sleep)
        for approach in approaches
    ]
