"""Named generation approaches: prompt templates plus refinement settings.

An approach is a prompt template (optionally containing the five bracketed
context tags) and a flag controlling whether the refinement agent runs.
Approaches live as human-editable text files in a config directory:

    name: Default
    refinement: true
    ---
    <template text, verbatim>

plus ``refinement_prompt.txt`` holding the shared refinement template. The
bracket tags are literal - there is no escaping, so a template cannot
contain an un-substituted ``[DIFF]``.

The ``[OM]`` tag (original message) is supported because operators may want
it for ablations, but the shipped templates avoid it: substituting the
original message into a generation prompt leaks the ground truth that the
metrics later score against.
"""

from __future__ import annotations

import re
import threading
from dataclasses import dataclass, replace
from pathlib import Path
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from apce.github import CommitContext

PLACEHOLDER_TAGS = ("DIFF", "PR", "IR", "CT", "OM")
MESSAGE_TAG = "[MESSAGE]"
MISSING_FIELD_TEXT = "N/A"

_PLACEHOLDER_RE = re.compile(r"\[(DIFF|PR|IR|CT|OM)\]")

DEFAULT_APPROACH_NAME = "Default"

DEFAULT_GENERATION_TEMPLATE = """\
Generate a high-quality commit message based on the given information. Your response must contain only the commit message - no explanations, no punctuation, no extra words.

### Requirements:
- Must clearly describe what changed and why
- Must follow standard commit message formatting
- Must use imperative mood
- Must not include any punctuation

### Given Data:
1. Code changes: [DIFF]
2. Associated pull request title: [PR]
3. Associated issue report: [IR]
4. Commit Type: [CT]"""

DEFAULT_REFINEMENT_PROMPT = """\
Evaluate the commit message below.

If it fully meets all criteria, reply only with the exact same commit message.

If it does not fully meet all criteria, reply only with a corrected commit message.

Your response must contain nothing else - no explanations, no punctuation, no extra words.

Criteria:
- Must be less than 72 characters
- Must use imperative mood (e.g., "Fix bug" instead of "Fixed bug")
- Must clearly describe the change
- Must not include explanations or reasoning
- May describe multiple changes

Commit message to evaluate: "[MESSAGE]\""""

# Editable slots for externally published prompt styles; shipped inactive
# (rename to .approach and paste the prompt text to enable).
_EXAMPLE_SLOTS = {
    "style-a.approach.example": (
        "name: Style-A\nrefinement: true\n---\n"
        "Paste an externally published generation prompt here, using the\n"
        "[DIFF] [PR] [IR] [CT] tags where the prompt expects commit data.\n"
    ),
    "style-b.approach.example": (
        "name: Style-B\nrefinement: false\n---\n"
        "Second editable slot for another published prompt style.\n"
    ),
}

_REFINEMENT_PROMPT_FILE = "refinement_prompt.txt"


class RegistryError(Exception):
    pass


class DuplicateApproachError(RegistryError):
    pass


class UnknownApproachError(RegistryError):
    pass


class InvalidApproachError(RegistryError):
    pass


class InvalidRefinementPromptError(RegistryError):
    pass


@dataclass(frozen=True)
class Approach:
    name: str
    template: str
    refinement_enabled: bool = True


def render_prompt(template: str, context: "CommitContext") -> str:
    """Substitute context fields into the bracketed tags of ``template``.

    A single pass replaces each tag occurrence; substituted values are never
    re-scanned, and text outside the tags is untouched. Optional fields the
    commit lacks render as ``N/A``.
    """
    values = {
        "DIFF": context.diff,
        "PR": context.pr_title if context.pr_title is not None else MISSING_FIELD_TEXT,
        "IR": context.issue_report if context.issue_report is not None else MISSING_FIELD_TEXT,
        "CT": context.commit_type.human_label(),
        "OM": context.original_message,
    }
    return _PLACEHOLDER_RE.sub(lambda m: values[m.group(1)], template)


def render_refinement_prompt(template: str, message: str) -> str:
    """Replace the single ``[MESSAGE]`` occurrence with ``message``."""
    return template.replace(MESSAGE_TAG, message, 1)


def validate_refinement_prompt(template: str) -> None:
    if template.count(MESSAGE_TAG) != 1:
        raise InvalidRefinementPromptError(
            f"refinement prompt must contain {MESSAGE_TAG} exactly once"
        )


def _slugify(name: str) -> str:
    slug = re.sub(r"[^a-z0-9_-]+", "-", name.lower()).strip("-")
    return slug or "approach"


def _serialize(approach: Approach) -> str:
    flag = "true" if approach.refinement_enabled else "false"
    return f"name: {approach.name}\nrefinement: {flag}\n---\n{approach.template}"


def _parse(text: str, source: str) -> Approach:
    header, sep, template = text.partition("\n---\n")
    if not sep:
        raise InvalidApproachError(f"{source}: missing '---' template separator")
    name = None
    refinement = True
    for line in header.splitlines():
        key, _, value = line.partition(":")
        key, value = key.strip().lower(), value.strip()
        if key == "name":
            name = value
        elif key == "refinement":
            refinement = value.lower() in ("true", "yes", "1", "on")
    if not name:
        raise InvalidApproachError(f"{source}: missing 'name:' header")
    return Approach(name=name, template=template, refinement_enabled=refinement)


class ApproachRegistry:
    """File-backed registry of approaches plus the shared refinement prompt.

    Listing order is case-insensitive alphabetical by name, which keeps
    generation result order deterministic across processes. Mutations are
    serialized; reads take the same lock so they always see whole records.
    """

    def __init__(self, config_dir: str | Path, seed: bool = True):
        self._dir = Path(config_dir)
        self._dir.mkdir(parents=True, exist_ok=True)
        self._lock = threading.RLock()
        self._approaches: dict[str, Approach] = {}
        self._files: dict[str, Path] = {}
        self._load()
        marker = self._dir / ".seeded"
        if seed and not marker.exists():
            if not self._approaches:
                self._seed()
            marker.touch()

    def _load(self) -> None:
        for path in sorted(self._dir.glob("*.approach")):
            approach = _parse(path.read_text(encoding="utf-8"), str(path))
            self._approaches[approach.name] = approach
            self._files[approach.name] = path
        prompt_path = self._dir / _REFINEMENT_PROMPT_FILE
        if prompt_path.exists():
            validate_refinement_prompt(prompt_path.read_text(encoding="utf-8"))

    def _seed(self) -> None:
        self.add_approach(Approach(DEFAULT_APPROACH_NAME, DEFAULT_GENERATION_TEMPLATE, True))
        for filename, content in _EXAMPLE_SLOTS.items():
            slot = self._dir / filename
            if not slot.exists():
                slot.write_text(content, encoding="utf-8")

    def list_approaches(self) -> list[Approach]:
        with self._lock:
            return sorted(self._approaches.values(), key=lambda a: a.name.lower())

    def get(self, name: str) -> Approach:
        with self._lock:
            try:
                return self._approaches[name]
            except KeyError:
                raise UnknownApproachError(f"unknown approach: {name!r}") from None

    def add_approach(self, approach: Approach) -> None:
        if not approach.name:
            raise InvalidApproachError("approach name must be non-empty")
        if not approach.template:
            raise InvalidApproachError("approach template must be non-empty")
        with self._lock:
            if approach.name in self._approaches:
                raise DuplicateApproachError(f"approach already exists: {approach.name!r}")
            path = self._dir / f"{_slugify(approach.name)}.approach"
            counter = 2
            while path in self._files.values():
                path = self._dir / f"{_slugify(approach.name)}-{counter}.approach"
                counter += 1
            path.write_text(_serialize(approach), encoding="utf-8")
            self._approaches[approach.name] = approach
            self._files[approach.name] = path

    def remove_approach(self, name: str) -> None:
        with self._lock:
            if name not in self._approaches:
                raise UnknownApproachError(f"unknown approach: {name!r}")
            self._files.pop(name).unlink(missing_ok=True)
            del self._approaches[name]

    def set_refinement(self, name: str, enabled: bool) -> None:
        with self._lock:
            if name not in self._approaches:
                raise UnknownApproachError(f"unknown approach: {name!r}")
            updated = replace(self._approaches[name], refinement_enabled=enabled)
            self._approaches[name] = updated
            self._files[name].write_text(_serialize(updated), encoding="utf-8")

    @property
    def refinement_prompt(self) -> str:
        with self._lock:
            path = self._dir / _REFINEMENT_PROMPT_FILE
            if path.exists():
                return path.read_text(encoding="utf-8")
            return DEFAULT_REFINEMENT_PROMPT

    def set_refinement_prompt(self, template: str) -> None:
        validate_refinement_prompt(template)
        with self._lock:
            (self._dir / _REFINEMENT_PROMPT_FILE).write_text(template, encoding="utf-8")
