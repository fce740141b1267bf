"""Registry behaviour and placeholder rendering."""

from __future__ import annotations

import pytest

from apce.approaches import (
    DEFAULT_APPROACH_NAME,
    DEFAULT_GENERATION_TEMPLATE,
    DEFAULT_REFINEMENT_PROMPT,
    Approach,
    ApproachRegistry,
    DuplicateApproachError,
    InvalidApproachError,
    InvalidRefinementPromptError,
    UnknownApproachError,
    render_prompt,
    render_refinement_prompt,
    validate_refinement_prompt,
)
from tests.conftest import make_context

ALL_TAGS = ("[DIFF]", "[PR]", "[IR]", "[CT]", "[OM]")


@pytest.fixture
def registry(tmp_path) -> ApproachRegistry:
    return ApproachRegistry(tmp_path / "config")


class TestRenderPrompt:
    def test_direct_substitution(self):
        context = make_context(diff="+x")
        assert render_prompt("Changes: [DIFF]", context) == "Changes: +x"

    def test_missing_pr_renders_na(self):
        context = make_context(pr_title=None)
        assert render_prompt("PR: [PR]", context) == "PR: N/A"

    def test_missing_issue_renders_na(self):
        context = make_context(issue_report=None)
        assert render_prompt("Issue: [IR]", context) == "Issue: N/A"

    def test_default_template_fills_given_data(self):
        context = make_context()
        rendered = render_prompt(DEFAULT_GENERATION_TEMPLATE, context)
        assert context.diff in rendered
        assert context.pr_title in rendered
        assert context.issue_report in rendered
        assert "bug fix" in rendered
        for tag in ALL_TAGS:
            assert tag not in rendered

    def test_no_placeholders_is_identity(self):
        template = "Summarize the change in one line."
        assert render_prompt(template, make_context()) == template

    def test_non_placeholder_text_unchanged(self):
        context = make_context(diff="+1")
        assert render_prompt("a [DIFF] b [DIFF] c", context) == "a +1 b +1 c"

    def test_original_message_tag(self):
        context = make_context(original_message="Fix it")
        assert render_prompt("was: [OM]", context) == "was: Fix it"

    def test_substituted_values_not_rescanned(self):
        context = make_context(diff="see [PR]", pr_title="should-not-appear")
        assert render_prompt("[DIFF]", context) == "see [PR]"

    def test_unknown_bracket_text_left_alone(self):
        context = make_context()
        assert render_prompt("[NOPE] stays", context) == "[NOPE] stays"


class TestRefinementPromptRendering:
    def test_replaces_message_only(self):
        rendered = render_refinement_prompt(DEFAULT_REFINEMENT_PROMPT, "Fix bug")
        assert '"Fix bug"' in rendered
        assert "[MESSAGE]" not in rendered
        # everything around the tag is untouched
        prefix = DEFAULT_REFINEMENT_PROMPT.split("[MESSAGE]")[0]
        assert rendered.startswith(prefix)

    def test_default_prompt_is_valid(self):
        validate_refinement_prompt(DEFAULT_REFINEMENT_PROMPT)

    @pytest.mark.parametrize("bad", ["no tag at all", "[MESSAGE] and [MESSAGE]"])
    def test_validation_rejects_wrong_tag_count(self, bad):
        with pytest.raises(InvalidRefinementPromptError):
            validate_refinement_prompt(bad)


class TestRegistry:
    def test_seeded_default(self, registry):
        names = [a.name for a in registry.list_approaches()]
        assert names == [DEFAULT_APPROACH_NAME]
        default = registry.get(DEFAULT_APPROACH_NAME)
        assert default.refinement_enabled is True
        assert "[DIFF]" in default.template

    def test_add_then_list_round_trip(self, registry):
        approach = Approach("Terse", "One line about: [DIFF]", refinement_enabled=False)
        registry.add_approach(approach)
        assert registry.get("Terse") == approach

    def test_duplicate_name_rejected(self, registry):
        with pytest.raises(DuplicateApproachError):
            registry.add_approach(Approach(DEFAULT_APPROACH_NAME, "x"))

    def test_empty_template_rejected(self, registry):
        with pytest.raises(InvalidApproachError):
            registry.add_approach(Approach("Empty", ""))

    def test_empty_name_rejected(self, registry):
        with pytest.raises(InvalidApproachError):
            registry.add_approach(Approach("", "x"))

    def test_remove(self, registry):
        registry.remove_approach(DEFAULT_APPROACH_NAME)
        assert registry.list_approaches() == []

    def test_remove_unknown(self, registry):
        with pytest.raises(UnknownApproachError):
            registry.remove_approach("Nope")

    def test_set_refinement(self, registry):
        registry.set_refinement(DEFAULT_APPROACH_NAME, False)
        assert registry.get(DEFAULT_APPROACH_NAME).refinement_enabled is False

    def test_set_refinement_idempotent(self, registry):
        registry.set_refinement(DEFAULT_APPROACH_NAME, False)
        registry.set_refinement(DEFAULT_APPROACH_NAME, False)
        assert registry.get(DEFAULT_APPROACH_NAME).refinement_enabled is False

    def test_set_refinement_unknown(self, registry):
        with pytest.raises(UnknownApproachError):
            registry.set_refinement("Nope", True)

    def test_listing_is_name_sorted(self, registry):
        registry.add_approach(Approach("zeta", "z"))
        registry.add_approach(Approach("Alpha", "a"))
        assert [a.name for a in registry.list_approaches()] == ["Alpha", DEFAULT_APPROACH_NAME, "zeta"]

    def test_persists_across_reload(self, tmp_path):
        config = tmp_path / "config"
        first = ApproachRegistry(config)
        first.add_approach(Approach("Terse", "line: [DIFF]\nwith two lines", False))
        first.set_refinement(DEFAULT_APPROACH_NAME, False)
        first.set_refinement_prompt("Check this: [MESSAGE]")

        second = ApproachRegistry(config)
        assert second.get("Terse") == Approach("Terse", "line: [DIFF]\nwith two lines", False)
        assert second.get(DEFAULT_APPROACH_NAME).refinement_enabled is False
        assert second.refinement_prompt == "Check this: [MESSAGE]"

    def test_removal_does_not_reseed(self, tmp_path):
        config = tmp_path / "config"
        first = ApproachRegistry(config)
        first.remove_approach(DEFAULT_APPROACH_NAME)
        second = ApproachRegistry(config)
        assert second.list_approaches() == []

    def test_refinement_prompt_default(self, registry):
        assert registry.refinement_prompt == DEFAULT_REFINEMENT_PROMPT

    def test_set_refinement_prompt_rejects_invalid(self, registry):
        with pytest.raises(InvalidRefinementPromptError):
            registry.set_refinement_prompt("missing tag")

    def test_example_slots_are_inactive(self, registry):
        # the editable .example slots exist on disk but are not registered
        assert len(list(registry._dir.glob("*.example"))) == 2
        assert [a.name for a in registry.list_approaches()] == [DEFAULT_APPROACH_NAME]

    def test_awkward_names_get_distinct_files(self, registry):
        registry.add_approach(Approach("Style A", "a"))
        registry.add_approach(Approach("style:a", "b"))
        reloaded = ApproachRegistry(registry._dir)
        assert reloaded.get("Style A").template == "a"
        assert reloaded.get("style:a").template == "b"
