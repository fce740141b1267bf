/** Password-protected research view: submissions, approaches, refinement prompt. */

import { clear, el } from "../dom.js";
import type { ApiClient } from "../api.js";
import type { StoredSubmission } from "../types.js";

export class ResearchScreen {
  readonly element: HTMLElement;
  private readonly content = el("div", { class: "research-content" });
  private readonly message = el("p", { class: "research-message" });

  constructor(private readonly api: ApiClient) {
    this.element = el(
      "section",
      { class: "research-screen" },
      el("h1", {}, "Research view"),
      this.message,
      this.content,
    );
    this.renderLogin();
  }

  private renderLogin(): void {
    clear(this.content);
    const password = el("input", { type: "password", id: "research-password" });
    const submit = el("button", { class: "primary", id: "research-login" }, "Log in");
    submit.addEventListener("click", () => {
      void this.api
        .researchLogin(password.value)
        .then(() => this.renderPanels())
        .catch(() => {
          this.message.textContent = "Password rejected.";
        });
    });
    this.content.append(el("label", { for: "research-password" }, "Research password"), password, submit);
  }

  private async renderPanels(): Promise<void> {
    this.message.textContent = "";
    clear(this.content);
    const [submissions, approaches, refinementPrompt] = await Promise.all([
      this.api.researchSubmissions(),
      this.api.researchApproaches(),
      this.api.getRefinementPrompt(),
    ]);

    // submissions table
    const table = el("table", { class: "submissions-table" });
    table.append(
      el(
        "tr",
        {},
        el("th", {}, "Submission"),
        el("th", {}, "Commit"),
        el("th", {}, "Approach"),
        el("th", {}, "Generated message"),
        el("th", {}, "Ratings"),
        el("th", {}, "Rationale"),
      ),
    );
    for (const submission of submissions) {
      for (const rating of submission.ratings) {
        table.append(
          el(
            "tr",
            { class: "submission-row", "data-submission-id": submission.submission_id },
            el("td", {}, submission.submission_id.slice(0, 8)),
            el("td", {}, submission.commit_id.slice(0, 10)),
            el("td", {}, rating.approach_name),
            el("td", {}, rating.generated_message ?? "(failed)"),
            el(
              "td",
              {},
              rating.likert
                ? Object.entries(rating.likert)
                    .map(([k, v]) => `${k}:${v}`)
                    .join(" ")
                : "-",
            ),
            el("td", {}, rating.rationale),
          ),
        );
      }
    }

    // approach management
    const approachList = el("ul", { class: "approach-list" });
    for (const approach of approaches) {
      const toggle = el("input", {
        type: "checkbox",
        class: "refinement-toggle",
        "data-name": approach.name,
      });
      toggle.checked = approach.refinement_enabled;
      toggle.addEventListener("change", () => {
        void this.api
          .setRefinement(approach.name, toggle.checked)
          .catch(() => this.setMessage("Could not update the refinement flag."));
      });
      const remove = el("button", { class: "remove-approach", "data-name": approach.name }, "Remove");
      remove.addEventListener("click", () => {
        void this.api
          .removeApproach(approach.name)
          .then(() => this.renderPanels())
          .catch(() => this.setMessage("Could not remove the approach."));
      });
      approachList.append(
        el(
          "li",
          { class: "approach-item" },
          el("strong", {}, approach.name),
          el("label", {}, " refinement ", toggle),
          remove,
        ),
      );
    }
    const newName = el("input", { type: "text", id: "new-approach-name", placeholder: "Name" });
    const newTemplate = el("textarea", { id: "new-approach-template", placeholder: "Prompt template" });
    const newRefinement = el("input", { type: "checkbox", id: "new-approach-refinement" });
    newRefinement.checked = true;
    const add = el("button", { id: "add-approach" }, "Add approach");
    add.addEventListener("click", () => {
      void this.api
        .addApproach({
          name: newName.value.trim(),
          template: newTemplate.value,
          refinement_enabled: newRefinement.checked,
        })
        .then(() => this.renderPanels())
        .catch((err: unknown) =>
          this.setMessage(err instanceof Error ? err.message : "Could not add the approach."),
        );
    });

    // refinement prompt editor
    const promptEditor = el("textarea", { id: "refinement-prompt" });
    promptEditor.value = refinementPrompt;
    const savePrompt = el("button", { id: "save-refinement-prompt" }, "Save refinement prompt");
    savePrompt.addEventListener("click", () => {
      void this.api
        .setRefinementPrompt(promptEditor.value)
        .then(() => this.setMessage("Refinement prompt saved."))
        .catch((err: unknown) =>
          this.setMessage(err instanceof Error ? err.message : "Invalid refinement prompt."),
        );
    });

    this.content.append(
      el("h2", {}, "Submissions"),
      table,
      el("h2", {}, "Approaches"),
      approachList,
      el("div", { class: "add-approach-form" }, newName, newTemplate, el("label", {}, "refinement ", newRefinement), add),
      el("h2", {}, "Refinement prompt"),
      promptEditor,
      savePrompt,
    );
  }

  private setMessage(text: string): void {
    this.message.textContent = text;
  }
}

export type { StoredSubmission };
