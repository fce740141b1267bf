/** Blind rating modal.
 *
 * Shows the original message first, then the candidates exactly in the
 * server-provided shuffle order, labeled only by their arbitrary display
 * index. Approach names never enter this DOM. Submission stays disabled
 * until every successful candidate has all five Likert criteria selected
 * (no defaults, to avoid anchoring) and a non-empty rationale.
 */

import { el } from "../dom.js";
import { LIKERT_CRITERIA, type Candidate, type RatingPayload } from "../types.js";

const CRITERION_QUESTIONS: Record<string, string> = {
  accuracy: "Is the commit message correct?",
  integrity: "Does it explain what changed and why?",
  readability: "Is the commit message clear and free of grammatical errors?",
  applicability: "Would other developers use the same commit message?",
  completeness: "Does the commit message cover all the changes?",
};

export interface RatingModal {
  element: HTMLElement;
  /** Recompute whether submit is allowed; exposed for tests. */
  isComplete(): boolean;
}

export function ratingModal(
  originalMessage: string,
  candidates: Candidate[],
  onSubmit: (ratings: RatingPayload[]) => Promise<void>,
  onClose: () => void,
): RatingModal {
  const successful = candidates.filter((c) => c.success);
  const submit = el("button", { class: "primary", id: "submit-ratings", disabled: "" }, "Submit ratings");
  const status = el("p", { class: "modal-status" });
  const form = el("form", { class: "rating-form" });

  for (const candidate of candidates) {
    const block = el("fieldset", {
      class: "candidate-block",
      "data-display-index": String(candidate.display_index),
    });
    block.append(el("legend", {}, `Message ${candidate.display_index}`));
    if (!candidate.success) {
      block.append(
        el(
          "p",
          { class: "error-chip" },
          `Generation failed (${candidate.error_kind ?? "unknown error"}); nothing to rate.`,
        ),
      );
      form.append(block);
      continue;
    }
    block.append(el("blockquote", { class: "candidate-text" }, candidate.message ?? ""));
    for (const criterion of LIKERT_CRITERIA) {
      const row = el("div", { class: "likert-row", "data-criterion": criterion });
      row.append(
        el("span", { class: "criterion-label", title: CRITERION_QUESTIONS[criterion] ?? "" }, criterion),
      );
      for (let value = 1; value <= 5; value += 1) {
        const input = el("input", {
          type: "radio",
          name: `c${candidate.display_index}-${criterion}`,
          value: String(value),
        });
        row.append(el("label", { class: "likert-option" }, input, String(value)));
      }
      block.append(row);
    }
    block.append(
      el("label", {}, "Rationale for your ratings"),
      el("textarea", { class: "rationale", name: `c${candidate.display_index}-rationale` }),
    );
    form.append(block);
  }

  function readRatings(): RatingPayload[] | null {
    const ratings: RatingPayload[] = [];
    for (const candidate of successful) {
      const likert: Record<string, number> = {};
      for (const criterion of LIKERT_CRITERIA) {
        const checked = form.querySelector<HTMLInputElement>(
          `input[name="c${candidate.display_index}-${criterion}"]:checked`,
        );
        if (!checked) return null;
        likert[criterion] = Number(checked.value);
      }
      const rationale = form.querySelector<HTMLTextAreaElement>(
        `textarea[name="c${candidate.display_index}-rationale"]`,
      );
      if (!rationale || !rationale.value.trim()) return null;
      ratings.push({
        display_index: candidate.display_index,
        likert,
        rationale: rationale.value.trim(),
      });
    }
    return ratings;
  }

  function refresh(): void {
    if (readRatings() === null) {
      submit.setAttribute("disabled", "");
    } else {
      submit.removeAttribute("disabled");
    }
  }

  form.addEventListener("change", refresh);
  form.addEventListener("input", refresh);

  submit.addEventListener("click", () => {
    const ratings = readRatings();
    if (ratings === null) return;
    submit.setAttribute("disabled", "");
    status.textContent = "Submitting...";
    void onSubmit(ratings)
      .then(() => {
        status.textContent = "Ratings submitted. Thank you!";
        window.setTimeout(onClose, 600);
      })
      .catch((err: unknown) => {
        status.textContent = `Submission failed: ${err instanceof Error ? err.message : String(err)}`;
        submit.removeAttribute("disabled");
      });
  });

  const close = el("button", { class: "modal-close", type: "button" }, "Close");
  close.addEventListener("click", onClose);

  const element = el(
    "div",
    { class: "modal-backdrop" },
    el(
      "div",
      { class: "modal rating-modal", role: "dialog", "aria-modal": "true" },
      close,
      el("h2", {}, "Rate the generated messages"),
      el("h3", {}, "Original commit message"),
      el("blockquote", { class: "original-message" }, originalMessage),
      form,
      status,
      submit,
    ),
  );
  return { element, isComplete: () => readRatings() !== null };
}
