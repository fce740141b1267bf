/** Consent gate and credential entry; everything else stays locked behind these. */

import { el } from "../dom.js";
import type { ConsentDoc } from "../types.js";

export function consentView(
  doc: ConsentDoc,
  onDecision: (accepted: boolean) => void,
): HTMLElement {
  const accept = el("button", { class: "primary", id: "consent-accept" }, "Accept");
  const decline = el("button", { id: "consent-decline" }, "Decline");
  accept.addEventListener("click", () => onDecision(true));
  decline.addEventListener("click", () => onDecision(false));
  return el(
    "section",
    { class: "consent-screen" },
    el("h1", {}, "Consent"),
    el("pre", { class: "consent-text" }, doc.text),
    el("p", { class: "consent-version" }, `Document version ${doc.version}`),
    el("div", { class: "actions" }, accept, decline),
  );
}

export function declinedView(): HTMLElement {
  return el(
    "section",
    { class: "locked-screen" },
    el("h1", {}, "Participation declined"),
    el("p", {}, "You declined the consent form, so the tool stays locked. Reload to start over."),
  );
}

export function credentialsView(
  onSubmit: (token: string, username: string) => void,
): HTMLElement {
  const token = el("input", { type: "password", id: "github-token", autocomplete: "off" });
  const username = el("input", { type: "text", id: "github-username", autocomplete: "off" });
  const submit = el("button", { class: "primary", id: "credentials-submit" }, "Continue");
  const hint = el("p", { class: "field-error", hidden: "" }, "A token is required.");
  submit.addEventListener("click", () => {
    if (!token.value.trim()) {
      hint.removeAttribute("hidden");
      return;
    }
    onSubmit(token.value.trim(), username.value.trim());
  });
  return el(
    "section",
    { class: "credentials-screen" },
    el("h1", {}, "Connect your account"),
    el(
      "p",
      {},
      "Share a read-only access token and username. They stay in server memory for this session and are never stored with submissions.",
    ),
    el("label", { for: "github-token" }, "Access token"),
    token,
    el("label", { for: "github-username" }, "Username"),
    username,
    hint,
    el("div", { class: "actions" }, submit),
  );
}
