/** Repository list, commit node timeline, and the commit detail panel. */

import { clear, el } from "../dom.js";
import { ApiError } from "../api.js";
import type { CommitDetail, CommitSummary, RepoInfo } from "../types.js";

export interface BrowserCallbacks {
  loadCommits(repo: string, page: number): Promise<CommitSummary[]>;
  loadDetail(repo: string, sha: string): Promise<CommitDetail>;
  onGenerate(repo: string, sha: string): void;
}

export function errorBanner(err: unknown): HTMLElement {
  let text = "Something went wrong talking to the service. Retry in a moment.";
  if (err instanceof ApiError) {
    if (err.code === "rate_limited") {
      const when =
        err.resetEpoch !== null
          ? ` Limit resets at ${new Date(err.resetEpoch * 1000).toLocaleTimeString()}.`
          : "";
      text = `The git host is rate-limiting requests.${when}`;
    } else if (err.code === "network_error") {
      text = "The service is unreachable. Check the backend and retry.";
    } else {
      text = err.message;
    }
  }
  return el("div", { class: "error-banner", role: "alert" }, text);
}

export class BrowserScreen {
  readonly element: HTMLElement;
  private readonly timeline = el("ul", { class: "timeline" });
  private readonly detail = el("section", { class: "commit-detail" });
  private readonly banner = el("div", { class: "banner-slot" });
  private selectedSha: string | null = null;
  private currentRepo: string | null = null;

  constructor(
    private readonly repos: RepoInfo[],
    private readonly callbacks: BrowserCallbacks,
  ) {
    const repoList = el("ul", { class: "repo-list" });
    for (const repo of repos) {
      const button = el("button", { class: "repo-item" }, repo.full_name);
      button.addEventListener("click", () => void this.selectRepo(repo.full_name));
      repoList.append(el("li", {}, button));
    }
    this.element = el(
      "section",
      { class: "browser-screen" },
      el("h1", {}, "Repositories"),
      this.banner,
      repoList,
      el("h2", {}, "Commits"),
      this.timeline,
      this.detail,
    );
  }

  private setBanner(err: unknown | null): void {
    clear(this.banner);
    if (err !== null) {
      this.banner.append(errorBanner(err));
    }
  }

  async selectRepo(repo: string): Promise<void> {
    this.currentRepo = repo;
    this.selectedSha = null;
    clear(this.detail);
    clear(this.timeline);
    this.setBanner(null);
    let commits: CommitSummary[];
    try {
      commits = await this.callbacks.loadCommits(repo, 1);
    } catch (err) {
      this.setBanner(err);
      return;
    }
    for (const commit of commits) {
      const node = el(
        "button",
        { class: "timeline-node", "data-sha": commit.sha },
        el("span", { class: "node-dot" }, "●"),
        el("span", { class: "node-summary" }, commit.summary),
        el("time", {}, commit.timestamp),
      );
      node.addEventListener("click", () => void this.selectCommit(commit.sha));
      this.timeline.append(el("li", {}, node));
    }
  }

  async selectCommit(sha: string): Promise<void> {
    if (this.currentRepo === null) return;
    this.selectedSha = sha;
    for (const node of this.timeline.querySelectorAll(".timeline-node")) {
      node.classList.toggle("selected", node.getAttribute("data-sha") === sha);
    }
    clear(this.detail);
    this.setBanner(null);
    let detail: CommitDetail;
    try {
      detail = await this.callbacks.loadDetail(this.currentRepo, sha);
    } catch (err) {
      this.setBanner(err);
      return;
    }
    const generateButton = el(
      "button",
      { class: "primary", id: "view-generated" },
      "View AI Generated Messages",
    );
    generateButton.addEventListener("click", () => {
      if (this.currentRepo !== null && this.selectedSha !== null) {
        this.callbacks.onGenerate(this.currentRepo, this.selectedSha);
      }
    });
    const files = el("table", { class: "file-table" });
    files.append(
      el(
        "tr",
        {},
        el("th", {}, "File"),
        el("th", {}, "Status"),
        el("th", {}, "+"),
        el("th", {}, "-"),
        el("th", {}, "Changes"),
      ),
    );
    for (const file of detail.files) {
      files.append(
        el(
          "tr",
          {},
          el("td", {}, file.filename),
          el("td", {}, file.status),
          el("td", {}, String(file.additions)),
          el("td", {}, String(file.deletions)),
          el("td", {}, String(file.changes)),
        ),
      );
    }
    this.detail.append(
      el("h3", {}, `Commit ${detail.commit_id.slice(0, 10)}`),
      el("p", { class: "original-message" }, detail.original_message),
      el("p", {}, `Type: ${detail.commit_type} | ${detail.timestamp}`),
    );
    if (detail.pr_title) {
      this.detail.append(el("p", {}, `Pull request: ${detail.pr_title}`));
    }
    this.detail.append(files, generateButton);
  }

  /** Replace the detail panel with a progress log while generation runs. */
  showLoadingLog(): HTMLElement {
    clear(this.detail);
    const log = el("pre", { class: "loading-log" }, "Generating commit messages...\n");
    this.detail.append(log);
    return log;
  }

  showError(err: unknown): void {
    this.setBanner(err);
  }
}
