/** Top-level application: screen transitions driven entirely by API responses. */

import { ApiClient } from "./api.js";
import { clear, el } from "./dom.js";
import { consentView, credentialsView, declinedView } from "./views/consent.js";
import { BrowserScreen, errorBanner } from "./views/browser.js";
import { ratingModal } from "./views/rating.js";
import { ResearchScreen } from "./views/research.js";
import type { Generation } from "./types.js";

export class App {
  private browser: BrowserScreen | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
  ) {}

  async start(): Promise<void> {
    const nav = el("nav", { class: "top-nav" });
    const researchLink = el("button", { id: "open-research" }, "Research view");
    researchLink.addEventListener("click", () => this.showResearch());
    nav.append(researchLink);
    this.root.append(nav);
    this.screen = el("main", { class: "screen" });
    this.root.append(this.screen);
    await this.showConsent();
  }

  private screen: HTMLElement = el("main");

  private swap(view: HTMLElement): void {
    clear(this.screen);
    this.screen.append(view);
  }

  private async showConsent(): Promise<void> {
    try {
      await this.api.createSession();
      const doc = await this.api.getConsent();
      this.swap(
        consentView(doc, (accepted) => {
          void this.handleConsent(accepted);
        }),
      );
    } catch (err) {
      this.swap(errorBanner(err));
    }
  }

  private async handleConsent(accepted: boolean): Promise<void> {
    try {
      await this.api.acceptConsent(accepted);
    } catch (err) {
      this.swap(errorBanner(err));
      return;
    }
    if (!accepted) {
      this.swap(declinedView());
      return;
    }
    this.swap(
      credentialsView((token, username) => {
        void this.handleCredentials(token, username);
      }),
    );
  }

  private async handleCredentials(token: string, username: string): Promise<void> {
    try {
      await this.api.setCredentials(token, username);
      const repos = await this.api.listRepos();
      this.browser = new BrowserScreen(repos, {
        loadCommits: (repo, page) => this.api.listCommits(repo, page),
        loadDetail: (repo, sha) => this.api.commitDetail(repo, sha),
        onGenerate: (repo, sha) => {
          void this.runGeneration(repo, sha);
        },
      });
      this.swap(this.browser.element);
    } catch (err) {
      this.swap(errorBanner(err));
    }
  }

  private async runGeneration(repo: string, sha: string): Promise<void> {
    if (this.browser === null) return;
    const log = this.browser.showLoadingLog();
    let generation: Generation;
    let originalMessage: string;
    try {
      const detail = await this.api.commitDetail(repo, sha);
      originalMessage = detail.original_message;
      log.append("Calling the generation pipeline...\n");
      generation = await this.api.generate(repo, sha);
      log.append("Done.\n");
    } catch (err) {
      await this.browser.selectCommit(sha);
      this.browser.showError(err);
      return;
    }
    const modal = ratingModal(
      originalMessage,
      generation.candidates,
      (ratings) => this.api.submitRatings(generation.generation_id, ratings).then(() => undefined),
      () => {
        modal.element.remove();
        void this.browser?.selectCommit(sha);
      },
    );
    this.root.append(modal.element);
  }

  private showResearch(): void {
    this.swap(new ResearchScreen(this.api).element);
  }
}
