/** Typed client for the evaluation service's HTTP API.
 *
 * Holds the participant session id and the research token in memory only;
 * neither ever lands in URLs or browser storage.
 */

import type {
  Approach,
  CommitDetail,
  CommitSummary,
  ConsentDoc,
  Generation,
  RatingPayload,
  RepoInfo,
  StoredSubmission,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly resetEpoch: number | null = null,
  ) {
    super(message);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private sessionId: string | null = null;
  private researchToken: string | null = null;

  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  get hasSession(): boolean {
    return this.sessionId !== null;
  }

  get hasResearchToken(): boolean {
    return this.researchToken !== null;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const headers: Record<string, string> = { "Content-Type": "application/json" };
    if (this.sessionId) headers["X-Session-Id"] = this.sessionId;
    if (this.researchToken) headers["X-Research-Token"] = this.researchToken;
    let response: Response;
    try {
      response = await this.fetchFn(this.baseUrl + path, {
        method,
        headers,
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (err) {
      throw new ApiError(0, "network_error", `cannot reach the service: ${String(err)}`);
    }
    if (!response.ok) {
      let code = "http_error";
      let message = `request failed with status ${response.status}`;
      let resetEpoch: number | null = null;
      try {
        const payload = (await response.json()) as { detail?: unknown };
        const detail = payload.detail;
        if (typeof detail === "string") {
          message = detail;
        } else if (detail && typeof detail === "object") {
          const d = detail as { code?: string; message?: string; reset_epoch?: number };
          code = d.code ?? code;
          message = d.message ?? message;
          resetEpoch = d.reset_epoch ?? null;
        }
      } catch {
        // non-JSON error body; keep defaults
      }
      throw new ApiError(response.status, code, message, resetEpoch);
    }
    return (await response.json()) as T;
  }

  // --- participant flow ---

  async createSession(): Promise<void> {
    const { session_id } = await this.request<{ session_id: string }>("POST", "/api/session");
    this.sessionId = session_id;
  }

  getConsent(): Promise<ConsentDoc> {
    return this.request("GET", "/api/consent");
  }

  async acceptConsent(accepted: boolean): Promise<boolean> {
    const result = await this.request<{ consent_accepted: boolean }>(
      "POST",
      "/api/session/consent",
      { accepted },
    );
    return result.consent_accepted;
  }

  async setCredentials(token: string, username: string): Promise<void> {
    await this.request("POST", "/api/session/credentials", { token, username });
  }

  listRepos(): Promise<RepoInfo[]> {
    return this.request("GET", "/api/repos");
  }

  listCommits(repo: string, page = 1): Promise<CommitSummary[]> {
    return this.request("GET", `/api/repos/${repo}/commits?page=${page}`);
  }

  commitDetail(repo: string, sha: string): Promise<CommitDetail> {
    return this.request("GET", `/api/repos/${repo}/commits/${sha}`);
  }

  generate(repo: string, sha: string): Promise<Generation> {
    return this.request("POST", "/api/generate", { repo, sha });
  }

  async submitRatings(generationId: string, ratings: RatingPayload[]): Promise<string> {
    const result = await this.request<{ submission_id: string }>("POST", "/api/submissions", {
      generation_id: generationId,
      ratings,
    });
    return result.submission_id;
  }

  // --- research view ---

  async researchLogin(password: string): Promise<void> {
    const { token } = await this.request<{ token: string }>("POST", "/api/research/login", {
      password,
    });
    this.researchToken = token;
  }

  researchApproaches(): Promise<Approach[]> {
    return this.request("GET", "/api/research/approaches");
  }

  async addApproach(approach: Approach): Promise<void> {
    await this.request("POST", "/api/research/approaches", approach);
  }

  async removeApproach(name: string): Promise<void> {
    await this.request("DELETE", `/api/research/approaches/${encodeURIComponent(name)}`);
  }

  async setRefinement(name: string, enabled: boolean): Promise<void> {
    await this.request("PUT", `/api/research/approaches/${encodeURIComponent(name)}/refinement`, {
      enabled,
    });
  }

  async getRefinementPrompt(): Promise<string> {
    const { template } = await this.request<{ template: string }>(
      "GET",
      "/api/research/refinement-prompt",
    );
    return template;
  }

  async setRefinementPrompt(template: string): Promise<void> {
    await this.request("PUT", "/api/research/refinement-prompt", { template });
  }

  researchSubmissions(): Promise<StoredSubmission[]> {
    return this.request("GET", "/api/research/submissions");
  }
}
