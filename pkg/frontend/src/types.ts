/** Shapes exchanged with the HTTP API. */

export interface ConsentDoc {
  text: string;
  version: string;
}

export interface RepoInfo {
  id: number;
  full_name: string;
}

export interface CommitSummary {
  sha: string;
  summary: string;
  timestamp: string;
}

export interface FileChange {
  filename: string;
  status: string;
  additions: number;
  deletions: number;
  changes: number;
}

export interface CommitDetail {
  commit_id: string;
  repo: string;
  original_message: string;
  diff: string;
  commit_type: string;
  timestamp: string;
  pr_title: string | null;
  issue_report: string | null;
  files: FileChange[];
}

export interface MetricScores {
  bleu: number;
  meteor: number;
  rouge_l: number;
}

/** One blind candidate: display index only, no approach identity. */
export interface Candidate {
  display_index: number;
  success: boolean;
  message: string | null;
  error_kind: string | null;
  scores: MetricScores | null;
}

export interface Generation {
  generation_id: string;
  candidates: Candidate[];
}

export interface RatingPayload {
  display_index: number;
  likert: Record<string, number>;
  rationale: string;
}

export interface Approach {
  name: string;
  template: string;
  refinement_enabled: boolean;
}

export interface StoredRating {
  approach_name: string;
  success: boolean;
  refinement_used: boolean;
  generated_message: string | null;
  likert: Record<string, number> | null;
  rationale: string;
  scores: MetricScores | null;
}

export interface StoredSubmission {
  submission_id: string;
  created_at: string;
  commit_id: string;
  commit_type: string;
  original_message: string;
  pr_title: string | null;
  issue_report: string | null;
  commit_timestamp: string;
  files: FileChange[];
  ratings: StoredRating[];
}

export const LIKERT_CRITERIA = [
  "accuracy",
  "integrity",
  "readability",
  "applicability",
  "completeness",
] as const;

export type LikertCriterion = (typeof LIKERT_CRITERIA)[number];
