// Wire types mirroring the service JSON bodies.

export type Verdict = "true" | "false" | "unverifiable";
export type FeedbackKind = "verdict" | "claim_score";

export interface SentenceEvidence {
  text: string;
  intensity: number; // [0, 1], max over a source is exactly 1
  word_weights: [string, number][];
}

export interface SnippetEvidence {
  text: string;
  similarity: number;
  sentences: SentenceEvidence[];
}

export interface SourceEvidence {
  url: string;
  title: string;
  snippets: SnippetEvidence[];
}

export interface ModelInfo {
  sadhan: string | null;
  worthiness: string | null;
  format_version: number;
  backend: string | null;
}

export interface AnalyzeResponse {
  request_id: string;
  claim: string;
  verdict: Verdict;
  credibility_score: number | null; // present iff verdict != unverifiable
  evidence: SourceEvidence[];
  aspect_probabilities?: Record<string, { true: number; false: number }>;
  model: ModelInfo;
}

export interface RankedClaim {
  sentence: string;
  index: number;
  score: number;
  selected: boolean;
}

export interface ArticleResponse {
  request_id: string;
  claims: RankedClaim[];
  analysis: AnalyzeResponse | null;
}

export interface HealthResponse {
  status: "ok" | "degraded";
  models: { sadhan: string | null; worthiness: string | null };
  backend: string | null;
  missing: string[];
}
