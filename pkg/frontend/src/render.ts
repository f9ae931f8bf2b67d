// Pure view models for the popup; DOM binding stays in popup.ts.

import { highlightScale, highlightStyle } from "./highlight";
import { rankClaims } from "./ranking";
import type { AnalyzeResponse, RankedClaim } from "./types";

export interface ResultView {
  verdictLabel: string;
  unverifiable: boolean;
  scoreText: string | null; // never shown for unverifiable verdicts
  evidenceEnabled: boolean;
}

export function resultView(resp: AnalyzeResponse): ResultView {
  const unverifiable = resp.verdict === "unverifiable";
  return {
    verdictLabel: unverifiable
      ? "Unverifiable: no evidence passed the similarity filter"
      : resp.verdict === "true"
        ? "Likely true"
        : "Likely false",
    unverifiable,
    scoreText:
      unverifiable || resp.credibility_score === null
        ? null
        : resp.credibility_score.toFixed(2),
    evidenceEnabled: resp.evidence.length > 0,
  };
}

export interface EvidenceSentenceView {
  text: string;
  intensity: number;
  style: string;
  topWord: string | null;
}

export interface EvidenceSourceView {
  url: string;
  title: string;
  sentences: EvidenceSentenceView[];
}

export function evidenceView(resp: AnalyzeResponse): EvidenceSourceView[] {
  return resp.evidence.map((source) => ({
    url: source.url,
    title: source.title,
    sentences: source.snippets.flatMap((snippet) =>
      snippet.sentences.map((s) => ({
        text: s.text,
        intensity: highlightScale(s.intensity),
        style: highlightStyle(s.intensity),
        topWord: topWeightedWord(s.word_weights),
      })),
    ),
  }));
}

function topWeightedWord(weights: [string, number][]): string | null {
  let best: string | null = null;
  let bestWeight = -Infinity;
  for (const [word, weight] of weights) {
    if (weight > bestWeight) {
      best = word;
      bestWeight = weight;
    }
  }
  return best;
}

export interface ClaimRowView {
  sentence: string;
  index: number;
  score: number;
  scoreText: string;
  selected: boolean;
}

/** Re-filter the delivered claim list client-side (same semantics as the
 * server) as the user moves the threshold / top-k controls. */
export function claimListView(
  claims: RankedClaim[],
  threshold: number,
  topK: number,
): ClaimRowView[] {
  return rankClaims(claims, threshold, topK).map((c) => ({
    sentence: c.sentence,
    index: c.index,
    score: c.score,
    scoreText: c.score.toFixed(3),
    selected: c.selected,
  }));
}

export interface ErrorView {
  message: string;
  retryable: boolean;
}

export function errorView(status: number, detail: string): ErrorView {
  const retryable = status === 0 || status === 502 || status === 503;
  const reason =
    status === 503
      ? "The service has no models loaded yet."
      : status === 502
        ? "The search backend is unreachable."
        : status === 0
          ? "Could not reach the service."
          : detail;
  return { message: reason, retryable };
}
