// Client-side claim re-filtering.
//
// Must reproduce the server's ranking semantics exactly: keep scores at or
// above the threshold, sort by score descending with ties broken by the
// original sentence index ascending, truncate to top-k.

import type { RankedClaim } from "./types";

export function rankClaims(
  claims: RankedClaim[],
  threshold: number,
  topK: number,
): RankedClaim[] {
  if (threshold < 0 || threshold > 1) {
    throw new RangeError("threshold must be in [0, 1]");
  }
  if (topK < 1) {
    throw new RangeError("topK must be >= 1");
  }
  return claims
    .filter((c) => c.score >= threshold)
    .sort((a, b) => b.score - a.score || a.index - b.index)
    .slice(0, topK);
}
