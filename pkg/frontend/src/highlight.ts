// Evidence highlighting and selection normalization.

/** Clamp an intensity into [0, 1]; the linear scale the display uses. */
export function highlightScale(intensity: number): number {
  if (!Number.isFinite(intensity)) return 0;
  return Math.min(1, Math.max(0, intensity));
}

const HUE = 46; // single amber hue; only its strength varies

/**
 * CSS background for a sentence: strength is a linear function of the
 * intensity (alpha of a fixed hue), so 0.5 sits exactly mid-scale and
 * intensity 0 renders unhighlighted.
 */
export function highlightStyle(intensity: number): string {
  const v = highlightScale(intensity);
  if (v === 0) return "background-color: transparent";
  return `background-color: hsla(${HUE}, 100%, 50%, ${v})`;
}

/** Selection text normalized: whitespace runs collapse to single spaces. */
export function normalizeSelection(text: string): string {
  return text.replace(/\s+/g, " ").trim();
}
