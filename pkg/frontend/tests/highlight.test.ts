import { describe, expect, test } from "vitest";

import { highlightScale, highlightStyle, normalizeSelection } from "../src/highlight";

describe("highlightScale", () => {
  test("is the identity on [0, 1] (linear, monotone)", () => {
    for (const v of [0, 0.1, 0.25, 0.5, 0.75, 1]) {
      expect(highlightScale(v)).toBe(v);
    }
  });

  test("0.5 sits exactly mid-scale", () => {
    expect(highlightScale(0.5) - highlightScale(0)).toBeCloseTo(
      highlightScale(1) - highlightScale(0.5), 12);
  });

  test("clamps out-of-range and non-finite input", () => {
    expect(highlightScale(-1)).toBe(0);
    expect(highlightScale(2)).toBe(1);
    expect(highlightScale(Number.NaN)).toBe(0);
  });
});

describe("highlightStyle", () => {
  test("intensity 0 renders unhighlighted", () => {
    expect(highlightStyle(0)).toContain("transparent");
  });

  test("maximum intensity uses full strength", () => {
    expect(highlightStyle(1)).toContain(", 1)");
  });

  test("equal intensities render identically, distinct ones differ", () => {
    expect(highlightStyle(0.5)).toBe(highlightStyle(0.5));
    expect(highlightStyle(0.5)).not.toBe(highlightStyle(1));
    expect(highlightStyle(0.5)).toContain("0.5");
  });
});

describe("normalizeSelection", () => {
  test("selection spanning paragraphs joins with single spaces", () => {
    expect(normalizeSelection("first line\n\n  second\tline ")).toBe(
      "first line second line");
  });

  test("empty selection stays empty", () => {
    expect(normalizeSelection("   \n ")).toBe("");
  });
});
