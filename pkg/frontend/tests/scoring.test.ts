import { describe, expect, it } from "vitest";

import { computeSubtotal, icPointsX2, resolveToi, selectPodCategory, tomPointsX2 } from "../src/scoring";
import type { AnnotationRecord } from "../src/types";

function complete(overrides: Partial<AnnotationRecord> = {}): AnnotationRecord {
  return {
    mcq_id: "t:q0",
    toi_concepts: "person",
    tom_tq: "LM",
    tom_ta: "LM",
    nphr: 1,
    ni: 1,
    nit: "specified",
    npar: "within_paragraph",
    ic: "compare",
    pod_per_distractor: { B: "no_distracting_information" },
    toc: "none",
    ...overrides,
  };
}

describe("table mirror", () => {
  it("scores the all-minimum record at 2.5", () => {
    const subtotal = computeSubtotal(complete());
    expect(subtotal.totalX2).toBe(5);
  });

  it("includes 4 points for a theme question", () => {
    const subtotal = computeSubtotal(complete({ toi_concepts: "theme" }));
    expect(subtotal.componentsX2.TOI).toBe(8);
  });

  it("keeps TOM symmetric", () => {
    expect(tomPointsX2(complete({ tom_tq: "LM", tom_ta: "SM" })))
      .toBe(tomPointsX2(complete({ tom_tq: "SM", tom_ta: "LM" })));
    expect(tomPointsX2(complete({ tom_tq: "LM", tom_ta: "SM" }))).toBe(2);
  });

  it("scores GEN at 5 and double HLTI as unresolved", () => {
    expect(tomPointsX2({ mcq_id: "x", tom_gen: true })).toBe(10);
    expect(tomPointsX2({ mcq_id: "x", tom_tq: "HLTI", tom_ta: "HLTI" })).toBeNull();
  });

  it("gives contrast its point only within one paragraph", () => {
    expect(icPointsX2("contrast", "within_paragraph")).toBe(2);
    expect(icPointsX2("contrast", "between_paragraphs")).toBe(0);
    expect(icPointsX2("compare", "within_paragraph")).toBe(0);
  });

  it("selects the hardest distractor, later row on ties", () => {
    expect(selectPodCategory({
      B: "literal_match_different_paragraph",
      C: "inference_outside_text",
    })).toBe("inference_outside_text");
    expect(selectPodCategory({
      B: "inference_outside_text",
      C: "two_or_more_distractors_same_paragraph",
    })).toBe("inference_outside_text");
  });

  it("resolves TOI aliases and splits", () => {
    expect(resolveToi({ mcq_id: "x", toi_concepts: "main idea" })).toBe("theme");
    expect(resolveToi({
      mcq_id: "x",
      toi_concepts: { A: "time", B: "time", C: "amount", D: "amount" },
    })).toBe("indeterminate");
    expect(resolveToi({
      mcq_id: "x",
      toi_concepts: { A: "time", B: "time", C: "time", D: "amount" },
    })).toBeNull();
  });

  it("reports missing variables instead of guessing", () => {
    const subtotal = computeSubtotal({ mcq_id: "x", toi_concepts: "person" });
    expect(subtotal.totalX2).toBeNull();
    expect(subtotal.missing).toContain("TOM");
    expect(subtotal.missing).toContain("POD");
  });
});
