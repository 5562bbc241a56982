/**
 * Workbench/server coherence: the optimistic subtotal must equal the
 * server's scorecard total exactly for randomized complete drafts, and a
 * saved draft must reload byte-identically (canonical serialization).
 */

import { beforeAll, describe, expect, it } from "vitest";

import { makeApi, type Api } from "../src/api";
import { canonicalSerialize, Draft } from "../src/draft";
import { computeSubtotal } from "../src/scoring";
import { toiPoints } from "../src/vocabulary";
import type { AnnotationRecord, Label } from "../src/types";

function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a |= 0; a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

const pick = <T,>(rng: () => number, xs: readonly T[]): T =>
  xs[Math.floor(rng() * xs.length)]!;

const TOM_PAIRS: ReadonlyArray<[string, string]> = [
  ["LM", "LM"], ["LM", "SM"], ["SM", "LM"], ["SM", "SM"], ["LM", "LLTI"],
  ["LLTI", "LM"], ["SM", "LLTI"], ["LLTI", "LLTI"], ["LM", "HLTI"],
  ["HLTI", "SM"], ["LLTI", "HLTI"],
];
const POD_CATEGORIES = [
  "no_distracting_information", "literal_match_different_paragraph",
  "synonymous_match_different_paragraph",
  "invited_inference_outside_key_paragraph", "one_distractor_same_paragraph",
  "two_or_more_distractors_same_paragraph", "inference_outside_text",
] as const;
const TOC = ["none", "addition", "counting", "subtraction", "multiplication",
             "division", "multiple"] as const;
const CONCEPTS = [...toiPoints.keys()];

function randomCompleteDraft(rng: () => number, mcqId: string,
                             key: Label): AnnotationRecord {
  const record: AnnotationRecord = { mcq_id: mcqId };
  if (rng() < 0.15) {
    record.toi_concepts = { A: "time", B: "time", C: "amount", D: "amount" };
  } else if (rng() < 0.1) {
    const concept = pick(rng, CONCEPTS);
    record.toi_concepts = { A: concept, B: concept, C: concept, D: concept };
  } else {
    record.toi_concepts = pick(rng, CONCEPTS);
  }
  if (rng() < 0.08) {
    record.tom_gen = true;
  } else {
    const [tq, ta] = pick(rng, TOM_PAIRS);
    record.tom_tq = tq;
    record.tom_ta = ta;
  }
  record.nphr = 1 + Math.floor(rng() * 6);
  record.ni = 1 + Math.floor(rng() * 6);
  record.nit = rng() < 0.5 ? "specified" : "unspecified";
  record.npar = rng() < 0.5 ? "within_paragraph" : "between_paragraphs";
  record.ic = rng() < 0.5 ? "compare" : "contrast";
  const pods: Partial<Record<Label, string>> = {};
  for (const label of ["A", "B", "C", "D"] as Label[]) {
    if (label === key) continue;
    pods[label] = pick(rng, POD_CATEGORIES);
  }
  record.pod_per_distractor = pods;
  record.toc = pick(rng, TOC);
  return record;
}

let api: Api;
let mcqIds: string[] = [];
let keys = new Map<string, Label>();

beforeAll(async () => {
  api = makeApi(process.env.MCQLAB_TEST_BASE ?? "http://127.0.0.1:8461");
  const corpus = await api.corpus();
  mcqIds = corpus.mcqs.map((m) => m.mcq_id);
  for (const id of mcqIds) {
    const bundle = await api.mcq(id);
    keys.set(id, bundle.mcq.key);
  }
});

describe("optimistic subtotal vs server scorecard", () => {
  it("matches exactly for 50 randomized complete drafts", async () => {
    const rng = mulberry32(902100);
    for (let i = 0; i < 50; i++) {
      const mcqId = pick(rng, mcqIds);
      const record = randomCompleteDraft(rng, mcqId, keys.get(mcqId)!);
      const local = computeSubtotal(record);
      expect(local.missing, JSON.stringify(record)).toEqual([]);

      const response = await api.score(record);
      expect(response.scorecard, JSON.stringify(record)).not.toBeNull();
      expect(local.totalX2! / 2, JSON.stringify(record))
        .toBe(response.scorecard!.total);
    }
  });

  it("agrees with the server about incomplete drafts", async () => {
    const record: AnnotationRecord = {
      mcq_id: mcqIds[0]!, toi_concepts: "person",
    };
    const local = computeSubtotal(record);
    const response = await api.score(record);
    const serverMissing = response.findings
      .filter((f) => f.kind === "missing").map((f) => f.variable).sort();
    expect([...local.missing].sort()).toEqual(serverMissing);
    expect(response.scorecard).toBeNull();
    expect(local.totalX2).toBeNull();
  });

  it("treats a 3-to-1 concept split as unscorable, like the server", async () => {
    const record: AnnotationRecord = {
      ...randomCompleteDraft(mulberry32(7), mcqIds[0]!, keys.get(mcqIds[0]!)!),
      toi_concepts: { A: "person", B: "person", C: "person", D: "time" },
    };
    const local = computeSubtotal(record);
    expect(local.missing).toContain("TOI");
    const response = await api.score(record);
    expect(response.scorecard).toBeNull();
  });
});

describe("save-reload round trip", () => {
  it("reproduces 50 randomized drafts byte-identically", async () => {
    const rng = mulberry32(424242);
    for (let i = 0; i < 50; i++) {
      const mcqId = pick(rng, mcqIds);
      const record = randomCompleteDraft(rng, mcqId, keys.get(mcqId)!);
      if (rng() < 0.3) delete record.toc;                    // partial drafts too
      if (rng() < 0.5) {
        record.bases = [
          { label: "A", start: 3, end: 40 },
          { label: "D", start: 50, end: 90 },
        ];
      }
      const draft = new Draft(mcqId, record);
      const sent = draft.serialize();

      const saved = await api.save(mcqId, draft.toWire());
      expect(canonicalSerialize(saved.record)).toBe(sent);

      const bundle = await api.mcq(mcqId);
      expect(bundle.annotation).not.toBeNull();
      const reloaded = new Draft(mcqId, bundle.annotation);
      expect(reloaded.serialize()).toBe(sent);
    }
  });

  it("reports revision conflicts on stale writes", async () => {
    const mcqId = mcqIds[mcqIds.length - 1]!;
    const draft = new Draft(mcqId);
    draft.select("toi_concepts", "person");
    const first = await api.save(mcqId, draft.toWire());
    await expect(api.save(mcqId, draft.toWire(), first.revision - 1))
      .rejects.toThrow();
    const second = await api.save(mcqId, draft.toWire(), first.revision);
    expect(second.revision).toBe(first.revision + 1);
  });
});
