/**
 * Optimistic scoring mirror. Computes the same half-point-unit subtotal
 * the server would return for a complete record, from the shared
 * vocabulary tables. The server stays authoritative on save; this exists
 * so the annotator sees the difficulty move as they pick categories.
 */

import type { AnnotationRecord, Label } from "./types";
import {
  bandPointsX2,
  genPointsX2,
  hltiPointsX2,
  icRows,
  nitPoints,
  niBands,
  nparPoints,
  nphrBands,
  podPoints,
  podRowIndex,
  resolveToiConcept,
  tocPoints,
  toiPoints,
  tomPairs,
  tomRelations,
} from "./vocabulary";

export const VARIABLES = ["TOI", "TOM", "NPhr", "NI", "NIt", "NPar", "IC", "POD", "TOC"] as const;
export type Variable = (typeof VARIABLES)[number];

export interface Subtotal {
  componentsX2: Partial<Record<Variable, number>>;
  totalX2: number | null;      // null until every variable resolves
  missing: Variable[];
}

const LABELS: Label[] = ["A", "B", "C", "D"];

/** TOI resolution: single concept, 2+2/4-distinct -> indeterminate,
 * 3+1 -> null (excluded from scoring). */
export function resolveToi(record: AnnotationRecord): string | null {
  const toi = record.toi_concepts;
  if (toi === undefined) return null;
  if (typeof toi === "string") return resolveToiConcept(toi);
  const resolved: string[] = [];
  for (const label of LABELS) {
    const concept = toi[label];
    if (concept === undefined) return null;
    const r = resolveToiConcept(concept);
    if (r === null) return null;
    resolved.push(r);
  }
  const counts = new Map<string, number>();
  for (const r of resolved) counts.set(r, (counts.get(r) ?? 0) + 1);
  const sizes = [...counts.values()].sort((a, b) => b - a);
  if (sizes[0] === 4) return resolved[0] ?? null;
  if (sizes[0] === 3) return null; // 3-to-1 split: excluded
  return "indeterminate";
}

export function tomPointsX2(record: AnnotationRecord): number | null {
  if (record.tom_gen) return genPointsX2;
  const { tom_tq: tq, tom_ta: ta } = record;
  if (!tq || !ta) return null;
  if (!tomRelations.includes(tq) || !tomRelations.includes(ta)) return null;
  if (tq === "HLTI" && ta === "HLTI") return null; // must be marked GEN
  if (tq === "HLTI" || ta === "HLTI") return hltiPointsX2;
  return tomPairs.get(`${tq}|${ta}`) ?? null;
}

export function icPointsX2(ic: string, npar: string): number {
  return ic === "contrast" && npar === "within_paragraph"
    ? (icRows[1] ?? 2)
    : (icRows[0] ?? 0);
}

export function selectPodCategory(perDistractor: Partial<Record<Label, string>>): string | null {
  let best: string | null = null;
  for (const category of Object.values(perDistractor)) {
    if (category === undefined || !podPoints.has(category)) return null;
    if (
      best === null ||
      podPoints.get(category)! > podPoints.get(best)! ||
      (podPoints.get(category) === podPoints.get(best) &&
        podRowIndex.get(category)! > podRowIndex.get(best)!)
    ) {
      best = category;
    }
  }
  return best;
}

export function computeSubtotal(record: AnnotationRecord): Subtotal {
  const componentsX2: Partial<Record<Variable, number>> = {};
  const missing: Variable[] = [];

  const put = (variable: Variable, value: number | null | undefined) => {
    if (value === null || value === undefined) missing.push(variable);
    else componentsX2[variable] = value;
  };

  const toi = resolveToi(record);
  put("TOI", toi === null ? null : toiPoints.get(toi));
  put("TOM", tomPointsX2(record));
  put("NPhr", record.nphr !== undefined && record.nphr >= 1
    ? bandPointsX2(nphrBands, record.nphr) : null);
  put("NI", record.ni !== undefined && record.ni >= 1
    ? bandPointsX2(niBands, record.ni) : null);
  put("NIt", record.nit !== undefined ? nitPoints.get(record.nit) : null);
  put("NPar", record.npar !== undefined ? nparPoints.get(record.npar) : null);
  if (record.ic !== undefined && record.npar !== undefined && nparPoints.has(record.npar)) {
    put("IC", icPointsX2(record.ic, record.npar));
  } else {
    put("IC", null);
  }
  const pod = record.pod_per_distractor && Object.keys(record.pod_per_distractor).length
    ? selectPodCategory(record.pod_per_distractor)
    : null;
  put("POD", pod === null ? null : podPoints.get(pod));
  put("TOC", record.toc !== undefined ? tocPoints.get(record.toc) : null);

  const totalX2 = missing.length === 0
    ? VARIABLES.reduce((sum, v) => sum + (componentsX2[v] ?? 0), 0)
    : null;
  return { componentsX2, totalX2, missing };
}
