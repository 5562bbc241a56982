/**
 * Typed access to the shared vocabulary file. The JSON under generated/ is
 * copied from the Python package by scripts/sync-vocabulary.mjs at
 * build/test time; nothing here is hand-maintained.
 */

import raw from "./generated/vocabulary.json";

export interface CountBand {
  label: string;
  min: number;
  max: number | null;
  points_x2: number;
}

interface VocabularyFile {
  variables: {
    TOI: {
      bands: { points_x2: number; concepts: string[] }[];
      aliases: Record<string, string>;
      context_dependent: Record<string, string>;
    };
    TOM: {
      relations: string[];
      symmetric_pairs: { a: string; b: string; points_x2: number }[];
      hlti_points_x2: number;
      gen_points_x2: number;
      categories: { name: string; points_x2: number }[];
    };
    NPhr: { bands: CountBand[] };
    NI: { bands: CountBand[] };
    NIt: { categories: { name: string; points_x2: number }[] };
    NPar: { categories: { name: string; points_x2: number }[] };
    IC: { categories: { name: string }[]; rows: { points_x2: number }[] };
    POD: { categories: { name: string; points_x2: number }[] };
    TOC: { categories: { name: string; points_x2: number }[] };
  };
  error_types: { name: string; severity: string; elements: string[] }[];
  severities: string[];
  acceptability_order: string[];
  text_formats: string[];
  memberships: string[];
  aspects: string[];
  exclusion_flags: string[];
}

export const vocabulary = raw as unknown as VocabularyFile;

function categoryMap(categories: { name: string; points_x2: number }[]) {
  return new Map(categories.map((c) => [c.name, c.points_x2]));
}

export const toiPoints: Map<string, number> = new Map();
for (const band of vocabulary.variables.TOI.bands) {
  for (const concept of band.concepts) toiPoints.set(concept, band.points_x2);
}
export const toiAliases = new Map(Object.entries(vocabulary.variables.TOI.aliases));

export const tomPairs = new Map<string, number>();
for (const p of vocabulary.variables.TOM.symmetric_pairs) {
  tomPairs.set(`${p.a}|${p.b}`, p.points_x2);
  tomPairs.set(`${p.b}|${p.a}`, p.points_x2);
}
export const tomRelations = vocabulary.variables.TOM.relations;
export const hltiPointsX2 = vocabulary.variables.TOM.hlti_points_x2;
export const genPointsX2 = vocabulary.variables.TOM.gen_points_x2;

export const nphrBands = vocabulary.variables.NPhr.bands;
export const niBands = vocabulary.variables.NI.bands;
export const nitPoints = categoryMap(vocabulary.variables.NIt.categories);
export const nparPoints = categoryMap(vocabulary.variables.NPar.categories);
export const icRows = vocabulary.variables.IC.rows.map((r) => r.points_x2);
export const podPoints = categoryMap(vocabulary.variables.POD.categories);
export const podRowIndex = new Map(
  vocabulary.variables.POD.categories.map((c, i) => [c.name, i]),
);
export const tocPoints = categoryMap(vocabulary.variables.TOC.categories);

export const errorSeverity = new Map(
  vocabulary.error_types.map((e) => [e.name, e.severity]),
);

/** Resolve a concept or accepted alias to its table entry, else null. */
export function resolveToiConcept(concept: string): string | null {
  const c = concept.trim().toLowerCase();
  if (toiPoints.has(c)) return c;
  const target = toiAliases.get(c);
  return target ?? null;
}

export function bandPointsX2(bands: CountBand[], count: number): number | null {
  for (const b of bands) {
    if (count >= b.min && (b.max === null || count <= b.max)) return b.points_x2;
  }
  return null;
}

/** Render half-point units the way the server does (13, 13.5, ...). */
export function pointsToNumber(x2: number): number {
  return x2 % 2 === 0 ? x2 / 2 : x2 / 2;
}

export function formatPoints(x2: number): string {
  return x2 % 2 === 0 ? String(x2 / 2) : (x2 / 2).toFixed(1);
}
