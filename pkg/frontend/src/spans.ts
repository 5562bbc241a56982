/**
 * Selection-to-span mapping, kept pure so it is testable without a DOM.
 * The passage renders as a list of segments, each knowing its character
 * offset into the body; a selection is (segment, offset-in-segment) for
 * both ends. Bases live in the passage only: selections landing outside
 * the rendered passage are rejected with a notice.
 */

import type { BasisJson, Label } from "./types";

export interface RenderedSegment {
  bodyStart: number;
  text: string;
}

export interface SelectionPoint {
  segment: number;          // index into the segment list
  offset: number;           // character offset within the segment
}

export type SelectionResult =
  | { ok: true; start: number; end: number }
  | { ok: false; notice: string };

export function resolveSelection(
  segments: RenderedSegment[],
  anchor: SelectionPoint,
  focus: SelectionPoint,
): SelectionResult {
  const toBody = (p: SelectionPoint): number | null => {
    const seg = segments[p.segment];
    if (!seg || p.offset < 0 || p.offset > seg.text.length) return null;
    return seg.bodyStart + p.offset;
  };
  const a = toBody(anchor);
  const b = toBody(focus);
  if (a === null || b === null) {
    return { ok: false, notice: "selection lies outside the passage" };
  }
  const [start, end] = a <= b ? [a, b] : [b, a];
  if (start === end) {
    return { ok: false, notice: "empty selection" };
  }
  return { ok: true, start, end };
}

/** Merge overlapping or touching spans for the same alternative. */
export function mergeBases(bases: BasisJson[]): BasisJson[] {
  const byLabel = new Map<Label, BasisJson[]>();
  for (const basis of bases) {
    const list = byLabel.get(basis.label) ?? [];
    list.push(basis);
    byLabel.set(basis.label, list);
  }
  const merged: BasisJson[] = [];
  for (const label of ["A", "B", "C", "D"] as Label[]) {
    const list = (byLabel.get(label) ?? []).slice()
      .sort((x, y) => x.start - y.start || x.end - y.end);
    for (const span of list) {
      const last = merged[merged.length - 1];
      if (last && last.label === label && span.start <= last.end) {
        last.end = Math.max(last.end, span.end);
      } else {
        merged.push({ ...span });
      }
    }
  }
  return merged;
}

export function addBasis(
  bases: BasisJson[],
  label: Label,
  start: number,
  end: number,
): BasisJson[] {
  return mergeBases([...bases, { label, start, end }]);
}
