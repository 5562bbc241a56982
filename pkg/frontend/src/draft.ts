/**
 * Draft state for one MCQ: category selection, basis marking, canonical
 * serialization. Canonicalization (schema key order, sorted maps, no
 * empty collections) makes save-reload round trips byte-comparable.
 */

import { computeSubtotal, type Subtotal, type Variable } from "./scoring";
import { addBasis } from "./spans";
import type { AnnotationRecord, BasisJson, ErrorMarkJson, Label } from "./types";

const KEY_ORDER = [
  "mcq_id", "toi_concepts", "tom_tq", "tom_ta", "tom_gen", "nphr", "ni",
  "nit", "npar", "ic", "pod_per_distractor", "toc", "bases", "error_marks",
  "exclusion_flags", "text_format", "membership", "aspect",
] as const;

export class Draft {
  record: AnnotationRecord;

  constructor(mcqId: string, existing?: AnnotationRecord | null) {
    this.record = existing ? structuredClone(existing) : { mcq_id: mcqId };
    this.record.mcq_id = mcqId;
  }

  /** Set one rubric field; undefined clears it. Returns the new subtotal. */
  select(field: keyof AnnotationRecord, value: unknown): Subtotal {
    const fields = this.record as unknown as Record<string, unknown>;
    if (value === undefined) {
      delete fields[field];
    } else {
      fields[field] = value;
    }
    return this.subtotal();
  }

  selectPod(label: Label, category: string | undefined): Subtotal {
    const pods = { ...(this.record.pod_per_distractor ?? {}) };
    if (category === undefined) delete pods[label];
    else pods[label] = category;
    if (Object.keys(pods).length === 0) delete this.record.pod_per_distractor;
    else this.record.pod_per_distractor = pods;
    return this.subtotal();
  }

  markBasis(label: Label, start: number, end: number): Subtotal {
    this.record.bases = addBasis(this.record.bases ?? [], label, start, end);
    return this.subtotal();
  }

  clearBases(label: Label): void {
    const rest = (this.record.bases ?? []).filter((b) => b.label !== label);
    if (rest.length === 0) delete this.record.bases;
    else this.record.bases = rest;
  }

  toggleErrorMark(mark: ErrorMarkJson): void {
    const marks = this.record.error_marks ?? [];
    const found = marks.findIndex(
      (m) => m.element === mark.element && m.error_type === mark.error_type,
    );
    if (found >= 0) marks.splice(found, 1);
    else marks.push(mark);
    if (marks.length === 0) delete this.record.error_marks;
    else this.record.error_marks = marks;
  }

  subtotal(): Subtotal {
    return computeSubtotal(this.record);
  }

  /** Wire form in canonical shape (stable key order, sorted collections). */
  toWire(): AnnotationRecord {
    return canonicalRecord(this.record);
  }

  serialize(): string {
    return canonicalSerialize(this.record);
  }
}

export function canonicalRecord(record: AnnotationRecord): AnnotationRecord {
  const out: Record<string, unknown> = {};
  const fields = record as unknown as Record<string, unknown>;
  for (const key of KEY_ORDER) {
    let value = fields[key];
    if (value === undefined || value === null) continue;
    if (key === "tom_gen" && value !== true) continue;
    if (key === "pod_per_distractor") {
      const pods = value as Record<string, string>;
      if (Object.keys(pods).length === 0) continue;
      value = Object.fromEntries(
        Object.keys(pods).sort().map((k) => [k, pods[k]]),
      );
    }
    if (key === "bases") {
      const bases = (value as BasisJson[]).map((b) => ({
        label: b.label, start: b.start, end: b.end,
      }));
      if (bases.length === 0) continue;
      value = bases;
    }
    if (key === "error_marks") {
      const marks = value as ErrorMarkJson[];
      if (marks.length === 0) continue;
      value = marks.map((m) =>
        m.span ? { element: m.element, error_type: m.error_type, span: m.span }
               : { element: m.element, error_type: m.error_type });
    }
    if (key === "exclusion_flags") {
      const flags = [...(value as string[])].sort();
      if (flags.length === 0) continue;
      value = flags;
    }
    out[key] = value;
  }
  return out as unknown as AnnotationRecord;
}

export function canonicalSerialize(record: AnnotationRecord): string {
  return JSON.stringify(canonicalRecord(record));
}
