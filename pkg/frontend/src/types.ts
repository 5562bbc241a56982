/** Wire types shared with the annotation server (same schemas as the files). */

export type Label = "A" | "B" | "C" | "D";

export interface BasisJson {
  label: Label;
  start: number;
  end: number;
}

export interface ErrorMarkJson {
  element: string;
  error_type: string;
  span?: { start: number; end: number };
}

/** One annotation record; every rubric field optional while drafting. */
export interface AnnotationRecord {
  mcq_id: string;
  toi_concepts?: string | Record<Label, string>;
  tom_tq?: string;
  tom_ta?: string;
  tom_gen?: boolean;
  nphr?: number;
  ni?: number;
  nit?: string;
  npar?: string;
  ic?: string;
  pod_per_distractor?: Partial<Record<Label, string>>;
  toc?: string;
  bases?: BasisJson[];
  error_marks?: ErrorMarkJson[];
  exclusion_flags?: string[];
  text_format?: string;
  membership?: string;
  aspect?: string;
}

export interface ScorecardJson {
  mcq_id: string;
  TOI: number; TOM: number; NPhr: number; NI: number; NIt: number;
  NPar: number; IC: number; POD: number; TOC: number;
  total: number;
}

export interface ValidationFinding {
  variable: string;
  kind: "missing" | "inconsistent";
  message: string;
}

export interface McqBundle {
  mcq: {
    mcq_id: string;
    text_id: string;
    stem: string;
    stem_style: string;
    alternatives: Record<Label, string>;
    key: Label;
  };
  passage: {
    text_id: string;
    body: string;
    paragraphs: [number, number][];
  };
  suggestions: Record<string, unknown>;
  detected_findings: unknown[];
  detected_categories: Record<string, string>;
  annotation: AnnotationRecord | null;
  revision: number;
  validation?: { findings: ValidationFinding[]; scorecard: ScorecardJson | null };
}

export interface CorpusIndex {
  mcqs: { mcq_id: string; text_id: string; annotated: boolean }[];
  progress: { annotated: number; total: number };
}

export interface PutResponse {
  findings: ValidationFinding[];
  scorecard: ScorecardJson | null;
  revision: number;
  record: AnnotationRecord;
}
