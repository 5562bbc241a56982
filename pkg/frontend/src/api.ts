/** Thin fetch wrappers over the annotation server API. */

import type {
  AnnotationRecord,
  CorpusIndex,
  McqBundle,
  PutResponse,
  ScorecardJson,
  ValidationFinding,
} from "./types";

export class RevisionConflictError extends Error {}

async function expectOk(resp: Response): Promise<Response> {
  if (resp.status === 409) {
    throw new RevisionConflictError(await resp.text());
  }
  if (!resp.ok) {
    throw new Error(`${resp.status}: ${await resp.text()}`);
  }
  return resp;
}

export function makeApi(base = "") {
  return {
    async corpus(): Promise<CorpusIndex> {
      return (await expectOk(await fetch(`${base}/api/corpus`))).json();
    },
    async mcq(mcqId: string): Promise<McqBundle> {
      return (await expectOk(
        await fetch(`${base}/api/mcq/${encodeURIComponent(mcqId)}`),
      )).json();
    },
    async save(
      mcqId: string,
      record: AnnotationRecord,
      expectedRevision?: number,
    ): Promise<PutResponse> {
      const query = expectedRevision === undefined
        ? "" : `?expected_revision=${expectedRevision}`;
      return (await expectOk(await fetch(
        `${base}/api/annotation/${encodeURIComponent(mcqId)}${query}`,
        {
          method: "PUT",
          headers: { "Content-Type": "application/json" },
          body: JSON.stringify(record),
        },
      ))).json();
    },
    async score(record: AnnotationRecord): Promise<
      { findings: ValidationFinding[]; scorecard: ScorecardJson | null }
    > {
      return (await expectOk(await fetch(`${base}/api/score`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(record),
      }))).json();
    },
  };
}

export type Api = ReturnType<typeof makeApi>;
