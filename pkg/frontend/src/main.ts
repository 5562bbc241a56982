/**
 * Workbench wiring: corpus navigation, passage rendering with basis
 * marking, category pickers driven by the shared vocabulary, live
 * validation and subtotal, save with revision checking.
 */

import "./style.css";
import { makeApi, RevisionConflictError } from "./api";
import { Draft } from "./draft";
import { formatPoints, vocabulary, podPoints, nitPoints, nparPoints, tocPoints, toiPoints } from "./vocabulary";
import { resolveSelection, type RenderedSegment } from "./spans";
import type { Label, McqBundle } from "./types";

const api = makeApi("");
const LABELS: Label[] = ["A", "B", "C", "D"];

let order: string[] = [];
let index = 0;
let bundle: McqBundle | null = null;
let draft: Draft | null = null;
let revision = 0;
let segments: RenderedSegment[] = [];

const el = (id: string) => document.getElementById(id)!;

function notice(message: string, kind: "info" | "warn" = "info"): void {
  const box = el("notice");
  box.textContent = message;
  box.className = kind;
  if (message) setTimeout(() => { box.textContent = ""; }, 4000);
}

async function loadList(): Promise<void> {
  const corpus = await api.corpus();
  order = corpus.mcqs.map((m) => m.mcq_id);
  el("progress").textContent =
    `${corpus.progress.annotated} / ${corpus.progress.total} annotated`;
  const list = el("mcq-list");
  list.innerHTML = "";
  corpus.mcqs.forEach((m, i) => {
    const item = document.createElement("li");
    item.textContent = (m.annotated ? "✓ " : "· ") + m.mcq_id;
    item.className = i === index ? "current" : "";
    item.onclick = () => { void open(i); };
    list.appendChild(item);
  });
}

function renderPassage(): void {
  const container = el("passage");
  container.innerHTML = "";
  segments = [];
  if (!bundle) return;
  const { body, paragraphs } = bundle.passage;
  const ranges = paragraphs.length ? paragraphs : [[0, body.length] as [number, number]];
  for (const [start, end] of ranges) {
    const p = document.createElement("p");
    const text = body.slice(start, end);
    p.appendChild(document.createTextNode(text));
    p.dataset.bodyStart = String(start);
    container.appendChild(p);
    segments.push({ bodyStart: start, text });
  }
  renderBasisBadges();
}

function renderBasisBadges(): void {
  const existing = el("passage").querySelectorAll(".basis-badge");
  existing.forEach((n) => n.remove());
  if (!draft) return;
  const badge = document.createElement("div");
  badge.className = "basis-badge";
  const bases = draft.record.bases ?? [];
  badge.textContent = bases.length
    ? "bases: " + bases.map((b) => `${b.label}[${b.start},${b.end})`).join("  ")
    : "no bases marked";
  el("passage").appendChild(badge);
}

function selectionPoints(): { segment: number; offset: number }[] | null {
  const selection = window.getSelection();
  if (!selection || selection.rangeCount === 0 || selection.isCollapsed) return null;
  const range = selection.getRangeAt(0);
  const container = el("passage");
  const points = [];
  for (const [node, offset] of [
    [range.startContainer, range.startOffset],
    [range.endContainer, range.endOffset],
  ] as const) {
    const p = node instanceof Element ? node : node.parentElement;
    const paragraph = p?.closest("p[data-body-start]");
    if (!paragraph || !container.contains(paragraph)) return null;
    const segment = Array.from(container.querySelectorAll("p[data-body-start]"))
      .indexOf(paragraph);
    points.push({ segment, offset: offset as number });
  }
  return points;
}

function markBasis(label: Label): void {
  if (!draft) return;
  const points = selectionPoints();
  if (!points) {
    notice("bases are marked by selecting passage text first", "warn");
    return;
  }
  const [anchor, focus] = points;
  const result = resolveSelection(segments, anchor!, focus!);
  if (!result.ok) {
    notice(result.notice, "warn");
    return;
  }
  draft.markBasis(label, result.start, result.end);
  window.getSelection()?.removeAllRanges();
  renderBasisBadges();
  renderScore();
}

function picker(
  name: string,
  options: { value: string; pointsX2?: number }[],
  current: string | undefined,
  onChange: (value: string | undefined) => void,
): HTMLElement {
  const wrap = document.createElement("div");
  wrap.className = "picker";
  const title = document.createElement("label");
  title.textContent = name;
  wrap.appendChild(title);
  const select = document.createElement("select");
  const blank = document.createElement("option");
  blank.value = "";
  blank.textContent = "—";
  select.appendChild(blank);
  for (const option of options) {
    const o = document.createElement("option");
    o.value = option.value;
    o.textContent = option.pointsX2 === undefined
      ? option.value
      : `${option.value}  (${formatPoints(option.pointsX2)} pt)`;
    select.appendChild(o);
  }
  select.value = current ?? "";
  select.onchange = () => {
    onChange(select.value === "" ? undefined : select.value);
    renderScore();
  };
  wrap.appendChild(select);
  return wrap;
}

function counter(name: string, current: number | undefined,
                 onChange: (v: number | undefined) => void): HTMLElement {
  const wrap = document.createElement("div");
  wrap.className = "picker";
  const title = document.createElement("label");
  title.textContent = name;
  wrap.appendChild(title);
  const input = document.createElement("input");
  input.type = "number";
  input.min = "1";
  input.value = current === undefined ? "" : String(current);
  input.onchange = () => {
    const v = input.value === "" ? undefined : Number(input.value);
    onChange(v);
    renderScore();
  };
  wrap.appendChild(input);
  return wrap;
}

function renderPickers(): void {
  if (!draft || !bundle) return;
  const d = draft;
  const form = el("pickers");
  form.innerHTML = "";
  const record = d.record;

  const mapOptions = (m: Map<string, number>) =>
    [...m.entries()].map(([value, pointsX2]) => ({ value, pointsX2 }));

  form.appendChild(picker(
    "TOI concept",
    [...toiPoints.entries()].map(([value, pointsX2]) => ({ value, pointsX2 })),
    typeof record.toi_concepts === "string" ? record.toi_concepts : undefined,
    (v) => d.select("toi_concepts", v),
  ));
  const relations = vocabulary.variables.TOM.relations.map((value) => ({ value }));
  form.appendChild(picker("TOM T-Q", relations, record.tom_tq,
    (v) => d.select("tom_tq", v)));
  form.appendChild(picker("TOM T-A", relations, record.tom_ta,
    (v) => d.select("tom_ta", v)));
  form.appendChild(picker("TOM GEN", [{ value: "yes" }],
    record.tom_gen ? "yes" : undefined,
    (v) => d.select("tom_gen", v === "yes" ? true : undefined)));
  form.appendChild(counter("NPhr (clauses)", record.nphr,
    (v) => d.select("nphr", v)));
  form.appendChild(counter("NI (items)", record.ni, (v) => d.select("ni", v)));
  form.appendChild(picker("NIt", mapOptions(nitPoints), record.nit,
    (v) => d.select("nit", v)));
  form.appendChild(picker("NPar", mapOptions(nparPoints), record.npar,
    (v) => d.select("npar", v)));
  form.appendChild(picker("IC", vocabulary.variables.IC.categories
    .map((c) => ({ value: c.name })), record.ic, (v) => d.select("ic", v)));
  for (const label of LABELS) {
    if (label === bundle.mcq.key) continue;
    form.appendChild(picker(`POD distractor ${label}`, mapOptions(podPoints),
      record.pod_per_distractor?.[label],
      (v) => d.selectPod(label, v)));
  }
  form.appendChild(picker("TOC", mapOptions(tocPoints), record.toc,
    (v) => d.select("toc", v)));
}

function renderScore(serverTotal?: number | null): void {
  if (!draft) return;
  const subtotal = draft.subtotal();
  const box = el("score-box");
  if (subtotal.totalX2 !== null) {
    const shown = formatPoints(subtotal.totalX2);
    box.textContent = serverTotal != null
      ? `difficulty ${serverTotal} (saved)`
      : `difficulty ${shown} (draft)`;
    box.className = "complete";
  } else {
    box.textContent = `incomplete: ${subtotal.missing.join(", ")}`;
    box.className = "incomplete";
  }
}

function renderUnit(): void {
  if (!bundle) return;
  el("passage-title").textContent =
    `${bundle.passage.text_id} · ${bundle.mcq.mcq_id} (${bundle.mcq.stem_style})`;
  el("stem").textContent = bundle.mcq.stem;
  const list = el("alternatives");
  list.innerHTML = "";
  for (const label of LABELS) {
    const item = document.createElement("li");
    item.textContent = `${label}. ${bundle.mcq.alternatives[label]}`;
    if (label === bundle.mcq.key) item.className = "key";
    list.appendChild(item);
  }
  const detected = el("detected");
  const findings = bundle.detected_findings as { error_type: string; element: string }[];
  detected.textContent = findings.length
    ? `lint: ${findings.map((f) => `${f.element}:${f.error_type}`).join(", ")}`
    : "lint: clean";
}

async function open(i: number): Promise<void> {
  index = Math.max(0, Math.min(order.length - 1, i));
  const mcqId = order[index];
  if (mcqId === undefined) return;
  bundle = await api.mcq(mcqId);
  draft = new Draft(mcqId, bundle.annotation);
  revision = bundle.revision;
  renderPassage();
  renderUnit();
  renderPickers();
  renderScore(bundle.validation?.scorecard?.total ?? null);
  await loadList();
}

async function save(): Promise<void> {
  if (!draft) return;
  try {
    const response = await api.save(draft.record.mcq_id, draft.toWire(), revision);
    revision = response.revision;
    const missing = response.findings.filter((f) => f.kind === "missing");
    if (response.scorecard) {
      notice(`saved; difficulty ${response.scorecard.total}`);
      renderScore(response.scorecard.total);
    } else {
      notice(`saved draft; missing ${missing.map((f) => f.variable).join(", ")}`);
    }
    el("findings").textContent = response.findings
      .map((f) => `${f.kind}: ${f.message}`).join("\n");
    await loadList();
  } catch (error) {
    if (error instanceof RevisionConflictError) {
      notice("this MCQ changed elsewhere; reload to continue", "warn");
    } else {
      notice(String(error), "warn");
    }
  }
}

function bindKeys(): void {
  document.addEventListener("keydown", (event) => {
    const target = event.target as HTMLElement;
    if (target.tagName === "INPUT" || target.tagName === "SELECT") return;
    if (event.key === "n") void open(index + 1);
    else if (event.key === "p") void open(index - 1);
    else if (event.key === "s") void save();
    else if (["a", "b", "c", "d"].includes(event.key)) {
      markBasis(event.key.toUpperCase() as Label);
    }
  });
}

async function boot(): Promise<void> {
  document.querySelectorAll<HTMLButtonElement>("#basis-controls button")
    .forEach((button) => {
      button.onclick = () => markBasis(button.dataset.basis as Label);
    });
  el("save").onclick = () => void save();
  el("next").onclick = () => void open(index + 1);
  el("prev").onclick = () => void open(index - 1);
  bindKeys();
  await loadList();
  if (order.length) await open(0);
}

void boot();
