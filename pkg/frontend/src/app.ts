// The analyst console: assessment form + verdict panel, what-if sweeps, and
// batch CSV scoring. All verdicts come from the injected API client; later
// clicks on the same action cancel the in-flight request.

import type {
  Assessment,
  FieldKey,
  Prediction,
  WhatIfResponse,
} from "./api.js";
import { ApiError, FIELD_KEYS, parsePredictionCsv } from "./api.js";
import {
  FIELD_LABELS,
  FormState,
  RATING_LABELS,
  createAssessmentForm,
  isComplete,
} from "./form.js";

export interface ApiLike {
  predict(assessment: Assessment, signal?: AbortSignal): Promise<Prediction>;
  whatIf(base: Assessment, feature: FieldKey, signal?: AbortSignal): Promise<WhatIfResponse>;
  batch(csvBody: string, signal?: AbortSignal): Promise<{ csv: string; errorPercent: number | null }>;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function readFileText(file: File): Promise<string> {
  return new Promise((resolve, reject) => {
    const reader = new FileReader();
    reader.onload = () => resolve(String(reader.result));
    reader.onerror = () => reject(reader.error);
    reader.readAsText(file);
  });
}

export class Console {
  private form;
  private submitButton: HTMLButtonElement;
  private sweepButton: HTMLButtonElement;
  private featureSelect: HTMLSelectElement;
  private verdictPanel: HTMLElement;
  private banner: HTMLElement;
  private sweepTable: HTMLElement;
  private batchInput: HTMLInputElement;
  private batchButton: HTMLButtonElement;
  private batchSection: HTMLElement;

  private predictAbort: AbortController | null = null;
  private sweepAbort: AbortController | null = null;
  private batchAbort: AbortController | null = null;

  constructor(private root: HTMLElement, private api: ApiLike) {
    this.banner = el("div", "banner hidden");
    root.appendChild(this.banner);

    const formSection = el("section", "panel");
    formSection.appendChild(el("h2", undefined, "Assessment"));
    this.form = createAssessmentForm(() => this.onFormChange());
    formSection.appendChild(this.form.element);

    this.submitButton = el("button", "primary", "Assess risk");
    this.submitButton.disabled = true;
    this.submitButton.addEventListener("click", () => void this.submit());
    formSection.appendChild(this.submitButton);
    root.appendChild(formSection);

    this.verdictPanel = el("section", "panel verdict hidden");
    root.appendChild(this.verdictPanel);

    const sweepSection = el("section", "panel");
    sweepSection.appendChild(el("h2", undefined, "What-if sweep"));
    this.featureSelect = el("select") as HTMLSelectElement;
    for (const key of FIELD_KEYS) {
      const option = el("option", undefined, FIELD_LABELS[key]) as HTMLOptionElement;
      option.value = key;
      this.featureSelect.appendChild(option);
    }
    sweepSection.appendChild(this.featureSelect);
    this.sweepButton = el("button", undefined, "Sweep");
    this.sweepButton.disabled = true;
    this.sweepButton.addEventListener("click", () => void this.sweep());
    sweepSection.appendChild(this.sweepButton);
    this.sweepTable = el("div", "sweep-table");
    sweepSection.appendChild(this.sweepTable);
    root.appendChild(sweepSection);

    const batchSection = el("section", "panel");
    batchSection.appendChild(el("h2", undefined, "Batch scoring"));
    this.batchInput = el("input") as HTMLInputElement;
    this.batchInput.type = "file";
    this.batchInput.accept = ".csv,text/csv";
    batchSection.appendChild(this.batchInput);
    this.batchButton = el("button", undefined, "Score file");
    this.batchButton.addEventListener("click", () => void this.uploadBatch());
    batchSection.appendChild(this.batchButton);
    this.batchSection = el("div", "batch-results");
    batchSection.appendChild(this.batchSection);
    root.appendChild(batchSection);
  }

  private onFormChange(): void {
    const complete = isComplete(this.form.getState());
    this.submitButton.disabled = !complete;
    this.sweepButton.disabled = !complete;
  }

  getFormState(): FormState {
    return this.form.getState();
  }

  private showError(message: string): void {
    this.banner.textContent = message;
    this.banner.classList.remove("hidden");
  }

  private clearError(): void {
    this.banner.classList.add("hidden");
    this.banner.textContent = "";
  }

  async submit(): Promise<void> {
    const state = this.form.getState();
    if (!isComplete(state)) return;
    this.predictAbort?.abort();
    this.predictAbort = new AbortController();
    this.clearError();
    try {
      const prediction = await this.api.predict(state, this.predictAbort.signal);
      this.renderVerdict(prediction);
    } catch (error) {
      this.handleFailure(error);
    }
  }

  private renderVerdict(prediction: Prediction): void {
    this.verdictPanel.innerHTML = "";
    this.verdictPanel.classList.remove("hidden");
    const risky = prediction.label === "B";
    const badge = el("span", risky ? "badge high-risk" : "badge low-risk");
    badge.textContent = risky ? "B — high risk" : "NB — low risk";
    badge.dataset.label = prediction.label;
    this.verdictPanel.appendChild(badge);
    this.verdictPanel.appendChild(
      el("span", "score", `score ${prediction.score.toFixed(3)}`),
    );
    this.verdictPanel.appendChild(
      el("span", "model-id", `model ${prediction.model_id} (${prediction.algorithm})`),
    );
  }

  async sweep(): Promise<void> {
    const state = this.form.getState();
    if (!isComplete(state)) return;
    const feature = this.featureSelect.value as FieldKey;
    this.sweepAbort?.abort();
    this.sweepAbort = new AbortController();
    this.clearError();
    try {
      const response = await this.api.whatIf(state, feature, this.sweepAbort.signal);
      this.renderSweep(feature, response, state[feature]!);
    } catch (error) {
      this.handleFailure(error);
    }
  }

  private renderSweep(feature: FieldKey, response: WhatIfResponse, current: string): void {
    this.sweepTable.innerHTML = "";
    const table = el("table");
    const head = el("tr");
    for (const title of [FIELD_LABELS[feature], "Verdict", "Score"]) {
      head.appendChild(el("th", undefined, title));
    }
    table.appendChild(head);
    for (const entry of response.results) {
      const row = el("tr", entry.rating === current ? "current" : undefined);
      row.dataset.rating = entry.rating;
      const ratingCell = el("td", undefined, RATING_LABELS[entry.rating]);
      row.appendChild(ratingCell);
      const verdictCell = el("td", undefined, entry.prediction.label);
      verdictCell.dataset.label = entry.prediction.label;
      row.appendChild(verdictCell);
      row.appendChild(el("td", undefined, entry.prediction.score.toFixed(3)));
      row.addEventListener("click", () => {
        this.form.setRating(feature, entry.rating);
        this.renderSweep(feature, response, entry.rating);
      });
      table.appendChild(row);
    }
    this.sweepTable.appendChild(table);
  }

  async uploadBatch(): Promise<void> {
    const file = this.batchInput.files?.[0];
    this.clearError();
    if (!file || file.size === 0) {
      this.showError("choose a non-empty CSV file first");
      return;
    }
    this.batchAbort?.abort();
    this.batchAbort = new AbortController();
    try {
      const body = await readFileText(file);
      const result = await this.api.batch(body, this.batchAbort.signal);
      this.renderBatch(result.csv, result.errorPercent);
    } catch (error) {
      this.handleFailure(error);
    }
  }

  private renderBatch(csv: string, errorPercent: number | null): void {
    this.batchSection.innerHTML = "";
    if (errorPercent !== null) {
      this.batchSection.appendChild(
        el("div", "error-percent", `prediction error: ${errorPercent.toFixed(4)}%`),
      );
    }
    const rows = parsePredictionCsv(csv);
    const table = el("table");
    const head = el("tr");
    for (const title of ["IR", "MR", "FF", "CR", "CO", "OR", "Verdict", "Score", "Actual"]) {
      head.appendChild(el("th", undefined, title));
    }
    table.appendChild(head);
    for (const row of rows) {
      const tr = el("tr");
      for (const token of row.ratings) tr.appendChild(el("td", undefined, token));
      const verdict = el("td", undefined, row.predicted);
      verdict.dataset.label = row.predicted;
      tr.appendChild(verdict);
      tr.appendChild(el("td", undefined, row.score.toFixed(6)));
      tr.appendChild(el("td", undefined, row.actual ?? ""));
      table.appendChild(tr);
    }
    this.batchSection.appendChild(table);

    const download = el("a", "download", "Download CSV") as HTMLAnchorElement;
    download.href = URL.createObjectURL(new Blob([csv], { type: "text/csv" }));
    download.download = "predictions.csv";
    this.batchSection.appendChild(download);
  }

  private handleFailure(error: unknown): void {
    if (error instanceof DOMException && error.name === "AbortError") {
      return; // superseded by a newer click
    }
    if (error instanceof ApiError) {
      this.showError(`service error (${error.status}): ${error.message}`);
      return;
    }
    this.showError(`request failed: ${error instanceof Error ? error.message : String(error)}`);
  }
}

export function mountConsole(root: HTMLElement, api: ApiLike): Console {
  return new Console(root, api);
}
